//! Boundary-correction polynomials.
//!
//! For every direction `w` on the unit sphere the correction is a radial
//! polynomial `Q(rho w) = sum_a C_a(w) rho^a` that matches prescribed boundary
//! data at `R1` and `R2` (values for order 0, values and radial slopes for
//! order 1) and has zero radial moment `int_{R1}^{R2} Q rho^{n-1} drho`.
//!
//! Two independent routes are provided for order 0: closed-form rational
//! functions `Q_{k,a}(mu)` of `mu = R2/R1 - 1`, composed as
//! `C_k = (-1/R1)^k (Q_{k,1} A_{10} + Q_{k,2} A_{20})`, and a dense solve of the
//! defining linear system. Order 1 only has the dense solve.

pub mod exact;
pub mod identities;

use nalgebra::{DMatrix, DVector, LU};
use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
pub use exact::{psi_polynomial, psi_taylor_coeffs, solve_exact, PolynomialExact, Rational};

/// Field-like numeric types the closed forms can be evaluated in
/// (`f64` and exact [`Rational`]).
pub trait Scalar: Clone + Num + FromPrimitive + PartialOrd {}

impl<T: Clone + Num + FromPrimitive + PartialOrd> Scalar for T {}

fn lift<T: Scalar>(v: i64) -> T {
    T::from_i64(v).expect("small integer is representable")
}

fn powi<T: Scalar>(base: &T, exp: usize) -> T {
    num_traits::pow(base.clone(), exp)
}

/// Row `C(m, 0..=m)` of Pascal's triangle in `T`.
fn binomial_row<T: Scalar>(m: usize) -> Vec<T> {
    let mut row = Vec::with_capacity(m + 1);
    row.push(T::one());
    for k in 1..=m {
        let prev = row[k - 1].clone();
        row.push(prev * lift::<T>((m - k + 1) as i64) / lift::<T>(k as i64));
    }
    row
}

/// `Psi_n(t)` in monomial form.
pub fn eval_psi<T: Scalar>(n: usize, t: &T) -> Result<T> {
    exact::check_dim(n)?;
    let n64 = n as i64;
    let one = T::one();
    let a = (powi(t, n + 4) - one.clone()) / lift::<T>((n64 + 3) * (n64 + 4));
    let b = powi(t, 2) * (powi(t, n) - one.clone()) / lift::<T>(n64 * (n64 + 1));
    let c = lift::<T>(2) * t.clone() * (powi(t, n + 2) - one) / lift::<T>((n64 + 1) * (n64 + 3));
    Ok(a + b - c)
}

/// `n t^{n+2} - (n+2) t^{n+1} + (n+2) t - n`.
pub fn eval_psi_tilde<T: Scalar>(n: usize, t: &T) -> Result<T> {
    exact::check_dim(n)?;
    let n64 = n as i64;
    Ok(lift::<T>(n64) * powi(t, n + 2) - lift::<T>(n64 + 2) * powi(t, n + 1)
        + lift::<T>(n64 + 2) * t.clone()
        - lift::<T>(n64))
}

/// `sum_{a=2}^{n+2} C(n+2, a) (a - 2) (t - 1)^a`, equal to [`eval_psi_tilde`].
pub fn eval_psi_tilde_binomial<T: Scalar>(n: usize, t: &T) -> Result<T> {
    exact::check_dim(n)?;
    let s = t.clone() - T::one();
    Ok(q_denominator(n, &s))
}

/// Common denominator `sum_{a=2}^{n+2} C(n+2, a) (a - 2) mu^a` of every `Q_{k,a}`.
pub fn q_denominator<T: Scalar>(n: usize, mu: &T) -> T {
    let binom = binomial_row::<T>(n + 2);
    (2..=n + 2).fold(T::zero(), |acc, a| {
        acc + binom[a].clone() * lift::<T>(a as i64 - 2) * powi(mu, a)
    })
}

/// Closed-form rational coefficient `Q_{k,a}(mu)`, `k in 0..=2`, `a in 1..=2`.
pub fn rational_q<T: Scalar>(k: usize, a: usize, n: usize, mu: &T) -> Result<T> {
    exact::check_dim(n)?;
    if *mu <= T::zero() {
        return Err(Error::Domain("mu = R2/R1 - 1 must be positive".into()));
    }
    let n64 = n as i64;
    let b2 = binomial_row::<T>(n + 2);
    let b1 = binomial_row::<T>(n + 1);
    let sum = |range: std::ops::RangeInclusive<usize>, term: &dyn Fn(usize) -> T| {
        range.fold(T::zero(), |acc, i| acc + term(i))
    };
    let numerator = match (k, a) {
        (0, 1) => {
            let mid = sum(2..=n + 1, &|al| {
                b2[al].clone() * lift::<T>(n64 * n64 + 3 * n64) / lift::<T>(al as i64 + 1)
                    * powi(mu, al)
            });
            lift::<T>(n64) * powi(mu, n + 2)
                + mid
                + lift::<T>((n64 + 2) * (n64 + 1) * n64 / 2) * mu.clone()
        }
        (0, 2) => sum(0..=n + 1, &|b| {
            lift::<T>(b as i64 * n64) * b2[b + 1].clone() * powi(mu, b)
        }),
        (1, 1) => {
            lift::<T>((n64 + 2) * (n64 + 1) * n64) * mu.clone()
                + lift::<T>(2 * (n64 + 1))
                    * sum(3..=n + 2, &|al| b2[al].clone() * powi(mu, al - 1))
        }
        (1, 2) => sum(1..=n + 2, &|al| {
            b2[al].clone()
                * lift::<T>((al as i64 - 1) * (2 * n64 + 2 - al as i64))
                * powi(mu, al - 1)
        }),
        (2, 1) => lift::<T>(n64 + 2) * sum(1..=n, &|b| b1[b + 1].clone() * powi(mu, b)),
        (2, 2) => {
            lift::<T>(n64 + 2)
                * sum(0..=n, &|b| b1[b + 1].clone() * lift::<T>(b as i64) * powi(mu, b))
        }
        _ => {
            return Err(Error::Domain(format!(
                "Q_{{k,a}} defined for k in 0..=2, a in 1..=2; got ({k}, {a})"
            )))
        }
    };
    Ok(numerator / q_denominator(n, mu))
}

/// Polynomial order of the boundary matching: values only, or values and
/// first radial derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrectionOrder {
    Values,
    ValuesAndSlopes,
}

impl CorrectionOrder {
    pub fn from_l(l: usize) -> Result<Self> {
        match l {
            0 => Ok(Self::Values),
            1 => Ok(Self::ValuesAndSlopes),
            _ => Err(Error::Domain(format!("correction order l = {l} not supported (0 or 1)"))),
        }
    }

    pub fn l(self) -> usize {
        match self {
            Self::Values => 0,
            Self::ValuesAndSlopes => 1,
        }
    }

    /// Number of polynomial coefficients, `2l + 3`.
    pub fn num_coeffs(self) -> usize {
        2 * self.l() + 3
    }

    /// Number of boundary loads, `2l + 2`, ordered
    /// `[A10, A20]` or `[A10, A20, A11, A21]`.
    pub fn num_loads(self) -> usize {
        2 * self.l() + 2
    }
}

fn check_radii(r1: f64, r2: f64) -> Result<()> {
    if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(Error::Domain(format!("radii must satisfy 0 < R1 < R2, got R1={r1}, R2={r2}")));
    }
    Ok(())
}

/// Unscaled system matrix: value rows, slope rows (order 1), and the
/// zero-moment row.
pub fn system_matrix(order: CorrectionOrder, n: usize, r1: f64, r2: f64) -> Result<DMatrix<f64>> {
    exact::check_dim(n)?;
    check_radii(r1, r2)?;
    let size = order.num_coeffs();
    let mut m = DMatrix::zeros(size, size);
    for alpha in 0..size {
        let ai = alpha as i32;
        m[(0, alpha)] = r1.powi(ai);
        m[(1, alpha)] = r2.powi(ai);
        if order == CorrectionOrder::ValuesAndSlopes && alpha > 0 {
            m[(2, alpha)] = alpha as f64 * r1.powi(ai - 1);
            m[(3, alpha)] = alpha as f64 * r2.powi(ai - 1);
        }
        let p = (n + alpha) as i32;
        m[(size - 1, alpha)] = (r2.powi(p) - r1.powi(p)) / p as f64;
    }
    Ok(m)
}

/// Factored correction system for fixed `(order, n, R1, R2)`.
///
/// The matrix is assembled in `u = (rho - R1) / (R2 - R1)`, where the value
/// and slope rows are sparse and the moment row is positive; solutions are
/// expanded back to monomials in `rho`.
#[derive(Debug, Clone)]
pub struct CorrectionSystem {
    order: CorrectionOrder,
    n: usize,
    r1: f64,
    width: f64,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl CorrectionSystem {
    pub fn new(order: CorrectionOrder, n: usize, r1: f64, r2: f64) -> Result<Self> {
        exact::check_dim(n)?;
        check_radii(r1, r2)?;
        let width = r2 - r1;
        let size = order.num_coeffs();
        // int_0^1 u^a (r1 + width u)^{n-1} du, exact for these degrees
        let rule = GaussRule::new((size + n) / 2 + 1);
        let mut m = DMatrix::zeros(size, size);
        for alpha in 0..size {
            let ai = alpha as i32;
            m[(0, alpha)] = if alpha == 0 { 1.0 } else { 0.0 };
            m[(1, alpha)] = 1.0;
            if order == CorrectionOrder::ValuesAndSlopes {
                m[(2, alpha)] = if alpha == 1 { 1.0 } else { 0.0 };
                m[(3, alpha)] = alpha as f64;
            }
            m[(size - 1, alpha)] = rule.integrate(0.0, 1.0, |u| {
                u.powi(ai) * (r1 / width + u).powi(n as i32 - 1)
            });
        }
        let lu = m.lu();
        if !lu.is_invertible() {
            return Err(Error::Singular(format!("correction system for R1={r1}, R2={r2}, n={n}")));
        }
        Ok(Self { order, n, r1, width, lu })
    }

    pub fn order(&self) -> CorrectionOrder {
        self.order
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficients `C_0..C_{2l+2}` of `Q` in powers of `rho` for one set of
    /// loads (`[A10, A20]` or `[A10, A20, A11, A21]`).
    pub fn solve(&self, loads: &[f64]) -> Result<Vec<f64>> {
        if loads.len() != self.order.num_loads() {
            return Err(Error::Shape(format!(
                "expected {} loads, got {}",
                self.order.num_loads(),
                loads.len()
            )));
        }
        let size = self.order.num_coeffs();
        let mut rhs = DVector::zeros(size);
        rhs[0] = loads[0];
        rhs[1] = loads[1];
        if self.order == CorrectionOrder::ValuesAndSlopes {
            // d/du = (R2 - R1) d/drho
            rhs[2] = self.width * loads[2];
            rhs[3] = self.width * loads[3];
        }
        let d = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("LU solve failed".into()))?;
        // sum_b d_b ((rho - R1) / w)^b expanded in powers of rho
        let mut c = vec![0.0; size];
        for (b, db) in d.iter().enumerate() {
            let scaled = db / self.width.powi(b as i32);
            let mut binom = 1.0;
            for (j, cj) in c.iter_mut().enumerate().take(b + 1) {
                *cj += scaled * binom * (-self.r1).powi((b - j) as i32);
                binom = binom * (b - j) as f64 / (j + 1) as f64;
            }
        }
        Ok(c)
    }
}

/// Dense-solve oracle for the correction coefficients.
pub fn solve_correction_oracle(
    order: CorrectionOrder,
    n: usize,
    r1: f64,
    r2: f64,
    loads: &[f64],
) -> Result<Vec<f64>> {
    CorrectionSystem::new(order, n, r1, r2)?.solve(loads)
}

/// Exact counterpart of [`solve_correction_oracle`] over the rationals.
pub fn solve_correction_exact(
    order: CorrectionOrder,
    n: usize,
    r1: &Rational,
    r2: &Rational,
    loads: &[Rational],
) -> Result<Vec<Rational>> {
    exact::check_dim(n)?;
    if loads.len() != order.num_loads() {
        return Err(Error::Shape(format!("expected {} loads", order.num_loads())));
    }
    let size = order.num_coeffs();
    let zero = Rational::from_integer(0.into());
    let mut m = vec![vec![zero.clone(); size]; size];
    for alpha in 0..size {
        m[0][alpha] = powi(r1, alpha);
        m[1][alpha] = powi(r2, alpha);
        if order == CorrectionOrder::ValuesAndSlopes && alpha > 0 {
            m[2][alpha] = exact::int(alpha as i64) * powi(r1, alpha - 1);
            m[3][alpha] = exact::int(alpha as i64) * powi(r2, alpha - 1);
        }
        let p = n + alpha;
        m[size - 1][alpha] = (powi(r2, p) - powi(r1, p)) / exact::int(p as i64);
    }
    let mut rhs = vec![zero; size];
    rhs[..loads.len()].clone_from_slice(loads);
    solve_exact(m, rhs)
}

/// `(-1/R1)^k Q_{k,a}(mu)` for `k = 0..=2`, `a = 1, 2`: the coefficient of
/// `rho^k` contributed by a unit load on sphere `a`.
pub fn composed_q(n: usize, r1: f64, r2: f64) -> Result<[[f64; 2]; 3]> {
    check_radii(r1, r2)?;
    let mu = r2 / r1 - 1.0;
    let mut out = [[0.0; 2]; 3];
    for (k, row) in out.iter_mut().enumerate() {
        let sign = (-1.0 / r1).powi(k as i32);
        for (a, slot) in row.iter_mut().enumerate() {
            *slot = sign * rational_q(k, a + 1, n, &mu)?;
        }
    }
    Ok(out)
}

/// Correction polynomial coefficients sampled on a common set of sphere
/// directions.
#[derive(Debug, Clone)]
pub struct CorrectionCoefficients {
    order: CorrectionOrder,
    n: usize,
    r1: f64,
    r2: f64,
    mu: f64,
    /// `Q_{k,a}(mu)` for order 0 (`q_values[k][a-1]`), empty for order 1.
    q_values: Vec<[f64; 2]>,
    /// `c_funcs[alpha][node]`
    c_funcs: Vec<Vec<f64>>,
    system: CorrectionSystem,
}

impl CorrectionCoefficients {
    pub fn order(&self) -> CorrectionOrder {
        self.order
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radii(&self) -> (f64, f64) {
        (self.r1, self.r2)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn q_values(&self) -> &[[f64; 2]] {
        &self.q_values
    }

    pub fn c_funcs(&self) -> &[Vec<f64>] {
        &self.c_funcs
    }

    pub fn num_nodes(&self) -> usize {
        self.c_funcs.first().map_or(0, Vec::len)
    }

    /// Coefficients for loads at a direction that is not on the build grid.
    /// Order 0 uses the closed-form rationals; order 1 the factored system.
    pub fn coeffs_for(&self, loads: &[f64]) -> Result<Vec<f64>> {
        match self.order {
            CorrectionOrder::Values => {
                if loads.len() != 2 {
                    return Err(Error::Shape(format!("expected 2 loads, got {}", loads.len())));
                }
                Ok((0..3)
                    .map(|k| {
                        let s = (-1.0 / self.r1).powi(k as i32);
                        s * (self.q_values[k][0] * loads[0] + self.q_values[k][1] * loads[1])
                    })
                    .collect())
            }
            CorrectionOrder::ValuesAndSlopes => self.system.solve(loads),
        }
    }

    /// `Q(rho w_node)`.
    pub fn eval(&self, node: usize, rho: f64) -> f64 {
        self.c_funcs.iter().rev().fold(0.0, |acc, c| acc * rho + c[node])
    }

    /// `dQ/drho (rho w_node)`.
    pub fn eval_slope(&self, node: usize, rho: f64) -> f64 {
        let deg = self.c_funcs.len();
        (1..deg)
            .rev()
            .fold(0.0, |acc, a| acc * rho + a as f64 * self.c_funcs[a][node])
    }

    /// `int_{R1}^{R2} Q(rho w_node) rho^{n-1} drho`.
    pub fn radial_moment(&self, node: usize) -> f64 {
        self.c_funcs
            .iter()
            .enumerate()
            .map(|(a, c)| {
                let p = (self.n + a) as i32;
                c[node] * (self.r2.powi(p) - self.r1.powi(p)) / p as f64
            })
            .sum()
    }
}

/// Applies the correction solve at every sphere node.
///
/// `loads` holds one slice per boundary datum (`[A10, A20]` or
/// `[A10, A20, A11, A21]`), each sampled on the same nodes.
pub fn build_correction(
    order: CorrectionOrder,
    n: usize,
    r1: f64,
    r2: f64,
    loads: &[&[f64]],
) -> Result<CorrectionCoefficients> {
    if loads.len() != order.num_loads() {
        return Err(Error::Shape(format!(
            "expected {} load functions, got {}",
            order.num_loads(),
            loads.len()
        )));
    }
    let nodes = loads[0].len();
    if loads.iter().any(|l| l.len() != nodes) {
        return Err(Error::Shape("load functions sampled on different grids".into()));
    }
    let system = CorrectionSystem::new(order, n, r1, r2)?;
    let mut c_funcs = vec![vec![0.0; nodes]; order.num_coeffs()];
    let mut point = vec![0.0; loads.len()];
    for node in 0..nodes {
        for (p, l) in point.iter_mut().zip(loads) {
            *p = l[node];
        }
        for (a, c) in system.solve(&point)?.into_iter().enumerate() {
            c_funcs[a][node] = c;
        }
    }
    let mu = r2 / r1 - 1.0;
    let q_values = match order {
        CorrectionOrder::Values => (0..3)
            .map(|k| Ok([rational_q(k, 1, n, &mu)?, rational_q(k, 2, n, &mu)?]))
            .collect::<Result<Vec<_>>>()?,
        CorrectionOrder::ValuesAndSlopes => Vec::new(),
    };
    Ok(CorrectionCoefficients { order, n, r1, r2, mu, q_values, c_funcs, system })
}
