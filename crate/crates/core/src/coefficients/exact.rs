//! Exact rational algebra for the correction polynomials.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Dense univariate polynomial with exact rational coefficients, lowest power first.
#[derive(Clone, PartialEq, Eq)]
pub struct PolynomialExact {
    coeffs: Vec<Rational>,
}

impl PolynomialExact {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, power: usize, coeff: Rational) {
        if self.coeffs.len() <= power {
            self.coeffs.resize(power + 1, Rational::zero());
        }
        self.coeffs[power] += coeff;
        *self = Self::new(std::mem::take(&mut self.coeffs));
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + to_f64(c))
    }

    /// Coefficients of the same polynomial in powers of `(t - center)`.
    pub fn taylor_shift(&self, center: &Rational) -> Self {
        // Repeated synthetic division by (t - center).
        let mut work = self.coeffs.clone();
        let len = work.len();
        for i in 0..len {
            for j in (i..len - 1).rev() {
                let carry = work[j + 1].clone() * center;
                work[j] += carry;
            }
        }
        Self::new(work)
    }
}

impl fmt::Debug for PolynomialExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({c})t^{k}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// The degree-(n+4) polynomial whose positivity on `t > 1` makes the l = 1
/// correction system uniquely solvable.
pub fn psi_polynomial(n: usize) -> Result<PolynomialExact> {
    check_dim(n)?;
    let n64 = n as i64;
    let a = rat(1, (n64 + 3) * (n64 + 4));
    let b = rat(1, n64 * (n64 + 1));
    let c = rat(2, (n64 + 1) * (n64 + 3));
    let mut p = PolynomialExact::zero();
    p.add_term(n + 4, a.clone());
    p.add_term(0, -a);
    p.add_term(n + 2, b.clone());
    p.add_term(2, -b);
    p.add_term(n + 3, -c.clone());
    p.add_term(1, c);
    Ok(p)
}

/// Taylor coefficients `Psi_n^{(k)}(1) / k!` for `k = 0..=n+4`.
pub fn psi_taylor_coeffs(n: usize) -> Result<Vec<Rational>> {
    let shifted = psi_polynomial(n)?.taylor_shift(&Rational::one());
    let mut coeffs = shifted.coeffs().to_vec();
    coeffs.resize(n + 5, Rational::zero());
    Ok(coeffs)
}

/// Solves `m x = rhs` by Gaussian elimination over the rationals.
pub fn solve_exact(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Result<Vec<Rational>> {
    let dim = rhs.len();
    if m.len() != dim || m.iter().any(|row| row.len() != dim) {
        return Err(Error::Shape(format!("expected {dim}x{dim} system")));
    }
    for col in 0..dim {
        let pivot = (col..dim)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::Singular(format!("no pivot in column {col}")))?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].recip();
        for row in col + 1..dim {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = m[row][col].clone() * &inv;
            for k in col..dim {
                let delta = factor.clone() * &m[col][k];
                m[row][k] -= delta;
            }
            let delta = factor * &rhs[col];
            rhs[row] -= delta;
        }
    }
    let mut x = vec![Rational::zero(); dim];
    for row in (0..dim).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..dim {
            acc -= m[row][k].clone() * &x[k];
        }
        x[row] = acc / &m[row][row];
    }
    Ok(x)
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension n = {n} must be at least 2")));
    }
    Ok(())
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_trailing_zeros() {
        let p = PolynomialExact::new(vec![int(1), int(0), int(0)]);
        assert_eq!(p.degree(), Some(0));
        assert!(PolynomialExact::new(vec![int(0)]).is_zero());
    }

    #[test]
    fn taylor_shift_of_square() {
        // t^2 = 1 + 2(t-1) + (t-1)^2
        let p = PolynomialExact::new(vec![int(0), int(0), int(1)]);
        assert_eq!(p.taylor_shift(&int(1)).coeffs(), &[int(1), int(2), int(1)]);
    }

    #[test]
    fn psi_has_degree_n_plus_4() {
        for n in 2..12 {
            assert_eq!(psi_polynomial(n).unwrap().degree(), Some(n + 4));
        }
        assert!(psi_polynomial(1).is_err());
    }

    #[test]
    fn exact_solve_small_system() {
        let m = vec![vec![int(0), int(1)], vec![int(2), int(1)]];
        let x = solve_exact(m, vec![int(3), int(5)]).unwrap();
        assert_eq!(x, vec![int(1), int(3)]);
        let singular = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(solve_exact(singular, vec![int(1), int(1)]).is_err());
    }
}
