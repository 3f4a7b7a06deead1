//! Assembly of the solution field `U` with `div U = f` in the annulus and
//! `U = 0` on both boundary spheres.
//!
//! `U(x) = m(x) x + lambda(x) x/|x| + s V(x)` where
//!
//! * `m(x) = |x|^{-n} int_{R1}^{|x|} f~(rho y) rho^{n-1} drho` is the cumulative
//!   radial moment of the boundary-corrected source `f~ = f - Q`, so
//!   `div(m x) = f~`;
//! * `lambda` is the cumulative radial moment of the correction polynomial
//!   `Q`, so `div(lambda x/|x|) = Q`, and it vanishes on both spheres because
//!   `Q` has zero radial moment;
//! * `V` is the divergence-free field built from the cut-off `chi` and the
//!   sphere potential (`h` on `S^1`, `phi` on `S^2`). For `|x| >= R2` it equals
//!   `g(y) |x|^{1-n} y`, which cancels `m(x) x` on the outer sphere.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::{build_correction, composed_q, CorrectionCoefficients, CorrectionOrder};
use crate::domain::AnnulusDomain;
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use crate::source::Source;
use crate::sphere::{
    circle_antiderivative, poisson_solve, SolveOptions, SphereGrid, SphereScalar, SphereSpectrum,
};

/// Sign of the divergence-free term for `n = 2` with `V = (-d2 psi, d1 psi)`.
pub const CORRECTION_SIGN_2D: f64 = 1.0;
/// Sign of the divergence-free term for `n = 3` with `V = curl(chi w / rho)`,
/// `w = grad_S phi x y`.
pub const CORRECTION_SIGN_3D: f64 = -1.0;

/// Relative slack below `R1` in which `U` is still evaluated with its
/// natural formulas (needed by finite-difference stencils).
pub const INNER_SLACK: f64 = 1e-2;

/// Multiple of the estimated radial-quadrature error in `mean(g)` that the
/// solvability check tolerates on top of its relative tolerance.
pub const QUADRATURE_SAFETY: f64 = 10.0;

pub fn correction_sign(n: usize) -> f64 {
    if n == 2 {
        CORRECTION_SIGN_2D
    } else {
        CORRECTION_SIGN_3D
    }
}

/// Discretisation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    /// Fourier band `K` on `S^1` or spherical-harmonic degree `L` on `S^2`.
    pub band: usize,
    /// Gauss-Legendre nodes for radial integrals.
    pub radial_nodes: usize,
    /// Finite-difference step (absolute); defaults to `1e-4 (R2 - R1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
}

impl Resolution {
    pub fn default_for(n: usize) -> Self {
        Self { band: if n == 2 { 64 } else { 32 }, radial_nodes: 64, fd_step: None }
    }

    pub fn fd_step_for(&self, domain: &AnnulusDomain) -> f64 {
        self.fd_step.unwrap_or(1e-4 * domain.width())
    }

    pub fn validate(&self) -> Result<()> {
        if self.band == 0 || self.radial_nodes == 0 {
            return Err(Error::Config("band and radial_nodes must be positive".into()));
        }
        if let Some(h) = self.fd_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config("fd_step must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Radial cut-off `sin^{l+3}(pi (rho - R1) / (2 (R2 - R1)))` on `[R1, R2]`,
/// 0 below and 1 above.
pub fn cutoff_chi(rho: f64, r1: f64, r2: f64, l: usize) -> f64 {
    if rho <= r1 {
        0.0
    } else if rho >= r2 {
        1.0
    } else {
        let arg = PI * (rho - r1) / (2.0 * (r2 - r1));
        arg.sin().powi(l as i32 + 3)
    }
}

pub fn cutoff_chi_prime(rho: f64, r1: f64, r2: f64, l: usize) -> f64 {
    if rho <= r1 || rho >= r2 {
        0.0
    } else {
        let a = PI / (2.0 * (r2 - r1));
        let arg = a * (rho - r1);
        let p = l as i32 + 3;
        p as f64 * a * arg.sin().powi(p - 1) * arg.cos()
    }
}

/// The boundary-corrected source `f~ = 1_{[R1,R2]}(|x|) (f - Q)`.
#[derive(Clone)]
pub struct TildeF {
    source: Arc<dyn Source>,
    domain: AnnulusDomain,
    /// `(-1/R1)^k Q_{k,a}(mu)`
    q: [[f64; 2]; 3],
}

impl TildeF {
    pub fn new(
        source: Arc<dyn Source>,
        domain: &AnnulusDomain,
        coeffs: &CorrectionCoefficients,
    ) -> Result<Self> {
        let (r1, r2) = coeffs.radii();
        if coeffs.n() != domain.n() || r1 != domain.r1() || r2 != domain.r2() {
            return Err(Error::Config("correction coefficients built for a different annulus".into()));
        }
        if coeffs.order() != CorrectionOrder::Values {
            return Err(Error::Config("assembly uses value-only (l = 0) corrections".into()));
        }
        if source.dim() != domain.n() {
            return Err(Error::Config("source dimension differs from the domain".into()));
        }
        let q = composed_q(domain.n(), r1, r2)?;
        Ok(Self { source, domain: *domain, q })
    }

    pub fn domain(&self) -> &AnnulusDomain {
        &self.domain
    }

    pub fn source(&self) -> &Arc<dyn Source> {
        &self.source
    }

    /// `[f(R1 y), f(R2 y)]`.
    pub fn loads(&self, y: &[f64]) -> [f64; 2] {
        let at = |r: f64| {
            let p: Vec<f64> = y.iter().map(|c| c * r).collect();
            self.source.eval(&p)
        };
        [at(self.domain.r1()), at(self.domain.r2())]
    }

    /// Coefficients `C_0, C_1, C_2` of `Q` along the ray through `y`.
    pub fn poly_coeffs(&self, loads: [f64; 2]) -> [f64; 3] {
        std::array::from_fn(|k| self.q[k][0] * loads[0] + self.q[k][1] * loads[1])
    }

    /// `Q(rho y)` for the given ray coefficients.
    pub fn correction_value(coeffs: &[f64; 3], rho: f64) -> f64 {
        coeffs[0] + rho * (coeffs[1] + rho * coeffs[2])
    }

    /// `f~(rho y)` along a ray with precomputed coefficients, without the
    /// support indicator.
    pub fn on_ray(&self, y: &[f64], coeffs: &[f64; 3], rho: f64) -> f64 {
        let p: Vec<f64> = y.iter().map(|c| c * rho).collect();
        self.source.eval(&p) - Self::correction_value(coeffs, rho)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let rho = crate::domain::norm(x);
        if rho < self.domain.r1() || rho > self.domain.r2() || rho == 0.0 {
            return 0.0;
        }
        let y: Vec<f64> = x.iter().map(|c| c / rho).collect();
        let coeffs = self.poly_coeffs(self.loads(&y));
        self.on_ray(&y, &coeffs, rho)
    }

    /// `Q(x)` inside the closed annulus (the subtracted polynomial part).
    pub fn correction_at(&self, x: &[f64]) -> f64 {
        let rho = crate::domain::norm(x);
        let y: Vec<f64> = x.iter().map(|c| c / rho).collect();
        Self::correction_value(&self.poly_coeffs(self.loads(&y)), rho)
    }

    /// `int_{R1}^{upper} f~(rho y) rho^{n-1} drho` with an `N`-node rule.
    fn ray_moment(&self, y: &[f64], upper: f64, rule: &GaussRule) -> f64 {
        let r1 = self.domain.r1();
        if upper <= r1 {
            return 0.0;
        }
        let coeffs = self.poly_coeffs(self.loads(y));
        let pw = self.domain.n() as i32 - 1;
        rule.integrate(r1, upper, |rho| self.on_ray(y, &coeffs, rho) * rho.powi(pw))
    }
}

/// `g(y) = int_{R1}^{R2} f~(rho y) rho^{n-1} drho` at every grid node.
pub fn radial_moment_g(tilde_f: &TildeF, grid: &Arc<SphereGrid>, rule: &GaussRule) -> SphereScalar {
    let r2 = tilde_f.domain.r2();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| tilde_f.ray_moment(grid.direction(i), r2, rule))
        .collect();
    SphereScalar::new(Arc::clone(grid), values).expect("grid-sized moments")
}

/// `|x|^{-n} int_{R1}^{min(|x|, R2)} f~(rho y) rho^{n-1} drho`, i.e.
/// `int_0^1 f~(tau x) tau^{n-1} dtau`.
pub fn cumulative_moment(tilde_f: &TildeF, rule: &GaussRule, x: &[f64]) -> Result<f64> {
    let rho = tilde_f.domain.check_point(x)?;
    if rho <= tilde_f.domain.r1() {
        return Ok(0.0);
    }
    let y: Vec<f64> = x.iter().map(|c| c / rho).collect();
    let upper = rho.min(tilde_f.domain.r2());
    Ok(tilde_f.ray_moment(&y, upper, rule) / rho.powi(tilde_f.domain.n() as i32))
}

fn lambda_unchecked(tilde_f: &TildeF, x: &[f64], rho: f64) -> f64 {
    let d = &tilde_f.domain;
    let n = d.n() as i32;
    let y: Vec<f64> = x.iter().map(|c| c / rho).collect();
    let c = tilde_f.poly_coeffs(tilde_f.loads(&y));
    let moment: f64 = (0..3)
        .map(|k| {
            let p = n + k as i32;
            c[k] * (rho.powi(p) - d.r1().powi(p)) / p as f64
        })
        .sum();
    moment / rho.powi(n - 1)
}

/// Coefficient of `x/|x|` in the polynomial-moment term; defined on the
/// closed annulus.
pub fn lambda_field(tilde_f: &TildeF, x: &[f64]) -> Result<f64> {
    let rho = tilde_f.domain.check_point(x)?;
    let d = &tilde_f.domain;
    let slack = 1e-12 * d.r2();
    if rho < d.r1() - slack || rho > d.r2() + slack {
        return Err(Error::Domain(format!("|x| = {rho} outside [{}, {}]", d.r1(), d.r2())));
    }
    Ok(lambda_unchecked(tilde_f, x, rho))
}

/// Divergence-free correction term before the sign `s` is applied.
///
/// `n = 2`: `(-d2 psi, d1 psi)` with `psi = chi(|x|) h(x/|x|)`.
/// `n = 3`: `curl(chi(|x|) w(x/|x|) / |x|)` with `w = grad_S phi x y`, which
/// expands to `chi g / rho^2 y + chi' / rho grad_S phi`, `g = -Laplace_S phi`.
pub fn correction_field(
    potential: &SphereSpectrum,
    domain: &AnnulusDomain,
    x: &[f64],
) -> Result<Vec<f64>> {
    let rho = domain.check_point(x)?;
    let (r1, r2) = (domain.r1(), domain.r2());
    let chi = cutoff_chi(rho, r1, r2, 0);
    let dchi = cutoff_chi_prime(rho, r1, r2, 0);
    if chi == 0.0 && dchi == 0.0 {
        return Ok(vec![0.0; domain.n()]);
    }
    let y: Vec<f64> = x.iter().map(|c| c / rho).collect();
    let s = potential.sample(&y);
    Ok(match domain.n() {
        2 => {
            let e_theta = [-y[1], y[0]];
            let dh = s.gradient[0] * e_theta[0] + s.gradient[1] * e_theta[1];
            // grad psi = chi' h e_rho + chi h' / rho e_theta, rotated by +90 degrees
            let radial = -chi * dh / rho;
            let angular = dchi * s.value;
            vec![radial * y[0] + angular * e_theta[0], radial * y[1] + angular * e_theta[1]]
        }
        _ => {
            let g = -s.laplacian;
            (0..3)
                .map(|i| chi * g / (rho * rho) * y[i] + dchi / rho * s.gradient[i])
                .collect()
        }
    })
}

/// The three terms of `U` at a point, each already multiplied by its sign.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldParts {
    pub radial_moment: Vec<f64>,
    pub lambda: Vec<f64>,
    pub correction: Vec<f64>,
}

impl FieldParts {
    pub fn total(&self) -> Vec<f64> {
        (0..self.radial_moment.len())
            .map(|i| self.radial_moment[i] + self.lambda[i] + self.correction[i])
            .collect()
    }
}

/// Assembled solution; immutable and cheap to share across threads.
#[derive(Clone)]
pub struct SolutionField {
    domain: AnnulusDomain,
    resolution: Resolution,
    tilde_f: TildeF,
    correction: CorrectionCoefficients,
    grid: Arc<SphereGrid>,
    g: SphereScalar,
    potential: SphereSpectrum,
    rule: GaussRule,
    projected_mean: f64,
    sign: f64,
}

impl std::fmt::Debug for SolutionField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolutionField")
            .field("domain", &self.domain)
            .field("resolution", &self.resolution)
            .field("projected_mean", &self.projected_mean)
            .field("sign", &self.sign)
            .finish_non_exhaustive()
    }
}

/// Traces, correction, corrected source, radial moment, sphere solve and
/// field assembly.
pub fn assemble_solution(
    source: Arc<dyn Source>,
    domain: &AnnulusDomain,
    resolution: Resolution,
) -> Result<SolutionField> {
    resolution.validate()?;
    let n = domain.n();
    let grid = Arc::new(SphereGrid::for_band(n, resolution.band)?);
    let rule = GaussRule::new(resolution.radial_nodes);

    let traces: Vec<[f64; 2]> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let y = grid.direction(i);
            let at = |r: f64| source.eval(&y.iter().map(|c| c * r).collect::<Vec<_>>());
            [at(domain.r1()), at(domain.r2())]
        })
        .collect();
    let a10: Vec<f64> = traces.iter().map(|t| t[0]).collect();
    let a20: Vec<f64> = traces.iter().map(|t| t[1]).collect();
    let correction =
        build_correction(CorrectionOrder::Values, n, domain.r1(), domain.r2(), &[&a10, &a20])?;
    let tilde_f = TildeF::new(Arc::clone(&source), domain, &correction)?;
    let g = radial_moment_g(&tilde_f, &grid, &rule);

    let f_scale = source_scale(source.as_ref(), domain, &grid, &rule);
    let fine = radial_moment_g(&tilde_f, &grid, &GaussRule::new(2 * resolution.radial_nodes));
    let opts = SolveOptions {
        reference_scale: f_scale * domain.radial_moment(0),
        abs_floor: QUADRATURE_SAFETY * (fine.mean() - g.mean()).abs(),
        ..SolveOptions::default()
    };
    let projected_mean = g.mean();
    let potential = match n {
        2 => circle_antiderivative(&g, resolution.band, opts)?,
        _ => poisson_solve(&g, resolution.band, opts)?,
    };
    Ok(SolutionField {
        domain: *domain,
        resolution,
        tilde_f,
        correction,
        grid,
        g,
        potential,
        rule,
        projected_mean,
        sign: correction_sign(n),
    })
}

/// `max |f|` over the grid directions at the radial nodes and both spheres.
fn source_scale(source: &dyn Source, domain: &AnnulusDomain, grid: &SphereGrid, rule: &GaussRule) -> f64 {
    let radii: Vec<f64> = rule
        .mapped(domain.r1(), domain.r2())
        .map(|(r, _)| r)
        .chain([domain.r1(), domain.r2()])
        .collect();
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let y = grid.direction(i);
            radii
                .iter()
                .map(|r| source.eval(&y.iter().map(|c| c * r).collect::<Vec<_>>()).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

impl SolutionField {
    pub fn domain(&self) -> &AnnulusDomain {
        &self.domain
    }

    pub fn resolution(&self) -> &Resolution {
        &self.resolution
    }

    pub fn tilde_f(&self) -> &TildeF {
        &self.tilde_f
    }

    pub fn correction(&self) -> &CorrectionCoefficients {
        &self.correction
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    /// Radial moment of `f~` on the grid.
    pub fn g(&self) -> &SphereScalar {
        &self.g
    }

    /// `h` (n = 2) or `phi` (n = 3).
    pub fn potential(&self) -> &SphereSpectrum {
        &self.potential
    }

    pub fn radial_rule(&self) -> &GaussRule {
        &self.rule
    }

    /// Sphere mean of `g` that the solver projected out.
    pub fn projected_mean(&self) -> f64 {
        self.projected_mean
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    /// Copy with a different sign on the correction term (for mutation tests).
    pub fn with_sign(mut self, sign: f64) -> Self {
        self.sign = sign;
        self
    }

    fn check_support(&self, x: &[f64]) -> Result<f64> {
        let rho = self.domain.check_point(x)?;
        if rho < self.domain.r1() * (1.0 - INNER_SLACK) {
            return Err(Error::Domain(format!(
                "|x| = {rho} is inside the hole (R1 = {})",
                self.domain.r1()
            )));
        }
        Ok(rho)
    }

    pub fn parts(&self, x: &[f64]) -> Result<FieldParts> {
        let rho = self.check_support(x)?;
        let m = cumulative_moment(&self.tilde_f, &self.rule, x)?;
        let lambda = lambda_unchecked(&self.tilde_f, x, rho);
        let corr = correction_field(&self.potential, &self.domain, x)?;
        Ok(FieldParts {
            radial_moment: x.iter().map(|c| m * c).collect(),
            lambda: x.iter().map(|c| lambda * c / rho).collect(),
            correction: corr.into_iter().map(|v| self.sign * v).collect(),
        })
    }

    /// `U(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.parts(x)?.total())
    }

    /// `U` at many points, in input order.
    pub fn eval_many(&self, points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        points.par_iter().map(|p| self.eval(p)).collect()
    }

    pub fn lambda(&self, x: &[f64]) -> Result<f64> {
        lambda_field(&self.tilde_f, x)
    }

    pub fn cumulative_moment(&self, x: &[f64]) -> Result<f64> {
        cumulative_moment(&self.tilde_f, &self.rule, x)
    }

    /// Unsigned correction term.
    pub fn correction_term(&self, x: &[f64]) -> Result<Vec<f64>> {
        correction_field(&self.potential, &self.domain, x)
    }
}
