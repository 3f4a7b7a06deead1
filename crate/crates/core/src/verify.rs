//! Numerical oracles for an assembled solution and machine-readable reports.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::assembly::{SolutionField, TildeF};
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use crate::sphere::SphereGrid;

/// Derivative estimate with an error indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    pub value: f64,
    pub error: f64,
}

fn stencil_point(x: &[f64], axis: usize, offset: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    p[axis] += offset;
    p
}

/// Fourth-order central differences for the divergences of `blocks`
/// consecutive `n`-vectors returned by `field`.
fn divergence_blocks<F>(field: &F, x: &[f64], step: f64, blocks: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let mut div = vec![0.0; blocks];
    for axis in 0..n {
        let mut vals = [0.0f64; 4].map(|_| Vec::new());
        for (slot, offset) in [2.0, 1.0, -1.0, -2.0].into_iter().enumerate() {
            let p = stencil_point(x, axis, offset * step);
            let v = field(&p).map_err(|_| Error::Stencil(p.clone()))?;
            if v.len() != blocks * n {
                return Err(Error::Shape(format!("field returned {} components, expected {}", v.len(), blocks * n)));
            }
            vals[slot] = v;
        }
        for (b, d) in div.iter_mut().enumerate() {
            let i = b * n + axis;
            *d += (-vals[0][i] + 8.0 * vals[1][i] - 8.0 * vals[2][i] + vals[3][i]) / (12.0 * step);
        }
    }
    Ok(div)
}

/// Fourth-order central-difference divergence of a vector field.
pub fn fd_divergence<F>(field: F, x: &[f64], step: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if step.is_nan() || step <= 0.0 {
        return Err(Error::Config("step must be positive".into()));
    }
    Ok(divergence_blocks(&field, x, step, 1)?[0])
}

/// Richardson pair `(step, step/2)`; `value` is the extrapolation and
/// `error` the difference to the finer estimate.
pub fn fd_divergence_richardson<F>(field: F, x: &[f64], step: f64) -> Result<FdEstimate>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    Ok(richardson_blocks(&field, x, step, 1)?[0])
}

fn richardson_blocks<F>(field: &F, x: &[f64], step: f64, blocks: usize) -> Result<Vec<FdEstimate>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if step.is_nan() || step <= 0.0 {
        return Err(Error::Config("step must be positive".into()));
    }
    let coarse = divergence_blocks(field, x, step, blocks)?;
    let fine = divergence_blocks(field, x, 0.5 * step, blocks)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| {
            let value = (16.0 * f - c) / 15.0;
            FdEstimate { value, error: (value - f).abs() }
        })
        .collect())
}

/// Thresholds for [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `||div U - f||_inf / ||f||_inf` on the interior sweep.
    pub divergence: f64,
    /// `max ||U|| / (||f||_inf R2)` on the boundary spheres.
    pub boundary: f64,
    /// Relative annulus or sphere means of `f`, `f~`, `g`, `Q`.
    pub mean: f64,
    /// Absolute divergence of the correction term.
    pub correction_divergence: f64,
    /// Relative boundary values of `lambda`, `f~` and trace mismatch of `Q`.
    pub traces: f64,
    /// Relative residuals of the term-by-term divergence identities.
    pub decomposition: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            divergence: 1e-6,
            boundary: 1e-8,
            mean: 1e-10,
            correction_divergence: 1e-7,
            traces: 1e-12,
            decomposition: 1e-6,
        }
    }
}

/// Sample sizes and tolerances for [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub interior_radii: usize,
    pub interior_directions: usize,
    pub boundary_directions: usize,
    pub random_points: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            interior_radii: 9,
            interior_directions: 64,
            boundary_directions: 256,
            random_points: 100,
            seed: 20_240_601,
            tolerances: Tolerances::default(),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.interior_radii < 2
            || self.interior_directions == 0
            || self.boundary_directions == 0
            || self.random_points == 0
        {
            return Err(Error::Config("verification sample sizes must be positive (at least 2 radii)".into()));
        }
        let t = &self.tolerances;
        let all = [t.divergence, t.boundary, t.mean, t.correction_divergence, t.traces, t.decomposition];
        if all.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Config("tolerances must be positive and finite".into()));
        }
        Ok(())
    }
}

/// One check in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    pub meta: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(checks: Vec<CheckRecord>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { checks, pass }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Evenly spread unit directions: equispaced on `S^1`, a Fibonacci lattice
/// on `S^2`.
pub fn spread_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
    }
}

/// Seeded points with `lo <= |x| <= hi`.
pub fn random_points(n: usize, lo: f64, hi: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = rng.gen_range(lo..=hi);
            let t = rng.gen_range(0.0..2.0 * PI);
            if n == 2 {
                vec![r * t.cos(), r * t.sin()]
            } else {
                let z: f64 = rng.gen_range(-1.0..=1.0);
                let s = (1.0 - z * z).sqrt();
                vec![r * s * t.cos(), r * s * t.sin(), r * z]
            }
        })
        .collect()
}

fn scale_point(y: &[f64], r: f64) -> Vec<f64> {
    y.iter().map(|c| c * r).collect()
}

fn max_fold(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |acc, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
}

fn relative(value: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        value / scale
    } else {
        value
    }
}

/// `(int_A h, int_A |h|)` by a product rule.
fn annulus_integral<F: Fn(&[f64], f64) -> f64 + Sync>(
    n: usize,
    r1: f64,
    r2: f64,
    grid: &SphereGrid,
    rule: &GaussRule,
    h: F,
) -> (f64, f64) {
    let pw = n as i32 - 1;
    let per_node: Vec<(f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let y = grid.direction(i);
            let mut s = 0.0;
            let mut a = 0.0;
            for (r, w) in rule.mapped(r1, r2) {
                let v = h(y, r) * r.powi(pw) * w;
                s += v;
                a += v.abs();
            }
            (s, a)
        })
        .collect();
    per_node
        .iter()
        .zip(grid.weights())
        .fold((0.0, 0.0), |(s, a), ((ps, pa), w)| (s + w * ps, a + w * pa))
}

struct Recorder {
    meta: Map<String, Value>,
    checks: Vec<CheckRecord>,
}

impl Recorder {
    fn push(&mut self, name: &str, value: f64, tol: f64, extra: Value) {
        let mut meta = self.meta.clone();
        if let Value::Object(m) = extra {
            meta.extend(m);
        }
        self.checks.push(CheckRecord {
            name: name.into(),
            value,
            tol,
            pass: value.is_finite() && value <= tol,
            meta,
        });
    }
}

/// Runs every check on `solution`; failures are recorded, never returned.
pub fn run_suite(solution: &SolutionField, config: &VerifyConfig) -> VerificationReport {
    let d = *solution.domain();
    let (n, r1, r2) = (d.n(), d.r1(), d.r2());
    let res = solution.resolution();
    let step = res.fd_step_for(&d);
    let collar = 2.0 * step;
    let tol = &config.tolerances;
    let tilde_f: &TildeF = solution.tilde_f();
    let source = tilde_f.source();

    let mut meta = Map::new();
    meta.insert("n".into(), json!(n));
    meta.insert("r1".into(), json!(r1));
    meta.insert("r2".into(), json!(r2));
    meta.insert("band".into(), json!(res.band));
    meta.insert("radial_nodes".into(), json!(res.radial_nodes));
    meta.insert("fd_step".into(), json!(step));
    let mut rec = Recorder { meta, checks: Vec::new() };

    // interior divergence sweep
    let dirs = spread_directions(n, config.interior_directions);
    let m = config.interior_radii;
    let interior: Vec<Vec<f64>> = (0..m)
        .flat_map(|i| {
            let r = (r1 + collar) + (r2 - r1 - 2.0 * collar) * i as f64 / (m - 1) as f64;
            dirs.iter().map(move |y| scale_point(y, r))
        })
        .collect();
    let f_vals: Vec<f64> = interior.iter().map(|x| source.eval(x)).collect();
    let f_norm = max_fold(f_vals.iter().map(|v| v.abs()));
    let residuals: Vec<f64> = interior
        .par_iter()
        .zip(&f_vals)
        .map(|(x, f)| match fd_divergence_richardson(|p| solution.eval(p), x, step) {
            Ok(est) => (est.value - f).abs(),
            Err(_) => f64::NAN,
        })
        .collect();
    rec.push(
        "divergence_residual",
        relative(max_fold(residuals.into_iter()), f_norm),
        tol.divergence,
        json!({ "points": interior.len(), "f_inf": f_norm, "collar": collar }),
    );

    // boundary norms
    let bdirs = spread_directions(n, config.boundary_directions);
    let b_scale = f_norm * r2;
    for (name, r) in [("boundary_inner", r1), ("boundary_outer", r2)] {
        let worst = max_fold(
            bdirs
                .par_iter()
                .map(|y| solution.eval(&scale_point(y, r)).map(|u| crate::domain::norm(&u)).unwrap_or(f64::NAN))
                .collect::<Vec<_>>()
                .into_iter(),
        );
        rec.push(name, relative(worst, b_scale), tol.boundary, json!({ "directions": bdirs.len(), "radius": r }));
    }

    // means, with a grid and rule finer than the solver's
    let grid = SphereGrid::for_band(n, res.band + 4).expect("valid band");
    let rule = GaussRule::new(res.radial_nodes + 8);
    let (int_f, abs_f) = annulus_integral(n, r1, r2, &grid, &rule, |y, r| source.eval(&scale_point(y, r)));
    rec.push("mean_f", relative(int_f.abs(), abs_f), tol.mean, json!({ "integral": int_f }));
    let (int_tf, abs_tf) = annulus_integral(n, r1, r2, &grid, &rule, |y, r| {
        let c = tilde_f.poly_coeffs(tilde_f.loads(y));
        tilde_f.on_ray(y, &c, r)
    });
    rec.push(
        "mean_tilde_f",
        relative(int_tf.abs(), abs_tf.max(abs_f)),
        tol.mean,
        json!({ "integral": int_tf }),
    );
    let g = solution.g();
    let g_scale = g.max_abs().max(f_norm * d.radial_moment(0));
    rec.push(
        "mean_g",
        relative(solution.projected_mean().abs(), g_scale),
        tol.mean,
        json!({ "mean": solution.projected_mean() }),
    );
    let (int_q, abs_q) = annulus_integral(n, r1, r2, &grid, &rule, |y, r| {
        TildeF::correction_value(&tilde_f.poly_coeffs(tilde_f.loads(y)), r)
    });
    rec.push("q_annulus_integral", relative(int_q.abs(), abs_q), tol.mean, json!({ "integral": int_q }));

    // boundary traces of Q, f~ and lambda
    let trace_scale = f_norm.max(max_fold(bdirs.iter().flat_map(|y| {
        let l = tilde_f.loads(y);
        [l[0].abs(), l[1].abs()]
    })));
    let mut q_err: f64 = 0.0;
    let mut tf_err: f64 = 0.0;
    let mut lambda_err: f64 = 0.0;
    for y in &bdirs {
        let loads = tilde_f.loads(y);
        let c = tilde_f.poly_coeffs(loads);
        for (a, r) in [r1, r2].into_iter().enumerate() {
            q_err = q_err.max((TildeF::correction_value(&c, r) - loads[a]).abs());
            tf_err = tf_err.max(tilde_f.on_ray(y, &c, r).abs());
            let lam = solution.lambda(&scale_point(y, r)).map(f64::abs).unwrap_or(f64::NAN);
            lambda_err = if lam.is_nan() { f64::NAN } else { lambda_err.max(lam) };
        }
    }
    let dirs_meta = json!({ "directions": bdirs.len() });
    rec.push("q_traces", relative(q_err, trace_scale), tol.traces, dirs_meta.clone());
    rec.push("tilde_f_traces", relative(tf_err, trace_scale), tol.traces, dirs_meta.clone());
    rec.push("lambda_vanishing", relative(lambda_err, trace_scale * r2), tol.traces, dirs_meta);

    // term-by-term divergences at seeded random points
    let pts = random_points(n, r1 + collar, r2 - collar, config.random_points, config.seed);
    let per_point: Vec<Option<[f64; 3]>> = pts
        .par_iter()
        .map(|x| {
            let parts = |p: &[f64]| -> Result<Vec<f64>> {
                let fp = solution.parts(p)?;
                let mut v = fp.radial_moment;
                v.extend(fp.lambda);
                v.extend(fp.correction);
                Ok(v)
            };
            let est = richardson_blocks(&parts, x, step, 3).ok()?;
            let f = source.eval(x);
            let tf = tilde_f.eval(x);
            Some([(est[0].value - tf).abs(), (est[1].value - (f - tf)).abs(), est[2].value.abs()])
        })
        .collect();
    let column = |k: usize| max_fold(per_point.iter().map(|p| p.map_or(f64::NAN, |v| v[k])));
    let pts_meta = json!({ "points": pts.len(), "seed": config.seed });
    rec.push("correction_divergence_free", column(2), tol.correction_divergence, pts_meta.clone());
    rec.push("decomposition_radial_moment", relative(column(0), f_norm), tol.decomposition, pts_meta.clone());
    rec.push("decomposition_lambda", relative(column(1), f_norm), tol.decomposition, pts_meta);

    VerificationReport::new(rec.checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_field_has_divergence_n() {
        let d = fd_divergence(|x| Ok(x.to_vec()), &[0.3, -0.2, 1.1], 1e-3).unwrap();
        assert!((d - 3.0).abs() < 1e-10);
        let e = fd_divergence_richardson(|x| Ok(x.to_vec()), &[0.3, -0.2], 1e-3).unwrap();
        assert!((e.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn kernel_is_divergence_free() {
        for n in [2usize, 3] {
            let kernel = move |x: &[f64]| {
                let r = crate::domain::norm(x);
                Ok(x.iter().map(|c| c / r.powi(n as i32)).collect())
            };
            let x: Vec<f64> = (0..n).map(|i| 0.7 + 0.2 * i as f64).collect();
            assert!(fd_divergence(kernel, &x, 1e-3).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn rotated_gradient_is_divergence_free() {
        // psi = sin(x) exp(y)
        let field = |x: &[f64]| Ok(vec![-x[0].sin() * x[1].exp(), x[0].cos() * x[1].exp()]);
        assert!(fd_divergence(field, &[0.4, 0.3], 1e-3).unwrap().abs() < 1e-10);
    }

    #[test]
    fn stencil_outside_domain_is_reported() {
        let field = |x: &[f64]| {
            if x[0] < 0.0 {
                Err(Error::Domain("negative".into()))
            } else {
                Ok(x.to_vec())
            }
        };
        assert!(matches!(fd_divergence(field, &[1e-4, 0.0], 1e-3), Err(Error::Stencil(_))));
        assert!(fd_divergence(field, &[1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn oracle_convergence_is_fourth_order() {
        let field = |x: &[f64]| Ok(vec![(2.0 * x[0]).sin() * x[1].exp(), x[0] * (3.0 * x[1]).cos(), x[2].exp()]);
        let exact = |x: &[f64]| 2.0 * (2.0 * x[0]).cos() * x[1].exp() - 3.0 * x[0] * (3.0 * x[1]).sin() + x[2].exp();
        let x = [0.4, -0.3, 0.2];
        let steps = [0.2, 0.1, 0.05, 0.025];
        let errs: Vec<f64> = steps.iter().map(|h| (fd_divergence(field, &x, *h).unwrap() - exact(&x)).abs()).collect();
        for w in errs.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!(slope >= 3.7, "slope {slope} from {errs:?}");
        }
    }

    #[test]
    fn directions_are_unit_and_spread() {
        for n in [2, 3] {
            let dirs = spread_directions(n, 256);
            assert_eq!(dirs.len(), 256);
            for y in &dirs {
                assert!((crate::domain::norm(y) - 1.0).abs() < 1e-14);
            }
            let mean: Vec<f64> = (0..n).map(|i| dirs.iter().map(|y| y[i]).sum::<f64>() / 256.0).collect();
            assert!(mean.iter().all(|m| m.abs() < 1e-2));
        }
    }

    #[test]
    fn random_points_are_reproducible_and_in_shell() {
        let a = random_points(3, 1.1, 1.9, 50, 3);
        assert_eq!(a, random_points(3, 1.1, 1.9, 50, 3));
        assert_ne!(a, random_points(3, 1.1, 1.9, 50, 4));
        for p in &a {
            let r = crate::domain::norm(p);
            assert!((1.1 - 1e-12..=1.9 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn report_pass_is_conjunction() {
        let rec = |pass| CheckRecord { name: "x".into(), value: 0.0, tol: 1.0, pass, meta: Map::new() };
        assert!(VerificationReport::new(vec![rec(true), rec(true)]).pass);
        assert!(!VerificationReport::new(vec![rec(true), rec(false)]).pass);
        let json: Value = serde_json::from_str(&VerificationReport::new(vec![rec(true)]).to_json()).unwrap();
        assert!(json["checks"][0]["meta"].is_object());
        assert_eq!(json["pass"], Value::Bool(true));
    }

    #[test]
    fn config_validation() {
        assert!(VerifyConfig::default().validate().is_ok());
        let mut c = VerifyConfig::default();
        c.tolerances.boundary = 0.0;
        assert!(c.validate().is_err());
        let c = VerifyConfig { random_points: 0, ..VerifyConfig::default() };
        assert!(c.validate().is_err());
        let parsed: VerifyConfig = serde_json::from_str(r#"{"boundary_directions": 512}"#).unwrap();
        assert_eq!(parsed.boundary_directions, 512);
        assert_eq!(parsed.tolerances, Tolerances::default());
    }
}
