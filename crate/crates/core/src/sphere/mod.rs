//! Scalars on the unit circle and unit sphere: quadrature grids, spectral
//! transforms, the mean-zero surface Poisson solve, the circle
//! antiderivative, and the tangential correction field.

pub mod legendre;

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use legendre::{longitude_factor, sh_count, sh_index, spherical_angles, trig_table, LegendreTable};

/// Default relative tolerance on the sphere mean accepted by the solvers.
pub const DEFAULT_MEAN_TOL: f64 = 1e-10;

/// Quadrature grid on `S^1` (equispaced angles) or `S^2`
/// (Gauss-Legendre colatitudes x equispaced longitudes).
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    dim: usize,
    n_lat: usize,
    n_lon: usize,
    cos_lat: Vec<f64>,
    lon: Vec<f64>,
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl SphereGrid {
    pub fn circle(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("circle grid needs at least one node".into()));
        }
        let lon: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
        let points = lon.iter().map(|t| [t.cos(), t.sin(), 0.0]).collect();
        Ok(Self {
            dim: 2,
            n_lat: 1,
            n_lon: m,
            cos_lat: vec![0.0],
            lon,
            points,
            weights: vec![2.0 * PI / m as f64; m],
        })
    }

    pub fn gauss(n_lat: usize, n_lon: usize) -> Result<Self> {
        if n_lat == 0 || n_lon == 0 {
            return Err(Error::Config("sphere grid needs at least one node per axis".into()));
        }
        let rule = GaussRule::new(n_lat);
        let lon: Vec<f64> = (0..n_lon).map(|j| 2.0 * PI * j as f64 / n_lon as f64).collect();
        let dphi = 2.0 * PI / n_lon as f64;
        let mut points = Vec::with_capacity(n_lat * n_lon);
        let mut weights = Vec::with_capacity(n_lat * n_lon);
        for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
            let s = (1.0 - x * x).sqrt();
            for &phi in &lon {
                points.push([s * phi.cos(), s * phi.sin(), x]);
                weights.push(w * dphi);
            }
        }
        Ok(Self {
            dim: 3,
            n_lat,
            n_lon,
            cos_lat: rule.nodes().to_vec(),
            lon,
            points,
            weights,
        })
    }

    /// Smallest grid on which a transform of the given band is exact for
    /// band-limited data.
    pub fn for_band(dim: usize, band: usize) -> Result<Self> {
        match dim {
            2 => Self::circle(2 * band + 2),
            3 => Self::gauss(band + 1, 2 * band + 2),
            _ => Err(Error::Domain(format!("sphere grids exist for n = 2, 3; got {dim}"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Unit vectors of the nodes (third component 0 on the circle).
    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    /// Node direction with `dim` components.
    pub fn direction(&self, node: usize) -> &[f64] {
        &self.points[node][..self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_lat, self.n_lon)
    }

    /// Largest band the grid resolves.
    pub fn band_limit(&self) -> usize {
        match self.dim {
            2 => (self.n_lon - 1) / 2,
            _ => (self.n_lat - 1).min((self.n_lon - 1) / 2),
        }
    }

    /// `|S^{n-1}|`.
    pub fn area(&self) -> f64 {
        if self.dim == 2 {
            2.0 * PI
        } else {
            4.0 * PI
        }
    }

    pub fn scalar(self: &Arc<Self>, values: Vec<f64>) -> Result<SphereScalar> {
        SphereScalar::new(Arc::clone(self), values)
    }

    pub fn sample<F: FnMut(&[f64]) -> f64>(self: &Arc<Self>, mut f: F) -> SphereScalar {
        let values = (0..self.len()).map(|i| f(self.direction(i))).collect();
        SphereScalar { grid: Arc::clone(self), values }
    }

    fn check_band(&self, band: usize) -> Result<()> {
        let limit = self.band_limit();
        if band > limit {
            return Err(Error::Resolution { band, limit });
        }
        Ok(())
    }
}

/// Real values at the nodes of a [`SphereGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SphereScalar {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

impl SphereScalar {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("sphere scalar has non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        integrate(self) / self.grid.area()
    }
}

/// `sum_i w_i s_i`.
pub fn integrate(s: &SphereScalar) -> f64 {
    s.grid.weights.iter().zip(&s.values).map(|(w, v)| w * v).sum()
}

/// Spectral coefficients of a scalar on `S^1` or `S^2`.
#[derive(Debug, Clone, PartialEq)]
pub enum SphereSpectrum {
    /// `a_0 + sum_k (a_k cos k theta + b_k sin k theta)`; `b[0]` unused.
    Circle { a: Vec<f64>, b: Vec<f64> },
    /// Orthonormal real spherical-harmonic coefficients indexed by
    /// [`legendre::sh_index`].
    Sphere { band: usize, coeffs: Vec<f64> },
}

/// Value, surface gradient (ambient Cartesian frame) and surface Laplacian of
/// a spectrum at one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSample {
    pub value: f64,
    pub gradient: [f64; 3],
    pub laplacian: f64,
}

impl SphereSpectrum {
    pub fn zero(dim: usize, band: usize) -> Self {
        match dim {
            2 => Self::Circle { a: vec![0.0; band + 1], b: vec![0.0; band + 1] },
            _ => Self::Sphere { band, coeffs: vec![0.0; sh_count(band)] },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Circle { .. } => 2,
            Self::Sphere { .. } => 3,
        }
    }

    pub fn band(&self) -> usize {
        match self {
            Self::Circle { a, .. } => a.len() - 1,
            Self::Sphere { band, .. } => *band,
        }
    }

    /// Coefficient of real harmonic `(l, m)` on `S^2`, or of `cos(l theta)`
    /// (`m >= 0`) / `sin(l theta)` (`m < 0`) on `S^1`.
    pub fn coeff(&self, l: usize, m: i64) -> f64 {
        if l > self.band() {
            return 0.0;
        }
        match self {
            Self::Circle { a, b } => {
                if m >= 0 {
                    a[l]
                } else {
                    b[l]
                }
            }
            Self::Sphere { coeffs, .. } => coeffs[sh_index(l, m)],
        }
    }

    /// Sphere mean of the represented function.
    pub fn mean(&self) -> f64 {
        match self {
            Self::Circle { a, .. } => a[0],
            Self::Sphere { coeffs, .. } => coeffs[0] / (4.0 * PI).sqrt(),
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        let it: Box<dyn Iterator<Item = &f64>> = match self {
            Self::Circle { a, b } => Box::new(a.iter().chain(b)),
            Self::Sphere { coeffs, .. } => Box::new(coeffs.iter()),
        };
        it.fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Scales the degree-`l` block by `factor(l)`.
    pub fn map_degrees<F: Fn(usize) -> f64>(&self, factor: F) -> Self {
        match self {
            Self::Circle { a, b } => Self::Circle {
                a: a.iter().enumerate().map(|(k, v)| v * factor(k)).collect(),
                b: b.iter().enumerate().map(|(k, v)| v * factor(k)).collect(),
            },
            Self::Sphere { band, coeffs } => {
                let mut out = coeffs.clone();
                for l in 0..=*band {
                    let f = factor(l);
                    for v in &mut out[l * l..(l + 1) * (l + 1)] {
                        *v *= f;
                    }
                }
                Self::Sphere { band: *band, coeffs: out }
            }
        }
    }

    /// Surface Laplacian, spectrally.
    pub fn laplacian(&self) -> Self {
        match self {
            Self::Circle { .. } => self.map_degrees(|k| -((k * k) as f64)),
            Self::Sphere { .. } => self.map_degrees(|l| -((l * (l + 1)) as f64)),
        }
    }

    pub fn value_at(&self, dir: &[f64]) -> f64 {
        self.sample(dir).value
    }

    /// Evaluates value, gradient and Laplacian at a direction (need not be
    /// normalised, must be nonzero).
    pub fn sample(&self, dir: &[f64]) -> SpectralSample {
        match self {
            Self::Circle { a, b } => {
                let theta = dir[1].atan2(dir[0]);
                let (mut value, mut dvalue, mut lap) = (a[0], 0.0, 0.0);
                for k in 1..a.len() {
                    let kf = k as f64;
                    let (s, c) = (kf * theta).sin_cos();
                    value += a[k] * c + b[k] * s;
                    dvalue += kf * (b[k] * c - a[k] * s);
                    lap -= kf * kf * (a[k] * c + b[k] * s);
                }
                let (s, c) = theta.sin_cos();
                SpectralSample { value, gradient: [-s * dvalue, c * dvalue, 0.0], laplacian: lap }
            }
            Self::Sphere { band, coeffs } => {
                let d3 = [dir[0], dir[1], dir.get(2).copied().unwrap_or(0.0)];
                let (x, s, phi) = spherical_angles(d3);
                let table = LegendreTable::new(*band, x, s);
                let (cos_m, sin_m) = trig_table(*band, phi);
                let (mut value, mut d_theta, mut d_phi_over_sin, mut lap) = (0.0, 0.0, 0.0, 0.0);
                for l in 0..=*band {
                    let eig = (l * (l + 1)) as f64;
                    for m in -(l as i64)..=(l as i64) {
                        let c = coeffs[sh_index(l, m)];
                        if c == 0.0 {
                            continue;
                        }
                        let am = m.unsigned_abs() as usize;
                        let (lf, dlf) = longitude_factor(m, cos_m[am], sin_m[am]);
                        let y = table.p(l, am) * lf;
                        value += c * y;
                        lap -= eig * c * y;
                        d_theta += c * table.dp_dtheta(l, am) * lf;
                        if am > 0 {
                            d_phi_over_sin += c * table.p_over_sin(l, am) * dlf;
                        }
                    }
                }
                let (sp, cp) = phi.sin_cos();
                let e_theta = [x * cp, x * sp, -s];
                let e_phi = [-sp, cp, 0.0];
                let gradient =
                    std::array::from_fn(|i| d_theta * e_theta[i] + d_phi_over_sin * e_phi[i]);
                SpectralSample { value, gradient, laplacian: lap }
            }
        }
    }

    /// Values at the grid nodes.
    pub fn synthesize(&self, grid: &Arc<SphereGrid>) -> Result<SphereScalar> {
        if grid.dim() != self.dim() {
            return Err(Error::Shape("spectrum and grid dimensions differ".into()));
        }
        let values = match self {
            Self::Circle { .. } => grid.points().iter().map(|p| self.value_at(p)).collect(),
            Self::Sphere { band, coeffs } => {
                let band = *band;
                let mut values = Vec::with_capacity(grid.len());
                let trig: Vec<_> = grid.lon.iter().map(|&phi| trig_table(band, phi)).collect();
                for &x in &grid.cos_lat {
                    let table = LegendreTable::new(band, x, (1.0 - x * x).sqrt());
                    for (cos_m, sin_m) in &trig {
                        let mut v = 0.0;
                        for l in 0..=band {
                            for m in -(l as i64)..=(l as i64) {
                                let am = m.unsigned_abs() as usize;
                                v += coeffs[sh_index(l, m)]
                                    * table.p(l, am)
                                    * longitude_factor(m, cos_m[am], sin_m[am]).0;
                            }
                        }
                        values.push(v);
                    }
                }
                values
            }
        };
        SphereScalar::new(Arc::clone(grid), values)
    }
}

/// Quadrature projection onto the Fourier / spherical-harmonic basis up to `band`.
pub fn forward_transform(s: &SphereScalar, band: usize) -> Result<SphereSpectrum> {
    let grid = &s.grid;
    grid.check_band(band)?;
    match grid.dim {
        2 => {
            let mut a = vec![0.0; band + 1];
            let mut b = vec![0.0; band + 1];
            let w = 1.0 / grid.n_lon as f64;
            for (theta, v) in grid.lon.iter().zip(&s.values) {
                for k in 0..=band {
                    let (sn, c) = (k as f64 * theta).sin_cos();
                    a[k] += w * v * c;
                    b[k] += w * v * sn;
                }
            }
            for k in 1..=band {
                a[k] *= 2.0;
                b[k] *= 2.0;
            }
            b[0] = 0.0;
            Ok(SphereSpectrum::Circle { a, b })
        }
        _ => {
            let rule = GaussRule::new(grid.n_lat);
            let dphi = 2.0 * PI / grid.n_lon as f64;
            let trig: Vec<_> = grid.lon.iter().map(|&phi| trig_table(band, phi)).collect();
            let mut coeffs = vec![0.0; sh_count(band)];
            for (i, (&x, &wx)) in grid.cos_lat.iter().zip(rule.weights()).enumerate() {
                let row = &s.values[i * grid.n_lon..(i + 1) * grid.n_lon];
                // longitude projections for this ring
                let mut proj_cos = vec![0.0; band + 1];
                let mut proj_sin = vec![0.0; band + 1];
                for (v, (cos_m, sin_m)) in row.iter().zip(&trig) {
                    for m in 0..=band {
                        proj_cos[m] += v * cos_m[m];
                        proj_sin[m] += v * sin_m[m];
                    }
                }
                let table = LegendreTable::new(band, x, (1.0 - x * x).sqrt());
                for l in 0..=band {
                    for m in -(l as i64)..=(l as i64) {
                        let am = m.unsigned_abs() as usize;
                        let lon = match m.cmp(&0) {
                            std::cmp::Ordering::Greater => std::f64::consts::SQRT_2 * proj_cos[am],
                            std::cmp::Ordering::Equal => proj_cos[0],
                            std::cmp::Ordering::Less => std::f64::consts::SQRT_2 * proj_sin[am],
                        };
                        coeffs[sh_index(l, m)] += wx * dphi * table.p(l, am) * lon;
                    }
                }
            }
            Ok(SphereSpectrum::Sphere { band, coeffs })
        }
    }
}

/// Options for the mean-zero solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Relative tolerance on `|mean(g)|`.
    pub mean_tol: f64,
    /// Lower bound for the scale the mean is compared against, for callers
    /// that know the natural magnitude of `g` (e.g. from the source norm).
    pub reference_scale: f64,
    /// Absolute tolerance floor, e.g. an estimate of the discretisation
    /// error in the mean of `g`.
    pub abs_floor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { mean_tol: DEFAULT_MEAN_TOL, reference_scale: 0.0, abs_floor: 0.0 }
    }
}

fn check_mean(g: &SphereScalar, opts: SolveOptions) -> Result<f64> {
    let mean = g.mean();
    let tol = (opts.mean_tol * g.max_abs().max(opts.reference_scale)).max(opts.abs_floor);
    if mean.abs() > tol {
        return Err(Error::Solvability { mean, tol });
    }
    Ok(mean)
}

/// Mean-zero solution of `-Laplace phi = g` on the sphere. The accepted
/// residual mean of `g` is projected out.
pub fn poisson_solve(g: &SphereScalar, band: usize, opts: SolveOptions) -> Result<SphereSpectrum> {
    check_mean(g, opts)?;
    let spec = forward_transform(g, band)?;
    Ok(match spec {
        SphereSpectrum::Circle { .. } => {
            spec.map_degrees(|k| if k == 0 { 0.0 } else { 1.0 / (k * k) as f64 })
        }
        SphereSpectrum::Sphere { .. } => {
            spec.map_degrees(|l| if l == 0 { 0.0 } else { 1.0 / (l * (l + 1)) as f64 })
        }
    })
}

/// Mean-zero `h` on the circle with `dh/dtheta = g`.
pub fn circle_antiderivative(
    g: &SphereScalar,
    band: usize,
    opts: SolveOptions,
) -> Result<SphereSpectrum> {
    if g.grid.dim != 2 {
        return Err(Error::Shape("circle antiderivative needs a circle grid".into()));
    }
    check_mean(g, opts)?;
    match forward_transform(g, band)? {
        SphereSpectrum::Circle { a, b } => {
            let mut ha = vec![0.0; band + 1];
            let mut hb = vec![0.0; band + 1];
            for k in 1..=band {
                let kf = k as f64;
                ha[k] = -b[k] / kf;
                hb[k] = a[k] / kf;
            }
            Ok(SphereSpectrum::Circle { a: ha, b: hb })
        }
        SphereSpectrum::Sphere { .. } => unreachable!("circle grid yields circle spectrum"),
    }
}

/// Tangent vectors at the nodes of a grid, in the ambient frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentField {
    grid: Arc<SphereGrid>,
    components: Vec<[f64; 3]>,
}

impl TangentField {
    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn components(&self) -> &[[f64; 3]] {
        &self.components
    }

    /// Largest `|v . y| / max(|v|, 1)` over the nodes.
    pub fn max_normal_component(&self) -> f64 {
        self.grid
            .points()
            .iter()
            .zip(&self.components)
            .map(|(p, v)| dot3(p, v).abs() / norm3(v).max(1.0))
            .fold(0.0, f64::max)
    }
}

/// Sphere data the correction field is built from.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrectionPotential {
    /// `h` on `S^1` (a 0-form).
    Circle(SphereScalar),
    /// `grad phi x y` on `S^2`, the vector dual of `-*d phi`.
    Sphere(TangentField),
}

/// `w(y) = grad_S phi(y) x y`, the vector dual of `-*_{S^2} d phi`, whose
/// exterior derivative is `-(Laplace phi) Vol`. On the circle the potential is
/// `h` itself.
pub fn tangent_vector(sample: &SpectralSample, dir: [f64; 3]) -> [f64; 3] {
    cross3(&sample.gradient, &dir)
}

pub fn correction_tangent_field(
    spectrum: &SphereSpectrum,
    grid: &Arc<SphereGrid>,
) -> Result<CorrectionPotential> {
    if grid.dim() != spectrum.dim() {
        return Err(Error::Shape("spectrum and grid dimensions differ".into()));
    }
    match spectrum {
        SphereSpectrum::Circle { .. } => Ok(CorrectionPotential::Circle(spectrum.synthesize(grid)?)),
        SphereSpectrum::Sphere { .. } => {
            let components = grid
                .points()
                .iter()
                .map(|p| tangent_vector(&spectrum.sample(p), *p))
                .collect();
            Ok(CorrectionPotential::Sphere(TangentField { grid: Arc::clone(grid), components }))
        }
    }
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
