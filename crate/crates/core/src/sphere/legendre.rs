//! Orthonormal associated Legendre functions and real spherical harmonics.
//!
//! `p(l, m)` is normalised so that `Y_lm = p(l,|m|) * {sqrt2 cos(m phi), 1,
//! sqrt2 sin(|m| phi)}` is orthonormal over the unit sphere; no
//! Condon-Shortley phase. `p(l, m) / sin(theta)` is tabulated separately for
//! `m >= 1` so gradients stay finite at the poles.

use std::f64::consts::{PI, SQRT_2};

#[inline]
pub fn tri_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Index of real harmonic `(l, m)`, `-l <= m <= l`, in a flat coefficient vector.
#[inline]
pub fn sh_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Number of real harmonics of degree `<= band`.
pub fn sh_count(band: usize) -> usize {
    (band + 1) * (band + 1)
}

#[derive(Debug, Clone)]
pub struct LegendreTable {
    band: usize,
    p: Vec<f64>,
    p_over_sin: Vec<f64>,
    dp_dtheta: Vec<f64>,
}

impl LegendreTable {
    /// Tabulates degrees `0..=band` at colatitude with `cos = x`, `sin = s >= 0`.
    pub fn new(band: usize, x: f64, s: f64) -> Self {
        let size = tri_index(band, band) + 1;
        let mut p = vec![0.0; size];
        let mut q = vec![0.0; size];
        let mut dp = vec![0.0; size];

        let mut diag = (1.0 / (4.0 * PI)).sqrt();
        for m in 0..=band {
            let mf = m as f64;
            if m > 0 {
                let c = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
                q[tri_index(m, m)] = c * diag;
                diag *= c * s;
            }
            p[tri_index(m, m)] = diag;
            if m < band {
                let c = (2.0 * mf + 3.0).sqrt() * x;
                p[tri_index(m + 1, m)] = c * p[tri_index(m, m)];
                q[tri_index(m + 1, m)] = c * q[tri_index(m, m)];
            }
            for l in m + 2..=band {
                let lf = l as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
                let (i, i1, i2) = (tri_index(l, m), tri_index(l - 1, m), tri_index(l - 2, m));
                p[i] = a * (x * p[i1] - b * p[i2]);
                q[i] = a * (x * q[i1] - b * q[i2]);
            }
        }
        for l in 0..=band {
            let lf = l as f64;
            if l >= 1 {
                dp[tri_index(l, 0)] = -(lf * (lf + 1.0)).sqrt() * p[tri_index(l, 1)];
            }
            for m in 1..=l {
                let mf = m as f64;
                let lower = if l > m {
                    ((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0)).sqrt()
                        * q[tri_index(l - 1, m)]
                } else {
                    0.0
                };
                dp[tri_index(l, m)] = lf * x * q[tri_index(l, m)] - lower;
            }
        }
        Self { band, p, p_over_sin: q, dp_dtheta: dp }
    }

    pub fn band(&self) -> usize {
        self.band
    }

    #[inline]
    pub fn p(&self, l: usize, m: usize) -> f64 {
        self.p[tri_index(l, m)]
    }

    #[inline]
    pub fn p_over_sin(&self, l: usize, m: usize) -> f64 {
        self.p_over_sin[tri_index(l, m)]
    }

    #[inline]
    pub fn dp_dtheta(&self, l: usize, m: usize) -> f64 {
        self.dp_dtheta[tri_index(l, m)]
    }
}

/// Longitude factor of the real harmonic of order `m` and its `phi`-derivative.
#[inline]
pub fn longitude_factor(m: i64, cos_m: f64, sin_m: f64) -> (f64, f64) {
    let mf = m.unsigned_abs() as f64;
    match m.cmp(&0) {
        std::cmp::Ordering::Greater => (SQRT_2 * cos_m, -SQRT_2 * mf * sin_m),
        std::cmp::Ordering::Equal => (1.0, 0.0),
        std::cmp::Ordering::Less => (SQRT_2 * sin_m, SQRT_2 * mf * cos_m),
    }
}

/// `cos(m phi), sin(m phi)` for `m = 0..=band`.
pub fn trig_table(band: usize, phi: f64) -> (Vec<f64>, Vec<f64>) {
    (0..=band)
        .map(|m| {
            let a = m as f64 * phi;
            (a.cos(), a.sin())
        })
        .unzip()
}

/// Real orthonormal `Y_lm` at a unit direction.
pub fn real_sh(l: usize, m: i64, dir: [f64; 3]) -> f64 {
    let (x, s, phi) = spherical_angles(dir);
    let table = LegendreTable::new(l, x, s);
    let am = m.unsigned_abs() as usize;
    let (sin_m, cos_m) = ((am as f64) * phi).sin_cos();
    table.p(l, am) * longitude_factor(m, cos_m, sin_m).0
}

/// `(cos theta, sin theta, phi)` for a unit vector; `phi = 0` on the axis.
pub fn spherical_angles(dir: [f64; 3]) -> (f64, f64, f64) {
    let rxy = dir[0].hypot(dir[1]);
    let r = rxy.hypot(dir[2]);
    let x = dir[2] / r;
    let s = rxy / r;
    let phi = if rxy == 0.0 { 0.0 } else { dir[1].atan2(dir[0]) };
    (x, s, phi)
}
