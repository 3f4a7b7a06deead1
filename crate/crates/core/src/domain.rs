use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The open shell `R1 < |x| < R2` in `R^n`, `n` in {2, 3}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain", into = "RawDomain")]
pub struct AnnulusDomain {
    n: usize,
    r1: f64,
    r2: f64,
}

#[derive(Serialize, Deserialize)]
struct RawDomain {
    n: usize,
    r1: f64,
    r2: f64,
}

impl TryFrom<RawDomain> for AnnulusDomain {
    type Error = Error;

    fn try_from(raw: RawDomain) -> Result<Self> {
        Self::new(raw.n, raw.r1, raw.r2)
    }
}

impl From<AnnulusDomain> for RawDomain {
    fn from(d: AnnulusDomain) -> Self {
        Self { n: d.n, r1: d.r1, r2: d.r2 }
    }
}

impl AnnulusDomain {
    pub fn new(n: usize, r1: f64, r2: f64) -> Result<Self> {
        if !(n == 2 || n == 3) {
            return Err(Error::Config(format!("dimension must be 2 or 3, got {n}")));
        }
        if !(r1 > 0.0 && r1 < r2 && r2.is_finite()) {
            return Err(Error::Config(format!("radii must satisfy 0 < r1 < r2 < inf, got r1={r1}, r2={r2}")));
        }
        Ok(Self { n, r1, r2 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn width(&self) -> f64 {
        self.r2 - self.r1
    }

    /// `mu = R2/R1 - 1`.
    pub fn mu(&self) -> f64 {
        self.r2 / self.r1 - 1.0
    }

    /// `|S^{n-1}|`.
    pub fn sphere_area(&self) -> f64 {
        if self.n == 2 {
            2.0 * std::f64::consts::PI
        } else {
            4.0 * std::f64::consts::PI
        }
    }

    /// `int_{R1}^{R2} rho^{n-1+k} drho`.
    pub fn radial_moment(&self, k: i32) -> f64 {
        let p = self.n as i32 + k;
        (self.r2.powi(p) - self.r1.powi(p)) / p as f64
    }

    pub fn volume(&self) -> f64 {
        self.sphere_area() * self.radial_moment(0)
    }

    pub fn check_point(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::Shape(format!("point has {} components, domain is {}-dimensional", x.len(), self.n)));
        }
        let r = norm(x);
        if r == 0.0 {
            return Err(Error::Domain("the origin is excluded".into()));
        }
        Ok(r)
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_radii_and_dims() {
        assert!(AnnulusDomain::new(3, 2.0, 1.0).is_err());
        assert!(AnnulusDomain::new(3, 1.0, 1.0).is_err());
        assert!(AnnulusDomain::new(3, 0.0, 1.0).is_err());
        assert!(AnnulusDomain::new(4, 1.0, 2.0).is_err());
        assert!(AnnulusDomain::new(2, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn volume_of_unit_shells() {
        let d = AnnulusDomain::new(3, 1.0, 2.0).unwrap();
        assert!((d.volume() - 4.0 * std::f64::consts::PI * 7.0 / 3.0).abs() < 1e-13);
        let d = AnnulusDomain::new(2, 1.0, 2.0).unwrap();
        assert!((d.volume() - 3.0 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn deserialization_validates() {
        assert!(serde_json::from_str::<AnnulusDomain>(r#"{"n":3,"r1":2.0,"r2":1.0}"#).is_err());
        let d: AnnulusDomain = serde_json::from_str(r#"{"n":2,"r1":1.0,"r2":2.0}"#).unwrap();
        assert_eq!(d.mu(), 1.0);
    }
}
