//! Catalog of real-analytic, mean-zero sources on the closed annulus.

use serde::{Deserialize, Serialize};

use crate::domain::{norm, AnnulusDomain};
use crate::error::{Error, Result};
use crate::sphere::legendre::real_sh;

/// A scalar source `f` on the closed annulus.
pub trait Source: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> f64;

    /// Exact `int_A f dVol`.
    fn annulus_integral(&self) -> f64;
}

/// `coeff * (rho / R2)^power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialTerm {
    pub power: u32,
    pub coeff: f64,
}

impl RadialTerm {
    pub fn new(power: u32, coeff: f64) -> Self {
        Self { power, coeff }
    }
}

fn default_angular_radial() -> Vec<RadialTerm> {
    vec![RadialTerm::new(0, 1.0), RadialTerm::new(1, 1.0)]
}

fn default_radial() -> Vec<RadialTerm> {
    vec![RadialTerm::new(2, 1.0)]
}

/// Catalog entries. Every entry has zero annulus integral by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Zero,
    /// `Y(x/|x|) p(|x|)` with `Y` an angular harmonic of degree >= 1.
    HarmonicRadial {
        degree: usize,
        #[serde(default)]
        order: i64,
        radial: Vec<RadialTerm>,
    },
    /// `p(|x|)` minus its exact annulus mean.
    RadialBumpMeansub { radial: Vec<RadialTerm> },
    /// Harmonic part with nonzero traces on both spheres plus a mean-subtracted
    /// radial part.
    BoundaryLoaded {
        degree: usize,
        #[serde(default)]
        order: i64,
        #[serde(default = "default_angular_radial")]
        angular_radial: Vec<RadialTerm>,
        #[serde(default = "default_radial")]
        radial: Vec<RadialTerm>,
    },
}

impl SourceSpec {
    pub fn build(&self, domain: &AnnulusDomain) -> Result<CatalogSource> {
        let (harmonic, radial) = match self {
            Self::Zero => (None, Vec::new()),
            Self::HarmonicRadial { degree, order, radial } => {
                (Some(Harmonic::new(domain.n(), *degree, *order, radial.clone())?), Vec::new())
            }
            Self::RadialBumpMeansub { radial } => (None, radial.clone()),
            Self::BoundaryLoaded { degree, order, angular_radial, radial } => (
                Some(Harmonic::new(domain.n(), *degree, *order, angular_radial.clone())?),
                radial.clone(),
            ),
        };
        for t in harmonic.iter().flat_map(|h| &h.radial).chain(&radial) {
            if !t.coeff.is_finite() {
                return Err(Error::Config("radial coefficients must be finite".into()));
            }
        }
        let radial_mean = radial_mean(domain, &radial);
        Ok(CatalogSource { domain: *domain, harmonic, radial, radial_mean })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::HarmonicRadial { .. } => "harmonic_radial",
            Self::RadialBumpMeansub { .. } => "radial_bump_meansub",
            Self::BoundaryLoaded { .. } => "boundary_loaded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Harmonic {
    n: usize,
    degree: usize,
    order: i64,
    radial: Vec<RadialTerm>,
}

impl Harmonic {
    fn new(n: usize, degree: usize, order: i64, radial: Vec<RadialTerm>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Config("angular harmonic degree must be at least 1".into()));
        }
        if n == 3 && order.unsigned_abs() as usize > degree {
            return Err(Error::Config(format!("order {order} exceeds degree {degree}")));
        }
        Ok(Self { n, degree, order, radial })
    }

    /// Angular factor at a unit direction.
    fn angular(&self, y: &[f64]) -> f64 {
        match self.n {
            2 => {
                let theta = y[1].atan2(y[0]) * self.degree as f64;
                if self.order >= 0 {
                    theta.cos()
                } else {
                    theta.sin()
                }
            }
            _ => real_sh(self.degree, self.order, [y[0], y[1], y[2]]),
        }
    }
}

fn radial_value(terms: &[RadialTerm], rho: f64, r2: f64) -> f64 {
    let s = rho / r2;
    terms.iter().map(|t| t.coeff * s.powi(t.power as i32)).sum()
}

/// Exact annulus mean of `p(|x|)`.
fn radial_mean(domain: &AnnulusDomain, terms: &[RadialTerm]) -> f64 {
    let integral: f64 = terms
        .iter()
        .map(|t| t.coeff * domain.radial_moment(t.power as i32) / domain.r2().powi(t.power as i32))
        .sum();
    integral / domain.radial_moment(0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogSource {
    domain: AnnulusDomain,
    harmonic: Option<Harmonic>,
    radial: Vec<RadialTerm>,
    radial_mean: f64,
}

impl CatalogSource {
    pub fn domain(&self) -> &AnnulusDomain {
        &self.domain
    }
}

impl Source for CatalogSource {
    fn dim(&self) -> usize {
        self.domain.n()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let rho = norm(x);
        let r2 = self.domain.r2();
        let mut v = 0.0;
        if !self.radial.is_empty() {
            v += radial_value(&self.radial, rho, r2) - self.radial_mean;
        }
        if let Some(h) = &self.harmonic {
            if rho > 0.0 {
                let y: Vec<f64> = x.iter().map(|c| c / rho).collect();
                v += h.angular(&y) * radial_value(&h.radial, rho, r2);
            }
        }
        v
    }

    fn annulus_integral(&self) -> f64 {
        0.0
    }
}
