//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use annulus_div::{AnnulusDomain, RadialTerm, Source, SourceSpec};

pub fn unit_annulus(n: usize) -> AnnulusDomain {
    AnnulusDomain::new(n, 1.0, 2.0).expect("valid annulus")
}

/// Source with nonzero traces on both spheres.
pub fn loaded_source(domain: &AnnulusDomain) -> Arc<dyn Source> {
    let spec = SourceSpec::BoundaryLoaded {
        degree: 2,
        order: 1,
        angular_radial: vec![RadialTerm::new(0, 1.0), RadialTerm::new(1, 1.0)],
        radial: vec![RadialTerm::new(2, 1.0)],
    };
    Arc::new(spec.build(domain).expect("valid catalog entry"))
}
