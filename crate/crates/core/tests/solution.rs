use std::sync::Arc;

use annulus_div::assembly::correction_sign;
use annulus_div::verify::fd_divergence;
use annulus_div::{
    assemble_solution, run_suite, AnnulusDomain, Error, RadialTerm, Resolution, Source, SourceSpec, VerifyConfig,
};

fn y21() -> SourceSpec {
    SourceSpec::HarmonicRadial { degree: 2, order: 1, radial: vec![RadialTerm::new(0, 1.0), RadialTerm::new(2, -0.8)] }
}

fn loaded() -> SourceSpec {
    SourceSpec::BoundaryLoaded {
        degree: 1,
        order: -1,
        angular_radial: vec![RadialTerm::new(0, 1.0), RadialTerm::new(1, 1.0)],
        radial: vec![RadialTerm::new(2, 1.0)],
    }
}

fn res(n: usize) -> Resolution {
    Resolution { band: if n == 2 { 24 } else { 12 }, radial_nodes: 24, fd_step: None }
}

struct Combination {
    terms: Vec<(f64, Arc<dyn Source>)>,
}

impl Source for Combination {
    fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, s)| c * s.eval(x)).sum()
    }

    fn annulus_integral(&self) -> f64 {
        self.terms.iter().map(|(c, s)| c * s.annulus_integral()).sum()
    }
}

/// `f(R^T x)` for the quarter turn `R` about the third axis.
struct Rotated(Arc<dyn Source>);

fn quarter_turn(x: &[f64]) -> Vec<f64> {
    vec![-x[1], x[0], x[2]]
}

fn quarter_turn_back(x: &[f64]) -> Vec<f64> {
    vec![x[1], -x[0], x[2]]
}

impl Source for Rotated {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.0.eval(&quarter_turn_back(x))
    }

    fn annulus_integral(&self) -> f64 {
        self.0.annulus_integral()
    }
}

fn sample_points(n: usize) -> Vec<Vec<f64>> {
    let all = [[1.2, 0.4, -0.3], [-0.7, 1.1, 0.9], [0.3, -1.6, 0.5], [1.0, 1.0, 0.7], [1.6, 0.2, 1.0]];
    all.iter().map(|p| p[..n].to_vec()).collect()
}

#[test]
fn zero_source_passes_with_tiny_values() {
    for n in [2, 3] {
        let d = AnnulusDomain::new(n, 1.0, 2.0).unwrap();
        let src: Arc<dyn Source> = Arc::new(SourceSpec::Zero.build(&d).unwrap());
        let sol = assemble_solution(src, &d, res(n)).unwrap();
        let report = run_suite(&sol, &VerifyConfig::default());
        assert!(report.pass);
        for c in &report.checks {
            assert!(c.value <= 1e-12, "{}: {}", c.name, c.value);
        }
    }
}

#[test]
fn standard_three_dimensional_run_passes() {
    let d = AnnulusDomain::new(3, 1.0, 2.0).unwrap();
    let src: Arc<dyn Source> = Arc::new(y21().build(&d).unwrap());
    let sol = assemble_solution(src, &d, Resolution::default_for(3)).unwrap();
    let report = run_suite(&sol, &VerifyConfig::default());
    assert!(report.pass, "{}", report.to_json());
    assert!(report.check("divergence_residual").unwrap().value < 1e-8);
}

#[test]
fn two_dimensional_cosine_run_passes() {
    let d = AnnulusDomain::new(2, 0.5, 1.5).unwrap();
    let spec = SourceSpec::HarmonicRadial { degree: 1, order: 0, radial: vec![RadialTerm::new(2, 1.0), RadialTerm::new(4, -1.0)] };
    let src: Arc<dyn Source> = Arc::new(spec.build(&d).unwrap());
    let sol = assemble_solution(src, &d, Resolution::default_for(2)).unwrap();
    assert!(run_suite(&sol, &VerifyConfig::default()).pass);
}

#[test]
fn flipped_sign_breaks_the_boundary_condition_only() {
    for n in [2, 3] {
        let d = AnnulusDomain::new(n, 1.0, 2.0).unwrap();
        let src: Arc<dyn Source> = Arc::new(loaded().build(&d).unwrap());
        let sol = assemble_solution(src, &d, res(n)).unwrap();
        assert_eq!(sol.sign(), correction_sign(n));
        let good = run_suite(&sol, &VerifyConfig::default());
        let broken = run_suite(&sol.clone().with_sign(-correction_sign(n)), &VerifyConfig::default());
        assert!(good.pass);
        assert!(!broken.pass);
        let outer = broken.check("boundary_outer").unwrap();
        assert!(!outer.pass && outer.value > 1e-2, "n={n}: {}", outer.value);
        assert!(broken.check("divergence_residual").unwrap().pass);
    }
}

#[test]
fn solution_is_linear_in_the_source() {
    for n in [2, 3] {
        let d = AnnulusDomain::new(n, 1.0, 2.0).unwrap();
        let f1: Arc<dyn Source> = Arc::new(y21().build(&d).unwrap());
        let f2: Arc<dyn Source> = Arc::new(loaded().build(&d).unwrap());
        let (a, b) = (1.7, -0.6);
        let combo: Arc<dyn Source> = Arc::new(Combination { terms: vec![(a, f1.clone()), (b, f2.clone())] });
        let u1 = assemble_solution(f1, &d, res(n)).unwrap();
        let u2 = assemble_solution(f2, &d, res(n)).unwrap();
        let u = assemble_solution(combo, &d, res(n)).unwrap();
        for x in sample_points(n) {
            let (v, v1, v2) = (u.eval(&x).unwrap(), u1.eval(&x).unwrap(), u2.eval(&x).unwrap());
            for i in 0..n {
                assert!((v[i] - (a * v1[i] + b * v2[i])).abs() <= 1e-12, "n={n} x={x:?}");
            }
        }
    }
}

#[test]
fn rotating_the_source_rotates_the_field() {
    let d = AnnulusDomain::new(3, 1.0, 2.0).unwrap();
    let f: Arc<dyn Source> = Arc::new(loaded().build(&d).unwrap());
    let g: Arc<dyn Source> = Arc::new(Rotated(f.clone()));
    let u = assemble_solution(f, &d, res(3)).unwrap();
    let v = assemble_solution(g, &d, res(3)).unwrap();
    for x in sample_points(3) {
        let expect = quarter_turn(&u.eval(&x).unwrap());
        let got = v.eval(&quarter_turn(&x)).unwrap();
        for i in 0..3 {
            assert!((got[i] - expect[i]).abs() <= 1e-10, "{x:?}: {got:?} vs {expect:?}");
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let d = AnnulusDomain::new(3, 1.0, 2.0).unwrap();
    let src: Arc<dyn Source> = Arc::new(loaded().build(&d).unwrap());
    let a = run_suite(&assemble_solution(src.clone(), &d, res(3)).unwrap(), &VerifyConfig::default());
    let b = run_suite(&assemble_solution(src, &d, res(3)).unwrap(), &VerifyConfig::default());
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn divergence_matches_source_at_interior_points() {
    let d = AnnulusDomain::new(3, 1.0, 2.0).unwrap();
    let spec = loaded();
    let f = spec.build(&d).unwrap();
    let sol = assemble_solution(Arc::new(f.clone()), &d, Resolution::default_for(3)).unwrap();
    for x in sample_points(3) {
        let div = fd_divergence(|p| sol.eval(p), &x, 1e-4).unwrap();
        assert!((div - f.eval(&x)).abs() < 1e-8, "{x:?}");
    }
}

#[test]
fn non_mean_zero_source_is_rejected() {
    struct Constant;
    impl Source for Constant {
        fn dim(&self) -> usize {
            3
        }
        fn eval(&self, _: &[f64]) -> f64 {
            1.0
        }
        fn annulus_integral(&self) -> f64 {
            28.0 * std::f64::consts::PI / 3.0
        }
    }
    let d = AnnulusDomain::new(3, 1.0, 2.0).unwrap();
    // a constant has constant traces, so f~ = 1 - Q carries the full mean
    let err = assemble_solution(Arc::new(Constant), &d, res(3));
    assert!(matches!(err, Err(Error::Solvability { .. })));
}
