use num_bigint::BigInt;
use proptest::prelude::*;

use annulus_div::assembly::cutoff_chi;
use annulus_div::coefficients::{
    build_correction, composed_q, eval_psi, eval_psi_tilde, eval_psi_tilde_binomial, psi_polynomial, psi_taylor_coeffs,
    solve_correction_oracle, CorrectionOrder, Rational,
};

fn rational() -> impl Strategy<Value = Rational> {
    (-400i64..400, 1i64..60).prop_map(|(p, q)| Rational::new(BigInt::from(p), BigInt::from(q)))
}

proptest! {
    #[test]
    fn psi_tilde_dual_forms_agree(n in 2usize..16, t in rational()) {
        prop_assert_eq!(eval_psi_tilde(n, &t).unwrap(), eval_psi_tilde_binomial(n, &t).unwrap());
    }

    #[test]
    fn taylor_expansion_reconstructs_psi(n in 2usize..14, t in rational()) {
        let coeffs = psi_taylor_coeffs(n).unwrap();
        let s = &t - Rational::from_integer(1.into());
        let mut acc = Rational::from_integer(0.into());
        for c in coeffs.iter().rev() {
            acc = acc * &s + c;
        }
        prop_assert_eq!(&acc, &eval_psi(n, &t).unwrap());
        prop_assert_eq!(acc, psi_polynomial(n).unwrap().eval(&t));
    }

    #[test]
    fn closed_form_matches_dense_solve(n in 2usize..10, r1 in 0.2f64..5.0, mu in 0.05f64..20.0) {
        let r2 = r1 * (1.0 + mu);
        let q = composed_q(n, r1, r2).unwrap();
        for a in 0..2 {
            let loads = if a == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
            let dense = solve_correction_oracle(CorrectionOrder::Values, n, r1, r2, &loads).unwrap();
            let scale = dense.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for k in 0..3 {
                prop_assert!((q[k][a] - dense[k]).abs() <= 1e-11 * scale, "k={} a={}: {} vs {}", k, a, q[k][a], dense[k]);
            }
        }
    }

    #[test]
    fn correction_is_linear_in_loads(
        l in 0usize..2,
        x in prop::collection::vec(-3.0f64..3.0, 4),
        y in prop::collection::vec(-3.0f64..3.0, 4),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
    ) {
        let order = CorrectionOrder::from_l(l).unwrap();
        let k = order.num_loads();
        let combo: Vec<f64> = (0..k).map(|i| alpha * x[i] + beta * y[i]).collect();
        let cols: Vec<Vec<f64>> = (0..k).map(|i| vec![x[i], y[i], combo[i]]).collect();
        let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        let built = build_correction(order, 3, 1.0, 2.5, &refs).unwrap();
        for a in 0..order.num_coeffs() {
            let c = built.c_funcs()[a].as_slice();
            let expect = alpha * c[0] + beta * c[1];
            prop_assert!((c[2] - expect).abs() <= 1e-10 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn cutoff_is_monotone_between_zero_and_one(a in 0.0f64..1.0, b in 0.0f64..1.0, l in 0usize..2) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (r1, r2) = (0.8, 2.3);
        let ca = cutoff_chi(r1 + lo * (r2 - r1), r1, r2, l);
        let cb = cutoff_chi(r1 + hi * (r2 - r1), r1, r2, l);
        prop_assert!((0.0..=1.0).contains(&ca) && (0.0..=1.0).contains(&cb));
        prop_assert!(ca <= cb);
    }
}
