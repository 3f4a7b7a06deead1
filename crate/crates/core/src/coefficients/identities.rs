//! Exact-arithmetic identity suite for one dimension `n`.

use num_traits::Zero;
use serde::Serialize;

use super::exact::{is_positive, rat, Rational};
use super::{
    eval_psi_tilde, eval_psi_tilde_binomial, psi_taylor_coeffs, rational_q, solve_correction_exact, CorrectionOrder,
};
use crate::error::Result;

/// `mu` values at which the closed-form rationals are compared with the
/// exact solve.
pub const MU_SAMPLES: [(i64, i64); 5] = [(1, 10), (1, 2), (1, 1), (2, 1), (10, 1)];

/// Points at which the two forms of `Psi~_n` are compared.
pub const T_SAMPLES: [(i64, i64); 7] = [(0, 1), (1, 3), (1, 1), (3, 2), (7, 5), (-2, 1), (10, 1)];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub n: usize,
    /// Taylor coefficients at `t = 1` vanish for `k <= 4`.
    pub taylor_low_vanish: bool,
    /// Taylor coefficients are positive for `5 <= k <= n + 4`.
    pub taylor_high_positive: bool,
    /// Monomial and binomial forms of `Psi~_n` agree.
    pub dual_forms_agree: bool,
    /// `(-1)^k Q_{k,a}(mu)` equals the exact solve with `R1 = 1`.
    pub closed_form_matches_solve: bool,
}

impl IdentityCheck {
    pub fn pass(&self) -> bool {
        self.taylor_low_vanish && self.taylor_high_positive && self.dual_forms_agree && self.closed_form_matches_solve
    }
}

pub fn check_identities(n: usize) -> Result<IdentityCheck> {
    let taylor = psi_taylor_coeffs(n)?;
    let taylor_low_vanish = taylor[..5].iter().all(Zero::is_zero);
    let taylor_high_positive = taylor[5..=n + 4].iter().all(is_positive);

    let mut dual_forms_agree = true;
    for (p, q) in T_SAMPLES {
        let t = rat(p, q);
        dual_forms_agree &= eval_psi_tilde(n, &t)? == eval_psi_tilde_binomial(n, &t)?;
    }

    let mut closed_form_matches_solve = true;
    let one = rat(1, 1);
    for (p, q) in MU_SAMPLES {
        let mu = rat(p, q);
        let r2 = &one + &mu;
        for a in 0..2 {
            let loads: Vec<Rational> = (0..2).map(|i| if i == a { rat(1, 1) } else { rat(0, 1) }).collect();
            let solved = solve_correction_exact(CorrectionOrder::Values, n, &one, &r2, &loads)?;
            for (k, c) in solved.iter().enumerate() {
                let q = rational_q::<Rational>(k, a + 1, n, &mu)?;
                let closed = if k % 2 == 1 { -q } else { q };
                closed_form_matches_solve &= closed == *c;
            }
        }
    }
    Ok(IdentityCheck { n, taylor_low_vanish, taylor_high_positive, dual_forms_agree, closed_form_matches_solve })
}
