mod common;

use common::*;
use proptest::prelude::*;
use tomflow::analysis::{
    corli_consistency, gamma_hc, lambda1_corli, mu_arz, mu_corli, mu_tom, subchar_arz, subchar_tom,
};
use tomflow::{BivariateClosure, ClosureSet, ScalarClosure};

fn arb_closures() -> impl Strategy<Value = ClosureSet> {
    (0.3f64..3.0, 0.3f64..3.0, 0.2f64..2.0, 0.3f64..3.0, 0.2f64..2.0)
        .prop_map(|(a, b, cb, e, ce)| ClosureSet::new(pw(a, 1.0), pw(b, cb)).with_h_eq(pw(e, ce)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mu_sign_matches_strict_chain(cs in arb_closures(), rho in 0.05f64..1.0, v in -1.0f64..1.0) {
        let mu = mu_tom(rho, &cs).unwrap();
        let sc = subchar_tom(rho, v, &cs).unwrap();
        prop_assert_eq!(mu > 0.0, sc.lam1_frozen < sc.lam1_arz, "mu {} chain {:?}", mu, sc);
    }
}

proptest! {
    #[test]
    fn mu_tom_against_differences(cs in arb_closures(), rho in 0.1f64..0.9) {
        let d = 1e-5;
        let he = cs.h_eq.clone().unwrap();
        let hd = fd1(|r| cs.h.eval(r).unwrap(), rho, d);
        let hed = fd1(|r| he.eval(r).unwrap(), rho, d);
        let x = he.eval(rho).unwrap();
        let qd = fd1(|h| cs.q.eval(h).unwrap(), x, d * x);
        let fd = rho * qd * (hd - hed);
        prop_assert!((mu_tom(rho, &cs).unwrap() - fd).abs() <= 1e-6 * fd.abs().max(1.0));
    }

    #[test]
    fn gamma_against_differences(cs in arb_closures(), rho in 0.1f64..0.9) {
        let d = 1e-4;
        let he = cs.h_eq.clone().unwrap();
        let hd = fd1(|r| cs.h.eval(r).unwrap(), rho, d);
        let hed = fd1(|r| he.eval(r).unwrap(), rho, d);
        let x = he.eval(rho).unwrap();
        let dq = d * x;
        let q2 = (cs.q.eval(x + dq).unwrap() - 2.0 * cs.q.eval(x).unwrap() + cs.q.eval(x - dq).unwrap()) / (dq * dq);
        let fd = q2 * hd * rho * (hed - hd);
        prop_assert!((gamma_hc(rho, &cs).unwrap() - fd).abs() <= 1e-4 * fd.abs().max(1.0));
    }

    #[test]
    fn gamma_vanishes_for_linear_q(b in 0.3f64..3.0, e in 0.3f64..3.0, rho in 0.05f64..1.0) {
        let cs = ClosureSet::new(ScalarClosure::affine(0.1, 2.0).unwrap(), pw(b, 1.0)).with_h_eq(pw(e, 1.0));
        prop_assert_eq!(gamma_hc(rho, &cs).unwrap(), 0.0);
    }

    #[test]
    fn corli_residual_zero_implies_mu_zero(a in 0.3f64..3.0, b in 0.3f64..3.0, c in 0.5f64..3.0, rho in 0.05f64..1.0, h in 0.05f64..1.0) {
        let q = pw(a, 1.0);
        let cs = ClosureSet::new(q.clone(), pw(b, 1.0)).with_vc(BivariateClosure::constant_minus_q(c, &q));
        let chk = corli_consistency(rho, h, &cs).unwrap();
        prop_assert!(chk.r.abs() <= 1e-13 * chk.lam1_c.abs().max(1.0));
        let m = mu_corli(rho, h, &cs).unwrap();
        prop_assert!(m.iter().flatten().all(|x| x.abs() <= 1e-12));
    }

    #[test]
    fn corli_speed_against_differences(c0 in 0.5f64..2.0, cr in -2.0f64..0.0, rho in 0.1f64..0.9, h in 0.1f64..0.9) {
        let vc = BivariateClosure::affine(c0, cr, -0.5);
        let cs = ClosureSet::new(pw(1.0, 1.0), pw(2.0, 1.0)).with_vc(vc.clone());
        let d = 1e-6;
        let dr = fd1(|r| vc.eval(r, h), rho, d);
        let dh = fd1(|x| vc.eval(rho, x), h, d);
        let fd = vc.eval(rho, h) + rho * (dr + 2.0 * rho * dh);
        prop_assert!((lambda1_corli(rho, h, &cs).unwrap() - fd).abs() <= 1e-8);
    }

    #[test]
    fn arz_chain_and_mu_agree(slope in 0.2f64..2.0, e in 0.3f64..3.0, ce in 0.2f64..2.0, rho in 0.05f64..0.9) {
        let cs = ClosureSet::power(1.0, 1.0).unwrap()
            .with_h_eq(pw(e, ce))
            .with_v_eq(ScalarClosure::affine(1.0, -slope).unwrap());
        let m = mu_arz(rho, &cs).unwrap();
        let s = subchar_arz(rho, &cs).unwrap();
        prop_assert_eq!(m.value >= -1e-15, m.nonnegative || m.value.abs() <= 1e-15);
        prop_assert!(!s.assumption_violated);
        if m.nonnegative {
            prop_assert!(s.holds);
        }
    }
}
