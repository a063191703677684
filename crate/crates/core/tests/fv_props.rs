mod common;

use common::*;
use proptest::prelude::*;
use std::f64::consts::PI;
use tomflow::macrosolve::{
    evolve, fv_step, l1_distance, relax_cell, FvField, Ghost, RelaxationConfig, RelaxationVariant, SourceSign,
};
use tomflow::{ClosureSet, ConsState, PrimState};

fn periodic(cs: &ClosureSet, n: usize, amp: [f64; 3], k: f64) -> FvField {
    FvField::from_prim_fn(0.0, 1.0, n, Ghost::Periodic, cs, |x| {
        let s = (2.0 * PI * k * x).sin();
        PrimState::new(0.5 + amp[0] * s, 0.4 + amp[1] * s, 0.6 + amp[2] * (2.0 * PI * x).cos())
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn homogeneous_scheme_conserves(i in arb_pair_index(), a in 0.0f64..0.3, b in 0.0f64..0.3, c in 0.0f64..0.4, k in 1.0f64..3.0) {
        let cs = pair(i);
        let mut f = periodic(&cs, 64, [a, b, c], k.round());
        let t0 = f.totals();
        for _ in 0..20 {
            f = fv_step(&f, &cs, &RelaxationConfig::none(), 0.9).unwrap();
            let t = f.totals();
            for m in 0..3 {
                prop_assert!((t[m] - t0[m]).abs() <= 1e-12 * t0[m].abs().max(1.0));
            }
        }
    }

    #[test]
    fn relaxed_scheme_conserves_mass(
        i in arb_pair_index(),
        variant in prop::sample::select(vec![RelaxationVariant::WToW, RelaxationVariant::ZArz, RelaxationVariant::ZVc]),
        eps in 0.01f64..1.0,
    ) {
        let q = pw(common::EXPONENTS[i / 3], 1.0);
        let cs = pair(i)
            .with_h_eq(pw(1.0, 0.8))
            .with_v_eq(tomflow::ScalarClosure::affine(1.0, -1.0).unwrap())
            .with_vc(tomflow::BivariateClosure::constant_minus_q(1.5, &q));
        let rc = RelaxationConfig::new(variant, eps, SourceSign::Dissipative).unwrap();
        let mut f = periodic(&cs, 48, [0.2, 0.1, 0.1], 1.0);
        let m0 = f.totals()[0];
        for _ in 0..10 {
            f = fv_step(&f, &cs, &rc, 0.8).unwrap();
        }
        prop_assert!((f.totals()[0] - m0).abs() <= 1e-12);
    }

    #[test]
    fn w_relaxation_is_exact_exponential(rho in 0.1f64..0.9, phi in -0.3f64..0.3, eps in 0.01f64..1.0, dt in 0.0f64..0.5) {
        let cs = ClosureSet::power(1.0, 1.0).unwrap().with_h_eq(pw(1.0, 2.0));
        let w_eq = cs.w_eq(rho).unwrap();
        let u = ConsState::new(rho, rho * 0.7, rho * phi);
        for (sign, growth) in [(SourceSign::Paper, dt / eps), (SourceSign::Dissipative, -dt / eps)] {
            let rc = RelaxationConfig::new(RelaxationVariant::WToW, eps, sign).unwrap();
            let out = relax_cell(&u, &cs, &rc, dt).unwrap();
            let expect = w_eq + (u.w - w_eq) * growth.exp();
            prop_assert!((out.w - expect).abs() <= 1e-13 * expect.abs().max(1.0));
            prop_assert_eq!(out.rho, rho);
        }
    }
}

/// Constant velocity keeps every Lagrangian quantity frozen, so profiles translate.
#[test]
fn smooth_translation_converges_first_order() {
    for i in [0, 4, 8] {
        let cs = pair(i);
        let c = 0.6;
        let t_final = 1.0 / 3.0;
        let profile = |x: f64| {
            let s = (2.0 * PI * x).sin();
            PrimState::new(0.5 + 0.25 * s, c, 0.6 + 0.2 * (2.0 * PI * x).cos())
        };
        let mut errs = Vec::new();
        for n in [100, 200, 400] {
            let f0 = FvField::from_prim_fn(0.0, 1.0, n, Ghost::Periodic, &cs, profile).unwrap();
            let f = evolve(&f0, &cs, &RelaxationConfig::none(), 0.9, t_final).unwrap();
            let got: Vec<f64> = f.prims(&cs).unwrap().iter().map(|u| u.rho).collect();
            let exact: Vec<f64> = f.centers().iter().map(|x| profile(x - c * t_final).rho).collect();
            errs.push(l1_distance(&got, &exact, f.dx));
        }
        let orders: Vec<f64> = errs.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
        assert!(orders.iter().all(|o| *o >= 0.8), "pair {i}: {errs:?} {orders:?}");
    }
}
