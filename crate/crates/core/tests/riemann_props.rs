mod common;

use common::*;
use proptest::prelude::*;
use tomflow::riemann::{integrate_rarefaction_curve, solve_riemann, Wave1};
use tomflow::state::{flux_s3, prim_to_cons};
use tomflow::waves::{first_field_invariants, lambda1};
use tomflow::{PrimState, Region, RiemannSolution};

fn shock_problem() -> impl Strategy<Value = (usize, PrimState, PrimState)> {
    (arb_pair_index(), 0.1f64..0.8, -0.5f64..0.8, 0.1f64..1.2, 0.02f64..0.5, 0.1f64..0.9, 0.1f64..1.2)
        .prop_map(|(i, rl, vl, hl, dv, rr, hr)| (i, PrimState::new(rl, vl, hl), PrimState::new(rr, vl - dv, hr)))
}

fn rarefaction_problem() -> impl Strategy<Value = (usize, PrimState, PrimState)> {
    (arb_pair_index(), 0.3f64..0.9, -0.5f64..0.5, 0.3f64..1.2, 0.02f64..0.3, 0.1f64..0.9, 0.1f64..1.2)
        .prop_map(|(i, rl, vl, hl, dv, rr, hr)| (i, PrimState::new(rl, vl, hl), PrimState::new(rr, vl + dv, hr)))
}

const GL_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_W: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

fn gauss(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    GL_X.iter().zip(GL_W).map(|(x, w)| w * f(m + r * x)).sum::<f64>() * r
}

/// `(1 − ξ²)⁴` bump and its derivative in the unscaled variable.
fn bump(y: f64, c: f64, w: f64) -> (f64, f64) {
    let xi = (y - c) / w;
    if xi.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let b = 1.0 - xi * xi;
    (b.powi(4), -8.0 * xi * b.powi(3) / w)
}

/// `∫∫ U φ_t + F(U) φ_x` for `φ = a(x)b(t)`, exact in `x` on each constant piece.
fn weak_residual(sol: &RiemannSolution, xc: f64, wx: f64, tc: f64, wt: f64) -> [f64; 3] {
    let cs = sol.closures();
    let mut out = [0.0; 3];
    let subs = 64;
    let (t0, t1) = (tc - wt, tc + wt);
    for k in 0..subs {
        let ta = t0 + (t1 - t0) * k as f64 / subs as f64;
        let tb = t0 + (t1 - t0) * (k + 1) as f64 / subs as f64;
        for (c, acc) in out.iter_mut().enumerate() {
            *acc += gauss(ta, tb, |t| {
                let (bt, dbt) = bump(t, tc, wt);
                let Wave1::Shock { speed, .. } = sol.wave1 else { unreachable!() };
                let mut cuts = vec![xc - wx, xc + wx, speed * t, sol.contact_speed * t];
                cuts.retain(|x| *x >= xc - wx && *x <= xc + wx);
                cuts.sort_by(f64::total_cmp);
                let mut acc = 0.0;
                for p in cuts.windows(2) {
                    if p[1] - p[0] <= 0.0 {
                        continue;
                    }
                    let (u, _) = sol.sample(t, 0.5 * (p[0] + p[1])).unwrap();
                    let cons = prim_to_cons(&u, cs).unwrap();
                    let uu = cons.to_array()[c];
                    let ff = flux_s3(&cons, cs).unwrap()[c];
                    acc += gauss(p[0], p[1], |x| {
                        let (ax, dax) = bump(x, xc, wx);
                        uu * ax * dbt + ff * dax * bt
                    });
                }
                acc
            });
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn intermediate_state_matches_newton(p in shock_problem()) {
        let (i, l, r) = p;
        let cs = pair(i);
        let sol = solve_riemann(&l, &r, &cs);
        prop_assume!(sol.is_ok());
        let sol = sol.unwrap();
        let Wave1::Shock { speed, rh_residual, lax } = sol.wave1 else { return Err(TestCaseError::fail("expected shock")) };
        prop_assert!(lax && rh_residual.iter().all(|r| r.abs() <= 1e-10));
        let (mid, s) = newton_rh(&l, r.v, &cs).expect("oracle converges");
        prop_assert!((mid.rho - sol.mid.rho).abs() <= 1e-9);
        prop_assert!((mid.h - sol.mid.h).abs() <= 1e-9);
        prop_assert!((s - speed).abs() <= 1e-9);
    }

    #[test]
    fn self_similarity(p in shock_problem(), q in rarefaction_problem(), x in -1.0f64..1.0, t in 0.05f64..2.0, k in 0.1f64..10.0) {
        for (i, l, r) in [p, q] {
            let cs = pair(i);
            let Ok(sol) = solve_riemann(&l, &r, &cs) else { continue };
            let (a, ra) = sol.sample(t, x).unwrap();
            let (b, rb) = sol.sample(k * t, k * x).unwrap();
            if ra == rb {
                prop_assert!(rel(a.rho, b.rho) <= 1e-12 && rel(a.v, b.v) <= 1e-12 && rel(a.h, b.h) <= 1e-12);
            } else {
                // only a hair from a wave edge
                let xi = x / t;
                let shock = match sol.wave1 { Wave1::Shock { speed, .. } => Some(speed), _ => None };
                let fan = sol.fan_edges(1.0);
                let edges = [fan.map(|e| e.0), fan.map(|e| e.1), shock, Some(sol.contact_speed)];
                prop_assert!(edges.iter().flatten().any(|e| (e - xi).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn fan_is_a_centered_rarefaction(p in rarefaction_problem(), frac in 0.0f64..1.0) {
        let (i, l, r) = p;
        let cs = pair(i);
        let Ok(sol) = solve_riemann(&l, &r, &cs) else { return Ok(()) };
        let Wave1::Rarefaction { xi_left, xi_right } = sol.wave1 else { return Err(TestCaseError::fail("expected rarefaction")) };
        let xi = xi_left + frac * (xi_right - xi_left);
        let (u, region) = sol.sample_xi(xi).unwrap();
        if region == Region::Fan {
            prop_assert!((lambda1(&u, &cs).unwrap() - xi).abs() <= 1e-10);
            let (o, f) = first_field_invariants(&u, &cs).unwrap();
            let (o0, f0) = first_field_invariants(&l, &cs).unwrap();
            prop_assert!((o - o0).abs() <= 1e-12 && (f - f0).abs() <= 1e-12);
        }
        prop_assert_eq!(sol.mid.v, r.v);
    }

    #[test]
    fn closed_form_curve_matches_ode(i in arb_pair_index(), u in arb_state(), sigma in -1.0f64..1.0) {
        let cs = pair(i);
        let curve = integrate_rarefaction_curve(&u, sigma, &cs);
        prop_assume!(curve.is_ok());
        let curve = curve.unwrap();
        let (s_end, ode) = curve.end();
        prop_assert_eq!(s_end, sigma);
        let exact = curve.closed_form(sigma).unwrap();
        prop_assert!((ode.rho - exact.rho).abs() <= 1e-8);
        prop_assert!((ode.v - exact.v).abs() <= 1e-8);
        prop_assert!((ode.h - exact.h).abs() <= 1e-8);
        prop_assert!(curve.invariant_drift().unwrap() <= 1e-9);
    }
}

#[test]
fn shock_solutions_are_weak_solutions() {
    let cases = [
        (PrimState::new(0.3, 0.5, 0.3), PrimState::new(0.7, 0.2, 0.7)),
        (PrimState::new(0.2, 0.6, 0.5), PrimState::new(0.5, 0.1, 0.2)),
    ];
    for i in 0..9 {
        let cs = pair(i);
        for (l, r) in &cases {
            let sol = solve_riemann(l, r, &cs).unwrap();
            assert!(matches!(sol.wave1, Wave1::Shock { .. }));
            for (xc, wx, tc, wt) in [(0.0, 0.3, 0.5, 0.3), (0.05, 0.15, 0.3, 0.2), (-0.1, 0.5, 1.0, 0.9)] {
                let res = weak_residual(&sol, xc, wx, tc, wt);
                assert!(res.iter().all(|x| x.abs() <= 1e-6), "pair {i} {res:?}");
            }
        }
    }
}

#[test]
fn wrong_shock_speed_breaks_weak_form() {
    let cs = pair(4);
    let mut sol = solve_riemann(&PrimState::new(0.3, 0.5, 0.3), &PrimState::new(0.7, 0.2, 0.7), &cs).unwrap();
    if let Wave1::Shock { speed, .. } = &mut sol.wave1 {
        *speed += 0.05;
    }
    let res = weak_residual(&sol, 0.0, 0.3, 0.5, 0.3);
    assert!(res[0].abs() > 1e-4);
}
