mod common;

use common::*;
use nalgebra::Matrix3;
use proptest::prelude::*;
use tomflow::state::{cons_to_prim, flux_s3, momentum_flux_expanded, prim_to_cons};
use tomflow::waves::{
    det3, diag, eigen_decomposition, genuine_nonlinearity, lambda1, mat_mul, quasilinear_matrix, Mat3,
};
use tomflow::{ClosureSet, PrimState};

fn scaled_diff(a: &Mat3, b: &Mat3) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((a[i][j] - b[i][j]).abs() / a[i][j].abs().max(b[i][j].abs()).max(1.0));
        }
    }
    worst
}

fn as_array(u: &PrimState) -> [f64; 3] {
    [u.rho, u.v, u.h]
}

fn jacobian(f: impl Fn([f64; 3]) -> [f64; 3], x: [f64; 3]) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    for k in 0..3 {
        let d = 1e-6 * x[k].abs().max(1e-2);
        let (mut p, mut n) = (x, x);
        p[k] += d;
        n[k] -= d;
        let (fp, fn_) = (f(p), f(n));
        for i in 0..3 {
            m[(i, k)] = (fp[i] - fn_[i]) / (2.0 * d);
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn prim_cons_round_trip(i in arb_pair_index(), u in arb_state()) {
        let cs = pair(i);
        let back = cons_to_prim(&prim_to_cons(&u, &cs).unwrap(), &cs).unwrap();
        prop_assert!(rel(back.rho, u.rho) <= 1e-12);
        prop_assert!(rel(back.v, u.v) <= 1e-12);
        prop_assert!(rel(back.h, u.h) <= 1e-12);
    }

    #[test]
    fn momentum_flux_identity(i in arb_pair_index(), u in arb_state()) {
        let cs = pair(i);
        let c = prim_to_cons(&u, &cs).unwrap();
        let direct = flux_s3(&c, &cs).unwrap()[1];
        prop_assert!(rel(direct, momentum_flux_expanded(&c, &cs).unwrap()) <= 1e-13);
    }

    #[test]
    fn eigen_identities(i in arb_pair_index(), u in arb_state()) {
        let cs = pair(i);
        let e = eigen_decomposition(&u, &cs).unwrap();
        let q = quasilinear_matrix(&u, &cs).unwrap();
        prop_assert!(scaled_diff(&mat_mul(&e.l, &q), &mat_mul(&diag(e.d), &e.l)) <= 1e-12);
        prop_assert!(scaled_diff(&mat_mul(&q, &e.r), &mat_mul(&e.r, &diag(e.d))) <= 1e-12);
        prop_assert!(det3(&e.r) != 0.0);
        prop_assert_eq!(e.lambda[0], lambda1(&u, &cs).unwrap());
        prop_assert_eq!((e.lambda[1], e.lambda[2]), (u.v, u.v));
    }

    #[test]
    fn quasilinear_matrix_matches_flux_jacobian(i in arb_pair_index(), u in arb_state()) {
        let cs = pair(i);
        let cons = |x: [f64; 3]| prim_to_cons(&PrimState::new(x[0], x[1], x[2]), &cs).unwrap().to_array();
        let flux = |x: [f64; 3]| flux_s3(&prim_to_cons(&PrimState::new(x[0], x[1], x[2]), &cs).unwrap(), &cs).unwrap();
        let x = as_array(&u);
        let oracle = jacobian(cons, x).try_inverse().unwrap() * jacobian(flux, x);
        let q = quasilinear_matrix(&u, &cs).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                prop_assert!((q[r][c] - oracle[(r, c)]).abs() <= 1e-5 * oracle[(r, c)].abs().max(1.0));
            }
        }
    }

    #[test]
    fn field_linearity(i in arb_pair_index(), u in arb_state()) {
        let cs = pair(i);
        let e = eigen_decomposition(&u, &cs).unwrap();
        let dir = |field: usize, lam: &dyn Fn(&PrimState) -> f64| {
            let r = e.right_eigenvector(field);
            let d = 1e-6;
            let at = |s: f64| PrimState::new(u.rho + s * r[0], u.v + s * r[1], u.h + s * r[2]);
            (lam(&at(d)) - lam(&at(-d))) / (2.0 * d)
        };
        let v_of = |w: &PrimState| w.v;
        prop_assert!(dir(2, &v_of).abs() < 1e-9);
        prop_assert!(dir(3, &v_of).abs() < 1e-9);
        let l1 = |w: &PrimState| lambda1(w, &cs).unwrap();
        let g = genuine_nonlinearity(&u, &cs).unwrap().field1;
        prop_assert!((dir(1, &l1) - g).abs() <= 1e-5 * g.abs().max(1.0));
    }
}

#[test]
fn linear_closure_field_one_is_nondegenerate() {
    let cs = ClosureSet::power(1.0, 1.0).unwrap();
    let g = genuine_nonlinearity(&PrimState::new(0.4, 0.1, 0.3), &cs).unwrap();
    assert!(g.field1 < 0.0);
    assert_eq!((g.field2, g.field3), (0.0, 0.0));
}
