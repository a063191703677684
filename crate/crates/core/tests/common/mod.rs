#![allow(dead_code)]

use proptest::prelude::*;
use tomflow::{ClosureSet, PrimState, ScalarClosure};

pub const EXPONENTS: [f64; 3] = [0.5, 1.0, 2.0];

/// The nine built-in pairs `q = h^a`, `h(ρ) = ρ^b`.
pub fn power_pairs() -> Vec<(f64, f64, ClosureSet)> {
    let mut out = Vec::new();
    for a in EXPONENTS {
        for b in EXPONENTS {
            out.push((a, b, ClosureSet::power(a, b).unwrap()));
        }
    }
    out
}

pub fn pair(i: usize) -> ClosureSet {
    let (a, b) = (EXPONENTS[i / 3], EXPONENTS[i % 3]);
    ClosureSet::power(a, b).unwrap()
}

pub fn pw(exp: f64, coeff: f64) -> ScalarClosure {
    ScalarClosure::power(exp, coeff).unwrap()
}

pub fn arb_pair_index() -> impl Strategy<Value = usize> {
    0usize..9
}

pub fn arb_state() -> impl Strategy<Value = PrimState> {
    (0.05f64..1.0, -1.0f64..1.0, 0.05f64..2.0).prop_map(|(r, v, h)| PrimState::new(r, v, h))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn fd1(f: impl Fn(f64) -> f64, x: f64, d: f64) -> f64 {
    (f(x + d) - f(x - d)) / (2.0 * d)
}

use nalgebra::{Matrix3, Vector3};
use tomflow::state::{flux_s3, prim_to_cons};

/// Independent Rankine-Hugoniot solve across the first wave: unknowns
/// `(ρ̄, h̄, s)` with `v̄ = v_r`, damped Newton on a finite-difference Jacobian.
pub fn newton_rh(left: &PrimState, v_right: f64, cs: &ClosureSet) -> Option<(PrimState, f64)> {
    let ul = prim_to_cons(left, cs).ok()?.to_array();
    let fl = flux_s3(&prim_to_cons(left, cs).ok()?, cs).ok()?;
    let residual = |x: &Vector3<f64>| -> Option<Vector3<f64>> {
        let c = prim_to_cons(&PrimState::new(x[0], v_right, x[1]), cs).ok()?;
        let (u, f) = (c.to_array(), flux_s3(&c, cs).ok()?);
        Some(Vector3::from_fn(|i, _| f[i] - fl[i] - x[2] * (u[i] - ul[i])))
    };
    let ks = [1.1, 1.5, 2.5, 4.0, 7.0];
    let starts = ks.iter().flat_map(|&a| ks.iter().map(move |&b| (a, b)));
    let attempt = |kr: f64, kh: f64| -> Option<Vector3<f64>> {
        let mut x = Vector3::new(left.rho * kr, left.h * kh, 0.5 * (left.v + v_right));
        for _ in 0..200 {
            let r = residual(&x)?;
            if r.amax() < 1e-14 {
                break;
            }
            let mut j = Matrix3::zeros();
            for k in 0..3 {
                let d = 1e-7 * x[k].abs().max(1e-3);
                let mut p = x;
                let mut m = x;
                p[k] += d;
                m[k] -= d;
                let col = (residual(&p)? - residual(&m)?) / (2.0 * d);
                j.set_column(k, &col);
            }
            let step = j.lu().solve(&r)?;
            let mut lam = 1.0;
            loop {
                let cand = x - step * lam;
                let better = cand[0] > 0.0
                    && cand[1] > 0.0
                    && residual(&cand).is_some_and(|rc| rc.amax() < r.amax());
                if better || lam < 1e-4 {
                    x = cand;
                    break;
                }
                lam *= 0.5;
            }
        }
        Some(x)
    };
    for (kr, kh) in starts {
        let Some(x) = attempt(kr, kh) else { continue };
        if residual(&x).is_some_and(|r| r.amax() < 1e-12) && (x[0] - left.rho).abs() > 1e-8 {
            return Some((PrimState::new(x[0], v_right, x[1]), x[2]));
        }
    }
    None
}
