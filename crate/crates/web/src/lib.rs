//! Browser bindings: exact Riemann profiles, the deviation from a linear fan
//! and the stability coefficients, all for power-law closures
//! `q(h) = h^a`, `h(ρ) = ρ^b`, `H(ρ) = ρ^c`.

use tomflow::analysis::{gamma_hc, mu_tom, subchar_tom};
use tomflow::riemann::delta_v;
use tomflow::waves::lambda1;
use tomflow::{solve_riemann, ClosureSet, PrimState, Region, ScalarClosure};
use wasm_bindgen::prelude::*;

fn closures(q_exp: f64, h_exp: f64, heq_exp: f64) -> Result<ClosureSet, String> {
    let heq = ScalarClosure::power(heq_exp, 1.0).map_err(|e| e.to_string())?;
    Ok(ClosureSet::power(q_exp, h_exp).map_err(|e| e.to_string())?.with_h_eq(heq))
}

fn region_code(r: Region) -> f64 {
    match r {
        Region::Left => 0.0,
        Region::Fan => 1.0,
        Region::Mid => 2.0,
        Region::Right => 3.0,
    }
}

/// Riemann data with `h` taken from the equilibrium `H(ρ)` on both sides.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy)]
pub struct Setup {
    pub q_exp: f64,
    pub h_exp: f64,
    pub heq_exp: f64,
    pub rho_left: f64,
    pub v_left: f64,
    pub rho_right: f64,
    pub v_right: f64,
}

#[wasm_bindgen]
impl Setup {
    #[wasm_bindgen(constructor)]
    pub fn new(q_exp: f64, h_exp: f64, heq_exp: f64, rho_left: f64, v_left: f64, rho_right: f64, v_right: f64) -> Self {
        Self {
            q_exp,
            h_exp,
            heq_exp,
            rho_left,
            v_left,
            rho_right,
            v_right,
        }
    }
}

impl Setup {
    fn solve(&self) -> Result<(ClosureSet, tomflow::RiemannSolution), String> {
        let cs = closures(self.q_exp, self.h_exp, self.heq_exp)?;
        let side = |rho: f64, v: f64| -> Result<PrimState, String> {
            let h = cs.h_eq().and_then(|he| he.eval(rho)).map_err(|e| e.to_string())?;
            Ok(PrimState::new(rho, v, h))
        };
        let (l, r) = (side(self.rho_left, self.v_left)?, side(self.rho_right, self.v_right)?);
        let sol = solve_riemann(&l, &r, &cs).map_err(|e| e.to_string())?;
        Ok((cs, sol))
    }
}

/// Sampled solution; `region` codes are 0 left, 1 fan, 2 middle, 3 right.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone, Default)]
pub struct Profile {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
    pub h: Vec<f64>,
    pub lambda1: Vec<f64>,
    pub region: Vec<f64>,
    pub summary: String,
}

pub fn riemann_profile_native(s: &Setup, t: f64, x_min: f64, x_max: f64, n: usize) -> Result<Profile, String> {
    if n < 2 || !(x_max > x_min) || !(t > 0.0) {
        return Err("need t > 0, x_min < x_max and at least 2 points".into());
    }
    let (cs, sol) = s.solve()?;
    let mut p = Profile::default();
    for k in 0..n {
        let x = x_min + (x_max - x_min) * k as f64 / (n - 1) as f64;
        let (u, region) = sol.sample(t, x).map_err(|e| e.to_string())?;
        p.x.push(x);
        p.rho.push(u.rho);
        p.v.push(u.v);
        p.h.push(u.h);
        p.lambda1.push(lambda1(&u, &cs).map_err(|e| e.to_string())?);
        p.region.push(region_code(region));
    }
    let m = sol.mid;
    let wave = match sol.wave1 {
        tomflow::Wave1::Rarefaction { xi_left, xi_right } => format!("rarefaction fan [{xi_left:.4}, {xi_right:.4}]"),
        tomflow::Wave1::Shock { speed, .. } => format!("shock at speed {speed:.4}"),
        tomflow::Wave1::None => "no first wave".into(),
    };
    p.summary = format!(
        "{wave}; middle state rho = {:.4}, v = {:.4}, h = {:.4}; contact at speed {:.4}",
        m.rho, m.v, m.h, sol.contact_speed
    );
    Ok(p)
}

#[wasm_bindgen]
pub fn riemann_profile(s: &Setup, t: f64, x_min: f64, x_max: f64, n: usize) -> Result<Profile, JsError> {
    riemann_profile_native(s, t, x_min, x_max, n).map_err(|e| JsError::new(&e))
}

/// `Δv` at `n` points across the fan, paired with the sample positions.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone, Default)]
pub struct Curve {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

pub fn delta_v_curve_native(s: &Setup, t: f64, n: usize) -> Result<Curve, String> {
    let (_, sol) = s.solve()?;
    let (a, b) = sol.fan_edges(t).ok_or("the first wave is not a rarefaction")?;
    let x: Vec<f64> = (1..=n).map(|k| a + (b - a) * k as f64 / (n + 1) as f64).collect();
    let y = delta_v(&sol, t, &x).map_err(|e| e.to_string())?;
    Ok(Curve { x, y })
}

#[wasm_bindgen]
pub fn delta_v_curve(s: &Setup, t: f64, n: usize) -> Result<Curve, JsError> {
    delta_v_curve_native(s, t, n).map_err(|e| JsError::new(&e))
}

/// Stability coefficients on a density grid for the velocity `v`.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone, Default)]
pub struct Stability {
    pub rho: Vec<f64>,
    pub mu: Vec<f64>,
    pub gamma: Vec<f64>,
    pub lam1_frozen: Vec<f64>,
    pub lam1_arz: Vec<f64>,
}

pub fn stability_curve_native(
    q_exp: f64,
    h_exp: f64,
    heq_exp: f64,
    v: f64,
    rho_min: f64,
    rho_max: f64,
    n: usize,
) -> Result<Stability, String> {
    if n < 2 || !(rho_min > 0.0 && rho_max > rho_min) {
        return Err("need 0 < rho_min < rho_max and at least 2 points".into());
    }
    let cs = closures(q_exp, h_exp, heq_exp)?;
    let mut out = Stability::default();
    for k in 0..n {
        let rho = rho_min + (rho_max - rho_min) * k as f64 / (n - 1) as f64;
        let sc = subchar_tom(rho, v, &cs).map_err(|e| e.to_string())?;
        out.rho.push(rho);
        out.mu.push(mu_tom(rho, &cs).map_err(|e| e.to_string())?);
        out.gamma.push(gamma_hc(rho, &cs).map_err(|e| e.to_string())?);
        out.lam1_frozen.push(sc.lam1_frozen);
        out.lam1_arz.push(sc.lam1_arz);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn stability_curve(
    q_exp: f64,
    h_exp: f64,
    heq_exp: f64,
    v: f64,
    rho_min: f64,
    rho_max: f64,
    n: usize,
) -> Result<Stability, JsError> {
    stability_curve_native(q_exp, h_exp, heq_exp, v, rho_min, rho_max, n).map_err(|e| JsError::new(&e))
}
