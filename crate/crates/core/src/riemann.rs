//! Exact Riemann solver.
//!
//! The system is of Temple class: shock and rarefaction curves of the first
//! field coincide, so the intermediate state follows from the 1-invariants
//! `ω = v + q(h)` and `h − h(ρ)` together with `v̄ = v_r` for both wave types.
//! The contact fields travel with speed `v_r`.

use crate::closures::ClosureSet;
use crate::error::{Result, TomError};
use crate::ode::{dormand_prince, AdaptiveTol};
use crate::state::{flux_s3, prim_to_cons, PrimState};
use crate::waves::{first_field_invariants, genuine_nonlinearity, lambda1};

const ROOT_TOL: f64 = 1e-13;
const ROOT_MAX_ITER: usize = 200;
const FAN_PROBES: usize = 64;
const SIGMA_CONSISTENCY_TOL: f64 = 1e-9;

/// First-field wave connecting `u_left` to the intermediate state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave1 {
    None,
    /// Fan between `xi_left = λ₁(u_ℓ)` and `xi_right = λ₁(ū)`.
    Rarefaction { xi_left: f64, xi_right: f64 },
    /// Discontinuity with speed `speed`; `rh_residual` holds the
    /// Rankine-Hugoniot defect per conserved component.
    Shock {
        speed: f64,
        rh_residual: [f64; 3],
        lax: bool,
    },
}

/// Region label of a sampled point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Left,
    Fan,
    Mid,
    Right,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::Left => "L",
            Region::Fan => "FAN",
            Region::Mid => "MID",
            Region::Right => "R",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RiemannSolution {
    pub left: PrimState,
    pub mid: PrimState,
    pub right: PrimState,
    pub wave1: Wave1,
    pub contact_speed: f64,
    /// Curve parameter of the intermediate state, rarefactions only.
    pub sigma_star: Option<f64>,
    closures: ClosureSet,
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-14 * a.abs().max(b.abs()).max(1.0)
}

pub fn intermediate_state(
    u_left: &PrimState,
    u_right: &PrimState,
    cs: &ClosureSet,
) -> Result<PrimState> {
    let (omega, phi) = first_field_invariants(u_left, cs)?;
    let offset = omega - u_right.v;
    let h_bar = cs.q.inverse(offset).map_err(|e| {
        TomError::Vacuum(format!(
            "omega_l - v_r = {offset} is outside the range of q ({e})"
        ))
    })?;
    let target = h_bar - phi;
    let rho_bar = cs.h.inverse(target).map_err(|e| {
        if target <= 0.0 {
            TomError::Vacuum(format!("intermediate hesitation {target} forces rho = 0"))
        } else {
            TomError::NoIntermediateState(e.to_string())
        }
    })?;
    Ok(PrimState::new(rho_bar, u_right.v, h_bar))
}

fn rh_residual(u_left: &PrimState, u_bar: &PrimState, s: f64, cs: &ClosureSet) -> Result<[f64; 3]> {
    let (ul, ub) = (prim_to_cons(u_left, cs)?, prim_to_cons(u_bar, cs)?);
    let (fl, fb) = (flux_s3(&ul, cs)?, flux_s3(&ub, cs)?);
    let (ul, ub) = (ul.to_array(), ub.to_array());
    let mut r = [0.0; 3];
    for k in 0..3 {
        r[k] = fl[k] - fb[k] - s * (ul[k] - ub[k]);
    }
    Ok(r)
}

pub fn classify_wave1(u_left: &PrimState, u_bar: &PrimState, cs: &ClosureSet) -> Result<Wave1> {
    let same_rho = nearly_equal(u_left.rho, u_bar.rho);
    if same_rho && nearly_equal(u_left.v, u_bar.v) && nearly_equal(u_left.h, u_bar.h) {
        return Ok(Wave1::None);
    }
    if same_rho {
        return Err(TomError::InconsistentState(format!(
            "equal densities {} with velocities {} and {}",
            u_left.rho, u_left.v, u_bar.v
        )));
    }
    let (xl, xb) = (lambda1(u_left, cs)?, lambda1(u_bar, cs)?);
    if xl <= xb {
        return Ok(Wave1::Rarefaction {
            xi_left: xl,
            xi_right: xb,
        });
    }
    let speed = (u_left.rho * u_left.v - u_bar.rho * u_bar.v) / (u_left.rho - u_bar.rho);
    Ok(Wave1::Shock {
        speed,
        rh_residual: rh_residual(u_left, u_bar, speed, cs)?,
        lax: xb < speed && speed < xl,
    })
}

/// State on the 1-curve through `u_left` at density `rho`.
fn curve_state(rho: f64, omega: f64, phi: f64, cs: &ClosureSet) -> Result<PrimState> {
    let h = cs.h.eval(rho)? + phi;
    Ok(PrimState::new(rho, omega - cs.q.eval(h)?, h))
}

/// Verifies that `λ₁` increases strictly from `u_left` to `u_bar` along the
/// 1-curve and that `∇λ₁·r₁ < 0` at the probe points.
pub fn check_fan_monotone(u_left: &PrimState, u_bar: &PrimState, cs: &ClosureSet) -> Result<()> {
    let (omega, phi) = first_field_invariants(u_left, cs)?;
    let mut prev = f64::NEG_INFINITY;
    for k in 0..=FAN_PROBES {
        let s = k as f64 / FAN_PROBES as f64;
        let rho = u_left.rho + s * (u_bar.rho - u_left.rho);
        let u = curve_state(rho, omega, phi, cs)?;
        let lam = lambda1(&u, cs)?;
        if lam < prev - 1e-14 * lam.abs().max(1.0) {
            return Err(TomError::DegenerateField(format!(
                "lambda1 decreases along the rarefaction curve near rho = {rho}"
            )));
        }
        prev = lam;
        if cs.q.has_d2() && cs.h.has_d2() {
            let g = genuine_nonlinearity(&u, cs)?.field1;
            if !(g < 0.0) {
                return Err(TomError::DegenerateField(format!(
                    "grad(lambda1).r1 = {g} >= 0 at rho = {rho}"
                )));
            }
        }
    }
    Ok(())
}

/// Fan state at similarity coordinate `xi ∈ [λ₁(u_ℓ), λ₁(ū)]`.
pub fn rarefaction_state_closed_form(
    u_left: &PrimState,
    u_bar: &PrimState,
    xi: f64,
    cs: &ClosureSet,
) -> Result<PrimState> {
    let (lo, hi) = (lambda1(u_left, cs)?, lambda1(u_bar, cs)?);
    let slack = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    if !(xi >= lo - slack && xi <= hi + slack) {
        return Err(TomError::OutOfFan { xi, lo, hi });
    }
    if xi <= lo {
        return Ok(*u_left);
    }
    if xi >= hi {
        return Ok(*u_bar);
    }
    let (omega, phi) = first_field_invariants(u_left, cs)?;
    let g = |rho: f64| -> Result<f64> { Ok(lambda1(&curve_state(rho, omega, phi, cs)?, cs)? - xi) };
    // g < 0 at the left end, g > 0 at the intermediate end
    let (mut a, mut b) = (u_left.rho, u_bar.rho);
    if g(a)? > 0.0 || g(b)? < 0.0 {
        return Err(TomError::DegenerateField(format!(
            "lambda1 is not monotone on the fan bracket at xi = {xi}"
        )));
    }
    for _ in 0..ROOT_MAX_ITER {
        let m = 0.5 * (a + b);
        if g(m)? < 0.0 {
            a = m;
        } else {
            b = m;
        }
        if (b - a).abs() <= ROOT_TOL * 1e-2 * m.abs().max(1.0) {
            break;
        }
    }
    curve_state(0.5 * (a + b), omega, phi, cs)
}

/// Numerically integrated 1-curve `σ ↦ I(σ; u₀)` with `∂_σ I = r₁(I)`.
#[derive(Debug, Clone)]
pub struct RarefactionCurve {
    pub anchor: PrimState,
    /// Accepted integrator nodes `(σ, state)`, starting at `(0, anchor)`.
    pub points: Vec<(f64, PrimState)>,
    closures: ClosureSet,
}

impl RarefactionCurve {
    pub fn end(&self) -> (f64, PrimState) {
        *self.points.last().expect("curve holds its anchor")
    }

    /// Closed-form parameterisation `ρ = ρ₀e^σ` with both 1-invariants fixed.
    pub fn closed_form(&self, sigma: f64) -> Result<PrimState> {
        let (omega, phi) = first_field_invariants(&self.anchor, &self.closures)?;
        curve_state(self.anchor.rho * sigma.exp(), omega, phi, &self.closures)
    }

    /// Largest drift of `(ω, h − h(ρ))` over the stored nodes.
    pub fn invariant_drift(&self) -> Result<f64> {
        let (o0, p0) = first_field_invariants(&self.anchor, &self.closures)?;
        let mut worst: f64 = 0.0;
        for (_, u) in &self.points {
            let (o, p) = first_field_invariants(u, &self.closures)?;
            worst = worst.max((o - o0).abs()).max((p - p0).abs());
        }
        Ok(worst)
    }
}

/// First right eigenvector `r₁ = (ρ, −q'(h)h'(ρ)ρ, h'(ρ)ρ)`.
pub fn r1(u: &PrimState, cs: &ClosureSet) -> Result<[f64; 3]> {
    let hr = cs.h.d1(u.rho)? * u.rho;
    Ok([u.rho, -cs.q.d1(u.h)? * hr, hr])
}

pub fn integrate_rarefaction_curve(
    u0: &PrimState,
    sigma_end: f64,
    cs: &ClosureSet,
) -> Result<RarefactionCurve> {
    integrate_rarefaction_curve_with(u0, sigma_end, cs, AdaptiveTol::default())
}

pub fn integrate_rarefaction_curve_with(
    u0: &PrimState,
    sigma_end: f64,
    cs: &ClosureSet,
    tol: AdaptiveTol,
) -> Result<RarefactionCurve> {
    if !sigma_end.is_finite() {
        return Err(TomError::InvalidParameter(format!("sigma_end = {sigma_end}")));
    }
    let mut points = vec![(0.0, *u0)];
    let mut rhs = |_s: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let r = r1(&PrimState::new(y[0], y[1], y[2]), cs)?;
        dy.copy_from_slice(&r);
        Ok(())
    };
    dormand_prince(&mut rhs, 0.0, &[u0.rho, u0.v, u0.h], sigma_end, tol, |s, y| {
        points.push((s, PrimState::new(y[0], y[1], y[2])));
    })?;
    Ok(RarefactionCurve {
        anchor: *u0,
        points,
        closures: cs.clone(),
    })
}

pub fn solve_riemann(
    u_left: &PrimState,
    u_right: &PrimState,
    cs: &ClosureSet,
) -> Result<RiemannSolution> {
    let mid = intermediate_state(u_left, u_right, cs)?;
    let wave1 = classify_wave1(u_left, &mid, cs)?;
    let mut sigma_star = None;
    if let Wave1::Rarefaction { .. } = wave1 {
        check_fan_monotone(u_left, &mid, cs)?;
        // sigma from the density/hesitation component, checked on the velocity one
        let sigma = (mid.rho / u_left.rho).ln();
        let (omega, phi) = first_field_invariants(u_left, cs)?;
        let on_curve = curve_state(u_left.rho * sigma.exp(), omega, phi, cs)?;
        let defect = (on_curve.v - mid.v).abs().max((on_curve.h - mid.h).abs());
        if defect > SIGMA_CONSISTENCY_TOL {
            return Err(TomError::InconsistentState(format!(
                "curve components disagree at sigma* = {sigma}: defect {defect}"
            )));
        }
        sigma_star = Some(sigma);
    }
    Ok(RiemannSolution {
        left: *u_left,
        mid,
        right: *u_right,
        wave1,
        contact_speed: u_right.v,
        sigma_star,
        closures: cs.clone(),
    })
}

impl RiemannSolution {
    pub fn closures(&self) -> &ClosureSet {
        &self.closures
    }

    pub fn has_contact(&self) -> bool {
        !(nearly_equal(self.mid.rho, self.right.rho) && nearly_equal(self.mid.h, self.right.h))
    }

    /// Solution at similarity coordinate `ξ = x/t`.
    pub fn sample_xi(&self, xi: f64) -> Result<(PrimState, Region)> {
        let contact = self.contact_speed;
        match self.wave1 {
            Wave1::Rarefaction { xi_left, xi_right } => {
                if xi < xi_left {
                    Ok((self.left, Region::Left))
                } else if xi < xi_right {
                    let u = rarefaction_state_closed_form(&self.left, &self.mid, xi, &self.closures)?;
                    Ok((u, Region::Fan))
                } else if xi < contact {
                    Ok((self.mid, Region::Mid))
                } else {
                    Ok((self.right, Region::Right))
                }
            }
            Wave1::Shock { speed, .. } => {
                if xi < speed {
                    Ok((self.left, Region::Left))
                } else if xi < contact {
                    Ok((self.mid, Region::Mid))
                } else {
                    Ok((self.right, Region::Right))
                }
            }
            Wave1::None => {
                if xi < contact {
                    Ok((self.left, Region::Left))
                } else {
                    Ok((self.right, Region::Right))
                }
            }
        }
    }

    /// Solution at `(t, x)` for the jump located at `x = 0`.
    pub fn sample(&self, t: f64, x: f64) -> Result<(PrimState, Region)> {
        if t <= 0.0 {
            return Ok(if x < 0.0 {
                (self.left, Region::Left)
            } else {
                (self.right, Region::Right)
            });
        }
        self.sample_xi(x / t)
    }

    pub fn sample_many(&self, t: f64, xs: &[f64]) -> Result<Vec<(PrimState, Region)>> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            xs.par_iter().map(|&x| self.sample(t, x)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            xs.iter().map(|&x| self.sample(t, x)).collect()
        }
    }

    /// Fan edges `(t λ₁(u_ℓ), t λ₁(ū))`.
    pub fn fan_edges(&self, t: f64) -> Option<(f64, f64)> {
        match self.wave1 {
            Wave1::Rarefaction { xi_left, xi_right } => Some((t * xi_left, t * xi_right)),
            _ => None,
        }
    }

    /// Velocity of the ARZ-type linear interpolation across the fan.
    pub fn linear_fan_velocity(&self, t: f64, x: f64) -> Result<f64> {
        let (a, b) = self
            .fan_edges(t)
            .ok_or_else(|| TomError::NotApplicable("first wave is not a rarefaction".into()))?;
        Ok(self.left.v + (x - a) / (b - a) * (self.mid.v - self.left.v))
    }
}

/// `Δv(t, x) = v(t, x) − v^{AR}(t, x)` at points inside the fan.
pub fn delta_v(sol: &RiemannSolution, t: f64, xs: &[f64]) -> Result<Vec<f64>> {
    let (a, b) = sol
        .fan_edges(t)
        .ok_or_else(|| TomError::NotApplicable("first wave is not a rarefaction".into()))?;
    if !(t > 0.0) {
        return Err(TomError::InvalidParameter(format!("t = {t}")));
    }
    xs.iter()
        .map(|&x| {
            let slack = 1e-12 * (b - a).abs().max(1e-300);
            if x < a - slack || x > b + slack {
                return Err(TomError::OutOfFan { xi: x / t, lo: a / t, hi: b / t });
            }
            let u = rarefaction_state_closed_form(&sol.left, &sol.mid, (x / t).clamp(a / t, b / t), &sol.closures)?;
            Ok(u.v - sol.linear_fan_velocity(t, x)?)
        })
        .collect()
}
