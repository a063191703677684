//! Finite-volume solvers: the conservative three-equation system with stiff
//! relaxation sources, the 2×2 ARZ system and the scalar LWR equation.
//!
//! All schemes are first order. Fluxes are Rusanov with the local speed
//! `max(|λ₁|, |v|)`; sources enter through Strang splitting and are integrated
//! exactly per cell.

use crate::closures::ClosureSet;
use crate::error::{Result, TomError};
use crate::riemann::RiemannSolution;
use crate::state::{cons_to_prim, flux_s3, prim_to_cons, ConsState, PrimState};
use crate::waves::{entropy_pair, EntropyGenerator, EntropyPair};

/// Largest admissible Courant number after a step.
pub const CFL_MAX: f64 = 1.0;
const MAX_RETRIES: usize = 8;
/// Magnitude beyond which a run counts as blown up.
pub const BLOWUP_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ghost {
    #[default]
    Outflow,
    Periodic,
}

fn neighbors(n: usize, ghost: Ghost) -> (usize, usize) {
    match ghost {
        Ghost::Outflow => (0, n - 1),
        Ghost::Periodic => (n - 1, 0),
    }
}

/// Cell centers of a uniform grid on `[a, b]`.
pub fn cell_centers(a: f64, b: f64, n: usize) -> Vec<f64> {
    let dx = (b - a) / n as f64;
    (0..n).map(|i| a + (i as f64 + 0.5) * dx).collect()
}

fn check_grid(a: f64, b: f64, n: usize) -> Result<()> {
    if !(b > a) || n < 2 {
        return Err(TomError::InvalidParameter(format!(
            "grid needs b > a and at least two cells, got [{a}, {b}] with {n}"
        )));
    }
    Ok(())
}

fn check_cfl(cfl: f64) -> Result<()> {
    if !(cfl > 0.0 && cfl < 1.0) {
        return Err(TomError::InvalidParameter(format!("cfl = {cfl} not in (0, 1)")));
    }
    Ok(())
}

fn rusanov(fl: [f64; 3], fr: [f64; 3], ul: [f64; 3], ur: [f64; 3], alpha: f64) -> [f64; 3] {
    let mut f = [0.0; 3];
    for k in 0..3 {
        f[k] = 0.5 * (fl[k] + fr[k]) - 0.5 * alpha * (ur[k] - ul[k]);
    }
    f
}

#[derive(Debug, Clone, PartialEq)]
pub struct FvField {
    pub x_left: f64,
    pub dx: f64,
    pub cells: Vec<ConsState>,
    pub t: f64,
    pub ghost: Ghost,
}

impl FvField {
    /// Samples `init` at the cell centers of `[a, b]`.
    pub fn from_prim_fn(
        a: f64,
        b: f64,
        n: usize,
        ghost: Ghost,
        cs: &ClosureSet,
        init: impl Fn(f64) -> PrimState,
    ) -> Result<Self> {
        Self::try_from_prim_fn(a, b, n, ghost, cs, |x| Ok(init(x)))
    }

    pub fn try_from_prim_fn(
        a: f64,
        b: f64,
        n: usize,
        ghost: Ghost,
        cs: &ClosureSet,
        init: impl Fn(f64) -> Result<PrimState>,
    ) -> Result<Self> {
        check_grid(a, b, n)?;
        let cells = cell_centers(a, b, n)
            .into_iter()
            .map(|x| prim_to_cons(&init(x)?, cs))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            x_left: a,
            dx: (b - a) / n as f64,
            cells,
            t: 0.0,
            ghost,
        })
    }

    /// Riemann data with the jump at `x0`.
    pub fn riemann(
        a: f64,
        b: f64,
        n: usize,
        x0: f64,
        left: &PrimState,
        right: &PrimState,
        cs: &ClosureSet,
    ) -> Result<Self> {
        Self::from_prim_fn(a, b, n, Ghost::Outflow, cs, |x| if x < x0 { *left } else { *right })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn x_right(&self) -> f64 {
        self.x_left + self.dx * self.len() as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        cell_centers(self.x_left, self.x_right(), self.len())
    }

    pub fn prims(&self, cs: &ClosureSet) -> Result<Vec<PrimState>> {
        self.cells.iter().map(|u| cons_to_prim(u, cs)).collect()
    }

    /// `(∑ρΔx, ∑zΔx, ∑wΔx)`.
    pub fn totals(&self) -> [f64; 3] {
        let mut t = [0.0; 3];
        for u in &self.cells {
            for (k, c) in u.to_array().iter().enumerate() {
                t[k] += c * self.dx;
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.cells
            .iter()
            .flat_map(|u| u.to_array())
            .fold(0.0, |m, c| if c.is_nan() { f64::INFINITY } else { m.max(c.abs()) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelaxationVariant {
    #[default]
    None,
    /// `w` relaxes to `W(ρ) = ρ(H(ρ) − h(ρ))`.
    WToW,
    /// `z` gains `ρ(V_eq(ρ) − v)/ε`.
    ZArz,
    /// `z` gains `ρ(V_C(ρ, h) − v)/ε`.
    ZVc,
}

/// Sign of the `w` relaxation, see [`RelaxationConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceSign {
    /// `∂_t w = −(W(ρ) − w)/ε`; deviations from `W` grow.
    #[default]
    Paper,
    /// `∂_t w = (W(ρ) − w)/ε`; deviations decay.
    Dissipative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationConfig {
    pub variant: RelaxationVariant,
    pub eps: f64,
    pub source_sign: SourceSign,
}

impl RelaxationConfig {
    pub fn none() -> Self {
        Self {
            variant: RelaxationVariant::None,
            eps: 1.0,
            source_sign: SourceSign::Paper,
        }
    }

    pub fn new(variant: RelaxationVariant, eps: f64, source_sign: SourceSign) -> Result<Self> {
        let rc = Self {
            variant,
            eps,
            source_sign,
        };
        rc.validate()?;
        Ok(rc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.variant != RelaxationVariant::None && !(self.eps > 0.0) {
            return Err(TomError::InvalidParameter(format!("eps = {} must be positive", self.eps)));
        }
        Ok(())
    }
}

/// Characteristic speed bound `max(|λ₁|, |v|)` of a cell.
pub fn local_speed(u: &PrimState, cs: &ClosureSet) -> Result<f64> {
    let l1 = crate::waves::lambda1(u, cs)?;
    Ok(l1.abs().max(u.v.abs()))
}

fn speeds(prims: &[PrimState], cs: &ClosureSet) -> Result<Vec<f64>> {
    prims.iter().map(|u| local_speed(u, cs)).collect()
}

/// Stable step `cfl Δx / max speed`.
pub fn stable_dt(f: &FvField, cs: &ClosureSet, cfl: f64) -> Result<f64> {
    let prims = f.prims(cs)?;
    let smax = speeds(&prims, cs)?.into_iter().fold(0.0, f64::max);
    Ok(if smax > 0.0 { cfl * f.dx / smax } else { f64::INFINITY })
}

/// Interface fluxes and the per-interface Rusanov speed, `n + 1` entries.
fn interface_fluxes(f: &FvField, cs: &ClosureSet) -> Result<(Vec<[f64; 3]>, Vec<f64>)> {
    let n = f.len();
    let prims = f.prims(cs)?;
    let sp = speeds(&prims, cs)?;
    let fl: Vec<[f64; 3]> = f.cells.iter().map(|u| flux_s3(u, cs)).collect::<Result<_>>()?;
    let (lg, rg) = neighbors(n, f.ghost);
    let idx = |j: isize| -> usize {
        if j < 0 {
            lg
        } else if j as usize >= n {
            rg
        } else {
            j as usize
        }
    };
    let mut flux = Vec::with_capacity(n + 1);
    let mut alpha = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let (l, r) = (idx(j as isize - 1), idx(j as isize));
        let a = sp[l].max(sp[r]);
        flux.push(rusanov(fl[l], fl[r], f.cells[l].to_array(), f.cells[r].to_array(), a));
        alpha.push(a);
    }
    Ok((flux, alpha))
}

/// Homogeneous Rusanov update over `dt`.
pub fn hyperbolic_step(f: &FvField, cs: &ClosureSet, dt: f64) -> Result<FvField> {
    let (flux, _) = interface_fluxes(f, cs)?;
    let r = dt / f.dx;
    let cells = (0..f.len())
        .map(|i| {
            let u = f.cells[i].to_array();
            let mut out = [0.0; 3];
            for k in 0..3 {
                out[k] = u[k] - r * (flux[i + 1][k] - flux[i][k]);
            }
            ConsState::from_array(out)
        })
        .collect();
    Ok(FvField {
        cells,
        t: f.t + dt,
        ..f.clone()
    })
}

/// Exact solution of the cell relaxation ODE over `dt` at frozen ρ.
pub fn relax_cell(u: &ConsState, cs: &ClosureSet, rc: &RelaxationConfig, dt: f64) -> Result<ConsState> {
    let rho = u.rho;
    match rc.variant {
        RelaxationVariant::None => Ok(*u),
        RelaxationVariant::WToW => {
            let target = cs.w_eq(rho)?;
            let decay = match rc.source_sign {
                SourceSign::Paper => (dt / rc.eps).exp(),
                SourceSign::Dissipative => (-dt / rc.eps).exp(),
            };
            Ok(ConsState::new(rho, u.z, target + (u.w - target) * decay))
        }
        RelaxationVariant::ZArz | RelaxationVariant::ZVc => {
            let p = cons_to_prim(u, cs)?;
            let target = match rc.variant {
                RelaxationVariant::ZArz => cs.v_eq()?.eval(rho)?,
                _ => cs.vc()?.eval(rho, p.h),
            };
            let v = target + (p.v - target) * (-dt / rc.eps).exp();
            Ok(ConsState::new(rho, rho * (v + cs.q.eval(p.h)?), u.w))
        }
    }
}

fn relax_field(f: &mut FvField, cs: &ClosureSet, rc: &RelaxationConfig, dt: f64) -> Result<()> {
    if rc.variant == RelaxationVariant::None {
        return Ok(());
    }
    for u in f.cells.iter_mut() {
        *u = relax_cell(u, cs, rc, dt)?;
    }
    Ok(())
}

fn admissible(f: &FvField, cs: &ClosureSet, dt: f64) -> Result<()> {
    for (i, u) in f.cells.iter().enumerate() {
        if !(u.rho > 0.0) {
            return Err(TomError::Positivity { cell: i, rho: u.rho });
        }
    }
    let prims = f.prims(cs)?;
    let smax = speeds(&prims, cs)?.into_iter().fold(0.0, f64::max);
    let courant = smax * dt / f.dx;
    if !(courant <= CFL_MAX) {
        return Err(TomError::Cfl(format!("Courant number {courant} after step")));
    }
    Ok(())
}

fn try_step(f: &FvField, cs: &ClosureSet, rc: &RelaxationConfig, dt: f64) -> Result<FvField> {
    let mut g = f.clone();
    relax_field(&mut g, cs, rc, 0.5 * dt)?;
    let mut g = hyperbolic_step(&g, cs, dt)?;
    relax_field(&mut g, cs, rc, 0.5 * dt)?;
    admissible(&g, cs, dt)?;
    Ok(g)
}

/// One Strang-split step with `dt = min(cfl Δx / max speed, dt_max)`.
/// A failed step is retried with halved `dt`. Returns the new field and the
/// step actually taken.
pub fn fv_step_capped(
    f: &FvField,
    cs: &ClosureSet,
    rc: &RelaxationConfig,
    cfl: f64,
    dt_max: f64,
) -> Result<(FvField, f64)> {
    check_cfl(cfl)?;
    rc.validate()?;
    let mut dt = stable_dt(f, cs, cfl)?.min(dt_max);
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(TomError::Cfl(format!("no finite time step (dt = {dt})")));
    }
    let mut last = None;
    for _ in 0..=MAX_RETRIES {
        match try_step(f, cs, rc, dt) {
            Ok(g) => return Ok((g, dt)),
            Err(e) => {
                log::debug!("step at t = {} with dt = {dt} failed: {e}", f.t);
                last = Some(e);
                dt *= 0.5;
            }
        }
    }
    Err(last.expect("at least one attempt"))
}

pub fn fv_step(f: &FvField, cs: &ClosureSet, rc: &RelaxationConfig, cfl: f64) -> Result<FvField> {
    Ok(fv_step_capped(f, cs, rc, cfl, f64::INFINITY)?.0)
}

/// Marches to `t_final`, landing on it exactly. `observe` sees every accepted
/// field and may abort the run.
pub fn evolve_with<O>(
    f: &FvField,
    cs: &ClosureSet,
    rc: &RelaxationConfig,
    cfl: f64,
    t_final: f64,
    mut observe: O,
) -> Result<FvField>
where
    O: FnMut(&FvField) -> Result<()>,
{
    let mut g = f.clone();
    while g.t < t_final {
        let remaining = t_final - g.t;
        let (next, dt) = fv_step_capped(&g, cs, rc, cfl, remaining)?;
        g = next;
        if dt >= remaining {
            g.t = t_final;
        }
        observe(&g)?;
    }
    Ok(g)
}

pub fn evolve(f: &FvField, cs: &ClosureSet, rc: &RelaxationConfig, cfl: f64, t_final: f64) -> Result<FvField> {
    evolve_with(f, cs, rc, cfl, t_final, |_| Ok(()))
}

/// Snapshots at each of the sorted `times`.
pub fn evolve_snapshots(
    f: &FvField,
    cs: &ClosureSet,
    rc: &RelaxationConfig,
    cfl: f64,
    times: &[f64],
) -> Result<Vec<FvField>> {
    let mut out = Vec::with_capacity(times.len());
    let mut g = f.clone();
    for &t in times {
        g = evolve(&g, cs, rc, cfl, t)?;
        out.push(g.clone());
    }
    Ok(out)
}

/// Cell-wise numerical entropy production of one homogeneous Rusanov step,
/// using the numerical entropy flux `½(ψ_L + ψ_R) − ½α(η_R − η_L)`.
pub fn entropy_production(
    before: &FvField,
    after: &FvField,
    cs: &ClosureSet,
    gen: &EntropyGenerator,
) -> Result<Vec<f64>> {
    let dt = after.t - before.t;
    if !(dt > 0.0) || before.len() != after.len() {
        return Err(TomError::Shape("entropy production needs consecutive snapshots".into()));
    }
    let n = before.len();
    let pairs = |f: &FvField| -> Result<Vec<EntropyPair>> {
        f.prims(cs)?.iter().map(|u| entropy_pair(u, gen, cs)).collect()
    };
    let (p0, p1) = (pairs(before)?, pairs(after)?);
    let (_, alpha) = interface_fluxes(before, cs)?;
    let (lg, rg) = neighbors(n, before.ghost);
    let at = |j: isize| -> usize {
        if j < 0 {
            lg
        } else if j as usize >= n {
            rg
        } else {
            j as usize
        }
    };
    let num_flux: Vec<f64> = (0..=n)
        .map(|j| {
            let (l, r) = (at(j as isize - 1), at(j as isize));
            0.5 * (p0[l].psi + p0[r].psi) - 0.5 * alpha[j] * (p0[r].eta - p0[l].eta)
        })
        .collect();
    Ok((0..n)
        .map(|i| (p1[i].eta - p0[i].eta) / dt + (num_flux[i + 1] - num_flux[i]) / before.dx)
        .collect())
}

/// L1 distance `∑|a − b|Δx`.
pub fn l1_distance(a: &[f64], b: &[f64], dx: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * dx
}

const EXACT_SUBSAMPLES: usize = 16;

/// L1 distance of `(ρ, v, h)` to cell averages of an exact Riemann solution
/// whose jump sits at `x0`.
pub fn l1_against_riemann(
    f: &FvField,
    sol: &RiemannSolution,
    x0: f64,
    cs: &ClosureSet,
) -> Result<[f64; 3]> {
    let prims = f.prims(cs)?;
    let mut err = [0.0; 3];
    for (i, u) in prims.iter().enumerate() {
        let a = f.x_left + i as f64 * f.dx;
        let mut avg = [0.0; 3];
        for k in 0..EXACT_SUBSAMPLES {
            let x = a + f.dx * (k as f64 + 0.5) / EXACT_SUBSAMPLES as f64;
            let (e, _) = sol.sample(f.t, x - x0)?;
            avg[0] += e.rho;
            avg[1] += e.v;
            avg[2] += e.h;
        }
        let got = [u.rho, u.v, u.h];
        for k in 0..3 {
            err[k] += (got[k] - avg[k] / EXACT_SUBSAMPLES as f64).abs() * f.dx;
        }
    }
    Ok(err)
}

/// Two-equation ARZ field in `(ρ, y = ρ(v + P(ρ)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArzField {
    pub x_left: f64,
    pub dx: f64,
    pub rho: Vec<f64>,
    pub y: Vec<f64>,
    pub t: f64,
    pub ghost: Ghost,
}

impl ArzField {
    pub fn from_prim_fn(
        a: f64,
        b: f64,
        n: usize,
        ghost: Ghost,
        cs: &ClosureSet,
        init: impl Fn(f64) -> (f64, f64),
    ) -> Result<Self> {
        check_grid(a, b, n)?;
        let (mut rho, mut y) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for x in cell_centers(a, b, n) {
            let (r, v) = init(x);
            rho.push(r);
            y.push(r * (v + cs.p(r)?));
        }
        Ok(Self {
            x_left: a,
            dx: (b - a) / n as f64,
            rho,
            y,
            t: 0.0,
            ghost,
        })
    }

    pub fn velocity(&self, cs: &ClosureSet) -> Result<Vec<f64>> {
        self.rho
            .iter()
            .zip(&self.y)
            .map(|(&r, &y)| {
                if !(r > 0.0) {
                    return Err(TomError::Vacuum(format!("ARZ cell density {r}")));
                }
                Ok(y / r - cs.p(r)?)
            })
            .collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        cell_centers(self.x_left, self.x_left + self.dx * self.rho.len() as f64, self.rho.len())
    }
}

fn arz_step(f: &ArzField, cs: &ClosureSet, eps: Option<f64>, cfl: f64, dt_max: f64) -> Result<(ArzField, f64)> {
    let n = f.rho.len();
    let v = f.velocity(cs)?;
    let sp: Vec<f64> = (0..n)
        .map(|i| Ok((v[i] - f.rho[i] * cs.p_d1(f.rho[i])?).abs().max(v[i].abs())))
        .collect::<Result<_>>()?;
    let smax = sp.iter().copied().fold(0.0, f64::max);
    let mut dt = if smax > 0.0 { cfl * f.dx / smax } else { f64::INFINITY };
    dt = dt.min(dt_max);
    let relax = |rho: &mut [f64], y: &mut [f64], tau: f64| -> Result<()> {
        let Some(eps) = eps else { return Ok(()) };
        let v_eq = cs.v_eq()?;
        for i in 0..rho.len() {
            let p = cs.p(rho[i])?;
            let v0 = y[i] / rho[i] - p;
            let target = v_eq.eval(rho[i])?;
            y[i] = rho[i] * (target + (v0 - target) * (-tau / eps).exp() + p);
        }
        Ok(())
    };
    let (mut rho, mut y) = (f.rho.clone(), f.y.clone());
    relax(&mut rho, &mut y, 0.5 * dt)?;
    let vv: Vec<f64> = (0..n).map(|i| Ok(y[i] / rho[i] - cs.p(rho[i])?)).collect::<Result<_>>()?;
    let (lg, rg) = neighbors(n, f.ghost);
    let at = |j: isize| if j < 0 { lg } else if j as usize >= n { rg } else { j as usize };
    let mut flux = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let (l, r) = (at(j as isize - 1), at(j as isize));
        let a = sp[l].max(sp[r]);
        let fl = [rho[l] * vv[l], y[l] * vv[l], 0.0];
        let fr = [rho[r] * vv[r], y[r] * vv[r], 0.0];
        flux.push(rusanov(fl, fr, [rho[l], y[l], 0.0], [rho[r], y[r], 0.0], a));
    }
    let ratio = dt / f.dx;
    let mut nr: Vec<f64> = (0..n).map(|i| rho[i] - ratio * (flux[i + 1][0] - flux[i][0])).collect();
    let mut ny: Vec<f64> = (0..n).map(|i| y[i] - ratio * (flux[i + 1][1] - flux[i][1])).collect();
    for (i, &r) in nr.iter().enumerate() {
        if !(r > 0.0) {
            return Err(TomError::Positivity { cell: i, rho: r });
        }
    }
    relax(&mut nr, &mut ny, 0.5 * dt)?;
    Ok((
        ArzField {
            rho: nr,
            y: ny,
            t: f.t + dt,
            ..f.clone()
        },
        dt,
    ))
}

/// ARZ with optional velocity relaxation `ρ(V_eq(ρ) − v)/ε`; `eps = None`
/// switches the source off.
pub fn solve_arz_reference(
    init: &ArzField,
    cs: &ClosureSet,
    eps: Option<f64>,
    t_final: f64,
    cfl: f64,
) -> Result<ArzField> {
    check_cfl(cfl)?;
    if let Some(e) = eps {
        if !(e > 0.0) {
            return Err(TomError::InvalidParameter(format!("eps = {e}")));
        }
    }
    let mut f = init.clone();
    while f.t < t_final {
        let remaining = t_final - f.t;
        let (g, dt) = arz_step(&f, cs, eps, cfl, remaining)?;
        f = g;
        if dt >= remaining {
            f.t = t_final;
        }
    }
    Ok(f)
}

/// Scalar density field for `∂_t ρ + ∂_x(ρ V_eq(ρ)) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LwrField {
    pub x_left: f64,
    pub dx: f64,
    pub rho: Vec<f64>,
    pub t: f64,
    pub ghost: Ghost,
}

impl LwrField {
    pub fn from_fn(a: f64, b: f64, n: usize, ghost: Ghost, init: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid(a, b, n)?;
        Ok(Self {
            x_left: a,
            dx: (b - a) / n as f64,
            rho: cell_centers(a, b, n).into_iter().map(init).collect(),
            t: 0.0,
            ghost,
        })
    }

    pub fn centers(&self) -> Vec<f64> {
        cell_centers(self.x_left, self.x_left + self.dx * self.rho.len() as f64, self.rho.len())
    }
}

/// Godunov flux of a concave flux via demand and supply around the maximiser.
fn godunov_flux(f: &dyn Fn(f64) -> f64, rho_star: f64, l: f64, r: f64) -> f64 {
    let demand = if l < rho_star { f(l) } else { f(rho_star) };
    let supply = if r < rho_star { f(rho_star) } else { f(r) };
    demand.min(supply)
}

fn argmax_concave(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if f(c) < f(d) {
            a = c;
        } else {
            b = d;
        }
        if b - a < 1e-14 {
            break;
        }
    }
    0.5 * (a + b)
}

/// Godunov scheme for the LWR equation with concave flux `ρV_eq(ρ)` on
/// `[0, rho_max]`.
pub fn solve_lwr_reference(
    init: &LwrField,
    cs: &ClosureSet,
    t_final: f64,
    cfl: f64,
    rho_max: f64,
) -> Result<LwrField> {
    check_cfl(cfl)?;
    let v_eq = cs.v_eq()?;
    let flux = |r: f64| r * v_eq.eval(r).unwrap_or(f64::NAN);
    let flux_dyn: &dyn Fn(f64) -> f64 = &flux;
    let rho_star = argmax_concave(flux_dyn, 0.0, rho_max);
    let n = init.rho.len();
    let (lg, rg) = neighbors(n, init.ghost);
    let at = |j: isize| if j < 0 { lg } else if j as usize >= n { rg } else { j as usize };
    let mut f = init.clone();
    while f.t < t_final {
        let smax = f
            .rho
            .iter()
            .map(|&r| Ok((v_eq.eval(r)? + r * v_eq.d1(r)?).abs()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let remaining = t_final - f.t;
        let dt = if smax > 0.0 { (cfl * f.dx / smax).min(remaining) } else { remaining };
        let fl: Vec<f64> = (0..=n)
            .map(|j| godunov_flux(flux_dyn, rho_star, f.rho[at(j as isize - 1)], f.rho[at(j as isize)]))
            .collect();
        if fl.iter().any(|x| !x.is_finite()) {
            return Err(TomError::Domain {
                closure: v_eq.name().to_string(),
                value: f64::NAN,
                lo: v_eq.domain().lo,
                hi: v_eq.domain().hi,
            });
        }
        let r = dt / f.dx;
        f.rho = (0..n).map(|i| f.rho[i] - r * (fl[i + 1] - fl[i])).collect();
        f.t = if dt >= remaining { t_final } else { f.t + dt };
    }
    Ok(f)
}

/// Initial data and grid of an ε-sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepScenario {
    /// `(ρ, v)` on either side of `x0`.
    pub left: (f64, f64),
    pub right: (f64, f64),
    /// Hesitation on either side; `None` uses the equilibrium `H(ρ)`.
    pub h_left: Option<f64>,
    pub h_right: Option<f64>,
    pub x0: f64,
    /// Width of a tanh transition; `None` gives a sharp jump.
    pub smoothing: Option<f64>,
    pub domain: (f64, f64),
    pub cells: usize,
    pub cfl: f64,
    pub t_final: f64,
    pub source_sign: SourceSign,
}

impl SweepScenario {
    fn blend(&self, x: f64, l: f64, r: f64) -> f64 {
        let s = match self.smoothing {
            Some(w) => 0.5 * (1.0 + ((x - self.x0) / w).tanh()),
            None => {
                if x < self.x0 {
                    0.0
                } else {
                    1.0
                }
            }
        };
        l + (r - l) * s
    }

    fn density_velocity(&self, x: f64) -> (f64, f64) {
        (
            self.blend(x, self.left.0, self.right.0),
            self.blend(x, self.left.1, self.right.1),
        )
    }

    pub fn initial_field(&self, cs: &ClosureSet) -> Result<FvField> {
        let (a, b) = self.domain;
        let side = |h: Option<f64>, rho: f64| -> Result<f64> {
            match h {
                Some(h) => Ok(h),
                None => cs.h_eq()?.eval(rho),
            }
        };
        FvField::try_from_prim_fn(a, b, self.cells, Ghost::Outflow, cs, |x| {
            let (rho, v) = self.density_velocity(x);
            let h = match (self.h_left, self.h_right) {
                (None, None) => cs.h_eq()?.eval(rho)?,
                (hl, hr) => self.blend(x, side(hl, self.left.0)?, side(hr, self.right.0)?),
            };
            Ok(PrimState::new(rho, v, h))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub eps: f64,
    /// L1 distance of `(ρ, v)`; NaN when the run diverged.
    pub distance: f64,
    pub diverged: bool,
    pub note: Option<String>,
}

fn sweep_single(
    sc: &SweepScenario,
    variant: RelaxationVariant,
    eps: f64,
    cs: &ClosureSet,
    reference: &(Vec<f64>, Vec<f64>),
    dx: f64,
) -> SweepEntry {
    let diverged = |note: String| SweepEntry {
        eps,
        distance: f64::NAN,
        diverged: true,
        note: Some(note),
    };
    let rc = RelaxationConfig {
        variant,
        eps,
        source_sign: sc.source_sign,
    };
    let run = sc.initial_field(cs).and_then(|f0| {
        evolve_with(&f0, cs, &rc, sc.cfl, sc.t_final, |f| {
            let m = f.max_abs();
            if m > BLOWUP_LIMIT {
                Err(TomError::Integration(format!("blow-up: |U| = {m:e} at t = {}", f.t)))
            } else {
                Ok(())
            }
        })
    });
    let f = match run {
        Ok(f) => f,
        Err(e) => return diverged(e.to_string()),
    };
    match f.prims(cs) {
        Ok(p) => {
            let rho: Vec<f64> = p.iter().map(|u| u.rho).collect();
            let v: Vec<f64> = p.iter().map(|u| u.v).collect();
            SweepEntry {
                eps,
                distance: l1_distance(&rho, &reference.0, dx) + l1_distance(&v, &reference.1, dx),
                diverged: false,
                note: None,
            }
        }
        Err(e) => diverged(e.to_string()),
    }
}

/// Distance at `t_final` between the relaxed solution and its equilibrium
/// model, one entry per ε. The ARZ reference (no source) serves `WToW`,
/// LWR serves `ZArz`.
pub fn epsilon_sweep(
    sc: &SweepScenario,
    variant: RelaxationVariant,
    eps_list: &[f64],
    cs: &ClosureSet,
) -> Result<Vec<SweepEntry>> {
    check_cfl(sc.cfl)?;
    if let Some(e) = eps_list.iter().find(|e| !(**e > 0.0)) {
        return Err(TomError::InvalidParameter(format!("eps = {e} must be positive")));
    }
    let (a, b) = sc.domain;
    let dx = (b - a) / sc.cells as f64;
    let reference = match variant {
        RelaxationVariant::WToW => {
            let init = ArzField::from_prim_fn(a, b, sc.cells, Ghost::Outflow, cs, |x| sc.density_velocity(x))?;
            let r = solve_arz_reference(&init, cs, None, sc.t_final, sc.cfl)?;
            let v = r.velocity(cs)?;
            (r.rho, v)
        }
        RelaxationVariant::ZArz => {
            let init = LwrField::from_fn(a, b, sc.cells, Ghost::Outflow, |x| sc.density_velocity(x).0)?;
            let r = solve_lwr_reference(&init, cs, sc.t_final, sc.cfl, crate::state::DEFAULT_RHO_MAX)?;
            let v_eq = cs.v_eq()?;
            let v = r.rho.iter().map(|&x| v_eq.eval(x)).collect::<Result<Vec<_>>>()?;
            (r.rho, v)
        }
        other => {
            return Err(TomError::NotApplicable(format!(
                "no equilibrium reference for relaxation variant {other:?}"
            )))
        }
    };
    let run = |&eps: &f64| sweep_single(sc, variant, eps, cs, &reference, dx);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(eps_list.par_iter().map(run).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(eps_list.iter().map(run).collect())
    }
}

/// Least-squares slope of `ln d` against `ln ε` over the non-diverged entries.
pub fn loglog_slope(entries: &[SweepEntry]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = entries
        .iter()
        .filter(|e| !e.diverged && e.distance > 0.0)
        .map(|e| (e.eps.ln(), e.distance.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
