//! Primitive, conservative and Lagrangian state representations.

use crate::closures::ClosureSet;
use crate::error::{Result, TomError};

/// Default cap on the nominal density; exceeding it only warns.
pub const DEFAULT_RHO_MAX: f64 = 1.0;

/// `(ρ, v, h)`: density, velocity, hesitation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimState {
    pub rho: f64,
    pub v: f64,
    pub h: f64,
}

/// `(ρ, z, w)` with `z = ρ(v + q(h))` and `w = ρ(h − h(ρ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsState {
    pub rho: f64,
    pub z: f64,
    pub w: f64,
}

/// Lagrangian description: specific volume, velocity, hesitation and the
/// coordinates `(T, X)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagState {
    pub tau: f64,
    pub v: f64,
    pub h: f64,
    pub x_lag: f64,
    pub t_lag: f64,
}

impl PrimState {
    pub fn new(rho: f64, v: f64, h: f64) -> Self {
        Self { rho, v, h }
    }

    /// Lagrangian invariant `ω = v + q(h)`.
    pub fn omega(&self, cs: &ClosureSet) -> Result<f64> {
        Ok(self.v + cs.q.eval(self.h)?)
    }

    pub fn to_lagrangian(&self, x_lag: f64, t_lag: f64) -> Result<LagState> {
        if !(self.rho > 0.0) {
            return Err(TomError::Vacuum(format!("rho = {} has no specific volume", self.rho)));
        }
        Ok(LagState {
            tau: 1.0 / self.rho,
            v: self.v,
            h: self.h,
            x_lag,
            t_lag,
        })
    }

    /// Validates the state; returns a warning when `ρ` exceeds `rho_max`.
    pub fn admissibility(&self, cs: &ClosureSet, rho_max: f64) -> Result<Option<String>> {
        if !(self.rho > 0.0) {
            return Err(TomError::Vacuum(format!("rho = {}", self.rho)));
        }
        if !self.v.is_finite() {
            return Err(TomError::InvalidParameter(format!("velocity {}", self.v)));
        }
        cs.q.eval(self.h)?;
        cs.h.eval(self.rho)?;
        Ok((self.rho > rho_max)
            .then(|| format!("density {} exceeds the nominal maximum {rho_max}", self.rho)))
    }
}

impl ConsState {
    pub fn new(rho: f64, z: f64, w: f64) -> Self {
        Self { rho, z, w }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.rho, self.z, self.w]
    }

    pub fn from_array(u: [f64; 3]) -> Self {
        Self::new(u[0], u[1], u[2])
    }
}

impl LagState {
    pub fn rho(&self) -> f64 {
        1.0 / self.tau
    }
}

pub fn prim_to_cons(u: &PrimState, cs: &ClosureSet) -> Result<ConsState> {
    if !(u.rho > 0.0) {
        return Err(TomError::Vacuum(format!("rho = {}", u.rho)));
    }
    let z = u.rho * (u.v + cs.q.eval(u.h)?);
    let w = u.rho * (u.h - cs.h.eval(u.rho)?);
    Ok(ConsState::new(u.rho, z, w))
}

pub fn cons_to_prim(u: &ConsState, cs: &ClosureSet) -> Result<PrimState> {
    if !(u.rho > 0.0) || !u.rho.is_finite() {
        return Err(TomError::Vacuum(format!("rho = {}", u.rho)));
    }
    let h = u.w / u.rho + cs.h.eval(u.rho)?;
    let v = u.z / u.rho - cs.q.eval(h)?;
    Ok(PrimState::new(u.rho, v, h))
}

/// Physical flux `(ρv, zv, wv)` of the conservative system.
pub fn flux_s3(u: &ConsState, cs: &ClosureSet) -> Result<[f64; 3]> {
    let p = cons_to_prim(u, cs)?;
    Ok([u.rho * p.v, u.z * p.v, u.w * p.v])
}

/// Second component of the flux written as `z²/ρ − z q(h)`.
pub fn momentum_flux_expanded(u: &ConsState, cs: &ClosureSet) -> Result<f64> {
    let h = u.w / u.rho + cs.h.eval(u.rho)?;
    Ok(u.z * u.z / u.rho - u.z * cs.q.eval(h)?)
}

/// Eulerian fields sampled on a uniform space-time grid, indexed `[time][space]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSamples {
    pub t0: f64,
    pub dt: f64,
    pub x0: f64,
    pub dx: f64,
    pub rho: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub h: Vec<Vec<f64>>,
}

impl SpaceTimeSamples {
    /// Samples `f(t, x)` on `nt × nx` nodes.
    pub fn from_fn(
        t0: f64,
        dt: f64,
        nt: usize,
        x0: f64,
        dx: f64,
        nx: usize,
        mut f: impl FnMut(f64, f64) -> PrimState,
    ) -> Self {
        let mut rho = vec![vec![0.0; nx]; nt];
        let mut v = rho.clone();
        let mut h = rho.clone();
        for n in 0..nt {
            for j in 0..nx {
                let u = f(t0 + n as f64 * dt, x0 + j as f64 * dx);
                rho[n][j] = u.rho;
                v[n][j] = u.v;
                h[n][j] = u.h;
            }
        }
        Self { t0, dt, x0, dx, rho, v, h }
    }

    pub fn shape(&self) -> Result<(usize, usize)> {
        let nt = self.rho.len();
        let nx = self.rho.first().map_or(0, Vec::len);
        let ok = |f: &Vec<Vec<f64>>| f.len() == nt && f.iter().all(|row| row.len() == nx);
        if !(ok(&self.rho) && ok(&self.v) && ok(&self.h)) {
            return Err(TomError::Shape("rho, v and h must share one grid".into()));
        }
        if nt < 3 || nx < 3 {
            return Err(TomError::Shape(format!(
                "need at least 3x3 samples for central differences, got {nt}x{nx}"
            )));
        }
        Ok((nt, nx))
    }

    /// Largest second difference of any field relative to its range; close
    /// to zero for resolved smooth data, O(1) for noise.
    pub fn roughness(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for field in [&self.rho, &self.v, &self.h] {
            let (lo, hi) = field
                .iter()
                .flatten()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            let range = hi - lo;
            if !(range > 1e-14) {
                continue;
            }
            for row in field {
                for k in 1..row.len().saturating_sub(1) {
                    worst = worst.max((row[k + 1] - 2.0 * row[k] + row[k - 1]).abs() / range);
                }
            }
        }
        worst
    }
}

/// Max-norm residuals of the three Lagrangian equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianResidual {
    /// `∂_T τ − ∂_X v`.
    pub volume: f64,
    /// `∂_T (v + q(h))`.
    pub invariant: f64,
    /// `∂_T (h − h(ρ))`.
    pub hesitation: f64,
    /// Set when the input is not resolved smooth data.
    pub non_smooth: bool,
}

impl LagrangianResidual {
    pub fn max(&self) -> f64 {
        self.volume.max(self.invariant).max(self.hesitation)
    }
}

const ROUGHNESS_LIMIT: f64 = 0.25;

/// Evaluates the Lagrangian system on Eulerian samples through the coordinate
/// transforms `∂_T = ∂_t + v ∂_x` and `∂_X = ρ⁻¹ ∂_x`, with second-order
/// central differences at interior nodes.
pub fn residual_lagrangian(s: &SpaceTimeSamples, cs: &ClosureSet) -> Result<LagrangianResidual> {
    let (nt, nx) = s.shape()?;
    let mut tau = vec![vec![0.0; nx]; nt];
    let mut omega = tau.clone();
    let mut phi = tau.clone();
    for n in 0..nt {
        for j in 0..nx {
            let (rho, v, h) = (s.rho[n][j], s.v[n][j], s.h[n][j]);
            if !(rho > 0.0) {
                return Err(TomError::Vacuum(format!("rho = {rho} at sample ({n}, {j})")));
            }
            tau[n][j] = 1.0 / rho;
            omega[n][j] = v + cs.q.eval(h)?;
            phi[n][j] = h - cs.h.eval(rho)?;
        }
    }
    let dt2 = 2.0 * s.dt;
    let dx2 = 2.0 * s.dx;
    let material = |f: &Vec<Vec<f64>>, n: usize, j: usize| {
        (f[n + 1][j] - f[n - 1][j]) / dt2 + s.v[n][j] * (f[n][j + 1] - f[n][j - 1]) / dx2
    };
    let mut out = LagrangianResidual {
        volume: 0.0,
        invariant: 0.0,
        hesitation: 0.0,
        non_smooth: s.roughness() > ROUGHNESS_LIMIT,
    };
    for n in 1..nt - 1 {
        for j in 1..nx - 1 {
            let dxv = (s.v[n][j + 1] - s.v[n][j - 1]) / dx2;
            let r1 = material(&tau, n, j) - tau[n][j] * dxv;
            out.volume = out.volume.max(r1.abs());
            out.invariant = out.invariant.max(material(&omega, n, j).abs());
            out.hesitation = out.hesitation.max(material(&phi, n, j).abs());
        }
    }
    Ok(out)
}
