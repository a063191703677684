//! Eigenstructure, Riemann invariants and entropy pairs of the homogeneous
//! system in primitive variables `u = (ρ, v, h)`.

use crate::closures::ClosureSet;
use crate::error::{Result, TomError};
use crate::state::{PrimState, SpaceTimeSamples};

pub type Mat3 = [[f64; 3]; 3];

/// Below this value of `q'(h) h'(ρ) ρ` the left eigenvectors are ill conditioned.
pub const CONDITIONING_LIMIT: f64 = 1e-10;

/// Quasilinear matrix `Q(u)` of `∂_t u + Q(u) ∂_x u = 0`.
pub fn quasilinear_matrix(u: &PrimState, cs: &ClosureSet) -> Result<Mat3> {
    let a = coupling(u, cs)?;
    let hp = cs.h.d1(u.rho)?;
    Ok([
        [u.v, u.rho, 0.0],
        [0.0, u.v - a, 0.0],
        [0.0, hp * u.rho, u.v],
    ])
}

/// `q'(h) h'(ρ) ρ`, the gap between the first and the contact speeds.
fn coupling(u: &PrimState, cs: &ClosureSet) -> Result<f64> {
    Ok(cs.q.d1(u.h)? * cs.h.d1(u.rho)? * u.rho)
}

/// Right and left eigenvectors with the normalisation `L = [q'h'ρ]⁻¹ (…)`.
///
/// The matrix columns follow `d = diag(v, v, λ₁)`: columns 0 and 1 of `r`
/// span the contact fields, column 2 is `r₁`. `lambda` is ordered by field
/// label `(λ₁, λ₂, λ₃) = (v − q'h'ρ, v, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomposition {
    pub lambda: [f64; 3],
    pub d: [f64; 3],
    pub r: Mat3,
    pub l: Mat3,
    pub ill_conditioned: bool,
}

impl EigenDecomposition {
    /// Right eigenvector of field `k ∈ {1, 2, 3}`.
    pub fn right_eigenvector(&self, field: usize) -> [f64; 3] {
        let col = match field {
            1 => 2,
            2 => 0,
            3 => 1,
            _ => panic!("field index {field} out of range 1..=3"),
        };
        [self.r[0][col], self.r[1][col], self.r[2][col]]
    }
}

pub fn eigen_decomposition(u: &PrimState, cs: &ClosureSet) -> Result<EigenDecomposition> {
    let a = coupling(u, cs)?;
    if a == 0.0 || !a.is_finite() {
        return Err(TomError::DegenerateField(format!(
            "q'(h) h'(rho) rho = {a}: no left eigenbasis"
        )));
    }
    let ill_conditioned = a.abs() < CONDITIONING_LIMIT;
    if ill_conditioned {
        log::warn!("eigen decomposition near vacuum: q'h'rho = {a:e}");
    }
    let hr = cs.h.d1(u.rho)? * u.rho;
    let rho = u.rho;
    let lam1 = u.v - a;
    let r = [[1.0, 0.0, rho], [0.0, 0.0, -a], [0.0, 1.0, hr]];
    let s = 1.0 / a;
    let l = [
        [1.0, s * rho, 0.0],
        [0.0, s * hr, 1.0],
        [0.0, -s, 0.0],
    ];
    Ok(EigenDecomposition {
        lambda: [lam1, u.v, u.v],
        d: [u.v, u.v, lam1],
        r,
        l,
        ill_conditioned,
    })
}

pub fn eigenvalues(u: &PrimState, cs: &ClosureSet) -> Result<[f64; 3]> {
    let a = coupling(u, cs)?;
    Ok([u.v - a, u.v, u.v])
}

/// First characteristic speed `λ₁ = v − q'(h) h'(ρ) ρ`.
pub fn lambda1(u: &PrimState, cs: &ClosureSet) -> Result<f64> {
    Ok(u.v - coupling(u, cs)?)
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn diag(d: [f64; 3]) -> Mat3 {
    [[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]]
}

pub fn max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `∇λ_k · r_k` for the three fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonlinearity {
    pub field1: f64,
    pub field2: f64,
    pub field3: f64,
}

/// Evaluates `∇λ₁·r₁ = −ρq'(h'+ρh'') − q'h'ρ − q''h'²ρ²`; the contact
/// fields are linearly degenerate.
pub fn genuine_nonlinearity(u: &PrimState, cs: &ClosureSet) -> Result<Nonlinearity> {
    let rho = u.rho;
    let (qp, qpp) = (cs.q.d1(u.h)?, cs.q.d2(u.h)?);
    let (hp, hpp) = (cs.h.d1(rho)?, cs.h.d2(rho)?);
    let field1 = -rho * qp * (hp + rho * hpp) - qp * hp * rho - qpp * hp * hp * rho * rho;
    Ok(Nonlinearity {
        field1,
        field2: 0.0,
        field3: 0.0,
    })
}

/// `(ℛ₁, ℛ₂, ℛ₃) = (v + q(h), v, v)`.
pub fn riemann_invariants(u: &PrimState, cs: &ClosureSet) -> Result<[f64; 3]> {
    Ok([u.v + cs.q.eval(u.h)?, u.v, u.v])
}

/// The two quantities constant along a 1-wave: `ω = v + q(h)` and `h − h(ρ)`.
pub fn first_field_invariants(u: &PrimState, cs: &ClosureSet) -> Result<(f64, f64)> {
    Ok((u.v + cs.q.eval(u.h)?, u.h - cs.h.eval(u.rho)?))
}

/// Scalar convex generator `F` of the entropy pair `η = ρF(ω)`, `ψ = vρF(ω)`.
#[derive(Clone, Copy)]
pub struct EntropyGenerator {
    pub f: fn(f64) -> f64,
    pub d2: fn(f64) -> f64,
}

impl EntropyGenerator {
    /// `F(ω) = ω²`.
    pub fn quadratic() -> Self {
        Self {
            f: |w| w * w,
            d2: |_| 2.0,
        }
    }

    fn check(&self, omega: f64) -> Result<()> {
        let c = (self.d2)(omega);
        if c < 0.0 {
            return Err(TomError::InvalidEntropy(format!("F''({omega}) = {c} < 0")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPair {
    pub eta: f64,
    pub psi: f64,
}

pub fn entropy_pair(u: &PrimState, gen: &EntropyGenerator, cs: &ClosureSet) -> Result<EntropyPair> {
    let omega = u.v + cs.q.eval(u.h)?;
    gen.check(omega)?;
    let eta = u.rho * (gen.f)(omega);
    Ok(EntropyPair { eta, psi: u.v * eta })
}

/// Max-norm central-difference residual of `∂_t η + ∂_x ψ` at interior nodes.
pub fn entropy_residual(
    s: &SpaceTimeSamples,
    gen: &EntropyGenerator,
    cs: &ClosureSet,
) -> Result<f64> {
    let (nt, nx) = s.shape()?;
    let mut eta = vec![vec![0.0; nx]; nt];
    let mut psi = eta.clone();
    for n in 0..nt {
        for j in 0..nx {
            let p = entropy_pair(&PrimState::new(s.rho[n][j], s.v[n][j], s.h[n][j]), gen, cs)?;
            eta[n][j] = p.eta;
            psi[n][j] = p.psi;
        }
    }
    let mut worst: f64 = 0.0;
    for n in 1..nt - 1 {
        for j in 1..nx - 1 {
            let r = (eta[n + 1][j] - eta[n - 1][j]) / (2.0 * s.dt)
                + (psi[n][j + 1] - psi[n][j - 1]) / (2.0 * s.dx);
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}

/// Total entropy balance over the sampled window, telescoped in space:
/// `Σ_j (η^{n+1}_j − η^n_j) Δx / Δt + ψ_{right} − ψ_{left}`, maximised over `n`.
pub fn entropy_total_balance(
    s: &SpaceTimeSamples,
    gen: &EntropyGenerator,
    cs: &ClosureSet,
) -> Result<f64> {
    let (nt, nx) = s.shape()?;
    let pair = |n: usize, j: usize| {
        entropy_pair(&PrimState::new(s.rho[n][j], s.v[n][j], s.h[n][j]), gen, cs)
    };
    let mut worst: f64 = 0.0;
    for n in 0..nt - 1 {
        let mut change = 0.0;
        for j in 0..nx {
            // trapezoidal weights
            let wgt = if j == 0 || j == nx - 1 { 0.5 } else { 1.0 };
            change += wgt * (pair(n + 1, j)?.eta - pair(n, j)?.eta) * s.dx / s.dt;
        }
        let flux = 0.5 * (pair(n, nx - 1)?.psi + pair(n + 1, nx - 1)?.psi)
            - 0.5 * (pair(n, 0)?.psi + pair(n + 1, 0)?.psi);
        worst = worst.max((change + flux).abs());
    }
    Ok(worst)
}
