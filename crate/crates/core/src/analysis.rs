//! Chapman-Enskog and stability diagnostics evaluated pointwise.
//!
//! `H` below is the equilibrium hesitation, `h(ρ)` the hesitation closure and
//! `P = q∘H` the ARZ hesitation.

use crate::closures::ClosureSet;
use crate::error::Result;

const TIE_TOL: f64 = 1e-14;

fn le(a: f64, b: f64) -> bool {
    a <= b + TIE_TOL * a.abs().max(b.abs()).max(1.0)
}

/// `μ(ρ) = ρ q'(H(ρ)) (h'(ρ) − H'(ρ))`.
pub fn mu_tom(rho: f64, cs: &ClosureSet) -> Result<f64> {
    let he = cs.h_eq()?;
    Ok(rho * cs.q.d1(he.eval(rho)?)? * (cs.h.d1(rho)? - he.d1(rho)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubcharTom {
    /// `λ₁(ρ, v, H(ρ)) = v − q'(H)h'(ρ)ρ`.
    pub lam1_frozen: f64,
    /// `v − q'(H)H'(ρ)ρ`.
    pub lam1_arz: f64,
    pub lam_v: f64,
    /// `λ₁ < λ₁^ARZ ≤ λ_v`.
    pub holds: bool,
}

pub fn subchar_tom(rho: f64, v: f64, cs: &ClosureSet) -> Result<SubcharTom> {
    let he = cs.h_eq()?;
    let qp = cs.q.d1(he.eval(rho)?)?;
    let lam1_frozen = v - qp * cs.h.d1(rho)? * rho;
    let lam1_arz = v - qp * he.d1(rho)? * rho;
    Ok(SubcharTom {
        lam1_frozen,
        lam1_arz,
        lam_v: v,
        holds: lam1_frozen < lam1_arz && lam1_arz <= v,
    })
}

/// `λ₁^ARZ(ρ, v) = v − ρP'(ρ)`.
pub fn lambda1_arz(rho: f64, v: f64, cs: &ClosureSet) -> Result<f64> {
    Ok(v - rho * cs.p_d1(rho)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubcharArz {
    pub lam1_arz: f64,
    /// `f'_eq = V_eq + ρV_eq'`.
    pub feq_prime: f64,
    pub lam_v: f64,
    /// `λ₁^ARZ ≤ f'_eq ≤ λ_v` at `v = V_eq(ρ)`.
    pub holds: bool,
    /// `V_eq'(ρ) ≥ 0`, outside the standing assumption.
    pub assumption_violated: bool,
}

pub fn subchar_arz(rho: f64, cs: &ClosureSet) -> Result<SubcharArz> {
    let ve = cs.v_eq()?;
    let (v, dv) = (ve.eval(rho)?, ve.d1(rho)?);
    let lam1_arz = lambda1_arz(rho, v, cs)?;
    let feq_prime = v + rho * dv;
    Ok(SubcharArz {
        lam1_arz,
        feq_prime,
        lam_v: v,
        holds: le(lam1_arz, feq_prime) && le(feq_prime, v),
        assumption_violated: dv >= 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuArz {
    /// `−ρ²V_eq'(V_eq' + P')`.
    pub value: f64,
    /// `V_eq' + P' ≥ 0`.
    pub nonnegative: bool,
}

pub fn mu_arz(rho: f64, cs: &ClosureSet) -> Result<MuArz> {
    let dv = cs.v_eq()?.d1(rho)?;
    let s = dv + cs.p_d1(rho)?;
    Ok(MuArz {
        value: -rho * rho * dv * s,
        nonnegative: s >= 0.0,
    })
}

/// `γ(ρ) = q''(H(ρ)) h'(ρ) ρ (H'(ρ) − h'(ρ))`.
pub fn gamma_hc(rho: f64, cs: &ClosureSet) -> Result<f64> {
    let he = cs.h_eq()?;
    let hp = cs.h.d1(rho)?;
    Ok(cs.q.d2(he.eval(rho)?)? * hp * rho * (he.d1(rho)? - hp))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda1Hc {
    pub value: f64,
    /// Frozen speed `v − q'(H)h'(ρ)ρ`.
    pub frozen: f64,
    pub gamma: f64,
    /// `λ₁^HC ≤ λ₁` frozen.
    pub below_frozen: bool,
    /// `ρ̇ γ ≥ 0`; coincides with `below_frozen` for `ε > 0`.
    pub rho_dot_gamma_nonneg: bool,
}

/// `λ₁^HC = (v − q'(H)h'(ρ)ρ) − εγ(ρ)ρ̇`.
pub fn lambda1_hc(rho: f64, v: f64, rho_dot: f64, eps: f64, cs: &ClosureSet) -> Result<Lambda1Hc> {
    let he = cs.h_eq()?;
    let frozen = v - cs.q.d1(he.eval(rho)?)? * cs.h.d1(rho)? * rho;
    let gamma = gamma_hc(rho, cs)?;
    let value = frozen - eps * gamma * rho_dot;
    Ok(Lambda1Hc {
        value,
        frozen,
        gamma,
        below_frozen: value <= frozen,
        rho_dot_gamma_nonneg: rho_dot * gamma >= 0.0,
    })
}

/// `λ₁^C = V_C + ρ(∂_ρV_C + h'(ρ)∂_hV_C)`.
pub fn lambda1_corli(rho: f64, h: f64, cs: &ClosureSet) -> Result<f64> {
    let vc = cs.vc()?;
    Ok(vc.eval(rho, h) + rho * (vc.d_rho(rho, h) + cs.h.d1(rho)? * vc.d_h(rho, h)))
}

/// `μ_C = (λ₁^C − (V_C − q'(h)h'(ρ)ρ)) [[ρ∂_ρV_C, ρ∂_hV_C], [w∂_ρV_C, w∂_hV_C]]`
/// with `w = ρ(h − h(ρ))`.
pub fn mu_corli(rho: f64, h: f64, cs: &ClosureSet) -> Result<[[f64; 2]; 2]> {
    let vc = cs.vc()?;
    let (v, dr, dh) = (vc.eval(rho, h), vc.d_rho(rho, h), vc.d_h(rho, h));
    let a = cs.q.d1(h)? * cs.h.d1(rho)? * rho;
    let pre = lambda1_corli(rho, h, cs)? - (v - a);
    let w = rho * (h - cs.h.eval(rho)?);
    Ok([
        [pre * rho * dr, pre * rho * dh],
        [pre * w * dr, pre * w * dh],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorliConsistency {
    pub lam1_c: f64,
    /// `q'h'ρ − (V_C − λ₁^C)`.
    pub r: f64,
    /// `q'h'ρ − (λ₁^C − V_C)`.
    pub r_alt: f64,
}

pub fn corli_consistency(rho: f64, h: f64, cs: &ClosureSet) -> Result<CorliConsistency> {
    let vc = cs.vc()?.eval(rho, h);
    let a = cs.q.d1(h)? * cs.h.d1(rho)? * rho;
    let lam1_c = lambda1_corli(rho, h, cs)?;
    Ok(CorliConsistency {
        lam1_c,
        r: a - (vc - lam1_c),
        r_alt: a - (lam1_c - vc),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRecord {
    pub rho: f64,
    pub v: f64,
    pub mu_tom: Option<f64>,
    pub mu_arz: Option<f64>,
    pub gamma_hc: Option<f64>,
    pub lam1_frozen: Option<f64>,
    pub lam1_arz: Option<f64>,
    pub lam_v: f64,
    pub feq_prime: Option<f64>,
    pub sc_tom: Option<bool>,
    pub sc_arz: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub records: Vec<StabilityRecord>,
}

impl StabilityReport {
    /// Every evaluated condition holds and every `μ` is nonnegative.
    pub fn all_stable(&self) -> bool {
        self.records.iter().all(|r| {
            r.sc_tom.unwrap_or(true)
                && r.sc_arz.unwrap_or(true)
                && r.mu_tom.is_none_or(|m| m >= 0.0)
                && r.mu_arz.is_none_or(|m| m >= 0.0)
        })
    }
}

/// Pointwise diagnostics over a density grid. The velocity is `V_eq(ρ)` when
/// available, otherwise `v_default`. Diagnostics whose closures are missing
/// are left empty.
pub fn stability_report(cs: &ClosureSet, rhos: &[f64], v_default: f64) -> Result<StabilityReport> {
    let records = rhos
        .iter()
        .map(|&rho| {
            let v = match &cs.v_eq {
                Some(ve) => ve.eval(rho)?,
                None => v_default,
            };
            let has_h_eq = cs.h_eq.is_some();
            let sct = if has_h_eq { Some(subchar_tom(rho, v, cs)?) } else { None };
            let sca = if cs.v_eq.is_some() && has_h_eq { Some(subchar_arz(rho, cs)?) } else { None };
            Ok(StabilityRecord {
                rho,
                v,
                mu_tom: if has_h_eq { Some(mu_tom(rho, cs)?) } else { None },
                mu_arz: sca.map(|_| mu_arz(rho, cs).map(|m| m.value)).transpose()?,
                gamma_hc: if has_h_eq && cs.q.has_d2() { Some(gamma_hc(rho, cs)?) } else { None },
                lam1_frozen: sct.map(|s| s.lam1_frozen),
                lam1_arz: sct.map(|s| s.lam1_arz),
                lam_v: v,
                feq_prime: sca.map(|s| s.feq_prime),
                sc_tom: sct.map(|s| s.holds),
                sc_arz: sca.map(|s| s.holds),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityReport { records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closures::{BivariateClosure, ScalarClosure};
    use crate::error::TomError;

    fn pw(a: f64) -> ScalarClosure {
        ScalarClosure::power(a, 1.0).unwrap()
    }

    #[test]
    fn mu_tom_examples() {
        let cs = ClosureSet::new(pw(1.0), pw(2.0)).with_h_eq(pw(1.0));
        assert!((mu_tom(0.75, &cs).unwrap() - 0.375).abs() < 1e-15);
        assert!((mu_tom(0.25, &cs).unwrap() + 0.125).abs() < 1e-15);
        let same = ClosureSet::new(pw(0.5), pw(2.0)).with_h_eq(pw(2.0));
        assert_eq!(mu_tom(0.4, &same).unwrap(), 0.0);
        let bare = ClosureSet::power(1.0, 1.0).unwrap();
        assert!(matches!(mu_tom(0.5, &bare), Err(TomError::Capability { .. })));
    }

    #[test]
    fn subchar_tom_boundary_case() {
        let cs = ClosureSet::new(pw(1.0), pw(2.0)).with_h_eq(pw(2.0));
        let s = subchar_tom(0.5, 0.4, &cs).unwrap();
        assert_eq!(s.lam1_frozen, s.lam1_arz);
        assert!(!s.holds);
        let good = ClosureSet::new(pw(1.0), pw(2.0)).with_h_eq(pw(1.0));
        assert!(subchar_tom(0.75, 0.4, &good).unwrap().holds);
    }

    #[test]
    fn subchar_arz_examples() {
        let cs = ClosureSet::power(1.0, 1.0)
            .unwrap()
            .with_h_eq(pw(1.0))
            .with_v_eq(ScalarClosure::affine(1.0, -1.0).unwrap());
        for rho in [0.1, 0.3, 0.5, 0.9] {
            let s = subchar_arz(rho, &cs).unwrap();
            assert!((s.lam1_arz - (1.0 - 2.0 * rho)).abs() < 1e-15);
            assert!(s.holds && !s.assumption_violated);
        }
        // P' = 0 makes the ARZ speed exceed f'_eq
        let flat = ClosureSet::power(1.0, 1.0)
            .unwrap()
            .with_h_eq(ScalarClosure::custom("const", |_| 0.3, |_| 0.0))
            .with_v_eq(ScalarClosure::affine(1.0, -1.0).unwrap());
        assert!(!subchar_arz(0.4, &flat).unwrap().holds);
    }

    #[test]
    fn mu_arz_examples() {
        let v_eq = ScalarClosure::affine(1.0, -1.0).unwrap();
        let lin = ClosureSet::power(1.0, 1.0).unwrap().with_h_eq(pw(1.0)).with_v_eq(v_eq.clone());
        assert_eq!(mu_arz(0.4, &lin).unwrap().value.abs(), 0.0);
        let sq = ClosureSet::power(1.0, 1.0).unwrap().with_h_eq(pw(2.0)).with_v_eq(v_eq);
        let m = mu_arz(0.75, &sq).unwrap();
        assert!((m.value - 0.75f64.powi(2) * 0.5).abs() < 1e-15 && m.nonnegative);
        assert!(!mu_arz(0.25, &sq).unwrap().nonnegative);
    }

    #[test]
    fn gamma_examples() {
        let cs = ClosureSet::new(pw(2.0), pw(2.0)).with_h_eq(pw(1.0));
        assert!((gamma_hc(0.25, &cs).unwrap() - 0.125).abs() < 1e-15);
        let lin = ClosureSet::new(pw(1.0), pw(2.0)).with_h_eq(pw(1.0));
        assert_eq!(gamma_hc(0.3, &lin).unwrap(), 0.0);
        let l = lambda1_hc(0.3, 0.5, 0.7, 0.1, &lin).unwrap();
        assert_eq!(l.value, l.frozen);
        let l = lambda1_hc(0.25, 0.5, 0.0, 0.1, &cs).unwrap();
        assert_eq!(l.value, l.frozen);
        let l = lambda1_hc(0.25, 0.5, 2.0, 0.1, &cs).unwrap();
        assert!(l.below_frozen && l.rho_dot_gamma_nonneg);
    }

    #[test]
    fn corli_examples() {
        let q = pw(1.0);
        let cs = ClosureSet::new(q.clone(), pw(1.0)).with_vc(BivariateClosure::constant_minus_q(1.2, &q));
        let m = mu_corli(0.4, 0.3, &cs).unwrap();
        assert!(m.iter().flatten().all(|x| x.abs() < 1e-15));
        let c = corli_consistency(0.4, 0.3, &cs).unwrap();
        assert!(c.r.abs() < 1e-15);

        let cst = ClosureSet::new(q.clone(), pw(1.0)).with_vc(BivariateClosure::affine(0.7, 0.0, 0.0));
        assert!(mu_corli(0.4, 0.3, &cst).unwrap().iter().flatten().all(|x| *x == 0.0));

        let one = ClosureSet::new(q.clone(), pw(1.0)).with_vc(BivariateClosure::affine(1.0, -1.0, 0.0));
        assert!(mu_corli(0.5, 0.4, &one).unwrap().iter().flatten().all(|x| x.abs() < 1e-15));

        let two = ClosureSet::new(q, pw(1.0)).with_vc(BivariateClosure::affine(1.0, -2.0, 0.0));
        let m = mu_corli(0.5, 0.4, &two).unwrap();
        let expect = [[0.5, 0.0], [-0.05, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j] - expect[i][j]).abs() < 1e-15, "{m:?}");
            }
        }
    }

    #[test]
    fn report_missing_closures_stay_empty() {
        let cs = ClosureSet::power(1.0, 1.0).unwrap();
        let r = stability_report(&cs, &[0.2, 0.4], 0.5).unwrap();
        assert!(r.records.iter().all(|x| x.mu_tom.is_none() && x.sc_arz.is_none()));
        assert!(r.all_stable());
    }
}
