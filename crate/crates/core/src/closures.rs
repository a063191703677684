//! Model-defining scalar functions.
//!
//! Every solver receives a [`ClosureSet`] instead of hard-coded formulas:
//! the hesitation map `q`, the density-to-hesitation map `h`, and the
//! optional equilibrium functions `H`, `V_eq` and the bivariate velocity
//! family `V_C`. Derivatives are always analytic.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, TomError};

/// Distance kept from a finite domain boundary.
pub const DOMAIN_GUARD: f64 = 1e-12;

const BISECTION_TOL: f64 = 1e-13;
const BISECTION_MAX_ITER: usize = 200;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type BivariateFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Open admissible interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub const POSITIVE: Domain = Domain {
        lo: 0.0,
        hi: f64::INFINITY,
    };
    pub const REAL: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn contains(&self, x: f64) -> bool {
        x.is_finite() && x > self.lo + DOMAIN_GUARD && x < self.hi - DOMAIN_GUARD
    }
}

/// Serializable description of a built-in closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosureKind {
    /// `coeff * x^exponent` on `(0, ∞)`.
    Power { exponent: f64, coeff: f64 },
    /// `intercept + slope * x` on the real line.
    Affine { intercept: f64, slope: f64 },
    /// User-registered function object.
    Custom,
}

/// A scalar model function with analytic derivatives.
#[derive(Clone)]
pub struct ScalarClosure {
    name: String,
    kind: ClosureKind,
    eval: RealFn,
    d1: RealFn,
    d2: Option<RealFn>,
    d3: Option<RealFn>,
    inverse: Option<RealFn>,
    domain: Domain,
}

impl fmt::Debug for ScalarClosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarClosure")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("domain", &self.domain)
            .field("d2", &self.d2.is_some())
            .field("d3", &self.d3.is_some())
            .field("inverse", &self.inverse.is_some())
            .finish()
    }
}

/// Builds `x ↦ coeff · x^exponent` with exact derivatives and inverse.
pub fn make_power_closure(exponent: f64, coeff: f64) -> Result<ScalarClosure> {
    ScalarClosure::power(exponent, coeff)
}

impl ScalarClosure {
    pub fn power(exponent: f64, coeff: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(TomError::InvalidParameter(format!(
                "power closure exponent must be positive, got {exponent}"
            )));
        }
        if !(coeff > 0.0 && coeff.is_finite()) {
            return Err(TomError::InvalidParameter(format!(
                "power closure coefficient must be positive, got {coeff}"
            )));
        }
        let (a, c) = (exponent, coeff);
        Ok(Self {
            name: format!("{c}*x^{a}"),
            kind: ClosureKind::Power {
                exponent: a,
                coeff: c,
            },
            eval: Arc::new(move |x| c * x.powf(a)),
            d1: Arc::new(move |x| c * a * x.powf(a - 1.0)),
            d2: Some(Arc::new(move |x| c * a * (a - 1.0) * x.powf(a - 2.0))),
            d3: Some(Arc::new(move |x| {
                c * a * (a - 1.0) * (a - 2.0) * x.powf(a - 3.0)
            })),
            inverse: Some(Arc::new(move |y: f64| if y > 0.0 { (y / c).powf(1.0 / a) } else { f64::NAN })),
            domain: Domain::POSITIVE,
        })
    }

    /// `intercept + slope · x`; typical use is `V_eq(ρ) = 1 − ρ`.
    pub fn affine(intercept: f64, slope: f64) -> Result<Self> {
        if !(intercept.is_finite() && slope.is_finite()) || slope == 0.0 {
            return Err(TomError::InvalidParameter(format!(
                "affine closure needs finite intercept and nonzero slope, got ({intercept}, {slope})"
            )));
        }
        let (b, m) = (intercept, slope);
        Ok(Self {
            name: format!("{b}+{m}*x"),
            kind: ClosureKind::Affine {
                intercept: b,
                slope: m,
            },
            eval: Arc::new(move |x| b + m * x),
            d1: Arc::new(move |_| m),
            d2: Some(Arc::new(|_| 0.0)),
            d3: Some(Arc::new(|_| 0.0)),
            inverse: Some(Arc::new(move |y| (y - b) / m)),
            domain: Domain::REAL,
        })
    }

    /// User-registered closure. Without [`with_inverse`](Self::with_inverse)
    /// the inverse falls back to bracketed bisection.
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            kind: ClosureKind::Custom,
            eval: Arc::new(eval),
            d1: Arc::new(d1),
            d2: None,
            d3: None,
            inverse: None,
            domain: Domain::POSITIVE,
        }
    }

    pub fn with_d2(mut self, d2: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d2 = Some(Arc::new(d2));
        self
    }

    pub fn with_d3(mut self, d3: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d3 = Some(Arc::new(d3));
        self
    }

    pub fn with_inverse(mut self, inv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inv));
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ClosureKind {
        self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn has_d2(&self) -> bool {
        self.d2.is_some()
    }

    pub fn has_d3(&self) -> bool {
        self.d3.is_some()
    }

    pub fn has_analytic_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    fn check(&self, x: f64) -> Result<()> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(TomError::Domain {
                closure: self.name.clone(),
                value: x,
                lo: self.domain.lo,
                hi: self.domain.hi,
            })
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok((self.eval)(x))
    }

    pub fn d1(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok((self.d1)(x))
    }

    pub fn d2(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        match &self.d2 {
            Some(f) => Ok(f(x)),
            None => Err(TomError::Capability {
                closure: self.name.clone(),
                what: "a second derivative",
            }),
        }
    }

    pub fn d3(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        match &self.d3 {
            Some(f) => Ok(f(x)),
            None => Err(TomError::Capability {
                closure: self.name.clone(),
                what: "a third derivative",
            }),
        }
    }

    /// Inverse function; the result is checked against the domain.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let x = match &self.inverse {
            Some(inv) => inv(y),
            None => self.bisect_inverse(y)?,
        };
        if !self.domain.contains(x) {
            return Err(TomError::Inversion {
                closure: self.name.clone(),
                value: y,
                reason: format!("preimage {x} leaves the domain"),
            });
        }
        Ok(x)
    }

    fn bisect_inverse(&self, y: f64) -> Result<f64> {
        let fail = |reason: &str| TomError::Inversion {
            closure: self.name.clone(),
            value: y,
            reason: reason.to_string(),
        };
        if !y.is_finite() {
            return Err(fail("non-finite target"));
        }
        let f = &self.eval;
        let d = self.domain;
        let lo_edge = if d.lo.is_finite() { d.lo + 2.0 * DOMAIN_GUARD } else { -1.0 };
        let hi_edge = if d.hi.is_finite() { d.hi - 2.0 * DOMAIN_GUARD } else { f64::INFINITY };
        let probe = match (d.lo.is_finite(), d.hi.is_finite()) {
            (true, true) => 0.5 * (d.lo + d.hi),
            (true, false) => d.lo + 1.0,
            (false, true) => d.hi - 1.0,
            (false, false) => 0.0,
        };
        let increasing = (self.d1)(probe) >= 0.0;
        let mut a = lo_edge;
        let g = |x: f64| if increasing { f(x) - y } else { y - f(x) };

        // expand toward the left when the domain is unbounded below
        let mut expansions = 0;
        while g(a) > 0.0 {
            if d.lo.is_finite() || expansions >= BISECTION_MAX_ITER {
                return Err(fail("target below the closure range"));
            }
            a = a * 2.0 - 1.0;
            expansions += 1;
        }
        let mut b = if hi_edge.is_finite() { hi_edge } else { a.abs().max(1.0) * 2.0 };
        expansions = 0;
        while g(b) < 0.0 {
            if hi_edge.is_finite() || expansions >= BISECTION_MAX_ITER {
                return Err(fail("target above the closure range"));
            }
            b = a + 2.0 * (b - a);
            expansions += 1;
        }
        for _ in 0..BISECTION_MAX_ITER {
            let m = 0.5 * (a + b);
            if m <= a || m >= b || b - a <= BISECTION_TOL * 1e-2 * m.abs() {
                break;
            }
            if g(m) > 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        Ok(0.5 * (a + b))
    }
}

/// Bivariate velocity-type closure `(ρ, h) ↦ f(ρ, h)` with partials.
#[derive(Clone)]
pub struct BivariateClosure {
    name: String,
    kind: BivariateKind,
    eval: BivariateFn,
    d_rho: BivariateFn,
    d_h: BivariateFn,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BivariateKind {
    /// `c0 + c_rho ρ + c_h h`.
    Affine { c0: f64, c_rho: f64, c_h: f64 },
    /// `constant − q(h)` for the model's `q`.
    ConstantMinusQ { constant: f64 },
    /// `coeff · ρ^rho_exponent · h^h_exponent`.
    PowerProduct {
        coeff: f64,
        rho_exponent: f64,
        h_exponent: f64,
    },
    Custom,
}

impl fmt::Debug for BivariateClosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BivariateClosure")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .finish()
    }
}

impl BivariateClosure {
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        d_rho: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        d_h: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            kind: BivariateKind::Custom,
            eval: Arc::new(eval),
            d_rho: Arc::new(d_rho),
            d_h: Arc::new(d_h),
        }
    }

    pub fn affine(c0: f64, c_rho: f64, c_h: f64) -> Self {
        Self {
            name: format!("{c0}+{c_rho}*rho+{c_h}*h"),
            kind: BivariateKind::Affine { c0, c_rho, c_h },
            eval: Arc::new(move |r, h| c0 + c_rho * r + c_h * h),
            d_rho: Arc::new(move |_, _| c_rho),
            d_h: Arc::new(move |_, _| c_h),
        }
    }

    /// `constant − q(h)`: the family for which the velocity relaxation is
    /// exactly consistent with the model's own first characteristic.
    pub fn constant_minus_q(constant: f64, q: &ScalarClosure) -> Self {
        let (qe, qd) = (q.eval.clone(), q.d1.clone());
        Self {
            name: format!("{constant}-q(h)"),
            kind: BivariateKind::ConstantMinusQ { constant },
            eval: Arc::new(move |_, h| constant - qe(h)),
            d_rho: Arc::new(|_, _| 0.0),
            d_h: Arc::new(move |_, h| -qd(h)),
        }
    }

    pub fn power_product(coeff: f64, rho_exponent: f64, h_exponent: f64) -> Self {
        let (c, a, b) = (coeff, rho_exponent, h_exponent);
        Self {
            name: format!("{c}*rho^{a}*h^{b}"),
            kind: BivariateKind::PowerProduct {
                coeff: c,
                rho_exponent: a,
                h_exponent: b,
            },
            eval: Arc::new(move |r, h| c * r.powf(a) * h.powf(b)),
            d_rho: Arc::new(move |r, h| c * a * r.powf(a - 1.0) * h.powf(b)),
            d_h: Arc::new(move |r, h| c * b * r.powf(a) * h.powf(b - 1.0)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> BivariateKind {
        self.kind
    }

    pub fn eval(&self, rho: f64, h: f64) -> f64 {
        (self.eval)(rho, h)
    }

    pub fn d_rho(&self, rho: f64, h: f64) -> f64 {
        (self.d_rho)(rho, h)
    }

    pub fn d_h(&self, rho: f64, h: f64) -> f64 {
        (self.d_h)(rho, h)
    }
}

/// The complete set of model functions.
#[derive(Debug, Clone)]
pub struct ClosureSet {
    /// Hesitation-to-offset map `q(h)`.
    pub q: ScalarClosure,
    /// Density-to-hesitation map `h(ρ)`.
    pub h: ScalarClosure,
    /// Equilibrium hesitation `H(ρ)`.
    pub h_eq: Option<ScalarClosure>,
    /// Equilibrium velocity `V_eq(ρ)`, decreasing.
    pub v_eq: Option<ScalarClosure>,
    /// Velocity family `V_C(ρ, h)`.
    pub vc: Option<BivariateClosure>,
}

impl ClosureSet {
    pub fn new(q: ScalarClosure, h: ScalarClosure) -> Self {
        Self {
            q,
            h,
            h_eq: None,
            v_eq: None,
            vc: None,
        }
    }

    /// Power laws `q(h) = h^q_exp`, `h(ρ) = ρ^h_exp`.
    pub fn power(q_exp: f64, h_exp: f64) -> Result<Self> {
        Ok(Self::new(
            ScalarClosure::power(q_exp, 1.0)?,
            ScalarClosure::power(h_exp, 1.0)?,
        ))
    }

    pub fn with_h_eq(mut self, h_eq: ScalarClosure) -> Self {
        self.h_eq = Some(h_eq);
        self
    }

    pub fn with_v_eq(mut self, v_eq: ScalarClosure) -> Self {
        self.v_eq = Some(v_eq);
        self
    }

    pub fn with_vc(mut self, vc: BivariateClosure) -> Self {
        self.vc = Some(vc);
        self
    }

    pub fn h_eq(&self) -> Result<&ScalarClosure> {
        self.h_eq.as_ref().ok_or(TomError::Capability {
            closure: "closure set".into(),
            what: "an equilibrium hesitation H",
        })
    }

    pub fn v_eq(&self) -> Result<&ScalarClosure> {
        self.v_eq.as_ref().ok_or(TomError::Capability {
            closure: "closure set".into(),
            what: "an equilibrium velocity V_eq",
        })
    }

    pub fn vc(&self) -> Result<&BivariateClosure> {
        self.vc.as_ref().ok_or(TomError::Capability {
            closure: "closure set".into(),
            what: "a velocity family V_C",
        })
    }

    /// ARZ hesitation `P(ρ) = q(H(ρ))`.
    pub fn p(&self, rho: f64) -> Result<f64> {
        self.q.eval(self.h_eq()?.eval(rho)?)
    }

    /// `P'(ρ) = q'(H(ρ)) H'(ρ)`.
    pub fn p_d1(&self, rho: f64) -> Result<f64> {
        let h_eq = self.h_eq()?;
        Ok(self.q.d1(h_eq.eval(rho)?)? * h_eq.d1(rho)?)
    }

    /// Equilibrium deviation `W(ρ) = ρ (H(ρ) − h(ρ))`.
    pub fn w_eq(&self, rho: f64) -> Result<f64> {
        Ok(rho * (self.h_eq()?.eval(rho)? - self.h.eval(rho)?))
    }

    pub fn w_eq_d1(&self, rho: f64) -> Result<f64> {
        let h_eq = self.h_eq()?;
        Ok(h_eq.eval(rho)? - self.h.eval(rho)? + rho * (h_eq.d1(rho)? - self.h.d1(rho)?))
    }
}

/// Outcome of one closure check at one sample point.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCheck {
    pub closure: &'static str,
    pub x: f64,
    pub monotone: bool,
    /// `None` when the closure has no second derivative.
    pub convex: Option<bool>,
    pub inverse_residual: Option<f64>,
    pub d1_fd_residual: f64,
    pub d2_fd_residual: Option<f64>,
    pub messages: Vec<String>,
    pub error: Option<TomError>,
}

impl SampleCheck {
    pub fn passed(&self) -> bool {
        self.error.is_none()
            && self.monotone
            && self.convex != Some(false)
            && self.inverse_residual.is_none_or(|r| r <= 1e-12)
            && self.d1_fd_residual <= FD_TOL
            && self.d2_fd_residual.is_none_or(|r| r <= FD_TOL)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub samples: Vec<SampleCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.samples.iter().all(SampleCheck::passed)
    }

    pub fn messages(&self) -> impl Iterator<Item = &str> {
        self.samples
            .iter()
            .flat_map(|s| s.messages.iter().map(String::as_str))
    }
}

const FD_TOL: f64 = 1e-6;

const CONVEXITY_MSG: &str =
    "convexity assumption q''>=0 violated; genuine-nonlinearity sign must be re-verified pointwise";

/// Checks monotonicity, convexity, inverse round trips and finite-difference
/// consistency of `q` (at `h_samples`) and of `h`, `H`, `V_eq` (at `rho_samples`).
pub fn validate_closure_set(
    cs: &ClosureSet,
    rho_samples: &[f64],
    h_samples: &[f64],
) -> ValidationReport {
    let mut samples = Vec::new();
    for &h in h_samples {
        samples.push(check_sample("q", &cs.q, h, Monotone::Increasing));
    }
    for &rho in rho_samples {
        samples.push(check_sample("h", &cs.h, rho, Monotone::Increasing));
        if let Some(h_eq) = &cs.h_eq {
            samples.push(check_sample("H", h_eq, rho, Monotone::Increasing));
        }
        if let Some(v_eq) = &cs.v_eq {
            samples.push(check_sample("V_eq", v_eq, rho, Monotone::Decreasing));
        }
    }
    ValidationReport { samples }
}

#[derive(Clone, Copy)]
enum Monotone {
    Increasing,
    Decreasing,
}

fn check_sample(label: &'static str, f: &ScalarClosure, x: f64, dir: Monotone) -> SampleCheck {
    let mut out = SampleCheck {
        closure: label,
        x,
        monotone: false,
        convex: None,
        inverse_residual: None,
        d1_fd_residual: f64::NAN,
        d2_fd_residual: None,
        messages: Vec::new(),
        error: None,
    };
    let fx = match f.eval(x) {
        Ok(v) => v,
        Err(e) => {
            out.error = Some(e);
            return out;
        }
    };
    let d1 = (f.d1)(x);
    out.monotone = match dir {
        Monotone::Increasing => d1 > 0.0,
        Monotone::Decreasing => d1 < 0.0,
    };
    if !out.monotone {
        out.messages
            .push(format!("{label}: monotonicity violated at {x} (derivative {d1})"));
    }

    let delta = 1e-4 * x.abs().max(1e-2);
    let delta = if f.domain.contains(x - delta) && f.domain.contains(x + delta) {
        delta
    } else {
        0.25 * (x - f.domain.lo).min(f.domain.hi - x)
    };
    let (fm, fp) = ((f.eval)(x - delta), (f.eval)(x + delta));
    let scale = d1.abs().max(1.0);
    out.d1_fd_residual = ((fp - fm) / (2.0 * delta) - d1).abs() / scale;

    if let Some(d2f) = &f.d2 {
        let d2 = d2f(x);
        let wide = 10.0 * delta;
        let wide = if f.domain.contains(x - wide) { wide } else { delta };
        let fd2 = ((f.eval)(x + wide) - 2.0 * fx + (f.eval)(x - wide)) / (wide * wide);
        let curvature_scale = d2.abs().max(fx.abs() / (x * x).max(1e-300)).max(1e-12);
        out.d2_fd_residual = Some((fd2 - d2).abs() / curvature_scale);
        if matches!(dir, Monotone::Increasing) {
            let convex = d2 >= 0.0;
            out.convex = Some(convex);
            if !convex {
                if label == "q" {
                    out.messages.push(CONVEXITY_MSG.to_string());
                } else {
                    out.messages.push(format!(
                        "convexity assumption {label}''>=0 violated; genuine-nonlinearity sign must be re-verified pointwise"
                    ));
                }
            }
        }
    }

    if f.inverse.is_some() {
        match f.inverse(fx) {
            Ok(back) => out.inverse_residual = Some((back - x).abs() / x.abs().max(f64::MIN_POSITIVE)),
            Err(e) => out.error = Some(e),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_identity() {
        let f = make_power_closure(1.0, 1.0).unwrap();
        assert_eq!(f.eval(0.7).unwrap(), 0.7);
    }

    #[test]
    fn power_three_halves_matches_squaring_oracle() {
        // 0.8^{3/2} = 0.8 * sqrt(0.8); sqrt by Newton iteration
        let mut s: f64 = 1.0;
        for _ in 0..60 {
            s = 0.5 * (s + 0.8 / s);
        }
        let oracle = 0.8 * s;
        let f = make_power_closure(1.5, 1.0).unwrap();
        let v = f.eval(0.8).unwrap();
        assert!((v - oracle).abs() < 1e-15);
        assert!((v - 0.715542).abs() < 5e-7);
    }

    #[test]
    fn square_inverse() {
        let f = make_power_closure(2.0, 1.0).unwrap();
        assert!((f.inverse(0.25).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(matches!(make_power_closure(0.0, 1.0), Err(TomError::InvalidParameter(_))));
        assert!(matches!(make_power_closure(1.0, -2.0), Err(TomError::InvalidParameter(_))));
    }

    #[test]
    fn boundary_is_a_domain_error() {
        let f = make_power_closure(0.5, 1.0).unwrap();
        assert!(matches!(f.eval(0.0), Err(TomError::Domain { .. })));
        assert!(matches!(f.d1(-1.0), Err(TomError::Domain { .. })));
        assert!(f.inverse(-0.1).is_err());
    }

    #[test]
    fn bisection_fallback_inverts_custom_closure() {
        let f = ScalarClosure::custom("x^3+x", |x| x * x * x + x, |x| 3.0 * x * x + 1.0);
        for &x in &[1e-3, 0.2, 1.0, 7.5, 40.0] {
            let y = x * x * x + x;
            let back = f.inverse(y).unwrap();
            assert!((back - x).abs() / x < 1e-12, "{x} -> {back}");
        }
        assert!(f.inverse(-1.0).is_err());
    }

    #[test]
    fn missing_second_derivative_is_a_capability_error() {
        let f = ScalarClosure::custom("lin", |x| x, |_| 1.0);
        assert!(matches!(f.d2(0.5), Err(TomError::Capability { .. })));
    }

    #[test]
    fn linear_closures_validate_cleanly() {
        let cs = ClosureSet::power(1.0, 1.0).unwrap();
        let rhos: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
        let report = validate_closure_set(&cs, &rhos, &rhos);
        assert_eq!(report.samples.len(), 18);
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn concave_q_is_flagged() {
        let cs = ClosureSet::power(0.5, 1.0).unwrap();
        let report = validate_closure_set(&cs, &[0.5], &[0.5]);
        assert!(!report.all_passed());
        assert!(report.messages().any(|m| m == CONVEXITY_MSG));
        // d²/dh² h^{1/2} = -h^{-3/2}/4
        assert!((cs.q.d2(0.5).unwrap() + 0.25 * 0.5f64.powf(-1.5)).abs() < 1e-14);
    }

    #[test]
    fn empty_samples_give_empty_report() {
        let cs = ClosureSet::power(1.0, 1.0).unwrap();
        assert!(validate_closure_set(&cs, &[], &[]).samples.is_empty());
    }

    #[test]
    fn out_of_domain_sample_is_local() {
        let cs = ClosureSet::power(1.0, 1.0).unwrap();
        let report = validate_closure_set(&cs, &[-0.5, 0.5], &[]);
        assert!(report.samples[0].error.is_some());
        assert!(report.samples[1].passed());
    }

    #[test]
    fn derived_members() {
        let cs = ClosureSet::power(2.0, 2.0)
            .unwrap()
            .with_h_eq(ScalarClosure::power(1.0, 1.0).unwrap());
        for &rho in &[0.1, 0.4, 0.9] {
            let w = cs.w_eq(rho).unwrap();
            let h_eq = cs.h_eq().unwrap().eval(rho).unwrap();
            assert!((w / rho + cs.h.eval(rho).unwrap() - h_eq).abs() < 1e-15);
            assert!((cs.p_d1(rho).unwrap() - 2.0 * rho).abs() < 1e-14);
        }
    }
}
