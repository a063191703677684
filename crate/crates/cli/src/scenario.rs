//! Scenario files: TOML with a top-level `kind` and the sections `[model]`,
//! `[initial]`, `[numerics]` and `[output]`. Unknown keys are rejected.

use crate::CliError;
use serde::{Deserialize, Serialize};
use tomflow::macrosolve::{RelaxationVariant, SourceSign};
use tomflow::micro::SignConvention;
use tomflow::{BivariateClosure, ClosureSet, PrimState, ScalarClosure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Riemann,
    Fvm,
    Micro,
    Analyze,
    Sweep,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Riemann => "riemann",
            Kind::Fvm => "fvm",
            Kind::Micro => "micro",
            Kind::Analyze => "analyze",
            Kind::Sweep => "sweep",
        }
    }
}

fn one() -> f64 {
    1.0
}

/// Increasing scalar closure, `coeff·x^exponent` or `intercept + slope·x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClosureSpec {
    Power {
        exponent: f64,
        #[serde(default = "one")]
        coeff: f64,
    },
    Affine {
        intercept: f64,
        slope: f64,
    },
}

impl ClosureSpec {
    fn build(&self) -> tomflow::Result<ScalarClosure> {
        match *self {
            ClosureSpec::Power { exponent, coeff } => ScalarClosure::power(exponent, coeff),
            ClosureSpec::Affine { intercept, slope } => ScalarClosure::affine(intercept, slope),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VelocitySpec {
    Affine { c0: f64, c_rho: f64, c_h: f64 },
    ConstantMinusQ { constant: f64 },
    PowerProduct { coeff: f64, rho_exponent: f64, h_exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    pub q: ClosureSpec,
    pub h: ClosureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_eq: Option<ClosureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_eq: Option<ClosureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vc: Option<VelocitySpec>,
    #[serde(default = "one")]
    pub rho_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub rho: f64,
    pub v: f64,
    /// Defaults to the equilibrium hesitation when `[model].h_eq` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub left: StateSpec,
    pub right: StateSpec,
    #[serde(default)]
    pub x0: f64,
    /// Width of a tanh transition instead of a sharp jump.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Relaxation {
    #[default]
    None,
    WToW,
    ZArz,
    ZVc,
}

impl Relaxation {
    pub fn variant(self) -> RelaxationVariant {
        match self {
            Relaxation::None => RelaxationVariant::None,
            Relaxation::WToW => RelaxationVariant::WToW,
            Relaxation::ZArz => RelaxationVariant::ZArz,
            Relaxation::ZVc => RelaxationVariant::ZVc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    #[default]
    Paper,
    Dissipative,
}

impl Sign {
    pub fn source(self) -> SourceSign {
        match self {
            Sign::Paper => SourceSign::Paper,
            Sign::Dissipative => SourceSign::Dissipative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MicroSign {
    #[default]
    Consistent,
    Paper,
}

impl MicroSign {
    pub fn convention(self) -> SignConvention {
        match self {
            MicroSign::Consistent => SignConvention::Consistent,
            MicroSign::Paper => SignConvention::Paper,
        }
    }
}

/// Spelling of a unit enum value as it appears in scenario files.
pub fn key_name<T: Serialize>(value: &T) -> String {
    match toml::Value::try_from(value) {
        Ok(toml::Value::String(s)) => s,
        _ => String::new(),
    }
}

fn default_times() -> Vec<f64> {
    vec![0.3]
}

fn default_domain() -> [f64; 2] {
    [-1.0, 1.0]
}

fn default_points() -> usize {
    401
}

fn default_cells() -> usize {
    400
}

fn default_cfl() -> f64 {
    0.9
}

fn default_vehicles() -> Vec<usize> {
    vec![200, 400, 800, 1600]
}

fn default_window() -> [f64; 2] {
    [-0.4, 0.6]
}

fn default_extent() -> [f64; 2] {
    [0.5, 1.0]
}

fn default_rho_range() -> [f64; 2] {
    [0.05, 0.95]
}

fn default_rho_points() -> usize {
    19
}

/// Numerical parameters; each kind reads the keys relevant to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    /// Output times (riemann, fvm, micro); the last one is the horizon.
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Spatial window (riemann sampling, fvm and sweep grids).
    #[serde(default = "default_domain")]
    pub domain: [f64; 2],
    /// Sample count of the exact solution.
    #[serde(default = "default_points")]
    pub points: usize,
    /// Finite-volume cells, or reconstruction cells for micro.
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub relaxation: Relaxation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_list: Option<Vec<f64>>,
    #[serde(default)]
    pub source_sign: Sign,
    #[serde(default = "default_vehicles")]
    pub vehicles: Vec<usize>,
    #[serde(default)]
    pub micro_sign: MicroSign,
    /// Fixed RK4 step; automatic when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    /// Road lengths initially occupied by the left and right platoons.
    #[serde(default = "default_extent")]
    pub extent: [f64; 2],
    #[serde(default = "default_rho_range")]
    pub rho_range: [f64; 2],
    #[serde(default = "default_rho_points")]
    pub rho_points: usize,
    /// Velocity for the stability report when `V_eq` is absent.
    #[serde(default)]
    pub velocity: f64,
    /// Hesitation at which the consistency residuals are evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hesitation: Option<f64>,
}

impl Default for Numerics {
    fn default() -> Self {
        toml::from_str("").expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    pub model: Model,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Initial>,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub output: Output,
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Parses and validates scenario text.
pub fn parse_scenario_str(text: &str) -> Result<Scenario, CliError> {
    let sc: Scenario = toml::from_str(text).map_err(|e| CliError::Parse {
        line: e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1),
        message: e.message().trim().to_string(),
    })?;
    sc.validate()?;
    Ok(sc)
}

pub fn parse_scenario(path: &std::path::Path) -> Result<(Scenario, String), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok((parse_scenario_str(&text)?, text))
}

impl Scenario {
    /// Canonical TOML; parsing it gives back an equal scenario.
    pub fn to_normalized(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn closures(&self) -> Result<ClosureSet, CliError> {
        let m = &self.model;
        let q = m.q.build().map_err(|e| invalid("model.q", e.to_string()))?;
        let h = m.h.build().map_err(|e| invalid("model.h", e.to_string()))?;
        let mut cs = ClosureSet::new(q.clone(), h);
        if let Some(s) = &m.h_eq {
            cs = cs.with_h_eq(s.build().map_err(|e| invalid("model.h_eq", e.to_string()))?);
        }
        if let Some(s) = &m.v_eq {
            cs = cs.with_v_eq(s.build().map_err(|e| invalid("model.v_eq", e.to_string()))?);
        }
        if let Some(vc) = &m.vc {
            cs = cs.with_vc(match *vc {
                VelocitySpec::Affine { c0, c_rho, c_h } => BivariateClosure::affine(c0, c_rho, c_h),
                VelocitySpec::ConstantMinusQ { constant } => BivariateClosure::constant_minus_q(constant, &q),
                VelocitySpec::PowerProduct {
                    coeff,
                    rho_exponent,
                    h_exponent,
                } => BivariateClosure::power_product(coeff, rho_exponent, h_exponent),
            });
        }
        Ok(cs)
    }

    fn initial(&self) -> Result<&Initial, CliError> {
        self.initial
            .as_ref()
            .ok_or_else(|| invalid("initial", format!("a {} scenario needs an [initial] section", self.kind.name())))
    }

    /// Left and right primitive states, filling missing `h` from `H(ρ)`.
    pub fn states(&self, cs: &ClosureSet) -> Result<(PrimState, PrimState), CliError> {
        let ini = self.initial()?;
        let side = |s: &StateSpec, name: &str| -> Result<PrimState, CliError> {
            let field = format!("initial.{name}");
            let h = match (s.h, &cs.h_eq) {
                (Some(h), _) => h,
                (None, Some(he)) => he.eval(s.rho).map_err(|e| invalid(&field, e.to_string()))?,
                (None, None) => return Err(invalid(&format!("{field}.h"), "missing and [model].h_eq is not set")),
            };
            let u = PrimState::new(s.rho, s.v, h);
            match u.admissibility(cs, self.model.rho_max) {
                Ok(Some(w)) => log::warn!("{field}: {w}"),
                Ok(None) => {}
                Err(e) => return Err(invalid(&field, e.to_string())),
            }
            if !s.v.is_finite() {
                return Err(invalid(&format!("{field}.v"), "must be finite"));
            }
            Ok(u)
        };
        Ok((side(&ini.left, "left")?, side(&ini.right, "right")?))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let cs = self.closures()?;
        let n = &self.numerics;
        if !(self.model.rho_max > 0.0) {
            return Err(invalid("model.rho_max", "must be positive"));
        }
        let needs_times = matches!(self.kind, Kind::Riemann | Kind::Fvm | Kind::Micro);
        if needs_times {
            if n.times.is_empty() {
                return Err(invalid("numerics.times", "at least one output time is required"));
            }
            if n.times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
                return Err(invalid("numerics.times", "output times must be positive"));
            }
            if n.times.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(invalid("numerics.times", "output times must increase"));
            }
        }
        if !(n.domain[1] > n.domain[0]) {
            return Err(invalid("numerics.domain", "need domain[0] < domain[1]"));
        }
        if !(n.cfl > 0.0 && n.cfl <= tomflow::macrosolve::CFL_MAX) {
            return Err(invalid("numerics.cfl", format!("must lie in (0, {}]", tomflow::macrosolve::CFL_MAX)));
        }
        if let Some(e) = n.eps {
            if !(e > 0.0) {
                return Err(invalid("numerics.eps", "must be positive"));
            }
        }
        let need = |present: bool, field: &str, what: &str| {
            if present {
                Ok(())
            } else {
                Err(invalid(field, format!("required for {what}")))
            }
        };
        match self.kind {
            Kind::Riemann => {
                self.states(&cs)?;
                if n.points < 2 {
                    return Err(invalid("numerics.points", "need at least 2 samples"));
                }
            }
            Kind::Fvm => {
                self.states(&cs)?;
                if n.cells < 2 {
                    return Err(invalid("numerics.cells", "need at least 2 cells"));
                }
                let what = "the chosen relaxation";
                match n.relaxation {
                    Relaxation::None => {}
                    Relaxation::WToW => need(cs.h_eq.is_some(), "model.h_eq", what)?,
                    Relaxation::ZArz => {
                        need(cs.h_eq.is_some(), "model.h_eq", what)?;
                        need(cs.v_eq.is_some(), "model.v_eq", what)?;
                    }
                    Relaxation::ZVc => need(cs.vc.is_some(), "model.vc", what)?,
                }
                if n.relaxation != Relaxation::None {
                    need(n.eps.is_some(), "numerics.eps", what)?;
                }
            }
            Kind::Micro => {
                self.states(&cs)?;
                if n.vehicles.is_empty() || n.vehicles.iter().any(|&v| v < 4) {
                    return Err(invalid("numerics.vehicles", "each run needs at least 4 vehicles"));
                }
                if !(n.window[1] > n.window[0]) || n.cells < 1 {
                    return Err(invalid("numerics.window", "need an increasing window and cells >= 1"));
                }
                if !(n.extent[0] > 0.0 && n.extent[1] > 0.0) {
                    return Err(invalid("numerics.extent", "platoon lengths must be positive"));
                }
                if let Some(dt) = n.dt {
                    if !(dt > 0.0) {
                        return Err(invalid("numerics.dt", "must be positive"));
                    }
                }
            }
            Kind::Analyze => {
                let [a, b] = n.rho_range;
                if !(a > 0.0 && b > a) {
                    return Err(invalid("numerics.rho_range", "need 0 < rho_range[0] < rho_range[1]"));
                }
                if n.rho_points < 2 {
                    return Err(invalid("numerics.rho_points", "need at least 2 points"));
                }
                if cs.vc.is_some() && n.hesitation.is_none() {
                    need(cs.h_eq.is_some(), "numerics.hesitation", "the consistency residuals without h_eq")?;
                }
            }
            Kind::Sweep => {
                let list = n
                    .eps_list
                    .as_ref()
                    .ok_or_else(|| invalid("numerics.eps_list", "required for a sweep"))?;
                if list.is_empty() {
                    return Err(invalid("numerics.eps_list", "must not be empty"));
                }
                if let Some(e) = list.iter().find(|e| !(**e > 0.0)) {
                    return Err(invalid("numerics.eps_list", format!("eps = {e} must be positive")));
                }
                match n.relaxation {
                    Relaxation::WToW => need(cs.h_eq.is_some(), "model.h_eq", "a w_to_w sweep")?,
                    Relaxation::ZArz => {
                        need(cs.h_eq.is_some(), "model.h_eq", "a z_arz sweep")?;
                        need(cs.v_eq.is_some(), "model.v_eq", "a z_arz sweep")?;
                    }
                    other => {
                        return Err(invalid(
                            "numerics.relaxation",
                            format!("no equilibrium reference for {other:?}; use w_to_w or z_arz"),
                        ))
                    }
                }
                need(cs.v_eq.is_some() || n.relaxation == Relaxation::WToW, "model.v_eq", "a sweep")?;
                self.states(&cs)?;
                if n.cells < 2 {
                    return Err(invalid("numerics.cells", "need at least 2 cells"));
                }
                if !(n.times.last().copied().unwrap_or(0.0) > 0.0) {
                    return Err(invalid("numerics.times", "the sweep horizon must be positive"));
                }
            }
        }
        if let Some(w) = self.initial.as_ref().and_then(|i| i.smoothing) {
            if !(w > 0.0) {
                return Err(invalid("initial.smoothing", "must be positive"));
            }
        }
        Ok(())
    }
}
