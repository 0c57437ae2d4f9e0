//! Scenario configuration files (JSON, unknown fields rejected).

use std::path::Path;

use colreg_risk::automaton::AutomatonConfig;
use colreg_risk::colregs::ComfortZone;
use colreg_risk::estimator::{Method, KDE_MIN_SAMPLES};
use colreg_risk::kinematics::VesselState;
use colreg_risk::sampling::{make_uncertainty, Interpretation, Perturber, StateUncertainty};
use serde::Deserialize;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OwnShip {
    pub north_m: f64,
    pub east_m: f64,
    pub course_deg: f64,
    pub speed_mps: f64,
    /// Own-ship dispersion, used as given (not scaled by alpha).
    #[serde(default)]
    pub diag: Option<[f64; 4]>,
}

/// Target given either by absolute position or relative to own ship.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Absolute(AbsoluteTarget),
    Relative(RelativeTarget),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsoluteTarget {
    pub north_m: f64,
    pub east_m: f64,
    pub course_deg: f64,
    pub speed_mps: f64,
}

/// Bearing relative to own ship's heading, plus range.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeTarget {
    pub bearing_deg: f64,
    pub range_m: f64,
    pub course_deg: f64,
    pub speed_mps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InterpretationField {
    #[default]
    StdDev,
    Variance,
}

impl From<InterpretationField> for Interpretation {
    fn from(v: InterpretationField) -> Self {
        match v {
            InterpretationField::StdDev => Interpretation::StdDev,
            InterpretationField::Variance => Interpretation::Variance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodField {
    Kde,
    Des,
}

impl From<MethodField> for Method {
    fn from(v: MethodField) -> Self {
        match v {
            MethodField::Kde => Method::Kde,
            MethodField::Des => Method::Des,
        }
    }
}

impl From<Method> for MethodField {
    fn from(v: Method) -> Self {
        match v {
            Method::Kde => MethodField::Kde,
            Method::Des => MethodField::Des,
        }
    }
}

fn default_methods() -> Vec<MethodField> {
    vec![MethodField::Kde, MethodField::Des]
}

fn default_t_aware() -> f64 {
    600.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub own_ship: OwnShip,
    pub target: Target,
    /// Target dispersion of north, east, course and speed before scaling.
    pub diag: [f64; 4],
    pub alpha_list: Vec<f64>,
    #[serde(default)]
    pub interpretation: InterpretationField,
    pub d_act_m: f64,
    #[serde(default)]
    pub d_aware_m: Option<f64>,
    #[serde(default = "default_t_aware")]
    pub t_aware_s: f64,
    #[serde(default)]
    pub t_act_s: Option<f64>,
    pub n_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodField>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message)))
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.alpha_list.is_empty() {
            return Err(CliError::config("alpha_list: must not be empty"));
        }
        if let Some(a) = self.alpha_list.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(CliError::config(format!(
                "alpha_list: {a} is not a non-negative number"
            )));
        }
        if self.n_samples == 0 {
            return Err(CliError::config("n_samples: must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(CliError::config("methods: must not be empty"));
        }
        if self.methods.contains(&MethodField::Kde) && self.n_samples < KDE_MIN_SAMPLES {
            return Err(CliError::config(format!(
                "n_samples: the kde method needs at least {KDE_MIN_SAMPLES} samples"
            )));
        }
        if self.diag.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(CliError::config("diag: entries must be non-negative"));
        }
        self.zone()?;
        self.automaton()?;
        self.own_state()?;
        self.target_state()?;
        self.own_uncertainty()?;
        Ok(())
    }

    pub fn zone(&self) -> CliResult<ComfortZone> {
        ComfortZone::new(self.d_act_m, self.t_aware_s).map_err(|e| CliError::config(format!("d_act_m/t_aware_s: {e}")))
    }

    pub fn automaton(&self) -> CliResult<AutomatonConfig> {
        let base = AutomatonConfig::from_zone(&self.zone()?);
        AutomatonConfig::new(
            self.d_aware_m.unwrap_or(base.d_aware),
            self.d_act_m,
            self.t_aware_s,
            self.t_act_s.unwrap_or(base.t_act),
        )
        .map_err(|e| CliError::config(format!("d_aware_m/t_act_s: {e}")))
    }

    pub fn own_state(&self) -> CliResult<VesselState> {
        let o = &self.own_ship;
        VesselState::new(o.north_m, o.east_m, o.course_deg, o.speed_mps)
            .map_err(|e| CliError::config(format!("own_ship: {e}")))
    }

    /// Target state; relative placement is rotated by own ship's course.
    pub fn target_state(&self) -> CliResult<VesselState> {
        let own = self.own_state()?;
        let state = match self.target {
            Target::Absolute(t) => VesselState::new(t.north_m, t.east_m, t.course_deg, t.speed_mps),
            Target::Relative(t) => {
                if !(t.range_m > 0.0) {
                    return Err(CliError::config("target.range_m: must be positive"));
                }
                let b = (t.bearing_deg + own.course).to_radians();
                VesselState::new(
                    own.north + t.range_m * b.cos(),
                    own.east + t.range_m * b.sin(),
                    t.course_deg,
                    t.speed_mps,
                )
            }
        };
        state.map_err(|e| CliError::config(format!("target: {e}")))
    }

    pub fn own_uncertainty(&self) -> CliResult<StateUncertainty> {
        match self.own_ship.diag {
            None => Ok(StateUncertainty::ZERO),
            Some(d) => make_uncertainty(d, 1.0, self.interpretation.into())
                .map_err(|e| CliError::config(format!("own_ship.diag: {e}"))),
        }
    }

    /// Own ship and target error models for one scale factor.
    pub fn perturbers(&self, alpha: f64) -> CliResult<(Perturber, Perturber)> {
        let unc = make_uncertainty(self.diag, alpha, self.interpretation.into())
            .map_err(|e| CliError::config(format!("diag: {e}")))?;
        Ok((
            Perturber::new(self.own_state()?, self.own_uncertainty()?),
            Perturber::new(self.target_state()?, unc),
        ))
    }
}
