//! TOML scenario configuration and its validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Parse(String),
    #[error("invalid configuration field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), message: message.into() }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    VerifyTorsion,
    CheckVariation,
    ReduceRoundtrip,
    FlowW345,
    FlowGh,
    CurvatureCheck,
    FunctionalSigns,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::VerifyTorsion,
        Scenario::CheckVariation,
        Scenario::ReduceRoundtrip,
        Scenario::FlowW345,
        Scenario::FlowGh,
        Scenario::CurvatureCheck,
        Scenario::FunctionalSigns,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::VerifyTorsion => "verify-torsion",
            Scenario::CheckVariation => "check-variation",
            Scenario::ReduceRoundtrip => "reduce-roundtrip",
            Scenario::FlowW345 => "flow-w345",
            Scenario::FlowGh => "flow-gh",
            Scenario::CurvatureCheck => "curvature-check",
            Scenario::FunctionalSigns => "functional-signs",
        }
    }

    /// Tolerance keys with their default values; the first entry is the one
    /// set by `--tolerance`.
    pub fn tolerances(self) -> &'static [(&'static str, f64)] {
        match self {
            Scenario::VerifyTorsion => &[("torsion", 1e-10), ("invariants", 1e-10), ("tau3_orthogonality", 1e-10)],
            Scenario::CheckVariation => &[("min_order", 1.9), ("gradient_consistency", 1e-10)],
            Scenario::ReduceRoundtrip => {
                &[("roundtrip", 1e-10), ("metric_splitting", 1e-10), ("hodge", 1e-10), ("variation_order", 1.9)]
            }
            Scenario::FlowW345 => &[
                ("decay_rate", 1e-6),
                ("functional_monotone", 1e-8),
                ("lambda_exact", 1e-8),
                ("closed_vs_full", 1e-8),
            ],
            Scenario::FlowGh => &[("trace_identity", 1e-10), ("functional_monotone", 1e-8), ("mean_drift", 1e-9)],
            Scenario::CurvatureCheck => &[("scalar_curvature", 1e-4), ("min_order", 3.7)],
            Scenario::FunctionalSigns => &[("zero_level", 1e-12), ("reference", 1e-12)],
        }
    }

    pub fn default_samples(self) -> usize {
        match self {
            Scenario::VerifyTorsion => 100,
            Scenario::CheckVariation => 25,
            Scenario::ReduceRoundtrip => 20,
            Scenario::FlowW345 => 50,
            Scenario::FlowGh => 10,
            Scenario::CurvatureCheck => 1,
            Scenario::FunctionalSigns => 1000,
        }
    }

    fn uses(self, block: &str) -> bool {
        match block {
            "initial" => matches!(self, Scenario::FlowW345 | Scenario::FlowGh),
            "flow" => matches!(self, Scenario::FlowW345 | Scenario::FlowGh),
            "grid" => matches!(self, Scenario::FlowGh | Scenario::CurvatureCheck),
            _ => true,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum FlowMode {
    #[default]
    Homogeneous,
    Grid,
}

/// Explicit initial data; anything left out is drawn from the seed.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub lambda: Option<f64>,
    /// Six coefficients of `θ`.
    pub theta: Option<Vec<f64>>,
    /// Twenty coefficients of `ν₃` in lexicographic order.
    pub nu3: Option<Vec<f64>>,
    /// Fifteen coefficients of `F₀` in lexicographic order.
    pub f011: Option<Vec<f64>>,
    /// Row-major 6x6 initial metric.
    pub metric: Option<Vec<f64>>,
    /// Fiber factor for the GH flow.
    pub h: Option<f64>,
    /// Fifteen coefficients of the GH curvature form (the harmonic part in grid mode).
    pub curvature: Option<Vec<f64>>,
    /// Scale applied to randomly drawn torsion or curvature data.
    pub scale: Option<f64>,
    /// Amplitude of the grid-mode perturbations of `g`, `h` and `η`.
    pub amplitude: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FlowSettings {
    #[serde(default)]
    pub mode: FlowMode,
    pub t_end: Option<f64>,
    pub dt_initial: Option<f64>,
    pub dt_min: Option<f64>,
    pub dt_max: Option<f64>,
    /// Local error bound of the step-doubling controller.
    pub step_tolerance: Option<f64>,
    pub h_floor: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSettings {
    /// Active axes, numbered 1 to 6.
    pub axes: Vec<usize>,
    pub points: usize,
    #[serde(default = "default_order")]
    pub order: u8,
    /// Resolutions used to estimate the convergence order.
    pub resolutions: Option<Vec<usize>>,
}

fn default_order() -> u8 {
    6
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    pub dir: Option<PathBuf>,
    /// Base name of the written files.
    pub name: Option<String>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub seed: u64,
    pub samples: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub initial: Option<InitialData>,
    pub flow: Option<FlowSettings>,
    pub grid: Option<GridSettings>,
    #[serde(default)]
    pub output: OutputSettings,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            seed: 0,
            samples: None,
            tolerances: BTreeMap::new(),
            initial: None,
            flow: None,
            grid: None,
            output: OutputSettings::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Read { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml(&text)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or_else(|| self.scenario.default_samples())
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances.get(key).copied().unwrap_or_else(|| {
            self.scenario
                .tolerances()
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .unwrap_or_else(|| panic!("unknown tolerance key {key}"))
        })
    }

    /// Sets the primary tolerance of the scenario.
    pub fn set_primary_tolerance(&mut self, value: f64) {
        let key = self.scenario.tolerances()[0].0;
        self.tolerances.insert(key.to_string(), value);
    }

    pub fn name(&self) -> String {
        self.output.name.clone().unwrap_or_else(|| self.scenario.as_str().to_string())
    }

    pub fn flow(&self) -> FlowSettings {
        self.flow.clone().unwrap_or_default()
    }

    pub fn initial(&self) -> InitialData {
        self.initial.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = self.scenario;
        for (block, present) in [("initial", self.initial.is_some()), ("flow", self.flow.is_some()), ("grid", self.grid.is_some())] {
            if present && !s.uses(block) {
                return Err(invalid(block, format!("not used by scenario {s}")));
            }
        }
        for (key, value) in &self.tolerances {
            if !s.tolerances().iter().any(|(k, _)| k == key) {
                let known: Vec<&str> = s.tolerances().iter().map(|(k, _)| *k).collect();
                return Err(invalid(&format!("tolerances.{key}"), format!("unknown key; expected one of {}", known.join(", "))));
            }
            if !(value.is_finite() && *value > 0.0) {
                return Err(invalid(&format!("tolerances.{key}"), "must be a positive number"));
            }
        }
        if self.samples == Some(0) {
            return Err(invalid("samples", "must be at least 1"));
        }
        if let Some(init) = &self.initial {
            for (field, value, len) in [
                ("initial.theta", &init.theta, 6),
                ("initial.nu3", &init.nu3, 20),
                ("initial.f011", &init.f011, 15),
                ("initial.metric", &init.metric, 36),
                ("initial.curvature", &init.curvature, 15),
            ] {
                if let Some(v) = value {
                    if v.len() != len {
                        return Err(invalid(field, format!("expected {len} entries, got {}", v.len())));
                    }
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(invalid(field, "entries must be finite"));
                    }
                }
            }
            if let Some(h) = init.h {
                if !(h > 0.0) {
                    return Err(invalid("initial.h", "must be positive"));
                }
            }
            for (field, v) in [("initial.scale", init.scale), ("initial.amplitude", init.amplitude)] {
                if let Some(v) = v {
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(invalid(field, "must be a nonnegative number"));
                    }
                }
            }
        }
        if let Some(flow) = &self.flow {
            if flow.mode == FlowMode::Grid && s != Scenario::FlowGh {
                return Err(invalid("flow.mode", "grid mode is only available for flow-gh"));
            }
            for (field, v) in [
                ("flow.t_end", flow.t_end),
                ("flow.dt_initial", flow.dt_initial),
                ("flow.dt_min", flow.dt_min),
                ("flow.dt_max", flow.dt_max),
                ("flow.step_tolerance", flow.step_tolerance),
                ("flow.h_floor", flow.h_floor),
            ] {
                if let Some(v) = v {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(invalid(field, "must be a positive number"));
                    }
                }
            }
        }
        if s == Scenario::FlowGh && self.flow().mode == FlowMode::Grid && self.grid.is_none() {
            return Err(invalid("grid", "required in grid mode"));
        }
        if let Some(grid) = &self.grid {
            if grid.axes.is_empty() || grid.axes.len() > 2 || grid.axes.iter().any(|&a| !(1..=6).contains(&a)) {
                return Err(invalid("grid.axes", "one or two distinct axes between 1 and 6"));
            }
            if grid.axes.len() == 2 && grid.axes[0] == grid.axes[1] {
                return Err(invalid("grid.axes", "axes must be distinct"));
            }
            if grid.order != 4 && grid.order != 6 {
                return Err(invalid("grid.order", "must be 4 or 6"));
            }
            for n in std::iter::once(&grid.points).chain(grid.resolutions.iter().flatten()) {
                if *n < 8 || !n.is_power_of_two() {
                    return Err(invalid("grid.points", format!("{n} is not a power of two of at least 8")));
                }
            }
            if let Some(r) = &grid.resolutions {
                if r.len() < 2 {
                    return Err(invalid("grid.resolutions", "need at least two resolutions"));
                }
            }
        }
        if let Some(name) = &self.output.name {
            if name.is_empty() || name.contains(['/', '\\']) {
                return Err(invalid("output.name", "must be a plain file name"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = ScenarioConfig::from_toml("scenario = \"verify-torsion\"\nseed = 7\n").unwrap();
        assert_eq!(c.scenario, Scenario::VerifyTorsion);
        assert_eq!(c.samples(), 100);
        assert_eq!(c.tolerance("torsion"), 1e-10);
        assert_eq!(c.name(), "verify-torsion");
    }

    #[test]
    fn missing_scenario_names_the_field() {
        let err = ScenarioConfig::from_toml("seed = 1\n").unwrap_err();
        assert!(err.to_string().contains("scenario"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ScenarioConfig::from_toml("scenario = \"flow-gh\"\ncolour = 1\n").is_err());
        let err = ScenarioConfig::from_toml("scenario = \"flow-gh\"\n[tolerances]\nbogus = 1e-3\n").unwrap_err();
        assert!(err.to_string().contains("tolerances.bogus"));
        let err = ScenarioConfig::from_toml("scenario = \"verify-torsion\"\n[grid]\naxes = [1]\npoints = 16\n").unwrap_err();
        assert!(err.to_string().contains("`grid`"));
    }

    #[test]
    fn shapes_are_checked() {
        let err = ScenarioConfig::from_toml("scenario = \"flow-w345\"\n[initial]\ntheta = [1.0, 2.0]\n").unwrap_err();
        assert!(err.to_string().contains("initial.theta"));
        let err = ScenarioConfig::from_toml("scenario = \"flow-gh\"\n[flow]\nmode = \"grid\"\n").unwrap_err();
        assert!(err.to_string().contains("`grid`"));
        let err =
            ScenarioConfig::from_toml("scenario = \"curvature-check\"\n[grid]\naxes = [1, 2]\npoints = 24\n").unwrap_err();
        assert!(err.to_string().contains("grid.points"));
    }
}
