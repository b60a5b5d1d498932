//! Config files.
//!
//! A config file is TOML restricted to scalar and array values, so every
//! key can be written either inside a `[section]` or as a dotted key
//! (`params.tau = 4`). Presets, the file given with `--config` and the
//! command-line flags are all [`ConfigFile`] layers; a later layer wins
//! field by field.

use std::path::{Path, PathBuf};

use repeater_core::dlcz::Detector;
use repeater_core::{Architecture, RepeaterParams, TimeUnits};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Seeds above `i64::MAX` are written as decimal strings, since TOML
    /// integers are signed 64-bit.
    #[serde(default, with = "seed_repr", skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub params: ParamsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalSection>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub sweep: AxesSection,
    #[serde(default, skip_serializing_if = "is_default")]
    pub budget: BudgetSection,
    #[serde(default, skip_serializing_if = "is_default")]
    pub output: OutputSection,
}

mod seed_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(u64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(seed: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
        match *seed {
            Some(v) if v > i64::MAX as u64 => s.serialize_str(&v.to_string()),
            Some(v) => s.serialize_u64(v),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(Some(v)),
            Repr::Text(t) => t.parse().map(Some).map_err(serde::de::Error::custom),
        }
    }
}

/// Repeater parameters; the keys are those of [`RepeaterParams`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_gen: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_conn: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_latency: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub architecture: Option<Architecture>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_projection: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concurrent_generation: Option<bool>,
}

/// Physical chain description; missing keys take the 1000 km, `N = 3`
/// defaults of [`PhysicalSection::default_values`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_length_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_loss_db_per_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector: Option<Detector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refractive_index: Option<f64>,
}

impl PhysicalSection {
    /// 1000 km, `N = 3`, 0.16 dB/km, `eta_0 = 0.01`, `eta = 0.9`,
    /// non-resolving detectors, refractive index 1.5.
    pub fn default_values() -> Self {
        PhysicalSection {
            total_length_km: Some(1000.0),
            levels: Some(3),
            fiber_loss_db_per_km: Some(0.16),
            eta0: Some(0.01),
            eta: Some(0.9),
            detector: Some(Detector::Nprd),
            refractive_index: Some(repeater_core::dlcz::DEFAULT_REFRACTIVE_INDEX),
        }
    }

    pub(crate) fn overlay(self, top: PhysicalSection) -> Self {
        PhysicalSection {
            total_length_km: top.total_length_km.or(self.total_length_km),
            levels: top.levels.or(self.levels),
            fiber_loss_db_per_km: top.fiber_loss_db_per_km.or(self.fiber_loss_db_per_km),
            eta0: top.eta0.or(self.eta0),
            eta: top.eta.or(self.eta),
            detector: top.detector.or(self.detector),
            refractive_index: top.refractive_index.or(self.refractive_index),
        }
    }
}

/// Sweep axes. The grid is the cross product in the order
/// architecture, elements, p_gen, p1, tau (or tau_ms), the last varying
/// fastest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxesSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub architecture: Option<Vec<Architecture>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_gen: Option<Vec<f64>>,
    /// Replaces `P_1` only; the higher levels keep `params.p_conn`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<u64>>,
    /// Lifetimes in ms, converted with the physical time unit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_ms: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// `top` wins wherever it sets a value. Setting either lifetime axis in
    /// `top` clears the other one from `self`.
    pub fn overlay(self, top: ConfigFile) -> ConfigFile {
        let p = self.params;
        let q = top.params;
        let a = self.sweep;
        let b = top.sweep;
        let lifetime_override = b.tau.is_some() || b.tau_ms.is_some();
        let (tau, tau_ms) = if lifetime_override {
            (b.tau, b.tau_ms)
        } else {
            (a.tau, a.tau_ms)
        };
        ConfigFile {
            preset: top.preset.or(self.preset),
            seed: top.seed.or(self.seed),
            params: ParamsSection {
                levels: q.levels.or(p.levels),
                elements: q.elements.or(p.elements),
                tau: q.tau.or(p.tau),
                p_gen: q.p_gen.or(p.p_gen),
                p_conn: q.p_conn.or(p.p_conn),
                level_latency: q.level_latency.or(p.level_latency),
                architecture: q.architecture.or(p.architecture),
                final_projection: q.final_projection.or(p.final_projection),
                concurrent_generation: q.concurrent_generation.or(p.concurrent_generation),
            },
            physical: match (self.physical, top.physical) {
                (Some(x), Some(y)) => Some(x.overlay(y)),
                (x, y) => y.or(x),
            },
            sweep: AxesSection {
                architecture: b.architecture.or(a.architecture),
                elements: b.elements.or(a.elements),
                p_gen: b.p_gen.or(a.p_gen),
                p1: b.p1.or(a.p1),
                tau,
                tau_ms,
            },
            budget: if top.budget.trials.is_some() || top.budget.horizon.is_some() {
                top.budget
            } else {
                self.budget
            },
            output: OutputSection {
                path: top.output.path.or(self.output.path),
                format: top.output.format.or(self.output.format),
            },
        }
    }
}

impl From<&RepeaterParams> for ParamsSection {
    fn from(p: &RepeaterParams) -> Self {
        ParamsSection {
            levels: Some(p.levels),
            elements: Some(p.elements),
            tau: Some(p.tau.0),
            p_gen: Some(p.p_gen.get()),
            p_conn: Some(p.p_conn.iter().map(|x| x.get()).collect()),
            level_latency: Some(p.level_latency.iter().map(|x| x.0).collect()),
            architecture: Some(p.architecture),
            final_projection: p.final_projection.map(|x| x.get()),
            concurrent_generation: Some(p.concurrent_generation),
        }
    }
}

/// Writes `params` as a config file containing only a `[params]` section.
pub fn params_to_toml(params: &RepeaterParams) -> Result<String, CliError> {
    ConfigFile {
        params: params.into(),
        ..ConfigFile::default()
    }
    .to_toml()
}

/// Reads the `[params]` section of a config file as complete parameters.
pub fn params_from_toml(text: &str) -> Result<RepeaterParams, CliError> {
    #[derive(Deserialize)]
    struct Wrapper {
        params: RepeaterParams,
    }
    let w: Wrapper = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(w.params)
}

pub(crate) fn time_units(v: &[u64]) -> Vec<TimeUnits> {
    v.iter().copied().map(TimeUnits).collect()
}
