//! Connection probabilities of the DLCZ atomic-ensemble repeater.
//!
//! With `c_0 = 0` (no dark counts):
//!
//! ```text
//! P_0 = eta_0 * exp(-gamma * L_0 / 2)
//! P_i = eta / (c_{i-1} + 1) * (1 - eta / (2 beta (c_{i-1} + 1)))
//! c_i = 2 c_{i-1} + 1 - eta / beta
//! ```
//!
//! `beta = 1` for photon-number-resolving detectors and `beta = 2` for
//! non-resolving ones; the latter need a final projective measurement that
//! succeeds with probability `1 / (c_N + 1)`.

use alloc::vec::Vec;
use core::fmt;

use crate::math::{exp, floor, ln};
use crate::model::{ParamError, Probability, TimeUnits, MAX_LEVELS};

/// Vacuum speed of light in km per millisecond.
pub const SPEED_OF_LIGHT_KM_PER_MS: f64 = 299.792_458;

/// Default fiber refractive index.
pub const DEFAULT_REFRACTIVE_INDEX: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Detector {
    /// Photon-number resolving, `beta = 1`.
    #[cfg_attr(feature = "serde", serde(rename = "pnrd", alias = "PNRD"))]
    Pnrd,
    /// Non-resolving, `beta = 2`.
    #[cfg_attr(feature = "serde", serde(rename = "nprd", alias = "NPRD"))]
    Nprd,
}

impl Detector {
    pub fn beta(self) -> f64 {
        match self {
            Detector::Pnrd => 1.0,
            Detector::Nprd => 2.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Detector::Pnrd => "pnrd",
            Detector::Nprd => "nprd",
        }
    }
}

impl core::str::FromStr for Detector {
    type Err = DlczError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pnrd" | "PNRD" => Ok(Detector::Pnrd),
            "nprd" | "NPRD" => Ok(Detector::Nprd),
            _ => Err(DlczError::UnknownDetector),
        }
    }
}

/// Physical description of a chain.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhysicalParams {
    /// Total length `L` in km.
    pub total_length_km: f64,
    /// Doubling levels `N`; segments have length `L / 2^N`.
    pub levels: u32,
    /// Fiber attenuation in dB/km.
    pub fiber_loss_db_per_km: f64,
    pub eta0: Probability,
    /// Retrieval and detection efficiency.
    pub eta: Probability,
    pub detector: Detector,
    #[cfg_attr(feature = "serde", serde(default = "default_refractive_index"))]
    pub refractive_index: f64,
}

#[cfg(feature = "serde")]
fn default_refractive_index() -> f64 {
    DEFAULT_REFRACTIVE_INDEX
}

impl PhysicalParams {
    /// Segment length `L_0` in km.
    pub fn segment_length_km(&self) -> f64 {
        self.total_length_km / (1u64 << self.levels) as f64
    }

    /// Attenuation `gamma` in nepers per km.
    pub fn gamma_per_km(&self) -> f64 {
        self.fiber_loss_db_per_km * ln(10.0) / 10.0
    }

    pub fn validate(&self) -> Result<(), DlczError> {
        if !(self.total_length_km > 0.0 && self.total_length_km.is_finite()) {
            return Err(DlczError::NonPositiveLength);
        }
        if self.levels == 0 || self.levels > MAX_LEVELS {
            return Err(DlczError::Levels(self.levels));
        }
        if !(self.fiber_loss_db_per_km >= 0.0 && self.fiber_loss_db_per_km.is_finite()) {
            return Err(DlczError::NegativeLoss);
        }
        if !(self.refractive_index >= 1.0 && self.refractive_index.is_finite()) {
            return Err(DlczError::RefractiveIndex);
        }
        Probability::named("eta0", self.eta0.get()).map_err(DlczError::Param)?;
        Probability::named("eta", self.eta.get()).map_err(DlczError::Param)?;
        Ok(())
    }
}

/// Output of [`derive`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DerivedProbabilities {
    pub p0: Probability,
    /// `P_1 ..= P_N`.
    pub p_conn: Vec<Probability>,
    /// `c_0 ..= c_N`.
    pub c: Vec<f64>,
    /// Final projection success probability (non-resolving detectors only).
    pub epsilon: Option<Probability>,
    /// `2^N (1 - eta_0)`.
    pub fidelity_bound: f64,
    /// Length of one clock unit (`L_0` at the in-fiber speed) in ms.
    pub time_unit_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DlczError {
    NonPositiveLength,
    Levels(u32),
    NegativeLoss,
    RefractiveIndex,
    UnknownDetector,
    /// The recursion left `[0, 1]`, which needs `eta / beta > 1`.
    ConnectionProbability {
        level: usize,
        value: f64,
    },
    Param(ParamError),
}

impl fmt::Display for DlczError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DlczError::NonPositiveLength => f.write_str("total length must be positive"),
            DlczError::Levels(n) => write!(f, "levels = {n} outside 1..={MAX_LEVELS}"),
            DlczError::NegativeLoss => f.write_str("fiber loss must be non-negative"),
            DlczError::RefractiveIndex => f.write_str("refractive index must be at least 1"),
            DlczError::UnknownDetector => f.write_str("unknown detector (expected pnrd or nprd)"),
            DlczError::ConnectionProbability { level, value } => {
                write!(
                    f,
                    "connection probability P_{level} = {value} outside [0, 1]"
                )
            }
            DlczError::Param(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DlczError {}

/// Runs the probability recursion for `phys`.
pub fn derive(phys: &PhysicalParams) -> Result<DerivedProbabilities, DlczError> {
    phys.validate()?;
    let l0 = phys.segment_length_km();
    let p0 = phys.eta0.get() * exp(-phys.gamma_per_km() * l0 / 2.0);
    let p0 = Probability::named("p0", p0).map_err(DlczError::Param)?;

    let eta = phys.eta.get();
    let beta = phys.detector.beta();
    let n = phys.levels as usize;
    let mut c = Vec::with_capacity(n + 1);
    let mut p_conn = Vec::with_capacity(n);
    c.push(0.0);
    for i in 1..=n {
        let prev = c[i - 1] + 1.0;
        let value = (eta / prev) * (1.0 - eta / (2.0 * beta * prev));
        let p = Probability::new(value)
            .ok()
            .filter(|p| p.get() > 0.0)
            .ok_or(DlczError::ConnectionProbability { level: i, value })?;
        p_conn.push(p);
        c.push(2.0 * c[i - 1] + 1.0 - eta / beta);
    }

    let epsilon = match phys.detector {
        Detector::Nprd => {
            Some(Probability::named("epsilon", 1.0 / (c[n] + 1.0)).map_err(DlczError::Param)?)
        }
        Detector::Pnrd => None,
    };

    Ok(DerivedProbabilities {
        p0,
        p_conn,
        c,
        epsilon,
        fidelity_bound: (1u64 << n) as f64 * (1.0 - phys.eta0.get()),
        time_unit_ms: l0 / (SPEED_OF_LIGHT_KM_PER_MS / phys.refractive_index),
    })
}

/// Converts a lifetime in ms to whole clock units (floored).
pub fn lifetime_to_units(tau_ms: f64, derived: &DerivedProbabilities) -> TimeUnits {
    ms_to_units(tau_ms, derived.time_unit_ms)
}

pub fn ms_to_units(tau_ms: f64, time_unit_ms: f64) -> TimeUnits {
    if tau_ms.is_nan() || tau_ms <= 0.0 {
        return TimeUnits(0);
    }
    let units = floor(tau_ms / time_unit_ms);
    if units >= u64::MAX as f64 {
        TimeUnits(u64::MAX)
    } else {
        TimeUnits(units as u64)
    }
}
