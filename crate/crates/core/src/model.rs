//! Domain types shared by every other module.
//!
//! Time is a discrete clock in units of `L_0 / c`: one unit is the light
//! travel time over one fundamental segment (with `c` the in-fiber speed).

use alloc::vec::Vec;
use core::fmt;

/// Non-negative integer time in units of the segment light-travel time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct TimeUnits(pub u64);

impl TimeUnits {
    pub const ZERO: TimeUnits = TimeUnits(0);

    #[inline]
    pub const fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Elapsed time from `earlier` to `self`, clamped at zero.
    #[inline]
    pub fn since(self, earlier: TimeUnits) -> TimeUnits {
        TimeUnits(self.0.saturating_sub(earlier.0))
    }

    #[inline]
    pub fn saturating_add(self, other: TimeUnits) -> TimeUnits {
        TimeUnits(self.0.saturating_add(other.0))
    }
}

impl fmt::Display for TimeUnits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for TimeUnits {
    fn from(v: u64) -> Self {
        TimeUnits(v)
    }
}

/// A probability in `[0, 1]`, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self, ParamError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(ParamError::ProbabilityOutOfRange {
                name: "probability",
                value,
            })
        }
    }

    /// Like [`Probability::new`] but reports `name` on failure.
    pub fn named(name: &'static str, value: f64) -> Result<Self, ParamError> {
        Probability::new(value).map_err(|_| ParamError::ProbabilityOutOfRange { name, value })
    }

    #[inline]
    pub const fn get(self) -> f64 {
        self.0
    }

    /// The complement `1 - p`.
    #[inline]
    pub fn q(self) -> f64 {
        1.0 - self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = ParamError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Node wiring between the `n` memory elements of adjacent sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Architecture {
    /// Connections only between elements with the same address.
    Parallel,
    /// Connections between any two live links meeting at a node.
    Multiplexed,
}

impl Architecture {
    pub fn as_str(self) -> &'static str {
        match self {
            Architecture::Parallel => "parallel",
            Architecture::Multiplexed => "multiplexed",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Architecture {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "parallel" | "Parallel" => Ok(Architecture::Parallel),
            "multiplexed" | "Multiplexed" => Ok(Architecture::Multiplexed),
            _ => Err(ParamError::UnknownArchitecture),
        }
    }
}

/// Largest supported number of doubling levels (`2^16` segments).
pub const MAX_LEVELS: u32 = 16;

/// Everything needed to describe one repeater chain.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RepeaterParams {
    /// Number of doubling levels `N`; the chain has `2^N` segments.
    pub levels: u32,
    /// Memory elements per site `n`.
    pub elements: u32,
    /// Memory lifetime: a link of age `a` is usable iff `a <= tau`.
    pub tau: TimeUnits,
    /// Per-attempt generation probability `P_0` on one segment.
    pub p_gen: Probability,
    /// Connection probabilities `P_1 ..= P_N`.
    pub p_conn: Vec<Probability>,
    /// Classical signalling cost of a connection attempt at each level.
    pub level_latency: Vec<TimeUnits>,
    pub architecture: Architecture,
    /// Success probability of a final projective measurement, if any.
    #[cfg_attr(feature = "serde", serde(default))]
    pub final_projection: Option<Probability>,
    /// Whether elements not involved in a pending connection keep
    /// attempting generation while it is in flight.
    #[cfg_attr(feature = "serde", serde(default = "default_true"))]
    pub concurrent_generation: bool,
}

#[cfg(feature = "serde")]
fn default_true() -> bool {
    true
}

/// Latency of a level-`k` connection (1-based): `2^(k-1)` units, the
/// signal time across half of the joined span.
pub fn default_level_latency(levels: u32) -> Vec<TimeUnits> {
    (1..=levels).map(|k| TimeUnits(1u64 << (k - 1))).collect()
}

impl RepeaterParams {
    /// A chain with default latencies, multiplexed wiring, no final
    /// projection and concurrent generation enabled.
    pub fn new(
        levels: u32,
        elements: u32,
        tau: TimeUnits,
        p_gen: Probability,
        p_conn: Vec<Probability>,
    ) -> Self {
        RepeaterParams {
            levels,
            elements,
            tau,
            p_gen,
            level_latency: default_level_latency(levels),
            p_conn,
            architecture: Architecture::Multiplexed,
            final_projection: None,
            concurrent_generation: true,
        }
    }

    /// Single entanglement-length doubling (`N = 1`, `n = 1`).
    pub fn doubling(p0: Probability, p1: Probability, tau: TimeUnits) -> Self {
        RepeaterParams::new(1, 1, tau, p0, alloc::vec![p1])
    }

    pub fn with_architecture(mut self, architecture: Architecture) -> Self {
        self.architecture = architecture;
        self
    }

    pub fn with_elements(mut self, elements: u32) -> Self {
        self.elements = elements;
        self
    }

    pub fn with_tau(mut self, tau: TimeUnits) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_concurrent_generation(mut self, enabled: bool) -> Self {
        self.concurrent_generation = enabled;
        self
    }

    pub fn with_final_projection(mut self, epsilon: Option<Probability>) -> Self {
        self.final_projection = epsilon;
        self
    }

    pub fn with_level_latency(mut self, latency: Vec<TimeUnits>) -> Self {
        self.level_latency = latency;
        self
    }

    /// Number of fundamental segments, `2^N`.
    pub fn segments(&self) -> usize {
        1usize << self.levels
    }

    /// Checks every invariant and returns the params unchanged.
    pub fn validate(self) -> Result<Self, ParamError> {
        validate(self)
    }
}

/// Returns `params` unchanged if all invariants hold, otherwise the first
/// violated one.
pub fn validate(params: RepeaterParams) -> Result<RepeaterParams, ParamError> {
    if params.levels == 0 {
        return Err(ParamError::ZeroLevels);
    }
    if params.levels > MAX_LEVELS {
        return Err(ParamError::TooManyLevels(params.levels));
    }
    if params.elements == 0 {
        return Err(ParamError::ZeroElements);
    }
    check_probability("p_gen", params.p_gen)?;
    let n = params.levels as usize;
    if params.p_conn.len() != n {
        return Err(ParamError::LengthMismatch {
            name: "p_conn",
            expected: n,
            found: params.p_conn.len(),
        });
    }
    if params.level_latency.len() != n {
        return Err(ParamError::LengthMismatch {
            name: "level_latency",
            expected: n,
            found: params.level_latency.len(),
        });
    }
    for p in &params.p_conn {
        check_probability("p_conn", *p)?;
    }
    if let Some(eps) = params.final_projection {
        check_probability("final_projection", eps)?;
    }
    if let Some(level) = params.level_latency.iter().position(|l| l.0 == 0) {
        return Err(ParamError::ZeroLatency { level: level + 1 });
    }
    Ok(params)
}

fn check_probability(name: &'static str, p: Probability) -> Result<(), ParamError> {
    if (0.0..=1.0).contains(&p.0) {
        Ok(())
    } else {
        Err(ParamError::ProbabilityOutOfRange { name, value: p.0 })
    }
}

/// A link created at `created_at` is usable at `now` iff its age is at most
/// `tau`. Once this returns false it stays false for every later `now`.
#[inline]
pub fn is_usable(now: TimeUnits, created_at: TimeUnits, tau: TimeUnits) -> bool {
    now.since(created_at) <= tau
}

#[inline]
pub fn is_expired(now: TimeUnits, created_at: TimeUnits, tau: TimeUnits) -> bool {
    !is_usable(now, created_at, tau)
}

/// State of one memory element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElementState {
    #[default]
    Vacuum,
    /// End point of a link of the given doubling level.
    Entangled { created_at: TimeUnits, level: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryElement {
    pub address: u32,
    pub state: ElementState,
}

impl MemoryElement {
    pub fn vacuum(address: u32) -> Self {
        MemoryElement {
            address,
            state: ElementState::Vacuum,
        }
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self.state, ElementState::Vacuum)
    }

    /// Usable for scheduling at `now`; expired elements count as vacuum.
    pub fn is_usable(&self, now: TimeUnits, tau: TimeUnits) -> bool {
        match self.state {
            ElementState::Vacuum => false,
            ElementState::Entangled { created_at, .. } => is_usable(now, created_at, tau),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamError {
    ProbabilityOutOfRange {
        name: &'static str,
        value: f64,
    },
    LengthMismatch {
        name: &'static str,
        expected: usize,
        found: usize,
    },
    ZeroLevels,
    TooManyLevels(u32),
    ZeroElements,
    ZeroLatency {
        level: usize,
    },
    UnknownArchitecture,
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::ProbabilityOutOfRange { name, value } => {
                write!(f, "probability out of range: {name} = {value}")
            }
            ParamError::LengthMismatch {
                name,
                expected,
                found,
            } => write!(
                f,
                "list-length mismatch: {name} has {found} entries, expected {expected}"
            ),
            ParamError::ZeroLevels => f.write_str("levels must be at least 1"),
            ParamError::TooManyLevels(n) => {
                write!(f, "levels = {n} exceeds the supported maximum {MAX_LEVELS}")
            }
            ParamError::ZeroElements => f.write_str("elements per site must be at least 1"),
            ParamError::ZeroLatency { level } => {
                write!(f, "level_latency[{level}] must be at least 1 time unit")
            }
            ParamError::UnknownArchitecture => {
                f.write_str("unknown architecture (expected parallel or multiplexed)")
            }
        }
    }
}

impl core::error::Error for ParamError {}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn degenerate_deterministic_repeater_is_valid() {
        let params = RepeaterParams::doubling(p(1.0), p(1.0), TimeUnits(0));
        assert_eq!(validate(params.clone()), Ok(params));
    }

    #[test]
    fn probability_out_of_range() {
        let err = Probability::new(1.2).unwrap_err();
        assert!(err.to_string().contains("probability out of range"));
        assert!(Probability::new(-0.1).is_err());
        assert!(Probability::new(f64::NAN).is_err());
    }

    #[test]
    fn list_length_mismatch() {
        let params = RepeaterParams::new(3, 1, TimeUnits(5), p(0.1), vec![p(0.5), p(0.5)]);
        let err = validate(params).unwrap_err();
        assert!(err.to_string().contains("list-length mismatch"), "{err}");
        assert!(matches!(
            err,
            ParamError::LengthMismatch {
                name: "p_conn",
                expected: 3,
                found: 2
            }
        ));
    }

    #[test]
    fn latency_list_is_checked() {
        let params = RepeaterParams::new(2, 1, TimeUnits(5), p(0.1), vec![p(0.5), p(0.5)])
            .with_level_latency(vec![TimeUnits(1)]);
        assert!(matches!(
            validate(params),
            Err(ParamError::LengthMismatch {
                name: "level_latency",
                ..
            })
        ));
        let params = RepeaterParams::new(2, 1, TimeUnits(5), p(0.1), vec![p(0.5), p(0.5)])
            .with_level_latency(vec![TimeUnits(1), TimeUnits(0)]);
        assert_eq!(validate(params), Err(ParamError::ZeroLatency { level: 2 }));
    }

    #[test]
    fn zero_elements_rejected() {
        let params = RepeaterParams::doubling(p(0.5), p(0.5), TimeUnits(1)).with_elements(0);
        assert_eq!(validate(params), Err(ParamError::ZeroElements));
    }

    #[test]
    fn default_latency_doubles_per_level() {
        assert_eq!(
            default_level_latency(3),
            vec![TimeUnits(1), TimeUnits(2), TimeUnits(4)]
        );
    }

    #[test]
    fn expiry_boundary_is_inclusive() {
        let tau = TimeUnits(3);
        assert!(is_usable(TimeUnits(13), TimeUnits(10), tau));
        assert!(is_expired(TimeUnits(14), TimeUnits(10), tau));
        assert!(is_usable(TimeUnits(10), TimeUnits(10), TimeUnits(0)));
        assert!(is_expired(TimeUnits(11), TimeUnits(10), TimeUnits(0)));
    }

    #[test]
    fn expired_element_counts_as_vacuum() {
        let el = MemoryElement {
            address: 0,
            state: ElementState::Entangled {
                created_at: TimeUnits(2),
                level: 0,
            },
        };
        assert!(el.is_usable(TimeUnits(4), TimeUnits(2)));
        assert!(!el.is_usable(TimeUnits(5), TimeUnits(2)));
        assert!(!MemoryElement::vacuum(1).is_usable(TimeUnits(0), TimeUnits(9)));
    }

    #[test]
    fn architecture_parses() {
        assert_eq!("parallel".parse(), Ok(Architecture::Parallel));
        assert_eq!("Multiplexed".parse(), Ok(Architecture::Multiplexed));
        assert!("mesh".parse::<Architecture>().is_err());
    }
}
