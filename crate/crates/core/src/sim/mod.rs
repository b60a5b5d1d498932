//! Monte Carlo simulation of N-level repeater chains.
//!
//! [`run_trial`] simulates from the all-vacuum state to the first terminal
//! link; [`estimate_rate`] turns trials (or one long trajectory) into a
//! rate with a standard error; [`sweep`] runs a list of grid points with
//! per-point seeds derived from one base seed.

mod chain;
mod estimate;
mod sweep;
mod trial;

pub use chain::{ChainState, Delivery, Link, Segment, StepReport};
pub use estimate::{
    estimate_rate, independent_trial_sums, Budget, EstimateMethod, RateEstimate, BATCH_COUNT,
};
pub use sweep::{sweep, sweep_point, SweepPoint, SweepRow};
pub use trial::{
    min_success_time, run_trial, run_trial_with, TrialLimits, TrialOutcome, TrialResult,
    DEFAULT_MAX_TIME,
};

/// Connection policy at a node; see [`crate::Architecture`].
pub type Policy = crate::model::Architecture;
