use alloc::vec;

use super::chain::ChainState;
use super::trial::{run_validated, TrialLimits};
use crate::model::{validate, ParamError, RepeaterParams, TimeUnits};
use crate::rng::stream_seed;
use crate::stats::{batch_means, TrialSums};

/// Number of batches used by the batch-means estimator.
pub const BATCH_COUNT: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Budget {
    /// Independent trials from vacuum, trial `i` seeded with
    /// `stream_seed(seed, i)`.
    Trials(u64),
    /// One trajectory of this many time units.
    Horizon(TimeUnits),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EstimateMethod {
    IndependentTrials,
    BatchMeans,
}

impl EstimateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateMethod::IndependentTrials => "independent_trials",
            EstimateMethod::BatchMeans => "batch_means",
        }
    }
}

/// Long-run success rate in successes per time unit. A confidence interval
/// is `mean_rate ± z * std_error`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateEstimate {
    pub mean_rate: f64,
    pub std_error: f64,
    pub trials_or_horizon: u64,
    pub method: EstimateMethod,
    /// Usable terminal successes counted.
    pub successes: u64,
    /// Trials that hit the time guard (independent trials only).
    pub truncated: u64,
    /// Mean time to success and its standard error (independent trials).
    pub mean_time: Option<f64>,
    pub mean_time_std_error: Option<f64>,
}

impl RateEstimate {
    pub fn no_successes(&self) -> bool {
        self.successes == 0
    }

    pub fn flag(&self) -> &'static str {
        if self.no_successes() {
            "no successes"
        } else if self.truncated > 0 {
            "truncated"
        } else {
            ""
        }
    }
}

/// Integer sums over trials `range` of an independent-trials estimate.
/// Sums over disjoint ranges merge into the same totals in any order.
pub fn independent_trial_sums(
    params: &RepeaterParams,
    seed: u64,
    range: core::ops::Range<u64>,
    limits: TrialLimits,
) -> TrialSums {
    let mut sums = TrialSums::default();
    for i in range {
        let r = run_validated(params.clone(), stream_seed(seed, i), limits);
        sums.push(r.time_to_success.0, r.usable(), !r.succeeded());
    }
    sums
}

impl RateEstimate {
    pub fn from_trial_sums(sums: &TrialSums) -> RateEstimate {
        let (rate, se) = sums.rate();
        RateEstimate {
            mean_rate: rate,
            std_error: se,
            trials_or_horizon: sums.trials,
            method: EstimateMethod::IndependentTrials,
            successes: sums.successes,
            truncated: sums.truncated,
            mean_time: Some(sums.mean_time()),
            mean_time_std_error: Some(sums.time_std_error()),
        }
    }
}

pub fn estimate_rate(
    params: &RepeaterParams,
    seed: u64,
    budget: Budget,
) -> Result<RateEstimate, ParamError> {
    let params = validate(params.clone())?;
    Ok(match budget {
        Budget::Trials(trials) => {
            let sums = independent_trial_sums(&params, seed, 0..trials, TrialLimits::default());
            RateEstimate::from_trial_sums(&sums)
        }
        Budget::Horizon(horizon) => batch_means_estimate(params, seed, horizon),
    })
}

/// Runs one trajectory to `horizon`, continuing after every terminal
/// success with whatever residual entanglement is left, and counts usable
/// deliveries in equal batches.
fn batch_means_estimate(params: RepeaterParams, seed: u64, horizon: TimeUnits) -> RateEstimate {
    let batches = BATCH_COUNT.min(horizon.0.max(1));
    let batch_len = horizon.0 / batches;
    let span = batch_len * batches;
    let mut counts = vec![0u64; batches as usize];
    let mut chain = ChainState::new(params, seed);
    let limit = TimeUnits(span);
    while let Some(report) = chain.advance(limit) {
        let usable = report.deliveries.iter().filter(|d| d.usable()).count() as u64;
        if usable > 0 {
            // Step t belongs to batch (t - 1) / batch_len.
            let b = ((report.time.0 - 1) / batch_len) as usize;
            counts[b] += usable;
        }
    }
    let total: u64 = counts.iter().sum();
    let (mean, se) = batch_means(&counts, batch_len);
    RateEstimate {
        mean_rate: mean,
        std_error: se,
        trials_or_horizon: span,
        method: EstimateMethod::BatchMeans,
        successes: total,
        truncated: 0,
        mean_time: None,
        mean_time_std_error: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Probability;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn deterministic_repeater_rates() {
        let params = RepeaterParams::doubling(p(1.0), p(1.0), TimeUnits(0));
        let e = estimate_rate(&params, 5, Budget::Trials(10)).unwrap();
        assert_eq!(e.mean_rate, 0.5);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.mean_time, Some(2.0));
        // Back-to-back: success every 2 units.
        let e = estimate_rate(&params, 5, Budget::Horizon(TimeUnits(6400))).unwrap();
        assert_eq!(e.successes, 3200);
        assert_eq!(e.mean_rate, 0.5);
    }

    #[test]
    fn zero_successes_are_flagged() {
        let params = RepeaterParams::doubling(p(0.0), p(1.0), TimeUnits(3));
        let e = estimate_rate(&params, 1, Budget::Horizon(TimeUnits(10_000))).unwrap();
        assert_eq!(e.mean_rate, 0.0);
        assert!(e.no_successes());
        assert_eq!(e.flag(), "no successes");
    }

    #[test]
    fn trial_sums_merge_in_any_order() {
        let params = RepeaterParams::doubling(p(0.3), p(0.6), TimeUnits(2));
        let limits = TrialLimits::default();
        let whole = independent_trial_sums(&params, 77, 0..300, limits);
        let a = independent_trial_sums(&params, 77, 0..120, limits);
        let b = independent_trial_sums(&params, 77, 120..300, limits);
        assert_eq!(b.merge(a), whole);
        assert_eq!(
            RateEstimate::from_trial_sums(&a.merge(b)),
            RateEstimate::from_trial_sums(&whole)
        );
    }
}
