use alloc::vec::Vec;

use super::chain::ChainState;
use crate::model::{validate, ParamError, RepeaterParams, TimeUnits};

/// Default guard against runs that never succeed.
pub const DEFAULT_MAX_TIME: TimeUnits = TimeUnits(1_000_000_000_000);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialLimits {
    pub max_time: TimeUnits,
}

impl Default for TrialLimits {
    fn default() -> Self {
        TrialLimits {
            max_time: DEFAULT_MAX_TIME,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Success,
    /// No terminal link by `max_time`.
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialResult {
    pub outcome: TrialOutcome,
    /// Time of the terminal success, or the guard time when truncated.
    pub time_to_success: TimeUnits,
    /// Index 0: generation attempts; index `k`: level-`k` connection attempts.
    pub attempts_by_level: Vec<u64>,
    pub expiries: u64,
    pub final_projection_passed: Option<bool>,
}

impl TrialResult {
    pub fn succeeded(&self) -> bool {
        self.outcome == TrialOutcome::Success
    }

    /// Success that also passed the final projection, if one was applied.
    pub fn usable(&self) -> bool {
        self.succeeded() && self.final_projection_passed != Some(false)
    }
}

/// Smallest possible success time: one generation step, the signalling
/// time of every level, and one step of eligibility delay between levels.
pub fn min_success_time(params: &RepeaterParams) -> TimeUnits {
    let latency: u64 = params.level_latency.iter().map(|l| l.0).sum();
    TimeUnits(1 + latency + (params.levels as u64 - 1))
}

pub fn run_trial(params: &RepeaterParams, seed: u64) -> Result<TrialResult, ParamError> {
    run_trial_with(params, seed, TrialLimits::default())
}

pub fn run_trial_with(
    params: &RepeaterParams,
    seed: u64,
    limits: TrialLimits,
) -> Result<TrialResult, ParamError> {
    let params = validate(params.clone())?;
    Ok(run_validated(params, seed, limits))
}

pub(crate) fn run_validated(params: RepeaterParams, seed: u64, limits: TrialLimits) -> TrialResult {
    let mut chain = ChainState::new(params, seed);
    loop {
        match chain.advance(limits.max_time) {
            None => {
                return TrialResult {
                    outcome: TrialOutcome::Truncated,
                    time_to_success: limits.max_time,
                    attempts_by_level: chain.attempts_by_level().to_vec(),
                    expiries: chain.expiries(),
                    final_projection_passed: None,
                }
            }
            Some(report) => {
                if let Some(first) = report.deliveries.first() {
                    return TrialResult {
                        outcome: TrialOutcome::Success,
                        time_to_success: first.time,
                        attempts_by_level: chain.attempts_by_level().to_vec(),
                        expiries: chain.expiries(),
                        final_projection_passed: first.projection,
                    };
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Architecture, Probability};
    use alloc::vec;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn deterministic_repeater_takes_two_units() {
        for tau in [0, 1, 5, 100] {
            let params = RepeaterParams::doubling(p(1.0), p(1.0), TimeUnits(tau));
            for seed in 0..20 {
                let r = run_trial(&params, seed).unwrap();
                assert_eq!(r.outcome, TrialOutcome::Success);
                assert_eq!(r.time_to_success, TimeUnits(2));
                assert_eq!(r.attempts_by_level, vec![2, 1]);
            }
        }
    }

    #[test]
    fn deterministic_three_level_chain_hits_lower_bound() {
        let params = RepeaterParams::new(3, 1, TimeUnits(100), p(1.0), vec![p(1.0); 3]);
        let r = run_trial(&params, 9).unwrap();
        assert_eq!(r.time_to_success, min_success_time(&params));
        assert_eq!(r.time_to_success, TimeUnits(10));
        // Segments 1, 2, 5 and 6 are fully vacuum again after the level-2
        // swaps and regenerate while the final swap is in flight.
        assert_eq!(r.attempts_by_level, vec![12, 4, 2, 1]);
    }

    #[test]
    fn impossible_generation_truncates() {
        let params = RepeaterParams::doubling(p(0.0), p(1.0), TimeUnits(3));
        let r = run_trial_with(
            &params,
            1,
            TrialLimits {
                max_time: TimeUnits(1000),
            },
        )
        .unwrap();
        assert_eq!(r.outcome, TrialOutcome::Truncated);
        assert_eq!(r.time_to_success, TimeUnits(1000));
    }

    #[test]
    fn invalid_params_are_rejected() {
        let params = RepeaterParams::doubling(p(0.5), p(1.0), TimeUnits(3)).with_elements(0);
        assert_eq!(run_trial(&params, 0), Err(ParamError::ZeroElements));
    }

    #[test]
    fn projection_outcome_is_reported() {
        let params = RepeaterParams::doubling(p(1.0), p(1.0), TimeUnits(0))
            .with_final_projection(Some(p(0.0)));
        let r = run_trial(&params, 4).unwrap();
        assert_eq!(r.final_projection_passed, Some(false));
        assert!(!r.usable());
        let params = params.with_final_projection(Some(p(1.0)));
        assert_eq!(
            run_trial(&params, 4).unwrap().final_projection_passed,
            Some(true)
        );
    }

    #[test]
    fn conservation_holds_at_every_step() {
        for arch in [Architecture::Parallel, Architecture::Multiplexed] {
            for conc in [true, false] {
                let params = RepeaterParams::new(3, 4, TimeUnits(20), p(0.3), vec![p(0.6); 3])
                    .with_architecture(arch)
                    .with_concurrent_generation(conc);
                let mut chain = ChainState::new(params, 11);
                let mut deliveries = 0;
                while chain.clock() < TimeUnits(20_000) {
                    let report = chain.advance(TimeUnits(20_000)).unwrap();
                    deliveries += report.deliveries.len();
                    chain.check_conservation().unwrap();
                }
                assert!(deliveries > 0);
            }
        }
    }
}
