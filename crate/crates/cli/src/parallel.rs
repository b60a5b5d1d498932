//! Multi-threaded sweeps with results identical to the sequential ones.

use rayon::prelude::*;
use repeater_core::model::validate;
use repeater_core::rng::stream_seed;
use repeater_core::sim::{
    estimate_rate, independent_trial_sums, Budget, RateEstimate, SweepPoint, SweepRow, TrialLimits,
};
use repeater_core::stats::TrialSums;
use repeater_core::{ParamError, RepeaterParams};

/// Trials per parallel work item.
const CHUNK: u64 = 4096;

/// [`estimate_rate`] with independent trials spread over threads. The
/// integer reduction makes the result bit-identical to the sequential one.
pub fn estimate_rate_parallel(
    params: &RepeaterParams,
    seed: u64,
    budget: Budget,
) -> Result<RateEstimate, ParamError> {
    match budget {
        Budget::Trials(trials) if trials > CHUNK => {
            let params = validate(params.clone())?;
            let chunks = trials.div_ceil(CHUNK);
            let sums = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let range = c * CHUNK..((c + 1) * CHUNK).min(trials);
                    independent_trial_sums(&params, seed, range, TrialLimits::default())
                })
                .reduce(TrialSums::default, TrialSums::merge);
            Ok(RateEstimate::from_trial_sums(&sums))
        }
        _ => estimate_rate(params, seed, budget),
    }
}

/// Same rows as [`repeater_core::sim::sweep`], in grid order.
pub fn sweep_parallel(points: &[SweepPoint], base_seed: u64) -> Vec<SweepRow> {
    points
        .par_iter()
        .enumerate()
        .map(|(index, point)| {
            let seed = stream_seed(base_seed, index as u64);
            SweepRow {
                index,
                seed,
                params: point.params.clone(),
                budget: point.budget,
                estimate: estimate_rate_parallel(&point.params, seed, point.budget)
                    .map_err(|e| e.to_string()),
            }
        })
        .collect()
}
