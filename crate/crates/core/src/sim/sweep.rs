use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::estimate::{estimate_rate, Budget, RateEstimate};
use crate::model::RepeaterParams;
use crate::rng::stream_seed;

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub params: RepeaterParams,
    pub budget: Budget,
}

/// Result row with a full echo of the inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub seed: u64,
    pub params: RepeaterParams,
    pub budget: Budget,
    /// Failures (e.g. invalid parameters) are reported per row.
    pub estimate: Result<RateEstimate, String>,
}

/// Runs one point; point `index` is seeded with `stream_seed(base_seed, index)`.
pub fn sweep_point(point: &SweepPoint, index: usize, base_seed: u64) -> SweepRow {
    let seed = stream_seed(base_seed, index as u64);
    SweepRow {
        index,
        seed,
        params: point.params.clone(),
        budget: point.budget,
        estimate: estimate_rate(&point.params, seed, point.budget).map_err(|e| e.to_string()),
    }
}

/// Sequential sweep in grid order. Never aborts on a failing point.
pub fn sweep(points: &[SweepPoint], base_seed: u64) -> Vec<SweepRow> {
    points
        .iter()
        .enumerate()
        .map(|(i, point)| sweep_point(point, i, base_seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Probability, TimeUnits};
    use crate::sim::estimate_rate;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn single_point_matches_direct_estimate() {
        let params = RepeaterParams::doubling(p(0.2), p(0.5), TimeUnits(2));
        let point = SweepPoint {
            params: params.clone(),
            budget: Budget::Trials(500),
        };
        let rows = sweep(&[point], 42);
        assert_eq!(rows.len(), 1);
        let direct = estimate_rate(&params, stream_seed(42, 0), Budget::Trials(500)).unwrap();
        assert_eq!(rows[0].estimate.as_ref().unwrap(), &direct);
    }

    #[test]
    fn failing_point_is_flagged_not_fatal() {
        let good = RepeaterParams::doubling(p(0.5), p(0.5), TimeUnits(2));
        let bad = good.clone().with_elements(0);
        let rows = sweep(
            &[
                SweepPoint {
                    params: bad,
                    budget: Budget::Trials(10),
                },
                SweepPoint {
                    params: good,
                    budget: Budget::Trials(10),
                },
            ],
            1,
        );
        assert!(rows[0].estimate.is_err());
        assert!(rows[1].estimate.is_ok());
    }
}
