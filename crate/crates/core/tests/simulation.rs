//! Statistical checks of the engine against closed forms and against itself.
//! Seeds are fixed; bounds are three standard errors.

use repeater_core::analytics::mean_time_finite;
use repeater_core::oracle::exact_rate_multiplexed_with;
use repeater_core::sim::{estimate_rate, Budget, RateEstimate};
use repeater_core::{Architecture, Probability, RepeaterParams, TimeUnits};

fn p(v: f64) -> Probability {
    Probability::new(v).unwrap()
}

fn horizon(params: &RepeaterParams, seed: u64, h: u64) -> RateEstimate {
    estimate_rate(params, seed, Budget::Horizon(TimeUnits(h))).unwrap()
}

fn within(observed: f64, expected: f64, sigma: f64) -> bool {
    (observed - expected).abs() <= 3.0 * sigma
}

#[test]
fn mean_time_matches_closed_form() {
    for (i, (p0, p1, tau)) in [(0.5, 0.3, 0), (0.2, 1.0, 2), (0.1, 0.5, 5), (0.3, 0.7, 10)]
        .into_iter()
        .enumerate()
    {
        let params = RepeaterParams::doubling(p(p0), p(p1), TimeUnits(tau));
        let e = estimate_rate(&params, i as u64, Budget::Trials(100_000)).unwrap();
        let expected = mean_time_finite(p(p0), p(p1), TimeUnits(tau)).unwrap();
        let (mean, se) = (e.mean_time.unwrap(), e.mean_time_std_error.unwrap());
        assert!(
            within(mean, expected, se),
            "p0={p0} p1={p1} tau={tau}: {mean} +- {se} vs {expected}"
        );
    }
}

#[test]
fn batch_means_agree_with_independent_trials() {
    let params = RepeaterParams::doubling(p(0.2), p(0.5), TimeUnits(3));
    let renewal = estimate_rate(&params, 1, Budget::Trials(200_000)).unwrap();
    let long_run = horizon(&params, 2, 4_000_000);
    let sigma = renewal.std_error.hypot(long_run.std_error);
    assert!(
        within(long_run.mean_rate, renewal.mean_rate, sigma),
        "{} vs {}",
        long_run.mean_rate,
        renewal.mean_rate
    );
}

#[test]
fn concurrent_generation_matches_exact_rate() {
    let params = RepeaterParams::doubling(p(0.2), p(0.5), TimeUnits(3)).with_elements(2);
    let exact = exact_rate_multiplexed_with(p(0.2), p(0.5), TimeUnits(3), 2, true).unwrap();
    let e = horizon(&params, 3, 4_000_000);
    assert!(
        within(e.mean_rate, exact, e.std_error),
        "{} vs {exact}",
        e.mean_rate
    );
}

#[test]
fn parallel_copies_scale_the_rate() {
    for (levels, tau) in [(1, 4), (2, 6)] {
        let base = RepeaterParams::new(
            levels,
            1,
            TimeUnits(tau),
            p(0.3),
            vec![p(0.6); levels as usize],
        )
        .with_architecture(Architecture::Parallel);
        let one = horizon(&base, 10, 2_000_000);
        let four = horizon(&base.clone().with_elements(4), 11, 2_000_000);
        let sigma = (4.0 * one.std_error).hypot(four.std_error);
        assert!(
            within(four.mean_rate, 4.0 * one.mean_rate, sigma),
            "N={levels}: {} vs 4 x {}",
            four.mean_rate,
            one.mean_rate
        );
    }
}

#[test]
fn rate_rises_with_lifetime() {
    for arch in [Architecture::Parallel, Architecture::Multiplexed] {
        let mut previous: Option<RateEstimate> = None;
        for (i, tau) in [1u64, 4, 16, 64].into_iter().enumerate() {
            let params = RepeaterParams::new(2, 3, TimeUnits(tau), p(0.1), vec![p(0.5), p(0.5)])
                .with_architecture(arch);
            let e = horizon(&params, 20 + i as u64, 2_000_000);
            if let Some(prev) = &previous {
                let sigma = prev.std_error.hypot(e.std_error);
                assert!(
                    e.mean_rate >= prev.mean_rate - 3.0 * sigma,
                    "{arch:?} tau={tau}: {} after {}",
                    e.mean_rate,
                    prev.mean_rate
                );
            }
            previous = Some(e);
        }
    }
}

#[test]
fn multiplexing_beats_parallel_copies_at_short_lifetimes() {
    let base = RepeaterParams::new(2, 4, TimeUnits(4), p(0.05), vec![p(0.5), p(0.5)]);
    let mux = horizon(&base, 30, 4_000_000);
    let par = horizon(
        &base.with_architecture(Architecture::Parallel),
        31,
        4_000_000,
    );
    assert!(
        mux.mean_rate - 3.0 * mux.std_error > par.mean_rate + 3.0 * par.std_error,
        "{} vs {}",
        mux.mean_rate,
        par.mean_rate
    );
}

#[test]
fn final_projection_thins_deliveries() {
    let base = RepeaterParams::doubling(p(0.4), p(0.8), TimeUnits(5)).with_elements(2);
    let plain = horizon(&base, 40, 2_000_000);
    let projected = horizon(&base.with_final_projection(Some(p(0.25))), 40, 2_000_000);
    let sigma = (0.25 * plain.std_error).hypot(projected.std_error);
    assert!(within(projected.mean_rate, 0.25 * plain.mean_rate, sigma));
}
