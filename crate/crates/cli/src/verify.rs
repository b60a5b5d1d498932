//! Self-checks: closed-form identities, the exact oracle, the DLCZ
//! recursion, limiting behaviour and a few statistical simulation checks.

use repeater_core::analytics::{
    mean_time_finite, mean_time_infinite, mean_z_asymptotic, mean_z_finite, multiplexed_rate,
};
use repeater_core::dlcz::{self, Detector, PhysicalParams};
use repeater_core::oracle::{exact_mean_time_doubling, exact_rate_multiplexed, MAX_RATE_TAU};
use repeater_core::sim::{estimate_rate, run_trial, Budget};
use repeater_core::{Probability, RepeaterParams, TimeUnits};
use serde::Serialize;

use crate::parallel::estimate_rate_parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identity,
    Oracle,
    Dlcz,
    Limits,
    Simulation,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Identity,
        Suite::Oracle,
        Suite::Dlcz,
        Suite::Limits,
        Suite::Simulation,
    ];
}

/// Deliberate errors injected to confirm that the checks can fail.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Perturbation {
    /// Relative change applied to `P_1` on one side of each identity.
    pub p1_relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    /// Whether `tolerance` is relative to `|expected|`.
    pub relative: bool,
    pub passed: bool,
}

impl Check {
    fn new(
        suite: Suite,
        name: String,
        observed: f64,
        expected: f64,
        tolerance: f64,
        relative: bool,
    ) -> Check {
        let scale = if relative { expected.abs() } else { 1.0 };
        let passed = (observed - expected).abs() <= tolerance * scale;
        Check {
            suite,
            name,
            observed,
            expected,
            tolerance,
            relative,
            passed,
        }
    }

    fn flag(suite: Suite, name: String, ok: bool) -> Check {
        Check::new(suite, name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0, false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub passed: bool,
    pub failed: usize,
    pub checks: Vec<Check>,
}

fn p(v: f64) -> Probability {
    Probability::new(v).expect("probability in range")
}

/// The shared grid for identities and the oracle.
pub fn identity_grid() -> Vec<(f64, f64, u64)> {
    let mut grid = Vec::new();
    for p0 in [0.05, 0.2, 0.5] {
        for p1 in [0.3, 1.0] {
            for tau in [0, 1, 2, 5, 10] {
                grid.push((p0, p1, tau));
            }
        }
    }
    grid
}

fn identity(perturb: Perturbation) -> Vec<Check> {
    let mut out = Vec::new();
    for (p0, p1, tau) in identity_grid() {
        let t = mean_time_finite(p(p0), p(p1), TimeUnits(tau)).unwrap();
        let mut p1_rate = p1 * (1.0 + perturb.p1_relative);
        if p1_rate > 1.0 {
            p1_rate = p1 * (1.0 - perturb.p1_relative);
        }
        let m = multiplexed_rate(p(p0), p(p1_rate), TimeUnits(tau), 1).unwrap();
        let label = format!("p0={p0} p1={p1} tau={tau}");
        out.push(Check::new(
            Suite::Identity,
            format!("rate*mean_T {label}"),
            m.rate * t,
            1.0,
            1e-12,
            true,
        ));
        out.push(Check::new(
            Suite::Identity,
            format!("alpha(n=1) {label}"),
            m.alpha,
            1.0,
            0.0,
            false,
        ));
    }
    out
}

fn oracle() -> Vec<Check> {
    let mut out = Vec::new();
    for (p0, p1, tau) in identity_grid() {
        let label = format!("p0={p0} p1={p1} tau={tau}");
        let closed = mean_time_finite(p(p0), p(p1), TimeUnits(tau)).unwrap();
        let exact = exact_mean_time_doubling(p(p0), p(p1), TimeUnits(tau)).unwrap();
        out.push(Check::new(
            Suite::Oracle,
            format!("mean_T {label}"),
            closed,
            exact,
            1e-9,
            true,
        ));
        if tau > MAX_RATE_TAU {
            continue;
        }
        let rate = exact_rate_multiplexed(p(p0), p(p1), TimeUnits(tau), 1).unwrap();
        out.push(Check::new(
            Suite::Oracle,
            format!("rate(n=1)*mean_T {label}"),
            rate * closed,
            1.0,
            1e-9,
            true,
        ));
    }
    out
}

/// The 1000 km, `N = 3` chain with non-resolving detectors.
pub fn reference_chain(detector: Detector) -> PhysicalParams {
    PhysicalParams {
        total_length_km: 1000.0,
        levels: 3,
        fiber_loss_db_per_km: 0.16,
        eta0: p(0.01),
        eta: p(0.9),
        detector,
        refractive_index: dlcz::DEFAULT_REFRACTIVE_INDEX,
    }
}

fn dlcz_suite() -> Vec<Check> {
    let d = dlcz::derive(&reference_chain(Detector::Nprd)).unwrap();
    // Reference values are rounded to three digits: 0.6975 sits exactly
    // 5e-4 from 0.698, hence the float slack.
    let tol = 5e-4 + 1e-12;
    let mut out = vec![Check::new(
        Suite::Dlcz,
        "P_0".into(),
        d.p0.get(),
        0.001,
        tol,
        false,
    )];
    for (i, expected) in [0.698, 0.496, 0.311].into_iter().enumerate() {
        out.push(Check::new(
            Suite::Dlcz,
            format!("P_{}", i + 1),
            d.p_conn[i].get(),
            expected,
            tol,
            false,
        ));
    }
    out.push(Check::new(
        Suite::Dlcz,
        "epsilon".into(),
        d.epsilon.unwrap().get(),
        0.206,
        tol,
        false,
    ));
    let mut ideal = reference_chain(Detector::Pnrd);
    ideal.eta = p(1.0);
    let d = dlcz::derive(&ideal).unwrap();
    for (i, x) in d.p_conn.iter().enumerate() {
        out.push(Check::new(
            Suite::Dlcz,
            format!("eta=1 PNRD P_{}", i + 1),
            x.get(),
            0.5,
            1e-12,
            false,
        ));
    }
    out
}

fn limits() -> Vec<Check> {
    let mut out = Vec::new();
    for (p0, p1) in [(0.05, 0.3), (0.2, 1.0), (0.5, 0.5)] {
        let inf = mean_time_infinite(p(p0), p(p1)).unwrap();
        let q: f64 = 1.0 - p0;
        // q^(tau + 1) < 1e-9 from here on.
        let far = ((1e-9f64).ln() / q.ln()).ceil() as u64;
        let mut previous = f64::INFINITY;
        let mut monotone = true;
        for tau in 0..=far {
            let t = mean_time_finite(p(p0), p(p1), TimeUnits(tau)).unwrap();
            monotone &= t <= previous * (1.0 + 1e-14);
            previous = t;
        }
        out.push(Check::flag(
            Suite::Limits,
            format!("mean_T non-increasing in tau p0={p0} p1={p1}"),
            monotone,
        ));
        out.push(Check::new(
            Suite::Limits,
            format!("mean_T(tau={far}) -> mean_T(inf) p0={p0} p1={p1}"),
            previous,
            inf,
            1e-6,
            true,
        ));
    }
    for (p0, tau) in [
        (0.001, 0),
        (0.001, 10),
        (0.001, 40),
        (0.0001, 100),
        (0.0002, 200),
    ] {
        let exact = mean_z_finite(p(p0), TimeUnits(tau)).unwrap();
        let approx = mean_z_asymptotic(p(p0), TimeUnits(tau)).unwrap().value;
        out.push(Check::new(
            Suite::Limits,
            format!("asymptotic <Z> p0={p0} tau={tau}"),
            approx,
            exact,
            0.05,
            true,
        ));
    }
    let mut previous = f64::INFINITY;
    let mut decreasing = true;
    let mut last = 0.0;
    for (n, tau) in [(2, 10), (5, 20), (10, 50), (20, 100), (50, 200)] {
        let a = multiplexed_rate(p(0.1), p(0.5), TimeUnits(tau), n)
            .unwrap()
            .alpha;
        decreasing &= a < previous;
        previous = a;
        last = a;
    }
    out.push(Check::flag(
        Suite::Limits,
        "alpha decreasing in n P0 tau".into(),
        decreasing,
    ));
    out.push(Check::new(
        Suite::Limits,
        "alpha at p0=0.1 n=50 tau=200".into(),
        last,
        0.0,
        0.05,
        false,
    ));
    out
}

fn simulation() -> Vec<Check> {
    let mut out = Vec::new();
    let ideal = RepeaterParams::doubling(p(1.0), p(1.0), TimeUnits(0));
    let e = estimate_rate(&ideal, 1, Budget::Trials(100)).unwrap();
    out.push(Check::new(
        Suite::Simulation,
        "deterministic repeater mean_T".into(),
        e.mean_time.unwrap(),
        2.0,
        0.0,
        false,
    ));

    let params = RepeaterParams::doubling(p(0.2), p(1.0), TimeUnits(1));
    let expected = mean_time_finite(p(0.2), p(1.0), TimeUnits(1)).unwrap();
    let e = estimate_rate_parallel(&params, 2024, Budget::Trials(200_000)).unwrap();
    let se = e.mean_time_std_error.unwrap();
    out.push(Check::new(
        Suite::Simulation,
        "mean_T p0=0.2 p1=1 tau=1 (3 se)".into(),
        e.mean_time.unwrap(),
        expected,
        3.0 * se,
        false,
    ));

    let params = RepeaterParams::doubling(p(0.2), p(0.5), TimeUnits(2))
        .with_elements(2)
        .with_concurrent_generation(false);
    let exact = exact_rate_multiplexed(p(0.2), p(0.5), TimeUnits(2), 2).unwrap();
    let e = estimate_rate(&params, 2024, Budget::Horizon(TimeUnits(2_000_000))).unwrap();
    out.push(Check::new(
        Suite::Simulation,
        "rate n=2 tau=2 vs exact (3 se)".into(),
        e.mean_rate,
        exact,
        3.0 * e.std_error,
        false,
    ));

    let params = RepeaterParams::new(2, 3, TimeUnits(8), p(0.3), vec![p(0.6), p(0.5)]);
    let same =
        (0..20).all(|seed| run_trial(&params, seed).unwrap() == run_trial(&params, seed).unwrap());
    out.push(Check::flag(
        Suite::Simulation,
        "run_trial deterministic".into(),
        same,
    ));
    out
}

/// Runs `suites` (all when empty) and collects the report.
pub fn run(suites: &[Suite], perturb: Perturbation) -> Report {
    let mut selected: Vec<Suite> = if suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        suites.to_vec()
    };
    selected.sort();
    selected.dedup();
    let mut checks = Vec::new();
    for suite in selected {
        checks.extend(match suite {
            Suite::Identity => identity(perturb),
            Suite::Oracle => oracle(),
            Suite::Dlcz => dlcz_suite(),
            Suite::Limits => limits(),
            Suite::Simulation => simulation(),
        });
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    Report {
        passed: failed == 0,
        failed,
        checks,
    }
}
