use proptest::prelude::*;
use repeater_cli::config::{
    params_from_toml, params_to_toml, AxesSection, ConfigFile, ParamsSection,
};
use repeater_cli::grid::SweepSpec;
use repeater_cli::parallel::{estimate_rate_parallel, sweep_parallel};
use repeater_core::sim::{estimate_rate, sweep, Budget};
use repeater_core::{Architecture, Probability, RepeaterParams, TimeUnits};

fn p(v: f64) -> Probability {
    Probability::new(v).unwrap()
}

fn params() -> impl Strategy<Value = RepeaterParams> {
    (
        1u32..=4,
        1u32..=64,
        0u64..1_000_000,
        0.0f64..=1.0,
        prop_oneof![
            Just(Architecture::Parallel),
            Just(Architecture::Multiplexed)
        ],
        prop::option::of(0.0f64..=1.0),
        any::<bool>(),
    )
        .prop_flat_map(|(levels, n, tau, p0, arch, eps, concurrent)| {
            (
                prop::collection::vec(0.0f64..=1.0, levels as usize),
                prop::collection::vec(1u64..100, levels as usize),
            )
                .prop_map(move |(pc, latency)| {
                    RepeaterParams::new(
                        levels,
                        n,
                        TimeUnits(tau),
                        p(p0),
                        pc.into_iter().map(p).collect(),
                    )
                    .with_architecture(arch)
                    .with_final_projection(eps.map(p))
                    .with_concurrent_generation(concurrent)
                    .with_level_latency(latency.into_iter().map(TimeUnits).collect())
                })
        })
}

proptest! {
    #[test]
    fn params_survive_a_round_trip(params in params()) {
        let text = params_to_toml(&params).unwrap();
        prop_assert_eq!(params_from_toml(&text).unwrap(), params);
    }

    #[test]
    fn config_files_survive_a_round_trip(seed in any::<u64>(), taus in prop::collection::vec(0u64..1000, 1..5), p0 in 0.0f64..=1.0) {
        let cfg = ConfigFile {
            seed: Some(seed),
            params: ParamsSection { p_gen: Some(p0), ..ParamsSection::default() },
            sweep: AxesSection { tau: Some(taus), ..AxesSection::default() },
            ..ConfigFile::default()
        };
        prop_assert_eq!(ConfigFile::parse(&cfg.to_toml().unwrap()).unwrap(), cfg);
    }
}

fn spec(text: &str) -> SweepSpec {
    SweepSpec::resolve(&ConfigFile::parse(text).unwrap(), Budget::Trials(1)).unwrap()
}

#[test]
fn grid_enumerates_axes_in_order() {
    let s = spec("params.p_gen = 0.5\nparams.p_conn = [0.5]\nsweep.elements = [1, 3]\nsweep.tau = [2, 4, 8]\n");
    assert_eq!(s.size(), 6);
    let points = s.points().unwrap();
    let order: Vec<(u32, u64)> = points
        .iter()
        .map(|g| (g.point.params.elements, g.point.params.tau.0))
        .collect();
    assert_eq!(order, [(1, 2), (1, 4), (1, 8), (3, 2), (3, 4), (3, 8)]);
}

#[test]
fn physical_section_derives_probabilities() {
    let s = spec("physical.levels = 3\nsweep.tau_ms = [100.0]\n");
    let g = &s.points().unwrap()[0];
    assert_eq!(g.point.params.levels, 3);
    assert_eq!(g.point.params.tau, TimeUnits(159));
    assert!((g.point.params.p_gen.get() - 0.001).abs() < 1e-9);
}

#[test]
fn inconsistent_configs_are_rejected() {
    let bad = [
        "sweep.tau = []",
        "sweep.tau = [1]\nsweep.tau_ms = [1.0]",
        "sweep.tau_ms = [1.0]",
        "params.p_gen = 1.5\nsweep.tau = [1]",
        "budget.trials = 3\nbudget.horizon = 5\nsweep.tau = [1]",
    ];
    for text in bad {
        let cfg = ConfigFile::parse(text).unwrap();
        assert!(
            SweepSpec::resolve(&cfg, Budget::Trials(1)).is_err(),
            "{text}"
        );
    }
}

#[test]
fn parallel_sweep_matches_sequential_sweep() {
    let s = spec(
        "seed = 11\nparams.p_gen = 0.3\nparams.p_conn = [0.6]\nsweep.architecture = [\"parallel\", \"multiplexed\"]\nsweep.elements = [1, 4]\nsweep.tau = [0, 5]\nbudget.trials = 9000\n",
    );
    let points: Vec<_> = s.points().unwrap().into_iter().map(|g| g.point).collect();
    assert_eq!(sweep_parallel(&points, 11), sweep(&points, 11));
}

#[test]
fn chunked_trials_match_a_single_pass() {
    let params = RepeaterParams::doubling(p(0.4), p(0.5), TimeUnits(3)).with_elements(2);
    for trials in [2, 4096, 4097, 20_000] {
        let budget = Budget::Trials(trials);
        assert_eq!(
            estimate_rate_parallel(&params, 5, budget).unwrap(),
            estimate_rate(&params, 5, budget).unwrap()
        );
    }
}
