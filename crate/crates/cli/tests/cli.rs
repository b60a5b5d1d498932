//! Runs the `repeater` binary end to end.

use std::fs;
use std::process::{Command, Output};

fn repeater(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repeater"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_records(text: &str) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().clone();
    let rows = r.records().map(|x| x.unwrap()).collect();
    (header, rows)
}

const SIM_HEADER: &str = "index,seed,levels,elements,architecture,concurrent_generation,tau,tau_ms,p_gen,p_conn,level_latency,final_projection,method,trials_or_horizon,mean_rate,std_error,successes,truncated,mean_time,mean_time_std_error,flag,error";

#[test]
fn analytic_reproduces_known_points() {
    let o = repeater(&["analytic", "--p0", "1,0.2", "--p1", "1", "--tau", "0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_records(&stdout(&o));
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        [
            "p0",
            "p1",
            "tau",
            "n",
            "mean_Z",
            "mean_T",
            "rate",
            "alpha",
            "regime_flag"
        ]
    );
    assert_eq!(rows.len(), 4);
    let mean_t = |p0: &str, tau: &str| -> f64 {
        let row = rows.iter().find(|r| &r[0] == p0 && &r[2] == tau).unwrap();
        row[5].parse().unwrap()
    };
    assert_eq!(mean_t("1.0", "0"), 2.0);
    assert!((mean_t("0.2", "1") - 13.6923).abs() < 1e-4);
}

#[test]
fn simulate_writes_one_row_per_point_in_grid_order() {
    let o = repeater(&[
        "simulate",
        "--p0",
        "1",
        "--p1",
        "1",
        "--tau",
        "0,3",
        "--n",
        "1,2",
        "--architecture",
        "parallel,multiplexed",
        "--trials",
        "10",
        "--seed",
        "7",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), SIM_HEADER);
    let (_, rows) = csv_records(&text);
    assert_eq!(rows.len(), 8);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0].parse::<usize>().unwrap(), i);
        assert_eq!(&row[12], "independent_trials");
        assert_eq!(row[18].parse::<f64>().unwrap(), 2.0);
    }
    assert_eq!(&rows[0][4], "parallel");
    assert_eq!(&rows[7][4], "multiplexed");
    // Same seed, same table.
    let again = repeater(&[
        "simulate",
        "--p0",
        "1",
        "--p1",
        "1",
        "--tau",
        "0,3",
        "--n",
        "1,2",
        "--architecture",
        "parallel,multiplexed",
        "--trials",
        "10",
        "--seed",
        "7",
    ]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn json_lines_carry_the_same_fields() {
    let o = repeater(&[
        "simulate",
        "--p0",
        "0.5",
        "--p1",
        "0.5",
        "--tau",
        "2",
        "--horizon",
        "1e4",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 1);
    let keys: Vec<&str> = rows[0]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    assert_eq!(keys.len(), SIM_HEADER.split(',').count());
    assert_eq!(rows[0]["method"], "batch_means");
    // The horizon is cut to a whole number of batches.
    assert_eq!(rows[0]["trials_or_horizon"], 9984);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("rows.csv");
    fs::write(
        &cfg,
        "seed = 3\nparams.p_gen = 1.0\nparams.p_conn = [1.0]\nsweep.tau = [0, 1, 2]\nbudget.trials = 4\n",
    )
    .unwrap();
    let o = repeater(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--tau",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(o.stdout.is_empty());
    let (_, rows) = csv_records(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][6], "5");
    assert_eq!(&rows[0][13], "4");
}

#[test]
fn presets_resolve() {
    let o = repeater(&["analytic", "--preset", "fig2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_records(&stdout(&o)).1.len(), 14);
    let o = repeater(&[
        "simulate",
        "--preset",
        "fig4",
        "--n",
        "1",
        "--architecture",
        "multiplexed",
        "--tau-ms",
        "100",
        "--horizon",
        "1000",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let (_, rows) = csv_records(&stdout(&o));
    assert_eq!(&rows[0][6], "159");
    assert_eq!(&rows[0][7], "100.0");
    assert_eq!(&rows[0][2], "3");
}

#[test]
fn dlcz_prints_the_derived_quantities() {
    let o = repeater(&["dlcz"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = csv_records(&stdout(&o));
    let get = |q: &str| -> f64 {
        rows.iter().find(|r| &r[0] == q).unwrap()[1]
            .parse()
            .unwrap()
    };
    assert!((get("P_0") - 0.001).abs() < 1e-9);
    assert!((get("P_3") - 0.311).abs() < 5e-4);
    assert!((get("epsilon") - 0.206).abs() < 5e-4);
}

#[test]
fn bad_input_exits_with_usage_status() {
    for args in [
        &["analytic", "--p0", "2", "--p1", "0.5", "--tau", "1"][..],
        &[
            "simulate", "--p0", "0.5", "--p1", "0.5", "--tau", "1", "--trials", "0",
        ],
        &["simulate", "--preset", "nope"],
        &[
            "simulate",
            "--p0",
            "0.5",
            "--p1",
            "0.5",
            "--tau",
            "1",
            "--trials",
            "5",
            "--horizon",
            "5",
        ],
        &["transmogrify"],
        &["analytic", "--p0", "x"],
    ] {
        let o = repeater(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn verify_oracle_suite_passes() {
    let o = repeater(&["verify", "--suite", "oracle"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["checks"].as_array().unwrap().len() >= 30);
}

#[test]
fn verify_notices_a_perturbation() {
    let o = repeater(&["verify", "--suite", "identity", "--perturb-p1", "0.01"]);
    assert_eq!(o.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], false);
    assert_eq!(report["failed"], 30);
}
