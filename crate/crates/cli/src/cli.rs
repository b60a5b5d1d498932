use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use repeater_core::analytics::{asymptotic_regime, doubling_stats, multiplexed_rate};
use repeater_core::dlcz::{self, Detector};
use repeater_core::sim::Budget;
use repeater_core::{Architecture, Probability, TimeUnits};

use crate::config::{
    AxesSection, BudgetSection, ConfigFile, Format, ParamsSection, PhysicalSection,
};
use crate::error::CliError;
use crate::grid::{SweepSpec, DEFAULT_TRIALS};
use crate::output::{write_rows, AnalyticRow, QuantityRow, SimRow};
use crate::parallel::sweep_parallel;
use crate::presets::preset;
use crate::verify::{self, Perturbation, Suite};

/// Exit status for a failed verification.
pub const EXIT_VERIFY_FAILED: i32 = 2;
/// Exit status for usage and input errors.
pub const EXIT_USAGE: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "repeater",
    version,
    about = "Quantum repeater rates: closed forms, DLCZ probabilities and Monte Carlo sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form waiting times and rates of one doubling.
    Analytic(GridArgs),
    /// Probabilities and time unit derived from a physical chain.
    Dlcz(DlczArgs),
    /// Monte Carlo rate estimates over a parameter grid.
    Simulate(SimulateArgs),
    /// Run the self-checks and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Config file (TOML); flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named grid: fig2, fig3 or fig4.
    #[arg(long)]
    pub preset: Option<String>,
    /// Emit JSON lines instead of CSV.
    #[arg(long)]
    pub json: bool,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Grid flags. Every list flag takes comma-separated values and becomes a
/// sweep axis.
#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    /// Generation probability P_0.
    #[arg(long, value_delimiter = ',')]
    pub p0: Vec<f64>,
    /// First-level connection probability P_1.
    #[arg(long, value_delimiter = ',')]
    pub p1: Vec<f64>,
    /// Memory lifetime in time units.
    #[arg(long, value_delimiter = ',')]
    pub tau: Vec<u64>,
    /// Memory elements per site.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,
    /// Number of doubling levels.
    #[arg(long = "N")]
    pub levels: Option<u32>,
    /// parallel or multiplexed.
    #[arg(long, value_delimiter = ',')]
    pub architecture: Vec<Architecture>,
    /// Base seed (default 0); grid point i is seeded from (seed, i).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Independent trials from vacuum per grid point.
    #[arg(long, conflicts_with = "horizon")]
    pub trials: Option<u64>,
    /// Length of one steady-state trajectory per grid point (accepts 1e7).
    #[arg(long, value_parser = parse_count)]
    pub horizon: Option<u64>,
    /// Memory lifetimes in ms (needs physical parameters, e.g. --preset fig4).
    #[arg(long, value_delimiter = ',', conflicts_with = "tau")]
    pub tau_ms: Vec<f64>,
    /// Keep generating on idle elements while connections are in flight.
    #[arg(long)]
    pub concurrent_generation: Option<bool>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DlczArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long = "N")]
    pub levels: Option<u32>,
    #[arg(long)]
    pub length_km: Option<f64>,
    #[arg(long)]
    pub loss_db_per_km: Option<f64>,
    #[arg(long)]
    pub eta0: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// pnrd (photon-number resolving) or nprd.
    #[arg(long)]
    pub detector: Option<Detector>,
    #[arg(long)]
    pub refractive_index: Option<f64>,
    /// Lifetimes in ms to convert to time units.
    #[arg(long, value_delimiter = ',')]
    pub tau_ms: Vec<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Restrict to these suites (repeatable).
    #[arg(long, value_enum)]
    pub suite: Vec<Suite>,
    /// Scale P_1 by (1 + x) on one side of each identity, to check that the
    /// verifier notices.
    #[arg(long, default_value_t = 0.0)]
    pub perturb_p1: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
    if v >= 0.0 && v.fract() == 0.0 && v < u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("not a whole non-negative count: {s}"))
    }
}

fn some_vec<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

/// Preset, then config file, then flags.
fn layered(output: &OutputArgs, flags: ConfigFile) -> Result<ConfigFile, CliError> {
    let file = match &output.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let name = output.preset.clone().or(file.preset.clone());
    let base = match name {
        Some(name) => preset(&name)?,
        None => ConfigFile::default(),
    };
    let mut cfg = base.overlay(file).overlay(flags);
    if output.json {
        cfg.output.format = Some(Format::Jsonl);
    }
    if output.out.is_some() {
        cfg.output.path = output.out.clone();
    }
    Ok(cfg)
}

impl GridArgs {
    fn to_layer(&self) -> ConfigFile {
        ConfigFile {
            seed: self.seed,
            params: ParamsSection {
                levels: self.levels,
                ..ParamsSection::default()
            },
            sweep: AxesSection {
                architecture: some_vec(self.architecture.clone()),
                elements: some_vec(self.n.clone()),
                p_gen: some_vec(self.p0.clone()),
                p1: some_vec(self.p1.clone()),
                tau: some_vec(self.tau.clone()),
                tau_ms: None,
            },
            ..ConfigFile::default()
        }
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn log_config(what: &str, cfg: &ConfigFile) {
    match cfg.to_toml() {
        Ok(text) => log::info!("{what}:\n{text}"),
        Err(e) => log::warn!("{what} not shown: {e}"),
    }
}

fn log_resolved(spec: &SweepSpec) {
    log_config(
        &format!("resolved configuration ({} grid points)", spec.size()),
        &spec.to_config(),
    );
}

fn analytic(args: &GridArgs) -> Result<(), CliError> {
    let cfg = layered(&args.output, args.to_layer())?;
    let spec = SweepSpec::resolve(&cfg, Budget::Trials(1))?;
    log_resolved(&spec);
    let mut rows = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for g in spec.points()? {
        let params = &g.point.params;
        let (p0, p1, tau, n) = (params.p_gen, params.p_conn[0], params.tau, params.elements);
        // Architecture does not enter the closed forms.
        if !seen.insert((p0.get().to_bits(), p1.get().to_bits(), tau, n)) {
            continue;
        }
        rows.push(analytic_row(p0, p1, tau, n));
    }
    let mut out = open_output(&spec.output.path)?;
    write_rows(&rows, spec.format(), &mut *out)
}

/// Closed forms at one point; divergent quantities are infinite.
pub fn analytic_row(p0: Probability, p1: Probability, tau: TimeUnits, n: u32) -> AnalyticRow {
    let (mean_z, mean_t) = match doubling_stats(p0, p1, tau) {
        Ok(s) => (s.mean_z, s.mean_t),
        Err(_) => (f64::INFINITY, f64::INFINITY),
    };
    let (rate, alpha) = match multiplexed_rate(p0, p1, tau, n) {
        Ok(m) => (m.rate, m.alpha),
        Err(_) => (0.0, f64::NAN),
    };
    AnalyticRow {
        p0: p0.get(),
        p1: p1.get(),
        tau: tau.0,
        n,
        mean_z,
        mean_t,
        rate,
        alpha,
        regime_flag: asymptotic_regime(p0.get(), tau.as_f64()),
    }
}

fn dlcz_cmd(args: &DlczArgs) -> Result<(), CliError> {
    let flags = ConfigFile {
        physical: Some(PhysicalSection {
            total_length_km: args.length_km,
            levels: args.levels,
            fiber_loss_db_per_km: args.loss_db_per_km,
            eta0: args.eta0,
            eta: args.eta,
            detector: args.detector,
            refractive_index: args.refractive_index,
        }),
        ..ConfigFile::default()
    };
    let mut cfg = layered(&args.output, flags)?;
    let section =
        PhysicalSection::default_values().overlay(cfg.physical.take().unwrap_or_default());
    let phys = crate::grid::physical_params(&section)?;
    let d = dlcz::derive(&phys)?;
    log_config(
        "resolved configuration",
        &ConfigFile {
            physical: Some(section),
            ..ConfigFile::default()
        },
    );
    let q = |name: String, value: f64| QuantityRow {
        quantity: name,
        value,
    };
    let mut rows = vec![q("P_0".into(), d.p0.get())];
    rows.extend(
        d.p_conn
            .iter()
            .enumerate()
            .map(|(i, x)| q(format!("P_{}", i + 1), x.get())),
    );
    rows.extend(d.c.iter().enumerate().map(|(i, &x)| q(format!("c_{i}"), x)));
    if let Some(eps) = d.epsilon {
        rows.push(q("epsilon".into(), eps.get()));
    }
    rows.push(q("fidelity_bound".into(), d.fidelity_bound));
    rows.push(q("time_unit_ms".into(), d.time_unit_ms));
    for &ms in &args.tau_ms {
        rows.push(q(
            format!("tau_units({ms} ms)"),
            dlcz::lifetime_to_units(ms, &d).0 as f64,
        ));
    }
    let mut out = open_output(&cfg.output.path)?;
    write_rows(&rows, cfg.output.format.unwrap_or_default(), &mut *out)
}

fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let mut flags = args.grid.to_layer();
    flags.sweep.tau_ms = some_vec(args.tau_ms.clone());
    flags.params.concurrent_generation = args.concurrent_generation;
    flags.budget = BudgetSection {
        trials: args.trials,
        horizon: args.horizon,
    };
    let cfg = layered(&args.grid.output, flags)?;
    let spec = SweepSpec::resolve(&cfg, Budget::Trials(DEFAULT_TRIALS))?;
    log_resolved(&spec);
    let grid = spec.points()?;
    let points: Vec<_> = grid.iter().map(|g| g.point.clone()).collect();
    let rows: Vec<SimRow> = sweep_parallel(&points, spec.seed)
        .iter()
        .zip(&grid)
        .map(|(row, g)| SimRow::new(row, g.tau_ms))
        .collect();
    let mut out = open_output(&spec.output.path)?;
    write_rows(&rows, spec.format(), &mut *out)
}

fn verify_cmd(args: &VerifyArgs) -> Result<bool, CliError> {
    let report = verify::run(
        &args.suite,
        Perturbation {
            p1_relative: args.perturb_p1,
        },
    );
    let mut out = open_output(&args.out)?;
    serde_json::to_writer_pretty(&mut *out, &report)?;
    out.write_all(b"\n")?;
    out.flush()?;
    for c in report.checks.iter().filter(|c| !c.passed) {
        log::error!(
            "FAILED {}: observed {} expected {} (tolerance {}{})",
            c.name,
            c.observed,
            c.expected,
            c.tolerance,
            if c.relative { ", relative" } else { "" }
        );
    }
    Ok(report.passed)
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Analytic(a) => analytic(a).map(|_| 0),
        Command::Dlcz(a) => dlcz_cmd(a).map(|_| 0),
        Command::Simulate(a) => simulate(a).map(|_| 0),
        Command::Verify(a) => verify_cmd(a).map(|ok| if ok { 0 } else { EXIT_VERIFY_FAILED }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
