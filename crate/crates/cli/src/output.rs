//! Table rows and their CSV / JSON-lines encodings.
//!
//! Columns come out in field order. Floats use Rust's shortest round-trip
//! formatting, which never depends on the locale.

use std::io::Write;

use repeater_core::sim::{Budget, SweepRow};
use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

/// One `simulate` row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRow {
    pub index: usize,
    pub seed: u64,
    pub levels: u32,
    pub elements: u32,
    pub architecture: &'static str,
    pub concurrent_generation: bool,
    pub tau: u64,
    pub tau_ms: Option<f64>,
    pub p_gen: f64,
    /// `P_1 .. P_N` joined by `;`.
    pub p_conn: String,
    pub level_latency: String,
    pub final_projection: Option<f64>,
    pub method: &'static str,
    pub trials_or_horizon: u64,
    pub mean_rate: Option<f64>,
    pub std_error: Option<f64>,
    pub successes: Option<u64>,
    pub truncated: Option<u64>,
    pub mean_time: Option<f64>,
    pub mean_time_std_error: Option<f64>,
    /// `no successes`, `truncated` or empty.
    pub flag: &'static str,
    pub error: String,
}

fn join<T: ToString>(v: impl IntoIterator<Item = T>) -> String {
    v.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

impl SimRow {
    pub fn new(row: &SweepRow, tau_ms: Option<f64>) -> SimRow {
        let p = &row.params;
        let (method, size) = match row.budget {
            Budget::Trials(t) => ("independent_trials", t),
            Budget::Horizon(h) => ("batch_means", h.0),
        };
        let mut out = SimRow {
            index: row.index,
            seed: row.seed,
            levels: p.levels,
            elements: p.elements,
            architecture: p.architecture.as_str(),
            concurrent_generation: p.concurrent_generation,
            tau: p.tau.0,
            tau_ms,
            p_gen: p.p_gen.get(),
            p_conn: join(p.p_conn.iter().map(|x| format!("{:?}", x.get()))),
            level_latency: join(p.level_latency.iter().map(|x| x.0)),
            final_projection: p.final_projection.map(|x| x.get()),
            method,
            trials_or_horizon: size,
            mean_rate: None,
            std_error: None,
            successes: None,
            truncated: None,
            mean_time: None,
            mean_time_std_error: None,
            flag: "",
            error: String::new(),
        };
        match &row.estimate {
            Ok(e) => {
                out.method = e.method.as_str();
                out.trials_or_horizon = e.trials_or_horizon;
                out.mean_rate = Some(e.mean_rate);
                out.std_error = Some(e.std_error);
                out.successes = Some(e.successes);
                out.truncated = Some(e.truncated);
                out.mean_time = e.mean_time;
                out.mean_time_std_error = e.mean_time_std_error;
                out.flag = e.flag();
            }
            Err(msg) => out.error = msg.clone(),
        }
        out
    }
}

/// One `analytic` row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticRow {
    pub p0: f64,
    pub p1: f64,
    pub tau: u64,
    pub n: u32,
    #[serde(rename = "mean_Z")]
    pub mean_z: f64,
    #[serde(rename = "mean_T")]
    pub mean_t: f64,
    pub rate: f64,
    pub alpha: f64,
    /// Whether `P_0 (tau + 1) < 1`, where the small-`P_0` form of `<Z>`
    /// applies.
    pub regime_flag: bool,
}

/// One `dlcz` row: a derived quantity and its value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityRow {
    pub quantity: String,
    pub value: f64,
}

pub fn write_rows<T: Serialize>(
    rows: &[T],
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for row in rows {
                serde_json::to_writer(&mut *out, row)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}
