//! Named parameter grids.

use repeater_core::Architecture;

use crate::config::{AxesSection, BudgetSection, ConfigFile, ParamsSection, PhysicalSection};
use crate::error::CliError;

pub const PRESETS: [&str; 3] = ["fig2", "fig3", "fig4"];

/// Single doubling, `P_0 = 0.01`, `P_1 = 0.5`, lifetimes from 0 to 10^4.
pub fn fig2() -> ConfigFile {
    ConfigFile {
        params: ParamsSection {
            levels: Some(1),
            elements: Some(1),
            p_gen: Some(0.01),
            p_conn: Some(vec![0.5]),
            ..ParamsSection::default()
        },
        sweep: AxesSection {
            tau: Some(vec![
                0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000,
            ]),
            ..AxesSection::default()
        },
        ..ConfigFile::default()
    }
}

/// Single doubling, `P_0 = 0.01`, `P_1 = 0.1`, both wirings, `n` in
/// {1, 5, 10}, log-spaced lifetimes; steady-state rates over 10^7 units.
pub fn fig3() -> ConfigFile {
    ConfigFile {
        params: ParamsSection {
            levels: Some(1),
            p_gen: Some(0.01),
            p_conn: Some(vec![0.1]),
            ..ParamsSection::default()
        },
        sweep: AxesSection {
            architecture: Some(vec![Architecture::Parallel, Architecture::Multiplexed]),
            elements: Some(vec![1, 5, 10]),
            tau: Some(vec![1, 2, 5, 10, 20, 50, 100, 200, 500, 1000]),
            ..AxesSection::default()
        },
        budget: BudgetSection {
            trials: None,
            horizon: Some(10_000_000),
        },
        ..ConfigFile::default()
    }
}

/// 1000 km, `N = 3` with derived probabilities and the final projection,
/// both wirings, `n` in {1, 10, 100}, lifetimes from 10 ms to 10 s.
pub fn fig4() -> ConfigFile {
    ConfigFile {
        physical: Some(PhysicalSection::default_values()),
        sweep: AxesSection {
            architecture: Some(vec![Architecture::Parallel, Architecture::Multiplexed]),
            elements: Some(vec![1, 10, 100]),
            tau_ms: Some(vec![
                10.0, 25.0, 50.0, 100.0, 250.0, 500.0, 1000.0, 2500.0, 5000.0, 10_000.0,
            ]),
            ..AxesSection::default()
        },
        budget: BudgetSection {
            trials: None,
            horizon: Some(10_000_000),
        },
        ..ConfigFile::default()
    }
}

pub fn preset(name: &str) -> Result<ConfigFile, CliError> {
    match name {
        "fig2" => Ok(fig2()),
        "fig3" => Ok(fig3()),
        "fig4" => Ok(fig4()),
        _ => Err(CliError::Usage(format!(
            "unknown preset {name:?} (known: {})",
            PRESETS.join(", ")
        ))),
    }
}
