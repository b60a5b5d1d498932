//! Resolution of config layers into a concrete parameter grid.

use repeater_core::dlcz::{self, DerivedProbabilities, PhysicalParams};
use repeater_core::model::default_level_latency;
use repeater_core::sim::{Budget, SweepPoint};
use repeater_core::{Architecture, Probability, RepeaterParams, TimeUnits};

use crate::config::{
    time_units, AxesSection, ConfigFile, Format, OutputSection, ParamsSection, PhysicalSection,
};
use crate::error::CliError;

/// Default budget of `simulate` when none is configured.
pub const DEFAULT_TRIALS: u64 = 10_000;

/// A fully resolved sweep: base parameters, axes, budget and output.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Parameters of the first grid point; axes override single fields.
    pub base: RepeaterParams,
    pub physical: Option<PhysicalParams>,
    pub derived: Option<DerivedProbabilities>,
    pub axes: AxesSection,
    pub budget: Budget,
    pub seed: u64,
    pub output: OutputSection,
}

/// One grid point with the lifetime in ms it came from, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub point: SweepPoint,
    pub tau_ms: Option<f64>,
}

fn missing(name: &str) -> CliError {
    CliError::Usage(format!("missing parameter {name}"))
}

fn probability(name: &'static str, v: f64) -> Result<Probability, CliError> {
    Ok(Probability::named(name, v)?)
}

pub(crate) fn physical_params(s: &PhysicalSection) -> Result<PhysicalParams, CliError> {
    let s = PhysicalSection::default_values().overlay(s.clone());
    Ok(PhysicalParams {
        total_length_km: s.total_length_km.unwrap(),
        levels: s.levels.unwrap(),
        fiber_loss_db_per_km: s.fiber_loss_db_per_km.unwrap(),
        eta0: probability("eta0", s.eta0.unwrap())?,
        eta: probability("eta", s.eta.unwrap())?,
        detector: s.detector.unwrap(),
        refractive_index: s.refractive_index.unwrap(),
    })
}

fn non_empty<T>(name: &str, axis: &Option<Vec<T>>) -> Result<(), CliError> {
    match axis {
        Some(v) if v.is_empty() => Err(CliError::Usage(format!("sweep axis {name} is empty"))),
        _ => Ok(()),
    }
}

impl SweepSpec {
    /// Resolves merged config layers. `default_budget` applies when the
    /// layers name no budget.
    pub fn resolve(cfg: &ConfigFile, default_budget: Budget) -> Result<SweepSpec, CliError> {
        let axes = cfg.sweep.clone();
        non_empty("architecture", &axes.architecture)?;
        non_empty("elements", &axes.elements)?;
        non_empty("p_gen", &axes.p_gen)?;
        non_empty("p1", &axes.p1)?;
        non_empty("tau", &axes.tau)?;
        non_empty("tau_ms", &axes.tau_ms)?;
        if axes.tau.is_some() && axes.tau_ms.is_some() {
            return Err(CliError::Usage("sweep over tau and tau_ms at once".into()));
        }

        let (physical, derived) = match &cfg.physical {
            Some(s) => {
                let phys = physical_params(s)?;
                let derived = dlcz::derive(&phys)?;
                (Some(phys), Some(derived))
            }
            None => (None, None),
        };
        if axes.tau_ms.is_some() && derived.is_none() {
            return Err(CliError::Usage(
                "tau_ms needs a [physical] section to fix the time unit".into(),
            ));
        }

        let p: &ParamsSection = &cfg.params;
        let levels = p
            .levels
            .or(physical.as_ref().map(|x| x.levels))
            .unwrap_or(1);
        let p_gen = match (&axes.p_gen, p.p_gen, &derived) {
            (Some(v), _, _) => v[0],
            (None, Some(x), _) => x,
            (None, None, Some(d)) => d.p0.get(),
            _ => return Err(missing("p0")),
        };
        let mut p_conn: Vec<f64> = match (&p.p_conn, &derived) {
            (Some(v), _) => v.clone(),
            (None, Some(d)) => d.p_conn.iter().map(|x| x.get()).collect(),
            (None, None) => match &axes.p1 {
                Some(v) => vec![v[0]; levels as usize],
                None => return Err(missing("p1")),
            },
        };
        if let (Some(v), Some(first)) = (&axes.p1, p_conn.first_mut()) {
            *first = v[0];
        }
        let tau = match (&axes.tau, &axes.tau_ms, p.tau) {
            (Some(v), _, _) => TimeUnits(v[0]),
            (None, Some(v), _) => dlcz::lifetime_to_units(v[0], derived.as_ref().unwrap()),
            (None, None, Some(t)) => TimeUnits(t),
            _ => return Err(missing("tau")),
        };
        let final_projection = match (p.final_projection, &derived) {
            (Some(x), _) => Some(probability("final_projection", x)?),
            (None, Some(d)) => d.epsilon,
            (None, None) => None,
        };
        let base = RepeaterParams {
            levels,
            elements: axes
                .elements
                .as_ref()
                .map(|v| v[0])
                .or(p.elements)
                .unwrap_or(1),
            tau,
            p_gen: probability("p0", p_gen)?,
            p_conn: p_conn
                .iter()
                .map(|&x| probability("p_conn", x))
                .collect::<Result<_, _>>()?,
            level_latency: p
                .level_latency
                .as_deref()
                .map(time_units)
                .unwrap_or_else(|| default_level_latency(levels)),
            architecture: axes
                .architecture
                .as_ref()
                .map(|v| v[0])
                .or(p.architecture)
                .unwrap_or(Architecture::Multiplexed),
            final_projection,
            concurrent_generation: p.concurrent_generation.unwrap_or(true),
        };
        let base = base.validate()?;

        let budget = match (cfg.budget.trials, cfg.budget.horizon) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "give either trials or horizon, not both".into(),
                ))
            }
            (Some(t), None) => Budget::Trials(t),
            (None, Some(h)) => Budget::Horizon(TimeUnits(h)),
            (None, None) => default_budget,
        };
        match budget {
            Budget::Trials(0) | Budget::Horizon(TimeUnits(0)) => {
                return Err(CliError::Usage("budget must be positive".into()))
            }
            _ => {}
        }

        let spec = SweepSpec {
            base,
            physical,
            derived,
            axes,
            budget,
            seed: cfg.seed.unwrap_or(0),
            output: cfg.output.clone(),
        };
        // Reject invalid values anywhere on the grid before running.
        for g in spec.points()? {
            g.point.params.validate()?;
        }
        Ok(spec)
    }

    pub fn format(&self) -> Format {
        self.output.format.unwrap_or_default()
    }

    /// Number of grid points.
    pub fn size(&self) -> usize {
        let len = |n: Option<usize>| n.unwrap_or(1);
        let a = &self.axes;
        len(a.architecture.as_ref().map(Vec::len))
            * len(a.elements.as_ref().map(Vec::len))
            * len(a.p_gen.as_ref().map(Vec::len))
            * len(a.p1.as_ref().map(Vec::len))
            * len(a
                .tau
                .as_ref()
                .map(Vec::len)
                .or(a.tau_ms.as_ref().map(Vec::len)))
    }

    /// Grid points in grid order.
    pub fn points(&self) -> Result<Vec<GridPoint>, CliError> {
        let a = &self.axes;
        let archs = a
            .architecture
            .clone()
            .unwrap_or(vec![self.base.architecture]);
        let elements = a.elements.clone().unwrap_or(vec![self.base.elements]);
        let p_gens = a.p_gen.clone().unwrap_or(vec![self.base.p_gen.get()]);
        let p1s: Vec<Option<f64>> = match &a.p1 {
            Some(v) => v.iter().map(|&x| Some(x)).collect(),
            None => vec![None],
        };
        let lifetimes: Vec<(TimeUnits, Option<f64>)> = match (&a.tau, &a.tau_ms) {
            (Some(v), _) => v.iter().map(|&t| (TimeUnits(t), None)).collect(),
            (None, Some(v)) => {
                let d = self.derived.as_ref().expect("checked in resolve");
                v.iter()
                    .map(|&ms| (dlcz::lifetime_to_units(ms, d), Some(ms)))
                    .collect()
            }
            (None, None) => vec![(self.base.tau, None)],
        };
        let mut out = Vec::with_capacity(self.size());
        for &arch in &archs {
            for &n in &elements {
                for &p0 in &p_gens {
                    for p1 in &p1s {
                        for &(tau, tau_ms) in &lifetimes {
                            let mut params = self.base.clone();
                            params.architecture = arch;
                            params.elements = n;
                            params.p_gen = probability("p0", p0)?;
                            if let Some(p1) = p1 {
                                params.p_conn[0] = probability("p1", *p1)?;
                            }
                            params.tau = tau;
                            out.push(GridPoint {
                                point: SweepPoint {
                                    params,
                                    budget: self.budget,
                                },
                                tau_ms,
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The resolved configuration as a config file that reproduces it.
    pub fn to_config(&self) -> ConfigFile {
        ConfigFile {
            preset: None,
            seed: Some(self.seed),
            params: (&self.base).into(),
            physical: self.physical.as_ref().map(|p| PhysicalSection {
                total_length_km: Some(p.total_length_km),
                levels: Some(p.levels),
                fiber_loss_db_per_km: Some(p.fiber_loss_db_per_km),
                eta0: Some(p.eta0.get()),
                eta: Some(p.eta.get()),
                detector: Some(p.detector),
                refractive_index: Some(p.refractive_index),
            }),
            sweep: self.axes.clone(),
            budget: match self.budget {
                Budget::Trials(t) => crate::config::BudgetSection {
                    trials: Some(t),
                    horizon: None,
                },
                Budget::Horizon(h) => crate::config::BudgetSection {
                    trials: None,
                    horizon: Some(h.0),
                },
            },
            output: self.output.clone(),
        }
    }
}
