use clap::Args;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use gan_core::estimator::ModelSource;
use gan_core::model::model_hash;
use gan_core::observables::{run_ensemble, AveragedSeries, InitialStateSpec, ObservableSpec};
use gan_core::simulator::{EvolutionMode, Propagator};
use gan_core::Error;

use crate::{write, Failure};

#[derive(Args)]
pub struct SimulateArgs {
    /// Run configuration JSON.
    config: PathBuf,
    /// Seed for thermal sampling; required so every run is reproducible.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    trajectories: Option<usize>,
    /// Output directory for `trajectory.csv` and `manifest.json`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn default_mode() -> EvolutionMode {
    EvolutionMode::ExactFragments
}

fn default_sample_every() -> u64 {
    1
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub model: ModelSource,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub steps: Option<u64>,
    #[serde(default)]
    pub time_span: Option<f64>,
    #[serde(default = "default_mode")]
    pub evolution: EvolutionMode,
    #[serde(default = "default_sample_every")]
    pub sample_every: u64,
    pub initial: InitialStateSpec,
    pub observables: Vec<ObservableSpec>,
}

#[derive(Serialize)]
struct Manifest {
    model: String,
    model_hash: String,
    dt: f64,
    steps: u64,
    time_span: f64,
    evolution: EvolutionMode,
    seed: u64,
    trajectories: usize,
    sample_every: u64,
    columns: Vec<String>,
    parallel: bool,
    created_unix: u64,
}

/// `(dt, steps)` from any two of dt, steps and time span.
fn schedule(dt: Option<f64>, steps: Option<u64>, span: Option<f64>) -> Result<(f64, u64), Error> {
    let bad = |m: &str| Error::InvalidArgument(m.to_string());
    let (dt, steps) = match (dt, steps, span) {
        (Some(dt), Some(n), Some(t)) => {
            if (dt * n as f64 - t).abs() > 1e-9 * t.abs().max(1.0) {
                return Err(bad("dt * steps does not equal time_span"));
            }
            (dt, n)
        }
        (Some(dt), Some(n), None) => (dt, n),
        (None, Some(n), Some(t)) => (t / n as f64, n),
        (Some(dt), None, Some(t)) => {
            let n = (t / dt).round();
            if (n * dt - t).abs() > 1e-9 * t.abs().max(1.0) {
                return Err(bad("time_span is not a whole number of steps"));
            }
            (dt, n as u64)
        }
        _ => return Err(bad("give two of dt, steps and time_span")),
    };
    if !(dt.is_finite() && dt > 0.0) || steps == 0 {
        return Err(bad("dt must be positive and steps at least 1"));
    }
    Ok((dt, steps))
}

pub fn run(args: &SimulateArgs) -> Result<(), Failure> {
    let mut config: SimulateConfig = serde_json::from_str(&fs::read_to_string(&args.config)?).map_err(Error::from)?;
    config.initial.seed = args.seed;
    if let Some(n) = args.trajectories {
        config.initial.trajectories = n;
    }
    if config.sample_every == 0 || config.initial.trajectories == 0 {
        return Err(Error::InvalidArgument("sample_every and trajectories must be at least 1".into()).into());
    }
    // A flag replaces its config field; the span follows unless both are set.
    let span = if args.dt.is_some() ^ args.steps.is_some() { None } else { config.time_span };
    let (dt, steps) = schedule(args.dt.or(config.dt), args.steps.or(config.steps), span)?;

    let model = config.model.resolve()?;
    let propagator = Propagator::new(&model, dt, config.evolution)?;
    let runs = run_ensemble(&propagator, &model, &config.initial, steps, config.sample_every, &config.observables)?;
    let csv = if runs.len() == 1 { runs[0].to_csv() } else { AveragedSeries::from_trajectories(&runs)?.to_csv() };

    let manifest = Manifest {
        model: model.name.clone().unwrap_or_else(|| "unnamed".into()),
        model_hash: model_hash(&model),
        dt,
        steps,
        time_span: dt * steps as f64,
        evolution: config.evolution,
        seed: args.seed,
        trajectories: config.initial.trajectories,
        sample_every: config.sample_every,
        columns: config.observables.iter().map(|o| o.to_string()).collect(),
        parallel: gan_core::exec::is_parallel(),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    write(&args.out.join("trajectory.csv"), &csv)?;
    write(&args.out.join("manifest.json"), &(serde_json::to_string_pretty(&manifest).map_err(Error::from)? + "\n"))?;
    Ok(())
}
