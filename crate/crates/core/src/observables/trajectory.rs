use serde::{Deserialize, Serialize};

use super::initial::{prepare_state, InitialStateSpec};
use super::measure::{current, measure, ObservableSpec};
use crate::error::{Error, Result};
use crate::exec;
use crate::model::{GanModel, Lead};
use crate::simulator::{Propagator, StateVector};

/// Observable values sampled along one trajectory.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl TimeSeries {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("time");
        for (name, _) in &self.columns {
            s.push(',');
            s.push_str(name);
        }
        s.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            s.push_str(&format!("{t:.10}"));
            for (_, v) in &self.columns {
                s.push_str(&format!(",{:.12e}", v[i]));
            }
            s.push('\n');
        }
        s
    }
}

/// Sample `observables` every `sample_every` steps of `propagator`, from
/// step 0 through `steps`.
pub fn run_trajectory(
    propagator: &Propagator,
    model: &GanModel,
    initial: StateVector,
    steps: u64,
    sample_every: u64,
    observables: &[ObservableSpec],
) -> Result<TimeSeries> {
    if sample_every == 0 {
        return Err(Error::InvalidArgument("sample interval must be at least 1 step".into()));
    }
    let lead_spec = |l| ObservableSpec::LeadNumber { lead: l };
    let mut needed_leads = Vec::new();
    for o in observables {
        match o {
            ObservableSpec::Current { lead } if !needed_leads.contains(lead) => needed_leads.push(*lead),
            ObservableSpec::JunctionCurrent => {
                for l in [Lead::Left, Lead::Right] {
                    if !needed_leads.contains(&l) {
                        needed_leads.push(l);
                    }
                }
            }
            _ => {}
        }
    }
    if !needed_leads.is_empty() && model.metal.leads.is_none() {
        return Err(Error::MissingLeads);
    }

    let mut state = initial;
    let mut times = Vec::new();
    let mut direct: Vec<Vec<f64>> = vec![Vec::new(); observables.len()];
    let mut leads: Vec<Vec<f64>> = vec![Vec::new(); needed_leads.len()];
    let mut step = 0;
    loop {
        times.push(step as f64 * propagator.dt());
        for (o, col) in observables.iter().zip(direct.iter_mut()) {
            if !o.needs_trajectory() {
                col.push(measure(&state, model, o)?);
            }
        }
        for (l, col) in needed_leads.iter().zip(leads.iter_mut()) {
            col.push(measure(&state, model, &lead_spec(*l))?);
        }
        if step + sample_every > steps {
            break;
        }
        for _ in 0..sample_every {
            propagator.step(&mut state)?;
        }
        step += sample_every;
    }

    let h = sample_every as f64 * propagator.dt();
    let lead_current = |l: Lead| current(&leads[needed_leads.iter().position(|x| *x == l).expect("collected")], h);
    let columns = observables
        .iter()
        .zip(direct)
        .map(|(o, col)| {
            let values = match o {
                ObservableSpec::Current { lead } => lead_current(*lead),
                ObservableSpec::JunctionCurrent => {
                    lead_current(Lead::Left).iter().zip(lead_current(Lead::Right)).map(|(l, r)| 0.5 * (l - r)).collect()
                }
                _ => col,
            };
            (o.to_string(), values)
        })
        .collect();
    Ok(TimeSeries { times, columns })
}

/// Mean and standard error of the mean.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Per-time-point mean and standard error over trajectories.
pub fn thermal_average(series: &[Vec<f64>]) -> Result<Vec<Estimate>> {
    if series.len() < 2 {
        return Err(Error::InvalidArgument("thermal averages need at least two trajectories".into()));
    }
    let len = series[0].len();
    if series.iter().any(|s| s.len() != len) {
        return Err(Error::InvalidArgument("trajectories have different lengths".into()));
    }
    let n = series.len() as f64;
    Ok((0..len)
        .map(|t| {
            let mean = series.iter().map(|s| s[t]).sum::<f64>() / n;
            let var = series.iter().map(|s| (s[t] - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Estimate { mean, stderr: (var / n).sqrt() }
        })
        .collect())
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct AveragedSeries {
    pub times: Vec<f64>,
    pub columns: Vec<(String, Vec<Estimate>)>,
}

impl AveragedSeries {
    pub fn from_trajectories(runs: &[TimeSeries]) -> Result<Self> {
        let first = runs.first().ok_or_else(|| Error::InvalidArgument("no trajectories".into()))?;
        let columns = first
            .columns
            .iter()
            .enumerate()
            .map(|(c, (name, _))| {
                let series: Vec<Vec<f64>> = runs.iter().map(|r| r.columns[c].1.clone()).collect();
                Ok((name.clone(), thermal_average(&series)?))
            })
            .collect::<Result<_>>()?;
        Ok(Self { times: first.times.clone(), columns })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("time");
        for (name, _) in &self.columns {
            s.push_str(&format!(",{name},{name}_stderr"));
        }
        s.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            s.push_str(&format!("{t:.10}"));
            for (_, v) in &self.columns {
                s.push_str(&format!(",{:.12e},{:.12e}", v[i].mean, v[i].stderr));
            }
            s.push('\n');
        }
        s
    }
}

/// Run `spec.trajectories` independent trajectories, each from its own
/// metal sample.
pub fn run_ensemble(
    propagator: &Propagator,
    model: &GanModel,
    spec: &InitialStateSpec,
    steps: u64,
    sample_every: u64,
    observables: &[ObservableSpec],
) -> Result<Vec<TimeSeries>> {
    exec::map_range(spec.trajectories, |i| {
        let psi = prepare_state(model, spec, i as u64)?;
        run_trajectory(propagator, model, psi, steps, sample_every, observables)
    })
    .into_iter()
    .collect()
}
