use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use super::initial::{reference_slice, sorted_eigen};
use crate::error::{Error, Result};
use crate::model::{GanModel, Lead};
use crate::simulator::{kinetic_matrix, StateVector};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ObservableSpec {
    OrbitalPopulation {
        orbital: usize,
    },
    TotalMolElectrons,
    ModePosition {
        mode: usize,
    },
    /// Probability mass of mode `mode` on the grid labels in `labels`.
    SubspaceProjector {
        mode: usize,
        labels: Vec<i64>,
    },
    VibrationalPopulation {
        mode: usize,
        level: usize,
    },
    LeadNumber {
        lead: Lead,
    },
    /// Charge flux out of a lead, by central differences of its electron number.
    Current {
        lead: Lead,
    },
    /// `(I_L − I_R) / 2`.
    JunctionCurrent,
}

impl ObservableSpec {
    pub fn needs_trajectory(&self) -> bool {
        matches!(self, ObservableSpec::Current { .. } | ObservableSpec::JunctionCurrent)
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lead = |l: &Lead| match l {
            Lead::Left => "L",
            Lead::Right => "R",
        };
        match self {
            ObservableSpec::OrbitalPopulation { orbital } => write!(f, "n_{orbital}"),
            ObservableSpec::TotalMolElectrons => write!(f, "n_mol"),
            ObservableSpec::ModePosition { mode } => write!(f, "q_{mode}"),
            ObservableSpec::SubspaceProjector { mode, .. } => write!(f, "omega_{mode}"),
            ObservableSpec::VibrationalPopulation { mode, level } => write!(f, "vib_{mode}_{level}"),
            ObservableSpec::LeadNumber { lead: l } => write!(f, "N_{}", lead(l)),
            ObservableSpec::Current { lead: l } => write!(f, "I_{}", lead(l)),
            ObservableSpec::JunctionCurrent => write!(f, "I_junction"),
        }
    }
}

fn occupation(state: &StateVector, orbitals: &[usize]) -> f64 {
    state
        .electronic_probabilities()
        .iter()
        .enumerate()
        .map(|(e, p)| p * orbitals.iter().filter(|&&i| e >> i & 1 == 1).count() as f64)
        .sum()
}

fn check_mode(model: &GanModel, mode: usize, spec: &ObservableSpec) -> Result<()> {
    if mode >= model.modes.len() {
        return Err(Error::UnknownObservable(spec.to_string()));
    }
    Ok(())
}

/// Vibrational levels of mode `k`: eigenvectors of its kinetic energy plus
/// the reference potential slice, lowest first, as columns.
pub fn vibrational_basis(model: &GanModel, k: usize) -> Result<(Vec<f64>, nalgebra::DMatrix<Complex64>)> {
    let mode = model.modes.get(k).ok_or_else(|| Error::InvalidArgument(format!("mode {k} does not exist")))?;
    let mut h = kinetic_matrix(mode);
    for u in 0..mode.grid_points() {
        h[(u, u)] += reference_slice(model, k, mode.label_of(u))?;
    }
    Ok(sorted_eigen(h))
}

/// Expectation value of a single-time observable.
pub fn measure(state: &StateVector, model: &GanModel, spec: &ObservableSpec) -> Result<f64> {
    match spec {
        ObservableSpec::OrbitalPopulation { orbital } => {
            if *orbital >= model.n_orbitals() {
                return Err(Error::UnknownObservable(spec.to_string()));
            }
            Ok(occupation(state, &[*orbital]))
        }
        ObservableSpec::TotalMolElectrons => Ok(occupation(state, &(0..model.n_mol).collect::<Vec<_>>())),
        ObservableSpec::ModePosition { mode } => {
            check_mode(model, *mode, spec)?;
            let m = &model.modes[*mode];
            Ok(state.mode_probabilities(*mode).iter().enumerate().map(|(u, p)| p * m.position(m.label_of(u))).sum())
        }
        ObservableSpec::SubspaceProjector { mode, labels } => {
            check_mode(model, *mode, spec)?;
            let m = &model.modes[*mode];
            if let Some(bad) = labels.iter().find(|&&x| !m.contains(x)) {
                return Err(Error::IndexOutOfGrid { mode: *mode, label: *bad, points: m.grid_points() });
            }
            let p = state.mode_probabilities(*mode);
            let mut set = labels.clone();
            set.sort_unstable();
            set.dedup();
            Ok(set.iter().map(|&x| p[m.index_of(x)]).sum())
        }
        ObservableSpec::VibrationalPopulation { mode, level } => {
            check_mode(model, *mode, spec)?;
            let points = model.modes[*mode].grid_points();
            if *level >= points {
                return Err(Error::UnknownObservable(spec.to_string()));
            }
            let (_, basis) = vibrational_basis(model, *mode)?;
            let phi = basis.column(*level);
            let stride = state.layout.mode_stride(*mode);
            let block = stride * points;
            let mut total = 0.0;
            for chunk in state.amps.chunks(block) {
                for offset in 0..stride {
                    let overlap: Complex64 = (0..points).map(|u| phi[u].conj() * chunk[offset + u * stride]).sum();
                    total += overlap.norm_sqr();
                }
            }
            Ok(total)
        }
        ObservableSpec::LeadNumber { lead } => {
            let orbitals = model.lead_orbitals(*lead).ok_or(Error::MissingLeads)?;
            Ok(occupation(state, &orbitals))
        }
        ObservableSpec::Current { .. } | ObservableSpec::JunctionCurrent => {
            Err(Error::InvalidArgument(format!("{spec} is defined on trajectories only")))
        }
    }
}

/// `I(t) = −[N(t + Δt/2) − N(t − Δt/2)] / Δt` at every sample of `n`, taken at
/// spacing `h`: central differences (Δt = 2h) inside, one-sided at the ends.
pub fn current(n: &[f64], h: f64) -> Vec<f64> {
    let len = n.len();
    (0..len)
        .map(|j| match (j, len) {
            (_, 0 | 1) => 0.0,
            (0, _) => -(n[1] - n[0]) / h,
            (j, l) if j == l - 1 => -(n[j] - n[j - 1]) / h,
            (j, _) => -(n[j + 1] - n[j - 1]) / (2.0 * h),
        })
        .collect()
}
