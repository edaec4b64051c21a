use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use super::{BasisForm, GanModel};

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationCode {
    EmptyOrbitalSet,
    InvalidGridSize,
    GridSpacingMismatch,
    NonPositiveMass,
    DuplicateBasisId,
    ConstantBasisFunction,
    ModeIndexOutOfRange,
    InvalidPotentialParameters,
    UnknownBasisId,
    OrbitalIndexOutOfRange,
    PairNotMolecular,
    MetalPairInV,
    AsymmetricAlpha,
    AsymmetricV,
    NonFiniteCoefficient,
    MetalEnergyCount,
    InvalidTemperature,
    InvalidLeadPartition,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Violation {
    pub code: ViolationCode,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}: {}", self.code, self.detail)
    }
}

const MAX_GRID_QUBITS: u32 = 24;
const SYMMETRY_TOL: f64 = 1e-12;

/// Report every invariant violation of `model`; empty when well-formed.
pub fn validate_model(model: &GanModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |code, detail: String| out.push(Violation { code, detail });

    if model.n_mol == 0 {
        push(ViolationCode::EmptyOrbitalSet, "n_mol must be at least 1".into());
    }
    if model.n_metal == 0 {
        push(ViolationCode::EmptyOrbitalSet, "n_metal must be at least 1".into());
    }

    for (k, mode) in model.modes.iter().enumerate() {
        if mode.grid_qubits == 0 || mode.grid_qubits > MAX_GRID_QUBITS {
            push(ViolationCode::InvalidGridSize, format!("mode {k} has {} grid qubits", mode.grid_qubits));
            continue;
        }
        let d = mode.spacing();
        if !d.is_finite() || (d * d * mode.grid_points() as f64 / (2.0 * std::f64::consts::PI) - 1.0).abs() > 1e-12 {
            push(ViolationCode::GridSpacingMismatch, format!("mode {k} spacing {d} is not sqrt(2π/K)"));
        }
        if !(mode.mass > 0.0 && mode.mass.is_finite()) {
            push(ViolationCode::NonPositiveMass, format!("mode {k} mass {}", mode.mass));
        }
    }

    let mut ids = HashSet::new();
    for f in &model.basis {
        if !ids.insert(f.id) {
            push(ViolationCode::DuplicateBasisId, format!("basis id {} repeated", f.id));
        }
        match &f.form {
            BasisForm::Monomial { powers } => {
                if f.degree() == 0 {
                    push(ViolationCode::ConstantBasisFunction, format!("monomial {} has degree 0", f.id));
                }
                for &(k, _) in powers {
                    if k >= model.modes.len() {
                        push(ViolationCode::ModeIndexOutOfRange, format!("monomial {} uses mode {k}", f.id));
                    }
                }
            }
            BasisForm::Analytic { mode, potential } => {
                if *mode >= model.modes.len() {
                    push(ViolationCode::ModeIndexOutOfRange, format!("analytic {} uses mode {mode}", f.id));
                } else if !potential.parameters_valid() {
                    push(
                        ViolationCode::InvalidPotentialParameters,
                        format!("analytic {} has parameters {potential:?}", f.id),
                    );
                } else {
                    let m = &model.modes[*mode];
                    let bad = (m.min_label()..=m.max_label()).find(|&x| !potential.eval(m.position(x)).is_finite());
                    if let Some(x) = bad {
                        push(
                            ViolationCode::InvalidPotentialParameters,
                            format!("analytic {} is not finite at label {x}", f.id),
                        );
                    }
                }
            }
        }
    }

    let n = model.n_orbitals();
    let check_channel = |lambda: Option<usize>, push: &mut dyn FnMut(ViolationCode, String)| {
        if let Some(l) = lambda {
            if !ids.contains(&l) {
                push(ViolationCode::UnknownBasisId, format!("coefficient refers to basis id {l}"));
            }
        }
    };

    let alpha = model.alpha_table();
    for c in &model.potentials.alpha {
        check_channel(c.lambda, &mut push);
        if !c.value.is_finite() {
            push(ViolationCode::NonFiniteCoefficient, format!("alpha[{}][{}]", c.i, c.j));
        }
        if c.i >= n || c.j >= n {
            push(ViolationCode::OrbitalIndexOutOfRange, format!("alpha pair ({}, {})", c.i, c.j));
            continue;
        }
        if !model.is_molecular(c.i) {
            push(ViolationCode::PairNotMolecular, format!("alpha pair ({}, {}) must start in the molecule", c.i, c.j));
            continue;
        }
        if c.i != c.j && model.is_molecular(c.j) {
            let fwd = alpha.get(&(c.i, c.j, c.lambda)).copied().unwrap_or(0.0);
            let rev = alpha.get(&(c.j, c.i, c.lambda)).copied().unwrap_or(0.0);
            if (fwd - rev).abs() > SYMMETRY_TOL && c.i < c.j {
                push(
                    ViolationCode::AsymmetricAlpha,
                    format!("alpha ({}, {}) = {fwd} but ({}, {}) = {rev}", c.i, c.j, c.j, c.i),
                );
            }
            if c.i > c.j && !alpha.contains_key(&(c.j, c.i, c.lambda)) {
                push(ViolationCode::AsymmetricAlpha, format!("alpha ({}, {}) has no mirror entry", c.i, c.j));
            }
        }
    }

    let beta = model.beta_table();
    for c in &model.potentials.beta {
        check_channel(c.lambda, &mut push);
        if !c.value.is_finite() {
            push(ViolationCode::NonFiniteCoefficient, format!("beta[{}][{}]", c.i, c.j));
        }
        if c.i >= n || c.j >= n {
            push(ViolationCode::OrbitalIndexOutOfRange, format!("beta pair ({}, {})", c.i, c.j));
            continue;
        }
        if !model.is_molecular(c.i) || !model.is_molecular(c.j) {
            push(ViolationCode::MetalPairInV, format!("beta pair ({}, {}) leaves the molecule", c.i, c.j));
            continue;
        }
        if c.i < c.j {
            let fwd = beta.get(&(c.i, c.j, c.lambda)).copied().unwrap_or(0.0);
            let rev = beta.get(&(c.j, c.i, c.lambda)).copied().unwrap_or(0.0);
            if (fwd - rev).abs() > SYMMETRY_TOL {
                push(
                    ViolationCode::AsymmetricV,
                    format!("beta ({}, {}) = {fwd} but ({}, {}) = {rev}", c.i, c.j, c.j, c.i),
                );
            }
        } else if c.i > c.j && !beta.contains_key(&(c.j, c.i, c.lambda)) {
            push(ViolationCode::AsymmetricV, format!("beta ({}, {}) has no mirror entry", c.i, c.j));
        }
    }

    for c in &model.potentials.gamma {
        check_channel(c.lambda, &mut push);
        if !c.value.is_finite() {
            push(ViolationCode::NonFiniteCoefficient, "gamma".into());
        }
    }

    let metal = &model.metal;
    if metal.energies.len() != model.n_metal {
        push(
            ViolationCode::MetalEnergyCount,
            format!("{} energies for {} metal orbitals", metal.energies.len(), model.n_metal),
        );
    }
    if metal.energies.iter().any(|e| !e.is_finite()) || !metal.mu.is_finite() {
        push(ViolationCode::NonFiniteCoefficient, "metal energies or chemical potential".into());
    }
    if !(metal.temperature >= 0.0 && metal.temperature.is_finite()) {
        push(ViolationCode::InvalidTemperature, format!("temperature {}", metal.temperature));
    }
    if let Some(leads) = &metal.leads {
        let mut seen = vec![0u8; model.n_metal];
        let mut ok = true;
        for &b in leads.left.iter().chain(&leads.right) {
            match seen.get_mut(b) {
                Some(s) => *s += 1,
                None => ok = false,
            }
        }
        if !ok || seen.iter().any(|&s| s != 1) {
            push(ViolationCode::InvalidLeadPartition, "leads must be a disjoint cover of the metal orbitals".into());
        }
    }
    out
}
