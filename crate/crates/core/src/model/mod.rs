//! GAN Hamiltonian instances: orbitals, nuclear grid modes, basis-function
//! expansions of the potentials and the metal band.

mod basis;
mod io;
mod presets;
mod spin;
mod toy;
mod validate;

pub use basis::{eval_basis_function, AnalyticForm, BasisForm, BasisFunction};
pub(crate) use io::hex_digest;
pub use io::{load_model, model_hash, save_model};
pub use presets::{build_preset, Preset, PresetRow, TABLE1};
pub use spin::expand_spinful;
pub use toy::{random_model, ToySpec};
pub use validate::{validate_model, Violation, ViolationCode};

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub type BasisId = usize;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    NonReactive,
    Reactive,
    Translational,
}

/// One nuclear degree of freedom discretized on `2^grid_qubits` points.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct NuclearMode {
    pub kind: ModeKind,
    pub grid_qubits: u32,
    pub mass: f64,
    /// Grid spacing; defaults to `sqrt(2π/K)` when absent from a model file.
    #[serde(default)]
    pub spacing: Option<f64>,
}

impl NuclearMode {
    pub fn new(kind: ModeKind, grid_qubits: u32, mass: f64) -> Self {
        Self { kind, grid_qubits, mass, spacing: None }
    }

    pub fn grid_points(&self) -> usize {
        1usize << self.grid_qubits
    }

    pub fn canonical_spacing(&self) -> f64 {
        (2.0 * std::f64::consts::PI / self.grid_points() as f64).sqrt()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing.unwrap_or_else(|| self.canonical_spacing())
    }

    pub fn min_label(&self) -> i64 {
        -(self.grid_points() as i64) / 2
    }

    pub fn max_label(&self) -> i64 {
        self.grid_points() as i64 / 2 - 1
    }

    pub fn contains(&self, label: i64) -> bool {
        (self.min_label()..=self.max_label()).contains(&label)
    }

    /// Signed label stored in grid register value `u` (two's complement).
    pub fn label_of(&self, u: usize) -> i64 {
        let k = self.grid_points();
        if u >= k / 2 {
            u as i64 - k as i64
        } else {
            u as i64
        }
    }

    /// Register value holding the signed label.
    pub fn index_of(&self, label: i64) -> usize {
        label.rem_euclid(self.grid_points() as i64) as usize
    }

    pub fn position(&self, label: i64) -> f64 {
        self.spacing() * label as f64
    }

    /// Register value of the grid point nearest to position `q`.
    pub fn nearest_label(&self, q: f64) -> i64 {
        ((q / self.spacing()).round() as i64).clamp(self.min_label(), self.max_label())
    }
}

/// Coefficient of basis function `lambda` (or of the constant term when
/// `lambda` is `None`) in the expansion of an orbital-pair function.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Coefficient {
    pub i: usize,
    pub j: usize,
    pub lambda: Option<BasisId>,
    pub value: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ReferenceCoefficient {
    pub lambda: Option<BasisId>,
    pub value: f64,
}

/// Sparse expansions of g_ij (alpha), V_ij (beta) and U_0 (gamma).
///
/// `alpha` stores molecular hopping pairs in both orders and molecule-metal
/// pairs as `(mol, metal)` only. `beta` is an ordered table: the coefficient
/// of `n_i n_j` for `i != j` is `beta[i][j] + beta[j][i]`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Default)]
pub struct PotentialTables {
    #[serde(default)]
    pub alpha: Vec<Coefficient>,
    #[serde(default)]
    pub beta: Vec<Coefficient>,
    #[serde(default)]
    pub gamma: Vec<ReferenceCoefficient>,
}

/// Metal-local orbital indices of the two leads of a junction.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct LeadPartition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub mu_left: f64,
    pub mu_right: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct MetalSpec {
    pub energies: Vec<f64>,
    pub mu: f64,
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leads: Option<LeadPartition>,
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lead {
    Left,
    Right,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct GanModel {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n_mol: usize,
    pub n_metal: usize,
    pub modes: Vec<NuclearMode>,
    #[serde(flatten)]
    pub potentials: PotentialTables,
    pub basis: Vec<BasisFunction>,
    pub metal: MetalSpec,
    #[serde(default)]
    pub spinful: bool,
}

/// Channel of an effective coefficient: a basis function or the constant part.
pub type Channel = Option<BasisId>;

impl GanModel {
    pub fn n_orbitals(&self) -> usize {
        self.n_mol + self.n_metal
    }

    pub fn is_molecular(&self, p: usize) -> bool {
        p < self.n_mol
    }

    /// Global index of metal orbital `b`.
    pub fn metal_index(&self, b: usize) -> usize {
        self.n_mol + b
    }

    pub fn mode_split(&self) -> (usize, usize, usize) {
        let count = |k| self.modes.iter().filter(|m| m.kind == k).count();
        (count(ModeKind::NonReactive), count(ModeKind::Reactive), count(ModeKind::Translational))
    }

    pub fn grid_qubits(&self) -> usize {
        self.modes.iter().map(|m| m.grid_qubits as usize).sum()
    }

    pub fn system_qubits(&self) -> usize {
        self.n_orbitals() + self.grid_qubits()
    }

    pub fn basis_function(&self, id: BasisId) -> Option<&BasisFunction> {
        self.basis.iter().find(|f| f.id == id)
    }

    pub fn basis_ids(&self) -> Vec<BasisId> {
        self.basis.iter().map(|f| f.id).collect()
    }

    /// Channels in canonical order: the constant channel first, then basis
    /// functions by ascending id.
    pub fn channels(&self) -> Vec<Channel> {
        let mut ids = self.basis_ids();
        ids.sort_unstable();
        std::iter::once(None).chain(ids.into_iter().map(Some)).collect()
    }

    /// Summed alpha coefficient of `(i, j)` per channel (either storage order).
    pub fn alpha_table(&self) -> HashMap<(usize, usize, Channel), f64> {
        let mut t = HashMap::new();
        for c in &self.potentials.alpha {
            *t.entry((c.i, c.j, c.lambda)).or_insert(0.0) += c.value;
        }
        t
    }

    pub fn beta_table(&self) -> HashMap<(usize, usize, Channel), f64> {
        let mut t = HashMap::new();
        for c in &self.potentials.beta {
            *t.entry((c.i, c.j, c.lambda)).or_insert(0.0) += c.value;
        }
        t
    }

    pub fn gamma_table(&self) -> HashMap<Channel, f64> {
        let mut t = HashMap::new();
        for c in &self.potentials.gamma {
            *t.entry(c.lambda).or_insert(0.0) += c.value;
        }
        t
    }

    /// Hopping amplitude of the unordered pair `{i, j}` in `channel`.
    pub fn hopping(&self, table: &HashMap<(usize, usize, Channel), f64>, i: usize, j: usize, channel: Channel) -> f64 {
        let (a, b) = if self.is_molecular(i) && self.is_molecular(j) {
            (i.min(j), i.max(j))
        } else if self.is_molecular(i) {
            (i, j)
        } else {
            (j, i)
        };
        table.get(&(a, b, channel)).copied().unwrap_or(0.0)
    }

    /// Global indices of the orbitals in `lead`, when the metal is partitioned.
    pub fn lead_orbitals(&self, lead: Lead) -> Option<Vec<usize>> {
        let leads = self.metal.leads.as_ref()?;
        let local = match lead {
            Lead::Left => &leads.left,
            Lead::Right => &leads.right,
        };
        Some(local.iter().map(|&b| self.metal_index(b)).collect())
    }

    /// Electronic-only model with every basis function evaluated at the grid
    /// point `labels` and folded into the constant channel.
    pub fn frozen_at(&self, labels: &[i64]) -> crate::Result<GanModel> {
        let value = |lambda: Option<BasisId>| -> crate::Result<f64> {
            match lambda {
                None => Ok(1.0),
                Some(id) => {
                    let f = self.basis_function(id).ok_or(crate::Error::UnknownBasisId(id))?;
                    eval_basis_function(f, labels, &self.modes)
                }
            }
        };
        let mut m = self.clone();
        for c in m.potentials.alpha.iter_mut().chain(m.potentials.beta.iter_mut()) {
            c.value *= value(c.lambda)?;
            c.lambda = None;
        }
        for c in &mut m.potentials.gamma {
            c.value *= value(c.lambda)?;
            c.lambda = None;
        }
        m.modes.clear();
        m.basis.clear();
        Ok(m)
    }

    /// Copy of the model with every molecule-metal coupling removed.
    pub fn without_metal_coupling(&self) -> GanModel {
        let mut m = self.clone();
        let n_mol = m.n_mol;
        m.potentials.alpha.retain(|c| c.i < n_mol && c.j < n_mol);
        m
    }
}
