use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    AnalyticForm, BasisFunction, Coefficient, GanModel, LeadPartition, MetalSpec, ModeKind, NuclearMode,
    PotentialTables, ReferenceCoefficient,
};

/// Shape of a small random instance.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default)]
pub struct ToySpec {
    pub n_mol: usize,
    pub n_metal: usize,
    pub grid_qubits: Vec<u32>,
    /// Add a Morse table function on mode 0.
    pub analytic: bool,
    /// Add electron-electron terms.
    pub interactions: bool,
    pub mass: f64,
    /// Largest coefficient magnitude.
    pub scale: f64,
    /// Split the metal into two leads (alternating orbitals) held at `±bias/2`.
    pub bias: Option<f64>,
    /// Multiplier on the molecule-metal couplings; 0 decouples the metal.
    pub coupling: f64,
}

impl ToySpec {
    pub fn new(n_mol: usize, n_metal: usize, grid_qubits: Vec<u32>) -> Self {
        Self {
            n_mol,
            n_metal,
            grid_qubits,
            analytic: false,
            interactions: true,
            mass: 1.0,
            scale: 1.0,
            bias: None,
            coupling: 1.0,
        }
    }
}

impl Default for ToySpec {
    fn default() -> Self {
        Self::new(1, 2, vec![3])
    }
}

/// Random model with dense couplings: Q, Q² per mode, one cross term when
/// there are two modes, optionally a Morse table on mode 0.
pub fn random_model(spec: &ToySpec, seed: u64) -> GanModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || spec.scale * rng.random_range(-1.0..1.0);
    let modes: Vec<NuclearMode> = spec
        .grid_qubits
        .iter()
        .enumerate()
        .map(|(k, &q)| {
            let kind = if k == 0 && spec.analytic { ModeKind::Reactive } else { ModeKind::NonReactive };
            NuclearMode::new(kind, q, spec.mass)
        })
        .collect();
    let mut basis = Vec::new();
    for k in 0..modes.len() {
        basis.push(BasisFunction::monomial(basis.len(), vec![(k, 1)]));
        basis.push(BasisFunction::monomial(basis.len(), vec![(k, 2)]));
    }
    if modes.len() >= 2 {
        basis.push(BasisFunction::monomial(basis.len(), vec![(0, 1), (1, 1)]));
    }
    if spec.analytic && !modes.is_empty() {
        basis.push(BasisFunction::analytic(basis.len(), 0, AnalyticForm::Morse { d: 0.5, a: 0.8, r: 0.2 }));
    }
    let channels: Vec<Option<usize>> = std::iter::once(None).chain((0..basis.len()).map(Some)).collect();
    let (n_mol, n_metal) = (spec.n_mol, spec.n_metal);

    let mut t = PotentialTables::default();
    for &ch in &channels {
        for i in 0..n_mol {
            t.alpha.push(Coefficient { i, j: i, lambda: ch, value: draw() });
            for j in i + 1..n_mol {
                let v = draw();
                t.alpha.push(Coefficient { i, j, lambda: ch, value: v });
                t.alpha.push(Coefficient { i: j, j: i, lambda: ch, value: v });
            }
        }
        if spec.interactions {
            for i in 0..n_mol {
                for j in i..n_mol {
                    let v = draw();
                    t.beta.push(Coefficient { i, j, lambda: ch, value: v });
                    if i != j {
                        t.beta.push(Coefficient { i: j, j: i, lambda: ch, value: v });
                    }
                }
            }
        }
        t.gamma.push(ReferenceCoefficient { lambda: ch, value: draw() });
    }
    // Couplings to the metal carry only a constant and a linear part.
    for i in 0..n_mol {
        for b in 0..n_metal {
            t.alpha.push(Coefficient { i, j: n_mol + b, lambda: None, value: spec.coupling * draw() });
            if !basis.is_empty() {
                t.alpha.push(Coefficient { i, j: n_mol + b, lambda: Some(0), value: spec.coupling * draw() });
            }
        }
    }
    let mut energies: Vec<f64> = (0..n_metal).map(|_| draw()).collect();
    energies.sort_by(f64::total_cmp);

    GanModel {
        name: Some(format!("toy-{n_mol}-{n_metal}-{seed}")),
        n_mol,
        n_metal,
        modes,
        potentials: t,
        basis,
        metal: MetalSpec {
            energies,
            mu: 0.0,
            temperature: 0.1,
            leads: spec.bias.map(|v| LeadPartition {
                left: (0..n_metal).step_by(2).collect(),
                right: (1..n_metal).step_by(2).collect(),
                mu_left: v / 2.0,
                mu_right: -v / 2.0,
            }),
        },
        spinful: false,
    }
}
