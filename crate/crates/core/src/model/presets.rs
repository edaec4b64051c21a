use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::str::FromStr;

use super::{
    expand_spinful, AnalyticForm, BasisFunction, BasisId, Coefficient, GanModel, LeadPartition, MetalSpec, ModeKind,
    NuclearMode, PotentialTables, ReferenceCoefficient,
};
use crate::error::Error;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    ScatteringSmall,
    ScatteringMid,
    ScatteringLarge,
    #[serde(rename = "PhotoCT_1")]
    PhotoCt1,
    #[serde(rename = "PhotoCT_2")]
    PhotoCt2,
    #[serde(rename = "PhotoCT_3")]
    PhotoCt3,
    #[serde(rename = "Junction_1")]
    Junction1,
    #[serde(rename = "Junction_2")]
    Junction2,
    #[serde(rename = "Junction_3")]
    Junction3,
}

/// Published sizes and costs of one application instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PresetRow {
    pub preset: Preset,
    pub n_mol: usize,
    pub n_metal: usize,
    pub split: (usize, usize, usize),
    pub qubits: usize,
    /// Toffoli gates for 1000 Trotter steps.
    pub toffoli: f64,
}

impl PresetRow {
    pub fn m(&self) -> usize {
        self.split.0 + self.split.1 + self.split.2
    }
}

pub const TABLE1: [PresetRow; 9] = [
    PresetRow {
        preset: Preset::ScatteringSmall,
        n_mol: 4,
        n_metal: 50,
        split: (10, 3, 1),
        qubits: 196,
        toffoli: 2.30e7,
    },
    PresetRow {
        preset: Preset::ScatteringMid,
        n_mol: 4,
        n_metal: 100,
        split: (10, 3, 1),
        qubits: 246,
        toffoli: 3.05e7,
    },
    PresetRow {
        preset: Preset::ScatteringLarge,
        n_mol: 4,
        n_metal: 100,
        split: (30, 3, 1),
        qubits: 346,
        toffoli: 4.55e7,
    },
    PresetRow { preset: Preset::PhotoCt1, n_mol: 4, n_metal: 100, split: (20, 0, 0), qubits: 267, toffoli: 2.02e7 },
    PresetRow { preset: Preset::PhotoCt2, n_mol: 8, n_metal: 100, split: (20, 0, 0), qubits: 271, toffoli: 7.85e7 },
    PresetRow { preset: Preset::PhotoCt3, n_mol: 8, n_metal: 100, split: (40, 0, 0), qubits: 371, toffoli: 1.29e8 },
    PresetRow { preset: Preset::Junction1, n_mol: 2, n_metal: 100, split: (5, 2, 1), qubits: 212, toffoli: 2.79e7 },
    PresetRow { preset: Preset::Junction2, n_mol: 2, n_metal: 100, split: (10, 2, 1), qubits: 237, toffoli: 3.10e7 },
    PresetRow { preset: Preset::Junction3, n_mol: 2, n_metal: 200, split: (10, 2, 1), qubits: 337, toffoli: 5.02e7 },
];

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::ScatteringSmall,
        Preset::ScatteringMid,
        Preset::ScatteringLarge,
        Preset::PhotoCt1,
        Preset::PhotoCt2,
        Preset::PhotoCt3,
        Preset::Junction1,
        Preset::Junction2,
        Preset::Junction3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::ScatteringSmall => "ScatteringSmall",
            Preset::ScatteringMid => "ScatteringMid",
            Preset::ScatteringLarge => "ScatteringLarge",
            Preset::PhotoCt1 => "PhotoCT_1",
            Preset::PhotoCt2 => "PhotoCT_2",
            Preset::PhotoCt3 => "PhotoCT_3",
            Preset::Junction1 => "Junction_1",
            Preset::Junction2 => "Junction_2",
            Preset::Junction3 => "Junction_3",
        }
    }

    pub fn row(self) -> &'static PresetRow {
        TABLE1.iter().find(|r| r.preset == self).expect("every preset has a row")
    }

    fn family(self) -> Family {
        match self {
            Preset::ScatteringSmall | Preset::ScatteringMid | Preset::ScatteringLarge => Family::Scattering,
            Preset::PhotoCt1 | Preset::PhotoCt2 | Preset::PhotoCt3 => Family::PhotoCt,
            Preset::Junction1 | Preset::Junction2 | Preset::Junction3 => Family::Junction,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    /// Case-, dash- and underscore-insensitive.
    fn from_str(s: &str) -> Result<Self, Error> {
        let norm = |t: &str| t.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        let key = norm(s);
        Preset::ALL.into_iter().find(|p| norm(p.name()) == key).ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Scattering,
    PhotoCt,
    Junction,
}

/// Grid qubits per mode kind.
pub(crate) fn preset_grid_qubits(kind: ModeKind) -> u32 {
    match kind {
        ModeKind::NonReactive => 5,
        ModeKind::Reactive => 7,
        ModeKind::Translational => 8,
    }
}

/// Deterministic uniform draws in [-1, 1] addressed by a coefficient path.
struct CoefficientStream {
    key: String,
}

impl CoefficientStream {
    fn new(preset: Preset, seed: u64) -> Self {
        Self { key: format!("{}/{seed}", preset.name()) }
    }

    fn draw(&self, path: &str) -> f64 {
        let digest =
            Sha256::new().chain_update(self.key.as_bytes()).chain_update(b"/").chain_update(path.as_bytes()).finalize();
        let mut word = [0u8; 8];
        word.copy_from_slice(&digest[..8]);
        let bits = u64::from_le_bytes(word) >> 11;
        let unit = bits as f64 / (1u64 << 53) as f64;
        // Exactly zero is excluded so every coefficient stays present.
        let v = 2.0 * unit - 1.0;
        if v == 0.0 {
            0.5
        } else {
            v
        }
    }
}

struct Builder {
    basis: Vec<BasisFunction>,
    tables: PotentialTables,
}

impl Builder {
    fn add_basis(&mut self, f: impl FnOnce(BasisId) -> BasisFunction) -> BasisId {
        let id = self.basis.len();
        self.basis.push(f(id));
        id
    }

    fn alpha(&mut self, i: usize, j: usize, lambda: Option<BasisId>, value: f64) {
        self.tables.alpha.push(Coefficient { i, j, lambda, value });
    }

    fn beta(&mut self, i: usize, j: usize, lambda: Option<BasisId>, value: f64) {
        self.tables.beta.push(Coefficient { i, j, lambda, value });
    }

    fn gamma(&mut self, lambda: Option<BasisId>, value: f64) {
        self.tables.gamma.push(ReferenceCoefficient { lambda, value });
    }
}

/// Build the application instance `preset` with coefficients drawn from `seed`.
pub fn build_preset(preset: Preset, seed: u64) -> GanModel {
    let row = preset.row();
    let family = preset.family();
    let spinful = family != Family::Junction;
    let (n_mol, n_metal) = if spinful { (row.n_mol / 2, row.n_metal / 2) } else { (row.n_mol, row.n_metal) };
    let (m1, m2, mz) = row.split;
    let m = m1 + m2 + mz;
    let rng = CoefficientStream::new(preset, seed);

    let kinds = std::iter::repeat_n(ModeKind::NonReactive, m1)
        .chain(std::iter::repeat_n(ModeKind::Reactive, m2))
        .chain(std::iter::repeat_n(ModeKind::Translational, mz));
    let modes: Vec<NuclearMode> = kinds.map(|k| NuclearMode::new(k, preset_grid_qubits(k), 1.0)).collect();

    let mut b = Builder { basis: Vec::new(), tables: PotentialTables::default() };
    let linear: Vec<BasisId> = (0..m)
        .map(|k| {
            let id = b.add_basis(|id| BasisFunction::monomial(id, vec![(k, 1)]));
            b.add_basis(|id| BasisFunction::monomial(id, vec![(k, 2)]));
            id
        })
        .collect();
    let quadratic = |k: usize| linear[k] + 1;

    let analytic_for = |k: usize| match modes[k].kind {
        ModeKind::Reactive => AnalyticForm::Morse { d: 1.0, a: 1.0, r: 0.0 },
        _ => AnalyticForm::RepulsiveExp { d: 1.0, a: 1.0, r: 0.0 },
    };

    // Diagonal molecular energies U_ii.
    for i in 0..n_mol {
        b.alpha(i, i, None, rng.draw(&format!("U/{i}/{i}/const")));
        for (k, &lin) in linear.iter().enumerate().take(m1) {
            b.alpha(i, i, Some(lin), rng.draw(&format!("U/{i}/{i}/a/{k}")));
            b.alpha(i, i, Some(quadratic(k)), rng.draw(&format!("U/{i}/{i}/b/{k}")));
        }
        for k in m1..m {
            let id = b.add_basis(|id| BasisFunction::analytic(id, k, analytic_for(k)));
            b.alpha(i, i, Some(id), 1.0);
        }
    }

    // Molecular hopping U_ij, stored in both orders.
    for i in 0..n_mol {
        for j in i + 1..n_mol {
            let mut both = |lambda, path: String| {
                let v = rng.draw(&path);
                b.alpha(i, j, lambda, v);
                b.alpha(j, i, lambda, v);
            };
            both(None, format!("U/{i}/{j}/const"));
            for (k, &lin) in linear.iter().enumerate().take(m) {
                both(Some(lin), format!("U/{i}/{j}/a/{k}"));
                both(Some(quadratic(k)), format!("U/{i}/{j}/b/{k}"));
            }
        }
    }

    // Reference potential U_0.
    b.gamma(None, rng.draw("U0/const"));
    for (k, &lin) in linear.iter().enumerate().take(m1) {
        b.gamma(Some(lin), rng.draw(&format!("U0/a/{k}")));
        b.gamma(Some(quadratic(k)), rng.draw(&format!("U0/b/{k}")));
    }
    for k in m1..m {
        let id = b.add_basis(|id| BasisFunction::analytic(id, k, analytic_for(k)));
        b.gamma(Some(id), 1.0);
    }

    // Electron-electron terms V_ij.
    let v_pairs: Vec<(usize, usize)> = match family {
        Family::Junction => vec![(0, 1)],
        _ => (0..n_mol).flat_map(|i| (i..n_mol).map(move |j| (i, j))).collect(),
    };
    for (i, j) in v_pairs {
        let mut sym = |lambda, path: String| {
            let v = rng.draw(&path);
            b.beta(i, j, lambda, v);
            if i != j {
                b.beta(j, i, lambda, v);
            }
        };
        sym(None, format!("V/{i}/{j}/const"));
        for (k, &lin) in linear.iter().enumerate().take(m) {
            sym(Some(lin), format!("V/{i}/{j}/c/{k}"));
            sym(Some(quadratic(k)), format!("V/{i}/{j}/d/{k}"));
        }
    }

    // Molecule-metal couplings W_ib = w_ib f_int(Q_{M-1}), or constants.
    let switch = if family != Family::PhotoCt && mz > 0 {
        Some(b.add_basis(|id| BasisFunction::analytic(id, m - 1, AnalyticForm::TanhSwitch { a: 0.1, b: 1.0, r: 0.0 })))
    } else {
        None
    };
    for i in 0..n_mol {
        for bb in 0..n_metal {
            let w = rng.draw(&format!("W/{i}/{bb}"));
            b.alpha(i, n_mol + bb, switch, w);
        }
    }

    let energies: Vec<f64> = if n_metal == 1 {
        vec![0.0]
    } else {
        (0..n_metal).map(|k| -1.0 + 2.0 * k as f64 / (n_metal - 1) as f64).collect()
    };
    let leads = (family == Family::Junction).then(|| LeadPartition {
        left: (0..n_metal / 2).collect(),
        right: (n_metal / 2..n_metal).collect(),
        mu_left: 0.25,
        mu_right: -0.25,
    });

    let model = GanModel {
        name: Some(preset.name().to_string()),
        n_mol,
        n_metal,
        modes,
        potentials: b.tables,
        basis: b.basis,
        metal: MetalSpec { energies, mu: 0.0, temperature: 0.05, leads },
        spinful: false,
    };
    if spinful {
        expand_spinful(&model).expect("spatial preset is not yet spin-expanded")
    } else {
        model
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn photoct2_sizes() {
        let m = build_preset(Preset::PhotoCt2, 1);
        assert_eq!((m.n_mol, m.n_metal, m.modes.len()), (8, 100, 20));
        assert_eq!(m.mode_split(), (20, 0, 0));
        assert!(m.modes.iter().all(|k| k.grid_qubits == 5));
        assert!(m.spinful);
    }

    #[test]
    fn junction1_sizes() {
        let m = build_preset(Preset::Junction1, 1);
        assert_eq!((m.n_mol, m.n_metal, m.modes.len()), (2, 100, 8));
        assert_eq!(m.mode_split(), (5, 2, 1));
        assert!(!m.spinful);
        assert!(m.metal.leads.is_some());
    }

    #[test]
    fn scattering_small_sizes() {
        let m = build_preset(Preset::ScatteringSmall, 1);
        assert_eq!((m.n_mol, m.n_metal, m.modes.len()), (4, 50, 14));
        assert_eq!(m.mode_split(), (10, 3, 1));
        assert_eq!(m.system_qubits(), 4 + 50 + 10 * 5 + 3 * 7 + 8);
    }

    #[test]
    fn presets_are_deterministic_and_seed_dependent() {
        let a = build_preset(Preset::ScatteringMid, 42);
        let b = build_preset(Preset::ScatteringMid, 42);
        let c = build_preset(Preset::ScatteringMid, 43);
        assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
        assert_ne!(a, c);
    }

    #[test]
    fn coefficients_are_dense_and_bounded() {
        let m = build_preset(Preset::Junction2, 3);
        for c in m.potentials.alpha.iter().chain(&m.potentials.beta) {
            assert!(c.value != 0.0 && c.value.abs() <= 1.0);
        }
    }

    #[test]
    fn preset_names_parse_loosely() {
        assert_eq!("photoct-2".parse::<Preset>().unwrap(), Preset::PhotoCt2);
        assert_eq!("Junction_3".parse::<Preset>().unwrap(), Preset::Junction3);
        assert_eq!("scattering_small".parse::<Preset>().unwrap(), Preset::ScatteringSmall);
        assert!(matches!("nope".parse::<Preset>(), Err(Error::UnknownPreset(_))));
    }
}
