use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{eval_basis_function, AnalyticForm, GanModel, MetalSpec, NuclearMode};
use crate::simulator::{kinetic_matrix, StateLayout, StateVector};

/// Fermi-Dirac occupation. At `T = 0` a level exactly at `μ` counts as occupied.
pub fn fermi(epsilon: f64, mu: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return if epsilon <= mu { 1.0 } else { 0.0 };
    }
    1.0 / (1.0 + ((epsilon - mu) / temperature).exp())
}

/// Occupation probability of every metal orbital, using the lead chemical
/// potentials when the metal is partitioned.
pub fn metal_occupations(metal: &MetalSpec) -> Vec<f64> {
    (0..metal.energies.len())
        .map(|b| {
            let mu = match &metal.leads {
                Some(l) if l.left.contains(&b) => l.mu_left,
                Some(l) if l.right.contains(&b) => l.mu_right,
                _ => metal.mu,
            };
            fermi(metal.energies[b], mu, metal.temperature)
        })
        .collect()
}

/// Independent Bernoulli draw of every metal orbital.
pub fn sample_metal_state_with(metal: &MetalSpec, rng: &mut impl Rng) -> Vec<bool> {
    metal_occupations(metal).into_iter().map(|f| rng.random::<f64>() < f).collect()
}

pub fn sample_metal_state(metal: &MetalSpec, seed: u64) -> Vec<bool> {
    sample_metal_state_with(metal, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Generator for trajectory `index` of a run seeded with `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(rename_all = "snake_case", tag = "state")]
pub enum NuclearState {
    /// Ground state of `P²/2m + m ω² Q²/2`.
    HarmonicGround {
        omega: f64,
    },
    /// Ground state of `P²/2m + d (1 − e^{−a(Q−r)})²`.
    MorseGround {
        d: f64,
        a: f64,
        r: f64,
    },
    /// Ground state of the mode's slice of the reference potential.
    ReferenceGround,
    GaussianWavepacket {
        q0: f64,
        sigma: f64,
        p: f64,
    },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum ElectronicState {
    /// Occupation of each molecular orbital.
    Bits(Vec<bool>),
    /// The lowest `n` molecular orbitals occupied.
    Filled(usize),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum MetalInit {
    /// Bernoulli sampling per trajectory.
    Thermal,
    /// Filled up to the Fermi level.
    Ground,
    Bits(Vec<bool>),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct InitialStateSpec {
    pub molecule: ElectronicState,
    pub modes: Vec<NuclearState>,
    pub metal: MetalInit,
    pub trajectories: usize,
    #[serde(default)]
    pub seed: u64,
}

fn ground_state(mode: &NuclearMode, potential: impl Fn(f64) -> f64) -> (f64, Vec<Complex64>) {
    let mut h = kinetic_matrix(mode);
    for u in 0..mode.grid_points() {
        h[(u, u)] += potential(mode.position(mode.label_of(u)));
    }
    let (energies, vectors) = sorted_eigen(h);
    let v: Vec<Complex64> = vectors.column(0).iter().copied().collect();
    (energies[0], fix_phase(v))
}

/// Eigenpairs sorted by energy.
pub(crate) fn sorted_eigen(h: DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (energies, vectors)
}

/// Rotate the global phase so the largest component is real and positive.
fn fix_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let big = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or_default();
    if big.norm() > 0.0 {
        let phase = big.conj() / big.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
    v
}

/// Slice of the reference potential along mode `k` with every other mode at
/// the grid origin.
pub fn reference_slice(model: &GanModel, k: usize, label: i64) -> Result<f64> {
    let mut x = vec![0i64; model.modes.len()];
    x[k] = label;
    model.potentials.gamma.iter().try_fold(0.0, |acc, c| {
        let f = match c.lambda {
            None => 1.0,
            Some(id) => {
                eval_basis_function(model.basis_function(id).ok_or(Error::UnknownBasisId(id))?, &x, &model.modes)?
            }
        };
        Ok(acc + c.value * f)
    })
}

/// Grid wavefunction of mode `k`, indexed by unsigned register value.
pub fn mode_wavefunction(model: &GanModel, k: usize, state: &NuclearState) -> Result<Vec<Complex64>> {
    let mode = model.modes.get(k).ok_or_else(|| Error::InvalidArgument(format!("mode {k} does not exist")))?;
    let v = match *state {
        NuclearState::HarmonicGround { omega } => {
            if omega.is_nan() || omega <= 0.0 {
                return Err(Error::InvalidArgument("harmonic frequency must be positive".into()));
            }
            ground_state(mode, |q| 0.5 * mode.mass * omega * omega * q * q).1
        }
        NuclearState::MorseGround { d, a, r } => {
            let form = AnalyticForm::Morse { d, a, r };
            if !form.parameters_valid() {
                return Err(Error::InvalidArgument("invalid Morse parameters".into()));
            }
            ground_state(mode, |q| form.eval(q)).1
        }
        NuclearState::ReferenceGround => {
            let slice: Vec<f64> =
                (0..mode.grid_points()).map(|u| reference_slice(model, k, mode.label_of(u))).collect::<Result<_>>()?;
            let mut h = kinetic_matrix(mode);
            for (u, v) in slice.iter().enumerate() {
                h[(u, u)] += v;
            }
            fix_phase(sorted_eigen(h).1.column(0).iter().copied().collect())
        }
        NuclearState::GaussianWavepacket { q0, sigma, p } => {
            let lo = mode.position(mode.min_label());
            let hi = mode.position(mode.max_label());
            if sigma.is_nan() || sigma <= 0.0 || !(lo..=hi).contains(&q0) {
                return Err(Error::InvalidArgument(format!("wavepacket needs sigma > 0 and q0 in [{lo}, {hi}]")));
            }
            let mut v: Vec<Complex64> = (0..mode.grid_points())
                .map(|u| {
                    let d = mode.position(mode.label_of(u)) - q0;
                    Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), p * d)
                })
                .collect();
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= n);
            v
        }
    };
    Ok(v)
}

/// Ground-state energy of a mode Hamiltonian, for bracketing checks.
pub fn mode_ground_energy(model: &GanModel, k: usize, state: &NuclearState) -> Result<f64> {
    let mode = model.modes.get(k).ok_or_else(|| Error::InvalidArgument(format!("mode {k} does not exist")))?;
    match *state {
        NuclearState::HarmonicGround { omega } => Ok(ground_state(mode, |q| 0.5 * mode.mass * omega * omega * q * q).0),
        NuclearState::MorseGround { d, a, r } => Ok(ground_state(mode, |q| AnalyticForm::Morse { d, a, r }.eval(q)).0),
        _ => Err(Error::InvalidArgument("only oscillator ground states have a ground energy".into())),
    }
}

fn molecular_bits(model: &GanModel, state: &ElectronicState) -> Result<Vec<bool>> {
    match state {
        ElectronicState::Bits(b) if b.len() == model.n_mol => Ok(b.clone()),
        ElectronicState::Bits(b) => {
            Err(Error::InvalidArgument(format!("{} molecular bits for {} orbitals", b.len(), model.n_mol)))
        }
        ElectronicState::Filled(n) if *n <= model.n_mol => Ok((0..model.n_mol).map(|i| i < *n).collect()),
        ElectronicState::Filled(n) => {
            Err(Error::InvalidArgument(format!("cannot fill {n} of {} orbitals", model.n_mol)))
        }
    }
}

/// Metal configuration of trajectory `index`.
pub fn metal_bits(model: &GanModel, init: &MetalInit, seed: u64, index: u64) -> Result<Vec<bool>> {
    match init {
        MetalInit::Thermal => Ok(sample_metal_state_with(&model.metal, &mut trajectory_rng(seed, index))),
        MetalInit::Ground => {
            let zero = MetalSpec { temperature: 0.0, ..model.metal.clone() };
            Ok(metal_occupations(&zero).iter().map(|&f| f == 1.0).collect())
        }
        MetalInit::Bits(b) if b.len() == model.n_metal => Ok(b.clone()),
        MetalInit::Bits(b) => {
            Err(Error::InvalidArgument(format!("{} metal bits for {} orbitals", b.len(), model.n_metal)))
        }
    }
}

/// Product state `|n_mol n_metal⟩ ⊗_κ |χ_κ⟩` for trajectory `index`.
pub fn prepare_state(model: &GanModel, spec: &InitialStateSpec, index: u64) -> Result<StateVector> {
    if spec.modes.len() != model.modes.len() {
        return Err(Error::InvalidArgument(format!(
            "{} mode states for {} modes",
            spec.modes.len(),
            model.modes.len()
        )));
    }
    let layout = StateLayout::of(model)?;
    let mol = molecular_bits(model, &spec.molecule)?;
    let metal = metal_bits(model, &spec.metal, spec.seed, index)?;
    let e = mol.iter().chain(&metal).enumerate().filter(|(_, &b)| b).fold(0usize, |acc, (p, _)| acc | 1 << p);
    let modes =
        spec.modes.iter().enumerate().map(|(k, s)| mode_wavefunction(model, k, s)).collect::<Result<Vec<_>>>()?;
    StateVector::product(layout, e, &modes)
}
