use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use super::{StateLayout, StateVector};
use crate::error::Result;
use crate::fragmentation::{Fragment, FragmentKind};
use crate::model::{eval_basis_function, Channel, GanModel, NuclearMode};

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    pub matrix: DMatrix<Complex64>,
    pub hermitian: bool,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |H − H†|`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, state: &StateVector) -> StateVector {
        let v = nalgebra::DVector::from_column_slice(&state.amps);
        let w = &self.matrix * v;
        StateVector { layout: state.layout.clone(), amps: w.as_slice().to_vec() }
    }

    pub fn expectation(&self, state: &StateVector) -> Complex64 {
        state.inner(&self.apply(state))
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Momentum of each DFT index of `mode`, on the centered frequency labels.
pub fn momentum_values(mode: &NuclearMode) -> Vec<f64> {
    let k = mode.grid_points();
    let dp = 2.0 * PI / (k as f64 * mode.spacing());
    (0..k).map(|u| dp * mode.label_of(u) as f64).collect()
}

/// `P²/2m` on the grid of `mode`, indexed by unsigned register value.
pub fn kinetic_matrix(mode: &NuclearMode) -> DMatrix<Complex64> {
    let k = mode.grid_points();
    let energies: Vec<f64> = momentum_values(mode).iter().map(|p| p * p / (2.0 * mode.mass)).collect();
    DMatrix::from_fn(k, k, |u, v| {
        let d = u as f64 - v as f64;
        energies
            .iter()
            .enumerate()
            .map(|(q, e)| Complex64::from_polar(*e, 2.0 * PI * q as f64 * d / k as f64))
            .sum::<Complex64>()
            / k as f64
    })
}

/// Value of every basis function (and 1 for the constant channel) at every
/// grid index.
pub fn channel_values(model: &GanModel, layout: &StateLayout) -> Result<Vec<(Channel, Vec<f64>)>> {
    let labels = layout.labels(model);
    model
        .channels()
        .into_iter()
        .map(|ch| {
            let values = match ch {
                None => vec![1.0; layout.grid_size()],
                Some(id) => {
                    let f = model.basis_function(id).ok_or(crate::Error::UnknownBasisId(id))?;
                    labels.iter().map(|x| eval_basis_function(f, x, &model.modes)).collect::<Result<Vec<_>>>()?
                }
            };
            Ok((ch, values))
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
enum ElecTerm {
    Identity,
    Number(usize),
    NumberPair(usize, usize),
    /// `a_i† a_j`.
    Hop(usize, usize),
}

fn parity_below(e: usize, p: usize) -> bool {
    (e & ((1 << p) - 1)).count_ones() % 2 == 1
}

/// `⟨e'|term|e⟩` as `(e', value)` if non-zero.
fn act(term: ElecTerm, e: usize) -> Option<(usize, f64)> {
    let occ = |p: usize| e >> p & 1 == 1;
    match term {
        ElecTerm::Identity => Some((e, 1.0)),
        ElecTerm::Number(i) => occ(i).then_some((e, 1.0)),
        ElecTerm::NumberPair(i, j) => (occ(i) && occ(j)).then_some((e, 1.0)),
        ElecTerm::Hop(i, j) => {
            if !occ(j) {
                return None;
            }
            let e1 = e ^ (1 << j);
            if e1 >> i & 1 == 1 {
                return None;
            }
            let sign = parity_below(e, j) ^ parity_below(e1, i);
            Some((e1 | (1 << i), if sign { -1.0 } else { 1.0 }))
        }
    }
}

/// Every potential term of the Hamiltonian read straight from the tables.
fn potential_terms(model: &GanModel) -> Vec<(Channel, ElecTerm, f64)> {
    let mut out = Vec::new();
    let n_mol = model.n_mol;
    for c in &model.potentials.alpha {
        if c.i == c.j {
            out.push((c.lambda, ElecTerm::Number(c.i), c.value));
        } else if c.i < n_mol && c.j < n_mol {
            out.push((c.lambda, ElecTerm::Hop(c.i, c.j), c.value));
        } else {
            out.push((c.lambda, ElecTerm::Hop(c.i, c.j), c.value));
            out.push((c.lambda, ElecTerm::Hop(c.j, c.i), c.value));
        }
    }
    for c in &model.potentials.beta {
        let term = if c.i == c.j { ElecTerm::Number(c.i) } else { ElecTerm::NumberPair(c.i, c.j) };
        out.push((c.lambda, term, c.value));
    }
    for c in &model.potentials.gamma {
        out.push((c.lambda, ElecTerm::Identity, c.value));
    }
    out
}

fn belongs(term: ElecTerm, fragment: &Fragment) -> bool {
    match (term, &fragment.kind) {
        (ElecTerm::Hop(i, j), FragmentKind::OffDiagonal) => fragment
            .matching
            .as_ref()
            .is_some_and(|m| m.pairs.iter().any(|&(a, b)| (a, b) == (i, j) || (a, b) == (j, i))),
        (ElecTerm::Hop(..), _) => false,
        (_, FragmentKind::Diagonal) => true,
        _ => false,
    }
}

fn assemble(model: &GanModel, fragment: Option<&Fragment>) -> Result<DenseOperator> {
    let layout = StateLayout::of(model)?;
    let dim = layout.dense_check()?;
    let grid = layout.grid_size();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    let values = channel_values(model, &layout)?;
    let value_of = |ch: Channel| &values.iter().find(|(c, _)| *c == ch).expect("tables reference known channels").1;

    for (ch, term, v) in potential_terms(model) {
        if fragment.is_some_and(|f| !belongs(term, f)) {
            continue;
        }
        let f = value_of(ch);
        for e in 0..layout.elec_size() {
            if let Some((e2, amp)) = act(term, e) {
                for g in 0..grid {
                    h[(e2 * grid + g, e * grid + g)] += Complex64::new(v * amp * f[g], 0.0);
                }
            }
        }
    }

    if fragment.is_none_or(|f| f.kind == FragmentKind::Kinetic) {
        for (k, mode) in model.modes.iter().enumerate() {
            let t = kinetic_matrix(mode);
            let stride = layout.mode_stride(k);
            for e in 0..layout.elec_size() {
                for g in 0..grid {
                    let u = g / stride % mode.grid_points();
                    let base = g - u * stride;
                    for u2 in 0..mode.grid_points() {
                        h[(e * grid + base + u2 * stride, e * grid + g)] += t[(u2, u)];
                    }
                }
            }
        }
        for (b, eps) in model.metal.energies.iter().enumerate() {
            let p = model.metal_index(b);
            for e in (0..layout.elec_size()).filter(|e| e >> p & 1 == 1) {
                for g in 0..grid {
                    h[(e * grid + g, e * grid + g)] += Complex64::new(*eps, 0.0);
                }
            }
        }
    }
    Ok(DenseOperator { matrix: h, hermitian: true })
}

/// Dense GAN Hamiltonian on the full electronic-nuclear grid space.
pub fn build_hamiltonian(model: &GanModel) -> Result<DenseOperator> {
    assemble(model, None)
}

/// Dense `F_s`: the Hamiltonian terms owned by `fragment`.
pub fn fragment_operator(model: &GanModel, fragment: &Fragment) -> Result<DenseOperator> {
    assemble(model, Some(fragment))
}

/// Total electron number.
pub fn number_operator(model: &GanModel) -> Result<DenseOperator> {
    let layout = StateLayout::of(model)?;
    let dim = layout.dense_check()?;
    let grid = layout.grid_size();
    let diag = (0..dim).map(|i| Complex64::new((i / grid).count_ones() as f64, 0.0));
    Ok(DenseOperator { matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(dim, diag)), hermitian: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_model, MetalSpec, ModeKind, PotentialTables, ToySpec};

    #[test]
    fn free_metal_orbital_has_levels_zero_and_epsilon() {
        let m = GanModel {
            name: None,
            n_mol: 1,
            n_metal: 1,
            modes: vec![],
            potentials: PotentialTables::default(),
            basis: vec![],
            metal: MetalSpec { energies: vec![0.7], mu: 0.0, temperature: 0.0, leads: None },
            spinful: false,
        };
        let h = build_hamiltonian(&m).unwrap();
        let d: Vec<f64> = (0..4).map(|i| h.matrix[(i, i)].re).collect();
        assert_eq!(d, vec![0.0, 0.0, 0.7, 0.7]);
    }

    #[test]
    fn hamiltonian_is_hermitian_and_conserves_number() {
        for seed in 0..3 {
            let m = random_model(&ToySpec::new(2, 2, vec![3]), seed);
            let h = build_hamiltonian(&m).unwrap();
            assert!(h.hermiticity_error() < 1e-12);
            let n = number_operator(&m).unwrap();
            let c = &h.matrix * &n.matrix - &n.matrix * &h.matrix;
            assert!(c.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn kinetic_spectrum_matches_momenta() {
        let mode = NuclearMode::new(ModeKind::NonReactive, 4, 2.0);
        let t = kinetic_matrix(&mode);
        let mut eig: Vec<f64> = t.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let mut expect: Vec<f64> = momentum_values(&mode).iter().map(|p| p * p / 4.0).collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in eig.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
