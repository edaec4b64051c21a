use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use super::{build_hamiltonian, channel_values, momentum_values, DenseOperator, StateLayout, StateVector};
use crate::arithmetic::fixed_point::round_shift;
use crate::arithmetic::{CostFormulas, FixedPointFormat};
use crate::error::{Error, Result};
use crate::exec;
use crate::fragmentation::{build_fragments, CliffordDiagonalizer, Fragment, FragmentKind};
use crate::model::{BasisForm, GanModel};
use crate::trotter::{analytic_table, load_terms, BuildOptions, LoadScaling, RegisterLayout};

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum EvolutionMode {
    /// Exact exponentials of every fragment.
    ExactFragments,
    /// Diagonal phases computed with the fixed-point arithmetic of the
    /// compiled circuit.
    CircuitFaithful { layout: RegisterLayout },
}

impl EvolutionMode {
    pub fn faithful() -> Self {
        EvolutionMode::CircuitFaithful { layout: RegisterLayout::faithful() }
    }
}

enum PhaseTable {
    Exact {
        f: Vec<f64>,
        c: Vec<f64>,
    },
    /// `f` is `None` for the constant channel, whose accumulator is added
    /// straight into the phase register.
    Faithful {
        f: Option<Vec<i64>>,
        acc: Vec<i64>,
    },
}

struct FragmentPhases {
    diagonalizer: Option<CliffordDiagonalizer>,
    tables: Vec<PhaseTable>,
}

struct FaithfulFormats {
    coefficient: FixedPointFormat,
    product: FixedPointFormat,
    phase: FixedPointFormat,
}

/// Stride, points, forward and inverse transforms, and kinetic phases of one mode.
type ModeKinetic = (usize, usize, Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>, Vec<Complex64>);

struct Kinetic {
    modes: Vec<ModeKinetic>,
    metal: Vec<Complex64>,
}

/// Precomputed first-order Trotter step `exp(−i dt F_{N−1}) ⋯ exp(−i dt F_0)`.
pub struct Propagator {
    layout: StateLayout,
    fragments: Vec<FragmentPhases>,
    kinetic: Kinetic,
    formats: Option<FaithfulFormats>,
    dt: f64,
}

impl Propagator {
    pub fn new(model: &GanModel, dt: f64, mode: EvolutionMode) -> Result<Self> {
        let fragments = build_fragments(model)?;
        Self::with_fragments(model, &fragments, dt, mode)
    }

    pub fn with_fragments(model: &GanModel, fragments: &[Fragment], dt: f64, mode: EvolutionMode) -> Result<Self> {
        let layout = StateLayout::of(model)?;
        let values = channel_values(model, &layout)?;
        let occ = |e: usize| move |i: usize| e >> i & 1 == 1;
        let faithful = match mode {
            EvolutionMode::ExactFragments => None,
            EvolutionMode::CircuitFaithful { layout } => Some(BuildOptions {
                dt,
                layout,
                formulas: CostFormulas::default(),
                loads: LoadScaling::Phase,
                strict_values: false,
            }),
        };
        let grid_labels = layout.labels(model);
        let mut phases = Vec::new();
        for fragment in fragments.iter().filter(|f| f.kind != FragmentKind::Kinetic) {
            let mut tables = Vec::new();
            for (ch, f) in &values {
                if !fragment.contains(*ch) {
                    continue;
                }
                let table = match &faithful {
                    None => PhaseTable::Exact {
                        f: f.clone(),
                        c: (0..layout.elec_size()).map(|e| fragment.coefficient(*ch, occ(e))).collect(),
                    },
                    Some(opts) => {
                        let terms = load_terms(model, fragment, *ch, opts)?;
                        let fmt = opts.layout.coefficient;
                        let acc = (0..layout.elec_size())
                            .map(|e| fmt.wrap(terms.iter().map(|&(raw, t)| raw as i128 * t.sign(occ(e)) as i128).sum()))
                            .collect();
                        let f = match ch {
                            None => None,
                            Some(id) => {
                                let bf = model.basis_function(*id).ok_or(Error::UnknownBasisId(*id))?;
                                let fmt = opts.layout.function;
                                Some(match &bf.form {
                                    BasisForm::Monomial { powers } => grid_labels
                                        .iter()
                                        .map(|x| fmt.wrap(powers.iter().map(|&(k, p)| (x[k] as i128).pow(p)).product()))
                                        .collect(),
                                    BasisForm::Analytic { mode, .. } => {
                                        let table = analytic_table(model, bf, opts)?;
                                        let stride = layout.mode_stride(*mode);
                                        let k = layout.grid_points[*mode];
                                        (0..layout.grid_size()).map(|g| table[g / stride % k]).collect()
                                    }
                                })
                            }
                        };
                        PhaseTable::Faithful { f, acc }
                    }
                };
                tables.push(table);
            }
            phases.push(FragmentPhases { diagonalizer: fragment.diagonalizer.clone(), tables });
        }

        let mut planner = FftPlanner::new();
        let modes = model
            .modes
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let n = m.grid_points();
                let phase = momentum_values(m)
                    .iter()
                    .map(|p| Complex64::from_polar(1.0, -dt * p * p / (2.0 * m.mass)))
                    .collect();
                (layout.mode_stride(k), n, planner.plan_fft_forward(n), planner.plan_fft_inverse(n), phase)
            })
            .collect();
        let metal = (0..layout.elec_size())
            .map(|e| {
                let energy: f64 = (0..model.n_metal)
                    .filter(|&b| e >> model.metal_index(b) & 1 == 1)
                    .map(|b| model.metal.energies[b])
                    .sum();
                Complex64::from_polar(1.0, -dt * energy)
            })
            .collect();

        let formats = faithful.map(|o| FaithfulFormats {
            coefficient: o.layout.coefficient,
            product: FixedPointFormat { total_bits: o.layout.product_bits, fraction_bits: 0, signed: true },
            phase: o.layout.phase_format(),
        });
        Ok(Self { layout, fragments: phases, kinetic: Kinetic { modes, metal }, formats, dt })
    }

    pub fn layout(&self) -> &StateLayout {
        &self.layout
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of fragments applied per step, the kinetic one included.
    pub fn fragment_count(&self) -> usize {
        self.fragments.len() + 1
    }

    fn check(&self, state: &StateVector) -> Result<()> {
        if state.layout != self.layout {
            return Err(Error::InvalidArgument("state layout does not match the model".into()));
        }
        Ok(())
    }

    fn diagonal_phase(&self, tables: &[PhaseTable], e: usize, g: usize) -> Complex64 {
        match &self.formats {
            None => {
                let d: f64 = tables
                    .iter()
                    .map(|t| match t {
                        PhaseTable::Exact { f, c } => f[g] * c[e],
                        PhaseTable::Faithful { .. } => unreachable!(),
                    })
                    .sum();
                Complex64::from_polar(1.0, -self.dt * d)
            }
            Some(fm) => {
                let r = Self::phase_register(fm, tables, e, g);
                Complex64::from_polar(1.0, 2.0 * PI * r as f64 / (fm.phase.total_bits as f64).exp2())
            }
        }
    }

    fn phase_register(fm: &FaithfulFormats, tables: &[PhaseTable], e: usize, g: usize) -> i64 {
        let mut r: i128 = 0;
        for t in tables {
            let PhaseTable::Faithful { f, acc } = t else { unreachable!() };
            let inc = match f {
                None => acc[e] as i128,
                Some(f) => {
                    fm.product.wrap(round_shift(f[g] as i128 * acc[e] as i128, fm.coefficient.fraction_bits)) as i128
                }
            };
            r = fm.phase.wrap(r + inc) as i128;
        }
        r as i64
    }

    /// Phase-register increment of fragment `s` on basis state `(e, g)` in
    /// circuit-faithful mode.
    pub fn phase_increment(&self, s: usize, e: usize, g: usize) -> Option<i64> {
        let fm = self.formats.as_ref()?;
        let frag = self.fragments.get(s)?;
        Some(Self::phase_register(fm, &frag.tables, e, g))
    }

    fn apply_diagonal_fragment(&self, index: usize, amps: &mut [Complex64]) {
        let frag = &self.fragments[index];
        let grid = self.layout.grid_size();
        if let Some(d) = &frag.diagonalizer {
            d.apply(amps, grid, true);
        }
        exec::for_each_chunk(amps, grid, |e, block| {
            for (g, z) in block.iter_mut().enumerate() {
                *z *= self.diagonal_phase(&frag.tables, e, g);
            }
        });
        if let Some(d) = &frag.diagonalizer {
            d.apply(amps, grid, false);
        }
    }

    fn apply_kinetic(&self, amps: &mut [Complex64]) {
        let grid = self.layout.grid_size();
        exec::for_each_chunk(amps, grid, |e, block| {
            for (stride, n, fwd, inv, phase) in &self.kinetic.modes {
                let mut buf = vec![Complex64::new(0.0, 0.0); *n];
                for base in (0..grid).filter(|g| g / stride % n == 0) {
                    for u in 0..*n {
                        buf[u] = block[base + u * stride];
                    }
                    fwd.process(&mut buf);
                    for (b, p) in buf.iter_mut().zip(phase) {
                        *b *= p;
                    }
                    inv.process(&mut buf);
                    for u in 0..*n {
                        block[base + u * stride] = buf[u] / *n as f64;
                    }
                }
            }
            let m = self.kinetic.metal[e];
            block.iter_mut().for_each(|z| *z *= m);
        });
    }

    /// Apply `exp(−i dt F_s)` for fragment `s` in Trotter order.
    pub fn apply_fragment(&self, s: usize, state: &mut StateVector) -> Result<()> {
        self.check(state)?;
        if s < self.fragments.len() {
            self.apply_diagonal_fragment(s, &mut state.amps);
        } else if s == self.fragments.len() {
            self.apply_kinetic(&mut state.amps);
        } else {
            return Err(Error::InvalidArgument(format!("fragment {s} out of range")));
        }
        Ok(())
    }

    pub fn step(&self, state: &mut StateVector) -> Result<()> {
        for s in 0..self.fragment_count() {
            self.apply_fragment(s, state)?;
        }
        Ok(())
    }

    pub fn evolve(&self, state: &StateVector, steps: u64) -> Result<StateVector> {
        self.check(state)?;
        let mut s = state.clone();
        for _ in 0..steps {
            self.step(&mut s)?;
        }
        Ok(s)
    }
}

/// `steps` first-order Trotter steps of size `dt`.
pub fn trotter_evolve(
    state: &StateVector,
    model: &GanModel,
    dt: f64,
    steps: u64,
    mode: EvolutionMode,
) -> Result<StateVector> {
    Propagator::new(model, dt, mode)?.evolve(state, steps)
}

/// Dense `exp(−i dt F_s)` assembled column by column from the diagonal form.
pub fn fragment_exponential(fragment: &Fragment, model: &GanModel, dt: f64) -> Result<DenseOperator> {
    let layout = StateLayout::of(model)?;
    let dim = layout.dense_check()?;
    let fragments = build_fragments(model)?;
    let position =
        fragments.iter().position(|f| f.index == fragment.index && f.kind == fragment.kind).ok_or_else(|| {
            Error::InvalidArgument(format!("fragment {} is not a fragment of this model", fragment.index))
        })?;
    let mut own = fragments.clone();
    own[position] = fragment.clone();
    let p = Propagator::with_fragments(model, &own, dt, EvolutionMode::ExactFragments)?;
    let slot = if fragment.kind == FragmentKind::Kinetic {
        p.fragments.len()
    } else {
        own.iter().filter(|f| f.kind != FragmentKind::Kinetic).position(|f| f.index == fragment.index).expect("present")
    };
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let mut v = StateVector::zeros(layout.clone());
        v.amps[col] = Complex64::new(1.0, 0.0);
        p.apply_fragment(slot, &mut v)?;
        m.set_column(col, &DVector::from_vec(v.amps));
    }
    Ok(DenseOperator { matrix: m, hermitian: false })
}

/// Exact evolution through the eigendecomposition of the dense Hamiltonian.
pub struct ExactPropagator {
    layout: StateLayout,
    energies: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl ExactPropagator {
    pub fn new(model: &GanModel) -> Result<Self> {
        let layout = StateLayout::of(model)?;
        let h = build_hamiltonian(model)?;
        let eig = h.matrix.symmetric_eigen();
        Ok(Self { layout, energies: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        if state.layout != self.layout {
            return Err(Error::InvalidArgument("state layout does not match the model".into()));
        }
        let v = DVector::from_column_slice(&state.amps);
        let mut c = self.vectors.adjoint() * v;
        for (z, e) in c.iter_mut().zip(&self.energies) {
            *z *= Complex64::from_polar(1.0, -e * t);
        }
        let w = &self.vectors * c;
        Ok(StateVector { layout: state.layout.clone(), amps: w.as_slice().to_vec() })
    }
}

/// `exp(−iHt)·state`.
pub fn exact_evolve(state: &StateVector, model: &GanModel, t: f64) -> Result<StateVector> {
    ExactPropagator::new(model)?.evolve(state, t)
}
