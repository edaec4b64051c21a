//! Invariant checks shared by the `verify` command and the test suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::arithmetic::{CostFormulas, FixedPointFormat};
use crate::circuit::{Emulator, NodeKind};
use crate::error::Result;
use crate::estimator::{estimate, EstimateRequest};
use crate::fragmentation::{build_fragments, diagonalizer_matrix, effective_coefficient, Fragment, FragmentKind};
use crate::model::{random_model, GanModel, Preset, ToySpec};
use crate::observables::{mode_wavefunction, NuclearState};
use crate::simulator::{
    build_hamiltonian, fragment_operator, number_operator, EvolutionMode, ExactPropagator, Propagator, StateLayout,
    StateVector,
};
use crate::trotter::{accumulate_coefficient, BuildOptions, LoadScaling, RegisterLayout};

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Worst deviations found by the fragmentation checks on one model.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, Default, PartialEq)]
pub struct FragmentationErrors {
    /// `max |Σ_s F_s − H|`.
    pub completeness: f64,
    /// Largest commutator between two terms of one fragment.
    pub commutator: f64,
    /// Largest off-diagonal element of `U_s† F_s U_s`.
    pub off_diagonal: f64,
    /// Largest gap between a diagonal element and the effective coefficient.
    pub coefficient: f64,
}

impl FragmentationErrors {
    fn max(self, o: Self) -> Self {
        Self {
            completeness: self.completeness.max(o.completeness),
            commutator: self.commutator.max(o.commutator),
            off_diagonal: self.off_diagonal.max(o.off_diagonal),
            coefficient: self.coefficient.max(o.coefficient),
        }
    }
}

fn single_pair(fragment: &Fragment, pair: (usize, usize)) -> Fragment {
    let mut f = fragment.clone();
    if let Some(m) = f.matching.as_mut() {
        m.pairs = vec![pair];
    }
    f
}

/// Check an electronic-only model (no grid modes) against its dense Hamiltonian.
pub fn check_fragmentation(model: &GanModel) -> Result<FragmentationErrors> {
    let n = model.n_orbitals();
    let fragments = build_fragments(model)?;
    let h = build_hamiltonian(model)?;
    let mut sum = DMatrix::<Complex64>::zeros(h.dim(), h.dim());
    let mut errs = FragmentationErrors::default();
    for f in &fragments {
        let op = fragment_operator(model, f)?;
        sum += &op.matrix;
        if f.kind == FragmentKind::Kinetic {
            continue;
        }
        if let Some(m) = &f.matching {
            let parts: Vec<DMatrix<Complex64>> = m
                .pairs
                .iter()
                .map(|&p| fragment_operator(model, &single_pair(f, p)).map(|o| o.matrix))
                .collect::<Result<_>>()?;
            for a in 0..parts.len() {
                for b in a + 1..parts.len() {
                    let c = &parts[a] * &parts[b] - &parts[b] * &parts[a];
                    errs.commutator = errs.commutator.max(max_abs(&c));
                }
            }
        }
        let u = diagonalizer_matrix(f, n)?;
        let d = u.adjoint() * &op.matrix * &u;
        for r in 0..d.nrows() {
            for c in 0..d.ncols() {
                if r != c {
                    errs.off_diagonal = errs.off_diagonal.max(d[(r, c)].norm());
                }
            }
            let occ: Vec<bool> = (0..n).map(|p| r >> p & 1 == 1).collect();
            let c = effective_coefficient(model, f, None, &occ)?;
            errs.coefficient = errs.coefficient.max((d[(r, r)].re - c).abs() + d[(r, r)].im.abs());
        }
    }
    errs.completeness = max_abs(&(sum - &h.matrix));
    Ok(errs)
}

/// Random models with `N_mol, N_metal ∈ {2, 3, 4}`, frozen at random grid points.
pub fn frozen_models(count: usize, seed: u64) -> Result<Vec<GanModel>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut spec = ToySpec::new(rng.random_range(2..=4), rng.random_range(2..=4), vec![3, 2]);
            spec.analytic = i % 2 == 1;
            let m = random_model(&spec, rng.random());
            let labels = [rng.random_range(-4..4), rng.random_range(-2..2)];
            m.frozen_at(&labels)
        })
        .collect()
}

pub fn check_fragmentation_suite(count: usize, seed: u64) -> Result<FragmentationErrors> {
    let models = frozen_models(count, seed)?;
    let errs = crate::exec::map(&models, check_fragmentation);
    errs.into_iter().try_fold(FragmentationErrors::default(), |acc, e| Ok(acc.max(e?)))
}

/// Round every coefficient to a multiple of 2^-8 so fixed-point sums are exact.
pub fn dyadic(mut m: GanModel) -> GanModel {
    let r = |v: f64| (v * 256.0).round() / 256.0;
    for c in m.potentials.alpha.iter_mut().chain(m.potentials.beta.iter_mut()) {
        c.value = r(c.value);
    }
    for c in &mut m.potentials.gamma {
        c.value = r(c.value);
    }
    m
}

/// Emulate coefficient accumulation for every fragment, channel and
/// occupation; returns `(cases, mismatches)`.
pub fn check_accumulation(model: &GanModel) -> Result<(u64, u64)> {
    let fmt = FixedPointFormat::default();
    let opts = BuildOptions {
        dt: 1.0,
        layout: RegisterLayout::uniform(fmt),
        formulas: CostFormulas::default(),
        loads: LoadScaling::Plain,
        strict_values: true,
    };
    let n = model.n_orbitals();
    let (mut cases, mut bad) = (0, 0);
    for f in build_fragments(model)?.iter().filter(|f| f.kind != FragmentKind::Kinetic) {
        for ch in model.channels() {
            let acc = accumulate_coefficient(model, f, ch, &opts)?;
            let regs = &acc.registers;
            for bits in 0..1u64 << n {
                let occ: Vec<bool> = (0..n).map(|p| bits >> p & 1 == 1).collect();
                let mut e = Emulator::new(&acc.circuit);
                e.set(regs.mol, (bits & ((1 << model.n_mol) - 1)) as i64);
                e.set(regs.metal, (bits >> model.n_mol) as i64);
                e.run_nodes(0..acc.midpoint);
                let expect = effective_coefficient(model, f, ch, &occ)?;
                let forward_ok = fmt.to_f64(e.get(regs.accumulator)) == expect;
                e.run_nodes(acc.midpoint..acc.circuit.nodes().len());
                cases += 1;
                if !forward_ok || e.get(regs.accumulator) != 0 {
                    bad += 1;
                }
            }
        }
    }
    Ok((cases, bad))
}

/// The small convergence model: two molecular and two metal orbitals and
/// one 16-point mode.
pub fn convergence_model(seed: u64) -> GanModel {
    let mut s = ToySpec::new(2, 2, vec![4]);
    s.scale = 0.3;
    random_model(&s, seed)
}

/// Two-electron superposition times a centred Gaussian.
pub fn convergence_state(model: &GanModel) -> Result<StateVector> {
    let layout = StateLayout::of(model)?;
    let chi = mode_wavefunction(model, 0, &NuclearState::GaussianWavepacket { q0: 0.0, sigma: 0.7, p: 0.5 })?;
    let mut psi = StateVector::zeros(layout);
    let grid = psi.layout.grid_size();
    let configs = [0b0011usize, 0b0101, 0b1001, 0b0110];
    for (k, &e) in configs.iter().enumerate() {
        let w = Complex64::from_polar(1.0, 0.7 * k as f64);
        for (g, c) in chi.iter().enumerate().take(grid) {
            psi.amps[e * grid + g] = w * c;
        }
    }
    psi.normalize();
    Ok(psi)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ConvergenceResult {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub norm_drift: f64,
    pub number_drift: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Trotter error `‖ψ_trotter(t) − ψ_exact(t)‖` for `dt = t/8 … t/64`.
pub fn check_convergence(model: &GanModel, t: f64) -> Result<ConvergenceResult> {
    let psi = convergence_state(model)?;
    let exact = ExactPropagator::new(model)?.evolve(&psi, t)?;
    let number = number_operator(model)?;
    let n0 = number.expectation(&psi).re;
    let divisions = [8u64, 16, 32, 64];
    let runs = crate::exec::map(&divisions, |&k| -> Result<(f64, f64, f64, f64)> {
        let dt = t / k as f64;
        let p = Propagator::new(model, dt, EvolutionMode::ExactFragments)?;
        let out = p.evolve(&psi, k)?;
        Ok((dt, out.distance(&exact), (out.norm() - 1.0).abs(), (number.expectation(&out).re - n0).abs()))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let dts: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let errors: Vec<f64> = runs.iter().map(|r| r.1).collect();
    Ok(ConvergenceResult {
        slope: loglog_slope(&dts, &errors),
        norm_drift: runs.iter().map(|r| r.2).fold(0.0, f64::max),
        number_drift: runs.iter().map(|r| r.3).fold(0.0, f64::max),
        dts,
        errors,
    })
}

/// Per-step QROM count and multiply-accumulate count against the structural
/// expectations; returns `(qrom_ok, multiply_ok)`.
pub fn check_structure(preset: Preset) -> Result<(bool, bool)> {
    let r = estimate(&EstimateRequest::preset(preset, 1))?;
    let s = &r.structure;
    Ok((
        r.resources.count(NodeKind::QromLoad) == 2 * s.analytic_functions as u64,
        s.multiply_accumulates == s.basis_incidences as u64,
    ))
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "{:<28} {:<4} {:>7.2}s  {}\n",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.seconds,
                c.detail
            ));
        }
        s
    }
}

fn timed(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check { name: name.to_string(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

/// Run the invariant suite; `small` trims model counts for a quick run.
pub fn run_suite(small: bool, seed: u64) -> VerifyReport {
    let count = if small { 8 } else { 24 };
    let mut checks = Vec::new();
    let frag = check_fragmentation_suite(count, seed);
    let frag_check = |name: &str, pick: fn(&FragmentationErrors) -> f64, tol: f64| {
        timed(name, || {
            Ok(match &frag {
                Ok(e) => {
                    let v = pick(e);
                    (v <= tol, format!("max {v:.2e} (tol {tol:.0e}, {count} models)"))
                }
                Err(e) => (false, format!("error: {e}")),
            })
        })
    };
    checks.push(frag_check("fragment completeness", |e| e.completeness, 1e-12));
    checks.push(frag_check("fragment commutation", |e| e.commutator, 1e-12));
    checks.push(frag_check("clifford diagonality", |e| e.off_diagonal, 1e-12));
    checks.push(frag_check("effective coefficients", |e| e.coefficient, 1e-10));
    checks.push(timed("coefficient accumulation", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut cases, mut bad) = (0, 0);
        for _ in 0..if small { 2 } else { 5 } {
            let spec = ToySpec::new(rng.random_range(2..=4), rng.random_range(2..=4), vec![3]);
            let (c, b) = check_accumulation(&dyadic(random_model(&spec, rng.random())))?;
            cases += c;
            bad += b;
        }
        Ok((bad == 0, format!("{bad} mismatches in {cases} emulations")))
    }));
    checks.push(timed("trotter convergence", || {
        let r = check_convergence(&convergence_model(seed), 1.0)?;
        let ok = (r.slope - 1.0).abs() <= 0.15 && r.norm_drift < 1e-9 && r.number_drift < 1e-9;
        Ok((ok, format!("slope {:.3}, norm drift {:.1e}, number drift {:.1e}", r.slope, r.norm_drift, r.number_drift)))
    }));
    checks.push(timed("caching structure", || {
        let mut bad = Vec::new();
        for p in Preset::ALL {
            let (q, m) = check_structure(p)?;
            if !(q && m) {
                bad.push(p.name());
            }
        }
        Ok((bad.is_empty(), if bad.is_empty() { "9 presets".into() } else { format!("failing: {}", bad.join(", ")) }))
    }));
    VerifyReport { checks }
}
