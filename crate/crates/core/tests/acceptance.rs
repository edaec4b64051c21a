//! Acceptance criteria 1-8. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits non-zero if any fails.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use gan_core::circuit::NodeKind;
use gan_core::estimator::{estimate, EstimateRequest};
use gan_core::fragmentation::{build_fragments, diagonalizer_matrix, effective_coefficient, FragmentKind};
use gan_core::model::{build_preset, random_model, GanModel, Preset, ToySpec};
use gan_core::observables::{
    fermi, measure, prepare_state, run_ensemble, ElectronicState, InitialStateSpec, MetalInit, NuclearState,
    ObservableSpec,
};
use gan_core::simulator::{
    build_hamiltonian, fragment_operator, number_operator, EvolutionMode, Propagator, StateVector,
};
use gan_core::verify::{check_accumulation, convergence_model, convergence_state, dyadic, frozen_models, loglog_slope};

type Outcome = (bool, String);
type Mat = DMatrix<Complex64>;
type Criterion = (&'static str, fn() -> Outcome);

const PUBLISHED: [(Preset, u64, f64); 9] = [
    (Preset::ScatteringSmall, 196, 2.30e7),
    (Preset::ScatteringMid, 246, 3.05e7),
    (Preset::ScatteringLarge, 346, 4.55e7),
    (Preset::PhotoCt1, 267, 2.02e7),
    (Preset::PhotoCt2, 271, 7.85e7),
    (Preset::PhotoCt3, 371, 1.29e8),
    (Preset::Junction1, 212, 2.79e7),
    (Preset::Junction2, 237, 3.10e7),
    (Preset::Junction3, 337, 5.02e7),
];

fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Product that skips zero entries; the operators here are very sparse.
fn mul(a: &Mat, b: &Mat) -> Mat {
    let cols: Vec<Vec<(usize, Complex64)>> = (0..a.ncols())
        .map(|k| (0..a.nrows()).filter(|&r| a[(r, k)] != Complex64::default()).map(|r| (r, a[(r, k)])).collect())
        .collect();
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    for c in 0..b.ncols() {
        for (k, col) in cols.iter().enumerate() {
            let x = b[(k, c)];
            if x != Complex64::default() {
                for &(r, v) in col {
                    out[(r, c)] += v * x;
                }
            }
        }
    }
    out
}

fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Jordan-Wigner annihilators from Kronecker products; mode `p` is bit `p`
/// of the basis index, so it is the `p`-th factor from the right.
fn annihilators(n: usize) -> Vec<Mat> {
    let c = |v: f64| Complex64::new(v, 0.0);
    let id = Mat::identity(2, 2);
    let z = Mat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
    let lower = Mat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    (0..n)
        .map(|p| {
            let mut m = Mat::identity(1, 1);
            for q in (0..n).rev() {
                let f = if q == p {
                    &lower
                } else if q < p {
                    &z
                } else {
                    &id
                };
                m = kron(&m, f);
            }
            m
        })
        .collect()
}

/// Oracle Hamiltonian of a frozen model (constant channel only).
fn oracle_hamiltonian(m: &GanModel, a: &[Mat]) -> Mat {
    let n = m.n_orbitals();
    let num = |p: usize| mul(&a[p].adjoint(), &a[p]);
    let dim = 1 << n;
    let mut h = Mat::identity(dim, dim) * Complex64::new(m.potentials.gamma.iter().map(|g| g.value).sum(), 0.0);
    for c in &m.potentials.alpha {
        let hop = mul(&a[c.i].adjoint(), &a[c.j]);
        let term = if c.i < m.n_mol && c.j < m.n_mol { hop } else { &hop + hop.adjoint() };
        h += term * Complex64::new(c.value, 0.0);
    }
    for c in &m.potentials.beta {
        h += mul(&num(c.i), &num(c.j)) * Complex64::new(c.value, 0.0);
    }
    for (b, e) in m.metal.energies.iter().enumerate() {
        h += num(m.n_mol + b) * Complex64::new(*e, 0.0);
    }
    h
}

/// Oracle hopping operator for one unordered pair.
fn oracle_pair(m: &GanModel, a: &[Mat], (i, j): (usize, usize)) -> Mat {
    let mut h = Mat::zeros(1 << m.n_orbitals(), 1 << m.n_orbitals());
    for c in &m.potentials.alpha {
        if (c.i, c.j) == (i, j) || (c.i, c.j) == (j, i) {
            let hop = mul(&a[c.i].adjoint(), &a[c.j]);
            let term = if c.i < m.n_mol && c.j < m.n_mol { hop } else { &hop + hop.adjoint() };
            h += term * Complex64::new(c.value, 0.0);
        }
    }
    h
}

fn criterion_1() -> Outcome {
    let mut bad = Vec::new();
    for (p, qubits, _) in PUBLISHED {
        let r = estimate(&EstimateRequest::preset(p, 1000)).expect("preset estimates");
        if r.resources.total_qubits != qubits {
            bad.push(format!("{}: {} != {}", p.name(), r.resources.total_qubits, qubits));
        }
    }
    (bad.is_empty(), if bad.is_empty() { "9/9 rows exact".into() } else { bad.join("; ") })
}

fn criterion_2() -> Outcome {
    let ratios: Vec<f64> = PUBLISHED
        .iter()
        .map(|&(p, _, published)| {
            let r = estimate(&EstimateRequest::preset(p, 1000)).expect("preset estimates");
            r.resources.toffoli_total as f64 / published
        })
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let ok = lo >= 0.5 && hi <= 2.0 && hi / lo < 2.0;
    (ok, format!("ratio range {lo:.3}..{hi:.3}, spread {:.3}", hi / lo))
}

fn criterion_3() -> Outcome {
    let models = frozen_models(24, 2024).expect("frozen models build");
    let (mut sum_err, mut comm, mut offdiag, mut coeff) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for m in &models {
        let n = m.n_orbitals();
        let a = annihilators(n);
        let oracle = oracle_hamiltonian(m, &a);
        let fragments = build_fragments(m).unwrap();
        let mut total = Mat::zeros(1 << n, 1 << n);
        for f in &fragments {
            let op = fragment_operator(m, f).unwrap().matrix;
            total += &op;
            if f.kind == FragmentKind::Kinetic {
                continue;
            }
            if let Some(matching) = &f.matching {
                let parts: Vec<Mat> = matching.pairs.iter().map(|&p| oracle_pair(m, &a, p)).collect();
                let joined = parts.iter().fold(Mat::zeros(1 << n, 1 << n), |acc, p| acc + p);
                sum_err = sum_err.max(max_abs(&(joined - &op)));
                for x in 0..parts.len() {
                    for y in x + 1..parts.len() {
                        comm = comm.max(max_abs(&(mul(&parts[x], &parts[y]) - mul(&parts[y], &parts[x]))));
                    }
                }
            }
            let u = diagonalizer_matrix(f, n).unwrap();
            let d = mul(&mul(&u.adjoint(), &op), &u);
            for r in 0..d.nrows() {
                for c in (0..d.ncols()).filter(|&c| c != r) {
                    offdiag = offdiag.max(d[(r, c)].norm());
                }
                let occ: Vec<bool> = (0..n).map(|p| r >> p & 1 == 1).collect();
                let e = effective_coefficient(m, f, None, &occ).unwrap();
                coeff = coeff.max((d[(r, r)] - e).norm());
            }
        }
        sum_err = sum_err.max(max_abs(&(total - &oracle)));
    }
    let ok = sum_err <= 1e-12 && comm <= 1e-12 && offdiag <= 1e-12 && coeff <= 1e-10;
    (
        ok,
        format!(
            "{} models: sum {sum_err:.1e}, commutator {comm:.1e}, off-diagonal {offdiag:.1e}, coefficient {coeff:.1e}",
            models.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let shapes = [(2, 2), (2, 4), (3, 3), (4, 4), (3, 5), (4, 6)];
    let (mut cases, mut bad) = (0, 0);
    for (i, &(n_mol, n_metal)) in shapes.iter().enumerate() {
        let mut spec = ToySpec::new(n_mol, n_metal, if i % 2 == 0 { vec![3] } else { vec![3, 2] });
        spec.analytic = i % 3 == 0;
        let (c, b) = check_accumulation(&dyadic(random_model(&spec, rng.random()))).unwrap();
        cases += c;
        bad += b;
    }
    (bad == 0, format!("{bad} mismatches in {cases} emulations, up to 10 modes"))
}

fn exact_oracle(h: &Mat, psi: &StateVector, t: f64) -> Vec<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let x = nalgebra::DVector::from_column_slice(&psi.amps);
    let mut c = v.adjoint() * x;
    for (k, e) in eig.eigenvalues.iter().enumerate() {
        c[k] *= Complex64::from_polar(1.0, -e * t);
    }
    (v * c).iter().copied().collect()
}

fn criterion_5() -> Outcome {
    let model = convergence_model(5);
    let psi = convergence_state(&model).unwrap();
    let h = build_hamiltonian(&model).unwrap().matrix;
    let exact = exact_oracle(&h, &psi, 1.0);
    let number = number_operator(&model).unwrap();
    let n0 = number.expectation(&psi).re;
    let (mut dts, mut errs, mut drift) = (Vec::new(), Vec::new(), 0.0f64);
    for k in [8u64, 16, 32, 64] {
        let dt = 1.0 / k as f64;
        let out = Propagator::new(&model, dt, EvolutionMode::ExactFragments).unwrap().evolve(&psi, k).unwrap();
        let err = out.amps.iter().zip(&exact).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        drift = drift.max((out.norm() - 1.0).abs()).max((number.expectation(&out).re - n0).abs());
        dts.push(dt);
        errs.push(err);
    }
    let slope = loglog_slope(&dts, &errs);
    let ok = (slope - 1.0).abs() <= 0.15 && drift <= 1e-9;
    (ok, format!("slope {slope:.3}, errors {:.2e}..{:.2e}, max drift {drift:.1e}", errs[0], errs[3]))
}

fn criterion_6() -> Outcome {
    let mut spec = ToySpec::new(1, 6, vec![]);
    spec.coupling = 0.0;
    let mut model = random_model(&spec, 6);
    model.metal.energies = vec![-0.2, -0.1, -0.03, 0.0, 0.08, 0.15];
    model.metal.temperature = 0.1;
    let init = InitialStateSpec {
        molecule: ElectronicState::Filled(0),
        modes: vec![],
        metal: MetalInit::Thermal,
        trajectories: 200,
        seed: 99,
    };
    let obs: Vec<ObservableSpec> =
        (0..6).map(|b| ObservableSpec::OrbitalPopulation { orbital: model.n_mol + b }).collect();
    let prop = Propagator::new(&model, 0.1, EvolutionMode::ExactFragments).unwrap();
    let runs = run_ensemble(&prop, &model, &init, 10, 1, &obs).unwrap();
    let mut worst = 0.0f64;
    let mut ok = true;
    for (b, &eps) in model.metal.energies.iter().enumerate() {
        let means: Vec<f64> = runs
            .iter()
            .map(|r| {
                let s = &r.columns[b].1;
                s.iter().sum::<f64>() / s.len() as f64
            })
            .collect();
        let n = means.len() as f64;
        let mean = means.iter().sum::<f64>() / n;
        let var = means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        let f = 1.0 / (1.0 + ((eps - model.metal.mu) / model.metal.temperature).exp());
        let z = (mean - f).abs() / se;
        worst = worst.max(z);
        ok &= z <= 3.0;
    }
    let spot_mid = (fermi(0.3, 0.3, 0.05) - 0.5).abs();
    let spot_kt = (fermi(0.35, 0.3, 0.05) - 1.0 / (1.0 + 1f64.exp())).abs();
    ok &= spot_mid <= 1e-9 && spot_kt <= 1e-9;
    (ok, format!("worst deviation {worst:.2} standard errors; f(mu) err {spot_mid:.0e}, f(mu+kT) err {spot_kt:.0e}"))
}

fn criterion_7() -> Outcome {
    // Decoupled leads.
    let mut spec = ToySpec::new(2, 4, vec![3]);
    spec.bias = Some(0.4);
    spec.coupling = 0.0;
    spec.scale = 0.5;
    let model = random_model(&spec, 77);
    let init = InitialStateSpec {
        molecule: ElectronicState::Filled(1),
        modes: vec![NuclearState::ReferenceGround],
        metal: MetalInit::Thermal,
        trajectories: 3,
        seed: 1,
    };
    let obs = [
        ObservableSpec::Current { lead: gan_core::model::Lead::Left },
        ObservableSpec::Current { lead: gan_core::model::Lead::Right },
        ObservableSpec::JunctionCurrent,
    ];
    let prop = Propagator::new(&model, 0.05, EvolutionMode::ExactFragments).unwrap();
    let runs = run_ensemble(&prop, &model, &init, 40, 2, &obs).unwrap();
    let current =
        runs.iter().flat_map(|r| r.columns.iter().flat_map(|c| c.1.iter())).fold(0.0f64, |a, v| a.max(v.abs()));

    // Symmetric Gaussian on a 16-point grid.
    let gauss_model = convergence_model(3);
    let g_init = InitialStateSpec {
        molecule: ElectronicState::Filled(1),
        modes: vec![NuclearState::GaussianWavepacket { q0: 0.0, sigma: 0.7, p: 0.0 }],
        metal: MetalInit::Ground,
        trajectories: 1,
        seed: 0,
    };
    let psi = prepare_state(&gauss_model, &g_init, 0).unwrap();
    let q = measure(&psi, &gauss_model, &ObservableSpec::ModePosition { mode: 0 }).unwrap().abs();

    // Complementary projectors on an evolved state.
    let evolved = Propagator::new(&gauss_model, 0.1, EvolutionMode::ExactFragments).unwrap().evolve(&psi, 10).unwrap();
    let inside: Vec<i64> = (-8..8).filter(|l| l % 3 == 0).collect();
    let outside: Vec<i64> = (-8..8).filter(|l| l % 3 != 0).collect();
    let mass = |labels: Vec<i64>| {
        measure(&evolved, &gauss_model, &ObservableSpec::SubspaceProjector { mode: 0, labels }).unwrap()
    };
    let total = (mass(inside) + mass(outside) - 1.0).abs();

    let ok = current <= 1e-9 && q <= 1e-10 && total <= 1e-12;
    (ok, format!("max |I| {current:.1e}, <Q> {q:.1e}, projector sum error {total:.1e}"))
}

fn criterion_8() -> Outcome {
    let mut bad = Vec::new();
    for p in Preset::ALL {
        let model = build_preset(p, 0);
        let r = estimate(&EstimateRequest::preset(p, 1)).unwrap();
        let analytic = model.basis.iter().filter(|f| f.is_analytic()).count() as u64;
        let fragments = build_fragments(&model).unwrap();
        // Basis channels referenced by each fragment's own terms.
        let mut incidences = 0u64;
        for f in &fragments {
            let mut ids: Vec<usize> = Vec::new();
            match (&f.kind, &f.matching) {
                (FragmentKind::Diagonal, _) => {
                    let diag_alpha = model.potentials.alpha.iter().filter(|c| c.i == c.j);
                    ids.extend(
                        diag_alpha.chain(&model.potentials.beta).filter(|c| c.value != 0.0).filter_map(|c| c.lambda),
                    );
                    ids.extend(model.potentials.gamma.iter().filter(|c| c.value != 0.0).filter_map(|c| c.lambda));
                }
                (FragmentKind::OffDiagonal, Some(m)) => ids.extend(
                    model
                        .potentials
                        .alpha
                        .iter()
                        .filter(|c| {
                            c.value != 0.0 && m.pairs.iter().any(|&(a, b)| (a, b) == (c.i, c.j) || (a, b) == (c.j, c.i))
                        })
                        .filter_map(|c| c.lambda),
                ),
                _ => {}
            }
            ids.sort_unstable();
            ids.dedup();
            incidences += ids.len() as u64;
        }
        let qrom = r.resources.count(NodeKind::QromLoad);
        let macs = r.structure.multiply_accumulates;
        if qrom != 2 * analytic || macs != incidences {
            bad.push(format!("{}: qrom {qrom} vs {}, mac {macs} vs {incidences}", p.name(), 2 * analytic));
        }
    }
    (bad.is_empty(), if bad.is_empty() { "9/9 presets".into() } else { bad.join("; ") })
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 table qubits", criterion_1),
        ("2 table toffoli", criterion_2),
        ("3 fragmentation oracle", criterion_3),
        ("4 accumulation emulation", criterion_4),
        ("5 trotter convergence", criterion_5),
        ("6 thermal sampling", criterion_6),
        ("7 observable sanity", criterion_7),
        ("8 caching structure", criterion_8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let (ok, detail) = run();
        failed += usize::from(!ok);
        println!(
            "criterion {name:<26} {}  {:>7.2}s  {detail}",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        eprintln!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
