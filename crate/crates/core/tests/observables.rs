use num_complex::Complex64;

use gan_core::model::{random_model, GanModel, Lead, LeadPartition, ModeKind, NuclearMode, ToySpec};
use gan_core::observables::{
    fermi, measure, metal_occupations, mode_ground_energy, mode_wavefunction, prepare_state, run_ensemble,
    run_trajectory, sample_metal_state, thermal_average, vibrational_basis, AveragedSeries, ElectronicState,
    InitialStateSpec, MetalInit, NuclearState, ObservableSpec,
};
use gan_core::simulator::{EvolutionMode, Propagator, StateLayout, StateVector};
use gan_core::Error;

fn one_mode(grid_qubits: u32) -> GanModel {
    let mut m = random_model(&ToySpec::new(1, 1, vec![grid_qubits]), 0);
    m.modes = vec![NuclearMode::new(ModeKind::NonReactive, grid_qubits, 1.0)];
    m
}

fn junction(coupled: bool) -> GanModel {
    let mut s = ToySpec::new(2, 4, vec![2]);
    s.scale = 0.5;
    let mut m = random_model(&s, 11);
    if !coupled {
        m = m.without_metal_coupling();
    }
    m.metal.leads = Some(LeadPartition { left: vec![0, 1], right: vec![2, 3], mu_left: 0.3, mu_right: -0.3 });
    m
}

#[test]
fn fermi_spot_values() {
    assert_eq!(fermi(0.2, 0.2, 0.05), 0.5);
    assert!((fermi(0.3, 0.2, 0.1) - 1.0 / (1.0 + std::f64::consts::E)).abs() < 1e-9);
    assert!((fermi(0.3, 0.2, 0.1) - 0.268941).abs() < 1e-6);
    assert_eq!(fermi(-0.1, 0.0, 0.0), 1.0);
    assert_eq!(fermi(0.0, 0.0, 0.0), 1.0);
    assert_eq!(fermi(0.1, 0.0, 0.0), 0.0);
}

#[test]
fn lead_chemical_potentials_set_occupations() {
    let m = junction(true);
    let f = metal_occupations(&m.metal);
    for (b, &fb) in f.iter().enumerate() {
        let mu = if b < 2 { 0.3 } else { -0.3 };
        assert_eq!(fb, fermi(m.metal.energies[b], mu, m.metal.temperature));
    }
}

#[test]
fn harmonic_ground_state_matches_the_analytic_gaussian() {
    let m = one_mode(6);
    let mode = &m.modes[0];
    let chi = mode_wavefunction(&m, 0, &NuclearState::HarmonicGround { omega: 1.0 }).unwrap();
    let mut exact: Vec<f64> = (0..64).map(|u| (-mode.position(mode.label_of(u)).powi(2) / 2.0).exp()).collect();
    let n = exact.iter().map(|x| x * x).sum::<f64>().sqrt();
    exact.iter_mut().for_each(|x| *x /= n);
    let overlap: Complex64 = chi.iter().zip(&exact).map(|(a, b)| a.conj() * b).sum();
    assert!(overlap.norm_sqr() >= 1.0 - 1e-6, "{}", overlap.norm_sqr());
}

#[test]
fn gaussian_wavepacket_properties() {
    let m = one_mode(5);
    let chi = mode_wavefunction(&m, 0, &NuclearState::GaussianWavepacket { q0: 0.0, sigma: 0.5, p: 0.0 }).unwrap();
    assert!(chi.iter().all(|z| z.im == 0.0 && z.re >= 0.0));
    assert!((chi.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-10);
    let bad = NuclearState::GaussianWavepacket { q0: 0.0, sigma: 0.0, p: 0.0 };
    assert!(matches!(mode_wavefunction(&m, 0, &bad), Err(Error::InvalidArgument(_))));
    let off_grid = NuclearState::GaussianWavepacket { q0: 100.0, sigma: 1.0, p: 0.0 };
    assert!(mode_wavefunction(&m, 0, &off_grid).is_err());
}

#[test]
fn morse_ground_energy_is_bound() {
    let m = one_mode(6);
    let e = mode_ground_energy(&m, 0, &NuclearState::MorseGround { d: 4.0, a: 0.8, r: 0.0 }).unwrap();
    assert!(e > 0.0 && e < 4.0, "{e}");
}

#[test]
fn single_time_observables() {
    let m = one_mode(5);
    let spec = InitialStateSpec {
        molecule: ElectronicState::Bits(vec![true]),
        modes: vec![NuclearState::GaussianWavepacket { q0: 0.0, sigma: 0.6, p: 1.5 }],
        metal: MetalInit::Bits(vec![false]),
        trajectories: 1,
        seed: 0,
    };
    let psi = prepare_state(&m, &spec, 0).unwrap();
    assert!((measure(&psi, &m, &ObservableSpec::OrbitalPopulation { orbital: 0 }).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(measure(&psi, &m, &ObservableSpec::OrbitalPopulation { orbital: 1 }).unwrap(), 0.0);
    assert!((measure(&psi, &m, &ObservableSpec::TotalMolElectrons).unwrap() - 1.0).abs() < 1e-12);
    assert!(measure(&psi, &m, &ObservableSpec::ModePosition { mode: 0 }).unwrap().abs() < 1e-10);
    let left: Vec<i64> = (-16..0).collect();
    let right: Vec<i64> = (0..16).collect();
    let a = measure(&psi, &m, &ObservableSpec::SubspaceProjector { mode: 0, labels: left }).unwrap();
    let b = measure(&psi, &m, &ObservableSpec::SubspaceProjector { mode: 0, labels: right }).unwrap();
    assert!((a + b - 1.0).abs() < 1e-12);
    assert!(matches!(
        measure(&psi, &m, &ObservableSpec::OrbitalPopulation { orbital: 7 }),
        Err(Error::UnknownObservable(_))
    ));
    assert!(matches!(measure(&psi, &m, &ObservableSpec::LeadNumber { lead: Lead::Left }), Err(Error::MissingLeads)));
}

#[test]
fn vibrational_levels_are_orthonormal_and_populations_bounded() {
    let m = random_model(&ToySpec::new(1, 1, vec![4]), 3);
    let (_, basis) = vibrational_basis(&m, 0).unwrap();
    let gram = basis.adjoint() * &basis;
    for r in 0..16 {
        for c in 0..16 {
            let expect = if r == c { 1.0 } else { 0.0 };
            assert!((gram[(r, c)] - Complex64::new(expect, 0.0)).norm() < 1e-10);
        }
    }
    let psi = prepare_state(
        &m,
        &InitialStateSpec {
            molecule: ElectronicState::Filled(1),
            modes: vec![NuclearState::ReferenceGround],
            metal: MetalInit::Ground,
            trajectories: 1,
            seed: 0,
        },
        0,
    )
    .unwrap();
    let pops: Vec<f64> = (0..4)
        .map(|v| measure(&psi, &m, &ObservableSpec::VibrationalPopulation { mode: 0, level: v }).unwrap())
        .collect();
    assert!((pops[0] - 1.0).abs() < 1e-10);
    assert!(pops.iter().sum::<f64>() <= 1.0 + 1e-12);
}

#[test]
fn decoupled_leads_carry_no_current() {
    let m = junction(false);
    let p = Propagator::new(&m, 0.05, EvolutionMode::ExactFragments).unwrap();
    let spec = InitialStateSpec {
        molecule: ElectronicState::Filled(1),
        modes: vec![NuclearState::GaussianWavepacket { q0: 0.0, sigma: 0.5, p: 0.0 }],
        metal: MetalInit::Bits(vec![true, true, false, true]),
        trajectories: 1,
        seed: 0,
    };
    let psi = prepare_state(&m, &spec, 0).unwrap();
    let obs = [ObservableSpec::Current { lead: Lead::Left }, ObservableSpec::JunctionCurrent];
    let ts = run_trajectory(&p, &m, psi, 40, 2, &obs).unwrap();
    assert_eq!(ts.times.len(), 21);
    for (_, col) in &ts.columns {
        assert!(col.iter().all(|i| i.abs() < 1e-9));
    }
}

#[test]
fn coupled_junction_conserves_total_number() {
    let m = junction(true);
    let p = Propagator::new(&m, 0.05, EvolutionMode::ExactFragments).unwrap();
    let layout = StateLayout::of(&m).unwrap();
    let psi = StateVector::basis(layout, 0b01_1001, 3);
    let obs: Vec<ObservableSpec> = (0..6).map(|i| ObservableSpec::OrbitalPopulation { orbital: i }).collect();
    let ts = run_trajectory(&p, &m, psi, 30, 1, &obs).unwrap();
    for t in 0..ts.times.len() {
        let total: f64 = ts.columns.iter().map(|(_, c)| c[t]).sum();
        assert!((total - 3.0).abs() < 1e-9);
        assert!(ts.columns.iter().all(|(_, c)| (-1e-12..=1.0 + 1e-12).contains(&c[t])));
    }
}

#[test]
fn sampling_frequencies_follow_fermi() {
    let m = junction(true);
    let f = metal_occupations(&m.metal);
    let n = 4000;
    let mut counts = [0usize; 4];
    for seed in 0..n {
        for (c, b) in counts.iter_mut().zip(sample_metal_state(&m.metal, seed)) {
            *c += b as usize;
        }
    }
    for (c, f) in counts.iter().zip(&f) {
        let p = *c as f64 / n as f64;
        let se = (f * (1.0 - f) / n as f64).sqrt().max(1e-3);
        assert!((p - f).abs() < 4.0 * se, "{p} vs {f}");
    }
}

#[test]
fn thermal_average_preconditions() {
    assert!(thermal_average(&[vec![1.0]]).is_err());
    let e = thermal_average(&[vec![0.5, 1.0], vec![0.5, 1.0]]).unwrap();
    assert_eq!(e[0].stderr, 0.0);
    assert_eq!(e[1].mean, 1.0);
}

#[test]
fn ensembles_are_reproducible() {
    let m = junction(true);
    let p = Propagator::new(&m, 0.1, EvolutionMode::ExactFragments).unwrap();
    let spec = InitialStateSpec {
        molecule: ElectronicState::Filled(1),
        modes: vec![NuclearState::GaussianWavepacket { q0: 0.0, sigma: 0.5, p: 0.0 }],
        metal: MetalInit::Thermal,
        trajectories: 4,
        seed: 9,
    };
    let obs = [ObservableSpec::TotalMolElectrons, ObservableSpec::JunctionCurrent];
    let a = run_ensemble(&p, &m, &spec, 6, 2, &obs).unwrap();
    let b = run_ensemble(&p, &m, &spec, 6, 2, &obs).unwrap();
    assert_eq!(a, b);
    let avg = AveragedSeries::from_trajectories(&a).unwrap();
    assert_eq!(avg.to_csv().lines().next().unwrap(), "time,n_mol,n_mol_stderr,I_junction,I_junction_stderr");
}
