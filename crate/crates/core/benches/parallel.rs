//! Parallel core against a plain sequential loop. Run once with default
//! features and once with `--no-default-features` to compare the fallback.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use gan_core::estimator::table1_harness;
use gan_core::model::{random_model, ToySpec};
use gan_core::observables::{
    prepare_state, run_ensemble, run_trajectory, ElectronicState, InitialStateSpec, MetalInit, NuclearState,
    ObservableSpec,
};
use gan_core::simulator::{EvolutionMode, Propagator};

fn ensemble(c: &mut Criterion) {
    let mut spec = ToySpec::new(2, 4, vec![4]);
    spec.scale = 0.5;
    let model = random_model(&spec, 1);
    let init = InitialStateSpec {
        molecule: ElectronicState::Filled(1),
        modes: vec![NuclearState::ReferenceGround],
        metal: MetalInit::Thermal,
        trajectories: 16,
        seed: 3,
    };
    let obs = [ObservableSpec::TotalMolElectrons, ObservableSpec::ModePosition { mode: 0 }];
    let prop = Propagator::new(&model, 0.05, EvolutionMode::ExactFragments).unwrap();

    let label = if gan_core::exec::is_parallel() { "ensemble/exec(parallel)" } else { "ensemble/exec(sequential)" };
    let mut g = c.benchmark_group("trajectories");
    g.sample_size(10);
    g.bench_function(label, |b| b.iter(|| black_box(run_ensemble(&prop, &model, &init, 20, 5, &obs).unwrap())));
    g.bench_function("ensemble/plain-loop", |b| {
        b.iter(|| {
            let runs: Vec<_> = (0..init.trajectories as u64)
                .map(|i| {
                    let psi = prepare_state(&model, &init, i).unwrap();
                    run_trajectory(&prop, &model, psi, 20, 5, &obs).unwrap()
                })
                .collect();
            black_box(runs)
        })
    });
    g.finish();
}

fn step(c: &mut Criterion) {
    let mut spec = ToySpec::new(3, 5, vec![5, 4]);
    spec.scale = 0.5;
    let model = random_model(&spec, 2);
    let init = InitialStateSpec {
        molecule: ElectronicState::Filled(2),
        modes: vec![NuclearState::ReferenceGround, NuclearState::ReferenceGround],
        metal: MetalInit::Ground,
        trajectories: 1,
        seed: 0,
    };
    let psi = prepare_state(&model, &init, 0).unwrap();
    let mut g = c.benchmark_group("propagator");
    g.sample_size(10);
    for (name, mode) in [("exact", EvolutionMode::ExactFragments), ("faithful", EvolutionMode::faithful())] {
        let prop = Propagator::new(&model, 0.05, mode).unwrap();
        g.bench_function(format!("step/{name}"), |b| b.iter(|| black_box(prop.evolve(&psi, 1).unwrap())));
    }
    g.finish();
}

fn table(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimator");
    g.sample_size(10);
    g.bench_function("table1", |b| b.iter(|| black_box(table1_harness(1000).unwrap())));
    g.finish();
}

criterion_group!(benches, ensemble, step, table);
criterion_main!(benches);
