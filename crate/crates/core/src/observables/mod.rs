//! Initial states, thermal metal sampling and observables on simulated
//! trajectories.

mod initial;
mod measure;
mod trajectory;

pub use initial::{
    fermi, metal_bits, metal_occupations, mode_ground_energy, mode_wavefunction, prepare_state, reference_slice,
    sample_metal_state, sample_metal_state_with, trajectory_rng, ElectronicState, InitialStateSpec, MetalInit,
    NuclearState,
};
pub use measure::{current, measure, vibrational_basis, ObservableSpec};
pub use trajectory::{run_ensemble, run_trajectory, thermal_average, AveragedSeries, Estimate, TimeSeries};
