//! Compilation of one first-order Trotter step into the circuit IR.

mod builder;
mod layout;

pub use builder::{
    accumulate_coefficient, analytic_table, build_evolution, build_step, build_step_with, channel_unit, load_scale,
    load_terms, AccumulationCircuit, BuildOptions, CompiledStep, LoadScaling, LoadTerm, StepRegisters, TrotterPlan,
};
pub use layout::RegisterLayout;
