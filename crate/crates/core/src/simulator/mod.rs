//! Dense statevector simulation on the joint electronic and nuclear grid
//! space: Hamiltonian assembly, fragment exponentials, Trotter evolution and
//! an exact-evolution reference.

mod evolve;
mod hamiltonian;
mod state;

pub use evolve::{exact_evolve, fragment_exponential, trotter_evolve, EvolutionMode, ExactPropagator, Propagator};
pub use hamiltonian::{
    build_hamiltonian, channel_values, fragment_operator, kinetic_matrix, momentum_values, number_operator,
    DenseOperator,
};
pub use state::{StateLayout, StateVector, DENSE_DIM_LIMIT, STATE_DIM_LIMIT};
