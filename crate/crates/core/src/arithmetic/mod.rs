//! Fixed-point reference semantics and Toffoli/ancilla cost formulas of the
//! arithmetic subroutines used by the compiled circuits.

mod cost;
pub(crate) mod fixed_point;
mod qrom;

pub use cost::{cost, Cost, CostFormulas, CostModel, Subroutine};
pub use fixed_point::{phase_of_accumulation, ref_add, ref_multiply, ref_negate, ref_square, FixedPointFormat};
pub use qrom::{qrom_cost, qrom_table};
