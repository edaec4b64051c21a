//! Circuit intermediate representation: costed subroutine nodes over named
//! registers, with lifetime tracking and Toffoli aggregation.

mod emulate;
mod ir;
mod report;
mod text;

pub use emulate::Emulator;
pub use ir::{Circuit, CnotSource, IrNode, NodeId, NodeKind, Operation, QubitRef, Register, RegisterId, RegisterRole};
pub use report::{ancilla_high_water, tally, KindTally, ResourceReport};
pub use text::dump_ir;
