use serde::{Deserialize, Serialize};

use super::{qrom_cost, FixedPointFormat};
use crate::error::{Error, Result};
use crate::trotter::RegisterLayout;

/// A costed arithmetic subroutine with its size parameters.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subroutine {
    Adder {
        bits: u32,
    },
    ControlledAdder {
        bits: u32,
    },
    OutOfPlaceMultiply {
        a: u32,
        b: u32,
    },
    Square {
        bits: u32,
    },
    /// Select-swap table lookup; `max_ancilla` caps the swap network.
    QromLoad {
        entries: u64,
        output: u32,
        max_ancilla: Option<u64>,
    },
    Qft {
        bits: u32,
    },
    PhaseGradientAdd {
        bits: u32,
    },
    /// Negation of a register; `loaded_constant` marks a register known to
    /// hold either zero or one classical constant.
    Negate {
        bits: u32,
        loaded_constant: bool,
    },
    ParityCompute,
    ToffoliGate,
    CnotLayer,
    CliffordLayer,
    RzRotation,
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Cost {
    pub toffoli: u64,
    /// Transient workspace held only while the subroutine runs.
    pub ancilla: u64,
    /// Small-angle rotations, counted but not synthesized.
    pub rotations: u64,
}

/// Coefficients of the documented cost formulas.
///
/// * adder: `adder_per_bit·b + adder_offset`
/// * controlled adder: `controlled_adder_per_bit·b + controlled_adder_offset`
/// * out-of-place `a×b` multiply: `multiply_product·a·b + multiply_min·min(a, b)`
/// * square: `square_half_quadratic·(b²−b)/2 + square_linear·b`
/// * QROM over N entries, w-bit output: `min_λ qrom_select·⌈N/λ⌉ + qrom_swap·w·(λ−1)`
/// * negate of a loaded constant: `negate_constant`; general negate: one adder
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default)]
pub struct CostFormulas {
    pub adder_per_bit: i64,
    pub adder_offset: i64,
    pub adder_ancilla: u64,
    pub controlled_adder_per_bit: i64,
    pub controlled_adder_offset: i64,
    pub controlled_adder_ancilla: u64,
    pub multiply_product: i64,
    pub multiply_min: i64,
    pub multiply_ancilla: u64,
    pub square_half_quadratic: i64,
    pub square_linear: i64,
    pub square_ancilla: u64,
    pub qrom_select: u64,
    pub qrom_swap: u64,
    pub negate_constant: u64,
    pub negate_ancilla: u64,
    pub toffoli_gate: u64,
}

impl Default for CostFormulas {
    fn default() -> Self {
        Self {
            adder_per_bit: 1,
            adder_offset: -1,
            adder_ancilla: 0,
            controlled_adder_per_bit: 2,
            controlled_adder_offset: -1,
            controlled_adder_ancilla: 1,
            multiply_product: 1,
            multiply_min: -1,
            multiply_ancilla: 1,
            square_half_quadratic: 1,
            square_linear: 1,
            square_ancilla: 1,
            qrom_select: 1,
            qrom_swap: 1,
            negate_constant: 1,
            negate_ancilla: 1,
            toffoli_gate: 1,
        }
    }
}

const MAX_BITS: u32 = 4096;

fn check(bits: u32) -> Result<i64> {
    if bits == 0 || bits > MAX_BITS {
        Err(Error::UnsupportedWidth(bits))
    } else {
        Ok(bits as i64)
    }
}

fn nonneg(v: i64) -> u64 {
    v.max(0) as u64
}

impl CostFormulas {
    pub fn cost(&self, kind: Subroutine) -> Result<Cost> {
        let c = |toffoli, ancilla| Cost { toffoli, ancilla, rotations: 0 };
        Ok(match kind {
            Subroutine::Adder { bits } | Subroutine::PhaseGradientAdd { bits } => {
                c(nonneg(self.adder_per_bit * check(bits)? + self.adder_offset), self.adder_ancilla)
            }
            Subroutine::ControlledAdder { bits } => c(
                nonneg(self.controlled_adder_per_bit * check(bits)? + self.controlled_adder_offset),
                self.controlled_adder_ancilla,
            ),
            Subroutine::OutOfPlaceMultiply { a, b } => {
                let (a, b) = (check(a)?, check(b)?);
                c(nonneg(self.multiply_product * a * b + self.multiply_min * a.min(b)), self.multiply_ancilla)
            }
            Subroutine::Square { bits } => {
                let b = check(bits)?;
                c(nonneg(self.square_half_quadratic * (b * b - b) / 2 + self.square_linear * b), self.square_ancilla)
            }
            Subroutine::QromLoad { entries, output, max_ancilla } => {
                check(output)?;
                if entries == 0 {
                    return Err(Error::UnsupportedWidth(0));
                }
                let (toffoli, ancilla, _) = qrom_cost(self, entries, output, max_ancilla);
                c(toffoli, ancilla)
            }
            Subroutine::Qft { bits } => {
                let b = check(bits)? as u64;
                Cost { toffoli: 0, ancilla: 0, rotations: b * (b - 1) / 2 }
            }
            Subroutine::Negate { bits, loaded_constant } => {
                check(bits)?;
                if loaded_constant {
                    c(self.negate_constant, self.negate_ancilla)
                } else {
                    self.cost(Subroutine::Adder { bits })?
                }
            }
            Subroutine::ToffoliGate => c(self.toffoli_gate, 0),
            Subroutine::ParityCompute | Subroutine::CnotLayer | Subroutine::CliffordLayer => c(0, 0),
            Subroutine::RzRotation => Cost { toffoli: 0, ancilla: 0, rotations: 1 },
        })
    }
}

/// Cost of `kind` under the default formulas.
pub fn cost(kind: Subroutine) -> Result<Cost> {
    CostFormulas::default().cost(kind)
}

/// Complete estimator configuration: formulas, the fixed-point format used
/// for numerical emulation, and the register widths of compiled circuits.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Default)]
#[serde(default)]
pub struct CostModel {
    pub formulas: CostFormulas,
    pub fixed_point: FixedPointFormat,
    pub layout: RegisterLayout,
}

impl CostModel {
    pub fn hash(&self) -> String {
        crate::model::hex_digest(&serde_json::to_vec(self).expect("cost models always serialize"))
    }
}
