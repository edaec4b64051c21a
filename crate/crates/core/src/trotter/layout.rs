use serde::{Deserialize, Serialize};

use crate::arithmetic::{CostFormulas, FixedPointFormat};

/// Widths and number formats of the ancilla registers of a compiled step.
///
/// The default is the estimator's calibrated layout: a 12-bit function
/// value, an 8-bit coefficient accumulator with an 8-bit load register, a
/// one-qubit parity/flag pair and a 21-bit product feeding a 21-bit phase
/// gradient register. Its peak (phase + function + coefficient + product +
/// multiplier carry) is 63 qubits.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct RegisterLayout {
    pub function: FixedPointFormat,
    pub coefficient: FixedPointFormat,
    pub load_bits: u32,
    pub product_bits: u32,
    pub phase_bits: u32,
}

impl Default for RegisterLayout {
    fn default() -> Self {
        Self {
            function: FixedPointFormat { total_bits: 12, fraction_bits: 6, signed: true },
            coefficient: FixedPointFormat { total_bits: 8, fraction_bits: 4, signed: true },
            load_bits: 8,
            product_bits: 21,
            phase_bits: 21,
        }
    }
}

impl RegisterLayout {
    /// Layout using one format for function, coefficient and phase registers.
    pub fn uniform(fmt: FixedPointFormat) -> Self {
        Self {
            function: fmt,
            coefficient: fmt,
            load_bits: fmt.total_bits,
            product_bits: fmt.total_bits,
            phase_bits: fmt.total_bits,
        }
    }

    /// Wide layout used by circuit-faithful simulation: 32-bit function and
    /// phase registers and a 56-bit accumulator that holds time-scaled
    /// coefficients without overflow.
    pub fn faithful() -> Self {
        let q = |total_bits, fraction_bits| FixedPointFormat { total_bits, fraction_bits, signed: true };
        Self { function: q(32, 16), coefficient: q(56, 16), load_bits: 56, product_bits: 32, phase_bits: 32 }
    }

    pub fn phase_format(&self) -> FixedPointFormat {
        FixedPointFormat { total_bits: self.phase_bits, fraction_bits: 0, signed: true }
    }

    /// Qubits live during the multiply into the product register.
    pub fn multiply_peak(&self, formulas: &CostFormulas) -> u64 {
        (self.phase_bits + self.function.total_bits + self.coefficient.total_bits + self.product_bits) as u64
            + formulas.multiply_ancilla
    }

    /// Swap-network budget for table lookups: whatever the multiply phase
    /// leaves beyond the phase and function registers.
    pub fn qrom_ancilla_cap(&self, formulas: &CostFormulas) -> u64 {
        self.multiply_peak(formulas) - (self.phase_bits + self.function.total_bits) as u64
    }
}
