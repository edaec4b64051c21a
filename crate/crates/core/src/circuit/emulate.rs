use super::{Circuit, CnotSource, NodeId, Operation, QubitRef, RegisterId};
use crate::arithmetic::fixed_point::round_shift;

/// Classical reference execution of a circuit on one computational basis
/// state. Clifford layers, QFTs and rotations are skipped: the emulator
/// follows the arithmetic in the diagonal frame.
pub struct Emulator<'a> {
    circuit: &'a Circuit,
    values: Vec<u64>,
}

fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl<'a> Emulator<'a> {
    pub fn new(circuit: &'a Circuit) -> Self {
        Self { circuit, values: vec![0; circuit.registers().len()] }
    }

    fn width(&self, r: RegisterId) -> u32 {
        self.circuit.registers()[r].width
    }

    /// Store a signed value (reduced modulo the register width).
    pub fn set(&mut self, r: RegisterId, value: i64) {
        self.values[r] = value as u64 & mask(self.width(r));
    }

    /// Register content as a two's-complement signed value.
    pub fn get(&self, r: RegisterId) -> i64 {
        let w = self.width(r);
        let v = self.values[r];
        if w >= 64 || v >> (w - 1) == 0 {
            v as i64
        } else {
            (v | !mask(w)) as i64
        }
    }

    pub fn get_unsigned(&self, r: RegisterId) -> u64 {
        self.values[r]
    }

    pub fn bit(&self, q: QubitRef) -> bool {
        self.values[q.register] >> q.bit & 1 == 1
    }

    fn flip(&mut self, q: QubitRef, on: bool) {
        if on {
            self.values[q.register] ^= 1 << q.bit;
        }
    }

    fn xor(&mut self, r: RegisterId, value: i128) {
        self.values[r] ^= value as u64 & mask(self.width(r));
    }

    fn add(&mut self, r: RegisterId, value: i128) {
        let cur = self.get(r) as i128;
        self.set(r, (cur + value) as i64);
    }

    pub fn run(&mut self) {
        self.run_nodes(0..self.circuit.nodes().len());
    }

    pub fn run_nodes(&mut self, range: std::ops::Range<NodeId>) {
        for id in range {
            self.apply(id);
        }
    }

    fn apply(&mut self, id: NodeId) {
        let node = &self.circuit.nodes()[id];
        let reverse = node.uncomputes.is_some();
        let sign = if reverse { -1 } else { 1 };
        match &node.op {
            Operation::CliffordLayer { .. }
            | Operation::RzRotation { .. }
            | Operation::Qft { .. }
            | Operation::InverseQft { .. } => {}
            Operation::Adder { source, target } | Operation::PhaseGradientAdd { source, target } => {
                let v = self.get(*source) as i128;
                self.add(*target, sign * v);
            }
            Operation::ControlledAdder { source, target, control } => {
                if self.bit(*control) {
                    let v = self.get(*source) as i128;
                    self.add(*target, sign * v);
                }
            }
            Operation::OutOfPlaceMultiply { a, b, target, shift } => {
                let p = round_shift(self.get(*a) as i128 * self.get(*b) as i128, *shift);
                self.xor(*target, p);
            }
            Operation::Square { source, target } => {
                let x = self.get(*source) as i128;
                self.xor(*target, x * x);
            }
            Operation::QromLoad { address, target, table, .. } => {
                let v = table[self.get_unsigned(*address) as usize % table.len()];
                self.xor(*target, v as i128);
            }
            Operation::Negate { target, control } => {
                if self.bit(*control) {
                    let v = self.get(*target) as i128;
                    self.set(*target, (-v) as i64);
                }
            }
            Operation::ParityCompute { a, b, target } => {
                let on = self.bit(*a) ^ self.bit(*b);
                self.flip(*target, on);
            }
            Operation::ToffoliGate { a, b, target } => {
                let on = self.bit(*a) && self.bit(*b);
                self.flip(*target, on);
            }
            Operation::CnotLayer { source, target } => match source {
                CnotSource::Register(r) => {
                    let v = self.get(*r) as i128;
                    self.xor(*target, v);
                }
                CnotSource::Constant { raw, control } => {
                    if control.is_none_or(|c| self.bit(c)) {
                        self.xor(*target, *raw as i128);
                    }
                }
            },
        }
    }
}
