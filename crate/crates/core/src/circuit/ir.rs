use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use crate::arithmetic::{Cost, CostFormulas, Subroutine};
use crate::error::{Error, Result};

pub type RegisterId = usize;
pub type NodeId = usize;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegisterRole {
    MolElectronic,
    MetalElectronic,
    NuclearGrid(usize),
    FunctionValue,
    Coefficient,
    PhaseGradient,
    Workspace,
}

impl RegisterRole {
    pub fn is_system(self) -> bool {
        matches!(self, RegisterRole::MolElectronic | RegisterRole::MetalElectronic | RegisterRole::NuclearGrid(_))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Register {
    pub name: String,
    pub width: u32,
    pub role: RegisterRole,
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitRef {
    pub register: RegisterId,
    pub bit: u32,
}

/// Where a CNOT layer takes its bits from.
#[derive(Clone, Debug, PartialEq)]
pub enum CnotSource {
    /// Copy another register (sign-extended).
    Register(RegisterId),
    /// XOR a classical constant, optionally controlled on one qubit.
    Constant { raw: i64, control: Option<QubitRef> },
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    CliffordLayer,
    RzRotation,
    Qft,
    InverseQft,
    Adder,
    ControlledAdder,
    OutOfPlaceMultiply,
    Square,
    QromLoad,
    PhaseGradientAdd,
    Negate,
    ParityCompute,
    ToffoliGate,
    CnotLayer,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Operation performed by a node, with its register bindings.
///
/// Arithmetic registers hold two's-complement integers of their width.
#[derive(Clone, Debug, PartialEq)]
pub enum Operation {
    /// Diagonalizing Clifford of fragment `fragment` (or its inverse).
    CliffordLayer {
        fragment: usize,
        gates: usize,
        inverse: bool,
    },
    RzRotation {
        qubit: QubitRef,
        angle: f64,
    },
    Qft {
        register: RegisterId,
    },
    InverseQft {
        register: RegisterId,
    },
    /// `target += source`.
    Adder {
        source: RegisterId,
        target: RegisterId,
    },
    /// `target += source` when `control` is set.
    ControlledAdder {
        source: RegisterId,
        target: RegisterId,
        control: QubitRef,
    },
    /// `target ^= round((a·b) / 2^shift)`.
    OutOfPlaceMultiply {
        a: RegisterId,
        b: RegisterId,
        target: RegisterId,
        shift: u32,
    },
    /// `target ^= source²`.
    Square {
        source: RegisterId,
        target: RegisterId,
    },
    /// `target ^= table[address]`, address read as an unsigned register value.
    QromLoad {
        address: RegisterId,
        target: RegisterId,
        table: Arc<Vec<i64>>,
        max_ancilla: Option<u64>,
    },
    /// `target += source` into the phase-gradient register.
    PhaseGradientAdd {
        source: RegisterId,
        target: RegisterId,
    },
    /// `target = -target` when `control` is set; `target` holds zero or a
    /// loaded classical constant.
    Negate {
        target: RegisterId,
        control: QubitRef,
    },
    /// `target ^= a ⊕ b`.
    ParityCompute {
        a: QubitRef,
        b: QubitRef,
        target: QubitRef,
    },
    /// `target ^= a ∧ b`.
    ToffoliGate {
        a: QubitRef,
        b: QubitRef,
        target: QubitRef,
    },
    CnotLayer {
        source: CnotSource,
        target: RegisterId,
    },
}

impl Operation {
    pub fn kind(&self) -> NodeKind {
        match self {
            Operation::CliffordLayer { .. } => NodeKind::CliffordLayer,
            Operation::RzRotation { .. } => NodeKind::RzRotation,
            Operation::Qft { .. } => NodeKind::Qft,
            Operation::InverseQft { .. } => NodeKind::InverseQft,
            Operation::Adder { .. } => NodeKind::Adder,
            Operation::ControlledAdder { .. } => NodeKind::ControlledAdder,
            Operation::OutOfPlaceMultiply { .. } => NodeKind::OutOfPlaceMultiply,
            Operation::Square { .. } => NodeKind::Square,
            Operation::QromLoad { .. } => NodeKind::QromLoad,
            Operation::PhaseGradientAdd { .. } => NodeKind::PhaseGradientAdd,
            Operation::Negate { .. } => NodeKind::Negate,
            Operation::ParityCompute { .. } => NodeKind::ParityCompute,
            Operation::ToffoliGate { .. } => NodeKind::ToffoliGate,
            Operation::CnotLayer { .. } => NodeKind::CnotLayer,
        }
    }

    /// Registers the operation touches, including those of control qubits.
    pub fn registers(&self) -> Vec<RegisterId> {
        match self {
            Operation::CliffordLayer { .. } => vec![],
            Operation::RzRotation { qubit, .. } => vec![qubit.register],
            Operation::Qft { register } | Operation::InverseQft { register } => vec![*register],
            Operation::Adder { source, target } | Operation::PhaseGradientAdd { source, target } => {
                vec![*source, *target]
            }
            Operation::ControlledAdder { source, target, control } => vec![*source, *target, control.register],
            Operation::OutOfPlaceMultiply { a, b, target, .. } => vec![*a, *b, *target],
            Operation::Square { source, target } => vec![*source, *target],
            Operation::QromLoad { address, target, .. } => vec![*address, *target],
            Operation::Negate { target, control } => vec![*target, control.register],
            Operation::ParityCompute { a, b, target } | Operation::ToffoliGate { a, b, target } => {
                vec![a.register, b.register, target.register]
            }
            Operation::CnotLayer { source, target } => match source {
                CnotSource::Register(r) => vec![*r, *target],
                CnotSource::Constant { control: Some(q), .. } => vec![q.register, *target],
                CnotSource::Constant { control: None, .. } => vec![*target],
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IrNode {
    pub op: Operation,
    pub cost: Cost,
    /// For uncompute nodes, the compute node being reversed.
    pub uncomputes: Option<NodeId>,
}

impl IrNode {
    pub fn kind(&self) -> NodeKind {
        self.op.kind()
    }
}

/// A compiled circuit. One instance describes a single step that is
/// repeated `repetitions` times.
#[derive(Clone, Debug)]
pub struct Circuit {
    formulas: CostFormulas,
    registers: Vec<Register>,
    live: Vec<bool>,
    nodes: Vec<IrNode>,
    open: Vec<bool>,
    open_count: usize,
    live_ancilla: u64,
    high_water: u64,
    repetitions: u64,
}

impl Circuit {
    pub fn new(formulas: CostFormulas) -> Self {
        Self {
            formulas,
            registers: Vec::new(),
            live: Vec::new(),
            nodes: Vec::new(),
            open: Vec::new(),
            open_count: 0,
            live_ancilla: 0,
            high_water: 0,
            repetitions: 1,
        }
    }

    pub fn formulas(&self) -> &CostFormulas {
        &self.formulas
    }

    /// Declare a register. System registers are live immediately; ancilla
    /// registers become live with [`Circuit::acquire`].
    pub fn declare(&mut self, name: &str, width: u32, role: RegisterRole) -> Result<RegisterId> {
        if width == 0 {
            return Err(Error::UnsupportedWidth(0));
        }
        if self.registers.iter().any(|r| r.name == name) {
            return Err(Error::InvalidArgument(format!("register `{name}` declared twice")));
        }
        self.registers.push(Register { name: name.to_string(), width, role });
        self.live.push(role.is_system());
        Ok(self.registers.len() - 1)
    }

    pub fn acquire(&mut self, reg: RegisterId) -> Result<()> {
        let r = self.registers.get(reg).ok_or(Error::UnknownRegister(reg))?;
        if self.live[reg] {
            return Err(Error::InvalidArgument(format!("register `{}` is already live", r.name)));
        }
        self.live[reg] = true;
        self.live_ancilla += r.width as u64;
        self.high_water = self.high_water.max(self.live_ancilla);
        Ok(())
    }

    pub fn release(&mut self, reg: RegisterId) -> Result<()> {
        let r = self.registers.get(reg).ok_or(Error::UnknownRegister(reg))?;
        if !self.live[reg] || r.role.is_system() {
            return Err(Error::InvalidArgument(format!("register `{}` is not a live ancilla", r.name)));
        }
        self.live[reg] = false;
        self.live_ancilla -= r.width as u64;
        Ok(())
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, id: RegisterId) -> Result<&Register> {
        self.registers.get(id).ok_or(Error::UnknownRegister(id))
    }

    pub fn nodes(&self) -> &[IrNode] {
        &self.nodes
    }

    pub fn repetitions(&self) -> u64 {
        self.repetitions
    }

    pub(crate) fn set_repetitions(&mut self, steps: u64) {
        self.repetitions = steps;
    }

    pub fn open_computes(&self) -> usize {
        self.open_count
    }

    pub fn high_water(&self) -> u64 {
        self.high_water
    }

    pub fn system_qubits(&self) -> u64 {
        self.registers.iter().filter(|r| r.role.is_system()).map(|r| r.width as u64).sum()
    }

    fn width(&self, r: RegisterId) -> u32 {
        self.registers[r].width
    }

    fn node_cost(&self, op: &Operation) -> Result<Cost> {
        let f = &self.formulas;
        let w = |r| self.width(r);
        let sub = match op {
            Operation::CliffordLayer { .. } => Subroutine::CliffordLayer,
            Operation::RzRotation { .. } => Subroutine::RzRotation,
            Operation::Qft { register } | Operation::InverseQft { register } => Subroutine::Qft { bits: w(*register) },
            Operation::Adder { target, .. } => Subroutine::Adder { bits: w(*target) },
            Operation::ControlledAdder { target, .. } => Subroutine::ControlledAdder { bits: w(*target) },
            Operation::OutOfPlaceMultiply { a, b, .. } => Subroutine::OutOfPlaceMultiply { a: w(*a), b: w(*b) },
            Operation::Square { source, .. } => Subroutine::Square { bits: w(*source) },
            Operation::QromLoad { table, target, max_ancilla, .. } => {
                Subroutine::QromLoad { entries: table.len() as u64, output: w(*target), max_ancilla: *max_ancilla }
            }
            Operation::PhaseGradientAdd { target, .. } => Subroutine::PhaseGradientAdd { bits: w(*target) },
            Operation::Negate { target, .. } => Subroutine::Negate { bits: w(*target), loaded_constant: true },
            Operation::ParityCompute { .. } => Subroutine::ParityCompute,
            Operation::ToffoliGate { .. } => Subroutine::ToffoliGate,
            Operation::CnotLayer { .. } => Subroutine::CnotLayer,
        };
        f.cost(sub)
    }

    fn check_operands(&self, op: &Operation) -> Result<()> {
        for r in op.registers() {
            let reg = self.registers.get(r).ok_or(Error::UnknownRegister(r))?;
            if !self.live[r] {
                return Err(Error::InvalidArgument(format!("register `{}` is used while not live", reg.name)));
            }
        }
        let qubits: Vec<QubitRef> = match op {
            Operation::RzRotation { qubit, .. } => vec![*qubit],
            Operation::ControlledAdder { control, .. } | Operation::Negate { control, .. } => vec![*control],
            Operation::ParityCompute { a, b, target } | Operation::ToffoliGate { a, b, target } => {
                vec![*a, *b, *target]
            }
            Operation::CnotLayer { source: CnotSource::Constant { control: Some(q), .. }, .. } => vec![*q],
            _ => vec![],
        };
        for q in qubits {
            if q.bit >= self.width(q.register) {
                return Err(Error::InvalidArgument(format!(
                    "qubit {} outside register `{}`",
                    q.bit, self.registers[q.register].name
                )));
            }
        }
        Ok(())
    }

    fn push(&mut self, op: Operation, uncomputes: Option<NodeId>, opens: bool) -> Result<NodeId> {
        self.check_operands(&op)?;
        let cost = self.node_cost(&op)?;
        self.high_water = self.high_water.max(self.live_ancilla + cost.ancilla);
        self.nodes.push(IrNode { op, cost, uncomputes });
        self.open.push(opens);
        if opens {
            self.open_count += 1;
        }
        Ok(self.nodes.len() - 1)
    }

    /// Append a compute node that must later be reversed with
    /// [`Circuit::uncompute`].
    pub fn compute(&mut self, op: Operation) -> Result<NodeId> {
        self.push(op, None, true)
    }

    /// Append a node that needs no reversal (phase kicks, rotations).
    pub fn action(&mut self, op: Operation) -> Result<NodeId> {
        self.push(op, None, false)
    }

    /// Append the reverse of an open compute node.
    pub fn uncompute(&mut self, of: NodeId) -> Result<NodeId> {
        if !self.open.get(of).copied().unwrap_or(false) {
            return Err(Error::UnmatchedUncompute(of));
        }
        let op = match &self.nodes[of].op {
            Operation::CliffordLayer { fragment, gates, inverse } => {
                Operation::CliffordLayer { fragment: *fragment, gates: *gates, inverse: !inverse }
            }
            Operation::Qft { register } => Operation::InverseQft { register: *register },
            Operation::InverseQft { register } => Operation::Qft { register: *register },
            other => other.clone(),
        };
        let id = self.push(op, Some(of), false)?;
        self.open[of] = false;
        self.open_count -= 1;
        Ok(id)
    }

    /// Append an already-built node; uncompute references are checked.
    pub fn append(&mut self, node: IrNode) -> Result<NodeId> {
        match node.uncomputes {
            Some(of) => {
                if !self.open.get(of).copied().unwrap_or(false) {
                    return Err(Error::UnmatchedUncompute(of));
                }
                let id = self.push(node.op, Some(of), false)?;
                self.open[of] = false;
                self.open_count -= 1;
                Ok(id)
            }
            None => self.compute(node.op),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circuit() -> (Circuit, RegisterId, RegisterId) {
        let mut c = Circuit::new(CostFormulas::default());
        let a = c.declare("a", 32, RegisterRole::Workspace).unwrap();
        let b = c.declare("b", 32, RegisterRole::Workspace).unwrap();
        (c, a, b)
    }

    #[test]
    fn clifford_is_free_and_adder_costs_formula() {
        let (mut c, a, b) = circuit();
        c.acquire(a).unwrap();
        c.acquire(b).unwrap();
        c.action(Operation::CliffordLayer { fragment: 1, gates: 4, inverse: false }).unwrap();
        assert_eq!(c.nodes()[0].cost.toffoli, 0);
        c.compute(Operation::Adder { source: a, target: b }).unwrap();
        assert_eq!(c.nodes()[1].cost.toffoli, 31);
    }

    #[test]
    fn unknown_register_and_unmatched_uncompute() {
        let (mut c, a, _) = circuit();
        c.acquire(a).unwrap();
        assert!(matches!(c.compute(Operation::Adder { source: a, target: 9 }), Err(Error::UnknownRegister(9))));
        assert!(matches!(c.uncompute(0), Err(Error::UnmatchedUncompute(0))));
        let n = c.compute(Operation::Square { source: a, target: a }).unwrap();
        c.uncompute(n).unwrap();
        assert!(matches!(c.uncompute(n), Err(Error::UnmatchedUncompute(_))));
    }

    #[test]
    fn disjoint_lifetimes_share_high_water() {
        let (mut c, a, b) = circuit();
        c.acquire(a).unwrap();
        c.release(a).unwrap();
        c.acquire(b).unwrap();
        c.release(b).unwrap();
        assert_eq!(c.high_water(), 32);
        c.acquire(a).unwrap();
        c.acquire(b).unwrap();
        assert_eq!(c.high_water(), 64);
    }

    #[test]
    fn dead_register_cannot_be_used() {
        let (mut c, a, b) = circuit();
        c.acquire(a).unwrap();
        assert!(c.compute(Operation::Adder { source: a, target: b }).is_err());
    }
}
