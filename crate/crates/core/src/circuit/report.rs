use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::{Circuit, NodeKind};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize, Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KindTally {
    pub count: u64,
    pub toffoli: u64,
}

/// Aggregated cost of a circuit. Breakdown entries are per step.
#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
pub struct ResourceReport {
    pub system_qubits: u64,
    pub ancilla_qubits: u64,
    pub total_qubits: u64,
    pub toffoli_per_step: u64,
    pub rotations_per_step: u64,
    pub steps: u64,
    pub toffoli_total: u64,
    pub breakdown: BTreeMap<NodeKind, KindTally>,
}

impl ResourceReport {
    pub fn count(&self, kind: NodeKind) -> u64 {
        self.breakdown.get(&kind).map_or(0, |t| t.count)
    }
}

/// Sum node costs of a complete circuit.
pub fn tally(circuit: &Circuit) -> Result<ResourceReport> {
    if circuit.open_computes() > 0 {
        return Err(Error::UnbalancedCompute(circuit.open_computes()));
    }
    let mut breakdown: BTreeMap<NodeKind, KindTally> = BTreeMap::new();
    let mut toffoli = 0u64;
    let mut rotations = 0u64;
    for node in circuit.nodes() {
        let e = breakdown.entry(node.kind()).or_default();
        e.count += 1;
        e.toffoli += node.cost.toffoli;
        toffoli += node.cost.toffoli;
        rotations += node.cost.rotations;
    }
    let system = circuit.system_qubits();
    let ancilla = ancilla_high_water(circuit);
    let steps = circuit.repetitions();
    Ok(ResourceReport {
        system_qubits: system,
        ancilla_qubits: ancilla,
        total_qubits: system + ancilla,
        toffoli_per_step: toffoli,
        rotations_per_step: rotations,
        steps,
        toffoli_total: toffoli * steps,
        breakdown,
    })
}

/// Peak concurrently allocated ancilla qubits, including transient workspace.
pub fn ancilla_high_water(circuit: &Circuit) -> u64 {
    circuit.high_water()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{cost, CostFormulas, Subroutine};
    use crate::circuit::{Operation, RegisterRole};
    use std::sync::Arc;

    #[test]
    fn empty_circuit_reports_system_only() {
        let mut c = Circuit::new(CostFormulas::default());
        c.declare("mol", 4, RegisterRole::MolElectronic).unwrap();
        let r = tally(&c).unwrap();
        assert_eq!((r.system_qubits, r.ancilla_qubits, r.toffoli_per_step), (4, 0, 0));
        assert!(r.breakdown.is_empty());
        assert_eq!(ancilla_high_water(&c), 0);
    }

    #[test]
    fn qrom_loads_add_up() {
        let mut c = Circuit::new(CostFormulas::default());
        let x = c.declare("x", 5, RegisterRole::NuclearGrid(0)).unwrap();
        let f = c.declare("f", 12, RegisterRole::FunctionValue).unwrap();
        c.acquire(f).unwrap();
        let table = Arc::new(vec![0i64; 32]);
        for _ in 0..3 {
            let n = c
                .compute(Operation::QromLoad { address: x, target: f, table: table.clone(), max_ancilla: None })
                .unwrap();
            c.uncompute(n).unwrap();
        }
        let r = tally(&c).unwrap();
        let unit = cost(Subroutine::QromLoad { entries: 32, output: 12, max_ancilla: None }).unwrap().toffoli;
        let q = r.breakdown[&NodeKind::QromLoad];
        assert_eq!((q.count, q.toffoli), (6, 6 * unit));
    }

    #[test]
    fn open_compute_is_unbalanced() {
        let mut c = Circuit::new(CostFormulas::default());
        let a = c.declare("a", 8, RegisterRole::Workspace).unwrap();
        c.acquire(a).unwrap();
        c.compute(Operation::Negate { target: a, control: crate::circuit::QubitRef { register: a, bit: 0 } }).unwrap();
        assert!(matches!(tally(&c), Err(Error::UnbalancedCompute(1))));
    }

    #[test]
    fn report_json_round_trip() {
        let mut r = ResourceReport { system_qubits: 3, steps: 2, ..Default::default() };
        r.breakdown.insert(NodeKind::Adder, KindTally { count: 2, toffoli: 14 });
        let back: ResourceReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
