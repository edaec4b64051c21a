use std::fmt::Write;

use super::{Circuit, CnotSource, Operation, QubitRef};

/// Line-oriented listing of the node sequence.
pub fn dump_ir(circuit: &Circuit) -> String {
    let name = |r: usize| circuit.registers()[r].name.as_str();
    let q = |q: &QubitRef| format!("{}[{}]", name(q.register), q.bit);
    let mut out = String::new();
    let _ = writeln!(out, "# registers");
    for (id, r) in circuit.registers().iter().enumerate() {
        let _ = writeln!(out, "reg {id} {} width={} role={:?}", r.name, r.width, r.role);
    }
    let _ = writeln!(out, "# nodes (repeated {}x)", circuit.repetitions());
    for (id, node) in circuit.nodes().iter().enumerate() {
        let args = match &node.op {
            Operation::CliffordLayer { fragment, gates, inverse } => {
                format!("fragment={fragment} gates={gates}{}", if *inverse { " inverse" } else { "" })
            }
            Operation::RzRotation { qubit, angle } => format!("{} angle={angle:.6e}", q(qubit)),
            Operation::Qft { register } | Operation::InverseQft { register } => name(*register).to_string(),
            Operation::Adder { source, target } | Operation::PhaseGradientAdd { source, target } => {
                format!("{} -> {}", name(*source), name(*target))
            }
            Operation::ControlledAdder { source, target, control } => {
                format!("{} -> {} if {}", name(*source), name(*target), q(control))
            }
            Operation::OutOfPlaceMultiply { a, b, target, shift } => {
                format!("{} * {} -> {} shift={shift}", name(*a), name(*b), name(*target))
            }
            Operation::Square { source, target } => format!("{}^2 -> {}", name(*source), name(*target)),
            Operation::QromLoad { address, target, table, max_ancilla } => format!(
                "table[{}] -> {} entries={}{}",
                name(*address),
                name(*target),
                table.len(),
                max_ancilla.map(|m| format!(" max_ancilla={m}")).unwrap_or_default()
            ),
            Operation::Negate { target, control } => format!("{} if {}", name(*target), q(control)),
            Operation::ParityCompute { a, b, target } => format!("{} ^ {} -> {}", q(a), q(b), q(target)),
            Operation::ToffoliGate { a, b, target } => format!("{} & {} -> {}", q(a), q(b), q(target)),
            Operation::CnotLayer { source, target } => match source {
                CnotSource::Register(r) => format!("{} -> {}", name(*r), name(*target)),
                CnotSource::Constant { raw, control } => format!(
                    "const {raw} -> {}{}",
                    name(*target),
                    control.map(|c| format!(" if {}", q(&c))).unwrap_or_default()
                ),
            },
        };
        let undo = node.uncomputes.map(|u| format!(" undo={u}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{id} {}{undo} {args} toffoli={} ancilla={}",
            node.kind(),
            node.cost.toffoli,
            node.cost.ancilla
        );
    }
    out
}
