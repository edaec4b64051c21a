use super::{CostFormulas, FixedPointFormat};
use crate::error::{Error, Result};
use crate::model::{BasisForm, BasisFunction, NuclearMode};

/// Select-swap lookup cost minimized over power-of-two swap factors λ.
/// Returns `(toffoli, ancilla, λ)`; the swap network holds `w·λ` qubits and
/// candidates exceeding `max_ancilla` are skipped (λ = 1 always qualifies).
pub fn qrom_cost(f: &CostFormulas, entries: u64, width: u32, max_ancilla: Option<u64>) -> (u64, u64, u64) {
    let w = width as u64;
    let mut best = (f.qrom_select * entries, w, 1);
    let mut lambda = 2u64;
    while lambda <= entries {
        if max_ancilla.is_some_and(|cap| w * lambda > cap) {
            break;
        }
        let t = f.qrom_select * entries.div_ceil(lambda) + f.qrom_swap * w * (lambda - 1);
        if t < best.0 {
            best = (t, w * lambda, lambda);
        }
        lambda *= 2;
    }
    best
}

/// Fixed-point table of an analytic basis function, indexed by the
/// two's-complement register value of its mode.
pub fn qrom_table(f: &BasisFunction, modes: &[NuclearMode], fmt: FixedPointFormat) -> Result<Vec<i64>> {
    let BasisForm::Analytic { mode, potential } = &f.form else {
        return Err(Error::NotAnalytic(f.id));
    };
    let m = modes.get(*mode).ok_or_else(|| Error::InvalidModel(format!("mode {mode} is missing")))?;
    (0..m.grid_points())
        .map(|u| {
            let label = m.label_of(u);
            let value = potential.eval(m.position(label));
            fmt.quantize(value).ok_or(Error::OverflowAtGridPoint { label, value })
        })
        .collect()
}
