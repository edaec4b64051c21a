use serde::{Deserialize, Serialize};

use super::{estimate, EstimateReport, EstimateRequest};
use crate::error::Result;
use crate::exec;
use crate::model::{PresetRow, TABLE1};

pub const CSV_HEADER: &str =
    "task,n_mol,n_metal,m,m_split,qubits_published,qubits_ours,toffoli_published,toffoli_ours,rel_delta";

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Table1Row {
    pub task: String,
    pub n_mol: usize,
    pub n_metal: usize,
    pub m: usize,
    pub m_split: (usize, usize, usize),
    pub qubits_published: usize,
    pub qubits_ours: u64,
    pub toffoli_published: f64,
    pub toffoli_ours: u64,
    /// (ours − published) / published for the Toffoli column.
    pub rel_delta: f64,
}

impl Table1Row {
    fn new(row: &PresetRow, report: &EstimateReport) -> Self {
        let ours = report.resources.toffoli_total;
        Self {
            task: row.preset.name().to_string(),
            n_mol: row.n_mol,
            n_metal: row.n_metal,
            m: row.m(),
            m_split: row.split,
            qubits_published: row.qubits,
            qubits_ours: report.resources.total_qubits,
            toffoli_published: row.toffoli,
            toffoli_ours: ours,
            rel_delta: relative_delta(ours as f64, row.toffoli),
        }
    }

    pub fn toffoli_ratio(&self) -> f64 {
        self.toffoli_ours as f64 / self.toffoli_published
    }

    pub fn qubits_match(&self) -> bool {
        self.qubits_ours == self.qubits_published as u64
    }

    pub fn toffoli_within_factor(&self, factor: f64) -> bool {
        let r = self.toffoli_ratio();
        r <= factor && r >= 1.0 / factor
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}/{}/{},{},{},{:.3e},{},{:.4}",
            self.task,
            self.n_mol,
            self.n_metal,
            self.m,
            self.m_split.0,
            self.m_split.1,
            self.m_split.2,
            self.qubits_published,
            self.qubits_ours,
            self.toffoli_published,
            self.toffoli_ours,
            self.rel_delta
        )
    }
}

pub fn relative_delta(ours: f64, published: f64) -> f64 {
    (ours - published) / published
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Table1Comparison {
    pub steps: u64,
    pub rows: Vec<Table1Row>,
}

impl Table1Comparison {
    pub fn qubits_pass(&self) -> bool {
        self.rows.iter().all(Table1Row::qubits_match)
    }

    /// max/min of the computed-to-published Toffoli ratios.
    pub fn ratio_spread(&self) -> f64 {
        let ratios: Vec<f64> = self.rows.iter().map(Table1Row::toffoli_ratio).collect();
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    pub fn toffoli_pass(&self) -> bool {
        self.rows.iter().all(|r| r.toffoli_within_factor(2.0)) && self.ratio_spread() < 2.0
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.csv_line());
            s.push('\n');
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:<16} {:>5} {:>7} {:>9} {:>8} {:>6} {:>10} {:>10} {:>7}\n",
            "task", "n_mol", "n_metal", "modes", "qubits", "ours", "toffoli", "ours", "ratio"
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:<16} {:>5} {:>7} {:>9} {:>8} {:>6} {:>10.3e} {:>10.3e} {:>7.3}\n",
                r.task,
                r.n_mol,
                r.n_metal,
                format!("{}/{}/{}", r.m_split.0, r.m_split.1, r.m_split.2),
                r.qubits_published,
                r.qubits_ours,
                r.toffoli_published,
                r.toffoli_ours as f64,
                r.toffoli_ratio()
            ));
        }
        s.push_str(&format!(
            "qubits {}  toffoli {} (ratio spread {:.3})\n",
            if self.qubits_pass() { "PASS" } else { "FAIL" },
            if self.toffoli_pass() { "PASS" } else { "FAIL" },
            self.ratio_spread()
        ));
        s
    }
}

/// Estimate all nine application instances at `steps` Trotter steps.
pub fn table1_harness(steps: u64) -> Result<Table1Comparison> {
    let reports = exec::map(&TABLE1, |row| estimate(&EstimateRequest::preset(row.preset, steps)));
    let rows = TABLE1
        .iter()
        .zip(reports)
        .map(|(row, rep)| rep.map(|rep| Table1Row::new(row, &rep)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1Comparison { steps, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_match_has_zero_delta() {
        assert_eq!(relative_delta(2.3e7, 2.3e7), 0.0);
        assert!((relative_delta(4.6e7, 2.3e7) - 1.0).abs() < 1e-15);
    }
}
