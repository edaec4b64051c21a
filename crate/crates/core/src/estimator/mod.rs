//! Resource estimation: model → fragments → compiled step → report, plus the
//! comparison against the published application table.

mod table;

pub use table::{table1_harness, Table1Comparison, Table1Row, CSV_HEADER};

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::arithmetic::CostModel;
use crate::circuit::{tally, Circuit, NodeKind, Operation, ResourceReport};
use crate::error::{Error, Result};
use crate::fragmentation::{build_fragments, Fragment};
use crate::model::{build_preset, load_model, model_hash, random_model, GanModel, Preset, ToySpec};
use crate::trotter::{build_step_with, BuildOptions, CompiledStep, LoadScaling, StepRegisters};

/// Time step used when none is given; costs do not depend on it.
pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_STEPS: u64 = 1000;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    Preset { preset: Preset, seed: u64 },
    Toy { spec: ToySpec, seed: u64 },
    File(PathBuf),
    Inline(Box<GanModel>),
}

impl ModelSource {
    pub fn resolve(&self) -> Result<GanModel> {
        match self {
            ModelSource::Preset { preset, seed } => Ok(build_preset(*preset, *seed)),
            ModelSource::Toy { spec, seed } => Ok(random_model(spec, *seed)),
            ModelSource::File(path) => load_model(path),
            ModelSource::Inline(m) => Ok((**m).clone()),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct EstimateRequest {
    pub source: ModelSource,
    pub steps: u64,
    pub dt: f64,
    pub cost_model: CostModel,
}

impl EstimateRequest {
    pub fn preset(preset: Preset, steps: u64) -> Self {
        Self {
            source: ModelSource::Preset { preset, seed: 0 },
            steps,
            dt: DEFAULT_DT,
            cost_model: CostModel::default(),
        }
    }
}

/// Counts that make the two structural optimizations checkable.
#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureCounts {
    pub fragments: usize,
    pub basis_functions: usize,
    pub analytic_functions: usize,
    pub qrom_loads: u64,
    /// Product-into-phase-gradient blocks, one per (basis function, fragment) incidence.
    pub multiply_accumulates: u64,
    pub basis_incidences: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub model: String,
    pub model_hash: String,
    pub cost_model_hash: String,
    pub dt: f64,
    pub n_mol: usize,
    pub n_metal: usize,
    pub mode_split: (usize, usize, usize),
    pub resources: ResourceReport,
    pub structure: StructureCounts,
}

/// Number of `PhaseGradientAdd` nodes fed by the product register.
pub fn multiply_accumulates(circuit: &Circuit, regs: &StepRegisters) -> u64 {
    circuit
        .nodes()
        .iter()
        .filter(|n| matches!(n.op, Operation::PhaseGradientAdd { source, .. } if source == regs.product))
        .count() as u64
}

/// One Trotter step compiled with the cost model's layout and formulas.
pub fn compile_step(model: &GanModel, fragments: &[Fragment], dt: f64, cost_model: &CostModel) -> Result<CompiledStep> {
    let opts = BuildOptions {
        dt,
        layout: cost_model.layout,
        formulas: cost_model.formulas.clone(),
        loads: LoadScaling::Phase,
        strict_values: false,
    };
    build_step_with(model, fragments, &opts)
}

pub fn estimate_model(model: &GanModel, steps: u64, dt: f64, cost_model: &CostModel) -> Result<EstimateReport> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let fragments = build_fragments(model)?;
    let mut step = compile_step(model, &fragments, dt, cost_model)?;
    step.circuit.set_repetitions(steps);
    let resources = tally(&step.circuit)?;
    let structure = StructureCounts {
        fragments: fragments.len(),
        basis_functions: model.basis.len(),
        analytic_functions: model.basis.iter().filter(|f| f.is_analytic()).count(),
        qrom_loads: resources.count(NodeKind::QromLoad),
        multiply_accumulates: multiply_accumulates(&step.circuit, &step.registers),
        basis_incidences: step.plan.basis_incidences(),
    };
    Ok(EstimateReport {
        model: model.name.clone().unwrap_or_else(|| "unnamed".into()),
        model_hash: model_hash(model),
        cost_model_hash: cost_model.hash(),
        dt,
        n_mol: model.n_mol,
        n_metal: model.n_metal,
        mode_split: model.mode_split(),
        resources,
        structure,
    })
}

pub fn estimate(request: &EstimateRequest) -> Result<EstimateReport> {
    let model = request.source.resolve()?;
    estimate_model(&model, request.steps, request.dt, &request.cost_model)
}

impl EstimateReport {
    /// Plain-text summary.
    pub fn to_text(&self) -> String {
        let r = &self.resources;
        let mut s = String::new();
        s.push_str(&format!("model            {}\n", self.model));
        s.push_str(&format!("model hash       {}\n", self.model_hash));
        s.push_str(&format!("cost model hash  {}\n", self.cost_model_hash));
        s.push_str(&format!("orbitals         {} mol + {} metal\n", self.n_mol, self.n_metal));
        s.push_str(&format!("modes            {:?}\n", self.mode_split));
        s.push_str(&format!("system qubits    {}\n", r.system_qubits));
        s.push_str(&format!("ancilla qubits   {}\n", r.ancilla_qubits));
        s.push_str(&format!("total qubits     {}\n", r.total_qubits));
        s.push_str(&format!("toffoli/step     {}\n", r.toffoli_per_step));
        s.push_str(&format!("steps            {}\n", r.steps));
        s.push_str(&format!("toffoli total    {:.3e}\n", r.toffoli_total as f64));
        s.push_str(&format!("rotations/step   {}\n", r.rotations_per_step));
        s.push_str("breakdown (per step)\n");
        for (kind, t) in &r.breakdown {
            s.push_str(&format!("  {:<20} {:>8} nodes {:>12} toffoli\n", kind.to_string(), t.count, t.toffoli));
        }
        s
    }
}
