use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use super::RegisterLayout;
use crate::arithmetic::{qrom_table, CostFormulas};
use crate::circuit::{Circuit, CnotSource, NodeId, Operation, QubitRef, RegisterId, RegisterRole};
use crate::error::{Error, Result};
use crate::fragmentation::{CoefficientTerms, Fragment, FragmentKind};
use crate::model::{BasisForm, BasisFunction, Channel, GanModel};

/// How classical coefficients are scaled when loaded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadScaling {
    /// Loaded values are `-dt·c·unit·2^b/(2π)` so that the product lands in
    /// the phase gradient register as a fraction of a turn.
    Phase,
    /// Loaded values are the bare coefficients.
    Plain,
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub dt: f64,
    pub layout: RegisterLayout,
    pub formulas: CostFormulas,
    pub loads: LoadScaling,
    /// Reject constants and table entries that overflow their format
    /// instead of wrapping them.
    pub strict_values: bool,
}

impl BuildOptions {
    pub fn estimator(dt: f64) -> Self {
        Self {
            dt,
            layout: RegisterLayout::default(),
            formulas: CostFormulas::default(),
            loads: LoadScaling::Phase,
            strict_values: false,
        }
    }
}

/// Which fragments each channel appears in, in canonical order.
#[derive(Clone, Debug)]
pub struct TrotterPlan {
    pub dt: f64,
    pub fragments: Vec<Fragment>,
    pub membership: Vec<(Channel, Vec<usize>)>,
    pub layout: RegisterLayout,
}

impl TrotterPlan {
    pub fn new(model: &GanModel, fragments: &[Fragment], dt: f64, layout: RegisterLayout) -> Self {
        let membership = model
            .channels()
            .into_iter()
            .map(|ch| (ch, fragments.iter().filter(|f| f.contains(ch)).map(|f| f.index).collect::<Vec<_>>()))
            .filter(|(_, s)| !s.is_empty())
            .collect();
        Self { dt, fragments: fragments.to_vec(), membership, layout }
    }

    /// Number of (basis function, fragment) incidences.
    pub fn basis_incidences(&self) -> usize {
        self.membership.iter().filter(|(ch, _)| ch.is_some()).map(|(_, s)| s.len()).sum()
    }
}

#[derive(Clone, Debug)]
pub struct StepRegisters {
    pub mol: RegisterId,
    pub metal: RegisterId,
    pub grid: Vec<RegisterId>,
    pub phase: RegisterId,
    pub function: RegisterId,
    pub accumulator: RegisterId,
    pub load: RegisterId,
    pub parity: RegisterId,
    pub flag: RegisterId,
    pub product: RegisterId,
}

pub struct CompiledStep {
    pub circuit: Circuit,
    pub plan: TrotterPlan,
    pub registers: StepRegisters,
}

/// Physical value of one unit of a basis function's register content.
pub fn channel_unit(f: &BasisFunction, model: &GanModel, layout: &RegisterLayout) -> f64 {
    match &f.form {
        BasisForm::Monomial { powers } => {
            powers.iter().map(|&(k, p)| model.modes[k].spacing().powi(p as i32)).product()
        }
        BasisForm::Analytic { .. } => 1.0 / layout.function.scale(),
    }
}

struct StepBuilder<'a> {
    model: &'a GanModel,
    opts: &'a BuildOptions,
    circuit: Circuit,
    regs: StepRegisters,
    temps: Vec<RegisterId>,
    squares: HashMap<usize, RegisterId>,
}

impl<'a> StepBuilder<'a> {
    fn new(model: &'a GanModel, opts: &'a BuildOptions) -> Result<Self> {
        let mut c = Circuit::new(opts.formulas.clone());
        let l = &opts.layout;
        let mol = c.declare("mol", model.n_mol as u32, RegisterRole::MolElectronic)?;
        let metal = c.declare("metal", model.n_metal as u32, RegisterRole::MetalElectronic)?;
        let grid = model
            .modes
            .iter()
            .enumerate()
            .map(|(k, m)| c.declare(&format!("x{k}"), m.grid_qubits, RegisterRole::NuclearGrid(k)))
            .collect::<Result<Vec<_>>>()?;
        let phase = c.declare("phase", l.phase_bits, RegisterRole::PhaseGradient)?;
        let function = c.declare("f", l.function.total_bits, RegisterRole::FunctionValue)?;
        let accumulator = c.declare("acc", l.coefficient.total_bits, RegisterRole::Coefficient)?;
        let load = c.declare("load", l.load_bits, RegisterRole::Workspace)?;
        let parity = c.declare("parity", 1, RegisterRole::Workspace)?;
        let flag = c.declare("flag", 1, RegisterRole::Workspace)?;
        let product = c.declare("prod", l.product_bits, RegisterRole::Workspace)?;
        c.acquire(phase)?;
        Ok(Self {
            model,
            opts,
            circuit: c,
            regs: StepRegisters { mol, metal, grid, phase, function, accumulator, load, parity, flag, product },
            temps: Vec::new(),
            squares: HashMap::new(),
        })
    }

    fn qubit(&self, p: usize) -> QubitRef {
        if p < self.model.n_mol {
            QubitRef { register: self.regs.mol, bit: p as u32 }
        } else {
            QubitRef { register: self.regs.metal, bit: (p - self.model.n_mol) as u32 }
        }
    }

    fn bit(reg: RegisterId) -> QubitRef {
        QubitRef { register: reg, bit: 0 }
    }

    fn load_constant(&mut self, raw: i64, control: Option<QubitRef>) -> Result<NodeId> {
        self.circuit
            .compute(Operation::CnotLayer { source: CnotSource::Constant { raw, control }, target: self.regs.load })
    }

    /// Add one term `±raw` into the accumulator; `reverse` subtracts it again.
    fn term(&mut self, raw: i64, kind: LoadTerm, reverse: Option<NodeId>) -> Result<Option<NodeId>> {
        let (acc, load) = (self.regs.accumulator, self.regs.load);
        self.circuit.acquire(load)?;
        let mut undo = Vec::new();
        match kind {
            LoadTerm::Constant => undo.push(self.load_constant(raw, None)?),
            LoadTerm::Linear(i) => {
                let q = self.qubit(i);
                undo.push(self.load_constant(raw, Some(q))?);
            }
            LoadTerm::Product(i, j) => {
                self.circuit.acquire(self.regs.flag)?;
                let t = Self::bit(self.regs.flag);
                let (a, b) = (self.qubit(i), self.qubit(j));
                undo.push(self.circuit.compute(Operation::ToffoliGate { a, b, target: t })?);
                undo.push(self.load_constant(raw, Some(t))?);
            }
            LoadTerm::Parity(i, j) => {
                self.circuit.acquire(self.regs.parity)?;
                let t = Self::bit(self.regs.parity);
                let (a, b) = (self.qubit(i), self.qubit(j));
                undo.push(self.circuit.compute(Operation::ParityCompute { a, b, target: t })?);
                undo.push(self.load_constant(raw, Some(t))?);
                let ctrl = self.qubit(i);
                undo.push(self.circuit.compute(Operation::Negate { target: load, control: ctrl })?);
            }
        }
        let added = match reverse {
            None => Some(self.circuit.compute(Operation::Adder { source: load, target: acc })?),
            Some(node) => {
                self.circuit.uncompute(node)?;
                None
            }
        };
        for node in undo.into_iter().rev() {
            self.circuit.uncompute(node)?;
        }
        match kind {
            LoadTerm::Product(..) => self.circuit.release(self.regs.flag)?,
            LoadTerm::Parity(..) => self.circuit.release(self.regs.parity)?,
            _ => {}
        }
        self.circuit.release(load)?;
        Ok(added)
    }

    /// Accumulate `c_s(n)` into the accumulator; returns the adder nodes.
    fn accumulate(&mut self, fragment: &Fragment, channel: Channel) -> Result<Vec<(NodeId, i64, LoadTerm)>> {
        let terms = load_terms(self.model, fragment, channel, self.opts)?;
        let mut added = Vec::with_capacity(terms.len());
        for (raw, kind) in terms {
            let node = self.term(raw, kind, None)?.expect("forward terms add");
            added.push((node, raw, kind));
        }
        Ok(added)
    }

    fn unaccumulate(&mut self, added: Vec<(NodeId, i64, LoadTerm)>) -> Result<()> {
        for (node, raw, kind) in added.into_iter().rev() {
            self.term(raw, kind, Some(node))?;
        }
        Ok(())
    }

    /// One (channel, fragment) incidence: diagonalize, accumulate, kick the
    /// phase, and undo everything but the phase.
    fn incidence(&mut self, fragment: &Fragment, channel: Channel) -> Result<()> {
        let clifford = match (&fragment.kind, &fragment.diagonalizer) {
            (FragmentKind::OffDiagonal, Some(d)) => Some(self.circuit.compute(Operation::CliffordLayer {
                fragment: fragment.index,
                gates: d.gates.len(),
                inverse: false,
            })?),
            _ => None,
        };
        let acc = self.regs.accumulator;
        self.circuit.acquire(acc)?;
        let added = self.accumulate(fragment, channel)?;
        let phase = self.regs.phase;
        match channel {
            None => {
                self.circuit.action(Operation::PhaseGradientAdd { source: acc, target: phase })?;
            }
            Some(_) => {
                let prod = self.regs.product;
                self.circuit.acquire(prod)?;
                let shift = self.opts.layout.coefficient.fraction_bits;
                let m = self.circuit.compute(Operation::OutOfPlaceMultiply {
                    a: self.regs.function,
                    b: acc,
                    target: prod,
                    shift,
                })?;
                self.circuit.action(Operation::PhaseGradientAdd { source: prod, target: phase })?;
                self.circuit.uncompute(m)?;
                self.circuit.release(prod)?;
            }
        }
        self.unaccumulate(added)?;
        self.circuit.release(acc)?;
        if let Some(c) = clifford {
            self.circuit.uncompute(c)?;
        }
        Ok(())
    }

    fn temp(&mut self, n: usize) -> Result<RegisterId> {
        while self.temps.len() <= n {
            let name = format!("ftmp{}", self.temps.len());
            let id = self.circuit.declare(&name, self.opts.layout.function.total_bits, RegisterRole::Workspace)?;
            self.temps.push(id);
        }
        Ok(self.temps[n])
    }

    /// Compute the basis function into the function register; returns the
    /// nodes and temporaries to undo, innermost last.
    fn compute_function(&mut self, f: &BasisFunction) -> Result<(Vec<NodeId>, Vec<RegisterId>)> {
        let target = self.regs.function;
        let mut nodes = Vec::new();
        let mut temps = Vec::new();
        match &f.form {
            BasisForm::Analytic { mode, .. } => {
                let table = analytic_table(self.model, f, self.opts)?;
                let cap = self.opts.layout.qrom_ancilla_cap(&self.opts.formulas);
                nodes.push(self.circuit.compute(Operation::QromLoad {
                    address: self.regs.grid[*mode],
                    target,
                    table: Arc::new(table),
                    max_ancilla: Some(cap),
                })?);
            }
            BasisForm::Monomial { powers } => {
                let factors: Vec<usize> =
                    powers.iter().flat_map(|&(k, p)| std::iter::repeat_n(k, p as usize)).collect();
                let grid = self.regs.grid.clone();
                let x = |k: usize| grid[k];
                match factors.as_slice() {
                    [] => return Err(Error::InvalidModel(format!("basis function {} is constant", f.id))),
                    [a] => nodes.push(
                        self.circuit.compute(Operation::CnotLayer { source: CnotSource::Register(x(*a)), target })?,
                    ),
                    [a, rest @ ..] => {
                        let mut current = x(*a);
                        let mut rest = rest.to_vec();
                        if rest[0] == *a {
                            rest.remove(0);
                            let dst = if rest.is_empty() { target } else { self.new_temp(&mut temps)? };
                            nodes.push(self.circuit.compute(Operation::Square { source: x(*a), target: dst })?);
                            current = dst;
                        }
                        let last = rest.len();
                        for (n, &k) in rest.iter().enumerate() {
                            let dst = if n + 1 == last { target } else { self.new_temp(&mut temps)? };
                            nodes.push(self.circuit.compute(Operation::OutOfPlaceMultiply {
                                a: current,
                                b: x(k),
                                target: dst,
                                shift: 0,
                            })?);
                            current = dst;
                        }
                    }
                }
            }
        }
        Ok((nodes, temps))
    }

    fn new_temp(&mut self, temps: &mut Vec<RegisterId>) -> Result<RegisterId> {
        let t = self.temp(temps.len())?;
        self.circuit.acquire(t)?;
        temps.push(t);
        Ok(t)
    }

    fn kinetic(&mut self) -> Result<()> {
        let dt = self.opts.dt;
        for (k, mode) in self.model.modes.iter().enumerate() {
            let x = self.regs.grid[k];
            let sq = match self.squares.get(&k) {
                Some(&r) => r,
                None => {
                    let r = self.circuit.declare(&format!("psq{k}"), 2 * mode.grid_qubits, RegisterRole::Workspace)?;
                    self.squares.insert(k, r);
                    r
                }
            };
            let qft = self.circuit.compute(Operation::Qft { register: x })?;
            self.circuit.acquire(sq)?;
            let s = self.circuit.compute(Operation::Square { source: x, target: sq })?;
            self.circuit.action(Operation::PhaseGradientAdd { source: sq, target: self.regs.phase })?;
            self.circuit.uncompute(s)?;
            self.circuit.release(sq)?;
            self.circuit.uncompute(qft)?;
        }
        for b in 0..self.model.n_metal {
            let angle = self.model.metal.energies[b] * dt;
            self.circuit.action(Operation::RzRotation {
                qubit: QubitRef { register: self.regs.metal, bit: b as u32 },
                angle,
            })?;
        }
        Ok(())
    }

    fn build(mut self, plan: &TrotterPlan) -> Result<CompiledStep> {
        for (channel, members) in &plan.membership {
            let (undo, temps) = match channel {
                Some(id) => {
                    let f = self.model.basis_function(*id).ok_or(Error::UnknownBasisId(*id))?.clone();
                    self.circuit.acquire(self.regs.function)?;
                    self.compute_function(&f)?
                }
                None => (Vec::new(), Vec::new()),
            };
            for &s in members {
                let fragment = &plan.fragments[s];
                self.incidence(fragment, *channel)?;
            }
            for node in undo.into_iter().rev() {
                self.circuit.uncompute(node)?;
            }
            for t in temps.into_iter().rev() {
                self.circuit.release(t)?;
            }
            if channel.is_some() {
                self.circuit.release(self.regs.function)?;
            }
        }
        self.kinetic()?;
        Ok(CompiledStep { circuit: self.circuit, plan: plan.clone(), registers: self.regs })
    }
}

/// One classical constant added into the accumulator, with its control.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadTerm {
    Constant,
    /// Controlled on `n_i`.
    Linear(usize),
    /// Controlled on `n_i n_j`.
    Product(usize, usize),
    /// Controlled on `n_i ⊕ n_j`, negated when `n_i = 1`.
    Parity(usize, usize),
}

impl LoadTerm {
    /// Signed multiplier of the loaded constant for occupation `n`.
    pub fn sign(self, n: impl Fn(usize) -> bool) -> i64 {
        match self {
            LoadTerm::Constant => 1,
            LoadTerm::Linear(i) => n(i) as i64,
            LoadTerm::Product(i, j) => (n(i) && n(j)) as i64,
            LoadTerm::Parity(i, j) => match (n(i), n(j)) {
                (true, false) => -1,
                (false, true) => 1,
                _ => 0,
            },
        }
    }
}

/// Register contents of a table-loaded basis function, indexed by the
/// unsigned grid register value of its mode.
pub fn analytic_table(model: &GanModel, f: &BasisFunction, opts: &BuildOptions) -> Result<Vec<i64>> {
    let fmt = opts.layout.function;
    if opts.strict_values {
        return qrom_table(f, &model.modes, fmt);
    }
    let BasisForm::Analytic { mode, potential } = &f.form else {
        return Err(Error::NotAnalytic(f.id));
    };
    let m = &model.modes[*mode];
    Ok((0..m.grid_points()).map(|u| fmt.quantize_wrapping(potential.eval(m.position(m.label_of(u))))).collect())
}

/// Scale applied to every coefficient of `channel` before loading.
pub fn load_scale(model: &GanModel, channel: Channel, opts: &BuildOptions) -> f64 {
    match opts.loads {
        LoadScaling::Plain => 1.0,
        LoadScaling::Phase => {
            let turns = -opts.dt * (opts.layout.phase_bits as f64).exp2() / (2.0 * PI);
            match channel {
                None => turns / opts.layout.coefficient.scale(),
                Some(id) => match model.basis_function(id) {
                    Some(f) => turns * channel_unit(f, model, &opts.layout),
                    None => f64::NAN,
                },
            }
        }
    }
}

fn quantize(opts: &BuildOptions, value: f64) -> Result<i64> {
    let fmt = opts.layout.coefficient;
    if opts.strict_values {
        fmt.quantize(value)
            .ok_or_else(|| Error::InvalidArgument(format!("coefficient {value} overflows the accumulator format")))
    } else {
        Ok(fmt.quantize_wrapping(value))
    }
}

/// Raw constants loaded while accumulating `c_s` of `channel`, in circuit order.
pub fn load_terms(
    model: &GanModel,
    fragment: &Fragment,
    channel: Channel,
    opts: &BuildOptions,
) -> Result<Vec<(i64, LoadTerm)>> {
    if let Some(id) = channel {
        model.basis_function(id).ok_or(Error::UnknownBasisId(id))?;
    }
    let Some(recipe) = fragment.recipe(channel) else {
        return Ok(Vec::new());
    };
    let scale = load_scale(model, channel, opts);
    let mut out = Vec::new();
    match recipe {
        CoefficientTerms::Diagonal { linear, quadratic, offset } => {
            for &(i, a) in linear {
                out.push((quantize(opts, a * scale)?, LoadTerm::Linear(i)));
            }
            for &(i, j, b) in quadratic {
                out.push((quantize(opts, b * scale)?, LoadTerm::Product(i, j)));
            }
            if *offset != 0.0 {
                out.push((quantize(opts, offset * scale)?, LoadTerm::Constant));
            }
        }
        CoefficientTerms::Parity { pairs } => {
            for &(i, j, a) in pairs {
                out.push((quantize(opts, a * scale)?, LoadTerm::Parity(i, j)));
            }
        }
    }
    Ok(out)
}

/// Compile one Trotter step with explicit options.
pub fn build_step_with(model: &GanModel, fragments: &[Fragment], opts: &BuildOptions) -> Result<CompiledStep> {
    let plan = TrotterPlan::new(model, fragments, opts.dt, opts.layout);
    StepBuilder::new(model, opts)?.build(&plan)
}

/// Compile one Trotter step with the estimator's calibrated layout.
pub fn build_step(model: &GanModel, fragments: &[Fragment], dt: f64) -> Result<Circuit> {
    Ok(build_step_with(model, fragments, &BuildOptions::estimator(dt))?.circuit)
}

/// `steps` repetitions of one step.
pub fn build_evolution(model: &GanModel, fragments: &[Fragment], dt: f64, steps: u64) -> Result<Circuit> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let mut c = build_step(model, fragments, dt)?;
    c.set_repetitions(steps);
    Ok(c)
}

/// Stand-alone accumulation of one channel of one fragment, followed by its
/// reversal. Nodes `0..midpoint` leave `c_s(n)` in the accumulator.
pub struct AccumulationCircuit {
    pub circuit: Circuit,
    pub registers: StepRegisters,
    pub midpoint: usize,
    /// Loaded raw constants with their sign convention, in order.
    pub loads: Vec<i64>,
}

pub fn accumulate_coefficient(
    model: &GanModel,
    fragment: &Fragment,
    channel: Channel,
    opts: &BuildOptions,
) -> Result<AccumulationCircuit> {
    if fragment.kind == FragmentKind::Kinetic {
        return Err(Error::InvalidArgument("the kinetic fragment has no coefficient accumulation".into()));
    }
    let mut b = StepBuilder::new(model, opts)?;
    b.circuit.acquire(b.regs.accumulator)?;
    let added = b.accumulate(fragment, channel)?;
    let midpoint = b.circuit.nodes().len();
    let loads = added.iter().map(|a| a.1).collect();
    b.unaccumulate(added)?;
    b.circuit.release(b.regs.accumulator)?;
    Ok(AccumulationCircuit { circuit: b.circuit, registers: b.regs, midpoint, loads })
}
