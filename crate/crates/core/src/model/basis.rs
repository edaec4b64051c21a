use serde::{Deserialize, Serialize};

use super::{BasisId, NuclearMode};
use crate::error::{Error, Result};

/// Closed-form nuclear potentials that are loaded by table lookup.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
#[serde(tag = "potential", rename_all = "snake_case")]
pub enum AnalyticForm {
    /// `d (1 - exp(-a (q - r)))^2`
    Morse { d: f64, a: f64, r: f64 },
    /// `d exp(-a (q - r))`
    RepulsiveExp { d: f64, a: f64, r: f64 },
    /// `(1 - a)/2 (1 - tanh((q - r) / b)) + a`
    TanhSwitch { a: f64, b: f64, r: f64 },
}

impl AnalyticForm {
    pub fn eval(&self, q: f64) -> f64 {
        match *self {
            AnalyticForm::Morse { d, a, r } => {
                let e = 1.0 - (-a * (q - r)).exp();
                d * e * e
            }
            AnalyticForm::RepulsiveExp { d, a, r } => d * (-a * (q - r)).exp(),
            AnalyticForm::TanhSwitch { a, b, r } => 0.5 * (1.0 - a) * (1.0 - ((q - r) / b).tanh()) + a,
        }
    }

    pub fn parameters_valid(&self) -> bool {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match *self {
            AnalyticForm::Morse { d, a, r } => finite(&[d, a, r]) && d > 0.0 && a > 0.0,
            AnalyticForm::RepulsiveExp { d, a, r } => finite(&[d, a, r]) && a > 0.0,
            AnalyticForm::TanhSwitch { a, b, r } => finite(&[a, b, r]) && b != 0.0 && (0.0..=1.0).contains(&a),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "form", content = "params", rename_all = "snake_case")]
pub enum BasisForm {
    /// Product of `Q_mode^power` factors.
    Monomial { powers: Vec<(usize, u32)> },
    Analytic {
        mode: usize,
        #[serde(flatten)]
        potential: AnalyticForm,
    },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct BasisFunction {
    pub id: BasisId,
    #[serde(flatten)]
    pub form: BasisForm,
}

impl BasisFunction {
    pub fn monomial(id: BasisId, powers: Vec<(usize, u32)>) -> Self {
        Self { id, form: BasisForm::Monomial { powers } }
    }

    pub fn analytic(id: BasisId, mode: usize, potential: AnalyticForm) -> Self {
        Self { id, form: BasisForm::Analytic { mode, potential } }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.form, BasisForm::Analytic { .. })
    }

    pub fn degree(&self) -> u32 {
        match &self.form {
            BasisForm::Monomial { powers } => powers.iter().map(|p| p.1).sum(),
            BasisForm::Analytic { .. } => 0,
        }
    }

    /// Modes the function depends on, ascending and deduplicated.
    pub fn modes(&self) -> Vec<usize> {
        let mut m: Vec<usize> = match &self.form {
            BasisForm::Monomial { powers } => powers.iter().filter(|p| p.1 > 0).map(|p| p.0).collect(),
            BasisForm::Analytic { mode, .. } => vec![*mode],
        };
        m.sort_unstable();
        m.dedup();
        m
    }

    /// Evaluate at positions `q` (one entry per mode).
    pub fn eval_positions(&self, q: &[f64]) -> f64 {
        match &self.form {
            BasisForm::Monomial { powers } => powers.iter().map(|&(k, p)| q[k].powi(p as i32)).product(),
            BasisForm::Analytic { mode, potential } => potential.eval(q[*mode]),
        }
    }
}

/// Evaluate `f` at the grid point with signed labels `x`, using `Q = Δ·x`.
pub fn eval_basis_function(f: &BasisFunction, x: &[i64], modes: &[NuclearMode]) -> Result<f64> {
    for k in f.modes() {
        let mode = modes
            .get(k)
            .ok_or_else(|| Error::InvalidModel(format!("basis function {} refers to missing mode {k}", f.id)))?;
        let label = *x.get(k).ok_or_else(|| Error::InvalidArgument(format!("grid point has no entry for mode {k}")))?;
        if !mode.contains(label) {
            return Err(Error::IndexOutOfGrid { mode: k, label, points: mode.grid_points() });
        }
    }
    let q: Vec<f64> = modes.iter().enumerate().map(|(k, m)| x.get(k).map_or(0.0, |&l| m.position(l))).collect();
    Ok(f.eval_positions(&q))
}
