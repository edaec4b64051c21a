use serde::{Deserialize, Serialize};

use super::matching::interaction_matchings_any;
use super::{molecular_matchings, CliffordDiagonalizer, Matching};
use crate::error::{Error, Result};
use crate::model::{validate_model, Channel, GanModel};

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FragmentKind {
    Diagonal,
    OffDiagonal,
    Kinetic,
}

/// Occupation-dependent coefficient of one channel in the diagonal frame.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub enum CoefficientTerms {
    /// `Σ a_i n_i + Σ_{i<j} b_ij n_i n_j + offset`
    Diagonal { linear: Vec<(usize, f64)>, quadratic: Vec<(usize, usize, f64)>, offset: f64 },
    /// `Σ α_ij (-1)^{n_i} (n_i ⊕ n_j)`
    Parity { pairs: Vec<(usize, usize, f64)> },
}

impl CoefficientTerms {
    pub fn eval(&self, occ: impl Fn(usize) -> bool) -> f64 {
        match self {
            CoefficientTerms::Diagonal { linear, quadratic, offset } => {
                let mut v = *offset;
                for &(i, a) in linear {
                    if occ(i) {
                        v += a;
                    }
                }
                for &(i, j, b) in quadratic {
                    if occ(i) && occ(j) {
                        v += b;
                    }
                }
                v
            }
            CoefficientTerms::Parity { pairs } => pairs
                .iter()
                .map(|&(i, j, a)| match (occ(i), occ(j)) {
                    (true, false) => -a,
                    (false, true) => a,
                    _ => 0.0,
                })
                .sum(),
        }
    }

    pub fn term_count(&self) -> usize {
        match self {
            CoefficientTerms::Diagonal { linear, quadratic, offset } => {
                linear.len() + quadratic.len() + usize::from(*offset != 0.0)
            }
            CoefficientTerms::Parity { pairs } => pairs.len(),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ChannelRecipe {
    pub channel: Channel,
    pub terms: CoefficientTerms,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Fragment {
    pub index: usize,
    pub kind: FragmentKind,
    pub matching: Option<Matching>,
    /// Non-empty channels in canonical order (constant first, then basis ids).
    pub channels: Vec<ChannelRecipe>,
    pub diagonalizer: Option<CliffordDiagonalizer>,
}

impl Fragment {
    pub fn recipe(&self, channel: Channel) -> Option<&CoefficientTerms> {
        self.channels.iter().find(|c| c.channel == channel).map(|c| &c.terms)
    }

    /// `c_s^(λ)(n)`; zero for channels absent from the fragment.
    pub fn coefficient(&self, channel: Channel, occ: impl Fn(usize) -> bool) -> f64 {
        self.recipe(channel).map_or(0.0, |t| t.eval(occ))
    }

    pub fn contains(&self, channel: Channel) -> bool {
        self.recipe(channel).is_some()
    }
}

/// Effective coefficient of `lambda` (or of the constant channel) in
/// `fragment` for occupation bitstring `n`.
pub fn effective_coefficient(model: &GanModel, fragment: &Fragment, lambda: Channel, n: &[bool]) -> Result<f64> {
    if let Some(id) = lambda {
        if model.basis_function(id).is_none() {
            return Err(Error::UnknownBasisId(id));
        }
    }
    if n.len() != model.n_orbitals() {
        return Err(Error::InvalidArgument(format!(
            "occupation has {} bits, model has {} orbitals",
            n.len(),
            model.n_orbitals()
        )));
    }
    Ok(fragment.coefficient(lambda, |i| n[i]))
}

fn diagonal_fragment(model: &GanModel) -> Fragment {
    let alpha = model.alpha_table();
    let beta = model.beta_table();
    let gamma = model.gamma_table();
    let n_mol = model.n_mol;
    let channels = model
        .channels()
        .into_iter()
        .filter_map(|ch| {
            let linear: Vec<(usize, f64)> = (0..n_mol)
                .map(|i| {
                    let a = alpha.get(&(i, i, ch)).copied().unwrap_or(0.0);
                    let b = beta.get(&(i, i, ch)).copied().unwrap_or(0.0);
                    (i, a + b)
                })
                .filter(|t| t.1 != 0.0)
                .collect();
            let quadratic: Vec<(usize, usize, f64)> = (0..n_mol)
                .flat_map(|i| (i + 1..n_mol).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let b =
                        beta.get(&(i, j, ch)).copied().unwrap_or(0.0) + beta.get(&(j, i, ch)).copied().unwrap_or(0.0);
                    (i, j, b)
                })
                .filter(|t| t.2 != 0.0)
                .collect();
            let offset = gamma.get(&ch).copied().unwrap_or(0.0);
            let terms = CoefficientTerms::Diagonal { linear, quadratic, offset };
            (terms.term_count() > 0).then_some(ChannelRecipe { channel: ch, terms })
        })
        .collect();
    Fragment { index: 0, kind: FragmentKind::Diagonal, matching: None, channels, diagonalizer: None }
}

fn offdiagonal_fragment(model: &GanModel, index: usize, matching: Matching) -> Fragment {
    let alpha = model.alpha_table();
    let channels = model
        .channels()
        .into_iter()
        .filter_map(|ch| {
            let pairs: Vec<(usize, usize, f64)> = matching
                .pairs
                .iter()
                .map(|&(i, j)| (i, j, model.hopping(&alpha, i, j, ch)))
                .filter(|t| t.2 != 0.0)
                .collect();
            (!pairs.is_empty()).then_some(ChannelRecipe { channel: ch, terms: CoefficientTerms::Parity { pairs } })
        })
        .collect();
    Fragment {
        index,
        kind: FragmentKind::OffDiagonal,
        diagonalizer: Some(CliffordDiagonalizer::for_matching(&matching)),
        matching: Some(matching),
        channels,
    }
}

/// Fragments in Trotter order: diagonal, molecular matchings, interaction
/// matchings, kinetic.
pub fn build_fragments(model: &GanModel) -> Result<Vec<Fragment>> {
    let violations = validate_model(model);
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::InvalidModel(text.join("; ")));
    }
    let mut out = vec![diagonal_fragment(model)];
    let matchings =
        molecular_matchings(model.n_mol).into_iter().chain(interaction_matchings_any(model.n_mol, model.n_metal));
    for m in matchings {
        let index = out.len();
        out.push(offdiagonal_fragment(model, index, m));
    }
    let index = out.len();
    out.push(Fragment { index, kind: FragmentKind::Kinetic, matching: None, channels: vec![], diagonalizer: None });
    Ok(out)
}
