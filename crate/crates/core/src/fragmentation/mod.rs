//! Partition of the potential into commuting fragments, their matchings and
//! the Clifford circuits that diagonalize them.

mod clifford;
mod fragment;
mod matching;

pub use clifford::{
    diagonalizer_matrix, majorana_pair_action, CliffordDiagonalizer, CliffordGate, MajoranaRotation, DENSE_MODE_LIMIT,
};
pub use fragment::{build_fragments, effective_coefficient, ChannelRecipe, CoefficientTerms, Fragment, FragmentKind};
pub use matching::{interaction_matchings, molecular_matchings, Matching, MatchingScope};
