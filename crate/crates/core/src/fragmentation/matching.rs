use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchingScope {
    Molecular,
    Interaction,
}

/// A set of vertex-disjoint orbital pairs `(i, j)` in global indices.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub index: usize,
    pub scope: MatchingScope,
    pub pairs: Vec<(usize, usize)>,
}

/// Round-robin 1-factorization of the complete graph on `n_mol` vertices.
/// Odd `n_mol` gets a dummy vertex whose edges are dropped, so every
/// matching then leaves one vertex out. Fewer than two vertices have no edges.
pub fn molecular_matchings(n_mol: usize) -> Vec<Matching> {
    if n_mol < 2 {
        return Vec::new();
    }
    let n = n_mol + n_mol % 2;
    let modulus = n - 1;
    (0..modulus)
        .map(|s| {
            let mut pairs: Vec<(usize, usize)> =
                (1..n / 2).map(|k| ((s + k) % modulus, (s + modulus - k) % modulus)).collect();
            if n - 1 < n_mol {
                pairs.push((s, n - 1));
            }
            Matching { index: s, scope: MatchingScope::Molecular, pairs }
        })
        .collect()
}

/// Cyclic-shift decomposition of the complete bipartite molecule-metal graph.
pub fn interaction_matchings(n_mol: usize, n_metal: usize) -> Result<Vec<Matching>> {
    if n_mol > n_metal {
        return Err(Error::MolExceedsMetal { n_mol, n_metal });
    }
    Ok((0..n_metal)
        .map(|s| Matching {
            index: s,
            scope: MatchingScope::Interaction,
            pairs: (0..n_mol).map(|i| (i, n_mol + (i + s) % n_metal)).collect(),
        })
        .collect())
}

/// Cyclic shifts over the molecular side, for models with more molecular
/// than metal orbitals.
pub(crate) fn interaction_matchings_any(n_mol: usize, n_metal: usize) -> Vec<Matching> {
    if n_mol <= n_metal {
        return interaction_matchings(n_mol, n_metal).expect("size checked");
    }
    (0..n_mol)
        .map(|s| {
            let mut pairs: Vec<(usize, usize)> = (0..n_metal).map(|b| ((b + s) % n_mol, n_mol + b)).collect();
            pairs.sort_unstable();
            Matching { index: s, scope: MatchingScope::Interaction, pairs }
        })
        .collect()
}
