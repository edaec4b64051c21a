use super::{Coefficient, GanModel, LeadPartition, MetalSpec, PotentialTables};
use crate::error::{Error, Result};

/// Double every molecular and metal orbital into an (α, β) pair.
///
/// Spin orbital `2p + σ` of each block carries spatial orbital `p`. Hopping
/// and molecule-metal couplings conserve spin; V couples all spin pairs.
pub fn expand_spinful(model: &GanModel) -> Result<GanModel> {
    if model.spinful {
        return Err(Error::AlreadySpinful);
    }
    let n_mol = model.n_mol;
    let spin_index = |p: usize, s: usize| if p < n_mol { 2 * p + s } else { 2 * n_mol + 2 * (p - n_mol) + s };

    let mut alpha = Vec::with_capacity(2 * model.potentials.alpha.len());
    for c in &model.potentials.alpha {
        for s in 0..2 {
            alpha.push(Coefficient { i: spin_index(c.i, s), j: spin_index(c.j, s), ..c.clone() });
        }
    }
    let mut beta = Vec::with_capacity(4 * model.potentials.beta.len());
    for c in &model.potentials.beta {
        for s in 0..2 {
            for t in 0..2 {
                beta.push(Coefficient { i: spin_index(c.i, s), j: spin_index(c.j, t), ..c.clone() });
            }
        }
    }

    let doubled = |v: &[usize]| v.iter().flat_map(|&b| [2 * b, 2 * b + 1]).collect::<Vec<_>>();
    let metal = MetalSpec {
        energies: model.metal.energies.iter().flat_map(|&e| [e, e]).collect(),
        mu: model.metal.mu,
        temperature: model.metal.temperature,
        leads: model.metal.leads.as_ref().map(|l| LeadPartition {
            left: doubled(&l.left),
            right: doubled(&l.right),
            mu_left: l.mu_left,
            mu_right: l.mu_right,
        }),
    };

    Ok(GanModel {
        name: model.name.clone(),
        n_mol: 2 * model.n_mol,
        n_metal: 2 * model.n_metal,
        modes: model.modes.clone(),
        potentials: PotentialTables { alpha, beta, gamma: model.potentials.gamma.clone() },
        basis: model.basis.clone(),
        metal,
        spinful: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_model, ModeKind, NuclearMode};

    fn toy() -> GanModel {
        GanModel {
            name: None,
            n_mol: 2,
            n_metal: 3,
            modes: vec![NuclearMode::new(ModeKind::NonReactive, 3, 1.0)],
            potentials: PotentialTables {
                alpha: vec![Coefficient { i: 0, j: 2, lambda: None, value: 0.4 }],
                beta: vec![Coefficient { i: 1, j: 1, lambda: None, value: 0.3 }],
                gamma: vec![],
            },
            basis: vec![],
            metal: MetalSpec { energies: vec![-1.0, 0.0, 1.0], mu: 0.0, temperature: 0.1, leads: None },
            spinful: false,
        }
    }

    #[test]
    fn doubles_orbital_counts() {
        let s = expand_spinful(&toy()).unwrap();
        assert_eq!((s.n_mol, s.n_metal), (4, 6));
        assert_eq!(s.metal.energies, vec![-1.0, -1.0, 0.0, 0.0, 1.0, 1.0]);
        assert!(validate_model(&s).is_empty());
    }

    #[test]
    fn hopping_is_replicated_per_spin() {
        let s = expand_spinful(&toy()).unwrap();
        let pairs: Vec<_> = s.potentials.alpha.iter().map(|c| (c.i, c.j, c.value)).collect();
        assert_eq!(pairs, vec![(0, 4, 0.4), (1, 5, 0.4)]);
    }

    #[test]
    fn interaction_covers_all_spin_pairs() {
        let s = expand_spinful(&toy()).unwrap();
        let pairs: Vec<_> = s.potentials.beta.iter().map(|c| (c.i, c.j)).collect();
        assert_eq!(pairs, vec![(2, 2), (2, 3), (3, 2), (3, 3)]);
    }

    #[test]
    fn second_expansion_is_rejected() {
        let s = expand_spinful(&toy()).unwrap();
        assert!(matches!(expand_spinful(&s), Err(Error::AlreadySpinful)));
    }
}
