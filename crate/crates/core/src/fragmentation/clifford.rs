use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Fragment, Matching};
use crate::error::{Error, Result};

/// Largest number of fermionic modes for which dense unitaries are built.
pub const DENSE_MODE_LIMIT: usize = 14;

#[cfg(test)]
const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// `exp(angle · γ_first γ_second)`.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct MajoranaRotation {
    pub first: usize,
    pub second: usize,
    pub angle: f64,
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    Cnot { control: usize, target: usize },
}

/// Product of commuting Majorana-pair rotations, one per matched pair, and
/// its qubit-level gate sequence under Jordan-Wigner (equal up to a global
/// phase).
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CliffordDiagonalizer {
    pub rotations: Vec<MajoranaRotation>,
    pub gates: Vec<CliffordGate>,
}

impl CliffordDiagonalizer {
    pub fn for_matching(m: &Matching) -> Self {
        let rotations: Vec<MajoranaRotation> = m
            .pairs
            .iter()
            .map(|&(i, j)| MajoranaRotation {
                first: 2 * j + 1,
                second: 2 * i + 1,
                angle: -std::f64::consts::FRAC_PI_4,
            })
            .collect();
        let gates = rotations.iter().flat_map(compile_rotation).collect();
        Self { rotations, gates }
    }

    /// Apply to the electronic factor of a state stored as `amps[e * stride + g]`.
    pub fn apply(&self, amps: &mut [Complex64], stride: usize, adjoint: bool) {
        for r in &self.rotations {
            let angle = if adjoint { -r.angle } else { r.angle };
            apply_rotation(amps, stride, r.first, r.second, angle);
        }
    }
}

fn parity_below(e: u64, p: usize) -> bool {
    (e & ((1u64 << p) - 1)).count_ones() % 2 == 1
}

/// `γ_a |e⟩` as `(amplitude, e')`.
fn majorana_action(a: usize, e: u64) -> (Complex64, u64) {
    let p = a / 2;
    let sign = if parity_below(e, p) { -C1 } else { C1 };
    let occupied = e >> p & 1 == 1;
    let amp = if a.is_multiple_of(2) {
        sign
    } else if occupied {
        -CI * sign
    } else {
        CI * sign
    };
    (amp, e ^ (1 << p))
}

/// `γ_a γ_b |e⟩` as `(amplitude, e')`.
pub fn majorana_pair_action(a: usize, b: usize, e: u64) -> (Complex64, u64) {
    let (x, e1) = majorana_action(b, e);
    let (y, e2) = majorana_action(a, e1);
    (x * y, e2)
}

/// Apply `exp(θ γ_a γ_b) = cos θ + sin θ γ_a γ_b` (a ≠ b) to all electronic
/// basis states; each of the `len / stride` blocks is a grid-space vector.
fn apply_rotation(amps: &mut [Complex64], stride: usize, a: usize, b: usize, theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let n_e = amps.len() / stride;
    let mut done = vec![false; n_e];
    for e in 0..n_e {
        if done[e] {
            continue;
        }
        let (amp, f) = majorana_pair_action(a, b, e as u64);
        let f = f as usize;
        let (amp_back, _) = majorana_pair_action(a, b, f as u64);
        done[e] = true;
        done[f] = true;
        for g in 0..stride {
            let x = amps[e * stride + g];
            let y = amps[f * stride + g];
            amps[e * stride + g] = c * x + s * amp_back * y;
            amps[f * stride + g] = c * y + s * amp * x;
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Product of two single-qubit Paulis as `(i^k, P)`.
fn pauli_mul(a: Pauli, b: Pauli) -> (u8, Pauli) {
    use Pauli::*;
    match (a, b) {
        (I, p) | (p, I) => (0, p),
        (X, X) | (Y, Y) | (Z, Z) => (0, I),
        (X, Y) => (1, Z),
        (Y, X) => (3, Z),
        (Y, Z) => (1, X),
        (Z, Y) => (3, X),
        (Z, X) => (1, Y),
        (X, Z) => (3, Y),
    }
}

fn majorana_string(a: usize, n: usize) -> Vec<Pauli> {
    let p = a / 2;
    (0..n)
        .map(|q| match q.cmp(&p) {
            std::cmp::Ordering::Less => Pauli::Z,
            std::cmp::Ordering::Equal => {
                if a.is_multiple_of(2) {
                    Pauli::X
                } else {
                    Pauli::Y
                }
            }
            std::cmp::Ordering::Greater => Pauli::I,
        })
        .collect()
}

/// Gate sequence for `exp(θ γ_a γ_b)` with θ = ±π/4.
fn compile_rotation(r: &MajoranaRotation) -> Vec<CliffordGate> {
    let n = r.first.max(r.second) / 2 + 1;
    let (sa, sb) = (majorana_string(r.first, n), majorana_string(r.second, n));
    let mut k = 0u8;
    let mut p = Vec::with_capacity(n);
    for q in 0..n {
        let (ph, x) = pauli_mul(sa[q], sb[q]);
        k = (k + ph) % 4;
        p.push(x);
    }
    // γ_a γ_b = i^k P with k odd, so exp(θ i^k P) = exp(i φ P), φ = ±θ.
    let phi = if k == 1 { r.angle } else { -r.angle };
    let support: Vec<usize> = (0..n).filter(|&q| p[q] != Pauli::I).collect();
    let Some(&target) = support.last() else {
        return Vec::new();
    };
    let mut gates = Vec::new();
    for &q in &support {
        match p[q] {
            Pauli::X => gates.push(CliffordGate::H(q)),
            Pauli::Y => {
                gates.push(CliffordGate::Sdg(q));
                gates.push(CliffordGate::H(q));
            }
            _ => {}
        }
    }
    let ladder: Vec<CliffordGate> =
        support[..support.len() - 1].iter().map(|&q| CliffordGate::Cnot { control: q, target }).collect();
    gates.extend(ladder.iter().copied());
    // exp(iφZ) equals S† (φ = π/4) or S (φ = -π/4) up to a global phase.
    gates.push(if phi > 0.0 { CliffordGate::Sdg(target) } else { CliffordGate::S(target) });
    gates.extend(ladder.iter().rev().copied());
    for &q in support.iter().rev() {
        match p[q] {
            Pauli::X => gates.push(CliffordGate::H(q)),
            Pauli::Y => {
                gates.push(CliffordGate::H(q));
                gates.push(CliffordGate::S(q));
            }
            _ => {}
        }
    }
    gates
}

fn dense_check(total_modes: usize) -> Result<usize> {
    if total_modes > DENSE_MODE_LIMIT {
        return Err(Error::TooLargeForDense { modes: total_modes, limit: DENSE_MODE_LIMIT });
    }
    Ok(1usize << total_modes)
}

/// Dense `U_s` on the electronic Fock space (identity for fragments
/// without a matching).
pub fn diagonalizer_matrix(fragment: &Fragment, total_modes: usize) -> Result<DMatrix<Complex64>> {
    let dim = dense_check(total_modes)?;
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    if let Some(d) = &fragment.diagonalizer {
        for col in 0..dim {
            let mut v: Vec<Complex64> = u.column(col).iter().copied().collect();
            d.apply(&mut v, 1, false);
            u.set_column(col, &nalgebra::DVector::from_vec(v));
        }
    }
    Ok(u)
}

/// Dense unitary of a gate sequence on `n` qubits (qubit `q` is bit `q`).
#[cfg(test)]
pub(crate) fn gates_matrix(gates: &[CliffordGate], n: usize) -> Result<DMatrix<Complex64>> {
    let dim = dense_check(n)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    for g in gates {
        let mut next = DMatrix::<Complex64>::zeros(dim, dim);
        for col in 0..dim {
            for row in 0..dim {
                let v = u[(row, col)];
                if v == C0 {
                    continue;
                }
                match *g {
                    CliffordGate::H(q) => {
                        let r0 = row & !(1 << q);
                        let r1 = row | (1 << q);
                        let bit = row >> q & 1;
                        next[(r0, col)] += v * h;
                        next[(r1, col)] += v * if bit == 0 { h } else { -h };
                    }
                    CliffordGate::S(q) => next[(row, col)] += if row >> q & 1 == 1 { v * CI } else { v },
                    CliffordGate::Sdg(q) => next[(row, col)] += if row >> q & 1 == 1 { -v * CI } else { v },
                    CliffordGate::Cnot { control, target } => {
                        let r = if row >> control & 1 == 1 { row ^ (1 << target) } else { row };
                        next[(r, col)] += v;
                    }
                }
            }
        }
        u = next;
    }
    Ok(u)
}

/// Dense Jordan-Wigner annihilation operator of mode `p` on `n` modes.
#[cfg(test)]
pub(crate) fn annihilation(p: usize, n: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for e in 0..dim {
        if e >> p & 1 == 1 {
            let sign = if parity_below(e as u64, p) { -1.0 } else { 1.0 };
            a[(e ^ (1 << p), e)] = Complex64::new(sign, 0.0);
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragmentation::{interaction_matchings, molecular_matchings, FragmentKind, MatchingScope};

    fn fragment_for(pairs: Vec<(usize, usize)>) -> Fragment {
        let m = Matching { index: 0, scope: MatchingScope::Molecular, pairs };
        Fragment {
            index: 1,
            kind: FragmentKind::OffDiagonal,
            diagonalizer: Some(CliffordDiagonalizer::for_matching(&m)),
            matching: Some(m),
            channels: vec![],
        }
    }

    fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn equal_up_to_phase(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> bool {
        let r = (0..a.len()).max_by(|&x, &y| a.as_slice()[x].norm().total_cmp(&a.as_slice()[y].norm())).unwrap();
        let phase = b.as_slice()[r] / a.as_slice()[r];
        max_abs(&(a * phase - b)) < 1e-12
    }

    #[test]
    fn empty_matching_is_identity() {
        let f =
            Fragment { index: 0, kind: FragmentKind::Diagonal, matching: None, channels: vec![], diagonalizer: None };
        let u = diagonalizer_matrix(&f, 3).unwrap();
        assert!(max_abs(&(u - DMatrix::identity(8, 8))) == 0.0);
    }

    #[test]
    fn single_pair_hopping_becomes_z_difference() {
        for (i, j) in [(0, 1), (1, 0), (0, 2), (2, 0), (1, 3)] {
            let n = 4;
            let u = diagonalizer_matrix(&fragment_for(vec![(i, j)]), n).unwrap();
            assert!(max_abs(&(&u * u.adjoint() - DMatrix::identity(16, 16))) < 1e-12);
            let (ai, aj) = (annihilation(i, n), annihilation(j, n));
            let hop = ai.adjoint() * &aj + aj.adjoint() * &ai;
            let d = u.adjoint() * hop * &u;
            for e in 0..16usize {
                let zi = if e >> i & 1 == 1 { -1.0 } else { 1.0 };
                let zj = if e >> j & 1 == 1 { -1.0 } else { 1.0 };
                for f in 0..16usize {
                    let expect = if e == f { (zi - zj) / 2.0 } else { 0.0 };
                    assert!((d[(f, e)] - Complex64::new(expect, 0.0)).norm() < 1e-12, "pair ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn gate_sequence_matches_majorana_product() {
        let mut fragments: Vec<Vec<(usize, usize)>> = molecular_matchings(4).into_iter().map(|m| m.pairs).collect();
        fragments.extend(interaction_matchings(2, 3).unwrap().into_iter().map(|m| m.pairs));
        for pairs in fragments {
            let n = 5;
            let f = fragment_for(pairs);
            let u = diagonalizer_matrix(&f, n).unwrap();
            let g = gates_matrix(&f.diagonalizer.as_ref().unwrap().gates, n).unwrap();
            assert!(equal_up_to_phase(&u, &g));
        }
    }

    #[test]
    fn adjoint_application_inverts() {
        let f = fragment_for(vec![(0, 3), (1, 2)]);
        let d = f.diagonalizer.as_ref().unwrap();
        let mut v: Vec<Complex64> = (0..32).map(|k| Complex64::new(k as f64 * 0.1, 1.0 - k as f64 * 0.03)).collect();
        let orig = v.clone();
        d.apply(&mut v, 2, false);
        d.apply(&mut v, 2, true);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dense_limit() {
        let f = fragment_for(vec![(0, 1)]);
        assert!(matches!(diagonalizer_matrix(&f, 15), Err(Error::TooLargeForDense { .. })));
    }
}
