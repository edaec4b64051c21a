use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::GanModel;

/// Largest statevector dimension.
pub const STATE_DIM_LIMIT: usize = 1 << 20;
/// Largest dimension for dense operators.
pub const DENSE_DIM_LIMIT: usize = 4096;

/// Basis layout: index `e · G + g`, `e` the Jordan-Wigner occupation bits and
/// `g` the row-major index of the unsigned grid register values (mode 0
/// slowest).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateLayout {
    pub n_elec: usize,
    pub grid_points: Vec<usize>,
}

impl StateLayout {
    pub fn of(model: &GanModel) -> Result<Self> {
        let layout =
            Self { n_elec: model.n_orbitals(), grid_points: model.modes.iter().map(|m| m.grid_points()).collect() };
        let dim = layout.checked_dim().unwrap_or(usize::MAX);
        if dim > STATE_DIM_LIMIT {
            return Err(Error::DimensionTooLarge { dim, limit: STATE_DIM_LIMIT });
        }
        Ok(layout)
    }

    fn checked_dim(&self) -> Option<usize> {
        let e = 1usize.checked_shl(self.n_elec as u32)?;
        self.grid_points.iter().try_fold(e, |acc, &k| acc.checked_mul(k))
    }

    pub fn elec_size(&self) -> usize {
        1 << self.n_elec
    }

    pub fn grid_size(&self) -> usize {
        self.grid_points.iter().product()
    }

    pub fn dim(&self) -> usize {
        self.elec_size() * self.grid_size()
    }

    pub fn index(&self, e: usize, g: usize) -> usize {
        e * self.grid_size() + g
    }

    /// Distance in `g` between neighbouring values of mode `k`.
    pub fn mode_stride(&self, k: usize) -> usize {
        self.grid_points[k + 1..].iter().product()
    }

    pub fn grid_index(&self, u: &[usize]) -> usize {
        u.iter().zip(&self.grid_points).fold(0, |acc, (&x, &k)| acc * k + x)
    }

    pub fn grid_coords(&self, mut g: usize) -> Vec<usize> {
        let mut u = vec![0; self.grid_points.len()];
        for k in (0..u.len()).rev() {
            u[k] = g % self.grid_points[k];
            g /= self.grid_points[k];
        }
        u
    }

    /// Signed grid labels of every grid index, one vector per mode.
    pub fn labels(&self, model: &GanModel) -> Vec<Vec<i64>> {
        (0..self.grid_size())
            .map(|g| self.grid_coords(g).iter().zip(&model.modes).map(|(&u, m)| m.label_of(u)).collect())
            .collect()
    }

    pub(crate) fn dense_check(&self) -> Result<usize> {
        let dim = self.dim();
        if dim > DENSE_DIM_LIMIT {
            return Err(Error::DimensionTooLarge { dim, limit: DENSE_DIM_LIMIT });
        }
        Ok(dim)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub layout: StateLayout,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(layout: StateLayout) -> Self {
        let dim = layout.dim();
        Self { layout, amps: vec![Complex64::new(0.0, 0.0); dim] }
    }

    pub fn basis(layout: StateLayout, e: usize, g: usize) -> Self {
        let mut s = Self::zeros(layout);
        let i = s.layout.index(e, g);
        s.amps[i] = Complex64::new(1.0, 0.0);
        s
    }

    /// `|e⟩ ⊗ χ_0 ⊗ χ_1 ⊗ …` with one wavefunction per mode, indexed by the
    /// unsigned register value.
    pub fn product(layout: StateLayout, e: usize, modes: &[Vec<Complex64>]) -> Result<Self> {
        if modes.len() != layout.grid_points.len() || modes.iter().zip(&layout.grid_points).any(|(m, &k)| m.len() != k)
        {
            return Err(Error::InvalidArgument("mode wavefunctions do not match the grid".into()));
        }
        if e >= layout.elec_size() {
            return Err(Error::InvalidArgument(format!("electronic state {e} out of range")));
        }
        let mut s = Self::zeros(layout);
        let base = s.layout.index(e, 0);
        for g in 0..s.layout.grid_size() {
            let u = s.layout.grid_coords(g);
            s.amps[base + g] = u.iter().zip(modes).map(|(&x, m)| m[x]).product();
        }
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|z| *z /= n);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Probability of each electronic configuration.
    pub fn electronic_probabilities(&self) -> Vec<f64> {
        self.amps.chunks(self.layout.grid_size()).map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect()
    }

    /// Marginal probability of each grid value of mode `k`.
    pub fn mode_probabilities(&self, k: usize) -> Vec<f64> {
        let points = self.layout.grid_points[k];
        let stride = self.layout.mode_stride(k);
        let mut p = vec![0.0; points];
        for (i, z) in self.amps.iter().enumerate() {
            let g = i % self.layout.grid_size();
            p[g / stride % points] += z.norm_sqr();
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_index_round_trip() {
        let l = StateLayout { n_elec: 2, grid_points: vec![4, 8, 2] };
        for g in 0..l.grid_size() {
            assert_eq!(l.grid_index(&l.grid_coords(g)), g);
        }
        assert_eq!(l.mode_stride(0), 16);
        assert_eq!(l.mode_stride(2), 1);
        assert_eq!(l.dim(), 4 * 64);
    }

    #[test]
    fn product_state_is_normalized() {
        let l = StateLayout { n_elec: 1, grid_points: vec![2, 2] };
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = StateVector::product(l, 1, &[vec![h, h], vec![h, -h]]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert_eq!(s.electronic_probabilities().len(), 2);
        assert!((s.mode_probabilities(1)[1] - 0.5).abs() < 1e-15);
    }
}
