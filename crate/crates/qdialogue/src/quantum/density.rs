//! Density matrices for reduced subsystems.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::StateVector;

/// A density matrix: Hermitian, trace 1, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub(crate) fn from_entries(entries: DMatrix<Complex64>) -> DensityMatrix {
        debug_assert_eq!(entries.nrows(), entries.ncols());
        DensityMatrix { entries }
    }

    /// ρ = |ψ⟩⟨ψ| for a pure state.
    pub fn from_pure(state: &StateVector) -> DensityMatrix {
        let amps = state.amplitudes();
        let dim = amps.len();
        let entries = DMatrix::from_fn(dim, dim, |i, j| amps[i] * amps[j].conj());
        DensityMatrix { entries }
    }

    /// I/d on a d-dimensional system.
    pub fn maximally_mixed(dim: usize) -> DensityMatrix {
        let entries = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(1.0 / dim as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        DensityMatrix { entries }
    }

    /// Equal-weight mixture of several density matrices.
    pub fn uniform_mixture(parts: &[DensityMatrix]) -> DensityMatrix {
        assert!(!parts.is_empty());
        let dim = parts[0].dimension();
        let mut entries = DMatrix::zeros(dim, dim);
        let w = Complex64::new(1.0 / parts.len() as f64, 0.0);
        for p in parts {
            entries += p.entries.clone() * w;
        }
        DensityMatrix { entries }
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Largest entrywise deviation |ρ_ij − σ_ij|.
    pub fn max_deviation_from(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dimension(), other.dimension());
        let mut max = 0.0f64;
        for i in 0..self.dimension() {
            for j in 0..self.dimension() {
                max = max.max((self.entries[(i, j)] - other.entries[(i, j)]).norm());
            }
        }
        max
    }

    /// Largest entrywise deviation of ρ − ρ† from zero.
    pub fn hermiticity_defect(&self) -> f64 {
        let diff = &self.entries - self.entries.adjoint();
        diff.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue; the matrix is treated as Hermitian.
    pub fn min_eigenvalue(&self) -> f64 {
        self.entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &e| m.min(e))
    }

    /// ⟨ψ|ρ|ψ⟩ for a pure reference state of matching dimension.
    pub fn fidelity_with_pure(&self, state: &StateVector) -> f64 {
        let amps = state.amplitudes();
        assert_eq!(amps.len(), self.dimension());
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..amps.len() {
            for j in 0..amps.len() {
                sum += amps[i].conj() * self.entries[(i, j)] * amps[j];
            }
        }
        sum.re
    }

    /// Tensor product self ⊗ other.
    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            entries: self.entries.kronecker(&other.entries),
        }
    }
}
