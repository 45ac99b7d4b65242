use nalgebra::{DMatrix, SymmetricEigen};

use super::SparseOperator;
use crate::{Error, Result, C64};

/// Tolerances of a valid density matrix.
pub(crate) const TRACE_TOL: f64 = 1e-9;
pub(crate) const HERMITICITY_TOL: f64 = 1e-12;
pub(crate) const POSITIVITY_TOL: f64 = -1e-8;

/// Dense density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wrap a square matrix without validation (trajectories may drift).
    pub fn from_matrix(data: DMatrix<C64>) -> Self {
        assert_eq!(data.nrows(), data.ncols(), "density matrices are square");
        Self { data }
    }

    /// Wrap a square matrix, checking trace, Hermiticity and positivity.
    pub fn try_new(data: DMatrix<C64>) -> Result<Self> {
        let rho = Self::from_matrix(data);
        rho.validate()?;
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &[C64]) -> Self {
        let n = psi.len();
        Self { data: DMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()) }
    }

    /// Projector on basis state `index`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut data = DMatrix::zeros(dim, dim);
        data[(index, index)] = C64::new(1.0, 0.0);
        Self { data }
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { data: DMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    /// Column-major entries.
    pub fn as_slice(&self) -> &[C64] {
        self.data.as_slice()
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut e: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                e = e.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        e
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.min()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Check unit trace, Hermiticity and positivity.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::param("rho", format!("trace {tr} differs from 1")));
        }
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::param("rho", format!("not Hermitian (error {herm:e})")));
        }
        let min = self.min_eigenvalue();
        if min < POSITIVITY_TOL {
            return Err(Error::param("rho", format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `Tr(ρ O) = Σ_{rc} O_rc ρ_cr`.
    pub fn expectation(&self, op: &SparseOperator) -> Result<C64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: op.dim() });
        }
        Ok(op.entries().map(|(r, c, v)| v * self.data[(c, r)]).sum())
    }

    /// Replace `ρ` by `(ρ + ρ†)/2`.
    pub fn hermitize(&mut self) {
        let h = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        self.data = h;
    }
}
