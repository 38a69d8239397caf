use num_complex::Complex64;

use super::{
    diag_real, eig_hermitian, ensure_finite, ensure_square, hermiticity_deviation, trace,
    ComplexMatrix, ComplexVector, PSD_FLOOR, TRACE_TOL,
};
use crate::error::{Error, Result};

/// Tolerance on `‖ρ - ρ†‖_max` when accepting a density matrix.
const DENSITY_HERMITIAN_TOL: f64 = 1e-12;

/// A Hermitian, positive-semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate `mat` as a density matrix.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        ensure_square(&mat)?;
        ensure_finite(&mat)?;
        if mat.nrows() == 0 {
            return Err(Error::InvalidDensity("empty matrix".into()));
        }
        let deviation = hermiticity_deviation(&mat);
        if deviation > DENSITY_HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {deviation:.3e})"
            )));
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace is {tr}, expected 1")));
        }
        let lowest = eig_hermitian(&mat)?.values[0];
        if lowest < PSD_FLOOR {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {lowest:.3e}"
            )));
        }
        Ok(Self { mat })
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Normalization { norm });
        }
        Self::new(psi * psi.adjoint())
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|&w| !(0.0..=1.0).contains(&w)) {
            return Err(Error::InvalidDensity(format!(
                "populations {weights:?} outside [0, 1]"
            )));
        }
        Self::new(diag_real(weights))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(n, n) * Complex64::from(1.0 / n as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        eig_hermitian(&self.mat)
            .expect("density matrix is Hermitian")
            .values
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat)
            .diagonal()
            .iter()
            .map(|z| z.re)
            .sum()
    }
}
