//! Dense complex-matrix kernel.
//!
//! Everything in the crate is built on [`ComplexMatrix`] (a dynamically sized
//! `nalgebra` matrix of `Complex64`) and the handful of operations here:
//! Kronecker products, the partial trace over the probe factor, Hermitian
//! eigendecomposition, `exp(-iHt)` and the trace distance.
//!
//! Composite spaces are always ordered system ⊗ probe: the composite index of
//! `(s, p)` is `s * dim_p + p`.

mod density;
mod eig;

pub use density::DensityMatrix;
pub use eig::{eig_hermitian, Eigensystem};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Hermiticity and unitarity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_FLOOR: f64 = -1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Build a square matrix from real/imag pairs given row by row.
pub fn from_rows(rows: &[&[Complex64]]) -> ComplexMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    ComplexMatrix::from_fn(n, m, |i, j| rows[i][j])
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { values[i].into() } else { ZERO })
}

/// Pauli matrices in the `{|1⟩, |0⟩}` ordering, so `σ_z = diag(1, -1)` and
/// `σ⁺ = |1⟩⟨0|` has its single entry at row 0, column 1.
pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
    }

    pub fn y() -> ComplexMatrix {
        from_rows(&[&[ZERO, -I], &[I, ZERO]])
    }

    pub fn z() -> ComplexMatrix {
        diag_real(&[1.0, -1.0])
    }

    pub fn raising() -> ComplexMatrix {
        from_rows(&[&[ZERO, ONE], &[ZERO, ZERO]])
    }

    pub fn lowering() -> ComplexMatrix {
        from_rows(&[&[ZERO, ZERO], &[ONE, ZERO]])
    }
}

pub fn ensure_finite(a: &ComplexMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(a: &ComplexMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )))
    }
}

/// Largest entrywise modulus of `a - a†`.
pub fn hermiticity_deviation(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn ensure_hermitian(a: &ComplexMatrix, tol: f64) -> Result<()> {
    ensure_square(a)?;
    ensure_finite(a)?;
    let deviation = hermiticity_deviation(a);
    if deviation <= tol {
        Ok(())
    } else {
        Err(Error::Hermiticity { deviation })
    }
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `u† u - I`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.ncols()))
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Contract the probe indices of an operator on the system ⊗ probe space.
pub fn partial_trace_probe_matrix(
    rho: &ComplexMatrix,
    dim_s: usize,
    dim_p: usize,
) -> Result<ComplexMatrix> {
    let n = dim_s * dim_p;
    if dim_s == 0 || dim_p == 0 || rho.nrows() != n || rho.ncols() != n {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, expected {n}x{n} for {dim_s} ⊗ {dim_p}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    Ok(ComplexMatrix::from_fn(dim_s, dim_s, |i, j| {
        (0..dim_p)
            .map(|m| rho[(i * dim_p + m, j * dim_p + m)])
            .sum()
    }))
}

/// Reduced system state of a composite system ⊗ probe density matrix.
pub fn partial_trace_probe(
    rho: &DensityMatrix,
    dim_s: usize,
    dim_p: usize,
) -> Result<DensityMatrix> {
    DensityMatrix::new(partial_trace_probe_matrix(rho.matrix(), dim_s, dim_p)?)
}

/// `exp(-i h t)` for Hermitian `h`, computed from its eigendecomposition.
pub fn expm_i_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(h)?;
    if t == 0.0 {
        return Ok(identity(h.nrows()));
    }
    Ok(eig.map_spectrum(|lambda| Complex64::from_polar(1.0, -lambda * t)))
}

/// Trace distance `½‖a - b‖₁`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "cannot compare states of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = a.matrix() - b.matrix();
    let eig = eig_hermitian(&diff)?;
    Ok((0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>()).min(1.0))
}

/// `a x a†`.
pub fn conjugate(a: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    a * x * a.adjoint()
}
