use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::{ensure_hermitian, ComplexMatrix, ComplexVector, HERMITIAN_TOL};
use crate::error::Result;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as columns.
///
/// Each eigenvector's phase is fixed so that its largest-magnitude component
/// (the first one, on ties) is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> ComplexVector {
        self.vectors.column(k).into_owned()
    }

    /// `V f(Λ) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let fk = f(lambda);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= fk);
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(Complex64::from)
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<Eigensystem> {
    ensure_hermitian(a, HERMITIAN_TOL)?;
    let sym = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let n = sym.nrows();
    let decomposition = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| decomposition.eigenvalues[i].total_cmp(&decomposition.eigenvalues[j]));

    let values = order
        .iter()
        .map(|&k| decomposition.eigenvalues[k])
        .collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = decomposition.eigenvectors.column(src);
        let peak = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let anchor = col
            .iter()
            .position(|z| z.norm() >= peak - 1e-12)
            .unwrap_or(0);
        let phase = col[anchor].conj() / col[anchor].norm();
        for i in 0..n {
            vectors[(i, dst)] = col[i] * phase;
        }
    }
    Ok(Eigensystem { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::opkit::{diag_real, identity, max_abs_diff, pauli};
    use crate::random::{random_hermitian, rng};
    use proptest::prelude::*;

    #[test]
    fn diagonal_values_sorted() {
        let e = eig_hermitian(&diag_real(&[2.0, 1.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let e = eig_hermitian(&pauli::x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Phase convention pins both vectors exactly.
        let minus = e.vector(0);
        let plus = e.vector(1);
        assert!((minus[(0, 0)] - s).norm() < 1e-14);
        assert!((minus[(1, 0)] + s).norm() < 1e-14);
        assert!((plus[(0, 0)] - s).norm() < 1e-14);
        assert!((plus[(1, 0)] - s).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        assert!(matches!(
            eig_hermitian(&pauli::raising()),
            Err(Error::Hermiticity { .. })
        ));
    }

    #[test]
    fn phase_convention_is_deterministic() {
        let mut r = rng(11);
        let h = random_hermitian(&mut r, 6, 1.0);
        let e = eig_hermitian(&h).unwrap();
        for k in 0..6 {
            let col = e.vectors.column(k);
            let big = col
                .iter()
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap();
            assert!(big.im.abs() < 1e-14 && big.re > 0.0);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reconstruction_residual(seed in any::<u64>(), n in 1usize..=16) {
            let mut r = rng(seed);
            let h = random_hermitian(&mut r, n, 3.0);
            let e = eig_hermitian(&h).unwrap();
            prop_assert!(max_abs_diff(&e.reconstruct(), &h) <= 1e-10);
            prop_assert!(max_abs_diff(&(e.vectors.adjoint() * &e.vectors), &identity(n)) <= 1e-10);
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            for k in 0..n {
                let v = e.vector(k);
                let lhs = &h * &v;
                let rhs = &v * Complex64::from(e.values[k]);
                prop_assert!((lhs - rhs).camax() <= 1e-10);
            }
        }
    }
}
