//! Seeded random instances used by the property tests, the acceptance suite
//! and the benchmarks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::opkit::{ComplexMatrix, ComplexVector, DensityMatrix};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_complex_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Hermitian matrix with entries of order `scale`.
pub fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> ComplexMatrix {
    let a = random_complex_matrix(rng, n, n);
    (&a + a.adjoint()) * Complex64::from(0.5 * scale)
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let qr = random_complex_matrix(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::from(1.0)
        };
        q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

pub fn random_unit_vector(rng: &mut impl Rng, n: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(n, |_, _| gaussian(rng));
    let norm = v.norm();
    v / Complex64::from(norm)
}

/// Full-rank mixed state `A A† / tr(A A†)` from a Ginibre `A`.
pub fn random_density(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    let a = random_complex_matrix(rng, n, n);
    let m = &a * a.adjoint();
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    let mut m = m / Complex64::from(tr);
    // Exact Hermitian symmetry.
    m = (&m + m.adjoint()) * Complex64::from(0.5);
    DensityMatrix::new(m).expect("Ginibre state is a valid density matrix")
}

/// Probability vector drawn uniformly from the simplex.
pub fn random_simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}
