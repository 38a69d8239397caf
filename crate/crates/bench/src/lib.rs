//! Fixed benchmark instances, so every bench measures the same inputs.

use iqc_core::nlevel::{ProductHamiltonian, ReachabilityProblem};
use iqc_core::opkit::{ComplexMatrix, DensityMatrix};
use iqc_core::qubit::QubitCouplings;
use iqc_core::random::{random_hermitian, random_simplex, random_unit_vector, rng};
use iqc_core::Complex64;

pub fn hermitian(n: usize) -> ComplexMatrix {
    random_hermitian(&mut rng(n as u64), n, 1.0)
}

pub fn product_hamiltonian(n: usize) -> ProductHamiltonian {
    let mut r = rng(50 + n as u64);
    ProductHamiltonian::new(
        random_hermitian(&mut r, n, 1.0),
        random_hermitian(&mut r, n, 1.0),
    )
    .unwrap()
}

pub fn couplings() -> QubitCouplings {
    QubitCouplings::new(0.3, Complex64::new(0.8, 0.2), 0.6, 0.8).unwrap()
}

pub fn pure_target() -> DensityMatrix {
    DensityMatrix::pure(&random_unit_vector(&mut rng(11), 2)).unwrap()
}

/// Leading eigenvalue 0.8, which a pure initial state can reach but only
/// through the lattice stage.
pub fn mixed_target() -> DensityMatrix {
    let pure = pure_target();
    DensityMatrix::new(
        pure.matrix() * Complex64::from(0.6)
            + DensityMatrix::maximally_mixed(2).matrix() * Complex64::from(0.4),
    )
    .unwrap()
}

pub fn reach_problem(n: usize) -> ReachabilityProblem {
    let mut r = rng(100 + n as u64);
    let h = random_hermitian(&mut r, n, 1.0);
    let energies: Vec<f64> = (0..n).map(|m| m as f64 - 0.5 * (n - 1) as f64).collect();
    let p = random_simplex(&mut r, n);
    let w = random_simplex(&mut r, n);
    ReachabilityProblem::forward(&h, &energies, 1.3, &p, &w).unwrap()
}
