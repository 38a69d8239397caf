//! N-level system coupled to an N-level probe through a product interaction
//! `H = h_s ⊗ h_p`.
//!
//! In the eigenbasis `{|M⟩}` of `h_p` the propagator is block diagonal,
//!
//! ```text
//! exp(-i (h_s ⊗ h_p) t) = Σ_M exp(-i E_M h_s t) ⊗ |M⟩⟨M|,
//! ```
//!
//! so tracing out the probe gives a random-unitary channel with weights
//! `⟨M|ρ_p|M⟩`. Coherences of the probe in that basis never reach the system.

mod channel;
mod reach;

pub use channel::{apply_channel, kraus_from_probe, KrausChannel};
pub use reach::{
    expansion_coefficients, general_reduced_state, project_simplex, reachability_residual,
    solve_probe_spectrum, CoefficientTensor, ProbeSpectrumSolution, ReachabilityProblem,
    ReachabilityResidual, SIMPLEX_MAX_ITER,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::opkit::{
    eig_hermitian, ensure_finite, ensure_hermitian, ensure_square, identity, kron, max_abs_diff,
    ComplexMatrix, ComplexVector, Eigensystem, HERMITIAN_TOL,
};

/// Interaction `h_s ⊗ h_p` with equal system and probe dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductHamiltonian {
    h_s: ComplexMatrix,
    h_p: ComplexMatrix,
    probe_eig: Eigensystem,
}

impl ProductHamiltonian {
    pub fn new(h_s: ComplexMatrix, h_p: ComplexMatrix) -> Result<Self> {
        for h in [&h_s, &h_p] {
            ensure_square(h)?;
            ensure_finite(h)?;
            ensure_hermitian(h, HERMITIAN_TOL)?;
        }
        if h_s.nrows() != h_p.nrows() {
            return Err(Error::Dimension(format!(
                "system and probe must have the same dimension, got {} and {}",
                h_s.nrows(),
                h_p.nrows()
            )));
        }
        if h_s.nrows() == 0 {
            return Err(Error::Dimension("empty Hamiltonian factors".into()));
        }
        let probe_eig = eig_hermitian(&h_p)?;
        Ok(Self {
            h_s,
            h_p,
            probe_eig,
        })
    }

    pub fn dim(&self) -> usize {
        self.h_s.nrows()
    }

    pub fn h_s(&self) -> &ComplexMatrix {
        &self.h_s
    }

    pub fn h_p(&self) -> &ComplexMatrix {
        &self.h_p
    }

    pub fn probe_eig(&self) -> &Eigensystem {
        &self.probe_eig
    }

    /// `h_s ⊗ h_p` on the composite space.
    pub fn full(&self) -> ComplexMatrix {
        kron(&self.h_s, &self.h_p)
    }
}

/// Probe-conditioned system propagators `U_M = exp(-i E_M h_s t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDecomposition {
    pub energies: Vec<f64>,
    pub unitaries: Vec<ComplexMatrix>,
    /// Probe eigenvectors `|M⟩` as columns, in the order of `energies`.
    pub probe_basis: ComplexMatrix,
}

impl ConditionalDecomposition {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `Σ_M U_M ⊗ |M⟩⟨M|`.
    pub fn full_propagator(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut total = ComplexMatrix::zeros(n * n, n * n);
        for (m, u) in self.unitaries.iter().enumerate() {
            let ket = self.probe_basis.column(m);
            let proj = ket * ket.adjoint();
            total += kron(u, &proj);
        }
        total
    }
}

pub fn conditional_decomposition(h: &ProductHamiltonian, t: f64) -> ConditionalDecomposition {
    let sys = eig_hermitian(&h.h_s).expect("h_s validated on construction");
    let energies = h.probe_eig.values.clone();
    let unitaries = energies
        .iter()
        .map(|&e| {
            if e * t == 0.0 {
                identity(h.dim())
            } else {
                sys.map_spectrum(|lambda| Complex64::from_polar(1.0, -lambda * e * t))
            }
        })
        .collect();
    ConditionalDecomposition {
        energies,
        unitaries,
        probe_basis: h.probe_eig.vectors.clone(),
    }
}

/// Unitary `U` with `U·src = dst`.
///
/// Both vectors are completed to orthonormal bases by Gram-Schmidt against the
/// standard basis vectors in index order (candidates whose remainder has norm
/// below `1e-8` are skipped), and the `k`-th vector of the first basis is
/// mapped to the `k`-th vector of the second.
pub fn pure_state_transporter(src: &ComplexVector, dst: &ComplexVector) -> Result<ComplexMatrix> {
    if src.len() != dst.len() {
        return Err(Error::Dimension(format!(
            "source has dimension {}, destination {}",
            src.len(),
            dst.len()
        )));
    }
    for v in [src, dst] {
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Normalization { norm });
        }
    }
    let bs = complete_basis(src);
    let bd = complete_basis(dst);
    Ok(bd * bs.adjoint())
}

fn complete_basis(v: &ComplexVector) -> ComplexMatrix {
    let n = v.len();
    let mut cols: Vec<ComplexVector> = vec![v.unscale(v.norm())];
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let mut cand = ComplexVector::zeros(n);
        cand[k] = Complex64::new(1.0, 0.0);
        // Two passes keep the result orthogonal to machine precision.
        for _ in 0..2 {
            for b in &cols {
                let overlap = b.dotc(&cand);
                cand -= b * overlap;
            }
        }
        let norm = cand.norm();
        if norm < 1e-8 {
            continue;
        }
        cols.push(cand.unscale(norm));
    }
    ComplexMatrix::from_columns(&cols)
}

/// Largest entry of `|exp(-i H t) - Σ_M U_M ⊗ |M⟩⟨M||`, using `full` as the
/// composite exponential.
pub fn factorization_error(decomp: &ConditionalDecomposition, full: &ComplexMatrix) -> f64 {
    max_abs_diff(&decomp.full_propagator(), full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opkit::{expm_i_hermitian, pauli, unitarity_defect, ZERO};
    use crate::random::{random_hermitian, random_unit_vector, rng};
    use proptest::prelude::*;

    #[test]
    fn zero_probe_gives_identities() {
        let mut r = rng(1);
        let h =
            ProductHamiltonian::new(random_hermitian(&mut r, 3, 1.0), ComplexMatrix::zeros(3, 3))
                .unwrap();
        let d = conditional_decomposition(&h, 2.0);
        assert!(d.energies.iter().all(|&e| e == 0.0));
        for u in &d.unitaries {
            assert_eq!(*u, identity(3));
        }
    }

    #[test]
    fn qubit_pair_matches_euler_formula() {
        let h = ProductHamiltonian::new(pauli::x(), pauli::z()).unwrap();
        let t = 0.37;
        let d = conditional_decomposition(&h, t);
        assert_eq!(d.energies, vec![-1.0, 1.0]);
        let euler = |s: f64| {
            let (cs, sn) = ((s * t).cos(), (s * t).sin());
            ComplexMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(cs, 0.0),
                    Complex64::new(0.0, sn),
                    Complex64::new(0.0, sn),
                    Complex64::new(cs, 0.0),
                ],
            )
        };
        // E = -1 gives exp(+i σx t), E = +1 gives exp(-i σx t).
        assert!(max_abs_diff(&d.unitaries[0], &euler(1.0)) < 1e-14);
        assert!(max_abs_diff(&d.unitaries[1], &euler(-1.0)) < 1e-14);
    }

    #[test]
    fn unequal_dimensions_rejected() {
        let err = ProductHamiltonian::new(pauli::x(), identity(3)).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
        let mut bad = pauli::x();
        bad[(0, 1)] = Complex64::new(2.0, 0.0);
        assert!(matches!(
            ProductHamiltonian::new(bad, pauli::z()).unwrap_err(),
            Error::Hermiticity { .. }
        ));
    }

    #[test]
    fn transporter_examples() {
        let mut r = rng(3);
        let v = random_unit_vector(&mut r, 3);
        let u = pure_state_transporter(&v, &v).unwrap();
        assert!((&u * &v - &v).norm() < 1e-14);

        let e = |k: usize| {
            let mut x = ComplexVector::from_element(3, ZERO);
            x[k] = Complex64::new(1.0, 0.0);
            x
        };
        let u = pure_state_transporter(&e(0), &e(1)).unwrap();
        assert!((&u * e(0) - e(1)).norm() < 1e-15);
        assert!(unitarity_defect(&u) < 1e-15);
        // Every entry is 0 or 1 in magnitude.
        assert!(u
            .iter()
            .all(|z| z.norm() < 1e-15 || (z.norm() - 1.0).abs() < 1e-15));

        let bad = e(0) * Complex64::new(1.1, 0.0);
        assert!(matches!(
            pure_state_transporter(&bad, &e(1)),
            Err(Error::Normalization { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn factorization_identity(seed in any::<u64>(), n in 2usize..=4, t in 0.0f64..5.0) {
            let mut r = rng(seed);
            let h = ProductHamiltonian::new(
                random_hermitian(&mut r, n, 1.0),
                random_hermitian(&mut r, n, 1.0),
            ).unwrap();
            let exact = expm_i_hermitian(&h.full(), t).unwrap();
            let d = conditional_decomposition(&h, t);
            prop_assert!(factorization_error(&d, &exact) <= 1e-10);
            for u in &d.unitaries {
                prop_assert!(unitarity_defect(u) <= 1e-10);
            }
        }

        #[test]
        fn transporter_maps_src_to_dst(seed in any::<u64>(), n in 1usize..=6) {
            let mut r = rng(seed);
            let src = random_unit_vector(&mut r, n);
            let dst = random_unit_vector(&mut r, n);
            let u = pure_state_transporter(&src, &dst).unwrap();
            prop_assert!((&u * &src - &dst).norm() <= 1e-10);
            prop_assert!(unitarity_defect(&u) <= 1e-10);
        }
    }
}
