//! Brute-force oracle: evolve the whole composite system and trace out the
//! probe.
//!
//! Nothing here touches the conditional decompositions; only [`kron`],
//! [`expm_i_hermitian`] and [`partial_trace_probe`] are used, so the oracle
//! stays independent of the closed forms it is used to check.

use crate::error::{Error, Result};
use crate::opkit::{
    conjugate, ensure_hermitian, expm_i_hermitian, kron, partial_trace_probe, trace_distance,
    ComplexMatrix, DensityMatrix, HERMITIAN_TOL,
};
use crate::qubit::{build_interaction, ControlSolution, DiagonalQubitState, QubitCouplings};

#[derive(Debug, Clone)]
pub struct CompositeScenario {
    pub dim_s: usize,
    pub dim_p: usize,
    pub h_full: ComplexMatrix,
    pub rho_s0: DensityMatrix,
    pub rho_p0: DensityMatrix,
    pub times: Vec<f64>,
}

impl CompositeScenario {
    pub fn new(
        h_full: ComplexMatrix,
        rho_s0: DensityMatrix,
        rho_p0: DensityMatrix,
        times: Vec<f64>,
    ) -> Result<Self> {
        let (dim_s, dim_p) = (rho_s0.dim(), rho_p0.dim());
        let n = dim_s * dim_p;
        if h_full.nrows() != n || h_full.ncols() != n {
            return Err(Error::Dimension(format!(
                "Hamiltonian is {}x{}, states need {n}x{n}",
                h_full.nrows(),
                h_full.ncols()
            )));
        }
        ensure_hermitian(&h_full, HERMITIAN_TOL)?;
        Ok(Self {
            dim_s,
            dim_p,
            h_full,
            rho_s0,
            rho_p0,
            times,
        })
    }

    pub fn initial_state(&self) -> DensityMatrix {
        DensityMatrix::new(kron(self.rho_s0.matrix(), self.rho_p0.matrix()))
            .expect("product of density matrices")
    }

    /// Reduced states at every time in `times`.
    pub fn trajectory(&self) -> Result<Vec<DensityMatrix>> {
        self.times.iter().map(|&t| evolve_full(self, t)).collect()
    }
}

/// `Tr_p[e^{-iHt} (ρ_s ⊗ ρ_p) e^{iHt}]`.
pub fn evolve_full(sc: &CompositeScenario, t: f64) -> Result<DensityMatrix> {
    let u = expm_i_hermitian(&sc.h_full, t)?;
    let rho = conjugate(&u, sc.initial_state().matrix());
    let rho = (&rho + rho.adjoint()) * crate::Complex64::from(0.5);
    partial_trace_probe(&DensityMatrix::new(rho)?, sc.dim_s, sc.dim_p)
}

/// Oracle reduced state for the qubit pair under `H_I(g)`.
pub fn qubit_oracle_state(
    g: &QubitCouplings,
    t: f64,
    rho_s0: &DensityMatrix,
    rho_p0: &DensityMatrix,
) -> Result<DensityMatrix> {
    let sc = CompositeScenario::new(
        build_interaction(g),
        rho_s0.clone(),
        rho_p0.clone(),
        vec![t],
    )?;
    evolve_full(&sc, t)
}

/// Trace distance between the target and the oracle evolution of a solved
/// control problem, with the probe prepared as `diag(1 - p_p, p_p)`.
pub fn check_solution(sol: &ControlSolution, p_s: f64, target: &DensityMatrix) -> Result<f64> {
    let system = DiagonalQubitState::new(p_s)?.density();
    let probe = DiagonalQubitState::new(sol.p_p)?.density();
    let reached = qubit_oracle_state(&sol.couplings, sol.t, &system, &probe)?;
    trace_distance(&reached, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opkit::{identity, max_abs_diff, ComplexMatrix};
    use crate::random::{random_density, random_hermitian, rng};
    use proptest::prelude::*;

    #[test]
    fn zero_hamiltonian_is_static() {
        let mut r = rng(5);
        let s = random_density(&mut r, 3);
        let p = random_density(&mut r, 2);
        let sc = CompositeScenario::new(ComplexMatrix::zeros(6, 6), s.clone(), p, vec![]).unwrap();
        let out = evolve_full(&sc, 4.2).unwrap();
        assert!(max_abs_diff(out.matrix(), s.matrix()) < 1e-14);
    }

    #[test]
    fn decoupled_probe_gives_unitary_evolution() {
        let mut r = rng(6);
        let h_s = random_hermitian(&mut r, 3, 1.0);
        let s = random_density(&mut r, 3);
        let p = random_density(&mut r, 3);
        let sc = CompositeScenario::new(kron(&h_s, &identity(3)), s.clone(), p, vec![]).unwrap();
        let t = 1.7;
        let out = evolve_full(&sc, t).unwrap();
        let u = expm_i_hermitian(&h_s, t).unwrap();
        assert!(max_abs_diff(out.matrix(), &conjugate(&u, s.matrix())) < 1e-12);
    }

    #[test]
    fn rejects_mismatched_hamiltonian() {
        let s = DensityMatrix::maximally_mixed(2);
        let err = CompositeScenario::new(ComplexMatrix::zeros(3, 3), s.clone(), s, vec![]);
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn trajectory_has_one_state_per_time() {
        let mut r = rng(9);
        let sc = CompositeScenario::new(
            random_hermitian(&mut r, 4, 1.0),
            random_density(&mut r, 2),
            random_density(&mut r, 2),
            vec![0.0, 0.5, 1.0],
        )
        .unwrap();
        let traj = sc.trajectory().unwrap();
        assert_eq!(traj.len(), 3);
        assert!(max_abs_diff(traj[0].matrix(), sc.rho_s0.matrix()) < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn composite_round_trip(seed in any::<u64>(), t in -5.0f64..5.0) {
            let mut r = rng(seed);
            let h = random_hermitian(&mut r, 6, 1.0);
            let rho = random_density(&mut r, 6);
            let forward = expm_i_hermitian(&h, t).unwrap();
            let back = expm_i_hermitian(&h, -t).unwrap();
            prop_assert!(max_abs_diff(&(&back * &forward), &identity(6)) <= 1e-10);
            let round = conjugate(&back, &conjugate(&forward, rho.matrix()));
            prop_assert!(max_abs_diff(&round, rho.matrix()) <= 1e-10);
        }

        #[test]
        fn oracle_outputs_are_states(seed in any::<u64>(), t in 0.0f64..10.0) {
            let mut r = rng(seed);
            let sc = CompositeScenario::new(
                random_hermitian(&mut r, 6, 1.0),
                random_density(&mut r, 2),
                random_density(&mut r, 3),
                vec![],
            ).unwrap();
            let out = evolve_full(&sc, t).unwrap();
            let tr: f64 = out.matrix().diagonal().iter().map(|z| z.re).sum();
            prop_assert!((tr - 1.0).abs() <= 1e-12);
            prop_assert!(out.spectrum()[0] >= -1e-10);
        }
    }
}
