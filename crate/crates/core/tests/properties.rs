//! Cross-module properties checked against the brute-force oracle.

use iqc_core::nlevel::{
    apply_channel, conditional_decomposition, kraus_from_probe, ProductHamiltonian,
};
use iqc_core::opkit::{
    diag_real, expm_i_hermitian, kron, trace, trace_distance, ComplexMatrix, DensityMatrix,
};
use iqc_core::qubit::{
    build_interaction, closed_form_state, leading_eigenvalue_range, solve_controls_numeric,
    transform_couplings, DiagonalQubitState, LocalRotation, QubitCouplings, SolverBudget,
};
use iqc_core::random::{random_density, random_unit_vector, random_unitary, rng, TestRng};
use iqc_core::verify::{check_solution, evolve_full, CompositeScenario};
use iqc_core::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn couplings(r: &mut TestRng) -> QubitCouplings {
    let mut u = || r.random_range(-1.0f64..1.0);
    QubitCouplings::new(u(), Complex64::new(u(), u()), u(), u()).unwrap()
}

fn reduced(g: &QubitCouplings, t: f64, s: &DensityMatrix, p: &DensityMatrix) -> DensityMatrix {
    let sc = CompositeScenario::new(build_interaction(g), s.clone(), p.clone(), vec![t]).unwrap();
    evolve_full(&sc, t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn local_rotation_relates_the_two_protocols(
        seed in any::<u64>(),
        theta in 0.0..std::f64::consts::PI,
        phi in 0.0..(2.0 * std::f64::consts::PI),
        t in 0.0f64..10.0,
    ) {
        let mut r = rng(seed);
        let g = couplings(&mut r);
        let rot = LocalRotation::new(theta, phi).unwrap();
        let system = random_density(&mut r, 2);
        let probe = random_density(&mut r, 2);
        let f = rot.matrix();

        let plain = reduced(&g, t, &system, &probe);
        let rotated = DensityMatrix::new(&f * system.matrix() * f.adjoint()).unwrap();
        let moved = reduced(&transform_couplings(&rot, &g), t, &rotated, &probe);

        for (a, b) in plain.spectrum().iter().zip(moved.spectrum()) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
        let back = DensityMatrix::new(f.adjoint() * moved.matrix() * &f).unwrap();
        prop_assert!(trace_distance(&back, &plain).unwrap() <= 1e-10);
    }

    #[test]
    fn closed_form_is_a_valid_state(seed in any::<u64>(), t in 0.0f64..20.0, p_s in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let g = couplings(&mut r);
        let rho = closed_form_state(&g, t, p_s, &random_density(&mut r, 2)).unwrap();
        prop_assert!((trace(rho.matrix()).re - 1.0).abs() <= 1e-12);
        prop_assert!(rho.spectrum()[0] >= -1e-10);
    }

    #[test]
    fn degenerate_probe_basis_does_not_matter(seed in any::<u64>(), t in 0.0f64..4.0) {
        // h_p = V diag(1, 1, -1) V† has a two-dimensional eigenspace, so its
        // eigenbasis there is arbitrary; the channel must still match the oracle.
        let mut r = rng(seed);
        let v = random_unitary(&mut r, 3);
        let h_p = &v * diag_real(&[1.0, 1.0, -1.0]) * v.adjoint();
        let h_p = (&h_p + h_p.adjoint()) * Complex64::from(0.5);
        let h_s = iqc_core::random::random_hermitian(&mut r, 3, 1.0);
        let h = ProductHamiltonian::new(h_s, h_p).unwrap();
        let probe = random_density(&mut r, 3);
        let system = random_density(&mut r, 3);
        let ch = kraus_from_probe(&conditional_decomposition(&h, t), &probe).unwrap();
        let out = apply_channel(&ch, &system).unwrap();
        let sc = CompositeScenario::new(h.full(), system, probe, vec![t]).unwrap();
        prop_assert!(trace_distance(&out, &evolve_full(&sc, t).unwrap()).unwrap() <= 1e-10);
    }

    #[test]
    fn composite_round_trip(seed in any::<u64>(), t in 0.0f64..5.0) {
        let mut r = rng(seed);
        let g = couplings(&mut r);
        let h = build_interaction(&g);
        let rho0 = kron(random_density(&mut r, 2).matrix(), random_density(&mut r, 2).matrix());
        let u = expm_i_hermitian(&h, t).unwrap();
        let back: ComplexMatrix = u.adjoint() * (&u * &rho0 * u.adjoint()) * &u;
        prop_assert!((back - rho0).iter().all(|z| z.norm() <= 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_results_hold_up_under_the_oracle(seed in any::<u64>(), pure_start in any::<bool>()) {
        let mut r = rng(seed);
        let p_s = if pure_start { 1.0 } else { 0.0 };
        let range = leading_eigenvalue_range(p_s, 33);
        let q = r.random_range(range.min_leading..=range.max_leading);
        let psi = random_unit_vector(&mut r, 2);
        let pure = DensityMatrix::pure(&psi).unwrap();
        let target = DensityMatrix::new(
            pure.matrix() * Complex64::from(2.0 * q - 1.0)
                + DensityMatrix::maximally_mixed(2).matrix() * Complex64::from(2.0 * (1.0 - q)),
        ).unwrap();
        let sol = solve_controls_numeric(p_s, &target, SolverBudget::default()).unwrap();
        prop_assert!(sol.feasible);
        prop_assert!(check_solution(&sol, p_s, &target).unwrap() <= 1e-8);
        prop_assert!((check_solution(&sol, p_s, &target).unwrap() - sol.residual).abs() <= 1e-10);
        let initial = DiagonalQubitState::new(p_s).unwrap().density();
        prop_assert!(sol.t == 0.0 || trace_distance(&initial, &target).unwrap() > 1e-8);
    }
}
