//! Which target spectra can be reached by choosing only the probe
//! populations, once the controls (`h_s`, probe energies, `t`) are fixed.
//!
//! With `ρ_s(0) = Σ_j p_j |j⟩⟨j|` and probe populations `w_m`, the reduced
//! state is `Σ_j p_j Σ_m w_m |φ_j(E_m t)⟩⟨φ_j(E_m t)|` where
//! `|φ_j(E_m t)⟩ = exp(-i h_s E_m t)|j⟩`. Expanding those vectors in a
//! reference basis `{|φ_α⟩}`, `c[α][j][m] = ⟨φ_α|φ_j(E_m t)⟩`, the target
//! `Σ_α q_α |φ_α⟩⟨φ_α|` is reached exactly when
//!
//! ```text
//! q_α = Σ_j p_j Σ_m w_m |c[α][j][m]|²           for every α,
//! 0   = Σ_j p_j Σ_m w_m c[β][j][m] c[γ][j][m]*   for every β ≠ γ.
//! ```
//!
//! Both lines are linear in `w`, so finding `w` is a least-squares problem on
//! the probability simplex.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::opkit::{
    eig_hermitian, ensure_hermitian, ensure_square, ComplexMatrix, Eigensystem, HERMITIAN_TOL,
};

pub const SIMPLEX_MAX_ITER: usize = 10_000;

const WEIGHT_SUM_TOL: f64 = 1e-12;
const COLUMN_NORM_TOL: f64 = 1e-10;

/// `c[α][j][m]`, with `α, j` ranging over the system dimension and `m` over
/// the probe energies.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    dim: usize,
    levels: usize,
    data: Vec<Complex64>,
}

impl CoefficientTensor {
    pub fn from_fn(
        dim: usize,
        levels: usize,
        f: impl Fn(usize, usize, usize) -> Complex64,
    ) -> Self {
        let mut data = Vec::with_capacity(dim * dim * levels);
        for a in 0..dim {
            for j in 0..dim {
                for m in 0..levels {
                    data.push(f(a, j, m));
                }
            }
        }
        Self { dim, levels, data }
    }

    /// `c[α][j][m] = δ_αj` for `levels` probe levels.
    pub fn identity(dim: usize, levels: usize) -> Self {
        Self::from_fn(dim, levels, |a, j, _| {
            Complex64::from(if a == j { 1.0 } else { 0.0 })
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn get(&self, alpha: usize, j: usize, m: usize) -> Complex64 {
        self.data[(alpha * self.dim + j) * self.levels + m]
    }

    /// Largest `|Σ_α |c[α][j][m]|² - 1|` over all `(j, m)`.
    pub fn column_norm_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim {
            for m in 0..self.levels {
                let s: f64 = (0..self.dim).map(|a| self.get(a, j, m).norm_sqr()).sum();
                worst = worst.max((s - 1.0).abs());
            }
        }
        worst
    }
}

/// Coefficients against the reference basis `|φ_α(T)⟩ = exp(-i h_s T)|α⟩`,
/// with `T = t` unless `reference_time` is given.
pub fn expansion_coefficients(
    h_s: &ComplexMatrix,
    energies: &[f64],
    t: f64,
    reference_time: Option<f64>,
) -> Result<CoefficientTensor> {
    let sys = eig_hermitian(h_s)?;
    let reference = evolve(&sys, reference_time.unwrap_or(t));
    expansion_coefficients_in_basis(h_s, energies, t, &reference)
}

/// Coefficients against the columns of an arbitrary unitary `basis`.
pub fn expansion_coefficients_in_basis(
    h_s: &ComplexMatrix,
    energies: &[f64],
    t: f64,
    basis: &ComplexMatrix,
) -> Result<CoefficientTensor> {
    ensure_square(h_s)?;
    let n = h_s.nrows();
    if basis.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "reference basis is {}x{}, expected {n}x{n}",
            basis.nrows(),
            basis.ncols()
        )));
    }
    let sys = eig_hermitian(h_s)?;
    // projected[m] = B† exp(-i h_s E_m t); its (α, j) entry is c[α][j][m].
    let projected: Vec<ComplexMatrix> = energies
        .iter()
        .map(|&e| basis.adjoint() * evolve(&sys, e * t))
        .collect();
    Ok(CoefficientTensor::from_fn(n, energies.len(), |a, j, m| {
        projected[m][(a, j)]
    }))
}

fn evolve(sys: &Eigensystem, s: f64) -> ComplexMatrix {
    if s == 0.0 {
        return ComplexMatrix::identity(sys.dim(), sys.dim());
    }
    sys.map_spectrum(|lambda| Complex64::from_polar(1.0, -lambda * s))
}

/// `Σ_j p_j Σ_m w_m |φ_j(E_m t)⟩⟨φ_j(E_m t)|` in the system's standard basis.
pub fn general_reduced_state(
    h_s: &ComplexMatrix,
    energies: &[f64],
    t: f64,
    p: &[f64],
    w: &[f64],
) -> Result<ComplexMatrix> {
    ensure_hermitian(h_s, HERMITIAN_TOL)?;
    let n = h_s.nrows();
    if p.len() != n || w.len() != energies.len() {
        return Err(Error::Dimension(format!(
            "{} system weights and {} probe weights for dimension {n} and {} energies",
            p.len(),
            w.len(),
            energies.len()
        )));
    }
    let sys = eig_hermitian(h_s)?;
    let mut rho = ComplexMatrix::zeros(n, n);
    for (&e, &wm) in energies.iter().zip(w) {
        let u = evolve(&sys, e * t);
        for (j, &pj) in p.iter().enumerate() {
            let phi = u.column(j);
            rho += (phi * phi.adjoint()) * Complex64::from(pj * wm);
        }
    }
    Ok(rho)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReachabilityProblem {
    initial_weights: Vec<f64>,
    target_weights: Vec<f64>,
    coefficients: CoefficientTensor,
}

impl ReachabilityProblem {
    pub fn new(
        initial_weights: Vec<f64>,
        target_weights: Vec<f64>,
        coefficients: CoefficientTensor,
    ) -> Result<Self> {
        let n = coefficients.dim();
        if initial_weights.len() != n || target_weights.len() != n {
            return Err(Error::Dimension(format!(
                "{} initial and {} target weights for dimension {n}",
                initial_weights.len(),
                target_weights.len()
            )));
        }
        check_probability(&initial_weights, "initial weights")?;
        check_probability(&target_weights, "target weights")?;
        let defect = coefficients.column_norm_defect();
        if defect.is_nan() || defect > COLUMN_NORM_TOL {
            return Err(Error::Normalization { norm: 1.0 + defect });
        }
        Ok(Self {
            initial_weights,
            target_weights,
            coefficients,
        })
    }

    /// A feasible instance built by evolving `p` with probe populations
    /// `w_star` and taking the eigenbasis of the resulting state as the
    /// reference basis, its eigenvalues as the target.
    pub fn forward(
        h_s: &ComplexMatrix,
        energies: &[f64],
        t: f64,
        p: &[f64],
        w_star: &[f64],
    ) -> Result<Self> {
        check_probability(w_star, "probe weights")?;
        let rho = general_reduced_state(h_s, energies, t, p, w_star)?;
        let rho = (&rho + rho.adjoint()) * Complex64::from(0.5);
        let eig = eig_hermitian(&rho)?;
        let coefficients = expansion_coefficients_in_basis(h_s, energies, t, &eig.vectors)?;
        let q: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
        let s: f64 = q.iter().sum();
        Self::new(
            p.to_vec(),
            q.into_iter().map(|v| v / s).collect(),
            coefficients,
        )
    }

    pub fn dim(&self) -> usize {
        self.coefficients.dim()
    }

    /// Number of probe populations to solve for.
    pub fn levels(&self) -> usize {
        self.coefficients.levels()
    }

    pub fn initial_weights(&self) -> &[f64] {
        &self.initial_weights
    }

    pub fn target_weights(&self) -> &[f64] {
        &self.target_weights
    }

    pub fn coefficients(&self) -> &CoefficientTensor {
        &self.coefficients
    }

    /// `S[β][γ][m] = Σ_j p_j c[β][j][m] c[γ][j][m]*`.
    fn mixed_moment(&self, b: usize, g: usize, m: usize) -> Complex64 {
        let c = &self.coefficients;
        self.initial_weights
            .iter()
            .enumerate()
            .map(|(j, &pj)| c.get(b, j, m) * c.get(g, j, m).conj() * pj)
            .sum()
    }

    /// Real design matrix `A` and right-hand side `y` with residual `y - A w`:
    /// the diagonal rows first, then real and imaginary parts of every ordered
    /// off-diagonal pair.
    fn linear_system(&self) -> (DMatrix<f64>, DVector<f64>) {
        let n = self.dim();
        let k = self.levels();
        let rows = n + 2 * n * (n - 1);
        let mut a = DMatrix::zeros(rows, k);
        let mut y = DVector::zeros(rows);
        for alpha in 0..n {
            y[alpha] = self.target_weights[alpha];
            for m in 0..k {
                a[(alpha, m)] = self.mixed_moment(alpha, alpha, m).re;
            }
        }
        let mut row = n;
        for (b, g) in off_diagonal_pairs(n) {
            for m in 0..k {
                let s = self.mixed_moment(b, g, m);
                a[(row, m)] = -s.re;
                a[(row + 1, m)] = -s.im;
            }
            row += 2;
        }
        (a, y)
    }
}

fn off_diagonal_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |b| (0..n).filter(move |&g| g != b).map(move |g| (b, g)))
}

fn check_probability(w: &[f64], what: &str) -> Result<()> {
    if w.is_empty() || w.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::Probability(format!(
            "{what} {w:?} must be non-negative"
        )));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::Probability(format!("{what} sum to {s}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReachabilityResidual {
    /// `q_α - Σ_j p_j Σ_m w_m |c[α][j][m]|²`.
    pub diagonal: Vec<f64>,
    /// `Σ_j p_j Σ_m w_m c[β][j][m] c[γ][j][m]*` for every ordered pair
    /// `β ≠ γ`, in row-major pair order.
    pub off_diagonal: Vec<Complex64>,
}

impl ReachabilityResidual {
    pub fn norm(&self) -> f64 {
        let d: f64 = self.diagonal.iter().map(|x| x * x).sum();
        let o: f64 = self.off_diagonal.iter().map(|z| z.norm_sqr()).sum();
        (d + o).sqrt()
    }
}

pub fn reachability_residual(
    prob: &ReachabilityProblem,
    w: &[f64],
) -> Result<ReachabilityResidual> {
    if w.len() != prob.levels() {
        return Err(Error::Probability(format!(
            "{} probe weights for {} levels",
            w.len(),
            prob.levels()
        )));
    }
    check_probability(w, "probe weights")?;
    let n = prob.dim();
    let weighted = |b: usize, g: usize| -> Complex64 {
        w.iter()
            .enumerate()
            .map(|(m, &wm)| prob.mixed_moment(b, g, m) * wm)
            .sum()
    };
    let diagonal = (0..n)
        .map(|a| prob.target_weights[a] - weighted(a, a).re)
        .collect();
    let off_diagonal = off_diagonal_pairs(n).map(|(b, g)| weighted(b, g)).collect();
    Ok(ReachabilityResidual {
        diagonal,
        off_diagonal,
    })
}

/// Euclidean projection onto `{w ≥ 0, Σ w = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cumulative += x;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if x - candidate > 0.0 {
            shift = candidate;
        }
    }
    v.iter().map(|&x| (x - shift).max(0.0)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpectrumSolution {
    pub w: Vec<f64>,
    /// Euclidean norm of all residuals at `w`.
    pub residual: f64,
    pub iterations: usize,
}

/// Projected gradient descent on `½‖y - A w‖²` over the simplex, starting
/// from the uniform vector, followed by an exact equality-constrained
/// least-squares solve on the support of the iterate.
///
/// The step is `0.1 / L` with `L` the largest curvature of the objective
/// along the simplex (directions summing to zero). The curvature along
/// `(1, …, 1)` is irrelevant after projection and can be orders of magnitude
/// larger.
pub fn solve_probe_spectrum(prob: &ReachabilityProblem) -> ProbeSpectrumSolution {
    let (a, y) = prob.linear_system();
    let k = prob.levels();
    let ata = a.transpose() * &a;
    let aty = a.transpose() * &y;
    let residual_of = |w: &DVector<f64>| (&y - &a * w).norm();

    let centering = DMatrix::<f64>::identity(k, k) - DMatrix::from_element(k, k, 1.0 / k as f64);
    let lipschitz = (&centering * &ata * &centering)
        .symmetric_eigen()
        .eigenvalues
        .max();

    let mut w = DVector::from_element(k, 1.0 / k as f64);
    let mut best = (residual_of(&w), w.clone());
    let mut iterations = 0;
    if lipschitz > 0.0 {
        let step = STEP_SCALE / lipschitz;
        while iterations < SIMPLEX_MAX_ITER && best.0 > 0.0 {
            iterations += 1;
            let grad = &ata * &w - &aty;
            let trial: Vec<f64> = (&w - grad * step).iter().copied().collect();
            let next = DVector::from_vec(project_simplex(&trial));
            let moved = (&next - &w).norm();
            w = next;
            let r = residual_of(&w);
            if r < best.0 {
                best = (r, w.clone());
            }
            if moved == 0.0 || best.0 <= POLISH_TARGET {
                break;
            }
        }
    }
    if let Some(polished) = polish_on_support(&ata, &aty, &best.1) {
        let r = residual_of(&polished);
        if r < best.0 {
            best = (r, polished);
        }
    }
    ProbeSpectrumSolution {
        w: best.1.iter().copied().collect(),
        residual: best.0,
        iterations,
    }
}

const STEP_SCALE: f64 = 0.1;
const POLISH_TARGET: f64 = 1e-13;

/// Minimize `½‖y - A w‖²` subject to `Σ w = 1` with `w` zero off the support
/// of `w0`; `None` if the minimizer leaves the simplex.
fn polish_on_support(
    ata: &DMatrix<f64>,
    aty: &DVector<f64>,
    w0: &DVector<f64>,
) -> Option<DVector<f64>> {
    let support: Vec<usize> = (0..w0.len()).filter(|&i| w0[i] > 1e-12).collect();
    let s = support.len();
    let mut kkt = DMatrix::zeros(s + 1, s + 1);
    let mut rhs = DVector::zeros(s + 1);
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            kkt[(r, c)] = ata[(i, j)];
        }
        kkt[(r, s)] = 1.0;
        kkt[(s, r)] = 1.0;
        rhs[r] = aty[i];
    }
    rhs[s] = 1.0;
    let sol = kkt.svd(true, true).solve(&rhs, 1e-14).ok()?;
    let mut w = DVector::zeros(w0.len());
    for (r, &i) in support.iter().enumerate() {
        if sol[r].is_nan() || sol[r] < -1e-15 {
            return None;
        }
        w[i] = sol[r].max(0.0);
    }
    let total = w.sum();
    Some(w / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opkit::pauli;
    use crate::random::{random_hermitian, random_simplex, rng};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn su2(h: &ComplexMatrix, s: f64) -> ComplexMatrix {
        crate::opkit::expm_i_hermitian(h, s).unwrap()
    }

    #[test]
    fn matching_evolution_gives_kronecker_delta() {
        let mut r = rng(2);
        let h = random_hermitian(&mut r, 3, 1.0);
        let c = expansion_coefficients(&h, &[2.0, 2.0, 2.0], 0.5, Some(1.0)).unwrap();
        let c0 = expansion_coefficients(&h, &[0.3, -1.0, 2.0], 0.0, Some(0.0)).unwrap();
        let delta = CoefficientTensor::identity(3, 3);
        for tensor in [c, c0] {
            for i in 0..tensor.data.len() {
                assert!((tensor.data[i] - delta.data[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pauli_x_coefficients_match_euler_products() {
        let h = pauli::x();
        let c = expansion_coefficients(&h, &[1.0, 2.0], FRAC_PI_4, Some(FRAC_PI_4)).unwrap();
        let second = su2(&pauli::x(), FRAC_PI_4).adjoint() * su2(&pauli::x(), 2.0 * FRAC_PI_4);
        // exp(+iσx π/4) exp(-iσx π/2) = exp(-iσx π/4).
        let (cs, sn) = (FRAC_PI_4.cos(), FRAC_PI_4.sin());
        let euler = [[cs, 0.0, 0.0, -sn], [0.0, -sn, cs, 0.0]];
        for a in 0..2 {
            for j in 0..2 {
                let want = if a == j { 1.0 } else { 0.0 };
                assert!((c.get(a, j, 0) - Complex64::from(want)).norm() < 1e-14);
                assert!((c.get(a, j, 1) - second[(a, j)]).norm() < 1e-14);
                let z = Complex64::new(euler[a][2 * j], euler[a][2 * j + 1]);
                assert!((c.get(a, j, 1) - z).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn identity_coefficients_reach_initial_spectrum() {
        let p = vec![0.7, 0.3];
        let prob =
            ReachabilityProblem::new(p.clone(), p, CoefficientTensor::identity(2, 2)).unwrap();
        for w in [[1.0, 0.0], [0.25, 0.75], [0.5, 0.5]] {
            assert_eq!(reachability_residual(&prob, &w).unwrap().norm(), 0.0);
        }
        let sol = solve_probe_spectrum(&prob);
        assert_eq!(sol.residual, 0.0);
    }

    #[test]
    fn invalid_probe_weights_rejected() {
        let prob = ReachabilityProblem::new(
            vec![0.5, 0.5],
            vec![0.5, 0.5],
            CoefficientTensor::identity(2, 2),
        )
        .unwrap();
        for w in [vec![0.6, 0.6], vec![-0.1, 1.1], vec![1.0]] {
            assert!(matches!(
                reachability_residual(&prob, &w),
                Err(Error::Probability(_))
            ));
        }
    }

    #[test]
    fn single_energy_cannot_change_spectrum() {
        // p = (1, 0, 0) against a uniform target: the spectral gap is far
        // above 0.25 and every probe population gives the same state.
        let mut r = rng(11);
        let h = random_hermitian(&mut r, 3, 1.0);
        let c = expansion_coefficients(&h, &[1.0, 1.0, 1.0], 0.8, None).unwrap();
        let prob = ReachabilityProblem::new(vec![1.0, 0.0, 0.0], vec![1.0 / 3.0; 3], c).unwrap();
        let sol = solve_probe_spectrum(&prob);
        assert!(sol.residual > 1e-3);
        // Exhaustive scan at step 0.01 finds the same floor.
        let mut floor = f64::INFINITY;
        for i in 0..=100 {
            for j in 0..=(100 - i) {
                let w = [
                    i as f64 / 100.0,
                    j as f64 / 100.0,
                    (100 - i - j) as f64 / 100.0,
                ];
                let w = project_simplex(&w);
                floor = floor.min(reachability_residual(&prob, &w).unwrap().norm());
            }
        }
        assert!(floor > 1e-3);
        assert!(sol.residual <= floor + 1e-12);
    }

    #[test]
    fn simplex_projection_examples() {
        assert_eq!(project_simplex(&[0.2, 0.8]), vec![0.2, 0.8]);
        assert_eq!(project_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let w = project_simplex(&[0.0, 0.0, 0.0]);
        assert!(w.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn forward_instances_are_recovered(seed in any::<u64>(), n in 2usize..=3) {
            let mut r = rng(seed);
            let h = random_hermitian(&mut r, n, 1.0);
            let energies: Vec<f64> = (0..n)
                .map(|m| m as f64 - 0.5 * (n - 1) as f64 + 0.3 * rand::Rng::random::<f64>(&mut r))
                .collect();
            let t = 0.5 + rand::Rng::random::<f64>(&mut r) * 2.0;
            let p = random_simplex(&mut r, n);
            let w_star = random_simplex(&mut r, n);
            let prob = ReachabilityProblem::forward(&h, &energies, t, &p, &w_star).unwrap();
            prop_assert!(prob.coefficients().column_norm_defect() <= 1e-10);
            prop_assert!(reachability_residual(&prob, &w_star).unwrap().norm() <= 1e-12);
            let sol = solve_probe_spectrum(&prob);
            prop_assert!(sol.residual <= 1e-8, "residual {} after {}", sol.residual, sol.iterations);
        }

        #[test]
        fn general_state_matches_channel(seed in any::<u64>(), n in 2usize..=3, t in 0.0f64..3.0) {
            use crate::nlevel::{apply_channel, conditional_decomposition, kraus_from_probe, ProductHamiltonian};
            use crate::opkit::{diag_real, max_abs_diff, DensityMatrix};
            let mut r = rng(seed);
            let h_s = random_hermitian(&mut r, n, 1.0);
            let h_p = random_hermitian(&mut r, n, 1.0);
            let h = ProductHamiltonian::new(h_s.clone(), h_p).unwrap();
            let p = random_simplex(&mut r, n);
            let w = random_simplex(&mut r, n);
            let v = &h.probe_eig().vectors;
            let probe = DensityMatrix::new(v * diag_real(&w) * v.adjoint()).unwrap();
            let ch = kraus_from_probe(&conditional_decomposition(&h, t), &probe).unwrap();
            let out = apply_channel(&ch, &DensityMatrix::diagonal(&p).unwrap()).unwrap();
            let formula = general_reduced_state(&h_s, &h.probe_eig().values, t, &p, &w).unwrap();
            prop_assert!(max_abs_diff(out.matrix(), &formula) <= 1e-10);
        }

        #[test]
        fn projection_lands_on_simplex(v in proptest::collection::vec(-3.0f64..3.0, 1..8)) {
            let w = project_simplex(&v);
            prop_assert!(w.iter().all(|&x| x >= 0.0));
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }
}
