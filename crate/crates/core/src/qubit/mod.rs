//! Two-level system coupled to a two-level probe.
//!
//! The interaction is
//!
//! ```text
//! H_I(g) = (g1 σ_z + g2 σ⁺ + g2* σ⁻)_s ⊗ (g3 σ_x + g4 σ_z)_p
//! ```
//!
//! Matrices use the `{|1⟩, |0⟩}` ordering with `σ_z|1⟩ = +|1⟩`; `|0⟩` is the
//! ground state. Since the probe factor has eigenvectors
//! `|+⟩ = cos(θ/2)|1⟩ + sin(θ/2)|0⟩` and `|-⟩ = sin(θ/2)|1⟩ - cos(θ/2)|0⟩`
//! with eigenvalues `±√(g3² + g4²)`, the composite propagator splits into
//! two conditional system unitaries `U_±`, and the reduced state is a
//! two-term mixture weighted by the probe's `|±⟩` populations.

mod closed_form;
mod solver;

pub use closed_form::{
    analytic_conditions, closed_form_state, conditional_reduced_state, frame_entries,
    pm_components, pm_populations, reduced_entries, reduced_state_closed_form,
    satisfies_zero_coherence, spectral_form, PMProbeComponents, ReducedEntries, SpectralForm,
};
pub use solver::{
    leading_eigenvalue_range, solve_controls_numeric, ControlSolution, ReachableRange, SolverBudget,
};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::opkit::{kron, ComplexMatrix, DensityMatrix};

pub(crate) type M2 = Matrix2<Complex64>;
pub(crate) type V2 = Vector2<Complex64>;

/// Row/column index of `|1⟩` (excited).
pub const EXCITED: usize = 0;
/// Row/column index of `|0⟩` (ground).
pub const GROUND: usize = 1;

/// Overlaps below this are treated as exactly zero when extracting phases.
const ZERO_OVERLAP: f64 = 1e-12;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub(crate) fn to_dynamic(m: &M2) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

pub(crate) fn to_fixed(m: &ComplexMatrix) -> M2 {
    M2::from_fn(|i, j| m[(i, j)])
}

/// Coupling constants `(g1, g2, g3, g4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitCouplings {
    pub g1: f64,
    pub g2: Complex64,
    pub g3: f64,
    pub g4: f64,
}

impl QubitCouplings {
    pub fn new(g1: f64, g2: Complex64, g3: f64, g4: f64) -> Result<Self> {
        let g = Self { g1, g2, g3, g4 };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.g1, self.g2.re, self.g2.im, self.g3, self.g4]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Domain("couplings must be finite".into()));
        }
        if self.g3 == 0.0 && self.g4 == 0.0 {
            return Err(Error::DegenerateProbe);
        }
        Ok(())
    }

    /// `√(g3² + g4²)`, the magnitude of the probe factor's eigenvalues.
    pub fn probe_strength(&self) -> f64 {
        self.g3.hypot(self.g4)
    }

    /// `g1 σ_z + g2 σ⁺ + g2* σ⁻`.
    pub(crate) fn system_factor_fixed(&self) -> M2 {
        M2::new(c(self.g1), self.g2, self.g2.conj(), c(-self.g1))
    }

    pub fn system_factor(&self) -> ComplexMatrix {
        to_dynamic(&self.system_factor_fixed())
    }

    /// `g3 σ_x + g4 σ_z`.
    pub fn probe_factor(&self) -> ComplexMatrix {
        to_dynamic(&M2::new(c(self.g4), c(self.g3), c(self.g3), c(-self.g4)))
    }
}

/// Local system rotation `f_s(θ, φ)`; the composite operator is `f_s ⊗ I_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalRotation {
    pub theta: f64,
    pub phi: f64,
}

impl LocalRotation {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..=2.0 * PI).contains(&phi) {
            return Err(Error::Domain(format!(
                "rotation angles (θ={theta}, φ={phi}) outside [0, π] × [0, 2π]"
            )));
        }
        Ok(Self { theta, phi })
    }

    pub(crate) fn matrix_fixed(&self) -> M2 {
        let (s, co) = (self.theta / 2.0).sin_cos();
        M2::new(
            c(co),
            -Complex64::from_polar(s, self.phi),
            Complex64::from_polar(s, -self.phi),
            c(co),
        )
    }

    /// `f_s` as a 2×2 matrix.
    pub fn matrix(&self) -> ComplexMatrix {
        to_dynamic(&self.matrix_fixed())
    }

    /// `f_s ⊗ I_p`.
    pub fn composite(&self) -> ComplexMatrix {
        kron(&self.matrix(), &ComplexMatrix::identity(2, 2))
    }
}

/// `p|0⟩⟨0| + (1 - p)|1⟩⟨1|`; used for both the system and the probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalQubitState {
    pub p: f64,
}

impl DiagonalQubitState {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("population {p} outside [0, 1]")));
        }
        Ok(Self { p })
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::diagonal(&[1.0 - self.p, self.p]).expect("p in [0, 1]")
    }
}

/// Overlap angles of the conditionally evolved ground state.
///
/// `cos α = |⟨ψ₊₀|ψ₋₀⟩|` and
/// `β = Arg⟨ψ⊥₊₀|ψ₋₀⟩ - Arg⟨ψ₊₀|ψ₋₀⟩`, with `ψ₊₀ = U₊|0⟩`,
/// `ψ₋₀ = U₋|0⟩`, `ψ⊥₊₀ = U₊|1⟩`. When either overlap vanishes the phase is
/// meaningless and `β = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapAngles {
    pub alpha: f64,
    pub beta: f64,
}

impl OverlapAngles {
    pub(crate) fn from_unitaries(u_plus: &M2, u_minus: &M2) -> Self {
        let psi_plus: V2 = u_plus.column(GROUND).into_owned();
        let psi_perp: V2 = u_plus.column(EXCITED).into_owned();
        let psi_minus: V2 = u_minus.column(GROUND).into_owned();
        let along = psi_plus.dotc(&psi_minus);
        let across = psi_perp.dotc(&psi_minus);
        // atan2 of the two components keeps α accurate near 0 and π/2.
        let alpha = across.norm().atan2(along.norm());
        let beta = if along.norm() < ZERO_OVERLAP || across.norm() < ZERO_OVERLAP {
            0.0
        } else {
            wrap_phase(across.arg() - along.arg())
        };
        Self { alpha, beta }
    }
}

/// Wrap into `(-π, π]`.
pub(crate) fn wrap_phase(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    } else if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Composite interaction Hamiltonian (system ⊗ probe).
pub fn build_interaction(g: &QubitCouplings) -> ComplexMatrix {
    kron(&g.system_factor(), &g.probe_factor())
}

/// Couplings of `F H_I(g) F†` for `F = f_s ⊗ I`. The probe couplings are
/// untouched.
pub fn transform_couplings(r: &LocalRotation, g: &QubitCouplings) -> QubitCouplings {
    let f = r.matrix_fixed();
    let h = f * g.system_factor_fixed() * f.adjoint();
    QubitCouplings {
        g1: 0.5 * (h[(0, 0)].re - h[(1, 1)].re),
        g2: h[(0, 1)],
        g3: g.g3,
        g4: g.g4,
    }
}

/// Mixing angle of the probe factor: `sin θ = g3/√(g3²+g4²)` and
/// `cos θ = g4/√(g3²+g4²)`, which lies in `[0, π]` whenever `g3 ≥ 0`
/// (and in `(-π, 0)` otherwise, keeping `|±⟩` exact eigenvectors).
pub fn probe_mixing_angle(g: &QubitCouplings) -> Result<f64> {
    if g.g3 == 0.0 && g.g4 == 0.0 {
        return Err(Error::DegenerateProbe);
    }
    Ok(g.g3.atan2(g.g4))
}

/// Probe eigenvectors `|+⟩, |-⟩` for mixing angle `theta`.
pub fn probe_pm_vectors(theta: f64) -> (ComplexMatrix, ComplexMatrix) {
    let (s, co) = (theta / 2.0).sin_cos();
    (
        ComplexMatrix::from_column_slice(2, 1, &[c(co), c(s)]),
        ComplexMatrix::from_column_slice(2, 1, &[c(s), c(-co)]),
    )
}

/// `exp(-i φ h)` for traceless Hermitian 2×2 `h = [[a, b], [b*, -a]]`:
/// `cos(φω) I - i sin(φω) h/ω` with `ω² = a² + |b|²`.
pub(crate) fn su2_exp(h: &M2, phi: f64) -> M2 {
    let omega = (h[(0, 0)].re.powi(2) + h[(0, 1)].norm_sqr()).sqrt();
    if omega == 0.0 {
        return M2::identity();
    }
    let (s, co) = (phi * omega).sin_cos();
    M2::identity() * c(co) - h * Complex64::new(0.0, s / omega)
}

/// The two conditional system unitaries.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPair {
    /// `exp(-i H₊ t)` with `H₊ = +√(g3²+g4²)(g1σ_z + g2σ⁺ + g2*σ⁻)`.
    pub plus: ComplexMatrix,
    /// `exp(-i H₋ t) = U₊†`.
    pub minus: ComplexMatrix,
}

pub(crate) fn conditional_unitaries_fixed(g: &QubitCouplings, t: f64) -> (M2, M2) {
    let h = g.system_factor_fixed();
    let r = g.probe_strength();
    (su2_exp(&h, r * t), su2_exp(&h, -r * t))
}

pub fn conditional_unitaries(g: &QubitCouplings, t: f64) -> ConditionalPair {
    let (plus, minus) = conditional_unitaries_fixed(g, t);
    ConditionalPair {
        plus: to_dynamic(&plus),
        minus: to_dynamic(&minus),
    }
}

pub fn overlap_angles(g: &QubitCouplings, t: f64) -> OverlapAngles {
    let (plus, minus) = conditional_unitaries_fixed(g, t);
    OverlapAngles::from_unitaries(&plus, &minus)
}
