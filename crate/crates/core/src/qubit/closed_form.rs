//! Closed-form reduced dynamics of the qubit pair.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{
    c, conditional_unitaries_fixed, overlap_angles, probe_mixing_angle, probe_pm_vectors,
    to_dynamic, to_fixed, OverlapAngles, QubitCouplings, EXCITED, GROUND, M2,
};
use crate::error::{Error, Result};
use crate::opkit::{eig_hermitian, ComplexMatrix, DensityMatrix};

/// Diagonal probe `p_p|0⟩⟨0| + (1-p_p)|1⟩⟨1|` written in the `|±⟩` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PMProbeComponents {
    /// `⟨+|ρ_p|+⟩ = cos²(θ/2) - p_p cos θ`
    pub pp_plus: f64,
    /// `⟨-|ρ_p|-⟩ = 1 - ⟨+|ρ_p|+⟩`
    pub pp_minus: f64,
    /// `⟨+|ρ_p|-⟩ = ⟨-|ρ_p|+⟩ = ½ sin θ - p_p sin θ`
    pub pm_cross: f64,
}

pub fn pm_components(theta: f64, p_p: f64) -> PMProbeComponents {
    let half = (theta / 2.0).cos();
    let pp_plus = half * half - p_p * theta.cos();
    PMProbeComponents {
        pp_plus,
        pp_minus: 1.0 - pp_plus,
        pm_cross: 0.5 * theta.sin() - p_p * theta.sin(),
    }
}

/// `(⟨+|ρ_p|+⟩, ⟨-|ρ_p|-⟩)` for an arbitrary probe state, coherences included.
pub fn pm_populations(theta: f64, rho_p: &DensityMatrix) -> Result<(f64, f64)> {
    if rho_p.dim() != 2 {
        return Err(Error::Dimension(format!(
            "probe must be two-level, got dimension {}",
            rho_p.dim()
        )));
    }
    let (plus, minus) = probe_pm_vectors(theta);
    let pop = |v: &ComplexMatrix| (v.adjoint() * rho_p.matrix() * v)[(0, 0)].re;
    Ok((pop(&plus), pop(&minus)))
}

/// Reduced system state in the moving frame `{ψ₊₀, ψ⊥₊₀}`.
///
/// `rho10` is the lower-left element `⟨ψ⊥₊₀|ρ_s|ψ₊₀⟩`. With this (row,
/// column) indexing the coherence carries `e^{+iβ}`:
/// `rho10 = ½ ρ_p⁻⁻ sin 2α e^{iβ} (2p_s - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedEntries {
    pub rho00: f64,
    pub rho11: f64,
    pub rho10: Complex64,
}

impl ReducedEntries {
    /// Upper-right element `⟨ψ₊₀|ρ_s|ψ⊥₊₀⟩`.
    pub fn rho01(&self) -> Complex64 {
        self.rho10.conj()
    }

    pub(crate) fn frame_matrix(&self) -> M2 {
        M2::new(c(self.rho00), self.rho01(), self.rho10, c(self.rho11))
    }

    pub fn matrix(&self) -> ComplexMatrix {
        to_dynamic(&self.frame_matrix())
    }
}

/// Frame entries for a system starting in `p_s|0⟩⟨0| + (1-p_s)|1⟩⟨1|`, given
/// the probe's `|-⟩` population.
pub fn reduced_entries(p_s: f64, pp_minus: f64, ang: &OverlapAngles) -> ReducedEntries {
    let pp_plus = 1.0 - pp_minus;
    let (sin_a, cos_a) = ang.alpha.sin_cos();
    let (sin2, cos2) = (sin_a * sin_a, cos_a * cos_a);
    let rho00 = p_s * pp_plus + (1.0 - p_s) * pp_minus * sin2 + p_s * pp_minus * cos2;
    let rho11 = (1.0 - p_s) * pp_plus + p_s * pp_minus * sin2 + (1.0 - p_s) * pp_minus * cos2;
    let magnitude = 0.5 * pp_minus * (2.0 * ang.alpha).sin() * (2.0 * p_s - 1.0);
    ReducedEntries {
        rho00,
        rho11,
        rho10: Complex64::from_polar(magnitude, ang.beta),
    }
}

/// Frame entries with a diagonal probe prepared at `p_p`.
pub fn reduced_state_closed_form(
    p_s: f64,
    theta: f64,
    p_p: f64,
    ang: &OverlapAngles,
) -> ReducedEntries {
    reduced_entries(p_s, pm_components(theta, p_p).pp_minus, ang)
}

/// Frame basis `[ψ₊₀, ψ⊥₊₀]` as the columns of a unitary.
pub(crate) fn frame(u_plus: &M2) -> M2 {
    M2::from_columns(&[u_plus.column(GROUND), u_plus.column(EXCITED)])
}

/// Frame entries rotated back to the computational basis.
pub(crate) fn to_computational(u_plus: &M2, entries: &ReducedEntries) -> M2 {
    let w = frame(u_plus);
    w * entries.frame_matrix() * w.adjoint()
}

/// Entries of a computational-basis state in the `{ψ₊₀, ψ⊥₊₀}` frame of
/// `(g, t)`.
pub fn frame_entries(g: &QubitCouplings, t: f64, rho: &DensityMatrix) -> Result<ReducedEntries> {
    if rho.dim() != 2 {
        return Err(Error::Dimension(format!(
            "expected a qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let (u_plus, _) = conditional_unitaries_fixed(g, t);
    let w = frame(&u_plus);
    let m = w.adjoint() * to_fixed(rho.matrix()) * w;
    Ok(ReducedEntries {
        rho00: m[(0, 0)].re,
        rho11: m[(1, 1)].re,
        rho10: m[(1, 0)],
    })
}

/// Closed-form reduced state in the computational basis for a diagonal
/// system state `p_s` and an arbitrary two-level probe state.
pub fn closed_form_state(
    g: &QubitCouplings,
    t: f64,
    p_s: f64,
    rho_p0: &DensityMatrix,
) -> Result<DensityMatrix> {
    g.validate()?;
    let theta = probe_mixing_angle(g)?;
    let (_, pp_minus) = pm_populations(theta, rho_p0)?;
    let ang = overlap_angles(g, t);
    let entries = reduced_entries(p_s, pp_minus, &ang);
    let (u_plus, _) = conditional_unitaries_fixed(g, t);
    DensityMatrix::new(to_dynamic(&hermitize(to_computational(&u_plus, &entries))))
}

/// Two-branch mixture `ρ⁺⁺ U₊ρ_sU₊† + ρ⁻⁻ U₋ρ_sU₋†` for arbitrary system and
/// probe states. The `|±⟩` cross terms of the probe drop out of the trace.
pub fn conditional_reduced_state(
    g: &QubitCouplings,
    t: f64,
    rho_s0: &DensityMatrix,
    rho_p0: &DensityMatrix,
) -> Result<DensityMatrix> {
    g.validate()?;
    if rho_s0.dim() != 2 {
        return Err(Error::Dimension(format!(
            "system must be two-level, got dimension {}",
            rho_s0.dim()
        )));
    }
    let theta = probe_mixing_angle(g)?;
    let (pp_plus, pp_minus) = pm_populations(theta, rho_p0)?;
    let (u_plus, u_minus) = conditional_unitaries_fixed(g, t);
    let rho = to_fixed(rho_s0.matrix());
    let out = u_plus * rho * u_plus.adjoint() * c(pp_plus)
        + u_minus * rho * u_minus.adjoint() * c(pp_minus);
    DensityMatrix::new(to_dynamic(&hermitize(out)))
}

pub(crate) fn hermitize(m: M2) -> M2 {
    (m + m.adjoint()) * c(0.5)
}

/// Eigen-decomposition of the reduced state in the `{ψ₊₀, ψ⊥₊₀}` frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralForm {
    pub e_plus: f64,
    pub e_minus: f64,
    /// `Arg(rho10)`.
    pub gamma: f64,
    /// Mixing angle `Γ ∈ [0, π]`,
    /// `cos Γ = (ρ⁰⁰ - ρ¹¹)/√((ρ⁰⁰ - ρ¹¹)² + 4|ρ¹⁰|²)`.
    pub mixing: f64,
    /// `cos(Γ/2)|ψ₊₀⟩ + sin(Γ/2) e^{iγ}|ψ⊥₊₀⟩`, as frame coordinates.
    pub psi_plus: [Complex64; 2],
    /// Orthogonal partner `-sin(Γ/2) e^{-iγ}|ψ₊₀⟩ + cos(Γ/2)|ψ⊥₊₀⟩`.
    pub psi_minus: [Complex64; 2],
}

/// Spectral form of the frame matrix `[[ρ⁰⁰, ρ¹⁰*], [ρ¹⁰, ρ¹¹]]`.
pub fn spectral_form(rho00: f64, rho11: f64, rho10: Complex64) -> Result<SpectralForm> {
    if ![rho00, rho11, rho10.re, rho10.im]
        .iter()
        .all(|x| x.is_finite())
    {
        return Err(Error::State("non-finite entries".into()));
    }
    if (rho00 + rho11 - 1.0).abs() > 1e-10 {
        return Err(Error::State(format!(
            "populations {rho00} + {rho11} do not sum to 1"
        )));
    }
    let diff = rho00 - rho11;
    let root = (diff * diff + 4.0 * rho10.norm_sqr()).sqrt();
    let sum = rho00 + rho11;
    let e_plus = 0.5 * (sum + root);
    let e_minus = 0.5 * (sum - root);
    if e_minus < -1e-10 {
        return Err(Error::State(format!(
            "entries describe a non-positive matrix (eigenvalue {e_minus:.3e})"
        )));
    }
    let mixing = if root == 0.0 {
        0.0
    } else {
        (2.0 * rho10.norm()).atan2(diff)
    };
    let gamma = if rho10.norm() == 0.0 {
        0.0
    } else {
        rho10.arg()
    };
    let (s, co) = (mixing / 2.0).sin_cos();
    let psi_plus = [c(co), Complex64::from_polar(s, gamma)];
    let psi_minus = [-Complex64::from_polar(s, -gamma), c(co)];

    debug_assert!({
        let m = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(rho00),
            (1, 1) => c(rho11),
            (1, 0) => rho10,
            _ => rho10.conj(),
        });
        let values = eig_hermitian(&m).map(|e| e.values).unwrap_or_default();
        values.len() == 2 && (values[1] - e_plus).abs() < 1e-9 && (values[0] - e_minus).abs() < 1e-9
    });

    Ok(SpectralForm {
        e_plus,
        e_minus,
        gamma,
        mixing,
        psi_plus,
        psi_minus,
    })
}

/// Probe occupancy `p_p` for which the frame population `ρ⁰⁰` equals `q`:
///
/// ```text
///        q - p_s cos²(θ/2) - sin²(θ/2) sin²α - p_s sin²(θ/2) cos 2α
/// p_p = ─────────────────────────────────────────────────────────────
///             cos θ sin²α + p_s cos θ cos 2α - p_s cos θ
/// ```
///
/// The denominator equals `cos θ sin²α (1 - 2p_s)` and vanishes at `α = nπ`,
/// `θ = π/2` and `p_s = ½`; those cases are reported, not divided through.
pub fn analytic_conditions(p_s: f64, q: f64, theta: f64, alpha: f64) -> Result<f64> {
    let (sh, ch) = (theta / 2.0).sin_cos();
    let sa = alpha.sin();
    let cos_t = theta.cos();
    let cos_2a = (2.0 * alpha).cos();
    let numerator = q - p_s * ch * ch - sh * sh * sa * sa - p_s * sh * sh * cos_2a;
    let denominator = cos_t * sa * sa + p_s * cos_t * cos_2a - p_s * cos_t;
    if denominator.abs() <= 1e-12 {
        return Err(Error::DegenerateCondition { denominator });
    }
    let p_p = numerator / denominator;
    if !(0.0..=1.0).contains(&p_p) {
        return Err(Error::Infeasible(format!(
            "required probe occupancy {p_p} lies outside [0, 1]"
        )));
    }
    Ok(p_p)
}

/// Whether `(θ, p_p, α)` satisfies `cos θ = 1/(1 - 2p_p)` and `α = nπ` to 1e-10.
pub fn satisfies_zero_coherence(theta: f64, p_p: f64, alpha: f64) -> bool {
    let denom = 1.0 - 2.0 * p_p;
    if denom == 0.0 {
        return false;
    }
    let cos_ok = (theta.cos() - 1.0 / denom).abs() <= 1e-10;
    let turns = alpha / PI;
    cos_ok && (turns - turns.round()).abs() * PI <= 1e-10
}
