//! Thermal preparation of the two-level probe.
//!
//! A probe left to equilibrate at temperature `T` (with `k_B = 1`) occupies
//! its lower level `|0⟩` with probability
//! `p_p = e^{-E₀/T} / (e^{-E₀/T} + e^{-E₁/T})`. Tuning the gap `E₁ - E₀`
//! dials in any `p_p` strictly inside `(0, 1)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    /// Energy of `|0⟩`.
    pub e0: f64,
    /// Energy of `|1⟩`.
    pub e1: f64,
    pub temperature: f64,
}

impl ThermalSpec {
    pub fn new(e0: f64, e1: f64, temperature: f64) -> Result<Self> {
        check_temperature(temperature)?;
        Ok(Self {
            e0,
            e1,
            temperature,
        })
    }

    pub fn gap(&self) -> f64 {
        self.e1 - self.e0
    }
}

fn check_temperature(temperature: f64) -> Result<()> {
    if temperature > 0.0 && temperature.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "temperature must be positive, got {temperature}"
        )))
    }
}

/// Equilibrium occupancy of `|0⟩`, evaluated as the logistic
/// `1 / (1 + e^{-(E₁-E₀)/T})`.
pub fn thermal_occupancy(spec: &ThermalSpec) -> Result<f64> {
    check_temperature(spec.temperature)?;
    let x = spec.gap() / spec.temperature;
    Ok(if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    })
}

/// Both level populations, each evaluated without cancellation so that the
/// smaller one keeps full relative precision even when it is far below the
/// spacing of `f64` near 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPopulations {
    /// Occupancy of `|0⟩` (this is `p_p`).
    pub ground: f64,
    /// Occupancy of `|1⟩`.
    pub excited: f64,
    /// `ln(ground / excited)`, kept separately since it is exact to rounding
    /// even when one population underflows.
    log_ratio: f64,
}

pub fn thermal_populations(spec: &ThermalSpec) -> Result<ThermalPopulations> {
    check_temperature(spec.temperature)?;
    let x = spec.gap() / spec.temperature;
    let ground = thermal_occupancy(spec)?;
    let excited = thermal_occupancy(&ThermalSpec {
        e0: spec.e1,
        e1: spec.e0,
        ..*spec
    })?;
    Ok(ThermalPopulations {
        ground,
        excited,
        log_ratio: x,
    })
}

impl ThermalPopulations {
    /// Build from explicit populations. They must be positive and sum to 1.
    pub fn from_populations(ground: f64, excited: f64) -> Result<Self> {
        if ground <= 0.0 || excited <= 0.0 {
            return Err(Error::Infeasible(format!(
                "populations ({ground}, {excited}) need an infinite gap"
            )));
        }
        if (ground + excited - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "populations ({ground}, {excited}) do not sum to 1"
            )));
        }
        Ok(Self {
            ground,
            excited,
            log_ratio: ground.ln() - excited.ln(),
        })
    }

    /// Gap `E₁ - E₀` realizing these populations at `temperature`.
    pub fn required_gap(&self, temperature: f64) -> Result<f64> {
        check_temperature(temperature)?;
        Ok(temperature * self.log_ratio)
    }
}

/// Gap `E₁ - E₀` that yields occupancy `p_p` at `temperature`.
///
/// Only `p_p` is known here, so once `1 - p_p` drops near the `f64` spacing
/// (gaps beyond roughly `9T`) the inversion loses digits; use
/// [`ThermalPopulations::required_gap`] when both tails matter.
pub fn required_gap(p_p: f64, temperature: f64) -> Result<f64> {
    check_temperature(temperature)?;
    if p_p <= 0.0 || p_p >= 1.0 {
        return Err(Error::Infeasible(format!(
            "occupancy {p_p} needs an infinite gap; thermal states are strictly mixed"
        )));
    }
    // ln(p/(1-p)) = ln p - ln1p(-p) keeps precision near both ends.
    Ok(temperature * (p_p.ln() - (-p_p).ln_1p()))
}
