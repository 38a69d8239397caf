use num_complex::Complex64;

use super::ConditionalDecomposition;
use crate::error::{Error, Result};
use crate::opkit::{
    identity, max_abs_diff, unitarity_defect, ComplexMatrix, DensityMatrix, HERMITIAN_TOL,
};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Random-unitary channel `ρ ↦ Σ_M p_M U_M ρ U_M†`, i.e. Kraus operators
/// `K_M = √p_M U_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    weights: Vec<f64>,
    unitaries: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(weights: Vec<f64>, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        if weights.len() != unitaries.len() || weights.is_empty() {
            return Err(Error::Dimension(format!(
                "{} weights for {} unitaries",
                weights.len(),
                unitaries.len()
            )));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::Probability(format!(
                "negative or non-finite weight in {weights:?}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Probability(format!("weights sum to {total}")));
        }
        let n = unitaries[0].nrows();
        for u in &unitaries {
            if u.shape() != (n, n) {
                return Err(Error::Dimension("unitaries differ in shape".into()));
            }
            let defect = unitarity_defect(u);
            if defect.is_nan() || defect > HERMITIAN_TOL {
                return Err(Error::Domain(format!(
                    "operator is not unitary (defect {defect:.3e})"
                )));
            }
        }
        Ok(Self { weights, unitaries })
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].nrows()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn kraus_operators(&self) -> Vec<ComplexMatrix> {
        self.weights
            .iter()
            .zip(&self.unitaries)
            .map(|(&w, u)| u * Complex64::from(w.sqrt()))
            .collect()
    }

    /// Largest entry of `|Σ K† K - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.dim();
        let sum = self
            .kraus_operators()
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, k| acc + k.adjoint() * k);
        max_abs_diff(&sum, &identity(n))
    }
}

/// Attach the probe populations `⟨M|ρ_p|M⟩` (in the `h_p` eigenbasis) to the
/// conditional propagators.
pub fn kraus_from_probe(
    decomp: &ConditionalDecomposition,
    probe: &DensityMatrix,
) -> Result<KrausChannel> {
    if probe.dim() != decomp.dim() {
        return Err(Error::Dimension(format!(
            "probe state has dimension {}, decomposition {}",
            probe.dim(),
            decomp.dim()
        )));
    }
    let rho = probe.matrix();
    let mut weights: Vec<f64> = (0..decomp.dim())
        .map(|m| {
            let ket = decomp.probe_basis.column(m);
            (ket.adjoint() * rho * ket)[(0, 0)].re.max(0.0)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    KrausChannel::new(weights, decomp.unitaries.clone())
}

pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != ch.dim() {
        return Err(Error::Dimension(format!(
            "state has dimension {}, channel {}",
            rho.dim(),
            ch.dim()
        )));
    }
    let n = ch.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for (&w, u) in ch.weights.iter().zip(&ch.unitaries) {
        if w > 0.0 {
            out += (u * rho.matrix() * u.adjoint()) * Complex64::from(w);
        }
    }
    let out = (&out + out.adjoint()) * Complex64::from(0.5);
    DensityMatrix::new(out)
}
