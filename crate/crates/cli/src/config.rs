//! JSON experiment configuration.
//!
//! Every document is an object with a `"mode"` key. Complex numbers are
//! written `[re, im]`; a bare number is accepted for a real entry. Matrices
//! are arrays of rows.

use iqc_core::opkit::{ComplexMatrix, DensityMatrix};
use iqc_core::qubit::QubitCouplings;
use iqc_core::thermal::ThermalSpec;
use iqc_core::{Complex64, SolverBudget};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Simulate,
    Solve,
    Reach,
    Thermal,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Solve => "solve",
            Mode::Reach => "reach",
            Mode::Thermal => "thermal",
            Mode::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

pub type MatrixSpec = Vec<Vec<Entry>>;

pub fn matrix(spec: &MatrixSpec, what: &str) -> Result<ComplexMatrix, CliError> {
    let n = spec.len();
    if n == 0 || spec.iter().any(|row| row.len() != n) {
        return Err(CliError::Invalid(format!(
            "{what} must be a non-empty square matrix"
        )));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| spec[i][j].value()))
}

pub fn density(spec: &MatrixSpec, what: &str) -> Result<DensityMatrix, CliError> {
    DensityMatrix::new(matrix(spec, what)?).map_err(|e| CliError::Invalid(format!("{what}: {e}")))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingsSpec {
    pub g1: f64,
    pub g2: Entry,
    pub g3: f64,
    pub g4: f64,
}

impl CouplingsSpec {
    pub fn build(&self) -> Result<QubitCouplings, CliError> {
        Ok(QubitCouplings::new(
            self.g1,
            self.g2.value(),
            self.g3,
            self.g4,
        )?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalSpecConfig {
    #[serde(default)]
    pub e0: f64,
    pub e1: f64,
    pub temperature: f64,
}

impl ThermalSpecConfig {
    pub fn build(&self) -> Result<ThermalSpec, CliError> {
        Ok(ThermalSpec::new(self.e0, self.e1, self.temperature)?)
    }
}

/// Probe preparation: a ground occupancy, a thermal state or an explicit
/// density matrix.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ProbeSpec {
    Occupancy { p_p: f64 },
    Thermal { thermal: ThermalSpecConfig },
    State { state: MatrixSpec },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TimeGrid {
    List(Vec<f64>),
    Linspace {
        start: f64,
        stop: f64,
        points: usize,
    },
}

/// A sweep axis: fixed value, explicit list or evenly spaced range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Fixed(f64),
    List(Vec<f64>),
    Linspace {
        start: f64,
        stop: f64,
        points: usize,
    },
}

pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

impl TimeGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            TimeGrid::List(v) => v.clone(),
            TimeGrid::Linspace {
                start,
                stop,
                points,
            } => linspace(*start, *stop, *points),
        }
    }
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Fixed(x) => vec![*x],
            Axis::List(v) => v.clone(),
            Axis::Linspace {
                start,
                stop,
                points,
            } => linspace(*start, *stop, *points),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub mode: Mode,
    pub couplings: CouplingsSpec,
    pub p_s: f64,
    pub probe: ProbeSpec,
    pub times: TimeGrid,
    /// Defaults to the initial system state.
    #[serde(default)]
    pub target: Option<MatrixSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    #[serde(default = "default_lattice")]
    pub lattice: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_evals")]
    pub max_evals: usize,
}

fn default_lattice() -> usize {
    SolverBudget::default().lattice
}

fn default_tol() -> f64 {
    SolverBudget::default().tol
}

fn default_max_evals() -> usize {
    SolverBudget::default().max_evals
}

impl Default for BudgetSpec {
    fn default() -> Self {
        Self {
            lattice: default_lattice(),
            tol: default_tol(),
            max_evals: default_max_evals(),
        }
    }
}

impl BudgetSpec {
    pub fn build(&self) -> SolverBudget {
        SolverBudget {
            lattice: self.lattice,
            tol: self.tol,
            max_evals: self.max_evals,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub mode: Mode,
    pub p_s: f64,
    pub target: MatrixSpec,
    #[serde(default)]
    pub budget: BudgetSpec,
    /// Points per axis of the reachable-range scan.
    #[serde(default = "default_range_lattice")]
    pub range_lattice: usize,
}

fn default_range_lattice() -> usize {
    65
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ReachTarget {
    Weights {
        weights: Vec<f64>,
        #[serde(default)]
        reference_time: Option<f64>,
    },
    /// Build a feasible target by evolving with these probe populations.
    Forward { forward_from_probe: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReachConfig {
    pub mode: Mode,
    /// Defaults to a random Hermitian matrix drawn from `seed`.
    #[serde(default)]
    pub h_s: Option<MatrixSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Probe energies; taken from the spectrum of `h_p` when absent.
    #[serde(default)]
    pub energies: Option<Vec<f64>>,
    #[serde(default)]
    pub h_p: Option<MatrixSpec>,
    pub t: f64,
    pub initial_weights: Vec<f64>,
    pub target: ReachTarget,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalConfig {
    pub mode: Mode,
    pub temperature: f64,
    #[serde(default)]
    pub gaps: Vec<f64>,
    #[serde(default)]
    pub occupancies: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub mode: Mode,
    pub p_s: f64,
    pub theta: Axis,
    pub alpha: Axis,
    pub p_p: Axis,
    #[serde(default)]
    pub beta: f64,
}

#[derive(Debug, Clone)]
pub enum ExperimentConfig {
    Simulate(SimulateConfig),
    Solve(SolveConfig),
    Reach(ReachConfig),
    Thermal(ThermalConfig),
    Sweep(SweepConfig),
}

impl ExperimentConfig {
    pub fn mode(&self) -> Mode {
        match self {
            ExperimentConfig::Simulate(_) => Mode::Simulate,
            ExperimentConfig::Solve(_) => Mode::Solve,
            ExperimentConfig::Reach(_) => Mode::Reach,
            ExperimentConfig::Thermal(_) => Mode::Thermal,
            ExperimentConfig::Sweep(_) => Mode::Sweep,
        }
    }

    /// Parse a document. The mode is read first so that errors in the body
    /// are reported at their own line.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        #[derive(Deserialize)]
        struct Header {
            mode: Mode,
        }
        let located = |e: serde_json::Error| CliError::Parse {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        };
        let header: Header = serde_json::from_str(text).map_err(located)?;
        Ok(match header.mode {
            Mode::Simulate => {
                ExperimentConfig::Simulate(serde_json::from_str(text).map_err(located)?)
            }
            Mode::Solve => ExperimentConfig::Solve(serde_json::from_str(text).map_err(located)?),
            Mode::Reach => ExperimentConfig::Reach(serde_json::from_str(text).map_err(located)?),
            Mode::Thermal => {
                ExperimentConfig::Thermal(serde_json::from_str(text).map_err(located)?)
            }
            Mode::Sweep => ExperimentConfig::Sweep(serde_json::from_str(text).map_err(located)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_accept_real_and_pairs() {
        let m: MatrixSpec =
            serde_json::from_str("[[0.5, [0.1, -0.2]], [[0.1, 0.2], 0.5]]").unwrap();
        let a = matrix(&m, "m").unwrap();
        assert_eq!(a[(0, 1)], Complex64::new(0.1, -0.2));
        assert_eq!(a[(1, 1)], Complex64::new(0.5, 0.0));
        assert!(density(&m, "m").is_ok());
        let ragged: MatrixSpec = serde_json::from_str("[[1.0], [0.0, 1.0]]").unwrap();
        assert!(matches!(matrix(&ragged, "m"), Err(CliError::Invalid(_))));
    }

    #[test]
    fn linspace_hits_both_ends() {
        assert!(linspace(0.0, 1.0, 0).is_empty());
        assert_eq!(linspace(0.3, 1.0, 1), vec![0.3]);
        let v = linspace(0.0, 0.3, 4);
        assert_eq!(v.len(), 4);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[3], 0.3);
    }

    #[test]
    fn axes_and_grids() {
        let a: Axis = serde_json::from_str("0.5").unwrap();
        assert_eq!(a.values(), vec![0.5]);
        let a: Axis = serde_json::from_str("[1.0, 2.0]").unwrap();
        assert_eq!(a.values().len(), 2);
        let a: Axis = serde_json::from_str(r#"{"start": 0, "stop": 1, "points": 5}"#).unwrap();
        assert_eq!(a.values().len(), 5);
        let t: TimeGrid =
            serde_json::from_str(r#"{"start": 0, "stop": 10, "points": 100}"#).unwrap();
        assert_eq!(t.values().len(), 100);
    }

    #[test]
    fn parse_reports_positions() {
        let text = "{\n  \"mode\": \"thermal\",\n  \"temperature\": 1.0,\n  \"gapz\": []\n}";
        match ExperimentConfig::parse(text, "cfg.json") {
            Err(CliError::Parse { origin, line, .. }) => {
                assert_eq!(origin, "cfg.json");
                assert_eq!(line, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            ExperimentConfig::parse("{\"mode\": \"unknown\"}", "x"),
            Err(CliError::Parse { .. })
        ));
        let ok =
            ExperimentConfig::parse("{\"mode\": \"thermal\", \"temperature\": 2.0}", "x").unwrap();
        assert_eq!(ok.mode(), Mode::Thermal);
    }

    #[test]
    fn probe_variants() {
        let p: ProbeSpec = serde_json::from_str(r#"{"p_p": 0.3}"#).unwrap();
        assert!(matches!(p, ProbeSpec::Occupancy { .. }));
        let p: ProbeSpec =
            serde_json::from_str(r#"{"thermal": {"e1": 1.0, "temperature": 2.0}}"#).unwrap();
        assert!(matches!(p, ProbeSpec::Thermal { .. }));
        let p: ProbeSpec = serde_json::from_str(r#"{"state": [[1, 0], [0, 0]]}"#).unwrap();
        assert!(matches!(p, ProbeSpec::State { .. }));
    }
}
