//! Validation and execution of experiment configurations.

use std::path::{Path, PathBuf};

use iqc_core::nlevel::{
    expansion_coefficients, reachability_residual, solve_probe_spectrum, ProductHamiltonian,
    ReachabilityProblem,
};
use iqc_core::opkit::{trace_distance, ComplexMatrix, DensityMatrix};
use iqc_core::qubit::{
    closed_form_state, frame_entries, leading_eigenvalue_range, reduced_state_closed_form,
    solve_controls_numeric, spectral_form, DiagonalQubitState, OverlapAngles, QubitCouplings,
};
use iqc_core::random::{random_hermitian, rng};
use iqc_core::thermal::{required_gap, thermal_occupancy, ThermalSpec};
use iqc_core::verify::check_solution;
use iqc_core::SolverBudget;
use serde::Serialize;

use crate::config::{
    density, matrix, ExperimentConfig, Mode, ProbeSpec, ReachConfig, ReachTarget, SimulateConfig,
    SolveConfig, SweepConfig, ThermalConfig,
};
use crate::error::CliError;

/// Residual below which a probe spectrum counts as reached.
pub const REACH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Completed,
    /// The run finished but the target was not reached.
    Infeasible,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Completed => 0,
            Status::Infeasible => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub mode: Mode,
    pub output: PathBuf,
    pub status: Status,
}

pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ExperimentConfig::parse(&text, &path.display().to_string())
}

/// Everything a run needs, validated.
enum Plan {
    Simulate(SimulatePlan),
    Solve(SolvePlan),
    Reach(ReachPlan),
    Thermal(ThermalPlan),
    Sweep(SweepPlan),
}

pub fn check(config: &ExperimentConfig) -> Result<(), CliError> {
    prepare(config).map(|_| ())
}

fn prepare(config: &ExperimentConfig) -> Result<Plan, CliError> {
    Ok(match config {
        ExperimentConfig::Simulate(c) => Plan::Simulate(SimulatePlan::new(c)?),
        ExperimentConfig::Solve(c) => Plan::Solve(SolvePlan::new(c)?),
        ExperimentConfig::Reach(c) => Plan::Reach(ReachPlan::new(c)?),
        ExperimentConfig::Thermal(c) => Plan::Thermal(ThermalPlan::new(c)?),
        ExperimentConfig::Sweep(c) => Plan::Sweep(SweepPlan::new(c)?),
    })
}

/// Run `config` and write its result into `out_dir` as `<stem>.csv` or
/// `<stem>.json`.
pub fn execute(config: &ExperimentConfig, stem: &str, out_dir: &Path) -> Result<Report, CliError> {
    let plan = prepare(config)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let (ext, bytes, status) = match plan {
        Plan::Simulate(p) => ("csv", p.run()?, Status::Completed),
        Plan::Sweep(p) => ("csv", p.run()?, Status::Completed),
        Plan::Solve(p) => {
            let (bytes, feasible) = p.run()?;
            (
                "json",
                bytes,
                if feasible {
                    Status::Completed
                } else {
                    Status::Infeasible
                },
            )
        }
        Plan::Reach(p) => {
            let (bytes, feasible) = p.run()?;
            (
                "json",
                bytes,
                if feasible {
                    Status::Completed
                } else {
                    Status::Infeasible
                },
            )
        }
        Plan::Thermal(p) => ("json", p.run()?, Status::Completed),
    };
    let output = out_dir.join(format!("{stem}.{ext}"));
    std::fs::write(&output, bytes).map_err(|e| CliError::io(&output, e))?;
    Ok(Report {
        mode: config.mode(),
        output,
        status,
    })
}

/// 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_bytes(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| fmt(x)))?;
    }
    w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))
}

fn json_bytes(value: &impl Serialize) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn occupancy(p: f64, what: &str) -> Result<f64, CliError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CliError::Invalid(format!("{what} = {p} outside [0, 1]")));
    }
    Ok(p)
}

struct SimulatePlan {
    couplings: QubitCouplings,
    p_s: f64,
    probe: DensityMatrix,
    times: Vec<f64>,
    target: DensityMatrix,
}

impl SimulatePlan {
    fn new(c: &SimulateConfig) -> Result<Self, CliError> {
        let couplings = c.couplings.build()?;
        let p_s = occupancy(c.p_s, "p_s")?;
        let probe = match &c.probe {
            ProbeSpec::Occupancy { p_p } => {
                DiagonalQubitState::new(occupancy(*p_p, "p_p")?)?.density()
            }
            ProbeSpec::Thermal { thermal } => {
                DiagonalQubitState::new(thermal_occupancy(&thermal.build()?)?)?.density()
            }
            ProbeSpec::State { state } => density(state, "probe state")?,
        };
        if probe.dim() != 2 {
            return Err(CliError::Invalid("probe state must be 2x2".into()));
        }
        let times = c.times.values();
        if times.iter().any(|t| !t.is_finite()) {
            return Err(CliError::Invalid("times must be finite".into()));
        }
        let target = match &c.target {
            Some(m) => density(m, "target")?,
            None => DiagonalQubitState::new(p_s)?.density(),
        };
        if target.dim() != 2 {
            return Err(CliError::Invalid("target must be 2x2".into()));
        }
        Ok(Self {
            couplings,
            p_s,
            probe,
            times,
            target,
        })
    }

    fn run(&self) -> Result<Vec<u8>, CliError> {
        let mut rows = Vec::with_capacity(self.times.len());
        for &t in &self.times {
            let state = closed_form_state(&self.couplings, t, self.p_s, &self.probe)?;
            let e = frame_entries(&self.couplings, t, &state)?;
            let spec = spectral_form(e.rho00, e.rho11, e.rho10)?;
            let distance = trace_distance(&state, &self.target)?;
            rows.push(vec![
                t,
                e.rho00,
                e.rho11,
                e.rho10.re,
                e.rho10.im,
                spec.e_plus,
                spec.e_minus,
                distance,
            ]);
        }
        csv_bytes(
            &[
                "t",
                "rho00",
                "rho11",
                "re_rho10",
                "im_rho10",
                "E_plus",
                "E_minus",
                "trace_distance_to_target",
            ],
            rows,
        )
    }
}

struct SolvePlan {
    p_s: f64,
    target: DensityMatrix,
    budget: SolverBudget,
    range_lattice: usize,
}

#[derive(Serialize)]
struct CouplingsOut {
    g1: f64,
    g2: [f64; 2],
    g3: f64,
    g4: f64,
}

#[derive(Serialize)]
struct RangeOut {
    min: f64,
    max: f64,
}

#[derive(Serialize)]
struct SolveOut {
    mode: &'static str,
    p_s: f64,
    couplings: CouplingsOut,
    theta: f64,
    alpha: f64,
    beta: f64,
    p_p: f64,
    t: f64,
    residual: f64,
    oracle_residual: f64,
    feasible: bool,
    evaluations: usize,
    target_leading_eigenvalue: f64,
    reachable_leading_eigenvalue: RangeOut,
}

impl SolvePlan {
    fn new(c: &SolveConfig) -> Result<Self, CliError> {
        let target = density(&c.target, "target")?;
        if target.dim() != 2 {
            return Err(CliError::Invalid("target must be 2x2".into()));
        }
        let budget = c.budget.build();
        if budget.lattice < 2 || budget.tol.is_nan() || budget.tol <= 0.0 {
            return Err(CliError::Invalid(
                "budget needs lattice >= 2 and tol > 0".into(),
            ));
        }
        if c.range_lattice < 2 {
            return Err(CliError::Invalid("range_lattice must be at least 2".into()));
        }
        Ok(Self {
            p_s: occupancy(c.p_s, "p_s")?,
            target,
            budget,
            range_lattice: c.range_lattice,
        })
    }

    fn run(&self) -> Result<(Vec<u8>, bool), CliError> {
        let sol = solve_controls_numeric(self.p_s, &self.target, self.budget)?;
        let oracle_residual = check_solution(&sol, self.p_s, &self.target)?;
        let range = leading_eigenvalue_range(self.p_s, self.range_lattice);
        let lead = *self.target.spectrum().last().expect("non-empty spectrum");
        let g = sol.couplings;
        let out = SolveOut {
            mode: "solve",
            p_s: self.p_s,
            couplings: CouplingsOut {
                g1: g.g1,
                g2: [g.g2.re, g.g2.im],
                g3: g.g3,
                g4: g.g4,
            },
            theta: sol.theta,
            alpha: sol.alpha,
            beta: sol.beta,
            p_p: sol.p_p,
            t: sol.t,
            residual: sol.residual,
            oracle_residual,
            feasible: sol.feasible,
            evaluations: sol.evaluations,
            target_leading_eigenvalue: lead,
            reachable_leading_eigenvalue: RangeOut {
                min: range.min_leading,
                max: range.max_leading,
            },
        };
        Ok((json_bytes(&out)?, sol.feasible))
    }
}

struct ReachPlan {
    problem: ReachabilityProblem,
    w_star: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct ReachOut {
    mode: &'static str,
    dim: usize,
    initial_weights: Vec<f64>,
    target_weights: Vec<f64>,
    w: Vec<f64>,
    residual: f64,
    iterations: usize,
    feasible: bool,
    diagonal_residuals: Vec<f64>,
    off_diagonal_residuals: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w_star: Option<Vec<f64>>,
}

impl ReachPlan {
    fn new(c: &ReachConfig) -> Result<Self, CliError> {
        let n = c.initial_weights.len();
        if n == 0 {
            return Err(CliError::Invalid(
                "initial_weights must not be empty".into(),
            ));
        }
        let h_s: ComplexMatrix = match &c.h_s {
            Some(m) => matrix(m, "h_s")?,
            None => random_hermitian(&mut rng(c.seed.unwrap_or(0)), n, 1.0),
        };
        let energies = match (&c.energies, &c.h_p) {
            (Some(e), None) => e.clone(),
            (None, Some(h_p)) => ProductHamiltonian::new(h_s.clone(), matrix(h_p, "h_p")?)?
                .probe_eig()
                .values
                .clone(),
            _ => {
                return Err(CliError::Invalid(
                    "give exactly one of `energies` and `h_p`".into(),
                ))
            }
        };
        if h_s.nrows() != n || energies.len() != n {
            return Err(CliError::Invalid(format!(
                "h_s is {0}x{0} and there are {1} energies; both must match the {n} initial weights",
                h_s.nrows(),
                energies.len()
            )));
        }
        if !c.t.is_finite() {
            return Err(CliError::Invalid("t must be finite".into()));
        }
        let (problem, w_star) = match &c.target {
            ReachTarget::Weights {
                weights,
                reference_time,
            } => {
                let coefficients = expansion_coefficients(&h_s, &energies, c.t, *reference_time)?;
                let problem = ReachabilityProblem::new(
                    c.initial_weights.clone(),
                    weights.clone(),
                    coefficients,
                )?;
                (problem, None)
            }
            ReachTarget::Forward { forward_from_probe } => {
                let problem = ReachabilityProblem::forward(
                    &h_s,
                    &energies,
                    c.t,
                    &c.initial_weights,
                    forward_from_probe,
                )?;
                (problem, Some(forward_from_probe.clone()))
            }
        };
        Ok(Self { problem, w_star })
    }

    fn run(&self) -> Result<(Vec<u8>, bool), CliError> {
        let sol = solve_probe_spectrum(&self.problem);
        let parts = reachability_residual(&self.problem, &sol.w)?;
        let feasible = sol.residual <= REACH_TOL;
        let out = ReachOut {
            mode: "reach",
            dim: self.problem.dim(),
            initial_weights: self.problem.initial_weights().to_vec(),
            target_weights: self.problem.target_weights().to_vec(),
            w: sol.w,
            residual: sol.residual,
            iterations: sol.iterations,
            feasible,
            diagonal_residuals: parts.diagonal,
            off_diagonal_residuals: parts.off_diagonal.iter().map(|z| [z.re, z.im]).collect(),
            w_star: self.w_star.clone(),
        };
        Ok((json_bytes(&out)?, feasible))
    }
}

struct ThermalPlan {
    temperature: f64,
    gaps: Vec<f64>,
    occupancies: Vec<f64>,
}

#[derive(Serialize)]
struct OccupancyRow {
    gap: f64,
    p_p: f64,
}

#[derive(Serialize)]
struct GapRow {
    p_p: f64,
    gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct ThermalOut {
    mode: &'static str,
    temperature: f64,
    occupancy: Vec<OccupancyRow>,
    required_gap: Vec<GapRow>,
}

impl ThermalPlan {
    fn new(c: &ThermalConfig) -> Result<Self, CliError> {
        ThermalSpec::new(0.0, 0.0, c.temperature)?;
        for &p in &c.occupancies {
            occupancy(p, "occupancy")?;
        }
        Ok(Self {
            temperature: c.temperature,
            gaps: c.gaps.clone(),
            occupancies: c.occupancies.clone(),
        })
    }

    fn run(&self) -> Result<Vec<u8>, CliError> {
        let occupancy = self
            .gaps
            .iter()
            .map(|&gap| {
                let spec = ThermalSpec::new(0.0, gap, self.temperature)?;
                Ok(OccupancyRow {
                    gap,
                    p_p: thermal_occupancy(&spec)?,
                })
            })
            .collect::<Result<Vec<_>, iqc_core::Error>>()?;
        let required = self
            .occupancies
            .iter()
            .map(|&p_p| match required_gap(p_p, self.temperature) {
                Ok(gap) => GapRow {
                    p_p,
                    gap: Some(gap),
                    error: None,
                },
                Err(e) => GapRow {
                    p_p,
                    gap: None,
                    error: Some(e.to_string()),
                },
            })
            .collect();
        json_bytes(&ThermalOut {
            mode: "thermal",
            temperature: self.temperature,
            occupancy,
            required_gap: required,
        })
    }
}

struct SweepPlan {
    p_s: f64,
    beta: f64,
    theta: Vec<f64>,
    alpha: Vec<f64>,
    p_p: Vec<f64>,
}

impl SweepPlan {
    fn new(c: &SweepConfig) -> Result<Self, CliError> {
        let p_p = c.p_p.values();
        for &p in &p_p {
            occupancy(p, "p_p")?;
        }
        let theta = c.theta.values();
        let alpha = c.alpha.values();
        if theta.iter().chain(&alpha).any(|x| !x.is_finite()) || !c.beta.is_finite() {
            return Err(CliError::Invalid("sweep angles must be finite".into()));
        }
        Ok(Self {
            p_s: occupancy(c.p_s, "p_s")?,
            beta: c.beta,
            theta,
            alpha,
            p_p,
        })
    }

    fn run(&self) -> Result<Vec<u8>, CliError> {
        let mut rows = Vec::with_capacity(self.theta.len() * self.alpha.len() * self.p_p.len());
        for &theta in &self.theta {
            for &alpha in &self.alpha {
                let ang = OverlapAngles {
                    alpha,
                    beta: self.beta,
                };
                for &p_p in &self.p_p {
                    let e = reduced_state_closed_form(self.p_s, theta, p_p, &ang);
                    // Rejects rows that are not valid states.
                    DensityMatrix::new(e.matrix())?;
                    rows.push(vec![theta, alpha, p_p, e.rho00, e.rho10.norm()]);
                }
            }
        }
        csv_bytes(&["theta", "alpha", "p_p", "rho00", "abs_rho10"], rows)
    }
}
