//! Numerical search for controls that steer `p_s|0⟩⟨0| + (1-p_s)|1⟩⟨1|` to a
//! target qubit state.
//!
//! The search is restricted to transverse system couplings `g1 = 0`,
//! `|g2| = 1` and unit probe strength (`g3 = sin θ`, `g4 = cos θ`). Within
//! that family the reduced state depends on `(θ, t, p_p)` up to a rotation
//! about the z axis, and that rotation is absorbed exactly by the phase of
//! `g2` (it commutes with the diagonal initial state). Every candidate is
//! therefore scored after the optimal phase is applied, which reduces the
//! trace distance to
//! `√((ρ₀₀ - τ₀₀)² + (|ρ₀₁| - |τ₀₁|)²)`.
//!
//! Stages:
//! 1. steering rotation: a pure `|+⟩` probe and the rotation taking the
//!    initially dominant basis state onto the target's leading eigenvector;
//! 2. a `lattice³` scan of `(θ, t, p_p)`, ties broken by lowest lattice index;
//! 3. coordinate descent from the better of the two until the residual is
//!    below tolerance, the brackets collapse or the budget is spent.
//!
//! Targets outside the reachable set are returned with `feasible = false`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use super::closed_form::{
    closed_form_state, pm_components, reduced_entries, reduced_state_closed_form, to_computational,
};
use super::{
    c, overlap_angles, su2_exp, to_fixed, DiagonalQubitState, OverlapAngles, QubitCouplings,
    EXCITED, GROUND, M2,
};
use crate::error::{Error, Result};
use crate::opkit::{eig_hermitian, trace_distance, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverBudget {
    /// Points per axis of the scan lattice.
    pub lattice: usize,
    /// Trace-distance tolerance that declares a target reached.
    pub tol: f64,
    /// Closed-form evaluations allowed for the refinement stage.
    pub max_evals: usize,
}

impl Default for SolverBudget {
    fn default() -> Self {
        Self {
            lattice: 64,
            tol: 1e-8,
            max_evals: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSolution {
    pub couplings: QubitCouplings,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub p_p: f64,
    pub t: f64,
    /// Trace distance between the closed-form final state and the target.
    pub residual: f64,
    /// `residual <= tol`.
    pub feasible: bool,
    /// Closed-form evaluations spent (lattice included).
    pub evaluations: usize,
}

/// Range of the leading eigenvalue of reachable states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachableRange {
    pub min_leading: f64,
    pub max_leading: f64,
}

impl ReachableRange {
    pub fn contains(&self, q: f64, tol: f64) -> bool {
        q >= self.min_leading - tol && q <= self.max_leading + tol
    }
}

/// Scan `(θ, α, p_p)` on a `lattice³` grid and record the extreme leading
/// eigenvalues of the closed-form reduced state.
pub fn leading_eigenvalue_range(p_s: f64, lattice: usize) -> ReachableRange {
    let n = lattice.max(2);
    let step = |i: usize, hi: f64| hi * i as f64 / (n - 1) as f64;
    let mut range = ReachableRange {
        min_leading: f64::INFINITY,
        max_leading: 0.0,
    };
    for i in 0..n {
        let theta = step(i, PI);
        for j in 0..n {
            let ang = OverlapAngles {
                alpha: step(j, FRAC_PI_2),
                beta: 0.0,
            };
            for k in 0..n {
                let e = reduced_state_closed_form(p_s, theta, step(k, 1.0), &ang);
                let d = e.rho00 - e.rho11;
                let lead = 0.5 * (1.0 + (d * d + 4.0 * e.rho10.norm_sqr()).sqrt());
                range.min_leading = range.min_leading.min(lead);
                range.max_leading = range.max_leading.max(lead);
            }
        }
    }
    range
}

/// Parameters explored by the search.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    theta: f64,
    t: f64,
    p_p: f64,
}

impl Point {
    fn get(&self, axis: usize) -> f64 {
        [self.theta, self.t, self.p_p][axis]
    }

    fn with(mut self, axis: usize, v: f64) -> Self {
        match axis {
            0 => self.theta = v,
            1 => self.t = v,
            _ => self.p_p = v,
        }
        self
    }
}

const BOUNDS: [(f64, f64); 3] = [(0.0, PI), (0.0, FRAC_PI_2), (0.0, 1.0)];

struct Objective {
    p_s: f64,
    target: M2,
    sigma_x: M2,
    evals: usize,
}

/// Transverse generator evolution with unit rates: `U±(t) = exp(∓ i t σ_x)`.
struct Branches {
    u_plus: M2,
    ang: OverlapAngles,
}

impl Objective {
    fn branches(&self, t: f64) -> Branches {
        let u_plus = su2_exp(&self.sigma_x, t);
        let u_minus = su2_exp(&self.sigma_x, -t);
        Branches {
            ang: OverlapAngles::from_unitaries(&u_plus, &u_minus),
            u_plus,
        }
    }

    /// Computational-basis state with `g2 = 1`.
    fn state(&self, b: &Branches, theta: f64, p_p: f64) -> M2 {
        let pm = pm_components(theta, p_p);
        to_computational(&b.u_plus, &reduced_entries(self.p_s, pm.pp_minus, &b.ang))
    }

    fn aligned_residual(&self, rho: &M2) -> f64 {
        let dz = rho[(0, 0)].re - self.target[(0, 0)].re;
        let dr = rho[(0, 1)].norm() - self.target[(0, 1)].norm();
        dz.hypot(dr)
    }

    fn eval(&mut self, x: &Point) -> f64 {
        self.evals += 1;
        let b = self.branches(x.t);
        let rho = self.state(&b, x.theta, x.p_p);
        self.aligned_residual(&rho)
    }
}

/// Golden-section search for the minimum of `f` on `[lo, hi]`, never
/// returning anything worse than the incumbent `(x0, f0)`.
fn golden_section(
    mut f: impl FnMut(f64) -> f64,
    (mut lo, mut hi): (f64, f64),
    (x0, f0): (f64, f64),
    max_evals: usize,
) -> (f64, f64, usize) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let width0 = hi - lo;
    let (mut best_x, mut best_f) = (x0, f0);
    let mut evals = 0;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    evals += 2;
    while evals < max_evals && hi - lo > (1e-4 * width0).max(1e-16) {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
        evals += 1;
    }
    for (x, fx) in [(a, fa), (b, fb)] {
        if fx < best_f {
            best_x = x;
            best_f = fx;
        }
    }
    (best_x, best_f, evals)
}

fn do_nothing(residual: f64, tol: f64) -> ControlSolution {
    let couplings = QubitCouplings {
        g1: 0.0,
        g2: c(0.0),
        g3: 0.0,
        g4: 1.0,
    };
    ControlSolution {
        couplings,
        theta: 0.0,
        alpha: 0.0,
        beta: 0.0,
        p_p: 0.0,
        t: 0.0,
        residual,
        feasible: residual <= tol,
        evaluations: 0,
    }
}

/// Search for couplings, evolution time and probe occupancy that take the
/// diagonal initial state `p_s` to `target`.
pub fn solve_controls_numeric(
    p_s: f64,
    target: &DensityMatrix,
    budget: SolverBudget,
) -> Result<ControlSolution> {
    if target.dim() != 2 {
        return Err(Error::Dimension(format!(
            "target must be a qubit state, got dimension {}",
            target.dim()
        )));
    }
    if !(0.0..=1.0).contains(&p_s) {
        return Err(Error::Domain(format!("p_s = {p_s} outside [0, 1]")));
    }
    if budget.lattice < 2 || budget.tol.is_nan() || budget.tol <= 0.0 {
        return Err(Error::Domain(
            "solver budget needs lattice >= 2 and tol > 0".into(),
        ));
    }

    let initial = DiagonalQubitState::new(p_s)?.density();
    let untouched = trace_distance(&initial, target)?;
    if untouched <= budget.tol {
        return Ok(do_nothing(untouched, budget.tol));
    }

    let mut obj = Objective {
        p_s,
        target: to_fixed(target.matrix()),
        sigma_x: M2::new(c(0.0), c(1.0), c(1.0), c(0.0)),
        evals: 0,
    };

    // Stage 1: rotate the dominant initial basis state onto the leading
    // eigenvector of the target, probe pinned to |+⟩.
    let eig = eig_hermitian(target.matrix())?;
    let lead = eig.vector(1);
    let (from, to) = if p_s >= 0.5 {
        (GROUND, EXCITED)
    } else {
        (EXCITED, GROUND)
    };
    let steer_t = lead[(to, 0)].norm().atan2(lead[(from, 0)].norm());
    let steer = Point {
        theta: 0.0,
        t: steer_t,
        p_p: 0.0,
    };
    let steer_res = obj.eval(&steer);

    let mut best = steer;
    let mut best_res = steer_res;

    if best_res > budget.tol {
        // Stage 2: lattice scan.
        let n = budget.lattice;
        let axis = |i: usize, (lo, hi): (f64, f64)| lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let mut grid_best = (f64::INFINITY, [usize::MAX; 3]);
        for j in 0..n {
            let t = axis(j, BOUNDS[1]);
            let branches = obj.branches(t);
            for i in 0..n {
                let theta = axis(i, BOUNDS[0]);
                for k in 0..n {
                    let rho = obj.state(&branches, theta, axis(k, BOUNDS[2]));
                    let res = obj.aligned_residual(&rho);
                    let idx = [i, j, k];
                    if res < grid_best.0 || (res == grid_best.0 && idx < grid_best.1) {
                        grid_best = (res, idx);
                    }
                }
            }
        }
        obj.evals += n * n * n;
        let [i, j, k] = grid_best.1;
        if grid_best.0 < best_res {
            best = Point {
                theta: axis(i, BOUNDS[0]),
                t: axis(j, BOUNDS[1]),
                p_p: axis(k, BOUNDS[2]),
            };
            best_res = grid_best.0;
        }

        // Stage 3: coordinate descent.
        let spacing = BOUNDS.map(|(lo, hi)| (hi - lo) / (n - 1) as f64);
        let mut step = spacing;
        let refine_limit = obj.evals + budget.max_evals;
        let stop_at = budget.tol * 1e-2;
        'outer: while best_res > stop_at && obj.evals < refine_limit {
            for ax in 0..3 {
                let (lo_b, hi_b) = BOUNDS[ax];
                let x0 = best.get(ax);
                let bracket = ((x0 - step[ax]).max(lo_b), (x0 + step[ax]).min(hi_b));
                let remaining = refine_limit.saturating_sub(obj.evals);
                if remaining < 3 {
                    break 'outer;
                }
                let base = best;
                let (x, fx, used) = golden_section(
                    |v| {
                        let b = obj.branches(base.with(ax, v).t);
                        let p = base.with(ax, v);
                        obj.aligned_residual(&obj.state(&b, p.theta, p.p_p))
                    },
                    bracket,
                    (x0, best_res),
                    remaining,
                );
                obj.evals += used;
                let moved = (x - x0).abs();
                best = best.with(ax, x);
                best_res = fx;
                step[ax] = if moved > 0.9 * step[ax] {
                    (2.0 * step[ax]).min(spacing[ax] * 8.0)
                } else {
                    (2.0 * moved).max(0.25 * step[ax]).max(1e-15)
                };
                if best_res <= stop_at {
                    break 'outer;
                }
            }
            if step.iter().all(|&s| s <= 1e-14) {
                break;
            }
        }
    }

    finish(&mut obj, best, p_s, target, budget)
}

/// Apply the optimal `g2` phase and score the result through the public
/// closed form.
fn finish(
    obj: &mut Objective,
    x: Point,
    p_s: f64,
    target: &DensityMatrix,
    budget: SolverBudget,
) -> Result<ControlSolution> {
    let b = obj.branches(x.t);
    let rho = obj.state(&b, x.theta, x.p_p);
    let reached = rho[(0, 1)];
    let wanted = obj.target[(0, 1)];
    let phase = if reached.norm() > 0.0 && wanted.norm() > 0.0 {
        wanted.arg() - reached.arg()
    } else {
        0.0
    };
    let couplings = QubitCouplings {
        g1: 0.0,
        g2: Complex64::from_polar(1.0, phase),
        g3: x.theta.sin(),
        g4: x.theta.cos(),
    };
    let probe = DiagonalQubitState::new(x.p_p.clamp(0.0, 1.0))?.density();
    let state = closed_form_state(&couplings, x.t, p_s, &probe)?;
    let residual = trace_distance(&state, target)?;
    let ang = overlap_angles(&couplings, x.t);
    Ok(ControlSolution {
        couplings,
        theta: x.theta,
        alpha: ang.alpha,
        beta: ang.beta,
        p_p: x.p_p,
        t: x.t,
        residual,
        feasible: residual <= budget.tol,
        evaluations: obj.evals,
    })
}
