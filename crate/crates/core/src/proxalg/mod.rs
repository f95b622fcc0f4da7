//! The proximal point algorithm `x^{k+1} = J_{λ_k F}(x^k)`.
//!
//! [`run_prox`] iterates resolvents from `x0` and records, per step, the
//! successive distance, the distance to a reference solution, the two a-priori
//! lower bounds on `inf_{y ∈ K} F(x^{k+1}, y)` and the grid-certified
//! equilibrium residual. The bounds are
//!
//! ```text
//! inf_y F(x^{k+1}, y) >= -(1/λ_k) d(x^{k+1}, x^k) sup_{y ∈ K} d(x^{k+1}, y)
//! inf_y F(x^{k+1}, y) >= -(1/λ_k) diam(K)²
//! ```
//!
//! The first serves as a stopping rule; the second only exists for bounded `K`.

mod diagnostics;
mod export;

use serde::{Deserialize, Serialize};

use crate::bifunction::{equilibrium_residual, Bifunction, DomainK};
use crate::error::{Error, Result};
use crate::geometry::{Point, Space};
use crate::resolvent::{resolve, ResolventQuery};

pub use diagnostics::{
    asymptotic_regularity, diameter_bound, fejer_check, obtuse_angle_check, residual_lower_bound,
    telescoping_violation, Regularity,
};
pub use export::{to_csv, to_json, Provenance, CSV_HEADER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    Constant { lambda: f64 },
    /// Explicit steps; the last one repeats once the list runs out.
    Sequence { steps: Vec<f64> },
    /// `λ_k = lambda0 · ratio^k`.
    Geometric { lambda0: f64, ratio: f64 },
}

impl StepSchedule {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match self {
            StepSchedule::Constant { lambda } if !positive(*lambda) => {
                Err(Error::invalid(format!("schedule.lambda must be > 0, got {lambda}")))
            }
            StepSchedule::Sequence { steps } if steps.is_empty() => {
                Err(Error::invalid("schedule.steps must not be empty"))
            }
            StepSchedule::Sequence { steps } => match steps.iter().position(|s| !positive(*s)) {
                Some(i) => Err(Error::invalid(format!("schedule.steps[{i}] must be > 0, got {}", steps[i]))),
                None => Ok(()),
            },
            StepSchedule::Geometric { lambda0, .. } if !positive(*lambda0) => {
                Err(Error::invalid(format!("schedule.lambda0 must be > 0, got {lambda0}")))
            }
            StepSchedule::Geometric { ratio, .. } if !(ratio.is_finite() && *ratio >= 1.0) => {
                Err(Error::invalid(format!("schedule.ratio must be >= 1, got {ratio}")))
            }
            _ => Ok(()),
        }
    }

    /// The step producing `x^{k+1}`.
    pub fn step(&self, k: usize) -> f64 {
        match self {
            StepSchedule::Constant { lambda } => *lambda,
            StepSchedule::Sequence { steps } => steps[k.min(steps.len() - 1)],
            StepSchedule::Geometric { lambda0, ratio } => lambda0 * ratio.powi(k as i32),
        }
    }

    /// A positive lower bound for every step of the schedule.
    pub fn lambda_min(&self) -> f64 {
        match self {
            StepSchedule::Constant { lambda } => *lambda,
            StepSchedule::Sequence { steps } => steps.iter().copied().fold(f64::INFINITY, f64::min),
            StepSchedule::Geometric { lambda0, .. } => *lambda0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopRule {
    /// Stop once `d(x^{k+1}, x^k) < eps`.
    SuccessiveDist { eps: f64 },
    /// Stop once the successive-distance lower bound exceeds `-eps`.
    ResidualBound { eps: f64 },
    /// Run all `max_iters` steps.
    MaxIters,
}

impl StopRule {
    pub fn validate(&self) -> Result<()> {
        match self {
            StopRule::SuccessiveDist { eps } | StopRule::ResidualBound { eps } if !(eps.is_finite() && *eps > 0.0) => {
                Err(Error::invalid(format!("stop.eps must be > 0, got {eps}")))
            }
            _ => Ok(()),
        }
    }
}

fn default_grid_size() -> usize {
    256
}
fn default_grid_radius() -> f64 {
    3.0
}
fn default_inner_tol() -> f64 {
    1e-6
}
fn default_inner_max_iters() -> usize {
    20_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub space: Space,
    #[serde(rename = "bifunction")]
    pub f: Bifunction,
    #[serde(default = "whole_space")]
    pub domain: DomainK,
    pub x0: Point,
    pub schedule: StepSchedule,
    pub max_iters: usize,
    pub stop: StopRule,
    #[serde(default)]
    pub reference_solution: Option<Point>,
    #[serde(default = "default_grid_size")]
    pub residual_grid_size: usize,
    /// Radius of the residual grid around the reference (or `x0`) when `K`
    /// is the whole space.
    #[serde(default = "default_grid_radius")]
    pub grid_radius: f64,
    #[serde(default = "default_inner_tol")]
    pub inner_tol: f64,
    #[serde(default = "default_inner_max_iters")]
    pub inner_max_iters: usize,
    #[serde(default)]
    pub seed: u64,
}

fn whole_space() -> DomainK {
    DomainK::WholeSpace
}

impl RunConfig {
    pub fn new(space: Space, f: Bifunction, domain: DomainK, x0: Point, schedule: StepSchedule) -> Self {
        RunConfig {
            space,
            f,
            domain,
            x0,
            schedule,
            max_iters: 100,
            stop: StopRule::SuccessiveDist { eps: 1e-10 },
            reference_solution: None,
            residual_grid_size: default_grid_size(),
            grid_radius: default_grid_radius(),
            inner_tol: default_inner_tol(),
            inner_max_iters: default_inner_max_iters(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.f.validate(&self.space)?;
        self.domain.validate(&self.space)?;
        self.space.check(&self.x0).map_err(|e| Error::invalid(format!("x0: {e}")))?;
        if !self.domain.contains(&self.space, &self.x0, 1e-12) {
            return Err(Error::invalid("x0 must lie in the domain"));
        }
        if let Some(r) = &self.reference_solution {
            self.space.check(r).map_err(|e| Error::invalid(format!("reference_solution: {e}")))?;
        }
        if self.f.is_monotone() == Some(false) {
            return Err(Error::invalid("bifunction is not monotone"));
        }
        self.schedule.validate()?;
        self.stop.validate()?;
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be >= 1"));
        }
        if self.residual_grid_size == 0 {
            return Err(Error::invalid("residual_grid_size must be >= 1"));
        }
        if !(self.grid_radius.is_finite() && self.grid_radius > 0.0) {
            return Err(Error::invalid(format!("grid_radius must be > 0, got {}", self.grid_radius)));
        }
        if !(self.inner_tol.is_finite() && self.inner_tol > 0.0) {
            return Err(Error::invalid(format!("inner_tol must be > 0, got {}", self.inner_tol)));
        }
        if self.inner_max_iters == 0 {
            return Err(Error::invalid("inner_max_iters must be >= 1"));
        }
        Ok(())
    }

    /// Test points for the equilibrium residual: low-discrepancy samples of
    /// `K` (or of the bounding ball), the boundary candidates, known critical
    /// points, `x0` and the reference, all projected onto `K`.
    pub fn residual_grid(&self) -> Vec<Point> {
        let s = &self.space;
        let center = self.reference_solution.clone().unwrap_or_else(|| self.x0.clone());
        let mut grid = self.domain.sample(s, self.residual_grid_size, self.seed, &center, self.grid_radius);
        grid.extend(self.domain.extremes(s));
        grid.extend(self.f.anchors().into_iter().filter(|p| s.check(p).is_ok()));
        grid.push(self.x0.clone());
        grid.extend(self.reference_solution.clone());
        grid.iter().map(|y| self.domain.project(s, y)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIters,
    ResolventFailure,
}

/// Per-run record. Step `k` (0-based) maps `iterates[k]` to `iterates[k+1]`
/// with step `steps[k]`; every per-step list has one entry per step.
#[derive(Debug, Clone, Serialize)]
pub struct Trace {
    pub space: Space,
    pub iterates: Vec<Point>,
    pub steps: Vec<f64>,
    /// `d(x^k, x^{k+1})`.
    pub successive: Vec<f64>,
    /// `d(x^k, x*)` for every iterate, when a reference is known.
    pub fejer: Option<Vec<f64>>,
    /// `sup_{y ∈ K} d(x^{k+1}, y)`: exact for bounded `K`, grid maximum otherwise.
    pub sup_dists: Vec<f64>,
    pub residual_lower_bounds: Vec<f64>,
    pub diameter_bounds: Option<Vec<f64>>,
    /// `min_{y ∈ grid} F(x^{k+1}, y)`.
    pub equilibrium_residuals: Vec<f64>,
    pub certified_gaps: Vec<f64>,
    pub inner_iters: Vec<usize>,
    pub status: Status,
    pub failure: Option<String>,
    pub lambda_min: f64,
    pub seed: u64,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> &Point {
        self.iterates.last().expect("a trace always holds x0")
    }
}

fn step_seed(seed: u64, k: usize) -> u64 {
    (seed ^ 0x5851_f42d_4c95_7f2d).wrapping_add(k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Runs the proximal algorithm. A failed resolvent ends the run with status
/// `resolvent_failure`; the trace keeps every completed step.
pub fn run_prox(cfg: &RunConfig) -> Result<Trace> {
    cfg.validate()?;
    let s = &cfg.space;
    let grid = cfg.residual_grid();
    let diam = cfg.domain.diameter();
    let mut t = Trace {
        space: s.clone(),
        iterates: vec![cfg.x0.clone()],
        steps: Vec::new(),
        successive: Vec::new(),
        fejer: cfg.reference_solution.as_ref().map(|r| vec![s.metric(&cfg.x0, r)]),
        sup_dists: Vec::new(),
        residual_lower_bounds: Vec::new(),
        diameter_bounds: diam.map(|_| Vec::new()),
        equilibrium_residuals: Vec::new(),
        certified_gaps: Vec::new(),
        inner_iters: Vec::new(),
        status: Status::MaxIters,
        failure: None,
        lambda_min: cfg.schedule.lambda_min(),
        seed: cfg.seed,
    };

    for k in 0..cfg.max_iters {
        let lambda = cfg.schedule.step(k);
        let x = t.last().clone();
        let q = ResolventQuery::new(s, &cfg.f, &cfg.domain, lambda, x.clone())
            .with_tol(cfg.inner_tol)
            .with_max_iters(cfg.inner_max_iters)
            .with_seed(step_seed(cfg.seed, k));
        let r = match resolve(&q) {
            Ok(r) => r,
            Err(e) => {
                t.status = Status::ResolventFailure;
                t.failure = Some(format!("step {k}: {e}"));
                return Ok(t);
            }
        };
        let z = r.z;
        let succ = s.metric(&x, &z);
        let sup = cfg
            .domain
            .sup_dist(s, &z)
            .unwrap_or_else(|| grid.iter().map(|y| s.metric(&z, y)).fold(0.0, f64::max));
        let bound = -succ * sup / lambda;
        t.steps.push(lambda);
        t.successive.push(succ);
        t.sup_dists.push(sup);
        t.residual_lower_bounds.push(bound);
        if let (Some(b), Some(d)) = (t.diameter_bounds.as_mut(), diam) {
            b.push(-d * d / lambda);
        }
        t.equilibrium_residuals.push(equilibrium_residual(s, &cfg.f, &z, &grid)?);
        t.certified_gaps.push(r.certified_gap);
        t.inner_iters.push(r.inner_iters);
        if let (Some(fj), Some(xs)) = (t.fejer.as_mut(), &cfg.reference_solution) {
            fj.push(s.metric(&z, xs));
        }
        t.iterates.push(z);

        let done = match cfg.stop {
            StopRule::SuccessiveDist { eps } => succ < eps,
            StopRule::ResidualBound { eps } => bound > -eps,
            StopRule::MaxIters => false,
        };
        if done {
            t.status = Status::Converged;
            return Ok(t);
        }
    }
    Ok(t)
}
