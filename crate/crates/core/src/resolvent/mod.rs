//! Resolvents of bifunctions.
//!
//! For `λ > 0` the resolvent `J_{λF}(x)` is the point `z ∈ K` with
//!
//! ```text
//! λ F(z, y) - <zx, zy> >= 0    for every y ∈ K,
//! ```
//!
//! i.e. the equilibrium of the regularized bifunction
//! `(z, y) ↦ λF(z, y) - <zx, zy>`. For monotone `F` it is unique and the map
//! `x ↦ J_{λF}(x)` is firmly nonexpansive. [`resolve`] tries the closed-form
//! registry first and falls back to a derivative-free inner solver. Every
//! result carries a certificate: the largest violation of the inequality on a
//! verification grid around `z`.

mod closed_form;
mod search;

use serde::Serialize;

use crate::bifunction::{Bifunction, DomainK};
use crate::error::{Error, Result};
use crate::geometry::{Point, Space};

pub use closed_form::prox;

#[derive(Debug, Clone)]
pub struct ResolventQuery<'a> {
    pub space: &'a Space,
    pub f: &'a Bifunction,
    pub domain: &'a DomainK,
    pub lambda: f64,
    pub x: Point,
    pub inner_tol: f64,
    pub inner_max_iters: usize,
    /// Seeds the random part of the verification grid.
    pub seed: u64,
    /// When false, skip the closed-form registry.
    pub allow_closed_form: bool,
}

impl<'a> ResolventQuery<'a> {
    pub fn new(space: &'a Space, f: &'a Bifunction, domain: &'a DomainK, lambda: f64, x: Point) -> Self {
        ResolventQuery {
            space,
            f,
            domain,
            lambda,
            x,
            inner_tol: 1e-6,
            inner_max_iters: 20_000,
            seed: 0,
            allow_closed_form: true,
        }
    }

    pub fn with_tol(mut self, inner_tol: f64) -> Self {
        self.inner_tol = inner_tol;
        self
    }

    pub fn with_max_iters(mut self, n: usize) -> Self {
        self.inner_max_iters = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn generic_only(mut self) -> Self {
        self.allow_closed_form = false;
        self
    }

    /// The same query anchored at another point.
    pub fn at(&self, x: Point) -> Self {
        ResolventQuery { x, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        self.f.validate(self.space)?;
        self.domain.validate(self.space)?;
        self.space.check(&self.x)?;
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::invalid(format!("lambda {} must be > 0", self.lambda)));
        }
        if !(self.inner_tol.is_finite() && self.inner_tol > 0.0) {
            return Err(Error::invalid(format!("inner_tol {} must be > 0", self.inner_tol)));
        }
        if self.inner_max_iters == 0 {
            return Err(Error::invalid("inner_max_iters must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Generic,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolventResult {
    pub z: Point,
    pub certified_gap: f64,
    pub method: Method,
    pub inner_iters: usize,
}

/// `(x, y) ↦ F(x, y) - <x x̄, x y>`.
pub fn regularized_f(space: &Space, f: &Bifunction, xbar: &Point) -> Bifunction {
    let (space, f, xbar) = (space.clone(), f.clone(), xbar.clone());
    Bifunction::custom("regularized", move |_, x, y| f.value(&space, x, y) - space.qlin(x, &xbar, x, y))
}

/// Computes `J_{λF}(x)`.
///
/// The caller asserts that `F` is monotone; uniqueness of the result depends
/// on it. A generic solve that does not reach `inner_tol` returns
/// [`Error::ConvergenceFailure`] with the best iterate.
pub fn resolve(q: &ResolventQuery<'_>) -> Result<ResolventResult> {
    q.validate()?;
    if q.allow_closed_form {
        if let Some(z) = closed_form::lookup(q.space, q.f, q.domain, q.lambda, &q.x) {
            let gap = search::certify(q, &z, &search::verification_grid(q, &z));
            return Ok(ResolventResult {
                z,
                certified_gap: gap,
                method: Method::ClosedForm,
                inner_iters: 0,
            });
        }
    }
    let out = search::solve(q);
    if out.converged {
        Ok(ResolventResult {
            z: out.z,
            certified_gap: out.gap,
            method: Method::Generic,
            inner_iters: out.iters,
        })
    } else {
        Err(Error::ConvergenceFailure {
            best: out.z,
            gap: out.gap,
            iters: out.iters,
            tol: q.inner_tol,
        })
    }
}

/// `max(0, max_{y ∈ grid} <zx, zy> - λF(z, y))`.
pub fn verify_resolvent(z: &Point, q: &ResolventQuery<'_>, grid: &[Point]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::invalid("verification grid is empty"));
    }
    q.space.check(z)?;
    for y in grid {
        q.space.check(y)?;
    }
    Ok(search::certify(q, z, grid))
}

/// `max over pairs of d(Jx, Jy) - d(x, y)`, using `template` for everything
/// but the anchor point.
pub fn nonexpansivity_gap(template: &ResolventQuery<'_>, pairs: &[(Point, Point)]) -> Result<f64> {
    let space = template.space;
    pairs.iter().try_fold(f64::NEG_INFINITY, |worst, (x, y)| {
        let jx = resolve(&template.at(x.clone()))?.z;
        let jy = resolve(&template.at(y.clone()))?.z;
        Ok(worst.max(space.metric(&jx, &jy) - space.metric(x, y)))
    })
}

/// `max over pairs of d²(Jx,Jy) - ½[d²(x,Jy) + d²(y,Jx) - d²(x,Jx) - d²(y,Jy)]`.
pub fn firm_nonexpansivity_gap(template: &ResolventQuery<'_>, pairs: &[(Point, Point)]) -> Result<f64> {
    let s = template.space;
    pairs.iter().try_fold(f64::NEG_INFINITY, |worst, (x, y)| {
        let jx = resolve(&template.at(x.clone()))?.z;
        let jy = resolve(&template.at(y.clone()))?.z;
        let rhs = 0.5 * (s.sq(x, &jy) + s.sq(y, &jx) - s.sq(x, &jx) - s.sq(y, &jy));
        Ok(worst.max(s.sq(&jx, &jy) - rhs))
    })
}
