use serde::Serialize;

use super::Trace;
use crate::bifunction::DomainK;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::resolvent::{resolve, ResolventQuery};

fn step_index(trace: &Trace, k: usize) -> Result<()> {
    if k >= trace.len() {
        return Err(Error::invalid(format!("step {k} out of range for a trace of {} steps", trace.len())));
    }
    Ok(())
}

/// `-(1/λ_k) d(x^{k+1}, x^k) sup_{y ∈ K} d(x^{k+1}, y)` for step `k`.
pub fn residual_lower_bound(trace: &Trace, k: usize) -> Result<f64> {
    step_index(trace, k)?;
    Ok(-trace.successive[k] * trace.sup_dists[k] / trace.steps[k])
}

/// `-diam(K)² / λ_k` for step `k`.
pub fn diameter_bound(trace: &Trace, k: usize, domain: &DomainK) -> Result<f64> {
    step_index(trace, k)?;
    let d = domain
        .diameter()
        .ok_or_else(|| Error::invalid("the diameter bound needs a bounded domain"))?;
    Ok(-d * d / trace.steps[k])
}

fn check_against(trace: &Trace, xstar: &Point) -> Result<Vec<f64>> {
    trace.space.check(xstar)?;
    Ok(trace.iterates.iter().map(|x| trace.space.metric(x, xstar)).collect())
}

/// `max_k d(x^{k+1}, x*) - d(x^k, x*)`; zero for a trace without steps.
pub fn fejer_check(trace: &Trace, xstar: &Point) -> Result<f64> {
    let d = check_against(trace, xstar)?;
    Ok(d.windows(2).map(|w| w[1] - w[0]).reduce(f64::max).unwrap_or(0.0))
}

/// `max_k d²(x^{k+1}, x^k) - d²(x^k, x*) + d²(x^{k+1}, x*)`.
pub fn telescoping_violation(trace: &Trace, xstar: &Point) -> Result<f64> {
    let d = check_against(trace, xstar)?;
    Ok(d.windows(2)
        .zip(&trace.successive)
        .map(|(w, s)| s * s - w[0] * w[0] + w[1] * w[1])
        .reduce(f64::max)
        .unwrap_or(0.0))
}

/// `<x̃x̄, x̃x*>` with `x̃ = J_{λF}(x̄)`, where `x̄ = q.x`. Nonpositive when
/// `x*` is an equilibrium.
pub fn obtuse_angle_check(q: &ResolventQuery<'_>, xstar: &Point) -> Result<f64> {
    q.space.check(xstar)?;
    let xt = resolve(q)?.z;
    Ok(q.space.qlin(&xt, &q.x, &xt, xstar))
}

#[derive(Debug, Clone, Serialize)]
pub struct Regularity {
    pub regular: bool,
    /// Geometric mean of `d_{k+1} / d_k` over the second half of the nonzero
    /// successive distances.
    pub rate: Option<f64>,
    /// Whether the squared telescoping inequality held (with slack `1e-6`)
    /// at every step; absent without a reference solution.
    pub telescoping: Option<bool>,
}

/// Asymptotic regularity: the last successive distance is below `eps` and
/// most successive distances do not increase. Diagnostic only for
/// non-monotone bifunctions.
pub fn asymptotic_regularity(trace: &Trace, xstar: Option<&Point>, eps: f64) -> Result<Regularity> {
    if trace.iterates.len() < 10 {
        return Err(Error::invalid(format!(
            "asymptotic regularity needs at least 10 iterates, got {}",
            trace.iterates.len()
        )));
    }
    let s = &trace.successive;
    let decreasing = s.windows(2).filter(|w| w[1] <= w[0]).count();
    let regular = *s.last().unwrap() < eps && 2 * decreasing >= s.len() - 1;

    let ratios: Vec<f64> = s
        .windows(2)
        .filter(|w| w[0] > 0.0 && w[1] > 0.0)
        .map(|w| (w[1] / w[0]).ln())
        .collect();
    let tail = &ratios[ratios.len() / 2..];
    let rate = (!tail.is_empty()).then(|| (tail.iter().sum::<f64>() / tail.len() as f64).exp());

    let telescoping = match xstar {
        Some(x) => Some(telescoping_violation(trace, x)? <= 1e-6),
        None => None,
    };
    Ok(Regularity {
        regular,
        rate,
        telescoping,
    })
}
