//! Derivative-free inner solver for the resolvent inequality
//! `λF(z, y) - <zx, zy> >= 0` for all `y ∈ K`.
//!
//! Compass search on a local merit. At step `h` the merit of `z` sums the
//! squared positive parts of the violations at the poll points of `z`,
//! normalized by `h`. Summing over a positive spanning set makes the merit
//! frame-independent and smooth near the solution. The step halves whenever no
//! poll point improves the merit; a zero merit (flat region) keeps the
//! incumbent and also halves.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ResolventQuery;
use crate::geometry::{poll, random_in_ball, Point};

const INITIAL_STEP: f64 = 1.0;
const MIN_STEP: f64 = 1e-13;
const VERIFY_SCALES: i32 = 40;
const VERIFY_RANDOM: usize = 64;
/// Refinement continues until the certificate is this fraction of the
/// tolerance, so that grids other than the solver's own still pass.
const SAFETY: f64 = 0.1;

pub(crate) struct SearchOutcome {
    pub z: Point,
    pub gap: f64,
    pub iters: usize,
    pub converged: bool,
}

/// Violation of the defining inequality at `y`.
pub(crate) fn violation(q: &ResolventQuery<'_>, z: &Point, y: &Point) -> f64 {
    q.space.qlin(z, &q.x, z, y) - q.lambda * q.f.value(q.space, z, y)
}

fn merit(q: &ResolventQuery<'_>, z: &Point, h: f64) -> f64 {
    poll(q.space, z, h)
        .iter()
        .map(|y| {
            let y = q.domain.project(q.space, y);
            let v = violation(q, z, &y).max(0.0) / h;
            v * v
        })
        .sum()
}

/// The verification grid around a candidate: multi-scale compass points, the
/// anchor `x`, `K`'s extreme candidates, known critical points, and seeded
/// random points, all projected onto `K`.
pub(crate) fn verification_grid(q: &ResolventQuery<'_>, z: &Point) -> Vec<Point> {
    let space = q.space;
    let reach = space.metric(z, &q.x).max(1.0);
    let mut grid = Vec::new();
    for j in 0..VERIFY_SCALES {
        grid.extend(poll(space, z, reach * 0.5f64.powi(j)));
    }
    grid.push(q.x.clone());
    grid.extend(q.domain.extremes(space));
    grid.extend(q.f.anchors().into_iter().filter(|p| space.check(p).is_ok()));
    let mut rng = ChaCha8Rng::seed_from_u64(q.seed);
    for _ in 0..VERIFY_RANDOM {
        grid.push(random_in_ball(space, z, 2.0 * reach, &mut rng));
    }
    grid.iter().map(|y| q.domain.project(space, y)).collect()
}

pub(crate) fn certify(q: &ResolventQuery<'_>, z: &Point, grid: &[Point]) -> f64 {
    grid.iter().fold(0.0f64, |m, y| m.max(violation(q, z, y)))
}

pub(crate) fn solve(q: &ResolventQuery<'_>) -> SearchOutcome {
    let space = q.space;
    let stop_step = (10.0 * q.inner_tol).min(1e-4);
    let mut z = q.domain.project(space, &q.x);
    let mut h = INITIAL_STEP;
    let mut m = merit(q, &z, h);
    let mut iters = 0;

    let finish = |z: Point, iters: usize, converged_hint: bool| {
        let gap = certify(q, &z, &verification_grid(q, &z));
        SearchOutcome {
            converged: converged_hint && gap <= q.inner_tol,
            z,
            gap,
            iters,
        }
    };

    loop {
        if iters >= q.inner_max_iters {
            return finish(z, iters, false);
        }
        iters += 1;

        if m > 0.0 {
            let mut best: Option<(Point, f64)> = None;
            for cand in poll(space, &z, h) {
                let cand = q.domain.project(space, &cand);
                if cand == z {
                    continue;
                }
                let mc = merit(q, &cand, h);
                if mc < best.as_ref().map_or(m, |b| b.1) {
                    best = Some((cand, mc));
                }
            }
            if let Some((cand, mc)) = best {
                z = cand;
                m = mc;
                continue;
            }
        }

        h *= 0.5;
        if h <= stop_step {
            let gap = certify(q, &z, &verification_grid(q, &z));
            if gap <= SAFETY * q.inner_tol {
                return SearchOutcome {
                    z,
                    gap,
                    iters,
                    converged: true,
                };
            }
        }
        if h < MIN_STEP {
            return finish(z, iters, true);
        }
        m = merit(q, &z, h);
    }
}
