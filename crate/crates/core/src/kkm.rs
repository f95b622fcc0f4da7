//! Constructive pieces of the KKM principle for a finite set
//! `D = {x_1, …, x_m}`.
//!
//! The geodesic hull is built in layers: `D_1 = {x_1}` and `D_j` collects the
//! geodesics from `x_j` to points of `D_{j-1}`. The map `T` parametrizes the
//! layers by `s ∈ [0,1]^{m-1}`:
//!
//! ```text
//! T(s) = p_m,   p_1 = x_1,   p_j = γ(x_j, p_{j-1}; s_{j-1})
//! ```
//!
//! so `T` lands in `D* = ∪ D_j ⊂ co(D)` and satisfies
//! `d(T(s), T(t)) <= Σ |s_i - t_i| · diam(D*)`.

use rand::Rng;
use serde::Serialize;

use crate::bifunction::Bifunction;
use crate::error::{Error, Result};
use crate::geometry::{Point, Space};
use crate::sampling;

/// Tolerance below which `F(x, x_i)` counts as negative in the cover check.
pub const COVER_TOL: f64 = 1e-9;
/// Lowest admissible score for an intersection witness.
pub const WITNESS_TOL: f64 = 1e-6;
/// Default lattice points per simplex coordinate.
pub const DEFAULT_RESOLUTION: usize = 21;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinitePointSet {
    points: Vec<Point>,
}

impl FinitePointSet {
    pub fn new(space: &Space, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("a finite point set needs at least one point"));
        }
        for (i, p) in points.iter().enumerate() {
            space.check(p).map_err(|e| Error::invalid(format!("points[{i}]: {e}")))?;
        }
        Ok(FinitePointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// The sub-tuple with the given indices, in that order.
    pub fn subset(&self, idx: &[usize]) -> Result<FinitePointSet> {
        if idx.is_empty() {
            return Err(Error::invalid("index set is empty"));
        }
        let points = idx
            .iter()
            .map(|&i| {
                self.points
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("index {i} out of range for {} points", self.len())))
            })
            .collect::<Result<_>>()?;
        Ok(FinitePointSet { points })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexCoord {
    s: Vec<f64>,
}

impl SimplexCoord {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if let Some(v) = s.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!("simplex coordinate {v} outside [0, 1]")));
        }
        Ok(SimplexCoord { s })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.s
    }

    fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        SimplexCoord {
            s: (0..len).map(|_| rng.random::<f64>()).collect(),
        }
    }
}

fn unroll(space: &Space, pts: &[Point], s: &[f64]) -> Point {
    let mut p = pts[0].clone();
    for (x, &t) in pts[1..].iter().zip(s) {
        p = space.interp(x, &p, t);
    }
    p
}

/// The point of `D_j` reached with parameters `params` (`j - 1` of them):
/// the first `j - 2` locate a point of `D_{j-1}`, the last runs along the
/// geodesic from `x_j` to it.
pub fn hull_layer(space: &Space, d: &FinitePointSet, j: usize, params: &[f64]) -> Result<Point> {
    if j == 0 || j > d.len() {
        return Err(Error::invalid(format!("layer {j} out of range 1..={}", d.len())));
    }
    if params.len() != j - 1 {
        return Err(Error::invalid(format!("layer {j} takes {} parameters, got {}", j - 1, params.len())));
    }
    let c = SimplexCoord::new(params.to_vec())?;
    Ok(unroll(space, &d.points[..j], &c.s))
}

pub fn t_map(space: &Space, d: &FinitePointSet, lam: &SimplexCoord) -> Result<Point> {
    if lam.s.len() + 1 != d.len() {
        return Err(Error::invalid(format!(
            "{} points need {} simplex coordinates, got {}",
            d.len(),
            d.len() - 1,
            lam.s.len()
        )));
    }
    Ok(unroll(space, &d.points, &lam.s))
}

/// A coordinate with `T = x_j` (1-based): `s_{j-1} = 0` and every other
/// entry 1.
pub fn vertex_coord(m: usize, j: usize) -> Result<SimplexCoord> {
    if j == 0 || j > m {
        return Err(Error::invalid(format!("vertex {j} out of range 1..={m}")));
    }
    let mut s = vec![1.0; m - 1];
    if j >= 2 {
        s[j - 2] = 0.0;
    }
    Ok(SimplexCoord { s })
}

/// Largest pairwise distance among `samples` random images of `T` and the
/// vertices.
pub fn diameter_estimate(space: &Space, d: &FinitePointSet, samples: usize, seed: u64) -> f64 {
    let mut rng = sampling::stream(seed, 0x6b6b6d);
    let mut pts = d.points.clone();
    pts.extend((0..samples).map(|_| unroll(space, &d.points, &SimplexCoord::random(d.len() - 1, &mut rng).s)));
    let mut best = 0.0f64;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            best = best.max(space.metric(a, b));
        }
    }
    best
}

/// `Σ |s_i - t_i| · diam - d(T(lam), T(mu))`; nonnegative when `diam`
/// bounds the diameter of the layered hull.
pub fn lipschitz_gap(space: &Space, d: &FinitePointSet, lam: &SimplexCoord, mu: &SimplexCoord, diam: f64) -> Result<f64> {
    let a = t_map(space, d, lam)?;
    let b = t_map(space, d, mu)?;
    let l1: f64 = lam.s.iter().zip(&mu.s).map(|(s, t)| (s - t).abs()).sum();
    Ok(l1 * diam - space.metric(&a, &b))
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverReport {
    pub subsets: Vec<Vec<usize>>,
    /// Per subset: sampled hull points with `F(x, x_i) < -tol` for every
    /// `i` in the subset.
    pub violations: Vec<usize>,
    pub max_violations: usize,
}

/// Samples `co({x_i : i ∈ I})` through `T` on the sub-tuple and counts
/// KKM-cover violations. Indices are 0-based.
pub fn kkm_cover_check(
    space: &Space,
    f: &Bifunction,
    d: &FinitePointSet,
    subsets: &[Vec<usize>],
    samples: usize,
    seed: u64,
) -> Result<CoverReport> {
    f.validate(space)?;
    let mut violations = Vec::with_capacity(subsets.len());
    for (n, idx) in subsets.iter().enumerate() {
        let sub = d.subset(idx)?;
        let mut rng = sampling::stream(seed, n as u64);
        let count = (0..samples)
            .filter(|_| {
                let x = unroll(space, &sub.points, &SimplexCoord::random(sub.len() - 1, &mut rng).s);
                sub.points.iter().all(|xi| f.value(space, &x, xi) < -COVER_TOL)
            })
            .count();
        violations.push(count);
    }
    Ok(CoverReport {
        subsets: subsets.to_vec(),
        max_violations: violations.iter().copied().max().unwrap_or(0),
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub point: Point,
    pub coord: Vec<f64>,
    /// `min_i F(point, x_i)`.
    pub score: f64,
}

/// Scans `T` over the lattice with `resolution` points per coordinate and
/// returns the point maximizing `min_i F(x, x_i)`, provided that score is at
/// least `-1e-6`. Ties keep the first lattice point in lexicographic order.
pub fn finite_intersection_certify(
    space: &Space,
    f: &Bifunction,
    d: &FinitePointSet,
    resolution: usize,
) -> Result<Option<Witness>> {
    f.validate(space)?;
    if resolution < 2 {
        return Err(Error::invalid(format!("lattice resolution must be >= 2, got {resolution}")));
    }
    let dim = d.len() - 1;
    let total = resolution
        .checked_pow(dim as u32)
        .filter(|n| *n <= 50_000_000)
        .ok_or_else(|| Error::invalid("lattice too large; lower the resolution"))?;
    let step = 1.0 / (resolution - 1) as f64;
    let mut best: Option<Witness> = None;
    let mut s = vec![0.0; dim];
    for n in 0..total {
        let mut r = n;
        for v in s.iter_mut().rev() {
            *v = (r % resolution) as f64 * step;
            r /= resolution;
        }
        let x = unroll(space, &d.points, &s);
        let score = d.points.iter().map(|xi| f.value(space, &x, xi)).fold(f64::INFINITY, f64::min);
        if best.as_ref().is_none_or(|b| score > b.score) {
            best = Some(Witness {
                point: x,
                coord: s.clone(),
                score,
            });
        }
    }
    Ok(best.filter(|w| w.score >= -WITNESS_TOL))
}
