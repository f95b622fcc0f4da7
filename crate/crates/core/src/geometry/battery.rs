//! Randomized battery of CAT(0) identities and inequalities for a space.

use rand::Rng;
use serde::Serialize;

use super::{random_point, Point, Space};
use crate::error::Result;
use crate::sampling;

/// Absolute tolerance for identities that only involve arithmetic.
pub const EXACT_TOL: f64 = 1e-10;
/// Absolute tolerance for identities that involve transcendental evaluation.
pub const TRANSCENDENTAL_TOL: f64 = 1e-9;

/// Points are drawn within this radius of the space's origin.
pub const SAMPLE_RADIUS: f64 = 3.0;

#[derive(Debug, Clone, Serialize)]
pub struct BatteryReport {
    pub space: String,
    pub samples: usize,
    pub seed: u64,
    /// Smallest CN slack seen; must be `>= -EXACT_TOL`.
    pub cn_min: f64,
    /// Samples with CN slack above `TRANSCENDENTAL_TOL` (non-flat behaviour).
    pub cn_strictly_positive: usize,
    pub cs_min: f64,
    /// `max |<uv,uz> + <vu,vz> - d²(u,v)|`.
    pub lemma_i_max_residual: f64,
    /// `max (λ<zu,zv> - <zx,zv>)` with `x = γ(z,u,λ)`.
    pub lemma_ii_max_violation: f64,
    /// `max |d(γ(s),γ(t)) - |s-t| d(x,y)|`.
    pub geodesic_speed_max_residual: f64,
    pub flat: Option<FlatResiduals>,
    pub pass: bool,
}

/// Residuals of the equalities that hold on flat spaces.
#[derive(Debug, Clone, Serialize)]
pub struct FlatResiduals {
    pub cn_max_abs: f64,
    pub lemma_ii_equality_max: f64,
    pub affine_max: f64,
    /// Only reported for Euclidean spaces, where the pairing is a dot product.
    pub dot_product_max: Option<f64>,
}

pub fn run_battery(space: &Space, samples: usize, seed: u64) -> Result<BatteryReport> {
    space.validate()?;
    let mut rng = sampling::stream(seed, 1);
    let flat = space.is_flat();
    let mut r = BatteryReport {
        space: space.label(),
        samples,
        seed,
        cn_min: f64::INFINITY,
        cn_strictly_positive: 0,
        cs_min: f64::INFINITY,
        lemma_i_max_residual: 0.0,
        lemma_ii_max_violation: f64::NEG_INFINITY,
        geodesic_speed_max_residual: 0.0,
        flat: flat.then_some(FlatResiduals {
            cn_max_abs: 0.0,
            lemma_ii_equality_max: 0.0,
            affine_max: 0.0,
            dot_product_max: matches!(space, Space::Euclidean { .. }).then_some(0.0),
        }),
        pass: false,
    };

    for _ in 0..samples {
        let mut pt = || random_point(space, SAMPLE_RADIUS, &mut rng);
        let (x, y, u, v, z) = (pt(), pt(), pt(), pt(), pt());
        let lam: f64 = rng.random();
        let (s, t): (f64, f64) = (rng.random(), rng.random());

        let cn = space.cn_slack(&x, &u, &v, lam);
        r.cn_min = r.cn_min.min(cn);
        if cn > TRANSCENDENTAL_TOL {
            r.cn_strictly_positive += 1;
        }
        r.cs_min = r.cs_min.min(space.cs_slack(&x, &y, &u, &v));

        let lemma_i = space.qlin(&u, &v, &u, &z) + space.qlin(&v, &u, &v, &z) - space.sq(&u, &v);
        r.lemma_i_max_residual = r.lemma_i_max_residual.max(lemma_i.abs());

        let on_way = space.interp(&z, &u, lam);
        let lhs = lam * space.qlin(&z, &u, &z, &v);
        let rhs = space.qlin(&z, &on_way, &z, &v);
        r.lemma_ii_max_violation = r.lemma_ii_max_violation.max(lhs - rhs);

        let gs = space.interp(&x, &y, s);
        let gt = space.interp(&x, &y, t);
        let speed = (space.metric(&gs, &gt) - (s - t).abs() * space.metric(&x, &y)).abs();
        r.geodesic_speed_max_residual = r.geodesic_speed_max_residual.max(speed);

        if let Some(f) = r.flat.as_mut() {
            f.cn_max_abs = f.cn_max_abs.max(cn.abs());
            f.lemma_ii_equality_max = f.lemma_ii_equality_max.max((lhs - rhs).abs());
            // u ↦ <zu, zv> is affine along geodesics on flat sets
            let g = space.interp(&x, &y, lam);
            let affine = space.qlin(&z, &g, &z, &v)
                - (1.0 - lam) * space.qlin(&z, &x, &z, &v)
                - lam * space.qlin(&z, &y, &z, &v);
            f.affine_max = f.affine_max.max(affine.abs());
            if let (Some(dp), Some(a)) = (f.dot_product_max.as_mut(), dot_residual(space, &u, &v, &x, &y)) {
                *dp = dp.max(a);
            }
        }
    }

    r.pass = r.cn_min >= -EXACT_TOL
        && r.cs_min >= -EXACT_TOL
        && r.lemma_i_max_residual <= EXACT_TOL
        && r.lemma_ii_max_violation <= EXACT_TOL
        && r.geodesic_speed_max_residual <= TRANSCENDENTAL_TOL
        && r.flat.as_ref().is_none_or(|f| {
            f.cn_max_abs <= TRANSCENDENTAL_TOL
                && f.lemma_ii_equality_max <= TRANSCENDENTAL_TOL
                && f.affine_max <= TRANSCENDENTAL_TOL
                && f.dot_product_max.is_none_or(|d| d <= EXACT_TOL)
        });
    Ok(r)
}

fn dot_residual(space: &Space, u: &Point, v: &Point, x: &Point, y: &Point) -> Option<f64> {
    let (u, v, x, y) = (u.coords()?, v.coords()?, x.coords()?, y.coords()?);
    let dot: f64 = (0..u.len()).map(|i| (v[i] - u[i]) * (y[i] - x[i])).sum();
    let q = space.qlin(
        &Point::euclidean(u.to_vec()),
        &Point::euclidean(v.to_vec()),
        &Point::euclidean(x.to_vec()),
        &Point::euclidean(y.to_vec()),
    );
    Some((q - dot).abs())
}
