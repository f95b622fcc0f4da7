//! Local charts: mapping unit-cube coordinates into geodesic balls, and the
//! compass poll sets used by direct search.

use rand::Rng;

use super::{hyperboloid, spider, Point, Space};

/// Number of unit-cube coordinates consumed by [`ball_point`].
pub fn chart_dim(space: &Space) -> usize {
    match space {
        Space::Euclidean { dim } | Space::Hyperboloid { dim } => *dim,
        Space::Spider { .. } => 2,
        Space::Product { left, right } => chart_dim(left) + chart_dim(right) + 1,
    }
}

/// Maps `u ∈ [0,1]^chart_dim` to a point within distance `radius` of `center`.
///
/// The map is onto the closed ball. Coordinates outside `[0, 1]` are clamped.
pub fn ball_point(space: &Space, center: &Point, radius: f64, u: &[f64]) -> Point {
    match (space, center) {
        (Space::Euclidean { .. }, Point::Euclidean(c)) => {
            let w = cube_to_ball(u);
            Point::Euclidean(c.iter().zip(&w).map(|(ci, wi)| ci + radius * wi).collect())
        }
        (Space::Hyperboloid { .. }, Point::Hyperboloid(c)) => {
            let w = cube_to_ball(u);
            let basis = hyperboloid::tangent_basis(c);
            let mut v = vec![0.0; c.len()];
            for (wi, b) in w.iter().zip(&basis) {
                for (vk, bk) in v.iter_mut().zip(b) {
                    *vk += radius * wi * bk;
                }
            }
            Point::Hyperboloid(hyperboloid::exp(c, &v))
        }
        (Space::Spider { rays }, Point::Spider { ray, r }) => {
            let k = ((u[0].clamp(0.0, 1.0) * *rays as f64) as usize).min(rays - 1);
            let (ray, r) = spider::toward((*ray, *r), k, radius * u[1].clamp(0.0, 1.0));
            Point::spider(ray, r)
        }
        (Space::Product { left, right }, Point::Product(cl, cr)) => {
            let dl = chart_dim(left);
            let dr = chart_dim(right);
            let theta = u[dl + dr].clamp(0.0, 1.0) * std::f64::consts::FRAC_PI_2;
            Point::product(
                ball_point(left, cl, radius * theta.cos(), &u[..dl]),
                ball_point(right, cr, radius * theta.sin(), &u[dl..dl + dr]),
            )
        }
        _ => panic!("ball_point called with a point from another space"),
    }
}

// Radial stretch of [-1,1]^n onto the unit ball.
fn cube_to_ball(u: &[f64]) -> Vec<f64> {
    let v: Vec<f64> = u.iter().map(|x| 2.0 * x.clamp(0.0, 1.0) - 1.0).collect();
    let inf = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let two = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if two == 0.0 {
        return v;
    }
    v.iter().map(|x| x * inf / two).collect()
}

/// A random point within `radius` of `center`.
pub fn random_in_ball<R: Rng + ?Sized>(space: &Space, center: &Point, radius: f64, rng: &mut R) -> Point {
    let u: Vec<f64> = (0..chart_dim(space)).map(|_| rng.random::<f64>()).collect();
    ball_point(space, center, radius, &u)
}

/// A random point within `radius` of the space's origin.
pub fn random_point<R: Rng + ?Sized>(space: &Space, radius: f64, rng: &mut R) -> Point {
    random_in_ball(space, &space.origin(), radius, rng)
}

/// Compass poll set at step `h`: points at distance `h` from `z` along each
/// canonical chart direction, including hub crossings on a spider.
pub fn poll(space: &Space, z: &Point, h: f64) -> Vec<Point> {
    match (space, z) {
        (Space::Euclidean { .. }, Point::Euclidean(c)) => {
            let mut out = Vec::with_capacity(2 * c.len());
            for i in 0..c.len() {
                for sign in [1.0, -1.0] {
                    let mut p = c.clone();
                    p[i] += sign * h;
                    out.push(Point::Euclidean(p));
                }
            }
            out
        }
        (Space::Hyperboloid { .. }, Point::Hyperboloid(c)) => {
            let basis = hyperboloid::tangent_basis(c);
            let mut out = Vec::with_capacity(2 * basis.len());
            for b in &basis {
                for sign in [1.0, -1.0] {
                    let v: Vec<f64> = b.iter().map(|x| sign * h * x).collect();
                    out.push(Point::Hyperboloid(hyperboloid::exp(c, &v)));
                }
            }
            out
        }
        (Space::Spider { rays }, Point::Spider { ray, r }) => {
            let (k, r) = (*ray, *r);
            if r == 0.0 {
                return (0..*rays).map(|j| Point::spider(j, h)).collect();
            }
            let mut out = vec![Point::spider(k, r + h)];
            if r >= h {
                out.push(Point::spider(k, r - h));
            } else {
                out.extend((0..*rays).filter(|&j| j != k).map(|j| Point::spider(j, h - r)));
            }
            out
        }
        (Space::Product { left, right }, Point::Product(a, b)) => {
            let mut out: Vec<Point> = poll(left, a, h)
                .into_iter()
                .map(|p| Point::product(p, (**b).clone()))
                .collect();
            out.extend(poll(right, b, h).into_iter().map(|q| Point::product((**a).clone(), q)));
            out
        }
        _ => panic!("poll called with a point from another space"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spaces() -> Vec<Space> {
        vec![
            Space::euclidean(3),
            Space::hyperboloid(2),
            Space::spider(4),
            Space::product(Space::euclidean(2), Space::spider(3)),
        ]
    }

    #[test]
    fn ball_points_stay_in_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in spaces() {
            for _ in 0..500 {
                let c = random_point(&s, 2.0, &mut rng);
                let p = random_in_ball(&s, &c, 0.8, &mut rng);
                s.check(&p).unwrap();
                assert!(s.metric(&c, &p) <= 0.8 + 1e-12, "{}", s.label());
            }
        }
    }

    #[test]
    fn poll_points_are_at_step_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for s in spaces() {
            for _ in 0..100 {
                let z = random_point(&s, 2.0, &mut rng);
                for h in [0.5, 1e-3] {
                    for p in poll(&s, &z, h) {
                        s.check(&p).unwrap();
                        assert!((s.metric(&z, &p) - h).abs() < 1e-9, "{}", s.label());
                    }
                }
            }
        }
    }

    #[test]
    fn spider_poll_crosses_hub() {
        let s = Space::spider(3);
        let pts = poll(&s, &Point::spider(1, 0.2), 0.5);
        assert!(pts.contains(&Point::spider(0, 0.3)));
        assert!(pts.contains(&Point::spider(2, 0.3)));
        assert!(pts.contains(&Point::spider(1, 0.7)));
        assert_eq!(poll(&s, &Point::hub(), 1.0).len(), 3);
    }
}
