use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ball_point, chart_dim, poll, Point, Space};
use crate::sampling::Halton;

/// The closed convex feasible set `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainK {
    WholeSpace,
    /// Closed geodesic ball.
    Ball { center: Point, radius: f64 },
    /// Axis-aligned box, Euclidean only.
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl DomainK {
    pub fn ball(center: Point, radius: f64) -> Self {
        DomainK::Ball { center, radius }
    }

    pub fn validate(&self, space: &Space) -> Result<()> {
        match self {
            DomainK::WholeSpace => Ok(()),
            DomainK::Ball { center, radius } => {
                space.check(center)?;
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::invalid(format!("ball radius {radius} must be > 0")));
                }
                Ok(())
            }
            DomainK::Box { lower, upper } => {
                let Space::Euclidean { dim } = space else {
                    return Err(Error::invalid("box domains need a euclidean space"));
                };
                if lower.len() != *dim || upper.len() != *dim {
                    return Err(Error::invalid(format!("box bounds must have length {dim}")));
                }
                if lower.iter().zip(upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u)) {
                    return Err(Error::invalid("box bounds must be finite with lower <= upper"));
                }
                Ok(())
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, DomainK::WholeSpace)
    }

    pub fn contains(&self, space: &Space, x: &Point, tol: f64) -> bool {
        match self {
            DomainK::WholeSpace => true,
            DomainK::Ball { center, radius } => space.metric(center, x) <= radius + tol,
            DomainK::Box { lower, upper } => x.coords().is_some_and(|c| {
                c.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| *v >= l - tol && *v <= u + tol)
            }),
        }
    }

    /// Metric projection onto `K`.
    pub fn project(&self, space: &Space, x: &Point) -> Point {
        match self {
            DomainK::WholeSpace => x.clone(),
            DomainK::Ball { center, radius } => {
                let d = space.metric(center, x);
                if d <= *radius {
                    x.clone()
                } else {
                    space.interp(center, x, radius / d)
                }
            }
            DomainK::Box { lower, upper } => match x.coords() {
                Some(c) => Point::euclidean(
                    c.iter().zip(lower.iter().zip(upper)).map(|(v, (l, u))| v.clamp(*l, *u)).collect::<Vec<_>>(),
                ),
                None => x.clone(),
            },
        }
    }

    /// `diam(K)`, exact for the bounded variants.
    pub fn diameter(&self) -> Option<f64> {
        match self {
            DomainK::WholeSpace => None,
            // every model space here is geodesically complete
            DomainK::Ball { radius, .. } => Some(2.0 * radius),
            DomainK::Box { lower, upper } => {
                Some(lower.iter().zip(upper).map(|(l, u)| (u - l) * (u - l)).sum::<f64>().sqrt())
            }
        }
    }

    /// `sup_{y ∈ K} d(x, y)`, exact for the bounded variants.
    pub fn sup_dist(&self, space: &Space, x: &Point) -> Option<f64> {
        match self {
            DomainK::WholeSpace => None,
            DomainK::Ball { center, radius } => Some(space.metric(x, center) + radius),
            DomainK::Box { lower, upper } => {
                let c = x.coords()?;
                Some(
                    c.iter()
                        .zip(lower.iter().zip(upper))
                        .map(|(v, (l, u))| (v - l).abs().max((u - v).abs()).powi(2))
                        .sum::<f64>()
                        .sqrt(),
                )
            }
        }
    }

    /// Boundary candidates: box corners, or the ball's centre and its compass
    /// points at full radius.
    pub fn extremes(&self, space: &Space) -> Vec<Point> {
        match self {
            DomainK::WholeSpace => Vec::new(),
            DomainK::Ball { center, radius } => {
                let mut out = vec![center.clone()];
                out.extend(poll(space, center, *radius));
                out
            }
            DomainK::Box { lower, upper } => {
                let n = lower.len().min(12);
                (0..1usize << n)
                    .map(|mask| {
                        let c: Vec<f64> = (0..lower.len())
                            .map(|i| if i < n && mask >> i & 1 == 1 { upper[i] } else { lower[i] })
                            .collect();
                        Point::euclidean(c)
                    })
                    .collect()
            }
        }
    }

    /// `n` low-discrepancy points of `K`. For the whole space the points fill
    /// the ball of radius `radius` around `center`.
    pub fn sample(&self, space: &Space, n: usize, seed: u64, center: &Point, radius: f64) -> Vec<Point> {
        match self {
            DomainK::WholeSpace => Halton::new(chart_dim(space), seed)
                .take(n)
                .map(|u| ball_point(space, center, radius, &u))
                .collect(),
            DomainK::Ball { center, radius } => Halton::new(chart_dim(space), seed)
                .take(n)
                .map(|u| ball_point(space, center, *radius, &u))
                .collect(),
            DomainK::Box { lower, upper } => Halton::new(lower.len(), seed)
                .take(n)
                .map(|u| {
                    Point::euclidean(
                        u.iter()
                            .zip(lower.iter().zip(upper))
                            .map(|(t, (l, h))| l + t * (h - l))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect(),
        }
    }
}
