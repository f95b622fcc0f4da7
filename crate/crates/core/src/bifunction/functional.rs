use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Space};
use crate::linalg;

fn unit_weight() -> f64 {
    1.0
}

/// Convex functionals `g` that generate bifunctions `F(x, y) = g(y) - g(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexFunctional {
    /// `g = (weight / 2) d²(·, p)`.
    HalfSqDist {
        p: Point,
        #[serde(default = "unit_weight")]
        weight: f64,
    },
    /// `g = d(·, p)`.
    DistTo { p: Point },
    /// `g = |·|` on the real line.
    AbsValue,
    /// `g = ½ xᵀQx + bᵀx` on Euclidean space, `Q` symmetric PSD.
    Quadratic { q: Vec<Vec<f64>>, b: Vec<f64> },
}

impl ConvexFunctional {
    pub fn half_sq_dist(p: Point, weight: f64) -> Self {
        ConvexFunctional::HalfSqDist { p, weight }
    }

    pub fn validate(&self, space: &Space) -> Result<()> {
        match self {
            ConvexFunctional::HalfSqDist { p, weight } => {
                space.check(p)?;
                if !(weight.is_finite() && *weight > 0.0) {
                    return Err(Error::invalid(format!("weight {weight} must be > 0")));
                }
                Ok(())
            }
            ConvexFunctional::DistTo { p } => space.check(p),
            ConvexFunctional::AbsValue => match space {
                Space::Euclidean { dim: 1 } => Ok(()),
                _ => Err(Error::invalid("abs_value is only defined on euclidean1")),
            },
            ConvexFunctional::Quadratic { q, b } => {
                let Space::Euclidean { dim } = space else {
                    return Err(Error::invalid("quadratic functionals need a euclidean space"));
                };
                if b.len() != *dim {
                    return Err(Error::invalid(format!("b must have length {dim}")));
                }
                let m = linalg::square(q, *dim, "q")?;
                if !linalg::is_symmetric(&m, 1e-10) {
                    return Err(Error::invalid("q must be symmetric"));
                }
                if linalg::min_eigenvalue_sym(&m) < -1e-10 {
                    return Err(Error::invalid("q must be positive semidefinite"));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, space: &Space, x: &Point) -> Result<f64> {
        space.check(x)?;
        Ok(self.value(space, x))
    }

    pub(crate) fn value(&self, space: &Space, x: &Point) -> f64 {
        match self {
            ConvexFunctional::HalfSqDist { p, weight } => 0.5 * weight * space.sq(x, p),
            ConvexFunctional::DistTo { p } => space.metric(x, p),
            ConvexFunctional::AbsValue => x.coords().map_or(f64::NAN, |c| c[0].abs()),
            ConvexFunctional::Quadratic { q, b } => {
                let Some(c) = x.coords() else { return f64::NAN };
                let qx = linalg::matvec(q, c);
                let quad: f64 = qx.iter().zip(c).map(|(a, v)| a * v).sum();
                let lin: f64 = b.iter().zip(c).map(|(a, v)| a * v).sum();
                0.5 * quad + lin
            }
        }
    }

    /// The global minimizer when it is known in closed form.
    pub fn minimizer(&self) -> Option<Point> {
        match self {
            ConvexFunctional::HalfSqDist { p, .. } | ConvexFunctional::DistTo { p } => Some(p.clone()),
            ConvexFunctional::AbsValue => Some(Point::euclidean(vec![0.0])),
            ConvexFunctional::Quadratic { q, b } => {
                let n = b.len();
                let m = linalg::square(q, n, "q").ok()?;
                if linalg::min_eigenvalue_sym(&m) <= 1e-12 {
                    return None;
                }
                let rhs: Vec<f64> = b.iter().map(|v| -v).collect();
                linalg::solve(m, &rhs).map(Point::euclidean)
            }
        }
    }
}
