use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Space, TangentVec};
use crate::linalg;

/// Single-valued vector fields `A`, generating `F(x, y) = <A(x), xy>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VectorField {
    /// `A(x) = Mx + b` on Euclidean space. Construction requires `M + Mᵀ ⪰ 0`.
    EuclideanAffine { m: Vec<Vec<f64>>, b: Vec<f64> },
    /// `A(x) = scale · (x → target)` on any space.
    ///
    /// Here `F(x,y) + F(y,x) = scale · d²(x,y)`, so the field is monotone only
    /// for `scale = 0`. It serves as a non-monotone test case.
    GeodesicField { target: Point, scale: f64 },
}

impl VectorField {
    pub fn validate(&self, space: &Space) -> Result<()> {
        match self {
            VectorField::EuclideanAffine { m, b } => {
                let Space::Euclidean { dim } = space else {
                    return Err(Error::invalid("euclidean_affine fields need a euclidean space"));
                };
                if b.len() != *dim {
                    return Err(Error::invalid(format!("b must have length {dim}")));
                }
                let mm = linalg::square(m, *dim, "m")?;
                let sym = &mm + mm.transpose();
                if linalg::min_eigenvalue_sym(&sym) < -1e-10 {
                    return Err(Error::invalid("field is not monotone: m + mᵀ is not positive semidefinite"));
                }
                Ok(())
            }
            VectorField::GeodesicField { target, scale } => {
                space.check(target)?;
                if !(scale.is_finite() && *scale >= 0.0) {
                    return Err(Error::invalid(format!("scale {scale} must be >= 0")));
                }
                Ok(())
            }
        }
    }

    pub fn is_monotone(&self) -> bool {
        match self {
            VectorField::EuclideanAffine { .. } => true,
            VectorField::GeodesicField { scale, .. } => *scale == 0.0,
        }
    }

    /// The tangent element `A(x)` at `x`.
    pub fn at(&self, x: &Point) -> TangentVec {
        match self {
            VectorField::EuclideanAffine { m, b } => {
                let c = x.coords().expect("euclidean_affine evaluated off euclidean space");
                let mut v = linalg::matvec(m, c);
                for ((vi, bi), ci) in v.iter_mut().zip(b).zip(c) {
                    *vi += bi + ci;
                }
                TangentVec {
                    scale: 1.0,
                    base: x.clone(),
                    target: Point::euclidean(v),
                }
            }
            VectorField::GeodesicField { target, scale } => TangentVec {
                scale: *scale,
                base: x.clone(),
                target: target.clone(),
            },
        }
    }

    /// A point with `A(z) = 0` when one is known in closed form.
    pub fn zero(&self) -> Option<Point> {
        match self {
            VectorField::EuclideanAffine { m, b } => {
                let mm = linalg::square(m, b.len(), "m").ok()?;
                let rhs: Vec<f64> = b.iter().map(|v| -v).collect();
                linalg::solve(mm, &rhs).map(Point::euclidean)
            }
            VectorField::GeodesicField { target, .. } => Some(target.clone()),
        }
    }
}
