//! Closed-form resolvents on the whole space.

use crate::bifunction::{Bifunction, ConvexFunctional, DomainK, VectorField};
use crate::error::{Error, Result};
use crate::geometry::{Point, Space};
use crate::linalg;

/// `prox_{λg}(x) = argmin_y [λ g(y) + ½ d²(y, x)]`.
pub fn prox(space: &Space, g: &ConvexFunctional, lambda: f64, x: &Point) -> Result<Point> {
    g.validate(space)?;
    space.check(x)?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid(format!("lambda {lambda} must be > 0")));
    }
    prox_unchecked(space, g, lambda, x)
        .ok_or_else(|| Error::invalid("prox has no closed form for this functional"))
}

pub(crate) fn prox_unchecked(space: &Space, g: &ConvexFunctional, lambda: f64, x: &Point) -> Option<Point> {
    Some(match g {
        ConvexFunctional::HalfSqDist { p, weight } => {
            let lw = lambda * weight;
            space.interp(x, p, lw / (1.0 + lw))
        }
        ConvexFunctional::DistTo { p } => {
            let d = space.metric(x, p);
            if d <= lambda {
                p.clone()
            } else {
                space.interp(x, p, lambda / d)
            }
        }
        ConvexFunctional::AbsValue => {
            let v = x.coords()?[0];
            Point::euclidean(vec![v.signum() * (v.abs() - lambda).max(0.0)])
        }
        ConvexFunctional::Quadratic { q, b } => {
            let c = x.coords()?;
            let rhs: Vec<f64> = c.iter().zip(b).map(|(xi, bi)| xi - lambda * bi).collect();
            Point::euclidean(linalg::solve_shifted(q, lambda, &rhs)?)
        }
    })
}

/// Registry lookup keyed on (bifunction family, space, unconstrained domain).
pub(crate) fn lookup(space: &Space, f: &Bifunction, domain: &DomainK, lambda: f64, x: &Point) -> Option<Point> {
    if !matches!(domain, DomainK::WholeSpace) {
        return None;
    }
    match f {
        Bifunction::FromFunctional(g) => prox_unchecked(space, g, lambda, x),
        // x - z = λ(Mz + b)
        Bifunction::FromField(VectorField::EuclideanAffine { m, b }) => {
            let c = x.coords()?;
            let rhs: Vec<f64> = c.iter().zip(b).map(|(xi, bi)| xi - lambda * bi).collect();
            linalg::solve_shifted(m, lambda, &rhs).map(Point::euclidean)
        }
        _ => None,
    }
}
