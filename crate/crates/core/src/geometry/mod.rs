//! Concrete Hadamard model spaces.
//!
//! Every space here is a complete CAT(0) geodesic metric space with unique
//! geodesics. A [`Space`] is a descriptor; a [`Point`] is a plain value whose
//! payload depends on the space it belongs to. All operations are pure.
//!
//! Geodesics are parametrized on `[0, 1]` with `geodesic(x, y, 0) = x` and
//! `geodesic(x, y, 1) = y`, at constant speed `dist(x, y)`.

pub mod battery;
mod chart;
pub(crate) mod hyperboloid;
pub(crate) mod spider;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chart::{ball_point, chart_dim, poll, random_in_ball, random_point};

/// Descriptor of a concrete model space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    /// `R^dim` with the Euclidean metric.
    Euclidean { dim: usize },
    /// Hyperbolic `dim`-space, as the upper sheet of the hyperboloid in
    /// Minkowski space `R^{1,dim}`.
    Hyperboloid { dim: usize },
    /// `rays` copies of `[0, inf)` glued at their origins.
    Spider { rays: usize },
    /// The l2 product of two spaces.
    Product { left: Box<Space>, right: Box<Space> },
}

impl Space {
    pub fn euclidean(dim: usize) -> Self {
        Space::Euclidean { dim }
    }

    pub fn hyperboloid(dim: usize) -> Self {
        Space::Hyperboloid { dim }
    }

    pub fn spider(rays: usize) -> Self {
        Space::Spider { rays }
    }

    pub fn product(left: Space, right: Space) -> Self {
        Space::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Space::Euclidean { dim } | Space::Hyperboloid { dim } if *dim == 0 => {
                Err(Error::invalid("space dimension must be at least 1"))
            }
            Space::Spider { rays } if *rays < 2 => {
                Err(Error::invalid("a spider needs at least 2 rays"))
            }
            Space::Product { left, right } => {
                left.validate()?;
                right.validate()
            }
            _ => Ok(()),
        }
    }

    /// Short human-readable name, e.g. `product(euclidean2, spider3)`.
    pub fn label(&self) -> String {
        match self {
            Space::Euclidean { dim } => format!("euclidean{dim}"),
            Space::Hyperboloid { dim } => format!("hyperboloid{dim}"),
            Space::Spider { rays } => format!("spider{rays}"),
            Space::Product { left, right } => {
                format!("product({}, {})", left.label(), right.label())
            }
        }
    }

    /// True when the CN inequality holds with equality everywhere.
    pub fn is_flat(&self) -> bool {
        match self {
            Space::Euclidean { .. } => true,
            Space::Product { left, right } => left.is_flat() && right.is_flat(),
            _ => false,
        }
    }

    /// A distinguished base point: the origin, the hyperboloid vertex, or the hub.
    pub fn origin(&self) -> Point {
        match self {
            Space::Euclidean { dim } => Point::Euclidean(vec![0.0; *dim]),
            Space::Hyperboloid { dim } => Point::hyperboloid_lift(&vec![0.0; *dim]),
            Space::Spider { .. } => Point::hub(),
            Space::Product { left, right } => Point::product(left.origin(), right.origin()),
        }
    }

    /// Checks that `p` is a valid point of this space.
    pub fn check(&self, p: &Point) -> Result<()> {
        match (self, p) {
            (Space::Euclidean { dim }, Point::Euclidean(c)) => {
                if c.len() != *dim {
                    return Err(Error::invalid(format!(
                        "euclidean point has {} coordinates, space has dimension {dim}",
                        c.len()
                    )));
                }
                finite(c)
            }
            (Space::Hyperboloid { dim }, Point::Hyperboloid(a)) => {
                if a.len() != dim + 1 {
                    return Err(Error::invalid(format!(
                        "hyperboloid point has {} ambient coordinates, expected {}",
                        a.len(),
                        dim + 1
                    )));
                }
                finite(a)?;
                hyperboloid::check_on_sheet(a)
            }
            (Space::Spider { rays }, Point::Spider { ray, r }) => {
                if *ray >= *rays {
                    return Err(Error::invalid(format!(
                        "ray index {ray} out of range for a spider with {rays} rays"
                    )));
                }
                if !r.is_finite() || *r < 0.0 {
                    return Err(Error::invalid(format!("spider radius {r} must be finite and >= 0")));
                }
                if *r == 0.0 && *ray != 0 {
                    return Err(Error::invalid("the hub must be stored on ray 0"));
                }
                Ok(())
            }
            (Space::Product { left, right }, Point::Product(a, b)) => {
                left.check(a)?;
                right.check(b)
            }
            (space, p) => Err(Error::invalid(format!(
                "point {} does not belong to space {}",
                p.kind(),
                space.label()
            ))),
        }
    }

    pub fn dist(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.metric(x, y))
    }

    /// The point `(1 - t) x + t y` on the geodesic from `x` to `y`.
    pub fn geodesic(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        self.check(x)?;
        self.check(y)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid(format!("geodesic parameter {t} outside [0, 1]")));
        }
        Ok(self.interp(x, y, t))
    }

    /// Quasilinearization `<uv, xy> = (d²(u,y) + d²(v,x) - d²(u,x) - d²(v,y)) / 2`.
    pub fn quasilin(&self, uv: &PointPair, xy: &PointPair) -> Result<f64> {
        for p in [&uv.from, &uv.to, &xy.from, &xy.to] {
            self.check(p)?;
        }
        Ok(self.qlin(&uv.from, &uv.to, &xy.from, &xy.to))
    }

    /// Slack in the CN inequality: right-hand side minus left-hand side.
    pub fn cn_gap(&self, x: &Point, u: &Point, v: &Point, lambda: f64) -> Result<f64> {
        for p in [x, u, v] {
            self.check(p)?;
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::invalid(format!("lambda {lambda} outside [0, 1]")));
        }
        Ok(self.cn_slack(x, u, v, lambda))
    }

    /// Slack in the four-point Cauchy–Schwarz inequality
    /// `d²(x,v) + d²(y,u) <= d²(x,u) + d²(y,v) + 2 d(x,y) d(u,v)`.
    pub fn cs_gap(&self, x: &Point, y: &Point, u: &Point, v: &Point) -> Result<f64> {
        for p in [x, y, u, v] {
            self.check(p)?;
        }
        Ok(self.cs_slack(x, y, u, v))
    }

    // Unchecked kernels. Callers guarantee membership.

    pub(crate) fn metric(&self, x: &Point, y: &Point) -> f64 {
        match (self, x, y) {
            (Space::Euclidean { .. }, Point::Euclidean(a), Point::Euclidean(b)) => {
                a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
            }
            (Space::Hyperboloid { .. }, Point::Hyperboloid(a), Point::Hyperboloid(b)) => {
                hyperboloid::dist(a, b)
            }
            (Space::Spider { .. }, Point::Spider { ray: i, r: a }, Point::Spider { ray: j, r: b }) => {
                spider::dist((*i, *a), (*j, *b))
            }
            (Space::Product { left, right }, Point::Product(a0, a1), Point::Product(b0, b1)) => {
                let d0 = left.metric(a0, b0);
                let d1 = right.metric(a1, b1);
                d0.hypot(d1)
            }
            _ => panic!("metric called on mismatched point payloads"),
        }
    }

    pub(crate) fn sq(&self, x: &Point, y: &Point) -> f64 {
        match (self, x, y) {
            (Space::Euclidean { .. }, Point::Euclidean(a), Point::Euclidean(b)) => {
                a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
            }
            (Space::Product { left, right }, Point::Product(a0, a1), Point::Product(b0, b1)) => {
                left.sq(a0, b0) + right.sq(a1, b1)
            }
            _ => {
                let d = self.metric(x, y);
                d * d
            }
        }
    }

    pub(crate) fn interp(&self, x: &Point, y: &Point, t: f64) -> Point {
        if t == 0.0 || x == y {
            return x.clone();
        }
        if t == 1.0 {
            return y.clone();
        }
        match (self, x, y) {
            (Space::Euclidean { .. }, Point::Euclidean(a), Point::Euclidean(b)) => {
                Point::Euclidean(a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect())
            }
            (Space::Hyperboloid { .. }, Point::Hyperboloid(a), Point::Hyperboloid(b)) => {
                Point::Hyperboloid(hyperboloid::geodesic(a, b, t))
            }
            (Space::Spider { .. }, Point::Spider { ray: i, r: a }, Point::Spider { ray: j, r: b }) => {
                let (ray, r) = spider::geodesic((*i, *a), (*j, *b), t);
                Point::spider(ray, r)
            }
            (Space::Product { left, right }, Point::Product(a0, a1), Point::Product(b0, b1)) => {
                Point::product(left.interp(a0, b0, t), right.interp(a1, b1, t))
            }
            _ => panic!("geodesic called on mismatched point payloads"),
        }
    }

    pub(crate) fn qlin(&self, u: &Point, v: &Point, x: &Point, y: &Point) -> f64 {
        0.5 * (self.sq(u, y) + self.sq(v, x) - self.sq(u, x) - self.sq(v, y))
    }

    pub(crate) fn cn_slack(&self, x: &Point, u: &Point, v: &Point, lambda: f64) -> f64 {
        let m = self.interp(u, v, lambda);
        (1.0 - lambda) * self.sq(x, u) + lambda * self.sq(x, v)
            - lambda * (1.0 - lambda) * self.sq(u, v)
            - self.sq(x, &m)
    }

    pub(crate) fn cs_slack(&self, x: &Point, y: &Point, u: &Point, v: &Point) -> f64 {
        self.sq(x, u) + self.sq(y, v) + 2.0 * self.metric(x, y) * self.metric(u, v)
            - self.sq(x, v)
            - self.sq(y, u)
    }
}

fn finite(c: &[f64]) -> Result<()> {
    if c.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("point coordinates must be finite"))
    }
}

/// A point of some model space. Payload shape depends on the space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub enum Point {
    Euclidean(Vec<f64>),
    /// Ambient coordinates in `R^{1,dim}`, time coordinate first.
    Hyperboloid(Vec<f64>),
    /// Radius along a ray. The hub is always `ray = 0, r = 0`.
    Spider { ray: usize, r: f64 },
    Product(Box<Point>, Box<Point>),
}

impl Point {
    pub fn euclidean(coords: impl Into<Vec<f64>>) -> Self {
        Point::Euclidean(coords.into())
    }

    /// Lifts spatial coordinates `s` to `(sqrt(1 + |s|²), s)` on the upper sheet.
    pub fn hyperboloid_lift(spatial: &[f64]) -> Self {
        Point::Hyperboloid(hyperboloid::lift(spatial))
    }

    /// Raw ambient coordinates; validity is checked by [`Space::check`].
    pub fn hyperboloid_ambient(ambient: impl Into<Vec<f64>>) -> Self {
        Point::Hyperboloid(ambient.into())
    }

    pub fn spider(ray: usize, r: f64) -> Self {
        if r == 0.0 {
            Point::hub()
        } else {
            Point::Spider { ray, r }
        }
    }

    pub fn hub() -> Self {
        Point::Spider { ray: 0, r: 0.0 }
    }

    pub fn product(left: Point, right: Point) -> Self {
        Point::Product(Box::new(left), Box::new(right))
    }

    /// Coordinates of a Euclidean point.
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Euclidean(c) => Some(c),
            _ => None,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Point::Euclidean(_) => "euclidean",
            Point::Hyperboloid(_) => "hyperboloid",
            Point::Spider { .. } => "spider",
            Point::Product(..) => "product",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Euclidean { coords: Vec<f64> },
    Hyperboloid { ambient: Vec<f64> },
    Spider { ray: usize, r: f64 },
    Product { left: Box<PointRepr>, right: Box<PointRepr> },
}

impl TryFrom<PointRepr> for Point {
    type Error = String;

    fn try_from(repr: PointRepr) -> std::result::Result<Self, String> {
        Ok(match repr {
            PointRepr::Euclidean { coords } => Point::Euclidean(coords),
            PointRepr::Hyperboloid { ambient } => Point::Hyperboloid(ambient),
            PointRepr::Spider { ray, r } => {
                if !r.is_finite() || r < 0.0 {
                    return Err(format!("spider radius {r} must be finite and >= 0"));
                }
                Point::spider(ray, r)
            }
            PointRepr::Product { left, right } => {
                Point::product(Point::try_from(*left)?, Point::try_from(*right)?)
            }
        })
    }
}

impl From<Point> for PointRepr {
    fn from(p: Point) -> Self {
        match p {
            Point::Euclidean(coords) => PointRepr::Euclidean { coords },
            Point::Hyperboloid(ambient) => PointRepr::Hyperboloid { ambient },
            Point::Spider { ray, r } => PointRepr::Spider { ray, r },
            Point::Product(a, b) => PointRepr::Product {
                left: Box::new((*a).into()),
                right: Box::new((*b).into()),
            },
        }
    }
}

/// The ordered pair `xy = (from, to)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPair {
    pub from: Point,
    pub to: Point,
}

impl PointPair {
    pub fn new(from: Point, to: Point) -> Self {
        PointPair { from, to }
    }
}

/// The tangent element `scale · (base → target)` of the cone at `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVec {
    pub scale: f64,
    pub base: Point,
    pub target: Point,
}

impl TangentVec {
    pub fn new(scale: f64, base: Point, target: Point) -> Result<Self> {
        if !scale.is_finite() || scale < 0.0 {
            return Err(Error::invalid(format!("tangent scale {scale} must be finite and >= 0")));
        }
        Ok(TangentVec { scale, base, target })
    }

    pub fn zero(base: Point) -> Self {
        TangentVec {
            scale: 0.0,
            target: base.clone(),
            base,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0 || self.base == self.target
    }
}

/// Pairs a tangent element at `p` with the pair `(p, q)`:
/// `s · <p target, p q>`.
pub fn pair_tangent(space: &Space, tv: &TangentVec, p: &PointPair) -> Result<f64> {
    space.check(&tv.base)?;
    space.check(&tv.target)?;
    space.check(&p.from)?;
    space.check(&p.to)?;
    if tv.base != p.from {
        return Err(Error::invalid("tangent base must coincide with the start of the pair"));
    }
    Ok(pair_unchecked(space, tv, &p.to))
}

pub(crate) fn pair_unchecked(space: &Space, tv: &TangentVec, to: &Point) -> f64 {
    if tv.is_zero() {
        return 0.0;
    }
    tv.scale * space.qlin(&tv.base, &tv.target, &tv.base, to)
}
