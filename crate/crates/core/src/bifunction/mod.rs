//! Bifunctions `F(x, y)` defining the equilibrium problem
//! "find `x̄ ∈ K` with `F(x̄, y) >= 0` for every `y ∈ K`", together with
//! sampled certificates for monotonicity, convexity in `y`, and the primal and
//! dual (Minty) residuals.

mod domain;
mod field;
mod functional;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pair_unchecked, Point, Space};

pub use domain::DomainK;
pub use field::VectorField;
pub use functional::ConvexFunctional;

type Evaluator = dyn Fn(&Space, &Point, &Point) -> f64 + Send + Sync;

/// A user-supplied bifunction. Serializes by name; only the names known to
/// [`CustomBifunction::builtin`] can be read back from a config.
#[derive(Clone)]
pub struct CustomBifunction {
    name: String,
    eval: Arc<Evaluator>,
}

impl CustomBifunction {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&Space, &Point, &Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        CustomBifunction {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Named custom bifunctions available from configs:
    ///
    /// * `zero`: `F ≡ 0`, every point is an equilibrium;
    /// * `neg_sq_dist`: `F(x, y) = -d²(x, y)`, concave in `y`;
    /// * `neg_one`: `F ≡ -1`, violates `F(x, x) >= 0`.
    pub fn builtin(name: &str) -> Option<Self> {
        Some(match name {
            "zero" => Self::new(name, |_, _, _| 0.0),
            "neg_sq_dist" => Self::new(name, |s, x, y| -s.sq(x, y)),
            "neg_one" => Self::new(name, |_, _, _| -1.0),
            _ => return None,
        })
    }
}

impl fmt::Debug for CustomBifunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomBifunction").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "BifunctionRepr", into = "BifunctionRepr")]
pub enum Bifunction {
    /// `F(x, y) = g(y) - g(x)`.
    FromFunctional(ConvexFunctional),
    /// `F(x, y) = <A(x), xy>`.
    FromField(VectorField),
    Custom(CustomBifunction),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum BifunctionRepr {
    Functional { g: ConvexFunctional },
    Field { field: VectorField },
    Custom { name: String },
}

impl TryFrom<BifunctionRepr> for Bifunction {
    type Error = String;

    fn try_from(r: BifunctionRepr) -> std::result::Result<Self, String> {
        Ok(match r {
            BifunctionRepr::Functional { g } => Bifunction::FromFunctional(g),
            BifunctionRepr::Field { field } => Bifunction::FromField(field),
            BifunctionRepr::Custom { name } => Bifunction::Custom(
                CustomBifunction::builtin(&name).ok_or_else(|| format!("unknown custom bifunction `{name}`"))?,
            ),
        })
    }
}

impl From<Bifunction> for BifunctionRepr {
    fn from(f: Bifunction) -> Self {
        match f {
            Bifunction::FromFunctional(g) => BifunctionRepr::Functional { g },
            Bifunction::FromField(field) => BifunctionRepr::Field { field },
            Bifunction::Custom(c) => BifunctionRepr::Custom { name: c.name },
        }
    }
}

impl Bifunction {
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(&Space, &Point, &Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Bifunction::Custom(CustomBifunction::new(name, eval))
    }

    pub fn validate(&self, space: &Space) -> Result<()> {
        space.validate()?;
        match self {
            Bifunction::FromFunctional(g) => g.validate(space),
            Bifunction::FromField(a) => a.validate(space),
            Bifunction::Custom(_) => Ok(()),
        }
    }

    pub fn eval(&self, space: &Space, x: &Point, y: &Point) -> Result<f64> {
        space.check(x)?;
        space.check(y)?;
        Ok(self.value(space, x, y))
    }

    pub(crate) fn value(&self, space: &Space, x: &Point, y: &Point) -> f64 {
        match self {
            Bifunction::FromFunctional(g) => g.value(space, y) - g.value(space, x),
            Bifunction::FromField(a) => pair_unchecked(space, &a.at(x), y),
            Bifunction::Custom(c) => (c.eval)(space, x, y),
        }
    }

    /// Structural monotonicity, when it is known without sampling.
    pub fn is_monotone(&self) -> Option<bool> {
        match self {
            Bifunction::FromFunctional(_) => Some(true),
            Bifunction::FromField(a) => Some(a.is_monotone()),
            Bifunction::Custom(_) => None,
        }
    }

    /// Points where the bifunction is known to be critical in the whole
    /// space: the functional's minimizer or the field's zero.
    pub fn anchors(&self) -> Vec<Point> {
        match self {
            Bifunction::FromFunctional(g) => g.minimizer().into_iter().collect(),
            Bifunction::FromField(a) => a.zero().into_iter().collect(),
            Bifunction::Custom(_) => Vec::new(),
        }
    }

    /// An element of the equilibrium set on `K` when one is known in closed
    /// form.
    pub fn known_equilibrium(&self, space: &Space, domain: &DomainK) -> Option<Point> {
        match self {
            Bifunction::FromFunctional(
                ConvexFunctional::HalfSqDist { p, .. } | ConvexFunctional::DistTo { p },
            ) => Some(domain.project(space, p)),
            Bifunction::FromFunctional(ConvexFunctional::AbsValue) => Some(domain.project(space, &space.origin())),
            _ => self
                .anchors()
                .into_iter()
                .find(|p| space.check(p).is_ok() && domain.contains(space, p, 0.0)),
        }
    }
}

/// `F(x, y)`.
pub fn eval_f(space: &Space, f: &Bifunction, x: &Point, y: &Point) -> Result<f64> {
    f.eval(space, x, y)
}

/// `max(0, max F(x,y) + F(y,x))` over the sampled pairs; zero certifies
/// monotonicity on the sample.
pub fn monotonicity_violation(space: &Space, f: &Bifunction, pairs: &[(Point, Point)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::invalid("monotonicity check needs at least one pair"));
    }
    let mut worst = 0.0f64;
    for (x, y) in pairs {
        space.check(x)?;
        space.check(y)?;
        worst = worst.max(f.value(space, x, y) + f.value(space, y, x));
    }
    Ok(worst)
}

/// `max(0, max F(x, γ(y0,y1,t)) - (1-t)F(x,y0) - tF(x,y1))` over the samples.
pub fn convexity_in_y_violation(
    space: &Space,
    f: &Bifunction,
    x: &Point,
    samples: &[(Point, Point, f64)],
) -> Result<f64> {
    space.check(x)?;
    let mut worst = 0.0f64;
    for (y0, y1, t) in samples {
        space.check(y0)?;
        space.check(y1)?;
        if !(0.0..=1.0).contains(t) {
            return Err(Error::invalid(format!("geodesic parameter {t} outside [0, 1]")));
        }
        if *t == 0.0 || *t == 1.0 {
            continue;
        }
        let mid = space.interp(y0, y1, *t);
        let gap = f.value(space, x, &mid) - (1.0 - t) * f.value(space, x, y0) - t * f.value(space, x, y1);
        worst = worst.max(gap);
    }
    Ok(worst)
}

/// `min_{y ∈ grid} F(x̄, y)`. A value `>= -ε` certifies an ε-equilibrium on the grid.
pub fn equilibrium_residual(space: &Space, f: &Bifunction, xbar: &Point, grid: &[Point]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::invalid("residual grid is empty"));
    }
    space.check(xbar)?;
    grid.iter().try_fold(f64::INFINITY, |m, y| {
        space.check(y)?;
        Ok(m.min(f.value(space, xbar, y)))
    })
}

/// `max_{y ∈ grid} F(y, x̄)`. A value `<= ε` certifies an ε-solution of the dual problem.
pub fn dual_residual(space: &Space, f: &Bifunction, xbar: &Point, grid: &[Point]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::invalid("residual grid is empty"));
    }
    space.check(xbar)?;
    grid.iter().try_fold(f64::NEG_INFINITY, |m, y| {
        space.check(y)?;
        Ok(m.max(f.value(space, y, xbar)))
    })
}
