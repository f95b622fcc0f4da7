//! Equilibrium problems on Hadamard spaces.
//!
//! The crate covers four model spaces ([`geometry`]), bifunctions built from
//! convex functionals and vector fields ([`bifunction`]), their resolvents
//! ([`resolvent`]), the proximal point algorithm ([`proxalg`]) and the finite
//! KKM constructions ([`kkm`]). The `hadamard` binary wraps all of it behind
//! JSON configs ([`cli`]).
//!
//! ```
//! use hadamard::bifunction::{Bifunction, ConvexFunctional, DomainK};
//! use hadamard::geometry::{Point, Space};
//! use hadamard::resolvent::{resolve, ResolventQuery};
//!
//! let s = Space::euclidean(1);
//! let f = Bifunction::FromFunctional(ConvexFunctional::half_sq_dist(Point::euclidean(vec![0.0]), 1.0));
//! let k = DomainK::WholeSpace;
//! let r = resolve(&ResolventQuery::new(&s, &f, &k, 1.0, Point::euclidean(vec![2.0])))?;
//! assert_eq!(r.z, Point::euclidean(vec![1.0]));
//! # Ok::<(), hadamard::Error>(())
//! ```

pub mod bifunction;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod kkm;
mod linalg;
pub mod proxalg;
pub mod resolvent;
pub mod sampling;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/bifunctions.md")]
    mod bifunctions {}
    #[doc = include_str!("../../../book/src/resolvents.md")]
    mod resolvents {}
    #[doc = include_str!("../../../book/src/proximal.md")]
    mod proximal {}
    #[doc = include_str!("../../../book/src/kkm.md")]
    mod kkm {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
