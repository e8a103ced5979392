//! Finite-support distributions, couplings and stochastic orders, with a
//! counterexample search for diversification and risk-attitude properties
//! of law-invariant preferences.
//!
//! Everything is generic over a [`Scalar`] backend: exact rationals (the
//! default) or `f64` with a comparison tolerance.

pub mod audit;
pub mod coupling;
pub mod dist;
pub mod functionals;
pub mod iterate;
pub mod orders;
pub mod scalar;
mod simplex;

pub use coupling::{CouplingKind, JointDist, Tag};
pub use dist::{DiscreteDist, DistError};
pub use functionals::{Functional, Preference};
pub use orders::{concave_order_geq, increasing_convex_order_leq, OrderVerdict, Relation};
pub use scalar::{NumericMode, Rational, Scalar, Value};
