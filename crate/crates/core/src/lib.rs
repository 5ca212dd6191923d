//! Mass invariants of asymptotically hyperbolic Riemannian manifolds.

// `!(a > b)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod conformal;
pub mod error;
pub mod gauge;
pub mod geom;
pub mod jet;
pub mod quadrature;
pub mod mass;
pub mod reference;

pub use error::{Error, Result};
pub use geom::{DerivativeScheme, MetricField, Point, ScalarField};
pub use jet::Jet;
