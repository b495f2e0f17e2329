//! Exact verification of curvature properties of minimal submanifolds of
//! spheres given pointwise by their shape operators.
//!
//! * [`exactnum`]: rationals and the field Q(√3)
//! * [`linalg`]: exact dense matrices, trace, characteristic polynomials
//! * [`polyring`]: polynomials in normal coordinates, reduction on the unit sphere
//! * [`catalog`]: the built-in g = 6 focal submanifold data and the dataset format
//! * [`curvature`]: Gauss equation, Ricci tensor, minimality, Willmore and Einstein tests
//! * [`sweep`]: spectral invariance of `Σ t_α A_α` over unit normals
//! * [`tracealg`]: trace-word algebra and the g = 4 Willmore replay
//! * [`cli`]: certificates and the command-line driver

pub mod catalog;
pub mod cli;
pub mod curvature;
pub mod exactnum;
pub mod linalg;
pub mod polyring;
pub mod sweep;
pub mod tracealg;

pub use catalog::{builtin, parse_dataset, ShapeOperatorSet};
pub use exactnum::{parse_scalar, QuadExt, Rational};
pub use linalg::{Matrix, UniPoly};
pub use polyring::MultiPoly;
pub use tracealg::{TraceExpr, Word};
