//! p-modulus of descending-path families on rooted trees.
//!
//! - [`tree`]: radially symmetric tree specifications and finite truncations.
//! - [`analytic`]: closed-form modulus series, convergence classification,
//!   optimal densities, and the p = 1 / p = infinity endpoints.
//! - [`solver`]: numeric convex solver on finite trees.
//! - [`dual`]: unit flows and certified lower bounds.
//! - [`critical`]: 1-2 trees, critical exponents, transience classification.
//! - [`walk`]: Monte-Carlo random-walk escape probabilities.

// Validation code writes `!(w > 0.0)` deliberately so that NaN fails the
// check; `w <= 0.0` would accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod critical;
pub mod dual;
pub mod error;
pub mod report;
pub mod schema;
pub mod series;
pub mod solver;
pub mod tree;
pub mod walk;

pub use error::{ModtreeError, Result};
