//! High-precision solver and benchmark tools for the highly oscillatory
//! initial-value problem
//!
//! ```text
//! eps^2 * phi''(x) + a(x) * phi(x) = 0,    a(x) > 0 on [lo, hi],
//! ```
//!
//! in the small-`eps` regime where direct numerical integration must resolve
//! wavelengths of size `O(eps)`. The library builds truncated phase-series
//! approximations whose accuracy *improves* as `eps` shrinks, selects a
//! (near-)optimal truncation order, and measures the resulting error against
//! brute-force reference solutions — all in arbitrary-precision arithmetic so
//! that errors far below `f64` resolution remain observable.
//!
//! Module map:
//!
//! - [`scalar`]: arbitrary-precision complex numbers and the precision policy.
//! - [`jet`]: truncated Taylor series (jets) with arithmetic and elementary
//!   functions, the engine behind high-order differentiation.
//! - [`expr`]: the coefficient-expression language `a(x)`.
//! - [`cheb`]: Chebyshev interpolation, integration, and sup-norms on an
//!   interval.
//! - [`wkb`]: the phase-series recurrence, initial-condition matching, and
//!   approximate-solution evaluation.
//! - [`truncation`]: truncation-order selection (least-term and
//!   oracle-measured) and growth-rate fitting of the series terms.
//! - [`oracle`]: reference solutions — special-function solves for the
//!   linear-coefficient case and a high-order arbitrary-precision integrator
//!   for everything else.
//! - [`cli`]: the command-line benchmark driver.

// Guards written as `!(a > b)` are deliberate: they must reject NaN, which
// `a <= b` would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Recurrence and convolution loops read several indices per iteration;
// the iterator rewrite clippy suggests does not apply.
#![allow(clippy::needless_range_loop)]

pub mod cheb;
pub mod cli;
pub mod error;
pub mod expr;
pub mod jet;
pub mod oracle;
pub mod scalar;
pub mod truncation;
pub mod wkb;

pub use error::{Error, Result};
pub use expr::Expr;
pub use jet::Jet;
pub use scalar::{Precision, Scalar};
