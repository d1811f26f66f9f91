//! Numerical study of the Wronskian W(ζ) attached to the family of
//! ordinary differential operators −d²/dx² + (ζ − m x^{m−1})² on the
//! real line: recessive solutions at x = ±∞, argument-principle
//! certification of the complex zeros of W, growth-order measurements,
//! and the bounded eigenfunctions those zeros produce.

// Frozen reference constants keep every digit of their source computation;
// `!(x > 0)` guards deliberately reject NaN; the log-scale and double-double
// types use named arithmetic methods instead of operator overloads so call
// sites stay explicit about which arithmetic domain they are in.
#![allow(
    clippy::excessive_precision,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::should_implement_trait
)]

pub mod asymptotics;
pub mod cache;
pub mod config;
pub mod dd;
pub mod error;
pub mod incgamma;
pub mod logcomplex;
pub mod ode;
pub mod problem;
pub mod quadrature;
pub mod report;
pub mod singular;
pub mod spectral;
pub mod verify;
pub mod wronskian;
pub mod zerofinder;

pub use error::{Error, Result};
pub use logcomplex::LogComplex;
pub use problem::{EvalPoint, Problem};
