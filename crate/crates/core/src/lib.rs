//! Exact factorization of hypergeometric-like operators `-p d^2 - q d`
//! into shape-invariant ladder pairs, with principal and associated
//! eigenfunction generation and numeric Schrödinger-form checks.

pub mod associated;
pub mod degenerate;
pub mod diffop;
pub mod error;
pub mod exact;
pub mod families;
pub mod numeric;
pub mod principal;
pub mod suite;

pub use diffop::DiffOp;
pub use error::{Branch, Error, Result};
pub use exact::{Poly, Problem, QuasiFunction, Rational};
pub use families::Family;
