//! Exact arithmetic substrate.

pub mod poly;
pub mod problem;
pub mod quasi;
pub mod rational;

pub use poly::Poly;
pub use problem::Problem;
pub use quasi::QuasiFunction;
pub use rational::{format_rational, frac, parse_rational, rat, Rational};
