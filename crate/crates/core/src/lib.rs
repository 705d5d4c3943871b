//! Exact orbits, exceptional curves and the two-word symbolic coding of the
//! Henon-Devaney map f(x, y) = (x + 1/y, y - 1/y - x), plus the Boole map
//! B(x) = x - 1/x.
//!
//! Exact arithmetic is the default everywhere a sign decides a symbol.

pub mod boole;
pub mod coding;
pub mod curves;
pub mod decode;
pub mod map;
pub mod scalar;
pub mod suite;

pub use map::{ExactPoint, FloatPoint, MapConfig, MapError, Point};
pub use scalar::{Rational, Sign};
