//! Continued fractions of hyperelliptic Halphen elements `(sqrt(X) - sqrt(Y)) / (x - y)`.

pub mod approx;
pub mod arith;
pub mod bal;
pub mod cfengine;
pub mod curve;
pub mod error;
pub mod irregular;
pub mod job;
pub mod spectral;
pub mod symmetry;

pub use error::{Error, Result};
