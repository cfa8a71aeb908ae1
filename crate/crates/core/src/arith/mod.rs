//! Scalars, dense polynomials, truncated series, roots and small linear solves.

mod linalg;
mod poly;
mod roots;
mod scalar;
mod series;

pub use linalg::{determinant, resultant, solve_linear, sylvester};
pub use poly::{interpolate_unit_circle, recenter, Poly};
pub use roots::poly_roots;
pub use scalar::{nan, Precision, Scalar, DEFAULT_PRECISION_BITS, MAX_PRECISION_BITS, MIN_PRECISION_BITS};
pub use series::{hh_series, series_sqrt, Series};
