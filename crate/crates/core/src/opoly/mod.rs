//! Sparse oracle polynomials, interval polynomials and the univariate
//! transforms used by the disc-counting test.

mod interval_poly;
mod oracle_poly;

pub use interval_poly::IntervalPolynomial;
pub use oracle_poly::{OraclePolynomial, Term, TriangularSystem};
