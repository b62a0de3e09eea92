//! Exact dyadic numbers, interval enclosures, planar geometry and
//! refinable number oracles.

mod geometry;
mod interval;
mod number;
mod oracle;

pub use geometry::{Box, Disc, DyadicComplex, PolyBox, PolyDisc};
pub use interval::{ComplexInterval, DyadicInterval, EXACT};
pub use number::{parse_decimal, parse_rational_literal, Dyadic};
pub use oracle::{OracleNumber, RealOracle};
