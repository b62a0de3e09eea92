//! The soft Pellet test: counts roots of an interval polynomial in a disc
//! after Taylor shift and Graeffe iterations.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::dyadic::{ComplexInterval, Disc, Dyadic};
use crate::opoly::IntervalPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PelletOutcome {
    /// Exactly this many roots, with multiplicity, lie in the disc.
    Count(usize),
    /// Roots are too close to the boundary for the test to decide.
    NearBoundary,
    /// Coefficient enclosures are too wide to decide.
    InsufficientPrecision,
}

impl PelletOutcome {
    /// The integer code used in the literature: `m >= 0`, `-1` or `-2`.
    pub fn code(self) -> i64 {
        match self {
            PelletOutcome::Count(m) => m as i64,
            PelletOutcome::NearBoundary => -1,
            PelletOutcome::InsufficientPrecision => -2,
        }
    }
}

/// Counts calls of the test.
#[derive(Debug, Default)]
pub struct TestCounter(AtomicU64);

impl TestCounter {
    pub fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// `4 + ceil(log2(1 + log2(d + 1)))`.
pub fn graeffe_iterations(d: usize) -> u32 {
    let inner = 1.0 + ((d + 1) as f64).log2();
    4 + inner.log2().ceil() as u32
}

/// Runs the test on `delta` with arithmetic at relative precision `prec`.
pub fn t_star(f: &IntervalPolynomial, delta: &Disc, prec: u32) -> PelletOutcome {
    assert!(f.degree() >= 1, "the test needs degree at least 1");
    if f.leading().contains_zero() {
        return PelletOutcome::InsufficientPrecision;
    }
    let c = ComplexInterval::point(&delta.center);
    let mut g = f.taylor_shift(&c, &delta.radius, prec);
    for _ in 0..graeffe_iterations(f.degree()) {
        g = g.graeffe(prec);
    }
    decide(&g)
}

fn decide(g: &IntervalPolynomial) -> PelletOutcome {
    let upper: Vec<Dyadic> = g.coeffs().iter().map(ComplexInterval::abs_upper).collect();
    let lower: Vec<Dyadic> = g.coeffs().iter().map(ComplexInterval::abs_lower).collect();
    let sum_upper = upper.iter().fold(Dyadic::zero(), |a, b| &a + b);
    let sum_lower = lower.iter().fold(Dyadic::zero(), |a, b| &a + b);
    for k in 0..upper.len() {
        if lower[k] > &sum_upper - &upper[k] {
            return PelletOutcome::Count(k);
        }
    }
    let all_tied = (0..upper.len()).all(|k| upper[k] <= (&sum_lower - &lower[k]).shl(1));
    if all_tied {
        PelletOutcome::NearBoundary
    } else {
        PelletOutcome::InsufficientPrecision
    }
}

/// Runs the test on `delta` and `3 delta`; a count is returned only when
/// both agree, which certifies a natural cluster.
pub fn count_natural(f: &IntervalPolynomial, delta: &Disc, prec: u32) -> PelletOutcome {
    let inner = t_star(f, delta, prec);
    if inner == PelletOutcome::InsufficientPrecision {
        return inner;
    }
    let outer = t_star(f, &delta.scale(&Dyadic::from_i64(3)), prec);
    match (inner, outer) {
        (_, PelletOutcome::InsufficientPrecision) => PelletOutcome::InsufficientPrecision,
        (PelletOutcome::Count(a), PelletOutcome::Count(b)) if a == b => PelletOutcome::Count(a),
        _ => PelletOutcome::NearBoundary,
    }
}
