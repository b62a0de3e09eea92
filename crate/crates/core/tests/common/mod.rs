//! Exact complex rational arithmetic used as the reference in tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use tricluster::dyadic::{ComplexInterval, Disc, Dyadic, DyadicComplex, DyadicInterval};

pub type Q = BigRational;

pub fn q(p: i64, d: i64) -> Q {
    Q::new(p.into(), d.into())
}

pub fn dy(m: i64, e: i64) -> Dyadic {
    Dyadic::new(BigInt::from(m), e)
}

pub fn dc(re: Dyadic, im: Dyadic) -> DyadicComplex {
    DyadicComplex::new(re, im)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cq {
    pub re: Q,
    pub im: Q,
}

impl Cq {
    pub fn new(re: Q, im: Q) -> Self {
        Cq { re, im }
    }

    pub fn real(re: Q) -> Self {
        Cq { re, im: Q::zero() }
    }

    pub fn zero() -> Self {
        Cq::real(Q::zero())
    }

    pub fn one() -> Self {
        Cq::real(q(1, 1))
    }

    pub fn of(z: &DyadicComplex) -> Self {
        Cq::new(z.re.to_rational(), z.im.to_rational())
    }

    pub fn add(&self, o: &Cq) -> Cq {
        Cq::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Cq) -> Cq {
        Cq::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &Cq) -> Cq {
        Cq::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn norm2(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }
}

pub fn real_contains(iv: &DyadicInterval, x: &Q) -> bool {
    iv.lo().to_rational() <= *x && *x <= iv.hi().to_rational()
}

pub fn contains(iv: &ComplexInterval, z: &Cq) -> bool {
    real_contains(&iv.re, &z.re) && real_contains(&iv.im, &z.im)
}

/// Coefficients, by increasing degree, of the monic polynomial with these roots.
pub fn poly_from_roots(roots: &[Cq]) -> Vec<Cq> {
    let mut p = vec![Cq::one()];
    for r in roots {
        let mut next = vec![Cq::zero(); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            next[i] = next[i].sub(&c.mul(r));
        }
        p = next;
    }
    p
}

pub fn eval(p: &[Cq], z: &Cq) -> Cq {
    let mut acc = Cq::zero();
    for c in p.iter().rev() {
        acc = acc.mul(z).add(c);
    }
    acc
}

/// Roots of `roots` lying in the closed disc, with multiplicity.
pub fn count_in(roots: &[DyadicComplex], d: &Disc) -> usize {
    let r2 = &d.radius * &d.radius;
    roots.iter().filter(|z| z.dist2(&d.center) <= r2).count()
}

pub fn q_abs_le(a: &Q, b: &Q) -> bool {
    a.abs() <= *b
}

/// Dyadic numbers `m 2^e` with small mantissa.
pub fn dyadic(bits: u32, emin: i64, emax: i64) -> impl Strategy<Value = Dyadic> {
    let m = 1i64 << bits;
    (-m..=m, emin..=emax).prop_map(|(m, e)| dy(m, e))
}

pub fn complex(bits: u32, emin: i64, emax: i64) -> impl Strategy<Value = DyadicComplex> {
    (dyadic(bits, emin, emax), dyadic(bits, emin, emax)).prop_map(|(a, b)| dc(a, b))
}

pub mod multi;
