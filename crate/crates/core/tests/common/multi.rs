//! Exact multivariate polynomials and randomized perturbation trials.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::{q, Cq, Q};

#[derive(Clone, Debug)]
pub struct Poly {
    pub terms: BTreeMap<Vec<u32>, Cq>,
    pub n: usize,
}

impl Poly {
    pub fn degrees(&self) -> Vec<u32> {
        (0..self.n)
            .map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
            .collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Substitutes `b` for the first `b.len()` variables.
    pub fn specialize(&self, b: &[Cq]) -> BTreeMap<Vec<u32>, Cq> {
        let k = b.len();
        let mut out: BTreeMap<Vec<u32>, Cq> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (x, &p) in b.iter().zip(e) {
                for _ in 0..p {
                    v = v.mul(x);
                }
            }
            let slot = out.entry(e[k..].to_vec()).or_insert_with(Cq::zero);
            *slot = slot.add(&v);
        }
        out
    }
}

/// Largest squared modulus of `a - b`, coefficient-wise.
pub fn dist2(a: &BTreeMap<Vec<u32>, Cq>, b: &BTreeMap<Vec<u32>, Cq>) -> Q {
    let mut m = Q::zero();
    for k in a.keys().chain(b.keys()) {
        let z = Cq::zero();
        let d = a.get(k).unwrap_or(&z).sub(b.get(k).unwrap_or(&z)).norm2();
        if d > m {
            m = d;
        }
    }
    m
}

pub fn norm2(a: &BTreeMap<Vec<u32>, Cq>) -> Q {
    dist2(a, &BTreeMap::new())
}

/// Rational upper bound on `|z|` within `2^-40`.
pub fn abs_upper(z: &Cq) -> Q {
    if z.im.is_zero() {
        return z.re.abs();
    }
    let scale = BigInt::from(1) << 80;
    let n = z.norm2() * Q::from_integer(scale);
    let s = n.floor().to_integer().sqrt() + 1;
    Q::new(s, BigInt::from(1) << 40)
}

pub struct Dice(SplitMix64);

impl Dice {
    pub fn new(seed: u64) -> Self {
        Dice(SplitMix64::seed_from_u64(seed))
    }

    /// Uniform-ish integer in `[lo, hi]`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.0.next_u64() % (hi - lo + 1) as u64) as i64
    }

    /// A complex number `(s + t i) / 8` with `s^2 + t^2 <= 64`, often on the
    /// unit circle.
    pub fn unit(&mut self) -> Cq {
        loop {
            let (s, t) = match self.int(0, 3) {
                0 => (8 * if self.int(0, 1) == 0 { 1 } else { -1 }, 0),
                1 => (0, 8 * if self.int(0, 1) == 0 { 1 } else { -1 }),
                _ => (self.int(-8, 8), self.int(-8, 8)),
            };
            if s * s + t * t <= 64 {
                return Cq::new(q(s, 8), q(t, 8));
            }
        }
    }
}

/// Random integer polynomial in `n` variables with every partial degree at
/// most `d` and degree exactly `d` in some variable.
pub fn random_poly(rng: &mut Dice, n: usize, d: u32) -> Poly {
    loop {
        let mut terms = BTreeMap::new();
        for _ in 0..rng.int(1, 8) {
            let e: Vec<u32> = (0..n).map(|_| rng.int(0, d as i64) as u32).collect();
            let c = rng.int(-20, 20);
            if c != 0 {
                terms.insert(e, Cq::real(q(c, 1)));
            }
        }
        let p = Poly { terms, n };
        if !p.terms.is_empty() && p.max_degree() == d {
            return p;
        }
    }
}

/// A point with `|b_i| <= 4`, real in about a third of the draws.
pub fn random_point(rng: &mut Dice, k: usize) -> Vec<Cq> {
    (0..k)
        .map(|_| loop {
            let re = q(rng.int(-32, 32), 8);
            let im = if rng.int(0, 2) == 0 {
                Q::zero()
            } else {
                q(rng.int(-32, 32), 8)
            };
            let z = Cq::new(re, im);
            if z.norm2() <= q(16, 1) {
                break z;
            }
        })
        .collect()
}

/// `p` with each coefficient moved by at most `delta`.
pub fn perturb_poly(rng: &mut Dice, p: &Poly, delta: &Q) -> Poly {
    let terms = p
        .terms
        .iter()
        .map(|(e, c)| (e.clone(), c.add(&rng.unit().mul(&Cq::real(delta.clone())))))
        .collect();
    Poly { terms, n: p.n }
}

pub fn perturb_point(rng: &mut Dice, b: &[Cq], delta: &Q) -> Vec<Cq> {
    b.iter()
        .map(|x| x.add(&rng.unit().mul(&Cq::real(delta.clone()))))
        .collect()
}

pub fn max_abs_coeff(p: &Poly) -> Q {
    p.terms
        .values()
        .map(abs_upper)
        .max()
        .unwrap_or_else(Q::zero)
}
