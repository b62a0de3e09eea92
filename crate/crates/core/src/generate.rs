//! Random dense triangular systems with and without multiple solutions.
//!
//! All randomness comes from SplitMix64 seeded with the user seed. An
//! integer in `[-B, B]` is drawn by rejection: take `u = next_u64()`, retry
//! while `u >= 2^64 - (2^64 mod (2B+1))`, and return `(u mod (2B+1)) - B`.
//! Polynomials are built in the order documented on [`generate`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::dyadic::{Dyadic, OracleNumber, RealOracle};
use crate::opoly::{OraclePolynomial, Term, TriangularSystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub degrees: Vec<u32>,
    pub seed: u64,
    /// Coefficients are drawn from `[-2^bound_log2, 2^bound_log2]`.
    pub bound_log2: u32,
    pub multiple: bool,
}

impl GeneratorSpec {
    pub fn simple(degrees: &[u32], seed: u64) -> Self {
        GeneratorSpec {
            degrees: degrees.to_vec(),
            seed,
            bound_log2: 9,
            multiple: false,
        }
    }

    pub fn multiple(degrees: &[u32], seed: u64) -> Self {
        GeneratorSpec {
            multiple: true,
            ..Self::simple(degrees, seed)
        }
    }
}

struct Draw {
    rng: SplitMix64,
    bound: u64,
}

impl Draw {
    fn int(&mut self) -> i64 {
        let span = 2 * self.bound + 1;
        let zone = u64::MAX - (u64::MAX % span + 1) % span;
        loop {
            let u = self.rng.next_u64();
            if u <= zone {
                return (u % span) as i64 - self.bound as i64;
            }
        }
    }

    fn nonzero(&mut self) -> i64 {
        loop {
            let v = self.int();
            if v != 0 {
                return v;
            }
        }
    }
}

type IntPoly = BTreeMap<Vec<u32>, BigInt>;

/// Exponent vectors over `k` variables with total degree at most `t`,
/// by increasing total degree, then lexicographically.
fn monomials(k: usize, t: u32) -> Vec<Vec<u32>> {
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(k, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for s in 0..=t {
        rec(k, s, &mut Vec::new(), &mut out);
    }
    out
}

fn add_term(p: &mut IntPoly, e: Vec<u32>, c: BigInt) {
    let v = p.entry(e.clone()).or_default();
    *v += c;
    if v.is_zero() {
        p.remove(&e);
    }
}

fn mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut r = IntPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            add_term(&mut r, e, ca * cb);
        }
    }
    r
}

/// Dense polynomial in `z_1..z_k` of total degree at most `t`, embedded in
/// `arity` variables. A nonzero constant term is forced when `lead` is set.
fn dense(d: &mut Draw, k: usize, t: u32, arity: usize, lead: bool) -> IntPoly {
    let mut p = IntPoly::new();
    for m in monomials(k, t) {
        let is_const = m.iter().all(|&e| e == 0);
        let c = if lead && is_const {
            d.nonzero()
        } else {
            d.int()
        };
        let mut e = m;
        e.resize(arity, 0);
        add_term(&mut p, e, c.into());
    }
    p
}

/// `sum_j g_j z_i^j` with `g_j` dense of total degree `deg - j` in the
/// previous variables; the leading coefficient is a nonzero constant.
fn simple_poly(d: &mut Draw, i: usize, deg: u32) -> IntPoly {
    let mut p = IntPoly::new();
    for j in 0..=deg {
        let g = if j == deg {
            let mut g = IntPoly::new();
            add_term(&mut g, vec![0; i], d.nonzero().into());
            g
        } else {
            dense(d, i - 1, deg - j, i, false)
        };
        for (mut e, c) in g {
            e[i - 1] += j;
            add_term(&mut p, e, c);
        }
    }
    p
}

fn to_oracle(arity: usize, p: IntPoly) -> OraclePolynomial {
    let terms = p
        .into_iter()
        .map(|(exps, c)| Term {
            exps,
            coeff: OracleNumber::real(RealOracle::exact(Dyadic::from_int(c))),
        })
        .collect();
    OraclePolynomial::new(arity, terms).expect("generated polynomial is nonzero")
}

/// Generates a system of the given type.
///
/// In simple mode each `f_i` is `sum_{j<=d_i} g_j z_i^j`, coefficients of
/// `g_0, g_1, ...` drawn in turn and monomials of each `g_j` in the order of
/// increasing total degree then lexicographic exponents. In multiple mode
/// `f_1` is simple and for `i >= 2`, `f_i = a_i^2 (b_i z_i + c_i)^e` with
/// `a_i` simple of degree `floor(d_i/2)`, `e = d_i mod 2`, and, when `e = 1`,
/// `b_i` then `c_i` dense of total degree `d_i` in the previous variables.
pub fn generate(spec: &GeneratorSpec) -> TriangularSystem {
    assert!(
        spec.degrees.iter().all(|&d| d >= 1),
        "degrees must be positive"
    );
    assert!(spec.bound_log2 < 62, "coefficient bound too large");
    let mut d = Draw {
        rng: SplitMix64::seed_from_u64(spec.seed),
        bound: 1u64 << spec.bound_log2,
    };
    let mut polys = Vec::new();
    for (idx, &deg) in spec.degrees.iter().enumerate() {
        let i = idx + 1;
        let p = if !spec.multiple || i == 1 {
            simple_poly(&mut d, i, deg)
        } else {
            let a = simple_poly(&mut d, i, deg / 2);
            let mut f = mul(&a, &a);
            if deg % 2 == 1 {
                let mut lin = IntPoly::new();
                for (mut e, c) in dense(&mut d, i - 1, deg, i, true) {
                    e[i - 1] = 1;
                    add_term(&mut lin, e, c);
                }
                for (e, c) in dense(&mut d, i - 1, deg, i, false) {
                    add_term(&mut lin, e, c);
                }
                f = mul(&f, &lin);
            }
            f
        };
        polys.push(to_oracle(i, p));
    }
    TriangularSystem::new(polys).expect("generated system is triangular")
}
