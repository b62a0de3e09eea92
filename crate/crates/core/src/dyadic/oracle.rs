//! Refinable exact numbers.
//!
//! A [`RealOracle`] answers `query(L)` with an interval of width at most
//! `2^-L` containing its value. Answers at finer `L` lie inside answers at
//! coarser `L`.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::{ComplexInterval, DyadicInterval, EXACT};
use super::number::Dyadic;
use crate::error::ParseError;

#[derive(Clone)]
pub struct RealOracle(Arc<Node>);

struct Node {
    kind: Kind,
    cache: Mutex<Option<(i64, DyadicInterval)>>,
}

enum Kind {
    Exact(Dyadic),
    Rational(BigRational),
    Sqrt(BigInt),
    Algebraic {
        poly: Vec<BigInt>,
        initial: (Dyadic, Dyadic),
        state: Mutex<Bracket>,
    },
    Sum(Vec<RealOracle>),
    Product(RealOracle, RealOracle),
    Neg(RealOracle),
}

#[derive(Clone)]
enum Bracket {
    Open {
        lo: Dyadic,
        hi: Dyadic,
        sign_lo: i32,
    },
    Root(Dyadic),
}

fn eval_int_poly(poly: &[BigInt], x: &Dyadic) -> Dyadic {
    let mut acc = Dyadic::zero();
    for c in poly.iter().rev() {
        acc = &(&acc * x) + &Dyadic::from_int(c.clone());
    }
    acc
}

impl RealOracle {
    fn from_kind(kind: Kind) -> Self {
        RealOracle(Arc::new(Node {
            kind,
            cache: Mutex::new(None),
        }))
    }

    pub fn exact(x: Dyadic) -> Self {
        Self::from_kind(Kind::Exact(x))
    }

    pub fn zero() -> Self {
        Self::exact(Dyadic::zero())
    }

    pub fn integer(n: i64) -> Self {
        Self::exact(Dyadic::from_i64(n))
    }

    pub fn rational(r: BigRational) -> Self {
        match Dyadic::from_rational(&r) {
            Some(d) => Self::exact(d),
            None => Self::from_kind(Kind::Rational(r)),
        }
    }

    /// A decimal literal such as `-1.25e-3`.
    pub fn decimal(s: &str) -> Result<Self, ParseError> {
        super::number::parse_decimal(s)
            .map(Self::rational)
            .ok_or_else(|| ParseError::new(0, format!("invalid decimal `{s}`")))
    }

    /// The non-negative square root of `k >= 0`.
    pub fn sqrt(k: BigInt) -> Self {
        assert!(!k.is_negative(), "sqrt of a negative integer");
        let s = k.sqrt();
        if &s * &s == k {
            Self::exact(Dyadic::from_int(s))
        } else {
            Self::from_kind(Kind::Sqrt(k))
        }
    }

    /// The unique root of `poly` (coefficients by increasing degree) in
    /// `[lo, hi]`. The polynomial must change sign on the interval or vanish
    /// at an endpoint.
    pub fn algebraic(poly: Vec<BigInt>, lo: Dyadic, hi: Dyadic) -> Result<Self, String> {
        if lo > hi {
            return Err("empty isolating interval".into());
        }
        if poly.iter().all(Zero::is_zero) {
            return Err("zero polynomial".into());
        }
        let flo = eval_int_poly(&poly, &lo);
        let fhi = eval_int_poly(&poly, &hi);
        let state = if flo.is_zero() {
            Bracket::Root(lo.clone())
        } else if fhi.is_zero() {
            Bracket::Root(hi.clone())
        } else if flo.signum() != fhi.signum() {
            Bracket::Open {
                lo: lo.clone(),
                hi: hi.clone(),
                sign_lo: flo.signum(),
            }
        } else {
            return Err("polynomial does not change sign on the interval".into());
        };
        Ok(Self::from_kind(Kind::Algebraic {
            poly,
            initial: (lo, hi),
            state: Mutex::new(state),
        }))
    }

    /// The exact dyadic value, if known without refinement.
    pub fn as_dyadic(&self) -> Option<&Dyadic> {
        match &self.0.kind {
            Kind::Exact(d) => Some(d),
            _ => None,
        }
    }

    /// The exact rational value, if the oracle is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match &self.0.kind {
            Kind::Exact(d) => Some(d.to_rational()),
            Kind::Rational(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.as_dyadic().is_some_and(Dyadic::is_zero)
    }

    pub fn add(&self, o: &RealOracle) -> RealOracle {
        if self.is_exact_zero() {
            return o.clone();
        }
        if o.is_exact_zero() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_rational(), o.as_rational()) {
            return Self::rational(a + b);
        }
        let mut terms = Vec::new();
        for x in [self, o] {
            match &x.0.kind {
                Kind::Sum(v) => terms.extend(v.iter().cloned()),
                _ => terms.push(x.clone()),
            }
        }
        Self::from_kind(Kind::Sum(terms))
    }

    pub fn neg(&self) -> RealOracle {
        if let Some(a) = self.as_rational() {
            return Self::rational(-a);
        }
        if let Kind::Neg(inner) = &self.0.kind {
            return inner.clone();
        }
        Self::from_kind(Kind::Neg(self.clone()))
    }

    pub fn sub(&self, o: &RealOracle) -> RealOracle {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RealOracle) -> RealOracle {
        if let (Some(a), Some(b)) = (self.as_rational(), o.as_rational()) {
            return Self::rational(a * b);
        }
        if self.is_exact_zero() || o.is_exact_zero() {
            return Self::zero();
        }
        if self.as_rational().is_some_and(|r| r.is_one()) {
            return o.clone();
        }
        if o.as_rational().is_some_and(|r| r.is_one()) {
            return self.clone();
        }
        if self.as_rational().is_some_and(|r| (-r).is_one()) {
            return o.neg();
        }
        if o.as_rational().is_some_and(|r| (-r).is_one()) {
            return self.neg();
        }
        Self::from_kind(Kind::Product(self.clone(), o.clone()))
    }

    /// An interval of width at most `2^-l` containing the value. No nesting
    /// guarantee across calls.
    fn enclose(&self, l: i64) -> DyadicInterval {
        match &self.0.kind {
            Kind::Exact(d) => DyadicInterval::point(d.clone()),
            Kind::Rational(r) => {
                let k = l + 1;
                let num = scale_pow2(r.numer(), k);
                let den = scale_pow2(r.denom(), -k);
                let n = num.div_floor(&den);
                grid_pair(n, -k)
            }
            Kind::Sqrt(k) => {
                let j = l + 1;
                if j >= 0 {
                    let s = (k << (2 * j) as usize).sqrt();
                    grid_pair(s, -j)
                } else {
                    let s = (k >> (-2 * j) as usize).sqrt();
                    grid_pair(s, -j)
                }
            }
            Kind::Algebraic { poly, state, .. } => {
                let mut st = state.lock().unwrap();
                let target = Dyadic::pow2(-l);
                loop {
                    match &*st {
                        Bracket::Root(x) => return DyadicInterval::point(x.clone()),
                        Bracket::Open { lo, hi, sign_lo } => {
                            if (hi - lo) <= target {
                                return DyadicInterval::from_bounds(lo, hi);
                            }
                            let mid = (lo + hi).shl(-1);
                            let s = eval_int_poly(poly, &mid).signum();
                            *st = if s == 0 {
                                Bracket::Root(mid)
                            } else if s == *sign_lo {
                                Bracket::Open {
                                    lo: mid,
                                    hi: hi.clone(),
                                    sign_lo: *sign_lo,
                                }
                            } else {
                                Bracket::Open {
                                    lo: lo.clone(),
                                    hi: mid,
                                    sign_lo: *sign_lo,
                                }
                            };
                        }
                    }
                }
            }
            Kind::Sum(terms) => {
                let extra = (usize::BITS - (terms.len().max(1) - 1).leading_zeros()) as i64;
                terms
                    .iter()
                    .map(|t| t.enclose(l + extra))
                    .reduce(|a, b| a.add(&b, EXACT))
                    .unwrap_or_else(DyadicInterval::zero)
            }
            Kind::Product(a, b) => {
                let ka = magnitude_log2(a);
                let kb = magnitude_log2(b);
                let ea = a.enclose(l + 2 + kb);
                let eb = b.enclose(l + 2 + ka);
                ea.mul(&eb, EXACT)
            }
            Kind::Neg(a) => a.enclose(l).neg(),
        }
    }

    /// An interval of width `2^-l` containing the value.
    ///
    /// The answer is a function of the value and `l` alone: with
    /// `a = floor(x 2^(l+2)) 2^-(l+2)` it is `[a - 2^-(l+1), a + 2^-(l+1)]`,
    /// which contains `[a, a + 2^-(l+2))`. Consecutive answers nest, so every
    /// answer lies inside all coarser ones. Once a value is known to be
    /// dyadic it is returned as an exact point.
    pub fn query(&self, l: i64) -> DyadicInterval {
        if let Kind::Exact(d) = &self.0.kind {
            return DyadicInterval::point(d.clone());
        }
        let mut cache = self.0.cache.lock().unwrap();
        if let Some((cl, iv)) = cache.as_ref() {
            if *cl == l {
                return iv.clone();
            }
        }
        let k = l + 2;
        let mut t = None;
        let mut last_hi = BigInt::zero();
        for extra in 0..64 {
            let enc = self.enclose(k + 1 + extra);
            if enc.is_point() {
                *cache = Some((l, enc.clone()));
                return enc;
            }
            let lo = enc.lo().floor_scaled(k);
            let hi = enc.hi().floor_scaled(k);
            if lo == hi {
                t = Some(lo);
                break;
            }
            last_hi = hi;
        }
        // Still straddling a grid point after 64 extra bits: the value is
        // taken to be at or above it, consistently at every level.
        let t = t.unwrap_or(last_hi);
        let a = Dyadic::new(t, -k);
        let out = DyadicInterval::new(a, Dyadic::pow2(-l - 1));
        *cache = Some((l, out.clone()));
        out
    }

    /// Smallest `k` with `|x| + 1 <= 2^k`, from a coarse enclosure.
    pub fn magnitude_bound_log2(&self) -> i64 {
        magnitude_log2(self)
    }

    fn structurally_eq(&self, o: &RealOracle) -> bool {
        if Arc::ptr_eq(&self.0, &o.0) {
            return true;
        }
        match (&self.0.kind, &o.0.kind) {
            (Kind::Exact(a), Kind::Exact(b)) => a == b,
            (Kind::Rational(a), Kind::Rational(b)) => a == b,
            (Kind::Sqrt(a), Kind::Sqrt(b)) => a == b,
            (
                Kind::Algebraic {
                    poly: p,
                    initial: i,
                    ..
                },
                Kind::Algebraic {
                    poly: q,
                    initial: j,
                    ..
                },
            ) => p == q && i == j,
            (Kind::Sum(a), Kind::Sum(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.structurally_eq(y))
            }
            (Kind::Product(a, b), Kind::Product(c, d)) => {
                a.structurally_eq(c) && b.structurally_eq(d)
            }
            (Kind::Neg(a), Kind::Neg(b)) => a.structurally_eq(b),
            _ => false,
        }
    }

    fn is_atomic(&self) -> bool {
        match &self.0.kind {
            Kind::Exact(d) => !d.is_negative(),
            Kind::Rational(r) => !r.is_negative(),
            Kind::Sqrt(_) | Kind::Algebraic { .. } => true,
            _ => false,
        }
    }
}

fn magnitude_log2(x: &RealOracle) -> i64 {
    let e = x.enclose(0);
    let b = &e.abs_upper() + &Dyadic::one();
    b.ceil_log2().unwrap_or(0)
}

fn scale_pow2(x: &BigInt, k: i64) -> BigInt {
    if k >= 0 {
        x << k as usize
    } else {
        x.clone()
    }
}

/// `[n, n+1] * 2^e`.
fn grid_pair(n: BigInt, e: i64) -> DyadicInterval {
    let lo = Dyadic::new(n, e);
    let hi = &lo + &Dyadic::pow2(e);
    DyadicInterval::from_bounds(&lo, &hi)
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for RealOracle {
    /// Prints in the syntax accepted by the system parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            Kind::Exact(d) => write_rational(f, &d.to_rational()),
            Kind::Rational(r) => write_rational(f, r),
            Kind::Sqrt(k) => write!(f, "sqrt({k})"),
            Kind::Algebraic { poly, initial, .. } => {
                write!(f, "root(")?;
                for (i, c) in poly.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "; ")?;
                write_rational(f, &initial.0.to_rational())?;
                write!(f, ", ")?;
                write_rational(f, &initial.1.to_rational())?;
                write!(f, ")")
            }
            Kind::Sum(terms) => {
                write!(f, "(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Kind::Product(a, b) => write!(f, "({a}*{b})"),
            Kind::Neg(a) => {
                if a.is_atomic() {
                    write!(f, "(-{a})")
                } else {
                    write!(f, "(-1*{a})")
                }
            }
        }
    }
}

impl fmt::Debug for RealOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialEq for RealOracle {
    fn eq(&self, other: &Self) -> bool {
        self.structurally_eq(other)
    }
}

/// A complex oracle `re + i im`.
#[derive(Clone, PartialEq, Debug)]
pub struct OracleNumber {
    pub re: RealOracle,
    pub im: RealOracle,
}

impl OracleNumber {
    pub fn new(re: RealOracle, im: RealOracle) -> Self {
        OracleNumber { re, im }
    }

    pub fn real(re: RealOracle) -> Self {
        Self::new(re, RealOracle::zero())
    }

    pub fn integer(n: i64) -> Self {
        Self::real(RealOracle::integer(n))
    }

    pub fn dyadic(d: Dyadic) -> Self {
        Self::real(RealOracle::exact(d))
    }

    pub fn rational(r: BigRational) -> Self {
        Self::real(RealOracle::rational(r))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_exact_zero() && self.im.is_exact_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_exact_zero()
    }

    /// A rectangle whose sides have width at most `2^-l`.
    pub fn query(&self, l: i64) -> ComplexInterval {
        ComplexInterval::new(self.re.query(l), self.im.query(l))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.re.neg(), self.im.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        Self::new(re, im)
    }

    /// Upper bound on the modulus from a coarse query.
    pub fn abs_upper(&self) -> Dyadic {
        self.query(0).abs_upper()
    }
}

impl fmt::Display for OracleNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_exact_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "({} + {}*i)", self.re, self.im)
        }
    }
}
