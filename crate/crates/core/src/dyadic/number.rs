use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// An exact binary fraction `mantissa * 2^exponent`.
///
/// The representation is canonical: the mantissa is odd, or zero with a zero
/// exponent, so derived equality and hashing agree with numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Dyadic {
            mantissa: mantissa >> tz,
            exponent: exponent + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    pub fn from_int(v: BigInt) -> Self {
        Self::new(v, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent: e,
        }
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_bits == 0 {
            (frac as i64, -1074)
        } else {
            ((frac | (1u64 << 52)) as i64, exp_bits - 1075)
        };
        Some(Self::new(BigInt::from(sign * m), e))
    }

    /// Exact conversion of a rational whose denominator is a power of two.
    pub fn from_rational(r: &BigRational) -> Option<Self> {
        let den = r.denom();
        let tz = den.trailing_zeros()?;
        if (den >> tz) != BigInt::one() {
            return None;
        }
        Some(Self::new(r.numer().clone(), -(tz as i64)))
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as usize)
        } else {
            BigRational::new(
                self.mantissa.clone(),
                BigInt::one() << (-self.exponent) as usize,
            )
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Multiplies by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    /// Bit length of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mantissa.bits()
    }

    /// An integer `k` with `2^(k-1) <= |x| < 2^k`; `None` for zero.
    pub fn mag_exp(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exponent + self.mantissa.bits() as i64)
        }
    }

    /// Smallest `k` with `|x| <= 2^k`; `None` for zero.
    pub fn ceil_log2(&self) -> Option<i64> {
        let k = self.mag_exp()?;
        if self.mantissa.abs().is_one() {
            Some(k - 1)
        } else {
            Some(k)
        }
    }

    /// Rounds to nearest-ish with at most `prec` mantissa bits.
    /// Returns the rounded value and an upper bound on the rounding error.
    pub fn round(&self, prec: u32) -> (Dyadic, Dyadic) {
        let bits = self.bits();
        let prec = prec.max(2) as u64;
        if bits <= prec {
            return (self.clone(), Dyadic::zero());
        }
        let shift = bits - prec;
        let m = &self.mantissa >> shift as usize;
        let e = self.exponent + shift as i64;
        (Dyadic::new(m, e), Dyadic::pow2(e))
    }

    /// Rounds a value toward `+inf` keeping at most `prec` mantissa bits.
    pub fn round_up(&self, prec: u32) -> Dyadic {
        let bits = self.bits();
        let prec = prec.max(2) as u64;
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        let (q, _) = self
            .mantissa
            .div_mod_floor(&(BigInt::one() << shift as usize));
        Dyadic::new(q + 1, self.exponent + shift as i64)
    }

    /// Rounds toward `-inf` keeping at most `prec` mantissa bits.
    pub fn round_down(&self, prec: u32) -> Dyadic {
        let bits = self.bits();
        let prec = prec.max(2) as u64;
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        let (q, _) = self
            .mantissa
            .div_mod_floor(&(BigInt::one() << shift as usize));
        Dyadic::new(q, self.exponent + shift as i64)
    }

    /// Integer floor of `x * 2^k`.
    pub fn floor_scaled(&self, k: i64) -> BigInt {
        let e = self.exponent + k;
        if e >= 0 {
            &self.mantissa << e as usize
        } else {
            self.mantissa.div_floor(&(BigInt::one() << (-e) as usize))
        }
    }

    /// Lower and upper bounds on `sqrt(x)` for `x >= 0` with roughly `prec` bits.
    pub fn sqrt_bounds(&self, prec: u32) -> (Dyadic, Dyadic) {
        assert!(!self.is_negative(), "sqrt of a negative dyadic");
        if self.is_zero() {
            return (Dyadic::zero(), Dyadic::zero());
        }
        let want = 2 * prec as i64 + 2;
        let mut k = (want - self.bits() as i64).max(0);
        if (self.exponent - k).rem_euclid(2) != 0 {
            k += 1;
        }
        let n = &self.mantissa << k as usize;
        let e = (self.exponent - k) / 2;
        let s = n.sqrt();
        let exact = &s * &s == n;
        let lo = Dyadic::new(s.clone(), e);
        let hi = if exact {
            lo.clone()
        } else {
            Dyadic::new(s + 1, e)
        };
        (lo, hi)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits();
        let (m, e) = if bits > 60 {
            let s = bits - 60;
            (&self.mantissa >> s as usize, self.exponent + s as i64)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        let mf = m.to_f64().unwrap_or(f64::NAN);
        if e > 2000 {
            return mf.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        let h = (e / 2) as i32;
        mf * 2f64.powi(h) * 2f64.powi(e as i32 - h)
    }

    pub fn min(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Parses `m*2^e`, an integer, a decimal literal that is exactly dyadic,
    /// or `p/q` with `q` a power of two.
    pub fn parse_exact(s: &str) -> Result<Dyadic, ParseError> {
        let r = parse_rational_literal(s)?;
        Dyadic::from_rational(&r)
            .ok_or_else(|| ParseError::new(0, format!("`{s}` is not a dyadic number")))
    }

    /// Like [`Dyadic::parse_exact`] but rounds a non-dyadic value to `bits`
    /// fractional bits, reporting the rounding error bound.
    pub fn parse_approx(s: &str, bits: i64) -> Result<(Dyadic, Dyadic), ParseError> {
        let r = parse_rational_literal(s)?;
        if let Some(d) = Dyadic::from_rational(&r) {
            return Ok((d, Dyadic::zero()));
        }
        let scaled = r * BigRational::from_integer(BigInt::one() << bits as usize);
        Ok((
            Dyadic::new(scaled.floor().to_integer(), -bits),
            Dyadic::pow2(-bits),
        ))
    }
}

/// Parses `m*2^e`, `p/q`, integers and decimal literals with an optional
/// exponent into an exact rational.
pub fn parse_rational_literal(s: &str) -> Result<BigRational, ParseError> {
    let t = s.trim();
    let bad = || ParseError::new(0, format!("invalid number `{t}`"));
    if let Some((m, e)) = t.split_once("*2^") {
        let m = BigInt::from_str(m.trim()).map_err(|_| bad())?;
        let e: i64 = e
            .trim()
            .trim_matches(|c| c == '(' || c == ')')
            .parse()
            .map_err(|_| bad())?;
        return Ok(Dyadic::new(m, e).to_rational());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(ParseError::new(0, "zero denominator"));
        }
        return Ok(BigRational::new(p, q));
    }
    parse_decimal(t).ok_or_else(bad)
}

/// Parses `[-]digits[.digits][e[-]digits]` exactly.
pub fn parse_decimal(t: &str) -> Option<BigRational> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (ip, fp) = match mant.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mant, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.bytes().chain(fp.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let mut n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if neg {
        n = -n;
    }
    let e10 = exp - fp.len() as i64;
    if e10.unsigned_abs() > 100_000 {
        return None;
    }
    let p = num_traits::pow(BigInt::from(10), e10.unsigned_abs() as usize);
    Some(if e10 >= 0 {
        BigRational::from_integer(n * p)
    } else {
        BigRational::new(n, p)
    })
}

fn align(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
    let e = a.exponent.min(b.exponent);
    let ma = &a.mantissa << (a.exponent - e) as usize;
    let mb = &b.mantissa << (b.exponent - e) as usize;
    (ma, mb, e)
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // Same sign: compare magnitudes first.
        let (ka, kb) = (self.mag_exp().unwrap(), other.mag_exp().unwrap());
        if ka != kb {
            let o = ka.cmp(&kb);
            return if sa > 0 { o } else { o.reverse() };
        }
        let (ma, mb, _) = align(self, other);
        ma.cmp(&mb)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (ma, mb, e) = align(self, rhs);
        Dyadic::new(ma + mb, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: &self.mantissa * &rhs.mantissa,
            exponent: self.exponent + rhs.exponent,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &Dyadic) -> Dyadic {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exponent)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Dyadic {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dyadic::parse_exact(s)
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_i64(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn canonical_form() {
        assert_eq!(d(12, 0), d(3, 2));
        assert_eq!(d(0, 7), Dyadic::zero());
        assert_eq!(d(12, 0).mantissa(), &BigInt::from(3));
    }

    #[test]
    fn arithmetic() {
        assert_eq!(&d(1, -1) + &d(1, -2), d(3, -2));
        assert_eq!(&d(3, -2) * &d(-5, 3), d(-15, 1));
        assert_eq!(&d(1, 0) - &d(1, -3), d(7, -3));
    }

    #[test]
    fn ordering() {
        assert!(d(1, -1) < d(3, -2));
        assert!(d(-1, 10) < d(1, -10));
        assert!(d(-3, 0) < d(-1, 1));
        assert_eq!(d(5, -3).cmp(&d(10, -4)), Ordering::Equal);
    }

    #[test]
    fn rounding_bounds() {
        let x = d(0b1011011, -3);
        let up = x.round_up(3);
        let dn = x.round_down(3);
        assert!(dn <= x && x <= up);
        assert!(up.bits() <= 3 && dn.bits() <= 3);
        let (r, err) = x.round(3);
        assert!((&x - &r).abs() <= err);
    }

    #[test]
    fn sqrt_bounds_bracket() {
        let two = d(2, 0);
        let (lo, hi) = two.sqrt_bounds(40);
        assert!(&lo * &lo <= two && two <= &hi * &hi);
        assert!((&hi - &lo) <= Dyadic::pow2(-38));
        let (lo, hi) = d(9, -4).sqrt_bounds(10);
        assert_eq!(lo, d(3, -2));
        assert_eq!(hi, d(3, -2));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Dyadic::parse_exact("3*2^-4").unwrap(), d(3, -4));
        assert_eq!(Dyadic::parse_exact("0.375").unwrap(), d(3, -3));
        assert_eq!(Dyadic::parse_exact("-5/8").unwrap(), d(-5, -3));
        assert_eq!(Dyadic::parse_exact("1e3").unwrap(), d(1000, 0));
        assert!(Dyadic::parse_exact("0.1").is_err());
        let (v, err) = Dyadic::parse_approx("0.1", 20).unwrap();
        let diff = (v.to_rational() - parse_decimal("0.1").unwrap()).abs();
        assert!(diff <= err.to_rational());
    }

    #[test]
    fn f64_roundtrip() {
        for x in [0.0, 1.5, -3.25e-7, 1e300, 5e-324] {
            assert_eq!(Dyadic::from_f64(x).unwrap().to_f64(), x);
        }
    }
}
