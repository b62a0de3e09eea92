use std::fmt;

use num_bigint::BigInt;

use super::geometry::DyadicComplex;
use super::number::Dyadic;

/// Bits kept in radii; radii are always rounded up.
const RAD_BITS: u32 = 30;

/// Relative precision that performs no rounding at all.
pub const EXACT: u32 = u32::MAX;

/// A real ball `[mid - rad, mid + rad]` with dyadic endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    mid: Dyadic,
    rad: Dyadic,
}

impl DyadicInterval {
    pub fn new(mid: Dyadic, rad: Dyadic) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        DyadicInterval { mid, rad }
    }

    pub fn point(x: Dyadic) -> Self {
        DyadicInterval {
            mid: x,
            rad: Dyadic::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero())
    }

    pub fn from_bounds(lo: &Dyadic, hi: &Dyadic) -> Self {
        assert!(lo <= hi, "empty interval");
        DyadicInterval {
            mid: (lo + hi).shl(-1),
            rad: (hi - lo).shl(-1),
        }
    }

    /// The grid interval `[(n - 1/2) 2^m, (n + 1/2) 2^m]`.
    pub fn from_grid(n: BigInt, m: i64) -> Self {
        DyadicInterval {
            mid: Dyadic::new(n, m),
            rad: Dyadic::pow2(m - 1),
        }
    }

    /// The grid representation `(n, m)` if this interval is a grid cell.
    pub fn to_grid(&self) -> Option<(BigInt, i64)> {
        if self.rad.is_zero() || !self.rad.mantissa().is_one_abs() {
            return None;
        }
        let m = self.rad.exponent() + 1;
        let e = self.mid.exponent();
        if !self.mid.is_zero() && e < m {
            return None;
        }
        Some((self.mid.floor_scaled(-m), m))
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn lo(&self) -> Dyadic {
        &self.mid - &self.rad
    }

    pub fn hi(&self) -> Dyadic {
        &self.mid + &self.rad
    }

    pub fn width(&self) -> Dyadic {
        self.rad.shl(1)
    }

    pub fn is_point(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.mid.is_zero() && self.rad.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        (x - &self.mid).abs() <= self.rad
    }

    pub fn contains_interval(&self, other: &DyadicInterval) -> bool {
        self.lo() <= other.lo() && other.hi() <= self.hi()
    }

    /// Upper bound on `max |x|`.
    pub fn abs_upper(&self) -> Dyadic {
        (&self.mid.abs() + &self.rad).round_up(64)
    }

    /// Lower bound on `min |x|`.
    pub fn abs_lower(&self) -> Dyadic {
        let v = &self.mid.abs() - &self.rad;
        if v.is_negative() {
            Dyadic::zero()
        } else {
            v.round_down(64)
        }
    }

    fn normalized(mid: Dyadic, rad: Dyadic, prec: u32) -> Self {
        let mut bits = prec;
        if !rad.is_zero() && !mid.is_zero() {
            let gap = mid.mag_exp().unwrap() - rad.mag_exp().unwrap() + RAD_BITS as i64 + 4;
            bits = bits.min(gap.clamp(2, u32::MAX as i64) as u32);
        }
        let (m, err) = mid.round(bits);
        let r = if err.is_zero() {
            rad.round_up(RAD_BITS)
        } else {
            (&rad + &err).round_up(RAD_BITS)
        };
        DyadicInterval { mid: m, rad: r }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        Self::normalized(&self.mid + &o.mid, &self.rad + &o.rad, prec)
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        Self::normalized(&self.mid - &o.mid, &self.rad + &o.rad, prec)
    }

    pub fn neg(&self) -> Self {
        DyadicInterval {
            mid: -&self.mid,
            rad: self.rad.clone(),
        }
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let mid = &self.mid * &o.mid;
        let rad = if self.rad.is_zero() && o.rad.is_zero() {
            Dyadic::zero()
        } else {
            let am = self.mid.abs().round_up(RAD_BITS);
            let bm = o.mid.abs().round_up(RAD_BITS);
            &(&(&am * &o.rad) + &(&bm * &self.rad)) + &(&self.rad * &o.rad)
        };
        Self::normalized(mid, rad, prec)
    }

    pub fn scale(&self, c: &Dyadic, prec: u32) -> Self {
        let rad = if self.rad.is_zero() {
            Dyadic::zero()
        } else {
            &c.abs().round_up(RAD_BITS) * &self.rad
        };
        Self::normalized(&self.mid * c, rad, prec)
    }

    /// Hull of two intervals.
    pub fn union(&self, o: &Self) -> Self {
        Self::from_bounds(
            &Dyadic::min(&self.lo(), &o.lo()),
            &Dyadic::max(&self.hi(), &o.hi()),
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }
}

trait OneAbs {
    fn is_one_abs(&self) -> bool;
}

impl OneAbs for BigInt {
    fn is_one_abs(&self) -> bool {
        self.magnitude().bits() == 1
    }
}

impl fmt::Debug for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rad.is_zero() {
            write!(f, "{:?}", self.mid)
        } else {
            write!(f, "{:?}±{:?}", self.mid, self.rad)
        }
    }
}

/// A rectangle in the complex plane: a product of two real balls.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ComplexInterval {
    pub re: DyadicInterval,
    pub im: DyadicInterval,
}

impl ComplexInterval {
    pub fn new(re: DyadicInterval, im: DyadicInterval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn zero() -> Self {
        Self::new(DyadicInterval::zero(), DyadicInterval::zero())
    }

    pub fn point(z: &DyadicComplex) -> Self {
        Self::new(
            DyadicInterval::point(z.re.clone()),
            DyadicInterval::point(z.im.clone()),
        )
    }

    pub fn real(x: DyadicInterval) -> Self {
        Self::new(x, DyadicInterval::zero())
    }

    /// The square `c ± r` in both coordinates.
    pub fn around(c: &DyadicComplex, r: &Dyadic) -> Self {
        Self::new(
            DyadicInterval::new(c.re.clone(), r.clone()),
            DyadicInterval::new(c.im.clone(), r.clone()),
        )
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_exact_zero() && self.im.is_exact_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_exact_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn contains(&self, z: &DyadicComplex) -> bool {
        self.re.contains(&z.re) && self.im.contains(&z.im)
    }

    pub fn contains_interval(&self, o: &ComplexInterval) -> bool {
        self.re.contains_interval(&o.re) && self.im.contains_interval(&o.im)
    }

    pub fn center(&self) -> DyadicComplex {
        DyadicComplex::new(self.re.mid().clone(), self.im.mid().clone())
    }

    /// The larger of the two side lengths.
    pub fn width(&self) -> Dyadic {
        Dyadic::max(&self.re.width(), &self.im.width())
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        Self::new(self.re.add(&o.re, prec), self.im.add(&o.im, prec))
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        Self::new(self.re.sub(&o.re, prec), self.im.sub(&o.im, prec))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.re.neg(), self.im.neg())
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        if self.is_real() && o.is_real() {
            return Self::real(self.re.mul(&o.re, prec));
        }
        if o.is_real() {
            return Self::new(self.re.mul(&o.re, prec), self.im.mul(&o.re, prec));
        }
        if self.is_real() {
            return Self::new(o.re.mul(&self.re, prec), o.im.mul(&self.re, prec));
        }
        let re = self
            .re
            .mul(&o.re, EXACT)
            .sub(&self.im.mul(&o.im, EXACT), prec);
        let im = self
            .re
            .mul(&o.im, EXACT)
            .add(&self.im.mul(&o.re, EXACT), prec);
        Self::new(re, im)
    }

    pub fn mul_real(&self, x: &DyadicInterval, prec: u32) -> Self {
        Self::new(self.re.mul(x, prec), self.im.mul(x, prec))
    }

    pub fn scale(&self, c: &Dyadic, prec: u32) -> Self {
        Self::new(self.re.scale(c, prec), self.im.scale(c, prec))
    }

    /// Upper bound on `max |z|` over the rectangle.
    pub fn abs_upper(&self) -> Dyadic {
        let a = self.re.abs_upper();
        let b = self.im.abs_upper();
        if b.is_zero() {
            return a;
        }
        if a.is_zero() {
            return b;
        }
        let s = (&(&a * &a) + &(&b * &b)).round_up(64);
        s.sqrt_bounds(40).1.round_up(48)
    }

    /// Lower bound on `min |z|` over the rectangle.
    pub fn abs_lower(&self) -> Dyadic {
        let a = self.re.abs_lower();
        let b = self.im.abs_lower();
        if b.is_zero() {
            return a;
        }
        if a.is_zero() {
            return b;
        }
        let s = (&(&a * &a) + &(&b * &b)).round_down(64);
        s.sqrt_bounds(40).0.round_down(48)
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Debug for ComplexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.re, self.im)
    }
}

impl Default for ComplexInterval {
    fn default() -> Self {
        Self::zero()
    }
}
