use std::fmt;

use super::interval::ComplexInterval;
use super::number::Dyadic;

/// A complex number with dyadic real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicComplex {
    pub re: Dyadic,
    pub im: Dyadic,
}

impl DyadicComplex {
    pub fn new(re: Dyadic, im: Dyadic) -> Self {
        DyadicComplex { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Dyadic::zero(), Dyadic::zero())
    }

    pub fn real(re: Dyadic) -> Self {
        Self::new(re, Dyadic::zero())
    }

    /// Upper bound on the modulus.
    pub fn abs_upper(&self) -> Dyadic {
        ComplexInterval::point(self).abs_upper()
    }

    /// Exact squared distance.
    pub fn dist2(&self, o: &DyadicComplex) -> Dyadic {
        let dx = &self.re - &o.re;
        let dy = &self.im - &o.im;
        &(&dx * &dx) + &(&dy * &dy)
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Debug for DyadicComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.re, self.im)
    }
}

/// An axis-aligned square `center ± width/2`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Box {
    pub center: DyadicComplex,
    pub width: Dyadic,
}

impl Box {
    pub fn new(center: DyadicComplex, width: Dyadic) -> Self {
        assert!(width.is_positive(), "box width must be positive");
        Box { center, width }
    }

    /// The same square scaled about its center.
    pub fn scale(&self, factor: &Dyadic) -> Box {
        Box::new(self.center.clone(), &self.width * factor)
    }

    /// The containing disc: same center, radius `3/4` of the width.
    pub fn containing_disc(&self) -> Disc {
        Disc::new(
            self.center.clone(),
            &self.width * &Dyadic::new(3.into(), -2),
        )
    }

    pub fn quadrisect(&self) -> [Box; 4] {
        let q = self.width.shl(-2);
        let w = self.width.shl(-1);
        let c = &self.center;
        let mk = |sx: bool, sy: bool| {
            let re = if sx { &c.re + &q } else { &c.re - &q };
            let im = if sy { &c.im + &q } else { &c.im - &q };
            Box::new(DyadicComplex::new(re, im), w.clone())
        };
        [
            mk(false, false),
            mk(true, false),
            mk(false, true),
            mk(true, true),
        ]
    }

    pub fn as_interval(&self) -> ComplexInterval {
        ComplexInterval::around(&self.center, &self.width.shl(-1))
    }

    /// Closed containment.
    pub fn contains(&self, z: &DyadicComplex) -> bool {
        self.as_interval().contains(z)
    }

    pub fn contains_box(&self, o: &Box) -> bool {
        self.as_interval().contains_interval(&o.as_interval())
    }

    /// Whether the closed squares share a point.
    pub fn meets(&self, o: &Box) -> bool {
        let h = (&self.width + &o.width).shl(-1);
        (&self.center.re - &o.center.re).abs() <= h && (&self.center.im - &o.center.im).abs() <= h
    }
}

/// A closed disc in the complex plane.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Disc {
    pub center: DyadicComplex,
    pub radius: Dyadic,
}

impl Disc {
    pub fn new(center: DyadicComplex, radius: Dyadic) -> Self {
        assert!(radius.is_positive(), "disc radius must be positive");
        Disc { center, radius }
    }

    pub fn scale(&self, factor: &Dyadic) -> Disc {
        Disc::new(self.center.clone(), &self.radius * factor)
    }

    /// The bounding square as a complex interval.
    pub fn enclosure(&self) -> ComplexInterval {
        ComplexInterval::around(&self.center, &self.radius)
    }

    /// Square of side `2r` around the disc.
    pub fn bounding_box(&self) -> Box {
        Box::new(self.center.clone(), self.radius.shl(1))
    }

    pub fn contains(&self, z: &DyadicComplex) -> bool {
        self.center.dist2(z) <= &self.radius * &self.radius
    }

    pub fn contains_disc(&self, o: &Disc) -> bool {
        if o.radius > self.radius {
            return false;
        }
        let gap = &self.radius - &o.radius;
        self.center.dist2(&o.center) <= &gap * &gap
    }

    pub fn meets_disc(&self, o: &Disc) -> bool {
        let s = &self.radius + &o.radius;
        self.center.dist2(&o.center) <= &s * &s
    }

    /// Whether the disc meets the closed square.
    pub fn meets_box(&self, b: &Box) -> bool {
        let h = b.width.shl(-1);
        let clamp = |x: &Dyadic, c: &Dyadic| {
            let lo = c - &h;
            let hi = c + &h;
            if x < &lo {
                lo
            } else if x > &hi {
                hi
            } else {
                x.clone()
            }
        };
        let p = DyadicComplex::new(
            clamp(&self.center.re, &b.center.re),
            clamp(&self.center.im, &b.center.im),
        );
        self.contains(&p)
    }

    /// Whether the disc lies inside the closed square.
    pub fn inside_box(&self, b: &Box) -> bool {
        b.as_interval().contains_interval(&self.enclosure())
    }
}

/// A product of boxes, one per variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyBox(pub Vec<Box>);

impl PolyBox {
    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn scale(&self, factor: &Dyadic) -> PolyBox {
        PolyBox(self.0.iter().map(|b| b.scale(factor)).collect())
    }

    pub fn containing_disc(&self) -> PolyDisc {
        PolyDisc(self.0.iter().map(Box::containing_disc).collect())
    }

    pub fn contains(&self, z: &[DyadicComplex]) -> bool {
        self.0.len() == z.len() && self.0.iter().zip(z).all(|(b, p)| b.contains(p))
    }

    /// The largest side length.
    pub fn width(&self) -> Dyadic {
        self.0
            .iter()
            .map(|b| b.width.clone())
            .max()
            .unwrap_or_else(Dyadic::zero)
    }
}

/// A product of discs, one per variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyDisc(pub Vec<Disc>);

impl PolyDisc {
    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn scale(&self, factor: &Dyadic) -> PolyDisc {
        PolyDisc(self.0.iter().map(|d| d.scale(factor)).collect())
    }

    pub fn contains(&self, z: &[DyadicComplex]) -> bool {
        self.0.len() == z.len() && self.0.iter().zip(z).all(|(d, p)| d.contains(p))
    }

    pub fn meets(&self, o: &PolyDisc) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a.meets_disc(b))
    }

    /// The largest radius.
    pub fn radius(&self) -> Dyadic {
        self.0
            .iter()
            .map(|d| d.radius.clone())
            .max()
            .unwrap_or_else(Dyadic::zero)
    }

    pub fn enclosure(&self) -> Vec<ComplexInterval> {
        self.0.iter().map(Disc::enclosure).collect()
    }
}
