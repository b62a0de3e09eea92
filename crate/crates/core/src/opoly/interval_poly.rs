use crate::dyadic::{ComplexInterval, Dyadic, DyadicComplex, DyadicInterval, EXACT};

/// A univariate polynomial with rectangle coefficients, index `0..=d`.
/// The leading coefficient is kept even when it may vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalPolynomial {
    coeffs: Vec<ComplexInterval>,
}

impl IntervalPolynomial {
    pub fn new(coeffs: Vec<ComplexInterval>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "polynomial needs at least one coefficient"
        );
        IntervalPolynomial { coeffs }
    }

    /// Exact real dyadic coefficients.
    pub fn from_real(coeffs: &[Dyadic]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|c| ComplexInterval::real(DyadicInterval::point(c.clone())))
                .collect(),
        )
    }

    pub fn from_points(coeffs: &[DyadicComplex]) -> Self {
        Self::new(coeffs.iter().map(ComplexInterval::point).collect())
    }

    /// The exact polynomial `prod (z - r)`.
    pub fn from_roots(roots: &[DyadicComplex]) -> Self {
        let mut p = vec![ComplexInterval::real(DyadicInterval::point(Dyadic::one()))];
        for r in roots {
            let nr = ComplexInterval::point(r).neg();
            let mut q = vec![ComplexInterval::zero(); p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                q[i + 1] = q[i + 1].add(c, EXACT);
                q[i] = q[i].add(&c.mul(&nr, EXACT), EXACT);
            }
            p = q;
        }
        Self::new(p)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ComplexInterval] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &ComplexInterval {
        &self.coeffs[i]
    }

    pub fn leading(&self) -> &ComplexInterval {
        self.coeffs.last().unwrap()
    }

    /// Upper bound on the max-norm of the coefficients.
    pub fn norm_upper(&self) -> Dyadic {
        self.coeffs
            .iter()
            .map(ComplexInterval::abs_upper)
            .max()
            .unwrap()
    }

    /// Largest coefficient side length.
    pub fn max_width(&self) -> Dyadic {
        self.coeffs
            .iter()
            .map(ComplexInterval::width)
            .max()
            .unwrap()
    }

    pub fn eval(&self, z: &ComplexInterval, prec: u32) -> ComplexInterval {
        let mut acc = self.leading().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(z, prec).add(c, prec);
        }
        acc
    }

    /// Encloses `F(c + r z)` coefficient-wise.
    pub fn taylor_shift(&self, c: &ComplexInterval, r: &Dyadic, prec: u32) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        if !c.is_exact_zero() {
            for k in 0..n.saturating_sub(1) {
                for j in (k..n - 1).rev() {
                    let t = a[j + 1].mul(c, prec);
                    a[j] = a[j].add(&t, prec);
                }
            }
        }
        let mut scale = Dyadic::one();
        for coeff in a.iter_mut().skip(1) {
            scale = &scale * r;
            *coeff = coeff.scale(&scale, prec);
        }
        Self::new(a)
    }

    /// One Graeffe root-squaring step `(-1)^d (E(x)^2 - x O(x)^2)` where
    /// `F(z) = E(z^2) + z O(z^2)`.
    pub fn graeffe(&self, prec: u32) -> Self {
        let d = self.degree();
        let even: Vec<_> = self.coeffs.iter().step_by(2).cloned().collect();
        let odd: Vec<_> = self.coeffs.iter().skip(1).step_by(2).cloned().collect();
        let e2 = square(&even, prec);
        let o2 = square(&odd, prec);
        let mut g = vec![ComplexInterval::zero(); d + 1];
        for (i, c) in e2.into_iter().enumerate() {
            g[i] = c;
        }
        for (i, c) in o2.into_iter().enumerate() {
            g[i + 1] = g[i + 1].sub(&c, prec);
        }
        if d % 2 == 1 {
            for c in g.iter_mut() {
                *c = c.neg();
            }
        }
        Self::new(g)
    }
}

fn square(p: &[ComplexInterval], prec: u32) -> Vec<ComplexInterval> {
    if p.is_empty() {
        return Vec::new();
    }
    let n = p.len();
    let mut out = vec![ComplexInterval::zero(); 2 * n - 1];
    for i in 0..n {
        out[2 * i] = out[2 * i].add(&p[i].mul(&p[i], prec), prec);
        for j in i + 1..n {
            let t = p[i].mul(&p[j], prec).scale(&Dyadic::from_i64(2), prec);
            out[i + j] = out[i + j].add(&t, prec);
        }
    }
    out
}
