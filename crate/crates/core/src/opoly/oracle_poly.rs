use std::collections::BTreeMap;

use crate::dyadic::{ComplexInterval, Dyadic, OracleNumber, PolyDisc};

use super::IntervalPolynomial;

/// A monomial `coeff * z^exps`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub exps: Vec<u32>,
    pub coeff: OracleNumber,
}

/// A sparse polynomial in `z_1..z_n` with oracle coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct OraclePolynomial {
    arity: usize,
    terms: Vec<Term>,
    degrees: Vec<u32>,
}

impl OraclePolynomial {
    /// Builds a polynomial, merging repeated exponents and dropping exact
    /// zero coefficients. Terms are stored with the highest powers of the
    /// last variable first.
    pub fn new(arity: usize, terms: Vec<Term>) -> Result<Self, String> {
        if arity == 0 {
            return Err("arity must be positive".into());
        }
        let mut merged: BTreeMap<Vec<u32>, OracleNumber> = BTreeMap::new();
        for t in terms {
            if t.exps.len() != arity {
                return Err(format!(
                    "exponent vector of length {} in arity {arity}",
                    t.exps.len()
                ));
            }
            let key: Vec<u32> = t.exps.iter().rev().copied().collect();
            match merged.get_mut(&key) {
                Some(c) => *c = c.add(&t.coeff),
                None => {
                    merged.insert(key, t.coeff);
                }
            }
        }
        let terms: Vec<Term> = merged
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_exact_zero())
            .map(|(k, coeff)| Term {
                exps: k.into_iter().rev().collect(),
                coeff,
            })
            .collect();
        if terms.is_empty() {
            return Err("polynomial has empty support".into());
        }
        let mut degrees = vec![0u32; arity];
        for t in &terms {
            for (d, &e) in degrees.iter_mut().zip(&t.exps) {
                *d = (*d).max(e);
            }
        }
        Ok(OraclePolynomial {
            arity,
            terms,
            degrees,
        })
    }

    /// A univariate polynomial from coefficients by increasing degree.
    pub fn univariate(coeffs: Vec<OracleNumber>) -> Result<Self, String> {
        let terms = coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| Term {
                exps: vec![i as u32],
                coeff: c,
            })
            .collect();
        Self::new(1, terms)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Degree in `z_{i+1}` (zero-based `i`).
    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    /// Degree in the last variable.
    pub fn main_degree(&self) -> usize {
        self.degrees[self.arity - 1] as usize
    }

    /// The largest partial degree.
    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Upper bound on the max-norm of the coefficients.
    pub fn norm_upper(&self) -> Dyadic {
        self.terms
            .iter()
            .map(|t| t.coeff.abs_upper())
            .max()
            .unwrap()
    }

    /// Coefficient intervals of width at most `2^-l` for a univariate
    /// polynomial.
    pub fn approximate(&self, l: i64) -> IntervalPolynomial {
        assert_eq!(self.arity, 1, "approximate needs a univariate polynomial");
        let mut c = vec![ComplexInterval::zero(); self.main_degree() + 1];
        for t in &self.terms {
            c[t.exps[0] as usize] = t.coeff.query(l);
        }
        IntervalPolynomial::new(c)
    }

    /// Evaluates the first `arity - 1` variables over the rectangles `xs`,
    /// giving a univariate interval polynomial in the last variable.
    /// Coefficients are queried at `2^-l` and arithmetic runs at relative
    /// precision `prec`.
    pub fn specialize(&self, xs: &[ComplexInterval], l: i64, prec: u32) -> IntervalPolynomial {
        assert_eq!(
            xs.len() + 1,
            self.arity,
            "wrong number of specialization points"
        );
        let k = self.arity - 1;
        let mut groups: Vec<Vec<(&[u32], ComplexInterval)>> =
            vec![Vec::new(); self.main_degree() + 1];
        for t in &self.terms {
            groups[t.exps[k] as usize].push((&t.exps[..k], t.coeff.query(l)));
        }
        let coeffs = groups.into_iter().map(|g| horner(g, xs, prec)).collect();
        IntervalPolynomial::new(coeffs)
    }

    /// Specializes over the bounding rectangles of a polydisc, choosing the
    /// working precision so that rounding stays below `2^-l`.
    pub fn specialize_disc(&self, d: &PolyDisc, l: i64) -> IntervalPolynomial {
        let xs = d.enclosure();
        let prec = self.eval_precision(&xs, l);
        self.specialize(&xs, l, prec)
    }

    /// Relative precision for evaluating at `xs` with absolute error
    /// about `2^-l`.
    pub fn eval_precision(&self, xs: &[ComplexInterval], l: i64) -> u32 {
        let mut mag = self.norm_upper().to_f64().max(1.0).log2();
        for (x, &d) in xs.iter().zip(&self.degrees) {
            mag += d as f64 * (1.0 + x.abs_upper().to_f64()).log2();
        }
        let terms = (self.terms.len() as f64).log2();
        (l as f64 + mag + terms + 24.0).max(53.0).ceil() as u32
    }
}

fn horner(
    terms: Vec<(&[u32], ComplexInterval)>,
    xs: &[ComplexInterval],
    prec: u32,
) -> ComplexInterval {
    if terms.is_empty() {
        return ComplexInterval::zero();
    }
    if xs.is_empty() {
        return terms
            .into_iter()
            .map(|(_, c)| c)
            .reduce(|a, b| a.add(&b, prec))
            .unwrap();
    }
    let v = xs.len() - 1;
    let top = terms.iter().map(|(e, _)| e[v]).max().unwrap() as usize;
    let mut by_power: Vec<Vec<(&[u32], ComplexInterval)>> = vec![Vec::new(); top + 1];
    for (e, c) in terms {
        by_power[e[v] as usize].push((&e[..v], c));
    }
    let x = &xs[v];
    let rest = &xs[..v];
    let mut acc: Option<ComplexInterval> = None;
    for group in by_power.into_iter().rev() {
        let g = if group.is_empty() {
            None
        } else {
            Some(horner(group, rest, prec))
        };
        acc = match (acc, g) {
            (None, g) => g,
            (Some(a), None) => Some(a.mul(x, prec)),
            (Some(a), Some(g)) => Some(a.mul(x, prec).add(&g, prec)),
        };
    }
    acc.unwrap_or_else(ComplexInterval::zero)
}

/// A triangular system `f_1(z_1), f_2(z_1, z_2), ..., f_n(z_1..z_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularSystem {
    polys: Vec<OraclePolynomial>,
}

impl TriangularSystem {
    pub fn new(polys: Vec<OraclePolynomial>) -> Result<Self, String> {
        if polys.is_empty() {
            return Err("empty system".into());
        }
        for (i, p) in polys.iter().enumerate() {
            if p.arity() != i + 1 {
                return Err(format!(
                    "f{} has arity {} instead of {}",
                    i + 1,
                    p.arity(),
                    i + 1
                ));
            }
            if p.main_degree() == 0 {
                return Err(format!("f{} has degree 0 in z{}", i + 1, i + 1));
            }
        }
        Ok(TriangularSystem { polys })
    }

    pub fn n(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[OraclePolynomial] {
        &self.polys
    }

    /// `f_{i+1}` (zero-based).
    pub fn poly(&self, i: usize) -> &OraclePolynomial {
        &self.polys[i]
    }

    /// The Bezout number `prod deg_{z_i} f_i`.
    pub fn bezout(&self) -> u64 {
        self.polys.iter().map(|p| p.main_degree() as u64).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{DyadicComplex, DyadicInterval, RealOracle};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn term(e: &[u32], c: i64) -> Term {
        Term {
            exps: e.to_vec(),
            coeff: OracleNumber::integer(c),
        }
    }

    fn pt(x: i64) -> ComplexInterval {
        ComplexInterval::real(DyadicInterval::point(Dyadic::from_i64(x)))
    }

    #[test]
    fn running_example_specialization() {
        // xy + (x^3 - 1) y^2 z + (x^2 - y^2) z^3 at (x, y) = (-1, 3)
        let f = OraclePolynomial::new(
            3,
            vec![
                term(&[1, 1, 0], 1),
                term(&[3, 2, 1], 1),
                term(&[0, 2, 1], -1),
                term(&[2, 0, 3], 1),
                term(&[0, 2, 3], -1),
            ],
        )
        .unwrap();
        assert_eq!(f.degrees(), &[3, 2, 3]);
        let g = f.specialize(&[pt(-1), pt(3)], 10, 64);
        let want = IntervalPolynomial::from_real(&[-3, -18, 0, -8].map(Dyadic::from_i64));
        assert_eq!(g, want);
        assert_eq!(g.norm_upper(), Dyadic::from_i64(18));
    }

    #[test]
    fn approximate_contains_coefficients() {
        let third = RealOracle::rational(BigRational::new((-1).into(), 3.into()));
        let f = OraclePolynomial::univariate(vec![
            OracleNumber::zero(),
            OracleNumber::real(third),
            OracleNumber::integer(1),
        ])
        .unwrap();
        let a = f.approximate(4);
        assert_eq!(a.degree(), 2);
        assert!(a.coeff(0).is_exact_zero());
        assert!(a.coeff(1).width() <= Dyadic::pow2(-4));
        let r = a.coeff(1).re.clone();
        let m3 = BigRational::new((-1).into(), 3.into());
        assert!(r.lo().to_rational() <= m3 && m3 <= r.hi().to_rational());
    }

    #[test]
    fn sqrt_constant_term() {
        let f = OraclePolynomial::univariate(vec![
            OracleNumber::real(RealOracle::sqrt(BigInt::from(2)).neg()),
            OracleNumber::integer(1),
        ])
        .unwrap();
        let c = f.approximate(8).coeff(0).re.clone();
        assert!(c.width() <= Dyadic::pow2(-8));
        let (lo, hi) = (c.lo().to_f64(), c.hi().to_f64());
        assert!(lo <= -std::f64::consts::SQRT_2 && -std::f64::consts::SQRT_2 <= hi);
    }

    #[test]
    fn disc_specialization_contains_points() {
        // z1 * z2 over the disc of radius 1/8 about 0
        let f = OraclePolynomial::new(2, vec![term(&[1, 1], 1)]).unwrap();
        let d = PolyDisc(vec![crate::dyadic::Disc::new(
            DyadicComplex::zero(),
            Dyadic::pow2(-3),
        )]);
        let g = f.specialize_disc(&d, 20);
        let c = g.coeff(1);
        assert!(c.contains(&DyadicComplex::new(Dyadic::pow2(-3), Dyadic::zero())));
        assert!(c.contains(&DyadicComplex::new(Dyadic::zero(), -Dyadic::pow2(-3))));
    }

    #[test]
    fn triangularity_checks() {
        let f1 = OraclePolynomial::new(1, vec![term(&[2], 1), term(&[0], -1)]).unwrap();
        let f2 = OraclePolynomial::new(2, vec![term(&[1, 0], 1)]).unwrap();
        assert!(TriangularSystem::new(vec![f1.clone(), f2]).is_err());
        let f2 = OraclePolynomial::new(2, vec![term(&[1, 1], 1)]).unwrap();
        assert_eq!(TriangularSystem::new(vec![f1, f2]).unwrap().bezout(), 2);
    }
}
