//! Local clustering of the roots of one univariate polynomial by box
//! subdivision.
//!
//! Boxes are discarded when the Pellet test excludes roots from their
//! containing disc. The survivors are grouped into 8-connected components.
//! A component is emitted as a cluster once its enclosing disc is small,
//! passes the natural count test, and is well separated from every other
//! component.

use std::collections::VecDeque;

use thiserror::Error;

use crate::dyadic::{Box, Disc, Dyadic, DyadicComplex};
use crate::opoly::{IntervalPolynomial, OraclePolynomial};
use crate::pellet::{count_natural, t_star, PelletOutcome, TestCounter};

/// A natural cluster: `disc` and `3 disc` hold the same `multiplicity`
/// roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniCluster {
    pub disc: Disc,
    pub multiplicity: usize,
    /// The source precision in force when the cluster was certified.
    pub precision: u32,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("precision exhausted at {precision} bits near {near:?}")]
pub struct PrecisionExhausted {
    pub precision: u32,
    pub near: Disc,
}

/// Something that can hand out interval enclosures of one polynomial at a
/// ladder of precisions.
pub trait PolySource {
    /// Enclosure and arithmetic precision at rung `rung`, or `None` past
    /// the top of the ladder.
    fn at(&self, rung: u32) -> Option<(IntervalPolynomial, u32)>;

    /// Smallest box width worth subdividing to at `rung`, if bounded.
    fn min_width(&self, _rung: u32) -> Option<Dyadic> {
        None
    }
}

/// An oracle polynomial refined on demand, starting at `max(53, start)` bits
/// and doubling.
pub struct OracleSource<'a> {
    pub poly: &'a OraclePolynomial,
    pub start: u32,
    pub max_bits: u32,
}

impl<'a> OracleSource<'a> {
    pub fn new(poly: &'a OraclePolynomial, start: u32) -> Self {
        OracleSource {
            poly,
            start: start.max(53),
            max_bits: 1 << 20,
        }
    }
}

impl PolySource for OracleSource<'_> {
    fn at(&self, rung: u32) -> Option<(IntervalPolynomial, u32)> {
        let bits = (self.start as u64) << rung.min(40);
        if bits > self.max_bits as u64 {
            return None;
        }
        let bits = bits as u32;
        Some((self.poly.approximate(bits as i64), bits + 32))
    }
}

/// A fixed interval polynomial, tried at `prec` and once more at `2 prec`.
pub struct FixedSource {
    pub poly: IntervalPolynomial,
    pub prec: u32,
    pub floor: Dyadic,
}

impl PolySource for FixedSource {
    fn at(&self, rung: u32) -> Option<(IntervalPolynomial, u32)> {
        match rung {
            0 => Some((self.poly.clone(), self.prec)),
            1 => Some((self.poly.clone(), self.prec.saturating_mul(2))),
            _ => None,
        }
    }

    fn min_width(&self, _rung: u32) -> Option<Dyadic> {
        Some(self.floor.clone())
    }
}

struct Tester<'a, S: PolySource> {
    src: &'a S,
    rung: u32,
    current: (IntervalPolynomial, u32),
    counter: &'a TestCounter,
}

impl<'a, S: PolySource> Tester<'a, S> {
    fn new(src: &'a S, counter: &'a TestCounter) -> Option<Self> {
        let current = src.at(0)?;
        Some(Tester {
            src,
            rung: 0,
            current,
            counter,
        })
    }

    fn escalate(&mut self, near: &Disc) -> Result<(), PrecisionExhausted> {
        match self.src.at(self.rung + 1) {
            Some(next) => {
                self.rung += 1;
                self.current = next;
                Ok(())
            }
            None => Err(PrecisionExhausted {
                precision: self.current.1,
                near: near.clone(),
            }),
        }
    }

    fn run(
        &mut self,
        disc: &Disc,
        test: fn(&IntervalPolynomial, &Disc, u32) -> PelletOutcome,
        calls: u64,
    ) -> Result<PelletOutcome, PrecisionExhausted> {
        loop {
            for _ in 0..calls {
                self.counter.bump();
            }
            let out = test(&self.current.0, disc, self.current.1);
            if out != PelletOutcome::InsufficientPrecision {
                return Ok(out);
            }
            self.escalate(disc)?;
        }
    }

    fn exclude(&mut self, b: &Box) -> Result<bool, PrecisionExhausted> {
        Ok(self.run(&b.containing_disc(), t_star, 1)? == PelletOutcome::Count(0))
    }

    fn natural(&mut self, d: &Disc) -> Result<PelletOutcome, PrecisionExhausted> {
        self.run(d, count_natural, 2)
    }
}

/// Groups equal-width boxes into 8-connected components, keeping the input
/// order within and across components.
fn components(boxes: Vec<Box>) -> Vec<Vec<Box>> {
    let n = boxes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if boxes[i].meets(&boxes[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Box>)> = Vec::new();
    for (i, b) in boxes.into_iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(k, _)| *k == r) {
            Some((_, g)) => g.push(b),
            None => groups.push((r, vec![b])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Disc around the bounding box of a component: bounding-box center and
/// radius `3/4` of its larger side.
pub fn component_disc(boxes: &[Box]) -> Disc {
    let h = boxes[0].width.shl(-1);
    let mut lo_re = &boxes[0].center.re - &h;
    let mut hi_re = &boxes[0].center.re + &h;
    let mut lo_im = &boxes[0].center.im - &h;
    let mut hi_im = &boxes[0].center.im + &h;
    for b in &boxes[1..] {
        let h = b.width.shl(-1);
        lo_re = Dyadic::min(&lo_re, &(&b.center.re - &h));
        hi_re = Dyadic::max(&hi_re, &(&b.center.re + &h));
        lo_im = Dyadic::min(&lo_im, &(&b.center.im - &h));
        hi_im = Dyadic::max(&hi_im, &(&b.center.im + &h));
    }
    let center = DyadicComplex::new((&lo_re + &hi_re).shl(-1), (&lo_im + &hi_im).shl(-1));
    let w = Dyadic::max(&(&hi_re - &lo_re), &(&hi_im - &lo_im));
    Box::new(center, w).containing_disc()
}

/// Finds natural clusters of radius at most `eps` covering every root in
/// `roi`; each reported root lies in `2 roi`.
pub fn cluster_univariate<S: PolySource>(
    src: &S,
    roi: &Box,
    eps: &Dyadic,
    counter: &TestCounter,
) -> Result<Vec<UniCluster>, PrecisionExhausted> {
    assert!(eps.is_positive(), "eps must be positive");
    let mut tester = match Tester::new(src, counter) {
        Some(t) => t,
        None => {
            return Err(PrecisionExhausted {
                precision: 0,
                near: roi.containing_disc(),
            })
        }
    };
    let mut work: VecDeque<Vec<Box>> = VecDeque::from([vec![roi.clone()]]);
    let mut retired: Vec<Vec<Box>> = Vec::new();
    let mut out = Vec::new();
    let three = Dyadic::from_i64(3);

    while let Some(item) = work.pop_front() {
        let mut alive = Vec::with_capacity(item.len());
        for b in item {
            if !tester.exclude(&b)? {
                alive.push(b);
            }
        }
        let groups = components(alive);
        let mut pending: Vec<Vec<Box>> = Vec::new();
        for (gi, comp) in groups.iter().enumerate() {
            let disc = component_disc(comp);
            let outcome = tester.natural(&disc)?;
            if outcome == PelletOutcome::Count(0) {
                continue;
            }
            if let PelletOutcome::Count(m) = outcome {
                if disc.radius <= *eps {
                    let wide = disc.scale(&three);
                    let clear = |boxes: &Vec<Box>| !boxes.iter().any(|b| wide.meets_box(b));
                    let separated = work.iter().all(clear)
                        && retired.iter().all(clear)
                        && pending.iter().all(clear)
                        && groups
                            .iter()
                            .enumerate()
                            .all(|(gj, g)| gj == gi || clear(g));
                    if separated {
                        out.push(UniCluster {
                            disc,
                            multiplicity: m,
                            precision: tester.current.1,
                        });
                        retired.push(comp.clone());
                        continue;
                    }
                }
            }
            if let Some(floor) = src.min_width(tester.rung) {
                if comp[0].width < floor {
                    return Err(PrecisionExhausted {
                        precision: tester.current.1,
                        near: disc,
                    });
                }
            }
            pending.push(comp.iter().flat_map(|b| b.quadrisect()).collect());
        }
        work.extend(pending);
    }
    Ok(out)
}

/// Re-clusters the roots of `c` with radius at most `eps`, searching the
/// square of side `2r` about its center. Every root found there lies in
/// `3 c.disc`, so the multiplicities add up to `c.multiplicity`.
pub fn cluster_refine<S: PolySource>(
    src: &S,
    c: &UniCluster,
    eps: &Dyadic,
    counter: &TestCounter,
) -> Result<Vec<UniCluster>, PrecisionExhausted> {
    cluster_univariate(src, &c.disc.bounding_box(), eps, counter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::OracleNumber;
    use num_bigint::BigInt;

    fn poly(coeffs: &[i64]) -> OraclePolynomial {
        OraclePolynomial::univariate(coeffs.iter().map(|&c| OracleNumber::integer(c)).collect())
            .unwrap()
    }

    fn dpoly(coeffs: Vec<Dyadic>) -> OraclePolynomial {
        OraclePolynomial::univariate(coeffs.into_iter().map(OracleNumber::dyadic).collect())
            .unwrap()
    }

    fn centered(w: i64) -> Box {
        Box::new(DyadicComplex::zero(), Dyadic::from_i64(w))
    }

    fn run(f: &OraclePolynomial, roi: &Box, eps: Dyadic) -> Vec<UniCluster> {
        let c = TestCounter::default();
        cluster_univariate(&OracleSource::new(f, 53), roi, &eps, &c).unwrap()
    }

    #[test]
    fn double_root_at_origin() {
        let out = run(&poly(&[0, 0, 1]), &centered(2), Dyadic::pow2(-2));
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].multiplicity, 2);
        assert!(out[0].disc.contains(&DyadicComplex::zero()));
    }

    #[test]
    fn two_simple_roots() {
        let f = dpoly(vec![-Dyadic::pow2(-2), Dyadic::zero(), Dyadic::one()]);
        let out = run(&f, &centered(4), Dyadic::pow2(-4));
        assert_eq!(out.len(), 2);
        for c in &out {
            assert_eq!(c.multiplicity, 1);
            assert!(c.disc.radius <= Dyadic::pow2(-4));
            let x = c.disc.center.re.to_f64().abs();
            assert!((x - 0.5).abs() <= 1.0 / 16.0);
        }
        assert!(!out[0].disc.meets_disc(&out[1].disc));
    }

    #[test]
    fn refine_splits_close_pair() {
        // z (z - 2^-40)
        let f = dpoly(vec![Dyadic::zero(), -Dyadic::pow2(-40), Dyadic::one()]);
        let c = TestCounter::default();
        let src = OracleSource::new(&f, 53);
        let coarse = cluster_univariate(&src, &centered(2), &Dyadic::pow2(-10), &c).unwrap();
        assert_eq!(coarse.len(), 1);
        assert_eq!(coarse[0].multiplicity, 2);
        let fine = cluster_refine(&src, &coarse[0], &Dyadic::pow2(-50), &c).unwrap();
        assert_eq!(fine.len(), 2);
        assert!(fine.iter().all(|u| u.multiplicity == 1));
        assert!(c.get() > 0);
    }

    #[test]
    fn refine_point_root() {
        let f = dpoly(vec![-Dyadic::pow2(-1), Dyadic::one()]);
        let c = TestCounter::default();
        let src = OracleSource::new(&f, 53);
        let coarse = cluster_univariate(&src, &centered(4), &Dyadic::one(), &c).unwrap();
        let fine = cluster_refine(&src, &coarse[0], &Dyadic::pow2(-20), &c).unwrap();
        assert_eq!(fine.len(), 1);
        assert!(fine[0].disc.radius <= Dyadic::pow2(-20));
        assert!(fine[0]
            .disc
            .contains(&DyadicComplex::real(Dyadic::pow2(-1))));
    }

    #[test]
    fn fixed_source_exhausts_on_wide_coefficients() {
        let wide = IntervalPolynomial::new(vec![
            crate::dyadic::ComplexInterval::real(
                crate::dyadic::DyadicInterval::new(Dyadic::zero(), Dyadic::one())
            );
            3
        ]);
        let src = FixedSource {
            poly: wide,
            prec: 64,
            floor: Dyadic::pow2(-40),
        };
        let c = TestCounter::default();
        assert!(cluster_univariate(&src, &centered(2), &Dyadic::pow2(-4), &c).is_err());
    }

    #[test]
    fn mignotte_structure() {
        // z^8 - (2^8 z - 1)^3
        let mut co = vec![BigInt::from(0); 9];
        co[8] = 1.into();
        let b = BigInt::from(256);
        co[3] -= &b * &b * &b;
        co[2] += 3 * &b * &b;
        co[1] -= 3 * &b;
        co[0] += 1;
        let f = OraclePolynomial::univariate(
            co.into_iter()
                .map(|c| OracleNumber::dyadic(Dyadic::from_int(c)))
                .collect(),
        )
        .unwrap();
        let out = run(&f, &centered(128), Dyadic::pow2(-4));
        let mut ms: Vec<usize> = out.iter().map(|c| c.multiplicity).collect();
        ms.sort();
        assert_eq!(ms, vec![1, 1, 1, 1, 1, 3]);
    }
}
