mod common;

use common::*;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use tricluster::dyadic::{Box, Disc, Dyadic, DyadicComplex, OracleNumber};
use tricluster::opoly::OraclePolynomial;
use tricluster::pellet::{count_natural, PelletOutcome, TestCounter};
use tricluster::unicluster::{cluster_refine, cluster_univariate, OracleSource, UniCluster};

/// A root `(b + c i) / a`, taken together with its conjugate when `c != 0`,
/// and its multiplicity.
type Factor = (i64, i64, i64, usize);

fn factors() -> impl Strategy<Value = Vec<Factor>> {
    proptest::collection::vec((1i64..5, -10i64..10, -6i64..6, 1usize..4), 1..5).prop_map(|fs| {
        let mut out = Vec::new();
        let mut deg = 0;
        for (a, b, c, m) in fs {
            let per = if c == 0 { 1 } else { 2 };
            let m = m.min((6 - deg) / per);
            if m > 0 {
                deg += per * m;
                out.push((a, b, c, m));
            }
        }
        out
    })
}

fn mul(p: &[BigInt], f: &[i64]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + f.len() - 1];
    for (i, x) in p.iter().enumerate() {
        for (j, &y) in f.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn expand(fs: &[Factor]) -> (OraclePolynomial, Vec<Cq>) {
    let mut p = vec![BigInt::from(1)];
    let mut roots = Vec::new();
    for &(a, b, c, m) in fs {
        for _ in 0..m {
            if c == 0 {
                p = mul(&p, &[-b, a]);
                roots.push(Cq::real(q(b, a)));
            } else {
                p = mul(&p, &[b * b + c * c, -2 * a * b, a * a]);
                roots.push(Cq::new(q(b, a), q(c, a)));
                roots.push(Cq::new(q(b, a), q(-c, a)));
            }
        }
    }
    let coeffs = p
        .into_iter()
        .map(|c| OracleNumber::dyadic(Dyadic::from_int(c)))
        .collect();
    (OraclePolynomial::univariate(coeffs).unwrap(), roots)
}

fn inside(d: &Disc, z: &Cq) -> bool {
    let c = Cq::of(&d.center);
    let r = d.radius.to_rational();
    z.sub(&c).norm2() <= &r * &r
}

fn in_box(b: &Box, z: &Cq) -> bool {
    let h = b.width.to_rational() / q(2, 1);
    let c = Cq::of(&b.center);
    let d = z.sub(&c);
    d.re.clone().max(-d.re.clone()) <= h && d.im.clone().max(-d.im.clone()) <= h
}

fn solve(f: &OraclePolynomial, roi: &Box, eps: &Dyadic) -> Vec<UniCluster> {
    let counter = TestCounter::default();
    cluster_univariate(&OracleSource::new(f, 53), roi, eps, &counter).unwrap()
}

fn roi() -> impl Strategy<Value = Box> {
    (complex(4, -2, 0), 1i64..5).prop_map(|(c, k)| Box::new(c, Dyadic::pow2(k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clusters_match_the_factored_roots(fs in factors(), roi in roi(), e in 2i64..30) {
        prop_assume!(!fs.is_empty());
        let (f, roots) = expand(&fs);
        let eps = Dyadic::pow2(-e);
        let out = solve(&f, &roi, &eps);
        let big = roi.scale(&Dyadic::from_i64(2));
        for u in &out {
            prop_assert!(u.disc.radius <= eps);
            let inner = roots.iter().filter(|z| inside(&u.disc, z)).count();
            let outer = roots.iter().filter(|z| inside(&u.disc.scale(&Dyadic::from_i64(3)), z)).count();
            prop_assert_eq!(inner, u.multiplicity);
            prop_assert_eq!(outer, u.multiplicity);
            prop_assert!(roots.iter().filter(|z| inside(&u.disc, z)).all(|z| in_box(&big, z)));
        }
        for z in roots.iter().filter(|z| in_box(&roi, z)) {
            prop_assert_eq!(out.iter().filter(|u| inside(&u.disc, z)).count(), 1, "root {:?} not covered once", z);
        }
        for (i, a) in out.iter().enumerate() {
            for b in &out[i + 1..] {
                prop_assert!(!a.disc.meets_disc(&b.disc));
            }
        }
    }

    #[test]
    fn clusters_stay_natural_at_doubled_precision(fs in factors(), e in 2i64..20) {
        prop_assume!(!fs.is_empty());
        let (f, _) = expand(&fs);
        let roi = Box::new(DyadicComplex::zero(), Dyadic::from_i64(8));
        for u in solve(&f, &roi, &Dyadic::pow2(-e)) {
            let p = 2 * u.precision;
            prop_assert_eq!(count_natural(&f.approximate(p as i64), &u.disc, p), PelletOutcome::Count(u.multiplicity));
        }
    }

    #[test]
    fn refinement_conserves_multiplicity(fs in factors(), e in 1i64..8, k in 1i64..40) {
        prop_assume!(!fs.is_empty());
        let (f, _) = expand(&fs);
        let roi = Box::new(DyadicComplex::zero(), Dyadic::from_i64(8));
        let counter = TestCounter::default();
        let src = OracleSource::new(&f, 53);
        for u in cluster_univariate(&src, &roi, &Dyadic::pow2(-e), &counter).unwrap() {
            let eps = Dyadic::pow2(-e - k);
            let children = cluster_refine(&src, &u, &eps, &counter).unwrap();
            prop_assert_eq!(children.iter().map(|c| c.multiplicity).sum::<usize>(), u.multiplicity);
            prop_assert!(children.iter().all(|c| c.disc.radius <= eps));
        }
    }
}
