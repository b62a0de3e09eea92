mod common;

use common::multi::*;
use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;

use tricluster::bounds::{beta, bits_for, perturbation_bound, required_precisions};

fn pow2(e: i64) -> Q {
    let p = Q::from_integer(num_bigint::BigInt::from(1) << e.unsigned_abs() as usize);
    if e >= 0 {
        p
    } else {
        Q::one() / p
    }
}

fn square(x: &Q) -> Q {
    x * x
}

#[test]
fn specialization_norm_example() {
    // x y + (x^3 - 1) y^2 z + (x^2 - y^2) z^3 at (x, y) = (-1, 3)
    let mut terms = std::collections::BTreeMap::new();
    for (e, c) in [
        ([1, 1, 0], 1),
        ([3, 2, 1], 1),
        ([0, 2, 1], -1),
        ([2, 0, 3], 1),
        ([0, 2, 3], -1),
    ] {
        terms.insert(e.to_vec(), Cq::real(q(c, 1)));
    }
    let f = Poly { terms, n: 3 };
    let fb = f.specialize(&[Cq::real(q(-1, 1)), Cq::real(q(3, 1))]);
    assert_eq!(norm2(&fb), q(18 * 18, 1));
    let bound = beta(3, &q(1, 1)) * beta(2, &q(3, 1));
    assert_eq!(bound, q(52, 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn budget_keeps_specialization_close(seed in any::<u64>(), n in 2usize..=3, d in 1u32..=3, l in -4i64..40) {
        let mut rng = Dice::new(seed);
        let f = random_poly(&mut rng, n, d);
        let b = random_point(&mut rng, n - 1);
        let m = b.iter().map(abs_upper).max().unwrap() + Q::one();
        let delta_l = pow2(-l);
        let budget = required_precisions(&delta_l, d, &max_abs_coeff(&f), &m, n).unwrap();
        prop_assert!(budget.delta_b_max <= Q::one() && budget.delta_b_max > Q::zero());
        prop_assert!(budget.delta_f_max > Q::zero());
        let ft = perturb_poly(&mut rng, &f, &budget.delta_f_max);
        let bt = perturb_point(&mut rng, &b, &budget.delta_b_max);
        let gap = dist2(&f.specialize(&b), &ft.specialize(&bt));
        prop_assert!(gap <= square(&delta_l));
    }

    #[test]
    fn perturbation_bound_dominates(seed in any::<u64>(), n in 1usize..=3, d in 1u32..=3, ef in 0i64..30, eb in 0i64..30) {
        let mut rng = Dice::new(seed);
        let f = random_poly(&mut rng, n, d);
        let b = random_point(&mut rng, n);
        let ft = perturb_poly(&mut rng, &f, &q(1, 1 << ef.min(29)));
        let bt = perturb_point(&mut rng, &b, &q(1, 1 << eb.min(29)));
        let delta0 = f.terms.iter().map(|(e, c)| abs_upper(&c.sub(&ft.terms[e]))).max().unwrap();
        let db: Vec<Q> = b.iter().zip(&bt).map(|(x, y)| abs_upper(&x.sub(y))).collect();
        let babs: Vec<Q> = b.iter().map(abs_upper).collect();
        let norm = max_abs_coeff(&f);
        for k in 1..=n {
            let bound = perturbation_bound(&norm, &f.degrees(), &babs, &delta0, &db, k);
            let gap = dist2(&f.specialize(&b[..k]), &ft.specialize(&bt[..k]));
            prop_assert!(gap <= square(&bound), "k = {}", k);
        }
        prop_assert_eq!(perturbation_bound(&norm, &f.degrees(), &babs, &Q::zero(), &vec![Q::zero(); n], n), Q::zero());
    }

    #[test]
    fn specialization_norm_dominated(seed in any::<u64>(), n in 1usize..=3, d in 1u32..=3) {
        let mut rng = Dice::new(seed);
        let f = random_poly(&mut rng, n, d);
        let b = random_point(&mut rng, n);
        let degrees = f.degrees();
        let norm = max_abs_coeff(&f);
        let mut prod = Q::one();
        for k in 1..=n {
            prod *= beta(degrees[k - 1], &abs_upper(&b[k - 1]));
            prop_assert!(norm2(&f.specialize(&b[..k])) <= square(&(&norm * &prod)));
        }
    }

    #[test]
    fn bits_for_is_tight(p in 1i64..1_000_000, d in 1i64..1_000_000) {
        let x = q(p, d);
        let l = bits_for(&x);
        prop_assert!(pow2(-l) <= x);
        prop_assert!(pow2(1 - l) > x);
    }
}
