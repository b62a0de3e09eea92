//! Error bounds for evaluating a polynomial at perturbed points with
//! perturbed coefficients, and the precision budget derived from them.
//!
//! All quantities are exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("the precision budget needs at least two variables")]
    Univariate,
    #[error("target accuracy must be positive")]
    NonPositiveTarget,
    #[error("degree must be positive")]
    ZeroDegree,
}

/// `sum_{i=0}^{d} b^i` for `b >= 0`.
pub fn beta(d: u32, b: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut p = BigRational::one();
    for _ in 0..=d {
        acc += &p;
        p *= b;
    }
    acc
}

/// The bound `[d0f + |f| sum_i d_i db_i] prod_i beta(d_i, |b_i| + db_i)`
/// over the first `k` variables.
pub fn perturbation_bound(
    norm_f: &BigRational,
    degrees: &[u32],
    b_abs: &[BigRational],
    delta0_f: &BigRational,
    delta_b: &[BigRational],
    k: usize,
) -> BigRational {
    assert!(k <= degrees.len() && k <= b_abs.len() && k <= delta_b.len());
    let mut s = delta0_f.clone();
    let mut prod = BigRational::one();
    for i in 0..k {
        s += norm_f * BigRational::from_integer(degrees[i].into()) * &delta_b[i];
        prod *= beta(degrees[i], &(&b_abs[i] + &delta_b[i]));
    }
    s * prod
}

/// Largest admissible coefficient and point perturbations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionBudget {
    pub delta_f_max: BigRational,
    pub delta_b_max: BigRational,
}

impl PrecisionBudget {
    /// Bits `ceil(-log2 delta_f_max)`.
    pub fn bits_f(&self) -> i64 {
        bits_for(&self.delta_f_max)
    }

    /// Bits `ceil(-log2 delta_b_max)`.
    pub fn bits_b(&self) -> i64 {
        bits_for(&self.delta_b_max)
    }
}

/// Thresholds on coefficient and point perturbations that keep the
/// specialized polynomial within `delta_l` of the exact one:
/// `delta_f <= delta_l / (2 ((d+1) M^d)^(n-1))` and
/// `delta_b <= min(1, delta_l / (2 d |f| (n-1) ((d+1) M^d)^(n-1)))`.
pub fn required_precisions(
    delta_l: &BigRational,
    d: u32,
    norm_f: &BigRational,
    m: &BigRational,
    n: usize,
) -> Result<PrecisionBudget, BoundsError> {
    if n < 2 {
        return Err(BoundsError::Univariate);
    }
    if !delta_l.is_positive() {
        return Err(BoundsError::NonPositiveTarget);
    }
    if d == 0 {
        return Err(BoundsError::ZeroDegree);
    }
    let base =
        BigRational::from_integer(BigInt::from(d + 1)) * num_traits::pow(m.clone(), d as usize);
    let g = num_traits::pow(base, n - 1);
    let two = BigRational::from_integer(2.into());
    let delta_f_max = delta_l / (&two * &g);
    let denom_b = &two
        * BigRational::from_integer(d.into())
        * norm_f
        * BigRational::from_integer(BigInt::from(n - 1))
        * &g;
    let delta_b_max = if denom_b.is_zero() {
        BigRational::one()
    } else {
        let v = delta_l / denom_b;
        if v > BigRational::one() {
            BigRational::one()
        } else {
            v
        }
    };
    Ok(PrecisionBudget {
        delta_f_max,
        delta_b_max,
    })
}

/// Smallest integer `L` with `2^-L <= delta`, for `delta > 0`.
pub fn bits_for(delta: &BigRational) -> i64 {
    assert!(delta.is_positive());
    let (a, b) = (delta.denom(), delta.numer());
    // want smallest L with b 2^L >= a
    let mut l = a.bits() as i64 - b.bits() as i64 - 1;
    let fits = |l: i64| {
        if l >= 0 {
            (b << l as usize) >= *a
        } else {
            *b >= (a << (-l) as usize)
        }
    };
    while !fits(l) {
        l += 1;
    }
    while fits(l - 1) {
        l -= 1;
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn ri(p: i64) -> BigRational {
        r(p, 1)
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(2, &ri(1)), ri(3));
        assert_eq!(beta(3, &ri(1)), ri(4));
        assert_eq!(beta(2, &ri(3)), ri(13));
        assert_eq!(beta(0, &r(7, 3)), ri(1));
    }

    #[test]
    fn perturbation_examples() {
        let z = BigRational::zero();
        assert_eq!(
            perturbation_bound(
                &ri(1),
                &[3, 2],
                &[ri(1), ri(3)],
                &z,
                &[z.clone(), z.clone()],
                2
            ),
            z
        );
        let eps = r(1, 1024);
        let b = perturbation_bound(&ri(1), &[1], &[z.clone()], &z, &[eps.clone()], 1);
        assert_eq!(b, &eps * (ri(1) + &eps));
    }

    #[test]
    fn budget_examples() {
        let huge = ri(1 << 20);
        let p = required_precisions(&huge, 3, &ri(1), &ri(2), 2).unwrap();
        assert_eq!(p.delta_b_max, ri(1));

        let dl = r(1, 1000);
        let p = required_precisions(&dl, 1, &ri(1), &ri(2), 2).unwrap();
        assert_eq!(p.delta_f_max, &dl / ri(8));
        assert_eq!(p.delta_b_max, &dl / ri(8));

        let dl = r(1, 1024);
        let p = required_precisions(&dl, 2, &ri(4), &ri(2), 2).unwrap();
        assert_eq!(p.delta_f_max, &dl / ri(24));
        assert_eq!(p.delta_b_max, &dl / ri(192));

        assert_eq!(
            required_precisions(&dl, 2, &ri(4), &ri(2), 1),
            Err(BoundsError::Univariate)
        );
    }

    #[test]
    fn bit_counts() {
        assert_eq!(bits_for(&r(1, 1024)), 10);
        assert_eq!(bits_for(&r(1, 1000)), 10);
        assert_eq!(bits_for(&r(1, 1025)), 11);
        assert_eq!(bits_for(&ri(1)), 0);
        assert_eq!(bits_for(&ri(5)), -2);
    }
}
