//! Cluster oracles and the two lifting steps that extend a tower of natural
//! clusters by one variable.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bounds::required_precisions;
use crate::dyadic::{Disc, Dyadic, PolyBox, PolyDisc};
use crate::error::SolveError;
use crate::opoly::TriangularSystem;
use crate::pellet::TestCounter;
use crate::unicluster::{cluster_univariate, FixedSource, OracleSource, UniCluster};

/// A tower: a polydisc whose `i`-th disc is a natural cluster of `m_i`
/// roots of `f_i` specialized anywhere in the discs before it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    pub polydisc: PolyDisc,
    pub m: Vec<usize>,
}

impl Tower {
    pub fn total_multiplicity(&self) -> u64 {
        total_multiplicity(&self.m)
    }
}

/// Product of the fiber multiplicities.
pub fn total_multiplicity(m: &[usize]) -> u64 {
    m.iter().map(|&x| x as u64).product()
}

/// State of a partial solution: the first `level` coordinates form a tower
/// whose search boxes are `domain[..level]`; the rest of `domain` is still
/// the region of interest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClusterOracle {
    pub level: usize,
    pub domain: PolyBox,
    pub precision: Vec<u64>,
    pub multiplicities: Vec<usize>,
    /// The certified natural discs of levels `1..=level`.
    pub discs: Vec<Disc>,
}

impl ClusterOracle {
    pub fn root(roi: PolyBox, bits: u64) -> Self {
        let n = roi.dims();
        ClusterOracle {
            level: 0,
            domain: roi,
            precision: vec![bits; n],
            multiplicities: Vec::new(),
            discs: Vec::new(),
        }
    }

    pub fn total_multiplicity(&self) -> u64 {
        total_multiplicity(&self.multiplicities)
    }

    pub fn tower(&self) -> Tower {
        Tower {
            polydisc: PolyDisc(self.discs.clone()),
            m: self.multiplicities.clone(),
        }
    }

    /// Resets to level 0 after a failed lift at `level`, doubling the
    /// precision of the levels already solved. The domain is kept, so the
    /// next pass refines the same clusters.
    pub fn reset_doubled(&self) -> Self {
        let mut precision = self.precision.clone();
        for p in precision.iter_mut().take(self.level) {
            *p *= 2;
        }
        ClusterOracle {
            level: 0,
            domain: self.domain.clone(),
            precision,
            multiplicities: Vec::new(),
            discs: Vec::new(),
        }
    }

    fn child(&self, c: UniCluster) -> Self {
        let mut next = self.clone();
        next.domain.0[self.level] = c.disc.bounding_box();
        next.multiplicities.push(c.multiplicity);
        next.discs.push(c.disc);
        next.level += 1;
        next
    }
}

/// Cluster radius used at a level with precision `bits`: the domain box
/// of the cluster then has a containing disc of radius at most `2^-bits`.
pub fn level_epsilon(bits: u64) -> Dyadic {
    Dyadic::pow2(-(bits as i64) - 1)
}

/// Clusters `f_1` in the first domain box.
pub fn lift_level_1(
    sys: &TriangularSystem,
    o: &ClusterOracle,
    counter: &TestCounter,
) -> Result<Vec<ClusterOracle>, SolveError> {
    assert_eq!(o.level, 0);
    let bits = o.precision[0];
    let src = OracleSource::new(sys.poly(0), bits.min(u32::MAX as u64) as u32);
    let found =
        cluster_univariate(&src, &o.domain.0[0], &level_epsilon(bits), counter).map_err(|e| {
            SolveError::PrecisionLimit {
                limit: e.precision as u64,
                level: 1,
                oracle: format!("{:?}", o.domain.0[0]),
            }
        })?;
    Ok(found.into_iter().map(|c| o.child(c)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lift {
    Success(Vec<ClusterOracle>),
    Failure(ClusterOracle),
}

/// Coefficient bits used to specialize `f_{level+1}` over the tower of `o`.
pub fn specialization_bits(sys: &TriangularSystem, o: &ClusterOracle) -> i64 {
    let l = o.level;
    let f = sys.poly(l);
    let prefix = o.domain.containing_disc();
    let m = prefix.0[..l]
        .iter()
        .map(|d| &d.center.abs_upper() + &d.radius)
        .max()
        .unwrap();
    let m = &m + &Dyadic::one();
    let delta_l = BigRational::new(
        BigInt::from(1),
        BigInt::from(1) << (o.precision[l] + 2) as usize,
    );
    let budget = required_precisions(
        &delta_l,
        f.max_degree(),
        &f.norm_upper().to_rational(),
        &m.to_rational(),
        l + 1,
    )
    .expect("lifting starts at level 1");
    let prefix_bits = o.precision[..l].iter().copied().max().unwrap() as i64;
    budget.bits_f().max(prefix_bits).max(1)
}

/// Clusters `f_{level+1}` specialized over the tower of `o`. Fails when the
/// specialized interval polynomial is too wide to certify.
pub fn lift_level_n(sys: &TriangularSystem, o: &ClusterOracle, counter: &TestCounter) -> Lift {
    let l = o.level;
    assert!(l >= 1 && l < sys.n());
    let f = sys.poly(l);
    let prefix = PolyDisc(
        o.domain.0[..l]
            .iter()
            .map(|b| b.containing_disc())
            .collect(),
    );
    let xs = prefix.enclosure();
    let bits = specialization_bits(sys, o);
    let prec = f.eval_precision(&xs, bits);
    let poly = f.specialize(&xs, bits, prec);
    let eps = level_epsilon(o.precision[l]);
    let src = FixedSource {
        poly,
        prec: prec + 32,
        floor: eps.shl(-40),
    };
    match cluster_univariate(&src, &o.domain.0[l], &eps, counter) {
        Ok(found) => Lift::Success(found.into_iter().map(|c| o.child(c)).collect()),
        Err(_) => Lift::Failure(o.clone()),
    }
}
