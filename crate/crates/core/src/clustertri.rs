//! The queue-driven solver: lift cluster oracles level by level, doubling
//! the precision of the solved prefix whenever a lift fails.

use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::dyadic::{PolyBox, PolyDisc};
use crate::error::SolveError;
use crate::opoly::TriangularSystem;
use crate::pellet::TestCounter;
use crate::tower::{lift_level_1, lift_level_n, ClusterOracle, Lift};

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Abort once any level would need more bits than this.
    pub max_precision: u64,
    /// Worker threads; 1 runs everything on the calling thread.
    pub threads: usize,
    /// Reuse lift results for identical oracles.
    pub memoize: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_precision: 1 << 16,
            threads: 1,
            memoize: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub polydisc: PolyDisc,
    pub multiplicities: Vec<usize>,
    pub total: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub tstar_calls: u64,
    pub lifts: u64,
    pub failures: u64,
    pub max_precision: u64,
    pub wall_time: Duration,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub clusters: Vec<Cluster>,
    pub stats: SolveStats,
}

enum Step {
    Children(Vec<ClusterOracle>),
    Retry(ClusterOracle),
}

fn lift(
    sys: &TriangularSystem,
    o: &ClusterOracle,
    counter: &TestCounter,
) -> Result<Step, SolveError> {
    if o.level == 0 {
        return lift_level_1(sys, o, counter).map(Step::Children);
    }
    Ok(match lift_level_n(sys, o, counter) {
        Lift::Success(kids) => Step::Children(kids),
        Lift::Failure(o) => Step::Retry(o.reset_doubled()),
    })
}

/// Solves the local clustering problem for `sys` in `roi` with cluster
/// radius at most `2^-bits`.
pub fn cluster_tri(
    sys: &TriangularSystem,
    roi: &PolyBox,
    bits: u64,
    opts: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let n = sys.n();
    if roi.dims() != n {
        return Err(SolveError::Input(format!(
            "region of interest has {} components for {n} variables",
            roi.dims()
        )));
    }
    if bits < 2 {
        return Err(SolveError::Input(
            "precision must be at least 2 bits".into(),
        ));
    }
    let counter = TestCounter::default();
    let mut stats = SolveStats {
        max_precision: bits,
        ..Default::default()
    };
    let mut memo: HashMap<ClusterOracle, Vec<ClusterOracle>> = HashMap::new();
    let mut queue: VecDeque<ClusterOracle> =
        VecDeque::from([ClusterOracle::root(roi.clone(), bits)]);
    let mut done: Vec<ClusterOracle> = Vec::new();
    let pool = if opts.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.threads)
                .build()
                .map_err(|e| SolveError::Input(e.to_string()))?,
        )
    } else {
        None
    };

    while !queue.is_empty() {
        // One round lifts everything queued so far, in queue order; pushes go
        // behind it, exactly as with one pop at a time.
        let batch: Vec<ClusterOracle> = queue.drain(..).collect();
        let (fresh, cached): (Vec<usize>, Vec<usize>) =
            (0..batch.len()).partition(|&i| !(opts.memoize && memo.contains_key(&batch[i])));
        let run = |i: &usize| lift(sys, &batch[*i], &counter);
        let results: Vec<Result<Step, SolveError>> = match &pool {
            Some(p) => p.install(|| fresh.par_iter().map(run).collect()),
            None => fresh.iter().map(run).collect(),
        };
        let mut steps: Vec<Option<Step>> = (0..batch.len()).map(|_| None).collect();
        for (i, r) in fresh.into_iter().zip(results) {
            steps[i] = Some(r?);
        }
        for i in cached {
            steps[i] = Some(Step::Children(memo[&batch[i]].clone()));
        }
        for (o, step) in batch.iter().zip(steps) {
            stats.lifts += 1;
            match step.unwrap() {
                Step::Children(kids) => {
                    if opts.memoize {
                        memo.entry(o.clone()).or_insert_with(|| kids.clone());
                    }
                    for k in kids {
                        if k.level == n {
                            done.push(k);
                        } else {
                            queue.push_back(k);
                        }
                    }
                }
                Step::Retry(r) => {
                    stats.failures += 1;
                    let top = r.precision.iter().copied().max().unwrap_or(bits);
                    stats.max_precision = stats.max_precision.max(top);
                    if top > opts.max_precision {
                        return Err(SolveError::PrecisionLimit {
                            limit: opts.max_precision,
                            level: o.level,
                            oracle: format!("{:?}", o.tower().polydisc),
                        });
                    }
                    queue.push_back(r);
                }
            }
        }
    }

    stats.tstar_calls = counter.get();
    stats.wall_time = start.elapsed();
    let clusters = done
        .into_iter()
        .map(|o| Cluster {
            total: o.total_multiplicity(),
            polydisc: PolyDisc(o.discs),
            multiplicities: o.multiplicities,
        })
        .collect();
    Ok(SolveResult { clusters, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{Box, Dyadic, DyadicComplex, OracleNumber};
    use crate::opoly::{OraclePolynomial, Term};

    fn term(e: &[u32], c: Dyadic) -> Term {
        Term {
            exps: e.to_vec(),
            coeff: OracleNumber::dyadic(c),
        }
    }

    fn sys_g(delta: i64) -> TriangularSystem {
        // (z1 - 2^-d)(z1 + 2^-d), (z2 - 2^(2d) z1^2) z2
        let f1 = OraclePolynomial::new(
            1,
            vec![
                term(&[2], Dyadic::one()),
                term(&[0], -Dyadic::pow2(-2 * delta)),
            ],
        )
        .unwrap();
        let f2 = OraclePolynomial::new(
            2,
            vec![
                term(&[0, 2], Dyadic::one()),
                term(&[2, 1], -Dyadic::pow2(2 * delta)),
            ],
        )
        .unwrap();
        TriangularSystem::new(vec![f1, f2]).unwrap()
    }

    fn centered(w: i64) -> Box {
        Box::new(DyadicComplex::zero(), Dyadic::from_i64(w))
    }

    #[test]
    fn system_g_four_simple_clusters() {
        let roi = PolyBox(vec![centered(8), centered(8)]);
        let res = cluster_tri(&sys_g(1), &roi, 10, &SolveOptions::default()).unwrap();
        assert_eq!(res.clusters.len(), 4);
        assert!(res.clusters.iter().all(|c| c.total == 1));
    }

    #[test]
    fn univariate_system_matches_cluster_univariate() {
        let f1 = OraclePolynomial::new(
            1,
            vec![term(&[3], Dyadic::one()), term(&[1], -Dyadic::one())],
        )
        .unwrap();
        let sys = TriangularSystem::new(vec![f1]).unwrap();
        let roi = PolyBox(vec![centered(4)]);
        let res = cluster_tri(&sys, &roi, 12, &SolveOptions::default()).unwrap();
        assert_eq!(res.clusters.len(), 3);
    }

    #[test]
    fn parallel_matches_sequential() {
        let roi = PolyBox(vec![centered(8), centered(8)]);
        let a = cluster_tri(&sys_g(2), &roi, 16, &SolveOptions::default()).unwrap();
        let opts = SolveOptions {
            threads: 4,
            ..Default::default()
        };
        let b = cluster_tri(&sys_g(2), &roi, 16, &opts).unwrap();
        assert_eq!(a.clusters, b.clusters);
        let opts = SolveOptions {
            memoize: true,
            ..Default::default()
        };
        let c = cluster_tri(&sys_g(2), &roi, 16, &opts).unwrap();
        assert_eq!(a.clusters, c.clusters);
    }

    #[test]
    fn precision_limit_aborts() {
        let roi = PolyBox(vec![centered(8), centered(8)]);
        let opts = SolveOptions {
            max_precision: 12,
            ..Default::default()
        };
        let r = cluster_tri(&sys_g(3), &roi, 10, &opts);
        assert!(matches!(r, Err(SolveError::PrecisionLimit { .. })));
    }
}
