mod common;

use common::*;
use proptest::prelude::*;

use tricluster::clustertri::{cluster_tri, Cluster, SolveOptions, SolveResult};
use tricluster::dyadic::{Dyadic, DyadicComplex};
use tricluster::generate::{generate, GeneratorSpec};
use tricluster::opoly::TriangularSystem;
use tricluster::system::{centered_roi, parse_system};

/// Roots `a/8` of `f1` and factors `z2 - (c/2) z1 - e/4` of `f2`, with
/// multiplicities.
#[derive(Clone, Debug)]
struct Factored {
    f1: Vec<(i64, usize)>,
    f2: Vec<(i64, i64, usize)>,
}

fn factored() -> impl Strategy<Value = Factored> {
    let f1 = proptest::collection::btree_map(-6i64..=6, 1usize..=2, 1..=3)
        .prop_map(|m| m.into_iter().collect());
    let f2 = proptest::collection::vec((-2i64..=2, -6i64..=6, 1usize..=2), 1..=2);
    (f1, f2).prop_map(|(f1, f2)| Factored { f1, f2 })
}

impl Factored {
    fn text(&self) -> String {
        let f1: Vec<String> = self
            .f1
            .iter()
            .map(|(a, m)| format!("(z1 - ({a})/8)^{m}"))
            .collect();
        let f2: Vec<String> = self
            .f2
            .iter()
            .map(|(c, e, k)| format!("(z2 - ({c})/2*z1 - ({e})/4)^{k}"))
            .collect();
        format!("f1 = {}\nf2 = {}\n", f1.join("*"), f2.join("*"))
    }

    fn system(&self) -> TriangularSystem {
        parse_system(&self.text()).unwrap()
    }

    /// Solutions with multiplicity; coincident points are listed repeatedly.
    fn solutions(&self) -> Vec<([DyadicComplex; 2], usize)> {
        let mut out = Vec::new();
        for &(a, m) in &self.f1 {
            let z1 = dy(a, -3);
            for &(c, e, k) in &self.f2 {
                let z2 = &(&dy(c, -1) * &z1) + &dy(e, -2);
                out.push((
                    [DyadicComplex::real(z1.clone()), DyadicComplex::real(z2)],
                    m * k,
                ));
            }
        }
        out
    }

    fn bezout(&self) -> u64 {
        let d1: usize = self.f1.iter().map(|f| f.1).sum();
        let d2: usize = self.f2.iter().map(|f| f.2).sum();
        (d1 * d2) as u64
    }
}

fn solve(sys: &TriangularSystem, bits: u64, opts: &SolveOptions) -> SolveResult {
    cluster_tri(sys, &centered_roi(sys.n(), 8), bits, opts).unwrap()
}

fn mass(fx: &Factored, c: &Cluster) -> usize {
    fx.solutions()
        .iter()
        .filter(|(z, _)| c.polydisc.contains(z))
        .map(|(_, m)| m)
        .sum()
}

fn same(a: &SolveResult, b: &SolveResult) -> bool {
    let (s, t) = (&a.stats, &b.stats);
    a.clusters == b.clusters
        && (s.tstar_calls, s.lifts, s.failures, s.max_precision)
            == (t.tstar_calls, t.lifts, t.failures, t.max_precision)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn clusters_account_for_every_solution(fx in factored(), bits in 3u64..24) {
        let sys = fx.system();
        let res = solve(&sys, bits, &SolveOptions::default());
        let eps = Dyadic::pow2(-(bits as i64));
        for (i, c) in res.clusters.iter().enumerate() {
            prop_assert_eq!(c.total, c.multiplicities.iter().map(|&m| m as u64).product::<u64>());
            prop_assert!(c.polydisc.radius() <= eps);
            prop_assert_eq!(mass(&fx, c) as u64, c.total);
            for d in &res.clusters[i + 1..] {
                prop_assert!(!c.polydisc.meets(&d.polydisc));
            }
        }
        prop_assert_eq!(res.clusters.iter().map(|c| c.total).sum::<u64>(), fx.bezout());
    }

    #[test]
    fn repeated_and_parallel_runs_agree(fx in factored(), bits in 3u64..16) {
        let sys = fx.system();
        let a = solve(&sys, bits, &SolveOptions::default());
        let b = solve(&sys, bits, &SolveOptions::default());
        let par = solve(&sys, bits, &SolveOptions { threads: 3, ..SolveOptions::default() });
        let memo = solve(&sys, bits, &SolveOptions { memoize: true, ..SolveOptions::default() });
        prop_assert!(same(&a, &b));
        prop_assert!(same(&a, &par));
        prop_assert_eq!(&a.clusters, &memo.clusters);
    }

    #[test]
    fn refined_clusters_nest_in_coarse_ones(fx in factored(), bits in 3u64..12, extra in 1u64..24) {
        let sys = fx.system();
        let coarse = solve(&sys, bits, &SolveOptions::default()).clusters;
        let fine = solve(&sys, bits + extra, &SolveOptions::default()).clusters;
        let three = Dyadic::from_i64(3);
        let mut totals = vec![0u64; coarse.len()];
        for f in &fine {
            let hosts: Vec<usize> = (0..coarse.len())
                .filter(|&i| {
                    let wide = coarse[i].polydisc.scale(&three);
                    wide.0.iter().zip(&f.polydisc.0).all(|(w, d)| w.contains_disc(d))
                })
                .collect();
            prop_assert!(!hosts.is_empty(), "fine cluster {:?} escapes", f.polydisc);
            totals[hosts[0]] += f.total;
        }
        for (c, t) in coarse.iter().zip(totals) {
            prop_assert_eq!(c.total, t);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn generated_systems_meet_the_bezout_count(seed in any::<u64>()) {
        let sys = generate(&GeneratorSpec::simple(&[2, 2], seed));
        let res = cluster_tri(&sys, &centered_roi(2, 1_000_000), 20, &SolveOptions::default()).unwrap();
        prop_assert_eq!(res.clusters.iter().map(|c| c.total).sum::<u64>(), 4);
    }
}
