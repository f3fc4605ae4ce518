//! Default audit grid: N in {2,3,4}, K in {2,3}, t in 1..K, smallest field
//! per scheme, one symbol per subfile. Points above the world cap are skipped.

mod common;

use common::params;
use privcache::auditor::{audit, enumerate_worlds, WorldSpec};
use privcache::caching::parse_caching;

const CAP: u128 = 2_200_000;

#[derive(Clone, Copy, PartialEq)]
enum Expect {
    /// Demand- and cache-private.
    Private,
    /// Demand-private only.
    DemandOnly,
    /// Neither.
    Leaky,
}

fn schemes(n: usize) -> Vec<(String, Option<u32>, Expect)> {
    let mut v = vec![("man".to_string(), None, Expect::Leaky), ("vu".into(), None, Expect::Private)];
    match n {
        2 => {
            v.push(("compose:tsc2".into(), None, Expect::Private));
            v.push(("compose:cc2pir:man:2:1".into(), None, Expect::Private));
            v.push(("compose:pk:2:3".into(), None, Expect::DemandOnly));
        }
        3 => {
            v.push(("compose:xor3".into(), None, Expect::Private));
            v.push(("compose:pk:3:2".into(), None, Expect::DemandOnly));
        }
        4 => v.push(("compose:signed4".into(), Some(3), Expect::Private)),
        _ => {}
    }
    v
}

#[test]
fn default_grid() {
    let mut audited = 0;
    for n in 2..=4 {
        for k in 2..=3 {
            for t in 1..k {
                for (id, q, expect) in schemes(n) {
                    let spec = WorldSpec::new(parse_caching(&id, params(n, k, t, q)).unwrap()).with_budget(CAP);
                    if spec.world_count().is_none_or(|w| w > CAP) {
                        continue;
                    }
                    let (r, _) = audit(&spec).unwrap();
                    let tag = format!("{id} N={n} K={k} t={t}");
                    assert!(r.decodability.passed, "{tag}: {:?}", r.decodability.detail);
                    assert!(r.load_memory.passed, "{tag}: {:?}", r.load_memory.detail);
                    assert!(r.chain_rule_consistent, "{tag}");
                    let demand = r.demand_privacy.iter().all(|c| c.passed);
                    let cache = r.cache_privacy.iter().all(|c| c.passed);
                    match expect {
                        Expect::Private => assert!(demand && cache, "{tag}"),
                        Expect::DemandOnly => assert!(demand && !cache, "{tag}"),
                        Expect::Leaky => assert!(!demand, "{tag}"),
                    }
                    for l in &r.leakage {
                        if let Some(eps) = l.epsilon {
                            assert!((0.0..=1.0 + 1e-12).contains(&eps), "{tag}: epsilon {eps}");
                            assert_eq!(l.exactly_zero, eps == 0.0, "{tag}");
                        }
                    }
                    audited += 1;
                }
            }
        }
    }
    assert!(audited >= 15, "only {audited} grid points within the cap");
}

#[test]
fn table_independent_of_partitioning() {
    let dump = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let spec = WorldSpec::new(parse_caching("compose:xor3", params(3, 2, 1, None)).unwrap());
            let e = enumerate_worlds(&spec).unwrap();
            let mut buf = Vec::new();
            e.table.write_csv(&mut buf).unwrap();
            buf
        })
    };
    assert_eq!(dump(1), dump(3));
}
