//! Private caching from a two-server PIR scheme.
//!
//! Files are split into `C(K,t)` subfiles of `F′` symbols, so each subset
//! `τ` indexes a small library `W_{[N],τ}` of N messages. User k caches its
//! subfiles as usual and, for every `τ ∌ k`, the server-1 PIR answer to its
//! own query `Q1_k` on `W_{[N],τ}`. In delivery the message for subset `S`
//! adds up the server-2 answers `γ2(Q2_s, W_{[N],S∖s})`, and the queries
//! `Q2_k` are announced.

use num_bigint::BigUint;

use crate::algebra::{binom, binom_usize, rat, rat_big, subset_rank, subsets, Gf, Layout, Library, LinearForm, Rational};
use crate::pir::{Server, SharedPir};

use super::{
    check_library, Broadcast, CacheEntry, CachePlan, CacheState, CachingError, CachingScheme, DeliveryPlan,
    EntryLabel, Payload,
};

#[derive(Clone, Debug)]
pub struct Composed {
    n: usize,
    k: usize,
    t: usize,
    pir: SharedPir,
    layout: Layout,
    placement_sets: Vec<Vec<usize>>,
    delivery_sets: Vec<Vec<usize>>,
}

impl Composed {
    pub fn new(n: usize, k: usize, t: usize, pir: SharedPir) -> Result<Self, CachingError> {
        if pir.messages() != n {
            return Err(CachingError::PirMismatch {
                pir: pir.messages(),
                n,
            });
        }
        if k == 0 {
            return Err(CachingError::BadParams("K must be positive".into()));
        }
        if t > k {
            return Err(CachingError::BadT { t, max: k });
        }
        if !pir.fixed_length(Server::Two) {
            return Err(CachingError::BadParams(format!(
                "{} has variable-length server-2 answers, which cannot be summed into one multicast message",
                pir.name()
            )));
        }
        let layout = Layout::new(n, binom_usize(k, t as isize), pir.subpacketization());
        Ok(Composed {
            n,
            k,
            t,
            pir,
            layout,
            placement_sets: subsets(k, t),
            delivery_sets: subsets(k, t + 1),
        })
    }

    pub fn pir(&self) -> &SharedPir {
        &self.pir
    }

    /// Moves PIR answer forms onto the sub-library of subset `tau`.
    fn lift(&self, forms: Vec<LinearForm>, tau: usize) -> Vec<LinearForm> {
        let f = self.pir.subpacketization();
        forms
            .into_iter()
            .map(|form| form.remap(|i| self.layout.index(i / f, tau, i % f)))
            .collect()
    }
}

impl CachingScheme for Composed {
    fn name(&self) -> String {
        format!("compose:{}", self.pir.name())
    }

    fn files(&self) -> usize {
        self.n
    }

    fn users(&self) -> usize {
        self.k
    }

    fn field(&self) -> Gf {
        self.pir.field()
    }

    fn layout(&self) -> Layout {
        self.layout
    }

    fn randomness_size(&self) -> usize {
        self.pir.randomness_size()
    }

    fn metadata_size(&self) -> usize {
        self.pir.query_space().0
    }

    fn broadcast_metadata_radix(&self) -> usize {
        self.pir.query_space().1
    }

    fn place(&self, user: usize, r: usize) -> CachePlan {
        let q1 = self.pir.query1(r);
        let mut entries = Vec::new();
        for file in 0..self.n {
            for (tau, set) in self.placement_sets.iter().enumerate() {
                if set.contains(&user) {
                    entries.push(CacheEntry {
                        label: EntryLabel::Subfile {
                            file,
                            subset: set.clone(),
                        },
                        forms: (0..self.layout.sub_len)
                            .map(|j| LinearForm::unit(self.layout.index(file, tau, j)))
                            .collect(),
                    });
                }
            }
        }
        for (tau, set) in self.placement_sets.iter().enumerate() {
            if !set.contains(&user) {
                entries.push(CacheEntry {
                    label: EntryLabel::Key { subset: set.clone() },
                    forms: self.lift(self.pir.answer_forms(Server::One, q1), tau),
                });
            }
        }
        CachePlan {
            user,
            entries,
            metadata: q1,
        }
    }

    fn deliver(&self, randomness: &[usize], demand: &[usize]) -> DeliveryPlan {
        let gf = self.pir.field();
        let q2: Vec<usize> = (0..self.k).map(|u| self.pir.query2(demand[u], randomness[u])).collect();
        let len = self.pir.answer_len(Server::Two, 0);
        let payloads = self
            .delivery_sets
            .iter()
            .map(|set| {
                let mut forms = vec![LinearForm::zero(); len];
                for &s in set {
                    let rest: Vec<usize> = set.iter().copied().filter(|&u| u != s).collect();
                    let part = self.lift(self.pir.answer_forms(Server::Two, q2[s]), subset_rank(self.k, &rest));
                    for (acc, f) in forms.iter_mut().zip(&part) {
                        *acc = acc.add(f, &gf);
                    }
                }
                Payload {
                    subset: set.clone(),
                    forms,
                }
            })
            .collect();
        DeliveryPlan {
            payloads,
            metadata: q2,
        }
    }

    /// `(Nt/K + (1 - t/K)·R_D1, R_D2·(K-t)/(t+1))`.
    fn declared_memory_load(&self) -> (Rational, Rational) {
        let (r1, r2) = self.pir.download_costs();
        let (n, k, t) = (self.n as i64, self.k as i64, self.t as i64);
        let m = rat(n * t, k) + (rat(1, 1) - rat(t, k)) * r1;
        let load = r2 * rat_big(&BigUint::from((k - t) as u64), &BigUint::from((t + 1) as u64));
        (m, load)
    }
}

fn composed_for(k: usize, t: usize, pir: &SharedPir, library: &Library) -> Result<Composed, CachingError> {
    let c = Composed::new(library.layout().files, k, t, pir.clone())?;
    check_library(&c, library)?;
    Ok(c)
}

pub fn compose_place(
    k: usize,
    t: usize,
    pir: &SharedPir,
    library: &Library,
    randomness: &[usize],
) -> Result<Vec<CacheState>, CachingError> {
    let c = composed_for(k, t, pir, library)?;
    if randomness.len() != k || randomness.iter().any(|&r| r >= c.randomness_size()) {
        return Err(CachingError::BadParams("one PIR randomness per user".into()));
    }
    let gf = c.field();
    Ok((0..k).map(|u| c.place(u, randomness[u]).evaluate(&gf, library)).collect())
}

pub fn compose_deliver(
    demand: &[usize],
    pir: &SharedPir,
    library: &Library,
    randomness: &[usize],
    t: usize,
) -> Result<Broadcast, CachingError> {
    let c = composed_for(demand.len(), t, pir, library)?;
    let (_, broadcast) = super::run(&c, library, randomness, demand)?;
    Ok(broadcast)
}

/// Subpacketization `C(K,t)·F′` of a composed scheme.
pub(crate) fn composed_subpacketization(k: usize, t: usize, f: usize) -> BigUint {
    binom(k as u64, t as i64) * f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pir::{parse_pir, Tsc2};
    use std::sync::Arc;

    // Example layout for N=K=2, t=1: A{1}=0, A{2}=1, B{1}=2, B{2}=3
    fn example() -> Composed {
        Composed::new(2, 2, 1, Arc::new(Tsc2::new(Gf::new(2).unwrap()))).unwrap()
    }

    #[test]
    fn example_caches() {
        let gf = Gf::new(2).unwrap();
        let c = example();
        let z2 = c.place(1, 1);
        let forms: Vec<_> = z2.forms().cloned().collect();
        assert_eq!(
            forms,
            vec![LinearForm::unit(1), LinearForm::unit(3), LinearForm::from_terms(&gf, [(0, 1), (2, 1)])]
        );
        assert_eq!(z2.metadata, 1);
        let z1 = c.place(0, 0);
        assert_eq!(z1.symbol_count(), 2);
    }

    #[test]
    fn example_delivery() {
        let gf = Gf::new(2).unwrap();
        let c = example();
        // (T1,T2) = (0,1), d = (A,B): A2 + A1
        let plan = c.deliver(&[0, 1], &[0, 1]);
        assert_eq!(plan.payloads[0].forms, vec![LinearForm::from_terms(&gf, [(0, 1), (1, 1)])]);
        // (1,1), d = (B,A): A2 + B1
        let plan = c.deliver(&[1, 1], &[1, 0]);
        assert_eq!(plan.payloads[0].forms, vec![LinearForm::from_terms(&gf, [(1, 1), (2, 1)])]);
        assert_eq!(c.declared_memory_load(), (rat(5, 4), rat(1, 2)));
    }

    #[test]
    fn signed4_key_part() {
        let gf = Gf::new(3).unwrap();
        let c = Composed::new(4, 2, 1, parse_pir("signed4", None).unwrap()).unwrap();
        let z1 = c.place(0, 0);
        let key: Vec<_> = z1
            .entries
            .iter()
            .filter(|e| matches!(e.label, EntryLabel::Key { .. }))
            .collect();
        assert_eq!(key.len(), 1);
        // W1,{2} + W2,{2} + W3,{2} + W4,{2}
        let l = c.layout();
        let expected = LinearForm::from_terms(&gf, (0..4).map(|n| (l.index(n, 1, 0), 1)));
        assert_eq!(key[0].forms, vec![expected]);
        assert_eq!(c.declared_memory_load(), (rat(5, 2), rat(1, 2)));
    }

    #[test]
    fn rejects_mismatch_and_variable_length() {
        let tsc2 = parse_pir("tsc2", None).unwrap();
        assert!(matches!(Composed::new(3, 2, 1, tsc2), Err(CachingError::PirMismatch { .. })));
        // server roles swapped half the time: server 2 inherits variable lengths
        let ts = parse_pir("tsc2:ts:1/2", None).unwrap();
        assert!(Composed::new(2, 2, 1, ts).is_err());
    }

    #[test]
    fn concrete_wrappers() {
        let gf = Gf::new(2).unwrap();
        let pir: SharedPir = Arc::new(Tsc2::new(gf));
        let lib = Library::new(gf, Layout::new(2, 2, 1), vec![1, 1, 0, 1]).unwrap();
        let caches = compose_place(2, 1, &pir, &lib, &[0, 1]).unwrap();
        assert_eq!(caches[1].key_part().count(), 1);
        assert_eq!(caches[1].key_part().next().unwrap().1.values(), &[1]);
        let b = compose_deliver(&[0, 1], &pir, &lib, &[0, 1], 1).unwrap();
        assert_eq!(b.payloads[0].1.values(), &[0]);
        assert_eq!(b.metadata, vec![0, 0]);
    }
}
