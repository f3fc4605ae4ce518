//! Subset placement with MAN or YMA delivery.

use crate::algebra::{binom, binom_usize, rat_big, subset_rank, subsets, Gf, Layout, Library, LinearForm, Rational};
use num_bigint::BigUint;

use super::{
    check_library, Broadcast, CacheEntry, CachePlan, CacheState, CachingError, CachingScheme, DeliveryPlan,
    EntryLabel, Payload,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Delivery {
    /// One coded message per (t+1)-subset.
    Man,
    /// Only the (t+1)-subsets that contain a leader.
    Yma,
}

/// Deterministic placement: user k stores every `W_{n,τ}` with `k ∈ τ`.
///
/// The broadcast metadata is the demand vector, which a non-private
/// scheme must announce for users to know which subfiles were combined.
#[derive(Clone, Debug)]
pub struct Man {
    n: usize,
    k: usize,
    t: usize,
    gf: Gf,
    sub_len: usize,
    delivery: Delivery,
    layout: Layout,
    placement_sets: Vec<Vec<usize>>,
    delivery_sets: Vec<Vec<usize>>,
}

impl Man {
    pub fn new(n: usize, k: usize, t: usize, gf: Gf, sub_len: usize) -> Result<Self, CachingError> {
        Self::with_delivery(n, k, t, gf, sub_len, Delivery::Man)
    }

    pub fn with_delivery(
        n: usize,
        k: usize,
        t: usize,
        gf: Gf,
        sub_len: usize,
        delivery: Delivery,
    ) -> Result<Self, CachingError> {
        if n == 0 || k == 0 || sub_len == 0 {
            return Err(CachingError::BadParams("N, K and symbol length must be positive".into()));
        }
        if t > k {
            return Err(CachingError::BadT { t, max: k });
        }
        let layout = Layout::new(n, binom_usize(k, t as isize), sub_len);
        Ok(Man {
            n,
            k,
            t,
            gf,
            sub_len,
            delivery,
            layout,
            placement_sets: subsets(k, t),
            delivery_sets: subsets(k, t + 1),
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn delivery_kind(&self) -> Delivery {
        self.delivery
    }

    /// Unit forms of every symbol of `W_{file, subsets[tau]}`.
    pub fn subfile_forms(&self, file: usize, tau: usize) -> Vec<LinearForm> {
        (0..self.sub_len)
            .map(|j| LinearForm::unit(self.layout.index(file, tau, j)))
            .collect()
    }

    fn payload(&self, subset: &[usize], demand: &[usize]) -> Payload {
        let forms = (0..self.sub_len)
            .map(|j| {
                let terms = subset.iter().map(|&s| {
                    let rest: Vec<usize> = subset.iter().copied().filter(|&u| u != s).collect();
                    (self.layout.index(demand[s], subset_rank(self.k, &rest), j), 1i64)
                });
                LinearForm::from_terms(&self.gf, terms)
            })
            .collect();
        Payload {
            subset: subset.to_vec(),
            forms,
        }
    }
}

/// Lowest-indexed user for each distinct demanded file, sorted.
pub fn yma_leaders(demand: &[usize]) -> Vec<usize> {
    let mut seen = Vec::new();
    let mut leaders = Vec::new();
    for (user, &d) in demand.iter().enumerate() {
        if !seen.contains(&d) {
            seen.push(d);
            leaders.push(user);
        }
    }
    leaders
}

impl CachingScheme for Man {
    fn name(&self) -> String {
        match self.delivery {
            Delivery::Man => "man".into(),
            Delivery::Yma => "yma".into(),
        }
    }

    fn files(&self) -> usize {
        self.n
    }

    fn users(&self) -> usize {
        self.k
    }

    fn field(&self) -> Gf {
        self.gf
    }

    fn layout(&self) -> Layout {
        self.layout
    }

    fn randomness_size(&self) -> usize {
        1
    }

    fn metadata_size(&self) -> usize {
        1
    }

    fn broadcast_metadata_radix(&self) -> usize {
        self.n
    }

    fn place(&self, user: usize, _r: usize) -> CachePlan {
        let mut entries = Vec::new();
        for file in 0..self.n {
            for (tau, set) in self.placement_sets.iter().enumerate() {
                if set.contains(&user) {
                    entries.push(CacheEntry {
                        label: EntryLabel::Subfile {
                            file,
                            subset: set.clone(),
                        },
                        forms: self.subfile_forms(file, tau),
                    });
                }
            }
        }
        CachePlan {
            user,
            entries,
            metadata: 0,
        }
    }

    fn deliver(&self, _randomness: &[usize], demand: &[usize]) -> DeliveryPlan {
        let leaders = match self.delivery {
            Delivery::Man => None,
            Delivery::Yma => Some(yma_leaders(demand)),
        };
        let payloads = self
            .delivery_sets
            .iter()
            .filter(|s| leaders.as_ref().is_none_or(|l| s.iter().any(|u| l.contains(u))))
            .map(|s| self.payload(s, demand))
            .collect();
        DeliveryPlan {
            payloads,
            metadata: demand.to_vec(),
        }
    }

    fn declared_memory_load(&self) -> (Rational, Rational) {
        let (n, k, t) = (self.n as u64, self.k as u64, self.t as i64);
        let m = rat_big(&(BigUint::from(n) * t as u64), &BigUint::from(k));
        let sent = match self.delivery {
            Delivery::Man => binom(k, t + 1),
            Delivery::Yma => binom(k, t + 1) - binom(k - n.min(k), t + 1),
        };
        (m, rat_big(&sent, &binom(k, t)))
    }
}

fn man_for(library: &Library, k: usize, t: usize, delivery: Delivery) -> Result<Man, CachingError> {
    let l = library.layout();
    let gf = Gf::new(library.modulus())?;
    let man = Man::with_delivery(l.files, k, t, gf, l.sub_len, delivery)?;
    check_library(&man, library)?;
    Ok(man)
}

/// Subset placement of `library` for `k` users.
pub fn man_place(k: usize, t: usize, library: &Library) -> Result<Vec<CacheState>, CachingError> {
    let man = man_for(library, k, t, Delivery::Man)?;
    let gf = man.field();
    Ok((0..k).map(|u| man.place(u, 0).evaluate(&gf, library)).collect())
}

pub fn man_deliver(demand: &[usize], library: &Library, t: usize) -> Result<Broadcast, CachingError> {
    let man = man_for(library, demand.len(), t, Delivery::Man)?;
    Ok(man.deliver(&[], demand).evaluate(&man.field(), library))
}

pub fn yma_deliver(demand: &[usize], library: &Library, t: usize) -> Result<Broadcast, CachingError> {
    let man = man_for(library, demand.len(), t, Delivery::Yma)?;
    Ok(man.deliver(&[], demand).evaluate(&man.field(), library))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn gf2() -> Gf {
        Gf::new(2).unwrap()
    }

    #[test]
    fn placement_example() {
        // A1=0, A2=1, B1=2, B2=3
        let man = Man::new(2, 2, 1, gf2(), 1).unwrap();
        let z1: Vec<_> = man.place(0, 0).forms().cloned().collect();
        assert_eq!(z1, vec![LinearForm::unit(0), LinearForm::unit(2)]);
        let z2: Vec<_> = man.place(1, 0).forms().cloned().collect();
        assert_eq!(z2, vec![LinearForm::unit(1), LinearForm::unit(3)]);
    }

    #[test]
    fn placement_extremes() {
        let man = Man::new(3, 3, 0, gf2(), 1).unwrap();
        assert_eq!(man.place(1, 0).symbol_count(), 0);
        let man = Man::new(3, 3, 3, gf2(), 2).unwrap();
        assert_eq!(man.place(1, 0).symbol_count(), man.layout().dim());
        // per-user symbols N·C(K-1,t-1)·L
        let man = Man::new(3, 4, 2, gf2(), 2).unwrap();
        assert_eq!(man.place(0, 0).symbol_count(), 3 * 3 * 2);
    }

    #[test]
    fn delivery_examples() {
        let gf = gf2();
        let man = Man::new(2, 2, 1, gf, 1).unwrap();
        // d=(1,2): A2 + B1
        let plan = man.deliver(&[], &[0, 1]);
        assert_eq!(plan.payloads.len(), 1);
        assert_eq!(plan.payloads[0].forms[0], LinearForm::from_terms(&gf, [(1, 1), (2, 1)]));
        // both want file 1: A2 + A1
        let plan = man.deliver(&[], &[0, 0]);
        assert_eq!(plan.payloads[0].forms[0], LinearForm::from_terms(&gf, [(0, 1), (1, 1)]));
        // t = K-1 gives one payload
        let man = Man::new(3, 4, 3, gf, 1).unwrap();
        assert_eq!(man.deliver(&[], &[0, 1, 2, 0]).payloads.len(), 1);
    }

    #[test]
    fn yma_examples() {
        let gf = gf2();
        assert_eq!(yma_leaders(&[0, 0, 1, 1]), vec![0, 2]);
        let yma = Man::with_delivery(2, 4, 1, gf, 1, Delivery::Yma).unwrap();
        assert_eq!(yma.deliver(&[], &[0, 0, 1, 1]).payloads.len(), 5);
        let yma = Man::with_delivery(2, 2, 1, gf, 1, Delivery::Yma).unwrap();
        assert_eq!(yma.deliver(&[], &[1, 1]).payloads.len(), 1);
        // all distinct: same as MAN
        let yma = Man::with_delivery(4, 3, 1, gf, 1, Delivery::Yma).unwrap();
        let man = Man::new(4, 3, 1, gf, 1).unwrap();
        assert_eq!(yma.deliver(&[], &[2, 0, 3]), man.deliver(&[], &[2, 0, 3]));
    }

    #[test]
    fn yma_count_matches_formula() {
        let gf = gf2();
        for k in 1..=5usize {
            for t in 0..=k {
                let yma = Man::with_delivery(3, k, t, gf, 1, Delivery::Yma).unwrap();
                let mut demand = vec![0usize; k];
                loop {
                    let l = yma_leaders(&demand).len() as u64;
                    let expected = binom(k as u64, t as i64 + 1) - binom(k as u64 - l, t as i64 + 1);
                    assert_eq!(BigUint::from(yma.deliver(&[], &demand).payloads.len()), expected);
                    // next demand vector in base 3
                    let mut i = 0;
                    while i < k && demand[i] == 2 {
                        demand[i] = 0;
                        i += 1;
                    }
                    if i == k {
                        break;
                    }
                    demand[i] += 1;
                }
            }
        }
    }

    #[test]
    fn declared_values() {
        let man = Man::new(2, 2, 1, gf2(), 1).unwrap();
        assert_eq!(man.declared_memory_load(), (rat(1, 1), rat(1, 2)));
        assert!(Man::new(2, 2, 3, gf2(), 1).is_err());
    }

    #[test]
    fn concrete_wrappers() {
        let gf = gf2();
        let lib = Library::new(gf, Layout::new(2, 2, 1), vec![1, 0, 0, 1]).unwrap();
        let caches = man_place(2, 1, &lib).unwrap();
        assert_eq!(caches[0].man_part().count(), 2);
        let b = man_deliver(&[0, 1], &lib, 1).unwrap();
        // A2 + B1 = 0 + 0
        assert_eq!(b.payloads[0].1.values(), &[0]);
        assert_eq!(b.metadata, vec![0, 1]);
        let b = yma_deliver(&[0, 0], &lib, 1).unwrap();
        assert_eq!(b.payloads[0].1.values(), &[1]);
        assert!(man_place(3, 1, &lib).is_err());
    }
}
