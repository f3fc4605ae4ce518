//! Demand- and cache-private caching by hiding each of the K real users
//! among N virtual users of a non-private (N, NK) subset scheme.
//!
//! User k picks a secret slot `S_k`; it caches what virtual user
//! `k·N + S_k` would. Delivery serves every virtual user of block k with
//! the demand vector `(0..N)` cyclically shifted by `C_k = S_k - d_k`,
//! announces `C`, and uses leader-based delivery.

use std::sync::Arc;

use crate::algebra::{binom, rat, rat_big, Gf, Layout, Library, Rational};

use super::{
    check_library, Broadcast, CachePlan, CacheState, CachingError, CachingScheme, Delivery, DeliveryPlan, Man,
};

#[derive(Clone, Debug)]
pub struct VirtualUsers {
    n: usize,
    k: usize,
    t: usize,
    inner: Arc<Man>,
}

impl VirtualUsers {
    pub fn new(n: usize, k: usize, t: usize, gf: Gf, sub_len: usize) -> Result<Self, CachingError> {
        if n == 0 || k == 0 {
            return Err(CachingError::BadParams("N and K must be positive".into()));
        }
        if t > n * k {
            return Err(CachingError::BadT { t, max: n * k });
        }
        let inner = Man::with_delivery(n, n * k, t, gf, sub_len, Delivery::Yma)?;
        Ok(VirtualUsers {
            n,
            k,
            t,
            inner: Arc::new(inner),
        })
    }

    /// `C_k = (S_k - d_k) mod N` for every user.
    pub fn shifts(&self, secrets: &[usize], demand: &[usize]) -> Vec<usize> {
        secrets
            .iter()
            .zip(demand)
            .map(|(&s, &d)| (s + self.n - d) % self.n)
            .collect()
    }

    /// Demand vector of all NK virtual users.
    pub fn virtual_demand(&self, shifts: &[usize]) -> Vec<usize> {
        shifts
            .iter()
            .flat_map(|&c| (0..self.n).map(move |j| (j + self.n - c) % self.n))
            .collect()
    }
}

impl CachingScheme for VirtualUsers {
    fn name(&self) -> String {
        "vu".into()
    }

    fn files(&self) -> usize {
        self.n
    }

    fn users(&self) -> usize {
        self.k
    }

    fn field(&self) -> Gf {
        self.inner.field()
    }

    fn layout(&self) -> Layout {
        self.inner.layout()
    }

    fn randomness_size(&self) -> usize {
        self.n
    }

    fn metadata_size(&self) -> usize {
        self.n
    }

    fn broadcast_metadata_radix(&self) -> usize {
        self.n
    }

    fn place(&self, user: usize, secret: usize) -> CachePlan {
        let mut plan = self.inner.place(user * self.n + secret, 0);
        plan.user = user;
        plan.metadata = secret;
        plan
    }

    fn deliver(&self, secrets: &[usize], demand: &[usize]) -> DeliveryPlan {
        let shifts = self.shifts(secrets, demand);
        let mut plan = self.inner.deliver(&[], &self.virtual_demand(&shifts));
        plan.metadata = shifts;
        plan
    }

    fn declared_memory_load(&self) -> (Rational, Rational) {
        let (nk, n, t) = ((self.n * self.k) as u64, self.n as u64, self.t as i64);
        let load = binom(nk, t + 1) - binom(nk - n, t + 1);
        (rat(self.t as i64, self.k as i64), rat_big(&load, &binom(nk, t)))
    }
}

/// Caches and broadcast for one choice of secrets and demands.
pub fn vu_scheme(
    k: usize,
    t: usize,
    library: &Library,
    secrets: &[usize],
    demand: &[usize],
) -> Result<(Vec<CacheState>, Broadcast), CachingError> {
    let l = library.layout();
    let vu = VirtualUsers::new(l.files, k, t, Gf::new(library.modulus())?, l.sub_len)?;
    check_library(&vu, library)?;
    super::run(&vu, library, secrets, demand)
}
