//! PIR from a deterministic caching scheme with K = N users.
//!
//! The user picks a uniform user index `r` and asks server 1 for that
//! user's cache. Server 2 receives a cyclic shift `⟨r - θ⟩_N` and returns the
//! broadcast for the shifted demand vector `d(i) = ⟨i - shift⟩_N`, under
//! which user `r` demands exactly `θ`. Decoding is user `r`'s decoder.

use crate::algebra::{LinearForm, Membership, Rational, SpanSolver};
use crate::caching::SharedCaching;

use super::{Decoder, PirError, PirScheme, Server};

/// `⟨b⟩_a`: the representative of `b mod a` in `1..=a`.
pub fn cyclic(b: i64, a: i64) -> i64 {
    (b - 1).rem_euclid(a) + 1
}

#[derive(Clone, Debug)]
pub struct CachingToPir {
    cc: SharedCaching,
    n: usize,
}

pub fn caching_to_pir(cc: SharedCaching) -> Result<CachingToPir, PirError> {
    let n = cc.files();
    if cc.users() != n {
        return Err(PirError::Unsupported(format!(
            "caching scheme has K={} users but N={} files",
            cc.users(),
            n
        )));
    }
    if cc.randomness_size() != 1 {
        return Err(PirError::Unsupported("caching scheme must be deterministic".into()));
    }
    Ok(CachingToPir { cc, n })
}

impl CachingToPir {
    /// 1-based shift `⟨r - θ⟩_N` for 0-based user `r` and demand `θ`.
    pub fn shift(&self, theta: usize, r: usize) -> usize {
        cyclic(r as i64 - theta as i64, self.n as i64) as usize
    }

    /// 0-based demand vector announced for a 1-based shift.
    pub fn demand_for_shift(&self, shift: usize) -> Vec<usize> {
        (1..=self.n)
            .map(|i| cyclic(i as i64 - shift as i64, self.n as i64) as usize - 1)
            .collect()
    }

    pub fn caching(&self) -> &SharedCaching {
        &self.cc
    }
}

impl PirScheme for CachingToPir {
    fn name(&self) -> String {
        // With K = N the per-user memory equals t.
        let (m, _) = self.cc.declared_memory_load();
        format!("cc2pir:{}:{}:{}", self.cc.name(), self.n, m)
    }

    fn messages(&self) -> usize {
        self.n
    }

    fn field(&self) -> crate::algebra::Gf {
        self.cc.field()
    }

    fn subpacketization(&self) -> usize {
        self.cc.file_len()
    }

    fn randomness_size(&self) -> usize {
        self.n
    }

    fn query_space(&self) -> (usize, usize) {
        (self.n, self.n)
    }

    fn query1(&self, r: usize) -> usize {
        r
    }

    /// Queries are 0-based: index `s - 1` stands for shift `s`.
    fn query2(&self, d: usize, r: usize) -> usize {
        self.shift(d, r) - 1
    }

    fn answer_forms(&self, server: Server, query: usize) -> Vec<LinearForm> {
        match server {
            Server::One => self.cc.place(query, 0).forms().cloned().collect(),
            Server::Two => {
                let demand = self.demand_for_shift(query + 1);
                self.cc.deliver(&vec![0; self.n], &demand).forms().cloned().collect()
            }
        }
    }

    fn decoder(&self, d: usize, r: usize) -> Result<Decoder, PirError> {
        let a1 = self.answer_forms(Server::One, self.query1(r));
        let a2 = self.answer_forms(Server::Two, self.query2(d, r));
        let f = self.subpacketization();
        let mut solver = SpanSolver::new(self.field(), self.n * f);
        for form in a1.iter().chain(&a2) {
            solver.push(form, None)?;
        }
        let rows = (0..f)
            .map(|j| match solver.membership(&LinearForm::unit(d * f + j))? {
                Membership::InSpan { combination, .. } => Ok(combination),
                Membership::NotInSpan => Err(PirError::NotDecodable),
            })
            .collect::<Result<Vec<_>, PirError>>()?;
        Ok(Decoder {
            a1_len: a1.len(),
            a2_len: a2.len(),
            rows,
        })
    }

    /// The caching scheme's (M, R).
    fn download_costs(&self) -> (Rational, Rational) {
        self.cc.declared_memory_load()
    }

    fn describe_query(&self, server: Server, query: usize) -> String {
        match server {
            Server::One => format!("cache of user {}", query + 1),
            Server::Two => {
                let d: Vec<String> = self.demand_for_shift(query + 1).iter().map(|x| (x + 1).to_string()).collect();
                format!("broadcast for demands ({})", d.join(","))
            }
        }
    }
}
