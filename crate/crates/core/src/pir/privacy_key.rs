//! The privacy-key scheme seen as a PIR: server 1 returns `p·W` for a random
//! key `p` whose entries sum to `q-1`, server 2 returns `(p + e_d)·W`.
//!
//! Keys are indexed by their first `N-1` coordinates in base q; the last
//! coordinate is fixed by the sum constraint. Server-2 queries (entries
//! summing to zero) are indexed the same way.

use crate::algebra::{rat, Gf, LinearForm, Rational};

use super::{Decoder, PirError, PirScheme, Server};

#[derive(Clone, Debug)]
pub struct PkPir {
    n: usize,
    gf: Gf,
    size: usize,
}

pub fn pk_pir(n: usize, q: u32) -> Result<PkPir, PirError> {
    let gf = Gf::new(q)?;
    if n < 1 {
        return Err(PirError::Unsupported("pk needs at least one message".into()));
    }
    let size = (q as usize)
        .checked_pow((n - 1) as u32)
        .ok_or_else(|| PirError::Unsupported("key space too large".into()))?;
    Ok(PkPir { n, gf, size })
}

impl PkPir {
    /// Coefficient vector whose first N-1 entries are the base-q digits of
    /// `index` and whose entries sum to `total`.
    fn vector(&self, index: usize, total: u32) -> Vec<u32> {
        let q = self.gf.modulus() as usize;
        let mut v = Vec::with_capacity(self.n);
        let mut rest = index;
        let mut sum = 0u32;
        for _ in 0..self.n - 1 {
            let digit = (rest % q) as u32;
            rest /= q;
            sum = self.gf.add(sum, digit);
            v.push(digit);
        }
        v.push(self.gf.sub(total, sum));
        v
    }

    fn index(&self, v: &[u32]) -> usize {
        let q = self.gf.modulus() as usize;
        v[..self.n - 1].iter().rev().fold(0, |acc, &x| acc * q + x as usize)
    }

    /// The key `p` drawn with randomness `r`.
    pub fn key(&self, r: usize) -> Vec<u32> {
        self.vector(r, self.gf.modulus() - 1)
    }
}

impl PirScheme for PkPir {
    fn name(&self) -> String {
        format!("pk:{}:{}", self.n, self.gf.modulus())
    }

    fn messages(&self) -> usize {
        self.n
    }

    fn field(&self) -> Gf {
        self.gf
    }

    fn subpacketization(&self) -> usize {
        1
    }

    fn randomness_size(&self) -> usize {
        self.size
    }

    fn query_space(&self) -> (usize, usize) {
        (self.size, self.size)
    }

    fn query1(&self, r: usize) -> usize {
        r
    }

    fn query2(&self, d: usize, r: usize) -> usize {
        let mut v = self.key(r);
        v[d] = self.gf.add(v[d], 1);
        self.index(&v)
    }

    fn answer_forms(&self, server: Server, query: usize) -> Vec<LinearForm> {
        let v = match server {
            Server::One => self.vector(query, self.gf.modulus() - 1),
            Server::Two => self.vector(query, 0),
        };
        vec![LinearForm::from_dense(&v)]
    }

    fn decoder(&self, _d: usize, _r: usize) -> Result<Decoder, PirError> {
        Ok(Decoder {
            a1_len: 1,
            a2_len: 1,
            rows: vec![LinearForm::from_terms(&self.gf, [(0, -1), (1, 1)])],
        })
    }

    fn download_costs(&self) -> (Rational, Rational) {
        (rat(1, 1), rat(1, 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pir::query_pair;

    #[test]
    fn key_space() {
        for (n, q, size) in [(2, 2, 2), (2, 3, 3), (3, 2, 4), (3, 3, 9)] {
            let s = pk_pir(n, q).unwrap();
            assert_eq!(s.randomness_size(), size);
            let gf = Gf::new(q).unwrap();
            for r in 0..size {
                let p = s.key(r);
                let sum = p.iter().fold(0, |a, &x| gf.add(a, x));
                assert_eq!(sum, q - 1);
                assert_eq!(s.query1(r), r);
            }
        }
    }

    #[test]
    fn examples() {
        // N=2, q=3, p=(0,2), d=1 -> Q2 = (1,2)
        let s = pk_pir(2, 3).unwrap();
        assert_eq!(s.key(0), vec![0, 2]);
        let (_, q2) = query_pair(&s, 0, 0).unwrap();
        assert_eq!(s.answer_forms(Server::Two, q2), vec![LinearForm::from_dense(&[1, 2])]);
        // N=2, q=2, p=(1,0), d=2 -> Q2 = (1,1)
        let s = pk_pir(2, 2).unwrap();
        assert_eq!(s.key(1), vec![1, 0]);
        let (_, q2) = query_pair(&s, 1, 1).unwrap();
        assert_eq!(s.answer_forms(Server::Two, q2), vec![LinearForm::from_dense(&[1, 1])]);
    }
}
