//! Time sharing between a scheme and its role-swapped mirror.
//!
//! With `μ1 = a/b`, every message is cut into `b` blocks of the base
//! length. Blocks `0..a` run the base scheme as-is; blocks `a..b` run it
//! with the two servers exchanged. For the swapped part, the randomness
//! is drawn directly as the base server-2 query `b2`, so the new server-1
//! query still depends on randomness only; the base randomness is then
//! recovered as the unique `r2` with `Q2(d, r2) = b2`, which needs
//! `r -> Q2(d, r)` to be a bijection for every demand.

use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{rat, LinearForm, Rational};

use super::{Decoder, PirError, PirScheme, Server, SharedPir};

#[derive(Debug)]
pub struct TimeShared {
    base: SharedPir,
    a: usize,
    b: usize,
    /// `inverse[d][b2]` is the base randomness with `Q2(d, r) = b2`.
    inverse: Vec<Vec<usize>>,
}

/// Wraps `base` with server-1 fraction `mu1`; `mu1 = 1` returns `base` itself.
pub fn time_share(base: SharedPir, mu1: &Rational) -> Result<SharedPir, PirError> {
    if mu1.is_negative() || mu1 > &Rational::one() {
        return Err(PirError::Unsupported(format!("time-sharing weight {mu1} outside [0,1]")));
    }
    if mu1.is_one() {
        return Ok(base);
    }
    let a = mu1.numer().to_usize().expect("small numerator");
    let b = mu1.denom().to_usize().expect("small denominator");
    let (_, n2) = base.query_space();
    if base.randomness_size() != n2 {
        return Err(PirError::Unsupported(format!(
            "{}: role swap needs |randomness| = |Q2|",
            base.name()
        )));
    }
    let mut inverse = Vec::with_capacity(base.messages());
    for d in 0..base.messages() {
        let mut inv = vec![usize::MAX; n2];
        for r in 0..base.randomness_size() {
            let q = base.query2(d, r);
            if inv[q] != usize::MAX {
                return Err(PirError::Unsupported(format!(
                    "{}: server-2 query is not a bijection of the randomness",
                    base.name()
                )));
            }
            inv[q] = r;
        }
        inverse.push(inv);
    }
    Ok(Arc::new(TimeShared { base, a, b, inverse }))
}

impl TimeShared {
    fn split1(&self, r: usize) -> (usize, usize) {
        let size = self.base.randomness_size();
        (r % size, r / size)
    }

    /// Moves base message symbol `(n, j)` into block `block`.
    fn block_map(&self, block: usize) -> impl Fn(usize) -> usize {
        let f = self.base.subpacketization();
        let total = f * self.b;
        move |i| (i / f) * total + block * f + i % f
    }

    fn blocks(&self, server: Server, query: usize) -> Vec<(Server, usize)> {
        let (n1, n2) = self.base.query_space();
        let (own, swapped) = match server {
            Server::One => ((Server::One, query % n1), (Server::Two, query / n1)),
            Server::Two => ((Server::Two, query % n2), (Server::One, query / n2)),
        };
        (0..self.b).map(|i| if i < self.a { own } else { swapped }).collect()
    }
}

impl PirScheme for TimeShared {
    fn name(&self) -> String {
        format!("{}:ts:{}/{}", self.base.name(), self.a, self.b)
    }

    fn messages(&self) -> usize {
        self.base.messages()
    }

    fn field(&self) -> crate::algebra::Gf {
        self.base.field()
    }

    fn subpacketization(&self) -> usize {
        self.base.subpacketization() * self.b
    }

    fn randomness_size(&self) -> usize {
        self.base.randomness_size() * self.base.query_space().1
    }

    fn query_space(&self) -> (usize, usize) {
        let (n1, n2) = self.base.query_space();
        (n1 * n2, n2 * n1)
    }

    fn query1(&self, r: usize) -> usize {
        let (r1, b2) = self.split1(r);
        self.base.query1(r1) + self.base.query_space().0 * b2
    }

    fn query2(&self, d: usize, r: usize) -> usize {
        let (r1, b2) = self.split1(r);
        let r2 = self.inverse[d][b2];
        self.base.query2(d, r1) + self.base.query_space().1 * self.base.query1(r2)
    }

    fn answer_forms(&self, server: Server, query: usize) -> Vec<LinearForm> {
        let mut out = Vec::new();
        for (block, (s, q)) in self.blocks(server, query).into_iter().enumerate() {
            let map = self.block_map(block);
            out.extend(self.base.answer_forms(s, q).iter().map(|f| f.remap(&map)));
        }
        out
    }

    fn decoder(&self, d: usize, r: usize) -> Result<Decoder, PirError> {
        let gf = self.field();
        let (r1, b2) = self.split1(r);
        let r2 = self.inverse[d][b2];
        let q1 = self.query1(r);
        let q2 = self.query2(d, r);
        let lens1: Vec<usize> = self.blocks(Server::One, q1).iter().map(|&(s, q)| self.base.answer_len(s, q)).collect();
        let lens2: Vec<usize> = self.blocks(Server::Two, q2).iter().map(|&(s, q)| self.base.answer_len(s, q)).collect();
        let a1_len: usize = lens1.iter().sum();
        let a2_len: usize = lens2.iter().sum();
        let f = self.base.subpacketization();
        let mut rows = vec![LinearForm::zero(); f * self.b];
        let (mut off1, mut off2) = (0, a1_len);
        for block in 0..self.b {
            let swapped = block >= self.a;
            let dec = self.base.decoder(d, if swapped { r2 } else { r1 })?;
            // base A1 comes from the server answering the base server-1 query
            let (base1, base2) = if swapped { (off2, off1) } else { (off1, off2) };
            let split = dec.a1_len;
            for (j, row) in dec.rows.iter().enumerate() {
                rows[block * f + j] = row.remap_any(&gf, |k| if k < split { base1 + k } else { base2 + k - split });
            }
            off1 += lens1[block];
            off2 += lens2[block];
        }
        Ok(Decoder { a1_len, a2_len, rows })
    }

    fn download_costs(&self) -> (Rational, Rational) {
        let (c1, c2) = self.base.download_costs();
        let mu1 = rat(self.a as i64, self.b as i64);
        let mu2 = rat(1, 1) - &mu1;
        if mu1.is_zero() {
            return (c2, c1);
        }
        (&mu1 * &c1 + &mu2 * &c2, &mu1 * &c2 + &mu2 * &c1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pir::parse_pir;

    #[test]
    fn identity_and_costs() {
        let base = parse_pir("tsc2", None).unwrap();
        let same = time_share(base.clone(), &rat(1, 1)).unwrap();
        assert!(Arc::ptr_eq(&base, &same));
        let half = time_share(base.clone(), &rat(1, 2)).unwrap();
        assert_eq!(half.download_costs(), (rat(3, 4), rat(3, 4)));
        assert_eq!(half.subpacketization(), 2);
        let swapped = time_share(base, &rat(0, 1)).unwrap();
        assert_eq!(swapped.download_costs(), (rat(1, 1), rat(1, 2)));
        let s4 = time_share(parse_pir("signed4", None).unwrap(), &rat(1, 3)).unwrap();
        assert_eq!(s4.download_costs(), (rat(1, 1), rat(1, 1)));
        assert!(time_share(parse_pir("xor3", None).unwrap(), &rat(3, 2)).is_err());
    }

    #[test]
    fn server1_query_ignores_demand() {
        let s = time_share(parse_pir("xor3", None).unwrap(), &rat(2, 3)).unwrap();
        for r in 0..s.randomness_size() {
            let q = s.query1(r);
            assert!(q < s.query_space().0);
        }
    }
}
