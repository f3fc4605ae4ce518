//! Table-driven schemes with one symbol per message.
//!
//! * [`Tsc2`]: two messages, server 1 answers nothing or `W1+W2`.
//! * [`Xor3`]: three messages, server 1 answers a pairwise sum.
//! * [`Signed4`]: four messages with ±1 coefficients (needs odd q).

use crate::algebra::{rat, Gf, LinearForm, Rational};

use super::{Decoder, PirError, PirScheme, Server};

#[derive(Clone, Debug)]
pub struct Tsc2 {
    gf: Gf,
}

impl Tsc2 {
    pub fn new(gf: Gf) -> Self {
        Tsc2 { gf }
    }
}

impl PirScheme for Tsc2 {
    fn name(&self) -> String {
        "tsc2".into()
    }

    fn messages(&self) -> usize {
        2
    }

    fn field(&self) -> Gf {
        self.gf
    }

    fn subpacketization(&self) -> usize {
        1
    }

    fn randomness_size(&self) -> usize {
        2
    }

    fn query_space(&self) -> (usize, usize) {
        (2, 2)
    }

    fn query1(&self, r: usize) -> usize {
        r
    }

    /// Q2 names the message server 2 sends: W_d when T=0, the other one when T=1.
    fn query2(&self, d: usize, r: usize) -> usize {
        (d + r) % 2
    }

    fn answer_forms(&self, server: Server, query: usize) -> Vec<LinearForm> {
        match (server, query) {
            (Server::One, 0) => Vec::new(),
            (Server::One, _) => vec![LinearForm::from_terms(&self.gf, [(0, 1), (1, 1)])],
            (Server::Two, m) => vec![LinearForm::unit(m)],
        }
    }

    fn decoder(&self, _d: usize, r: usize) -> Result<Decoder, PirError> {
        Ok(if r == 0 {
            Decoder {
                a1_len: 0,
                a2_len: 1,
                rows: vec![LinearForm::unit(0)],
            }
        } else {
            // W_d = A1 - A2
            Decoder {
                a1_len: 1,
                a2_len: 1,
                rows: vec![LinearForm::from_terms(&self.gf, [(0, 1), (1, -1)])],
            }
        })
    }

    fn download_costs(&self) -> (Rational, Rational) {
        (rat(1, 2), rat(1, 1))
    }
}

/// Server-2 message index for (T, d) in the three-message scheme.
const XOR3_Q2: [[usize; 3]; 3] = [[1, 0, 2], [2, 1, 0], [0, 2, 1]];
/// The pair of messages summed by server 1 for each T.
const XOR3_PAIRS: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];

#[derive(Clone, Debug)]
pub struct Xor3 {
    gf: Gf,
}

impl Xor3 {
    pub fn new(gf: Gf) -> Self {
        Xor3 { gf }
    }
}

impl PirScheme for Xor3 {
    fn name(&self) -> String {
        "xor3".into()
    }

    fn messages(&self) -> usize {
        3
    }

    fn field(&self) -> Gf {
        self.gf
    }

    fn subpacketization(&self) -> usize {
        1
    }

    fn randomness_size(&self) -> usize {
        3
    }

    fn query_space(&self) -> (usize, usize) {
        (3, 3)
    }

    fn query1(&self, r: usize) -> usize {
        r
    }

    fn query2(&self, d: usize, r: usize) -> usize {
        XOR3_Q2[r][d]
    }

    fn answer_forms(&self, server: Server, query: usize) -> Vec<LinearForm> {
        match server {
            Server::One => {
                let [a, b] = XOR3_PAIRS[query];
                vec![LinearForm::from_terms(&self.gf, [(a, 1), (b, 1)])]
            }
            Server::Two => vec![LinearForm::unit(query)],
        }
    }

    fn decoder(&self, d: usize, r: usize) -> Result<Decoder, PirError> {
        let row = if XOR3_Q2[r][d] == d {
            LinearForm::unit(1)
        } else {
            // server 2 sent the partner of W_d inside the server-1 sum
            LinearForm::from_terms(&self.gf, [(0, 1), (1, -1)])
        };
        Ok(Decoder {
            a1_len: 1,
            a2_len: 1,
            rows: vec![row],
        })
    }

    fn download_costs(&self) -> (Rational, Rational) {
        (rat(1, 1), rat(1, 1))
    }
}

/// Coefficients of the four server-1 forms.
const SIGNED4_S1: [[i64; 4]; 4] = [[1, 1, 1, 1], [-1, -1, 1, 1], [-1, 1, -1, 1], [-1, 1, 1, -1]];

#[derive(Clone, Debug)]
pub struct Signed4 {
    gf: Gf,
}

impl Signed4 {
    pub fn new(gf: Gf) -> Result<Self, PirError> {
        if gf.modulus() == 2 {
            return Err(PirError::Unsupported(
                "signed4 needs an odd field: -1 and +1 coincide over GF(2)".into(),
            ));
        }
        Ok(Signed4 { gf })
    }

    fn s1(i: usize) -> [i64; 4] {
        SIGNED4_S1[i]
    }

    /// Server-2 form `i`: -1 at position i, +1 elsewhere.
    fn s2(i: usize) -> [i64; 4] {
        let mut v = [1; 4];
        v[i] = -1;
        v
    }
}

impl PirScheme for Signed4 {
    fn name(&self) -> String {
        "signed4".into()
    }

    fn messages(&self) -> usize {
        4
    }

    fn field(&self) -> Gf {
        self.gf
    }

    fn subpacketization(&self) -> usize {
        1
    }

    fn randomness_size(&self) -> usize {
        4
    }

    fn query_space(&self) -> (usize, usize) {
        (4, 4)
    }

    fn query1(&self, r: usize) -> usize {
        r
    }

    fn query2(&self, d: usize, r: usize) -> usize {
        d ^ r
    }

    fn answer_forms(&self, server: Server, query: usize) -> Vec<LinearForm> {
        let coeffs = match server {
            Server::One => Self::s1(query),
            Server::Two => Self::s2(query),
        };
        vec![LinearForm::from_terms(&self.gf, coeffs.iter().enumerate().map(|(i, &c)| (i, c)))]
    }

    /// Either `A2 - A1` or `A2 + A1` collapses onto `2·W_d` (up to sign);
    /// pick that sign and divide by the surviving coefficient.
    fn decoder(&self, d: usize, r: usize) -> Result<Decoder, PirError> {
        let s = Self::s1(r);
        let u = Self::s2(self.query2(d, r));
        for sign in [-1i64, 1] {
            let v: Vec<i64> = (0..4).map(|i| u[i] + sign * s[i]).collect();
            let others_vanish = (0..4).all(|i| i == d || self.gf.from_i64(v[i]) == 0);
            let lead = self.gf.from_i64(v[d]);
            if others_vanish && lead != 0 {
                let inv = self.gf.inv(lead).expect("nonzero") as i64;
                return Ok(Decoder {
                    a1_len: 1,
                    a2_len: 1,
                    rows: vec![LinearForm::from_terms(&self.gf, [(0, sign * inv), (1, inv)])],
                });
            }
        }
        Err(PirError::NotDecodable)
    }

    fn download_costs(&self) -> (Rational, Rational) {
        (rat(1, 1), rat(1, 1))
    }
}
