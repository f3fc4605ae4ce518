//! Two-server private information retrieval.
//!
//! A scheme is described entirely by small integer indices: randomness
//! `r`, demand `d` (0-based message index), and queries `Q1`, `Q2` that
//! index each server's query table. Answers are linear, so a scheme hands
//! out the [`LinearForm`]s a server evaluates over the `N·F′` message
//! symbols (message `n`, symbol `j` at flat index `n·F′ + j`). Decoders are
//! linear as well: each output symbol is a combination of the concatenated
//! answers `A1 ++ A2`.

mod from_caching;
mod privacy_key;
mod tables;
mod time_share;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    parse_rational, AlgebraError, Gf, Layout, Library, LinearForm, Rational, SymbolVec,
};

pub use from_caching::{caching_to_pir, cyclic, CachingToPir};
pub use privacy_key::{pk_pir, PkPir};
pub use tables::{Signed4, Tsc2, Xor3};
pub use time_share::{time_share, TimeShared};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PirError {
    #[error("demand {d} out of range for {n} messages")]
    DemandOutOfRange { d: usize, n: usize },
    #[error("randomness {r} out of range (space size {size})")]
    RandomnessOutOfRange { r: usize, size: usize },
    #[error("query {q} out of range for server {server} (space size {size})")]
    QueryOutOfRange { server: usize, q: usize, size: usize },
    #[error("library does not match {n} messages of {len} symbols")]
    LibraryShape { n: usize, len: usize },
    #[error("answer lengths do not match the queries")]
    AnswerShape,
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("unknown PIR scheme id {0:?}")]
    BadId(String),
    #[error("demanded message is not recoverable from the answers")]
    NotDecodable,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Server {
    One,
    Two,
}

impl Server {
    pub const BOTH: [Server; 2] = [Server::One, Server::Two];

    pub fn number(self) -> usize {
        match self {
            Server::One => 1,
            Server::Two => 2,
        }
    }

    pub fn other(self) -> Server {
        match self {
            Server::One => Server::Two,
            Server::Two => Server::One,
        }
    }
}

/// Linear decoder: output symbol `j` is `rows[j]` applied to `A1 ++ A2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoder {
    pub a1_len: usize,
    pub a2_len: usize,
    pub rows: Vec<LinearForm>,
}

impl Decoder {
    pub fn apply(&self, gf: &Gf, a1: &[u32], a2: &[u32]) -> Result<Vec<u32>, PirError> {
        if a1.len() != self.a1_len || a2.len() != self.a2_len {
            return Err(PirError::AnswerShape);
        }
        let joined: Vec<u32> = a1.iter().chain(a2).copied().collect();
        Ok(self.rows.iter().map(|r| r.eval(&joined, gf)).collect())
    }
}

pub trait PirScheme: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    /// Number of messages N.
    fn messages(&self) -> usize;
    fn field(&self) -> Gf;
    /// Symbols per message F′.
    fn subpacketization(&self) -> usize;
    fn randomness_size(&self) -> usize;
    /// Sizes of the two query tables (N₁, N₂).
    fn query_space(&self) -> (usize, usize);
    /// Server-1 query; depends on the randomness only.
    fn query1(&self, r: usize) -> usize;
    fn query2(&self, d: usize, r: usize) -> usize;
    /// What a server returns for a query, as forms over the message symbols.
    fn answer_forms(&self, server: Server, query: usize) -> Vec<LinearForm>;
    fn decoder(&self, d: usize, r: usize) -> Result<Decoder, PirError>;
    /// Declared (R_D1, R_D2): expected answer symbols per message symbol.
    fn download_costs(&self) -> (Rational, Rational);

    fn describe_query(&self, server: Server, query: usize) -> String {
        render_forms(&self.answer_forms(server, query), self.messages(), self.subpacketization(), &self.field())
    }

    fn answer_len(&self, server: Server, query: usize) -> usize {
        self.answer_forms(server, query).len()
    }

    fn query_size(&self, server: Server) -> usize {
        match server {
            Server::One => self.query_space().0,
            Server::Two => self.query_space().1,
        }
    }

    /// True when every query to `server` gets an answer of the same length.
    fn fixed_length(&self, server: Server) -> bool {
        let n = self.query_size(server);
        let first = self.answer_len(server, 0);
        (1..n).all(|q| self.answer_len(server, q) == first)
    }

    fn message_layout(&self) -> Layout {
        Layout::new(self.messages(), 1, self.subpacketization())
    }
}

pub type SharedPir = Arc<dyn PirScheme>;

/// Renders answer forms as `W1+W2` (one symbol per message) or with
/// explicit symbol positions `W1[2]`.
pub fn render_forms(forms: &[LinearForm], n: usize, f: usize, gf: &Gf) -> String {
    if forms.is_empty() {
        return "0".to_string();
    }
    let parts: Vec<String> = forms
        .iter()
        .map(|form| {
            let mut s = String::new();
            for (k, &(idx, c)) in form.terms().iter().enumerate() {
                let (msg, j) = (idx / f, idx % f);
                debug_assert!(msg < n);
                let name = if f == 1 {
                    format!("W{}", msg + 1)
                } else {
                    format!("W{}[{}]", msg + 1, j + 1)
                };
                let neg = c == gf.modulus() - 1 && gf.modulus() > 2;
                if neg {
                    s.push('-');
                } else if k > 0 {
                    s.push('+');
                }
                if c != 1 && !neg {
                    s.push_str(&c.to_string());
                }
                s.push_str(&name);
            }
            if s.is_empty() {
                s.push('0');
            }
            s
        })
        .collect();
    parts.join(", ")
}

fn check_demand(scheme: &dyn PirScheme, d: usize) -> Result<(), PirError> {
    if d >= scheme.messages() {
        return Err(PirError::DemandOutOfRange {
            d,
            n: scheme.messages(),
        });
    }
    Ok(())
}

fn check_randomness(scheme: &dyn PirScheme, r: usize) -> Result<(), PirError> {
    if r >= scheme.randomness_size() {
        return Err(PirError::RandomnessOutOfRange {
            r,
            size: scheme.randomness_size(),
        });
    }
    Ok(())
}

/// The pair of queries a user with demand `d` and randomness `r` sends.
pub fn query_pair(scheme: &dyn PirScheme, d: usize, r: usize) -> Result<(usize, usize), PirError> {
    check_demand(scheme, d)?;
    check_randomness(scheme, r)?;
    Ok((scheme.query1(r), scheme.query2(d, r)))
}

/// A server's answer to `query` over a concrete library.
pub fn answer(scheme: &dyn PirScheme, server: Server, query: usize, library: &Library) -> Result<SymbolVec, PirError> {
    let size = scheme.query_size(server);
    if query >= size {
        return Err(PirError::QueryOutOfRange {
            server: server.number(),
            q: query,
            size,
        });
    }
    let gf = scheme.field();
    if library.layout().files != scheme.messages()
        || library.layout().file_len() != scheme.subpacketization()
        || library.modulus() != gf.modulus()
    {
        return Err(PirError::LibraryShape {
            n: scheme.messages(),
            len: scheme.subpacketization(),
        });
    }
    let values = scheme
        .answer_forms(server, query)
        .iter()
        .map(|f| f.eval(library.symbols(), &gf))
        .collect();
    Ok(SymbolVec::new(gf.modulus(), values)?)
}

/// Recovers the demanded message from the two answers.
pub fn decode(scheme: &dyn PirScheme, d: usize, r: usize, a1: &SymbolVec, a2: &SymbolVec) -> Result<SymbolVec, PirError> {
    check_demand(scheme, d)?;
    check_randomness(scheme, r)?;
    let gf = scheme.field();
    let out = scheme.decoder(d, r)?.apply(&gf, a1.values(), a2.values())?;
    Ok(SymbolVec::new(gf.modulus(), out)?)
}

/// One full execution of a PIR scheme.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PirTranscript {
    pub demand: usize,
    pub randomness: usize,
    pub q1: usize,
    pub q2: usize,
    pub a1: SymbolVec,
    pub a2: SymbolVec,
}

pub fn run(scheme: &dyn PirScheme, d: usize, r: usize, library: &Library) -> Result<PirTranscript, PirError> {
    let (q1, q2) = query_pair(scheme, d, r)?;
    Ok(PirTranscript {
        demand: d,
        randomness: r,
        q1,
        q2,
        a1: answer(scheme, Server::One, q1, library)?,
        a2: answer(scheme, Server::Two, q2, library)?,
    })
}

pub fn decode_transcript(scheme: &dyn PirScheme, t: &PirTranscript) -> Result<SymbolVec, PirError> {
    decode(scheme, t.demand, t.randomness, &t.a1, &t.a2)
}

/// Builds a scheme from its identifier:
/// `tsc2`, `xor3`, `signed4`, `pk:N:q`, `cc2pir:man:N:t`, each optionally
/// followed by `:ts:a/b` to time-share server roles with fraction `a/b`.
///
/// `q` overrides the field for the table schemes.
pub fn parse_pir(id: &str, q: Option<u32>) -> Result<SharedPir, PirError> {
    let bad = || PirError::BadId(id.to_string());
    let (base, mu) = match id.find(":ts:") {
        Some(pos) => (&id[..pos], Some(&id[pos + 4..])),
        None => (id, None),
    };
    let parts: Vec<&str> = base.split(':').collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let field = |default: u32| Gf::new(q.unwrap_or(default)).map_err(PirError::from);
    let scheme: SharedPir = match parts.as_slice() {
        ["tsc2"] => Arc::new(Tsc2::new(field(2)?)),
        ["xor3"] => Arc::new(Xor3::new(field(2)?)),
        ["signed4"] => Arc::new(Signed4::new(field(3)?)?),
        ["pk", n, qq] => {
            let qq = qq.parse::<u32>().map_err(|_| bad())?;
            Arc::new(pk_pir(num(n)?, qq)?)
        }
        ["cc2pir", "man", n, t] => Arc::new(caching_to_pir(
            Arc::new(crate::caching::Man::new(num(n)?, num(n)?, num(t)?, field(2)?, 1)?),
        )?),
        _ => return Err(bad()),
    };
    match mu {
        None => Ok(scheme),
        Some(m) => {
            let mu = parse_rational(m).map_err(|_| bad())?;
            time_share(scheme, &mu)
        }
    }
}

impl From<crate::caching::CachingError> for PirError {
    fn from(e: crate::caching::CachingError) -> Self {
        PirError::Unsupported(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_ids() {
        for (id, n, f) in [
            ("tsc2", 2, 1),
            ("xor3", 3, 1),
            ("signed4", 4, 1),
            ("pk:3:2", 3, 1),
            ("cc2pir:man:4:2", 4, 6),
            ("tsc2:ts:1/2", 2, 2),
        ] {
            let s = parse_pir(id, None).unwrap();
            assert_eq!(s.messages(), n, "{id}");
            assert_eq!(s.subpacketization(), f, "{id}");
        }
        for id in ["", "tsc3", "pk:3", "cc2pir:yma:3:1", "tsc2:ts:x"] {
            assert!(parse_pir(id, None).is_err(), "{id}");
        }
        assert!(parse_pir("signed4", Some(2)).is_err());
    }

    #[test]
    fn range_errors() {
        let s = Tsc2::new(Gf::new(2).unwrap());
        assert!(matches!(query_pair(&s, 2, 0), Err(PirError::DemandOutOfRange { .. })));
        assert!(matches!(query_pair(&s, 0, 2), Err(PirError::RandomnessOutOfRange { .. })));
        let lib = Library::from_index(s.field(), Layout::new(3, 1, 1), 0);
        assert!(matches!(answer(&s, Server::One, 1, &lib), Err(PirError::LibraryShape { .. })));
        let lib = Library::from_index(s.field(), s.message_layout(), 0);
        assert!(matches!(answer(&s, Server::Two, 5, &lib), Err(PirError::QueryOutOfRange { .. })));
    }

    #[test]
    fn render() {
        let gf = Gf::new(3).unwrap();
        let f = LinearForm::from_terms(&gf, [(0, -1), (1, -1), (2, 1), (3, 1)]);
        assert_eq!(render_forms(&[f], 4, 1, &gf), "-W1-W2+W3+W4");
        assert_eq!(render_forms(&[], 4, 1, &gf), "0");
    }
}
