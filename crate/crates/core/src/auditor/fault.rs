//! Deliberate defects, used to show the checks can fail.

use serde::Serialize;

use crate::algebra::{rat, Gf, LinearForm, Rational};
use crate::pir::{Decoder, PirError, PirScheme, Server};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Adds 1 to the first broadcast symbol after encoding.
    CorruptPayload,
    /// Appends every user's cache metadata to the broadcast metadata.
    LeakQ1InMetadata,
}

/// Downloads the demanded message from server 2 in the clear.
#[derive(Clone, Debug)]
pub struct NaivePir {
    n: usize,
    gf: Gf,
}

pub fn naive_pir(n: usize, gf: Gf) -> NaivePir {
    NaivePir { n, gf }
}

impl PirScheme for NaivePir {
    fn name(&self) -> String {
        format!("naive:{}", self.n)
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
        1
    }

    fn query_space(&self) -> (usize, usize) {
        (1, self.n)
    }

    fn query1(&self, _r: usize) -> usize {
        0
    }

    fn query2(&self, d: usize, _r: usize) -> usize {
        d
    }

    fn answer_forms(&self, server: Server, query: usize) -> Vec<LinearForm> {
        match server {
            Server::One => Vec::new(),
            Server::Two => vec![LinearForm::unit(query)],
        }
    }

    fn decoder(&self, _d: usize, _r: usize) -> Result<Decoder, PirError> {
        Ok(Decoder {
            a1_len: 0,
            a2_len: 1,
            rows: vec![LinearForm::unit(0)],
        })
    }

    fn download_costs(&self) -> (Rational, Rational) {
        (rat(0, 1), rat(1, 1))
    }
}
