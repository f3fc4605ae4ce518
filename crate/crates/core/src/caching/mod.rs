//! Coded caching: the non-private MAN/YMA baseline, the virtual-users
//! private scheme, and private schemes composed from two-server PIR.
//!
//! Users, files and subsets are 0-based internally. Subfiles are indexed by
//! `t`-subsets of users in lexicographic order (see [`crate::algebra::subsets`]).

mod compose;
mod man;
mod plan;
mod tradeoff;
mod virtual_users;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraError, Gf, Layout, Library, Rational};
use crate::pir::{parse_pir, PirError};

pub use compose::{compose_deliver, compose_place, Composed};
pub use man::{man_deliver, man_place, yma_deliver, yma_leaders, Delivery, Man};
pub use plan::{
    Broadcast, CacheEntry, CachePlan, CacheState, DeliveryPlan, EntryLabel, Payload, Transcript, TranscriptCache,
    TranscriptPayload,
};
pub use tradeoff::{tradeoff_point_at, tradeoff_points, Generator};
pub use virtual_users::{vu_scheme, VirtualUsers};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CachingError {
    #[error("t={t} outside [0, {max}]")]
    BadT { t: usize, max: usize },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("library layout does not match the scheme")]
    LayoutMismatch,
    #[error("PIR scheme has {pir} messages, library has {n}")]
    PirMismatch { pir: usize, n: usize },
    #[error("unknown caching scheme id {0:?}")]
    BadId(String),
    #[error("PIR error: {0}")]
    Pir(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl From<PirError> for CachingError {
    fn from(e: PirError) -> Self {
        CachingError::Pir(e.to_string())
    }
}

/// A (possibly randomized) two-phase caching scheme.
///
/// Each user draws private randomness `r_k` uniformly from
/// `0..randomness_size()`; placement depends on it alone, delivery on all
/// randomness and the demand vector.
pub trait CachingScheme: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn files(&self) -> usize;
    fn users(&self) -> usize;
    fn field(&self) -> Gf;
    fn layout(&self) -> Layout;
    fn randomness_size(&self) -> usize;
    /// Number of distinct cache-metadata values.
    fn metadata_size(&self) -> usize;
    /// Alphabet size of each entry of the broadcast metadata vector.
    fn broadcast_metadata_radix(&self) -> usize;
    fn place(&self, user: usize, r: usize) -> CachePlan;
    fn deliver(&self, randomness: &[usize], demand: &[usize]) -> DeliveryPlan;
    /// The (M, R) the construction promises, in files.
    fn declared_memory_load(&self) -> (Rational, Rational);

    /// Symbols per file.
    fn file_len(&self) -> usize {
        self.layout().file_len()
    }
}

pub type SharedCaching = Arc<dyn CachingScheme>;

pub(crate) fn check_library(scheme: &dyn CachingScheme, library: &Library) -> Result<(), CachingError> {
    if library.layout() != scheme.layout() || library.modulus() != scheme.field().modulus() {
        return Err(CachingError::LayoutMismatch);
    }
    Ok(())
}

/// Evaluates placement and delivery for one world.
pub fn run(
    scheme: &dyn CachingScheme,
    library: &Library,
    randomness: &[usize],
    demand: &[usize],
) -> Result<(Vec<CacheState>, Broadcast), CachingError> {
    check_library(scheme, library)?;
    if randomness.len() != scheme.users() || demand.len() != scheme.users() {
        return Err(CachingError::BadParams("one randomness and one demand per user".into()));
    }
    if randomness.iter().any(|&r| r >= scheme.randomness_size()) || demand.iter().any(|&d| d >= scheme.files()) {
        return Err(CachingError::BadParams("randomness or demand out of range".into()));
    }
    let gf = scheme.field();
    let caches = (0..scheme.users())
        .map(|k| scheme.place(k, randomness[k]).evaluate(&gf, library))
        .collect();
    let broadcast = scheme.deliver(randomness, demand).evaluate(&gf, library);
    Ok((caches, broadcast))
}

/// Parameters shared by every scheme id.
#[derive(Clone, Copy, Debug)]
pub struct SchemeParams {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub q: Option<u32>,
    pub symbol_len: usize,
}

/// Builds a caching scheme from `man`, `yma`, `vu` or `compose:<pir id>`.
pub fn parse_caching(id: &str, p: SchemeParams) -> Result<SharedCaching, CachingError> {
    let gf = || Gf::new(p.q.unwrap_or(2)).map_err(CachingError::from);
    match id {
        "man" => Ok(Arc::new(Man::new(p.n, p.k, p.t, gf()?, p.symbol_len)?)),
        "yma" => Ok(Arc::new(Man::with_delivery(p.n, p.k, p.t, gf()?, p.symbol_len, Delivery::Yma)?)),
        "vu" => Ok(Arc::new(VirtualUsers::new(p.n, p.k, p.t, gf()?, p.symbol_len)?)),
        _ => match id.strip_prefix("compose:") {
            Some(pir_id) => {
                let pir = parse_pir(pir_id, p.q)?;
                Ok(Arc::new(Composed::new(p.n, p.k, p.t, pir)?))
            }
            None => Err(CachingError::BadId(id.to_string())),
        },
    }
}
