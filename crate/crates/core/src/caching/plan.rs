//! Symbolic cache and delivery plans, and their concrete evaluations.

use serde::Serialize;

use crate::algebra::{subset_label, Gf, Library, LinearForm, SymbolVec};

/// Where a cached block came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EntryLabel {
    /// Raw subfile `W_{file, subset}`.
    Subfile { file: usize, subset: Vec<usize> },
    /// Coded key block for a subset the user is not part of.
    Key { subset: Vec<usize> },
}

impl EntryLabel {
    pub fn render(&self) -> String {
        match self {
            EntryLabel::Subfile { file, subset } => format!("W{},{}", file + 1, subset_label(subset)),
            EntryLabel::Key { subset } => format!("key,{}", subset_label(subset)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub label: EntryLabel,
    pub forms: Vec<LinearForm>,
}

/// Everything user `user` stores, as forms over library symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CachePlan {
    pub user: usize,
    pub entries: Vec<CacheEntry>,
    /// The private metadata index kept alongside the content.
    pub metadata: usize,
}

impl CachePlan {
    pub fn forms(&self) -> impl Iterator<Item = &LinearForm> {
        self.entries.iter().flat_map(|e| e.forms.iter())
    }

    pub fn symbol_count(&self) -> usize {
        self.entries.iter().map(|e| e.forms.len()).sum()
    }

    pub fn evaluate(&self, gf: &Gf, library: &Library) -> CacheState {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let values = e.forms.iter().map(|f| f.eval(library.symbols(), gf)).collect();
                (e.label.clone(), SymbolVec::new(gf.modulus(), values).expect("field values"))
            })
            .collect();
        CacheState {
            user: self.user,
            entries,
            metadata: self.metadata,
        }
    }
}

/// Concrete content of one cache.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CacheState {
    pub user: usize,
    pub entries: Vec<(EntryLabel, SymbolVec)>,
    pub metadata: usize,
}

impl CacheState {
    /// Raw subfiles held, in placement order.
    pub fn man_part(&self) -> impl Iterator<Item = &(EntryLabel, SymbolVec)> {
        self.entries
            .iter()
            .filter(|(l, _)| matches!(l, EntryLabel::Subfile { .. }))
    }

    pub fn key_part(&self) -> impl Iterator<Item = &(EntryLabel, SymbolVec)> {
        self.entries.iter().filter(|(l, _)| matches!(l, EntryLabel::Key { .. }))
    }

    pub fn symbol_count(&self) -> usize {
        self.entries.iter().map(|(_, v)| v.len()).sum()
    }
}

/// One multicast message: the user subset it serves and its forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Payload {
    pub subset: Vec<usize>,
    pub forms: Vec<LinearForm>,
}

/// The server's transmission, symbolically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeliveryPlan {
    pub payloads: Vec<Payload>,
    /// Side information sent along with the payloads; not counted as load.
    pub metadata: Vec<usize>,
}

impl DeliveryPlan {
    pub fn forms(&self) -> impl Iterator<Item = &LinearForm> {
        self.payloads.iter().flat_map(|p| p.forms.iter())
    }

    pub fn symbol_count(&self) -> usize {
        self.payloads.iter().map(|p| p.forms.len()).sum()
    }

    pub fn evaluate(&self, gf: &Gf, library: &Library) -> Broadcast {
        Broadcast {
            payloads: self
                .payloads
                .iter()
                .map(|p| {
                    let values = p.forms.iter().map(|f| f.eval(library.symbols(), gf)).collect();
                    (p.subset.clone(), SymbolVec::new(gf.modulus(), values).expect("field values"))
                })
                .collect(),
            metadata: self.metadata.clone(),
        }
    }
}

/// Concrete broadcast: payloads in canonical subset order plus metadata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Broadcast {
    pub payloads: Vec<(Vec<usize>, SymbolVec)>,
    pub metadata: Vec<usize>,
}

impl Broadcast {
    pub fn symbol_count(&self) -> usize {
        self.payloads.iter().map(|(_, v)| v.len()).sum()
    }
}

/// JSON-friendly record of one execution, with 1-based users, files and subsets.
#[derive(Clone, Debug, Serialize)]
pub struct Transcript {
    pub scheme: String,
    pub demand: Vec<usize>,
    pub randomness: Vec<usize>,
    pub caches: Vec<TranscriptCache>,
    pub payloads: Vec<TranscriptPayload>,
    pub metadata: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TranscriptCache {
    pub user: usize,
    pub metadata: usize,
    pub entries: Vec<(String, Vec<u32>)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TranscriptPayload {
    pub subset: String,
    pub values: Vec<u32>,
}

impl Transcript {
    pub fn new(scheme: String, demand: &[usize], randomness: &[usize], caches: &[CacheState], broadcast: &Broadcast) -> Self {
        Transcript {
            scheme,
            demand: demand.iter().map(|d| d + 1).collect(),
            randomness: randomness.to_vec(),
            caches: caches
                .iter()
                .map(|c| TranscriptCache {
                    user: c.user + 1,
                    metadata: c.metadata,
                    entries: c
                        .entries
                        .iter()
                        .map(|(l, v)| (l.render(), v.values().to_vec()))
                        .collect(),
                })
                .collect(),
            payloads: broadcast
                .payloads
                .iter()
                .map(|(s, v)| TranscriptPayload {
                    subset: subset_label(s),
                    values: v.values().to_vec(),
                })
                .collect(),
            metadata: broadcast.metadata.clone(),
        }
    }
}
