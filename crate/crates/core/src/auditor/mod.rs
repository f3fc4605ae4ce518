//! Exhaustive verification of caching and PIR schemes.
//!
//! Every world (library realization, private randomness, demands) is
//! enumerated with uniform weight and folded into an exact
//! [`DistributionTable`](crate::algebra::DistributionTable); privacy claims
//! are then decided by exact factorization of that table.

mod fault;
mod pir_checks;
mod world;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::caching::CachingError;
use crate::pir::PirError;

pub use fault::{naive_pir, Fault, NaivePir};
pub use pir_checks::{
    check_pir_privacy, check_udiq, pir_correctness, pir_correctness_exhaustive, pir_correctness_symbolic,
    query_table, Correctness, PirPrivacy, Udiq,
};
pub use world::{audit, enumerate_worlds, AuditReport, Enumeration, Leakage, Measured, UserCheck, WorldSpec, DEFAULT_BUDGET};

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("{worlds} worlds exceed the budget of {budget}; reduce q, the symbol length, or K")]
    BudgetExceeded { worlds: String, budget: u128 },
    #[error("no leakage defined: the cache metadata of user {0} is deterministic")]
    DegenerateMetadata(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Pir(#[from] PirError),
    #[error(transparent)]
    Caching(#[from] CachingError),
}

/// Outcome of one check; `value` carries the offending quantity on failure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass() -> Self {
        Check {
            passed: true,
            value: None,
            detail: None,
        }
    }

    pub fn fail(detail: impl Into<String>) -> Self {
        Check {
            passed: false,
            value: None,
            detail: Some(detail.into()),
        }
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }
}
