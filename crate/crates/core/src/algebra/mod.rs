//! Finite fields, combinatorics, linear decoding, exact distributions and
//! tradeoff envelopes.

mod combin;
mod dist;
mod field;
mod library;
mod linear;
mod rational;

use thiserror::Error;

pub use combin::{binom, binom_usize, subset_label, subset_rank, subsets};
pub use dist::{conditional_entropy, entropy, mutual_information_zero, DistributionTable, MiVerdict, Variable};
pub use field::{gf_ops, FieldElement, Gf, GfOp};
pub use library::{Layout, Library};
pub use linear::{span_solve, LinearForm, Membership, SpanSolver, SymbolVec};
pub use rational::{
    as_string, big_as_string, envelope_at, fmt_rational, lower_convex_envelope, parse_rational, rat, rat_big,
    rat_int, Rational, TradeoffPoint,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("modulus {0} is not a supported prime")]
    NotPrime(u32),
    #[error("value {value} is outside GF({modulus})")]
    OutOfField { value: u32, modulus: u32 },
    #[error("operands live in different fields (q={0} and q={1})")]
    ModulusMismatch(u32, u32),
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
    #[error("known equation {row} contradicts earlier ones")]
    Inconsistent { row: usize },
    #[error("coefficient index {index} exceeds ambient dimension {dim}")]
    DimensionMismatch { index: usize, dim: usize },
    #[error("known values must all be present with one common length")]
    ValueShape,
    #[error("library has {got} symbols, layout expects {expected}")]
    LibraryShape { expected: usize, got: usize },
    #[error("joint value space does not fit a 128-bit row code")]
    TableTooWide,
    #[error("tables with different schemas cannot be merged")]
    SchemaMismatch,
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("variable sets must be disjoint and X, Y nonempty")]
    OverlappingVariables,
    #[error("envelope of an empty point set")]
    EmptyInput,
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
}
