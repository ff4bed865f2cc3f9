//! Exact-arithmetic toolkit for p-nilpotent restricted Lie algebras over small
//! finite fields F_{p^n} (p >= 5 for the classification entry points, n <= 3).
//!
//! The crate is organized bottom-up:
//!
//! * [`field`] — table-driven finite-field arithmetic, coset representatives,
//!   conic point counts;
//! * [`matrix`] — dense row-major matrices and echelon-form subspaces;
//! * [`liealg`] — Lie algebras by structure constants, series, quotients, and
//!   the small catalog of nilpotent base algebras;
//! * [`restricted`] — p-maps, Jacobson-sum verification, fingerprints, and
//!   exhaustive p-map enumeration;
//! * [`cohomology`] — restricted 2-cochains, Z²/B²/H² bases;
//! * [`extension`] — one-dimensional central extensions and their inverses;
//! * [`autorbit`] — automorphism families as expression patterns, orbit
//!   computations on cochain slices;
//! * [`isotest`] — isomorphism witnesses and the decision procedure;
//! * [`catalog`] — the classified 5-dimensional structures, witness fixtures,
//!   and orbit-lemma configurations;
//! * [`classify`] — family-level verification sweeps and brute-force oracles;
//! * [`report`] — deterministic verification reports.

pub mod autorbit;
pub mod catalog;
pub mod classify;
pub mod cohomology;
pub mod extension;
pub mod field;
pub mod isotest;
pub mod liealg;
pub mod matrix;
pub mod report;
pub mod restricted;

pub use field::{Fe, Field, FieldSpec};

/// Errors surfaced by fallible toolkit entry points. Programmer contract
/// violations (malformed dimensions, out-of-range indices) panic via `assert!`
/// instead.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Node/workload budget used by the search and enumeration routines, read once
/// from the `RLK_BUDGET` environment variable with a per-call default.
pub fn budget_from_env(default: u64) -> u64 {
    match std::env::var("RLK_BUDGET") {
        Ok(s) => s.trim().parse::<u64>().unwrap_or(default),
        Err(_) => default,
    }
}
