//! Solvers for the proportionally fair matching problem on edge-colored
//! graphs: a matching is (alpha, beta)-balanced when every color's share of
//! the matching lies in `[alpha, beta]`.
//!
//! The crate provides the core data model ([`graph`]), an exact fixed-size
//! rainbow-matching subroutine ([`rainbow`]), greedy round-based
//! approximation solvers ([`approx`]), a color-coding exact solver
//! ([`exact`]), a brute-force oracle for small instances ([`oracle`]), and a
//! generator of adversarial path instances from 3SAT-3 formulas ([`reduce`]).

use thiserror::Error;

pub mod approx;
pub mod exact;
pub mod graph;
pub mod oracle;
pub mod rainbow;
pub mod reduce;

/// Exact rational used for all fairness bounds and balance comparisons.
/// Floats would misjudge instances where a color share must equal the bound.
pub type Rat = num_rational::Rational64;

pub use graph::{ColoredGraph, Edge, FairnessSpec, Matching, SolveReport};

/// Errors reported by solver and checker operations.
///
/// File-format problems have their own types ([`graph::ParseError`],
/// [`reduce::Sat3Error`]) so callers can surface line numbers.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("balance of an empty matching is undefined")]
    EmptyMatching,
    #[error("invalid fairness bounds: require 0 <= alpha <= beta <= 1")]
    InvalidSpec,
    #[error("edge index {index} out of range (graph has {num_edges} edges)")]
    EdgeIndexOutOfRange { index: usize, num_edges: usize },
    #[error("edge index {index} listed twice")]
    DuplicateEdgeIndex { index: usize },
    #[error("edges {a} and {b} share a vertex, not a matching")]
    EdgesShareVertex { a: usize, b: usize },
    #[error("alpha is zero; use solve_beta_limited for the upper-bound-only case")]
    AlphaIsZero,
    #[error("alpha is positive; use solve_alpha_positive instead")]
    AlphaIsPositive,
    #[error("oracle cap exceeded: {num_edges} edges, cap {cap}")]
    OracleCapExceeded { num_edges: usize, cap: usize },
    #[error("no fair matching of size {k} can exist: floor(beta * {k}) = 0")]
    BetaFloorZero { k: usize },
    #[error("matching does not satisfy the decode preconditions (balanced, size m+n-1)")]
    DecodePrecondition,
    #[error("decoded assignment fails a clause; the matching or layout is corrupted")]
    DecodeVerification,
}
