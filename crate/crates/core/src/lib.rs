//! Deterministic approximate counting by correlation decay.
//!
//! Two counting problems are covered:
//!
//! * satisfying assignments of read-5 monotone CNF formulas, which is the
//!   same as counting set covers whose sets have at most five elements;
//! * matchings of hypergraphs with maximum degree 4 and edges of size at
//!   most 3, through at-most-one constraint instances.
//!
//! Both go through the same scheme: a marginal ratio `P(x=0)/P(x=1)` is
//! estimated by a truncated computation tree, and the count is recovered by
//! pinning variables to one along a telescoping chain. An exhaustive oracle
//! ([`oracle`]) provides ground truth, and [`decay`] numerically checks the
//! decay-rate bounds the truncation error rests on.

pub mod cli;
pub mod cnf_marginal;
pub mod counter;
pub mod decay;
pub mod formula;
pub mod io;
pub mod matching;
pub mod oracle;

pub use cnf_marginal::{marginal_exact_recursive, marginal_truncated, MarginalRatio, TruncationPolicy};
pub use counter::{certified_depth_amo, certified_depth_cnf, count_cnf, count_matchings, CountMode, Estimate};
pub use formula::{Clause, FormulaError, MonotoneCnf, Pin, VarId};
pub use matching::{AmoInstance, Hypergraph};

/// Decay base for monotone CNF truncation.
pub const CNF_ALPHA: f64 = 0.981;

/// Decay base for at-most-one (matching) truncation.
pub const AMO_ALPHA: f64 = 0.99;

/// `M` of the M-based depth used by the CNF recursion.
pub const M_BASE: u32 = 4;

/// Value returned at a truncated (`L = 0`) leaf.
pub const TRUNCATION_GUESS: f64 = 1.0;

/// Default per-marginal cap on computation-tree nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

/// Error raised when a computation tree grows past its node budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("computation tree exceeded node budget of {budget} at depth {depth}")]
pub struct NodeBudgetExceeded {
    pub budget: u64,
    pub depth: u32,
}
