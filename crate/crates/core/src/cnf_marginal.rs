//! Marginal ratio `R(C, x) = P(x=0) / P(x=1)` of a monotone CNF variable.
//!
//! [`marginal_truncated`] walks the computation tree down to an M-based depth
//! `L` and guesses [`TRUNCATION_GUESS`] at the cut. [`marginal_exact_recursive`]
//! runs the same recursion to the leaves in exact rational arithmetic.
//!
//! Within a group the children are evaluated in plan order and evaluation
//! stops at the first child whose ratio is exactly zero: the product is zero
//! regardless, and the later sibling instances would contain an empty clause.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{MonotoneCnf, VarId};
use crate::{NodeBudgetExceeded, CNF_ALPHA, DEFAULT_NODE_BUDGET, M_BASE, TRUNCATION_GUESS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("decay base must lie in (0, 1), got {0}")]
    Alpha(f64),
    #[error("M-based depth is fixed at M = 4, got {0}")]
    MBase(u32),
    #[error("node budget must be positive")]
    Budget,
}

/// Parameters of the truncated recursion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub alpha: f64,
    pub m_base: u32,
    pub node_budget: u64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            alpha: CNF_ALPHA,
            m_base: M_BASE,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl TruncationPolicy {
    pub fn new(alpha: f64, m_base: u32, node_budget: u64) -> Result<Self, PolicyError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(PolicyError::Alpha(alpha));
        }
        if m_base != M_BASE {
            return Err(PolicyError::MBase(m_base));
        }
        if node_budget == 0 {
            return Err(PolicyError::Budget);
        }
        Ok(TruncationPolicy {
            alpha,
            m_base,
            node_budget,
        })
    }

    pub fn with_budget(node_budget: u64) -> Self {
        TruncationPolicy {
            node_budget: node_budget.max(1),
            ..Self::default()
        }
    }
}

/// Result of one truncated marginal evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalRatio {
    pub value: f64,
    pub depth_used: u32,
    pub nodes_visited: u64,
    /// Whether some branch was cut at depth zero with the pivot still
    /// constrained. When false the value is the exact recursion in floats.
    pub truncated: bool,
}

/// `⌈log_4(w + 1)⌉`, the depth a group of width `w` consumes.
pub fn depth_decrement(w: usize) -> u32 {
    assert!(w >= 1, "depth_decrement needs a positive width");
    let target = w as u128 + 1;
    let mut k = 0;
    let mut pow: u128 = 1;
    while pow < target {
        pow *= u128::from(M_BASE);
        k += 1;
    }
    k
}

pub(crate) struct Walk {
    budget: u64,
    depth: u32,
    pub(crate) nodes: u64,
    pub(crate) truncated: bool,
}

impl Walk {
    pub(crate) fn new(budget: u64, depth: u32) -> Self {
        Walk {
            budget,
            depth,
            nodes: 0,
            truncated: false,
        }
    }

    #[inline]
    pub(crate) fn visit(&mut self) -> Result<(), NodeBudgetExceeded> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(NodeBudgetExceeded {
                budget: self.budget,
                depth: self.depth,
            });
        }
        Ok(())
    }
}

/// Truncated estimate `R(C, x, L)`.
///
/// The formula must contain no empty clause and `x` must be free.
pub fn marginal_truncated(
    formula: &MonotoneCnf,
    x: VarId,
    depth: u32,
    policy: &TruncationPolicy,
) -> Result<MarginalRatio, NodeBudgetExceeded> {
    debug_assert!(!formula.has_empty_clause());
    let mut walk = Walk::new(policy.node_budget, depth);
    let value = truncated(formula, x, depth, &mut walk)?;
    Ok(MarginalRatio {
        value,
        depth_used: depth,
        nodes_visited: walk.nodes,
        truncated: walk.truncated,
    })
}

fn truncated(c: &MonotoneCnf, x: VarId, depth: u32, walk: &mut Walk) -> Result<f64, NodeBudgetExceeded> {
    walk.visit()?;
    let occ = c.occurrences(x);
    if occ.iter().any(|&ci| c.clause(ci as usize).arity() == 1) {
        return Ok(0.0);
    }
    if occ.is_empty() {
        return Ok(1.0);
    }
    if depth == 0 {
        walk.truncated = true;
        return Ok(TRUNCATION_GUESS);
    }
    let plan = c.branch_plan(x);
    let mut ratio = 1.0;
    for (j, group) in plan.groups().iter().enumerate() {
        let child_depth = depth.saturating_sub(depth_decrement(group.width()));
        let mut base = plan.group_base(j);
        let mut inner = 1.0;
        for (i, &xi) in group.others.iter().enumerate() {
            let r = truncated(&base, xi, child_depth, walk)?;
            if r == 0.0 {
                inner = 0.0;
                break;
            }
            inner *= r / (1.0 + r);
            if i + 1 < group.others.len() {
                base = base
                    .pin_zero(xi)
                    .expect("nonzero ratio guarantees the zero pin is satisfiable");
            }
        }
        ratio *= 1.0 - inner;
    }
    Ok(ratio)
}

/// `R(C, x)` through the untruncated recursion, in exact rationals.
pub fn marginal_exact_recursive(
    formula: &MonotoneCnf,
    x: VarId,
    node_budget: u64,
) -> Result<BigRational, NodeBudgetExceeded> {
    debug_assert!(!formula.has_empty_clause());
    let mut walk = Walk::new(node_budget, u32::MAX);
    exact(formula, x, &mut walk)
}

fn exact(c: &MonotoneCnf, x: VarId, walk: &mut Walk) -> Result<BigRational, NodeBudgetExceeded> {
    walk.visit()?;
    let occ = c.occurrences(x);
    if occ.iter().any(|&ci| c.clause(ci as usize).arity() == 1) {
        return Ok(BigRational::zero());
    }
    if occ.is_empty() {
        return Ok(BigRational::one());
    }
    let plan = c.branch_plan(x);
    let one = BigRational::one();
    let mut ratio = BigRational::one();
    for (j, group) in plan.groups().iter().enumerate() {
        let mut base = plan.group_base(j);
        let mut inner = BigRational::one();
        for (i, &xi) in group.others.iter().enumerate() {
            let r = exact(&base, xi, walk)?;
            if r.is_zero() {
                inner = BigRational::zero();
                break;
            }
            let p = &r / (&one + &r);
            inner *= p;
            if i + 1 < group.others.len() {
                base = base
                    .pin_zero(xi)
                    .expect("nonzero ratio guarantees the zero pin is satisfiable");
            }
        }
        ratio *= &one - inner;
    }
    Ok(ratio)
}

/// Converts an exact ratio to the nearest double.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(v) = r.to_f64() {
        return v;
    }
    // fall back on scaled integer division for huge operands
    let shift = r.denom().bits().max(r.numer().bits()).saturating_sub(1000);
    let n: BigInt = r.numer() >> shift;
    let d: BigInt = r.denom() >> shift;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}
