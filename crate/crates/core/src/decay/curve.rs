//! Measured truncation error against the exact oracle, per depth.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf_marginal::{marginal_truncated, rational_to_f64, TruncationPolicy};
use crate::formula::{MonotoneCnf, VarId};
use crate::matching::{marginal_truncated_amo, AmoInstance};
use crate::oracle::{exact_marginal_amo, exact_marginal_cnf, OracleError, DEFAULT_ORACLE_CAP};
use crate::{NodeBudgetExceeded, AMO_ALPHA, CNF_ALPHA};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Budget(#[from] NodeBudgetExceeded),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub depth: u32,
    pub estimate: f64,
    pub error: f64,
    pub envelope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub exact: f64,
    pub points: Vec<DecayPoint>,
}

impl DecayCurve {
    pub fn within_envelope(&self) -> bool {
        self.points.iter().all(|p| p.error <= p.envelope)
    }
}

/// Proven envelope for the CNF truncation error at depth `l`:
/// `5√6 · 0.981^l`, or `2√6 · 0.981^l` when the pivot has degree at most 4.
pub fn cnf_envelope(l: u32, degree: usize) -> f64 {
    let c = if degree <= 4 { 2.0 } else { 5.0 };
    c * 6f64.sqrt() * CNF_ALPHA.powi(l as i32)
}

/// Proven envelope `4√6 · 0.99^l` for the at-most-one recursion.
pub fn amo_envelope(l: u32) -> f64 {
    4.0 * 6f64.sqrt() * AMO_ALPHA.powi(l as i32)
}

/// `|R(C, x, L) - R(C, x)|` for `L = 0..=l_max`.
pub fn empirical_decay_curve(
    formula: &MonotoneCnf,
    x: VarId,
    l_max: u32,
    node_budget: u64,
) -> Result<DecayCurve, CurveError> {
    let exact = rational_to_f64(exact_marginal_cnf(formula, x, DEFAULT_ORACLE_CAP)?.value());
    let policy = TruncationPolicy::with_budget(node_budget);
    let degree = formula.degree(x);
    let points = (0..=l_max)
        .map(|l| {
            let est = marginal_truncated(formula, x, l, &policy)?.value;
            Ok(DecayPoint {
                depth: l,
                estimate: est,
                error: (est - exact).abs(),
                envelope: cnf_envelope(l, degree),
            })
        })
        .collect::<Result<_, NodeBudgetExceeded>>()?;
    Ok(DecayCurve { exact, points })
}

/// As [`empirical_decay_curve`] for a normalised at-most-one instance.
pub fn empirical_decay_curve_amo(
    instance: &AmoInstance,
    x: VarId,
    l_max: u32,
    node_budget: u64,
) -> Result<DecayCurve, CurveError> {
    let exact = rational_to_f64(exact_marginal_amo(instance, x, DEFAULT_ORACLE_CAP)?.value());
    let points = (0..=l_max)
        .map(|l| {
            let est = marginal_truncated_amo(instance, x, l, node_budget)?.value;
            Ok(DecayPoint {
                depth: l,
                estimate: est,
                error: (est - exact).abs(),
                envelope: amo_envelope(l),
            })
        })
        .collect::<Result<_, NodeBudgetExceeded>>()?;
    Ok(DecayCurve { exact, points })
}
