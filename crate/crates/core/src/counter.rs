//! Telescoping counter `Z = ∏ (1 + R(C_i, x_i))` over the chain
//! `C_1 = C`, `C_{i+1} = C_i` with `x_i` pinned to one.
//!
//! Variables are taken in ascending order. Variables that are already pinned
//! contribute a factor of one and are left out of the factor trace.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cnf_marginal::{marginal_exact_recursive, marginal_truncated, MarginalRatio, TruncationPolicy};
use crate::formula::{MonotoneCnf, VarId};
use crate::matching::{marginal_exact_amo, marginal_truncated_amo, AmoInstance};
use crate::{NodeBudgetExceeded, AMO_ALPHA, CNF_ALPHA};

/// Largest depth the adaptive mode will try before giving up on convergence.
pub const ADAPTIVE_MAX_DEPTH: u32 = 1 << 12;

/// How the truncation depth is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CountMode {
    /// Depth from the provable error bound for relative error `epsilon`.
    Certified { epsilon: f64 },
    /// Fixed depth.
    Heuristic { depth: u32 },
    /// Depth doubled from 1 until the estimate moves by less than `tol / 4`
    /// over two consecutive doublings.
    Adaptive { tol: f64 },
}

impl CountMode {
    pub fn name(&self) -> &'static str {
        match self {
            CountMode::Certified { .. } => "certified",
            CountMode::Heuristic { .. } => "heuristic",
            CountMode::Adaptive { .. } => "adaptive",
        }
    }
}

/// Log-domain count estimate with its factor trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    /// `ln Z`; negative infinity for an unsatisfiable instance.
    pub log_count: f64,
    /// `(x_i, 1 + R(C_i, x_i, L))` in chain order.
    pub factors: Vec<(VarId, f64)>,
    pub depth: u32,
    pub mode: CountMode,
    pub epsilon: Option<f64>,
    pub nodes_visited: u64,
    /// False when adaptive mode stopped on the node budget or depth cap
    /// before the stopping rule fired.
    pub converged: bool,
    /// Whether any marginal hit a depth-zero cut. When false the estimate is
    /// the exact recursion evaluated in floating point.
    pub truncated: bool,
}

impl Estimate {
    fn unsatisfiable(mode: CountMode) -> Self {
        Estimate {
            log_count: f64::NEG_INFINITY,
            factors: Vec::new(),
            depth: 0,
            mode,
            epsilon: epsilon_of(mode),
            nodes_visited: 0,
            converged: true,
            truncated: false,
        }
    }

    pub fn count(&self) -> f64 {
        self.log_count.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.log_count == f64::NEG_INFINITY
    }
}

fn epsilon_of(mode: CountMode) -> Option<f64> {
    match mode {
        CountMode::Certified { epsilon } => Some(epsilon),
        CountMode::Adaptive { tol } => Some(tol),
        CountMode::Heuristic { .. } => None,
    }
}

fn certified_depth(n: usize, epsilon: f64, constant: f64, alpha: f64) -> u32 {
    assert!(n >= 1, "certified depth needs at least one variable");
    assert!(epsilon > 0.0, "epsilon must be positive");
    let l = ((epsilon / (constant * 6f64.sqrt() * n as f64)).ln() / alpha.ln()).ceil();
    if l <= 0.0 {
        0
    } else {
        l as u32
    }
}

/// `⌈ln(ε / (10√6 n)) / ln 0.981⌉`, clamped at zero.
pub fn certified_depth_cnf(n: usize, epsilon: f64) -> u32 {
    certified_depth(n, epsilon, 10.0, CNF_ALPHA)
}

/// `⌈ln(ε / (8√6 n)) / ln 0.99⌉`, clamped at zero.
pub fn certified_depth_amo(n: usize, epsilon: f64) -> u32 {
    certified_depth(n, epsilon, 8.0, AMO_ALPHA)
}

/// Instances that support the telescoping chain.
pub trait SelfReducible: Clone + Send + Sync {
    fn n_vars(&self) -> usize;
    fn is_free(&self, x: VarId) -> bool;
    fn pin_one(&self, x: VarId) -> Self;
    fn ratio_truncated(&self, x: VarId, depth: u32, node_budget: u64) -> Result<MarginalRatio, NodeBudgetExceeded>;
    fn ratio_exact(&self, x: VarId, node_budget: u64) -> Result<BigRational, NodeBudgetExceeded>;
}

impl SelfReducible for MonotoneCnf {
    fn n_vars(&self) -> usize {
        MonotoneCnf::n_vars(self)
    }

    fn is_free(&self, x: VarId) -> bool {
        MonotoneCnf::is_free(self, x)
    }

    fn pin_one(&self, x: VarId) -> Self {
        MonotoneCnf::pin_one(self, x)
    }

    fn ratio_truncated(&self, x: VarId, depth: u32, node_budget: u64) -> Result<MarginalRatio, NodeBudgetExceeded> {
        marginal_truncated(self, x, depth, &TruncationPolicy::with_budget(node_budget))
    }

    fn ratio_exact(&self, x: VarId, node_budget: u64) -> Result<BigRational, NodeBudgetExceeded> {
        marginal_exact_recursive(self, x, node_budget)
    }
}

impl SelfReducible for AmoInstance {
    fn n_vars(&self) -> usize {
        AmoInstance::n_vars(self)
    }

    fn is_free(&self, x: VarId) -> bool {
        AmoInstance::is_free(self, x)
    }

    fn pin_one(&self, x: VarId) -> Self {
        AmoInstance::pin_one(self, x)
    }

    fn ratio_truncated(&self, x: VarId, depth: u32, node_budget: u64) -> Result<MarginalRatio, NodeBudgetExceeded> {
        marginal_truncated_amo(self, x, depth, node_budget)
    }

    fn ratio_exact(&self, x: VarId, node_budget: u64) -> Result<BigRational, NodeBudgetExceeded> {
        marginal_exact_amo(self, x, node_budget)
    }
}

/// `(x_i, C_i)` for every variable still free when its turn comes, in the
/// given order.
pub fn chain<I: SelfReducible>(instance: &I, order: &[VarId]) -> Vec<(VarId, I)> {
    let mut out = Vec::with_capacity(order.len());
    let mut current = instance.clone();
    for &x in order {
        if !current.is_free(x) {
            continue;
        }
        let next = current.pin_one(x);
        out.push((x, current));
        current = next;
    }
    out
}

fn ascending(n: usize) -> Vec<VarId> {
    (0..n as u32).map(VarId).collect()
}

struct Pass {
    log_count: f64,
    factors: Vec<(VarId, f64)>,
    nodes: u64,
    truncated: bool,
}

fn run_pass<I: SelfReducible>(links: &[(VarId, I)], depth: u32, node_budget: u64) -> Result<Pass, NodeBudgetExceeded> {
    let ratios: Vec<MarginalRatio> = links
        .par_iter()
        .map(|(x, inst)| inst.ratio_truncated(*x, depth, node_budget))
        .collect::<Result<_, _>>()?;
    let mut log_count = 0.0;
    let mut nodes = 0;
    let mut truncated = false;
    let mut factors = Vec::with_capacity(links.len());
    for ((x, _), r) in links.iter().zip(&ratios) {
        let f = 1.0 + r.value;
        log_count += f.ln();
        nodes += r.nodes_visited;
        truncated |= r.truncated;
        factors.push((*x, f));
    }
    Ok(Pass {
        log_count,
        factors,
        nodes,
        truncated,
    })
}

fn relative_change(a: f64, b: f64) -> f64 {
    ((a - b).exp() - 1.0).abs()
}

fn estimate<I: SelfReducible>(
    instance: &I,
    mode: CountMode,
    node_budget: u64,
    certified: fn(usize, f64) -> u32,
) -> Result<Estimate, NodeBudgetExceeded> {
    let links = chain(instance, &ascending(instance.n_vars()));
    let finish = |pass: Pass, depth: u32, nodes: u64, converged: bool| Estimate {
        log_count: pass.log_count,
        factors: pass.factors,
        depth,
        mode,
        epsilon: epsilon_of(mode),
        nodes_visited: nodes,
        converged,
        truncated: pass.truncated,
    };
    match mode {
        CountMode::Certified { epsilon } => {
            let depth = certified(instance.n_vars().max(1), epsilon);
            let pass = run_pass(&links, depth, node_budget)?;
            let nodes = pass.nodes;
            Ok(finish(pass, depth, nodes, true))
        }
        CountMode::Heuristic { depth } => {
            let pass = run_pass(&links, depth, node_budget)?;
            let nodes = pass.nodes;
            Ok(finish(pass, depth, nodes, true))
        }
        CountMode::Adaptive { tol } => {
            let mut history: Vec<f64> = Vec::new();
            let mut total_nodes = 0u64;
            let mut last: Option<(Pass, u32)> = None;
            let mut depth = 1u32;
            loop {
                let pass = match run_pass(&links, depth, node_budget) {
                    Ok(p) => p,
                    Err(e) => {
                        return match last {
                            Some((p, d)) => Ok(finish(p, d, total_nodes, false)),
                            None => Err(e),
                        }
                    }
                };
                total_nodes += pass.nodes;
                history.push(pass.log_count);
                let k = history.len();
                let settled = k >= 3
                    && relative_change(history[k - 1], history[k - 2]) < tol / 4.0
                    && relative_change(history[k - 2], history[k - 3]) < tol / 4.0;
                if !pass.truncated || settled {
                    return Ok(finish(pass, depth, total_nodes, true));
                }
                if depth >= ADAPTIVE_MAX_DEPTH {
                    return Ok(finish(pass, depth, total_nodes, false));
                }
                last = Some((pass, depth));
                depth *= 2;
            }
        }
    }
}

/// Approximate model count of a monotone CNF. An empty clause gives `Z = 0`.
pub fn count_cnf(formula: &MonotoneCnf, mode: CountMode, node_budget: u64) -> Result<Estimate, NodeBudgetExceeded> {
    if formula.has_empty_clause() {
        return Ok(Estimate::unsatisfiable(mode));
    }
    estimate(formula, mode, node_budget, certified_depth_cnf)
}

/// Approximate count of satisfying assignments of an at-most-one instance
/// (matchings, for instances built from a hypergraph). The instance is
/// normalised first; an unsatisfiable one gives `Z = 0`.
pub fn count_matchings(instance: &AmoInstance, mode: CountMode, node_budget: u64) -> Result<Estimate, NodeBudgetExceeded> {
    match instance.normalize() {
        Ok(norm) => estimate(&norm, mode, node_budget, certified_depth_amo),
        Err(_) => Ok(Estimate::unsatisfiable(mode)),
    }
}

/// `∏ (1 + R(C_i, x_i))` with exact marginals along the chain in `order`.
/// Variables missing from `order` must be pinned already.
pub fn telescoping_exact<I: SelfReducible>(
    instance: &I,
    order: &[VarId],
    node_budget: u64,
) -> Result<BigRational, NodeBudgetExceeded> {
    let links = chain(instance, order);
    let ratios: Vec<BigRational> = links
        .par_iter()
        .map(|(x, inst)| inst.ratio_exact(*x, node_budget))
        .collect::<Result<_, _>>()?;
    let one = BigRational::one();
    Ok(ratios.iter().fold(BigRational::one(), |acc, r| acc * (&one + r)))
}

/// Exact count of a monotone CNF through the chain in ascending order.
pub fn count_cnf_exact(formula: &MonotoneCnf, node_budget: u64) -> Result<BigRational, NodeBudgetExceeded> {
    if formula.has_empty_clause() {
        return Ok(BigRational::zero());
    }
    telescoping_exact(formula, &ascending(formula.n_vars()), node_budget)
}

/// Exact count of an at-most-one instance through the chain.
pub fn count_matchings_exact(instance: &AmoInstance, node_budget: u64) -> Result<BigRational, NodeBudgetExceeded> {
    match instance.normalize() {
        Ok(norm) => telescoping_exact(&norm, &ascending(norm.n_vars()), node_budget),
        Err(_) => Ok(BigRational::from_integer(BigInt::zero())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{from_hypergraph, Hypergraph};

    fn cnf(n: usize, clauses: &[&[u32]]) -> MonotoneCnf {
        MonotoneCnf::new(
            n,
            clauses
                .iter()
                .map(|c| c.iter().map(|&i| VarId(i)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn certified_depths() {
        assert_eq!(certified_depth_cnf(10, 0.1), 407);
        assert_eq!(certified_depth_amo(10, 0.1), 755);
        assert!(certified_depth_cnf(100, 0.1) > certified_depth_cnf(10, 0.1));
        assert_eq!(certified_depth_cnf(1, 0.9995 * 10.0 * 6f64.sqrt()), 1);
        assert_eq!(certified_depth_cnf(1, 30.0), 0);
    }

    #[test]
    fn exact_chain_examples() {
        assert_eq!(count_cnf_exact(&MonotoneCnf::empty(3), 100).unwrap(), int(8));
        assert_eq!(count_cnf_exact(&cnf(2, &[&[0, 1]]), 100).unwrap(), int(3));
        assert_eq!(count_cnf_exact(&cnf(3, &[&[0, 1], &[0, 2]]), 100).unwrap(), int(5));
        assert_eq!(count_cnf_exact(&cnf(3, &[&[0, 1], &[1, 2], &[0, 2]]), 100).unwrap(), int(4));
    }

    #[test]
    fn order_does_not_matter_for_exact_chain() {
        let c = cnf(4, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
        let orders = [[0u32, 1, 2, 3], [3, 1, 0, 2], [2, 3, 1, 0]];
        for o in orders {
            let order: Vec<VarId> = o.iter().map(|&i| VarId(i)).collect();
            assert_eq!(telescoping_exact(&c, &order, 1000).unwrap(), int(7));
        }
    }

    #[test]
    fn empty_formula_estimate() {
        let e = count_cnf(&MonotoneCnf::empty(3), CountMode::Heuristic { depth: 3 }, 100).unwrap();
        assert!((e.log_count - 8f64.ln()).abs() < 1e-12);
        assert_eq!(e.factors.len(), 3);
    }

    #[test]
    fn adaptive_stops_once_untruncated() {
        let c = cnf(3, &[&[0, 1], &[0, 2]]);
        let e = count_cnf(&c, CountMode::Adaptive { tol: 0.01 }, 1000).unwrap();
        assert!(e.converged && !e.truncated);
        assert!((e.count() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn empty_clause_counts_zero() {
        let c = MonotoneCnf::new(2, vec![vec![VarId(0), VarId(1)], vec![]]).unwrap();
        let e = count_cnf(&c, CountMode::Adaptive { tol: 0.01 }, 100).unwrap();
        assert!(e.is_zero());
        assert!(count_cnf_exact(&c, 100).unwrap().is_zero());
    }

    #[test]
    fn matching_fixtures() {
        let path = from_hypergraph(&Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap());
        assert_eq!(count_matchings_exact(&path, 1000).unwrap(), int(3));
        let tri = from_hypergraph(&Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap());
        assert_eq!(count_matchings_exact(&tri, 1000).unwrap(), int(4));
        let edge = from_hypergraph(&Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap());
        assert_eq!(count_matchings_exact(&edge, 1000).unwrap(), int(2));
        let free = AmoInstance::unpinned(4, vec![]).unwrap();
        let e = count_matchings(&free, CountMode::Heuristic { depth: 2 }, 100).unwrap();
        assert!((e.count() - 16.0).abs() < 1e-9);
    }
}
