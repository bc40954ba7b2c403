//! At-most-one constraint instances and hypergraph matchings.
//!
//! A constraint `K_s(x_1, .., x_s)` is satisfied when at most one of its
//! variables is zero. Encoding each hyperedge as a variable (zero meaning
//! "in the matching") and each vertex as a `K_deg` constraint turns matching
//! counting into counting satisfying assignments.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf_marginal::{MarginalRatio, Walk};
use crate::formula::{Pin, VarId};
use crate::{NodeBudgetExceeded, TRUNCATION_GUESS};

/// Largest constraint arity handled (`K_4`).
pub const MAX_ARITY: usize = 4;
/// Largest number of constraints per live variable.
pub const MAX_VAR_DEGREE: usize = 3;
/// Largest vertex degree accepted by the hypergraph front end.
pub const MAX_VERTEX_DEGREE: usize = 4;
/// Largest hyperedge size accepted by the hypergraph front end.
pub const MAX_EDGE_SIZE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmoError {
    #[error("instance is unsatisfiable")]
    Unsatisfiable,
    #[error("constraint {constraint} has arity {arity} (at most 4 supported)")]
    ArityExceeded { constraint: usize, arity: usize },
    #[error("variable {var} occurs in {degree} constraints (at most 3 supported)")]
    DegreeExceeded { var: VarId, degree: usize },
    #[error("variable {var} out of range for {n_vars} declared variables")]
    VarOutOfRange { var: VarId, n_vars: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergraphError {
    #[error("vertex {vertex} has degree {degree} (at most 4 supported)")]
    DegreeExceeded { vertex: usize, degree: usize },
    #[error("hyperedge {edge} has {size} vertices (at most 3 supported)")]
    EdgeSizeExceeded { edge: usize, size: usize },
    #[error("hyperedge {edge} references vertex {vertex} outside 0..{n_vertices}")]
    VertexOutOfRange {
        edge: usize,
        vertex: usize,
        n_vertices: usize,
    },
}

/// An instance of at-most-one constraints with a pin ledger.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmoInstance {
    n_vars: usize,
    constraints: Vec<Vec<VarId>>,
    pins: Vec<Pin>,
}

impl AmoInstance {
    /// Raw instance; call [`AmoInstance::normalize`] before counting.
    pub fn new(n_vars: usize, constraints: Vec<Vec<VarId>>, pins: Vec<Pin>) -> Result<Self, AmoError> {
        assert_eq!(pins.len(), n_vars, "one pin entry per variable");
        for (ci, c) in constraints.iter().enumerate() {
            if c.len() > MAX_ARITY {
                return Err(AmoError::ArityExceeded {
                    constraint: ci,
                    arity: c.len(),
                });
            }
            for &v in c {
                if v.index() >= n_vars {
                    return Err(AmoError::VarOutOfRange { var: v, n_vars });
                }
            }
        }
        Ok(AmoInstance {
            n_vars,
            constraints,
            pins,
        })
    }

    pub fn unpinned(n_vars: usize, constraints: Vec<Vec<VarId>>) -> Result<Self, AmoError> {
        Self::new(n_vars, constraints, vec![Pin::Free; n_vars])
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn constraints(&self) -> &[Vec<VarId>] {
        &self.constraints
    }

    pub fn pins(&self) -> &[Pin] {
        &self.pins
    }

    pub fn pin(&self, x: VarId) -> Pin {
        self.pins[x.index()]
    }

    pub fn is_free(&self, x: VarId) -> bool {
        self.pins[x.index()] == Pin::Free
    }

    pub fn free_vars(&self) -> Vec<VarId> {
        (0..self.n_vars as u32)
            .map(VarId)
            .filter(|&v| self.is_free(v))
            .collect()
    }

    /// Indices of the constraints containing `x`, ascending.
    pub fn occurrences(&self, x: VarId) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(&x))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn degree(&self, x: VarId) -> usize {
        self.constraints.iter().filter(|c| c.contains(&x)).count()
    }

    /// Rewrites pins and degenerate constraints away until no pinned variable
    /// occurs in a constraint, no constraint repeats a variable and every
    /// constraint has arity at least 2. The satisfying assignments are
    /// unchanged; pinned variables contribute a factor of one.
    pub fn normalize(&self) -> Result<Self, AmoError> {
        let mut pins = self.pins.clone();
        let mut constraints = self.constraints.clone();
        loop {
            let mut changed = false;
            let mut next = Vec::with_capacity(constraints.len());
            for c in constraints {
                let zeros = c.iter().filter(|v| pins[v.index()] == Pin::Zero).count();
                if zeros >= 2 {
                    return Err(AmoError::Unsatisfiable);
                }
                if zeros == 1 {
                    for v in &c {
                        if pins[v.index()] == Pin::Free {
                            pins[v.index()] = Pin::One;
                        }
                    }
                    changed = true;
                    continue;
                }
                let live: Vec<VarId> = c
                    .iter()
                    .copied()
                    .filter(|v| pins[v.index()] == Pin::Free)
                    .collect();
                if live.len() != c.len() {
                    changed = true;
                }
                let mut sorted = live.clone();
                sorted.sort_unstable();
                let mut repeated = false;
                for w in sorted.windows(2) {
                    if w[0] == w[1] {
                        pins[w[0].index()] = Pin::One;
                        repeated = true;
                    }
                }
                if repeated {
                    changed = true;
                    next.push(live);
                    continue;
                }
                if live.len() <= 1 {
                    changed = true;
                    continue;
                }
                next.push(live);
            }
            constraints = next;
            if !changed {
                break;
            }
        }
        let out = AmoInstance {
            n_vars: self.n_vars,
            constraints,
            pins,
        };
        for v in 0..out.n_vars as u32 {
            let d = out.degree(VarId(v));
            if d > MAX_VAR_DEGREE {
                return Err(AmoError::DegreeExceeded {
                    var: VarId(v),
                    degree: d,
                });
            }
        }
        Ok(out)
    }

    /// True when no pinned variable occurs, no constraint repeats a
    /// variable, and every constraint has arity at least 2.
    pub fn is_normalized(&self) -> bool {
        self.constraints.iter().all(|c| {
            let mut s = c.clone();
            s.sort_unstable();
            s.dedup();
            c.len() >= 2 && s.len() == c.len() && c.iter().all(|&v| self.is_free(v))
        })
    }

    /// Pins a free variable to one and renormalises.
    pub fn pin_one(&self, x: VarId) -> Self {
        assert!(self.is_free(x), "pin_one on non-free variable {x}");
        let mut next = self.clone();
        next.pins[x.index()] = Pin::One;
        next.normalize()
            .expect("pinning to one cannot make an at-most-one instance unsatisfiable")
    }

    /// Normalised `C_{j,i}` of the recursion around `x`: constraints before
    /// `c_j` lose their occurrence of `x` (pinned to one), constraints after
    /// `c_j` see `x` pinned to zero, `c_j` is dropped and every sibling of the
    /// `i`-th other variable is pinned to one.
    pub fn child_instance(&self, x: VarId, j: usize, i: usize) -> (Self, VarId) {
        let occ = self.occurrences(x);
        let cj = occ[j];
        let others: Vec<VarId> = self.constraints[cj].iter().copied().filter(|&v| v != x).collect();
        let mut pins = self.pins.clone();
        let mut constraints = Vec::with_capacity(self.constraints.len());
        for (ci, c) in self.constraints.iter().enumerate() {
            match occ.iter().position(|&o| o == ci) {
                Some(k) if k < j => {
                    constraints.push(c.iter().copied().filter(|&v| v != x).collect());
                }
                Some(k) if k == j => {}
                Some(_) => {
                    // x = 0 here forces every other variable of the constraint to one
                    for &v in c {
                        if v != x && pins[v.index()] == Pin::Free {
                            pins[v.index()] = Pin::One;
                        }
                    }
                }
                None => constraints.push(c.clone()),
            }
        }
        for (k, &v) in others.iter().enumerate() {
            if k != i && pins[v.index()] == Pin::Free {
                pins[v.index()] = Pin::One;
            }
        }
        let raw = AmoInstance {
            n_vars: self.n_vars,
            constraints,
            pins,
        };
        let child = raw
            .normalize()
            .expect("branch instances of a satisfiable instance stay satisfiable");
        (child, others[i])
    }
}

/// `R(C, x, L)` for a normalised at-most-one instance: uniform depth
/// decrement of one per level.
pub fn marginal_truncated_amo(
    instance: &AmoInstance,
    x: VarId,
    depth: u32,
    node_budget: u64,
) -> Result<MarginalRatio, NodeBudgetExceeded> {
    let mut walk = Walk::new(node_budget, depth);
    let value = amo_truncated(instance, x, depth, &mut walk)?;
    Ok(MarginalRatio {
        value,
        depth_used: depth,
        nodes_visited: walk.nodes,
        truncated: walk.truncated,
    })
}

fn amo_truncated(c: &AmoInstance, x: VarId, depth: u32, walk: &mut Walk) -> Result<f64, NodeBudgetExceeded> {
    walk.visit()?;
    if c.pin(x) == Pin::One {
        return Ok(0.0);
    }
    let occ = c.occurrences(x);
    if occ.is_empty() {
        return Ok(1.0);
    }
    if depth == 0 {
        walk.truncated = true;
        return Ok(TRUNCATION_GUESS);
    }
    let mut ratio = 1.0;
    for (j, &cj) in occ.iter().enumerate() {
        let width = c.constraints[cj].len() - 1;
        let mut sum = 0.0;
        for i in 0..width {
            let (child, xi) = c.child_instance(x, j, i);
            sum += amo_truncated(&child, xi, depth - 1, walk)?;
        }
        ratio *= 1.0 / (1.0 + sum);
    }
    Ok(ratio)
}

/// `R(C, x)` through the untruncated recursion in exact rationals.
pub fn marginal_exact_amo(
    instance: &AmoInstance,
    x: VarId,
    node_budget: u64,
) -> Result<BigRational, NodeBudgetExceeded> {
    let mut walk = Walk::new(node_budget, u32::MAX);
    amo_exact(instance, x, &mut walk)
}

fn amo_exact(c: &AmoInstance, x: VarId, walk: &mut Walk) -> Result<BigRational, NodeBudgetExceeded> {
    walk.visit()?;
    if c.pin(x) == Pin::One {
        return Ok(BigRational::zero());
    }
    let occ = c.occurrences(x);
    let mut ratio = BigRational::one();
    for (j, &cj) in occ.iter().enumerate() {
        let width = c.constraints[cj].len() - 1;
        let mut sum = BigRational::one();
        for i in 0..width {
            let (child, xi) = c.child_instance(x, j, i);
            sum += amo_exact(&child, xi, walk)?;
        }
        ratio /= sum;
    }
    Ok(ratio)
}

/// A hypergraph on vertices `0..n_vertices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    n_vertices: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Validates vertex range, edge size (at most 3) and vertex degree (at
    /// most 4). Repeated vertices inside one edge are merged.
    pub fn new(n_vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self, HypergraphError> {
        let mut degree = vec![0usize; n_vertices];
        let mut clean = Vec::with_capacity(edges.len());
        for (ei, mut e) in edges.into_iter().enumerate() {
            e.sort_unstable();
            e.dedup();
            if e.len() > MAX_EDGE_SIZE {
                return Err(HypergraphError::EdgeSizeExceeded {
                    edge: ei,
                    size: e.len(),
                });
            }
            for &v in &e {
                if v >= n_vertices {
                    return Err(HypergraphError::VertexOutOfRange {
                        edge: ei,
                        vertex: v,
                        n_vertices,
                    });
                }
                degree[v] += 1;
            }
            clean.push(e);
        }
        if let Some((vertex, &d)) = degree.iter().enumerate().find(|(_, &d)| d > MAX_VERTEX_DEGREE) {
            return Err(HypergraphError::DegreeExceeded { vertex, degree: d });
        }
        Ok(Hypergraph {
            n_vertices,
            edges: clean,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn is_uniform(&self, k: usize) -> bool {
        self.edges.iter().all(|e| e.len() == k)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }
}

/// One variable per hyperedge, one `K_deg(v)` per vertex of positive degree.
/// The result is raw: `K_1` constraints are kept until normalisation.
pub fn from_hypergraph(h: &Hypergraph) -> AmoInstance {
    let constraints = (0..h.n_vertices)
        .map(|v| {
            h.edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.contains(&v))
                .map(|(ei, _)| VarId(ei as u32))
                .collect::<Vec<_>>()
        })
        .filter(|c| !c.is_empty())
        .collect();
    AmoInstance {
        n_vars: h.edges.len(),
        constraints,
        pins: vec![Pin::Free; h.edges.len()],
    }
}
