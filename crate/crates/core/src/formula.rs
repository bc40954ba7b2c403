//! Monotone CNF formulas (equivalently set-cover instances) and the pinning
//! operations the marginal recursion is built from.
//!
//! Instances are immutable values. Every operation returns a fresh instance;
//! pins are applied eagerly, so a pinned variable never occurs in a clause.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense variable index in `[0, n_vars)`, stable across every instance
/// derived from one root formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl From<u32> for VarId {
    fn from(v: u32) -> Self {
        VarId(v)
    }
}

/// Per-variable pin state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Pin {
    #[default]
    Free,
    One,
    Zero,
}

/// A monotone clause: the disjunction of its variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    vars: Vec<VarId>,
}

impl Clause {
    /// Builds a clause, sorting and removing duplicate literals.
    pub fn new(mut vars: Vec<VarId>) -> Self {
        vars.sort_unstable();
        vars.dedup();
        Clause { vars }
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn contains(&self, x: VarId) -> bool {
        self.vars.binary_search(&x).is_ok()
    }

    fn is_subset_of(&self, other: &Clause) -> bool {
        // both sorted
        let mut it = other.vars.iter();
        'outer: for v in &self.vars {
            for w in it.by_ref() {
                if w == v {
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("input contains an empty clause; the formula is unsatisfiable")]
    EmptyClauseInInput,
    #[error("variable {var} occurs in {degree} clauses (read-5 instances allow at most 5)")]
    DegreeExceeded { var: VarId, degree: usize },
    #[error("variable {var} out of range for {n_vars} declared variables")]
    VarOutOfRange { var: VarId, n_vars: usize },
}

/// Raised when pinning a variable to zero empties a clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("pinning {0} to zero produced an empty clause")]
pub struct EmptyClauseSignal(pub VarId);

/// Maximum occurrences per variable in a read-5 formula.
pub const MAX_DEGREE: usize = 5;

/// A monotone CNF formula with its occurrence index and pin ledger.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonotoneCnf {
    n_vars: usize,
    clauses: Vec<Clause>,
    occ: Vec<Vec<u32>>,
    pins: Vec<Pin>,
}

impl MonotoneCnf {
    /// Builds a raw formula over `n_vars` variables. Literals within a clause
    /// are deduplicated; nothing else is normalised (see [`MonotoneCnf::wellform`]).
    pub fn new(n_vars: usize, clauses: Vec<Vec<VarId>>) -> Result<Self, FormulaError> {
        for c in &clauses {
            for &v in c {
                if v.index() >= n_vars {
                    return Err(FormulaError::VarOutOfRange { var: v, n_vars });
                }
            }
        }
        let clauses = clauses.into_iter().map(Clause::new).collect();
        Ok(Self::from_parts(n_vars, clauses, vec![Pin::Free; n_vars]))
    }

    /// The formula with no clauses over `n_vars` free variables.
    pub fn empty(n_vars: usize) -> Self {
        Self::from_parts(n_vars, Vec::new(), vec![Pin::Free; n_vars])
    }

    fn from_parts(n_vars: usize, clauses: Vec<Clause>, pins: Vec<Pin>) -> Self {
        let mut occ = vec![Vec::new(); n_vars];
        for (ci, c) in clauses.iter().enumerate() {
            for v in &c.vars {
                occ[v.index()].push(ci as u32);
            }
        }
        MonotoneCnf {
            n_vars,
            clauses,
            occ,
            pins,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, index: usize) -> &Clause {
        &self.clauses[index]
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

    /// Indices of the clauses containing `x`, ascending.
    pub fn occurrences(&self, x: VarId) -> &[u32] {
        &self.occ[x.index()]
    }

    /// `d_x(C)`.
    pub fn degree(&self, x: VarId) -> usize {
        self.occ[x.index()].len()
    }

    pub fn max_degree(&self) -> usize {
        self.occ.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Total number of literal occurrences.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::arity).sum()
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(|c| c.vars.is_empty())
    }

    /// Free variables that occur in at least one clause.
    pub fn live_vars(&self) -> Vec<VarId> {
        (0..self.n_vars as u32)
            .map(VarId)
            .filter(|&v| self.is_free(v) && self.degree(v) > 0)
            .collect()
    }

    /// Free variables, ascending.
    pub fn free_vars(&self) -> Vec<VarId> {
        (0..self.n_vars as u32)
            .map(VarId)
            .filter(|&v| self.is_free(v))
            .collect()
    }

    /// Pins `x` to zero: removes the literal from every clause.
    pub fn pin_zero(&self, x: VarId) -> Result<Self, EmptyClauseSignal> {
        assert!(self.is_free(x), "pin_zero on non-free variable {x}");
        let mut emptied = false;
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                if c.contains(x) {
                    let vars: Vec<VarId> = c.vars.iter().copied().filter(|&v| v != x).collect();
                    emptied |= vars.is_empty();
                    Clause { vars }
                } else {
                    c.clone()
                }
            })
            .collect();
        if emptied {
            return Err(EmptyClauseSignal(x));
        }
        let mut pins = self.pins.clone();
        pins[x.index()] = Pin::Zero;
        Ok(Self::from_parts(self.n_vars, clauses, pins))
    }

    /// Pins `x` to one: every clause containing `x` is satisfied and removed.
    pub fn pin_one(&self, x: VarId) -> Self {
        assert!(self.is_free(x), "pin_one on non-free variable {x}");
        let clauses = self
            .clauses
            .iter()
            .filter(|c| !c.contains(x))
            .cloned()
            .collect();
        let mut pins = self.pins.clone();
        pins[x.index()] = Pin::One;
        Self::from_parts(self.n_vars, clauses, pins)
    }

    /// `C - c`: drops the clause at `index`.
    pub fn remove_clause(&self, index: usize) -> Self {
        let clauses = self
            .clauses
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, c)| c.clone())
            .collect();
        Self::from_parts(self.n_vars, clauses, self.pins.clone())
    }

    /// Rewrites the formula into well-formed shape while preserving the
    /// number of satisfying assignments over all declared variables.
    ///
    /// Singleton clauses pin their variable to one; duplicate clauses and
    /// supersets of other clauses are dropped. Fails on a literal empty
    /// clause or when a live variable ends up in more than five clauses.
    pub fn wellform(&self) -> Result<Self, FormulaError> {
        if self.has_empty_clause() {
            return Err(FormulaError::EmptyClauseInInput);
        }
        let mut cur = self.clone();
        loop {
            let singleton = cur
                .clauses
                .iter()
                .find(|c| c.arity() == 1)
                .map(|c| c.vars[0]);
            match singleton {
                Some(x) => cur = cur.pin_one(x),
                None => break,
            }
        }

        let m = cur.clauses.len();
        let mut keep = vec![true; m];
        for ci in 0..m {
            let c = &cur.clauses[ci];
            'search: for v in &c.vars {
                for &oi in &cur.occ[v.index()] {
                    let oi = oi as usize;
                    if oi == ci || !keep[oi] {
                        continue;
                    }
                    let other = &cur.clauses[oi];
                    if other.arity() > c.arity() {
                        continue;
                    }
                    // identical clauses: keep the earliest
                    if other.arity() == c.arity() && oi > ci {
                        continue;
                    }
                    if other.is_subset_of(c) {
                        keep[ci] = false;
                        break 'search;
                    }
                }
            }
        }
        let clauses = cur
            .clauses
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(c, _)| c.clone())
            .collect();
        let out = Self::from_parts(cur.n_vars, clauses, cur.pins);
        for v in 0..out.n_vars {
            let d = out.occ[v].len();
            if d > MAX_DEGREE {
                return Err(FormulaError::DegreeExceeded {
                    var: VarId(v as u32),
                    degree: d,
                });
            }
        }
        Ok(out)
    }

    /// True when the formula has no duplicate literals, no singleton clause
    /// and no clause contained in another.
    pub fn is_well_formed(&self) -> bool {
        let m = self.clauses.len();
        for i in 0..m {
            if self.clauses[i].arity() < 2 {
                return false;
            }
            for j in 0..m {
                if i != j && self.clauses[i].is_subset_of(&self.clauses[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// The branch plan of the marginal recursion around `pivot`.
    pub fn branch_plan(&self, pivot: VarId) -> BranchPlan<'_> {
        assert!(self.is_free(pivot), "branch on non-free variable {pivot}");
        let groups = self.occ[pivot.index()]
            .iter()
            .map(|&ci| BranchGroup {
                clause: ci as usize,
                others: self.clauses[ci as usize]
                    .vars
                    .iter()
                    .copied()
                    .filter(|&v| v != pivot)
                    .collect(),
            })
            .collect();
        BranchPlan {
            formula: self,
            pivot,
            groups,
        }
    }
}

/// One clause `c_j` containing the pivot, with the other variables
/// `x_{j,1..w_j}` in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchGroup {
    pub clause: usize,
    pub others: Vec<VarId>,
}

impl BranchGroup {
    /// `w_j = |c_j| - 1`.
    pub fn width(&self) -> usize {
        self.others.len()
    }
}

/// Enumeration of the sub-instances that the marginal ratio of `pivot`
/// factors over: clauses in ascending index order, variables ascending.
#[derive(Clone, Debug)]
pub struct BranchPlan<'a> {
    formula: &'a MonotoneCnf,
    pivot: VarId,
    groups: Vec<BranchGroup>,
}

impl<'a> BranchPlan<'a> {
    pub fn pivot(&self) -> VarId {
        self.pivot
    }

    pub fn groups(&self) -> &[BranchGroup] {
        &self.groups
    }

    pub fn degree(&self) -> usize {
        self.groups.len()
    }

    /// `C_j` (0-based `j`): clauses `c_1..c_{j-1}` removed, the pivot removed
    /// from `c_{j+1}..c_d`.
    pub fn branch_instance(&self, j: usize) -> MonotoneCnf {
        self.build(j, false)
    }

    /// `C_j - c_j`, the instance on which the first child of group `j` is
    /// queried.
    pub fn group_base(&self, j: usize) -> MonotoneCnf {
        self.build(j, true)
    }

    fn build(&self, j: usize, drop_own: bool) -> MonotoneCnf {
        let f = self.formula;
        let mut role = vec![0u8; f.clauses.len()]; // 0 keep, 1 drop, 2 strip pivot
        for (k, g) in self.groups.iter().enumerate() {
            role[g.clause] = match k.cmp(&j) {
                std::cmp::Ordering::Less => 1,
                std::cmp::Ordering::Equal => u8::from(drop_own),
                std::cmp::Ordering::Greater => 2,
            };
        }
        let clauses = f
            .clauses
            .iter()
            .zip(&role)
            .filter(|(_, &r)| r != 1)
            .map(|(c, &r)| {
                if r == 2 {
                    Clause {
                        vars: c.vars.iter().copied().filter(|&v| v != self.pivot).collect(),
                    }
                } else {
                    c.clone()
                }
            })
            .collect();
        MonotoneCnf::from_parts(f.n_vars, clauses, f.pins.clone())
    }

    /// `C_{j,i}` (0-based `j`, `i`): `C_j - c_j` with `x_{j,1..i-1}` pinned to
    /// zero. Signals when one of those pins empties a clause.
    pub fn child_instance(&self, j: usize, i: usize) -> Result<MonotoneCnf, EmptyClauseSignal> {
        let mut cur = self.group_base(j);
        for &v in &self.groups[j].others[..i] {
            cur = cur.pin_zero(v)?;
        }
        Ok(cur)
    }
}
