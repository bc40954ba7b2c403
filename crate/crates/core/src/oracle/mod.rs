//! Exhaustive ground truth: exact counts and marginal ratios by enumeration,
//! plus seeded random instance generators for test corpora.
//!
//! Enumeration runs over live variables only (free variables that occur in a
//! constraint); untouched free variables contribute a factor of two and
//! pinned variables a factor of one.

mod generate;

pub use generate::{gen_random_deg4_hypergraph, gen_random_read5_cnf, GenerationFailed};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::formula::{MonotoneCnf, Pin, VarId};
use crate::matching::{AmoInstance, Hypergraph};

/// Default cap on live variables for enumeration.
pub const DEFAULT_ORACLE_CAP: usize = 30;

const CHUNK_BITS: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{live} live variables exceed the oracle cap of {cap}")]
    TooLargeForOracle { live: usize, cap: usize },
    #[error("no satisfying assignment sets {0} to one; the ratio is undefined")]
    DivisionUndefined(VarId),
}

/// Exact number of satisfying assignments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactCount(pub BigUint);

/// Exact marginal ratio `count(x=0) / count(x=1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMarginal(pub BigRational);

impl ExactMarginal {
    pub fn value(&self) -> &BigRational {
        &self.0
    }
}

/// Bitmask form of an instance over its live variables.
struct Compiled {
    live: Vec<VarId>,
    untouched_free: usize,
    /// CNF: clause masks (satisfied iff `a & mask != 0`).
    /// AMO: `(single, double, fixed_zeros)` per constraint.
    kind: Kind,
    /// Whether a pinned literal already makes the instance unsatisfiable.
    dead: bool,
}

enum Kind {
    Cnf(Vec<u64>),
    Amo(Vec<(u64, u64, u32)>),
}

impl Compiled {
    fn satisfied(&self, a: u64) -> bool {
        match &self.kind {
            Kind::Cnf(masks) => masks.iter().all(|&m| a & m != 0),
            Kind::Amo(cs) => cs.iter().all(|&(single, double, fixed)| {
                let zeros = !a & single;
                !a & double == 0 && fixed + zeros.count_ones() <= 1
            }),
        }
    }

    /// (count with bit clear, count with bit set) for `bit`, or the total in
    /// the first slot when `bit` is `None`.
    fn count_split(&self, bit: Option<usize>) -> (u128, u128) {
        if self.dead {
            return (0, 0);
        }
        let k = self.live.len() as u32;
        let total: u64 = 1u64 << k;
        let chunk = 1u64 << CHUNK_BITS.min(k);
        let n_chunks = total / chunk;
        (0..n_chunks)
            .into_par_iter()
            .map(|ci| {
                let (mut zero, mut one) = (0u128, 0u128);
                for a in ci * chunk..(ci + 1) * chunk {
                    if self.satisfied(a) {
                        match bit {
                            Some(b) if a >> b & 1 == 1 => one += 1,
                            _ => zero += 1,
                        }
                    }
                }
                (zero, one)
            })
            .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1))
    }
}

fn check_cap(live: usize, cap: usize) -> Result<(), OracleError> {
    if live > cap || live > 62 {
        return Err(OracleError::TooLargeForOracle { live, cap });
    }
    Ok(())
}

fn compile_cnf(c: &MonotoneCnf, cap: usize) -> Result<Compiled, OracleError> {
    let live = c.live_vars();
    check_cap(live.len(), cap)?;
    let mut pos = vec![usize::MAX; c.n_vars()];
    for (i, v) in live.iter().enumerate() {
        pos[v.index()] = i;
    }
    let mut dead = false;
    let mut masks = Vec::new();
    for clause in c.clauses() {
        let mut mask = 0u64;
        let mut sat = false;
        for &v in clause.vars() {
            match c.pin(v) {
                Pin::One => sat = true,
                Pin::Zero => {}
                Pin::Free => mask |= 1 << pos[v.index()],
            }
        }
        if sat {
            continue;
        }
        if mask == 0 {
            dead = true;
        }
        masks.push(mask);
    }
    let untouched_free = c.free_vars().len() - live.len();
    Ok(Compiled {
        live,
        untouched_free,
        kind: Kind::Cnf(masks),
        dead,
    })
}

fn compile_amo(c: &AmoInstance, cap: usize) -> Result<Compiled, OracleError> {
    let mut live: Vec<VarId> = c
        .constraints()
        .iter()
        .flatten()
        .copied()
        .filter(|&v| c.is_free(v))
        .collect();
    live.sort_unstable();
    live.dedup();
    check_cap(live.len(), cap)?;
    let mut pos = vec![usize::MAX; c.n_vars()];
    for (i, v) in live.iter().enumerate() {
        pos[v.index()] = i;
    }
    let mut dead = false;
    let mut cs = Vec::new();
    for con in c.constraints() {
        let (mut single, mut double, mut fixed) = (0u64, 0u64, 0u32);
        for &v in con {
            match c.pin(v) {
                Pin::One => {}
                Pin::Zero => fixed += 1,
                Pin::Free => {
                    let bit = 1u64 << pos[v.index()];
                    if single & bit != 0 {
                        double |= bit;
                    }
                    single |= bit;
                }
            }
        }
        if fixed >= 2 {
            dead = true;
        }
        cs.push((single, double, fixed));
    }
    let untouched_free = c.free_vars().len() - live.len();
    Ok(Compiled {
        live,
        untouched_free,
        kind: Kind::Amo(cs),
        dead,
    })
}

fn finish_count(comp: &Compiled) -> ExactCount {
    let (total, _) = comp.count_split(None);
    ExactCount(BigUint::from(total) << comp.untouched_free)
}

fn finish_marginal(comp: &Compiled, x: VarId, pin: Pin) -> Result<ExactMarginal, OracleError> {
    match pin {
        Pin::One => return Ok(ExactMarginal(BigRational::zero())),
        Pin::Zero => return Err(OracleError::DivisionUndefined(x)),
        Pin::Free => {}
    }
    let (zero, one) = match comp.live.iter().position(|&v| v == x) {
        Some(b) => comp.count_split(Some(b)),
        None => {
            // untouched free variable: both values extend every model
            let (t, _) = comp.count_split(None);
            (t, t)
        }
    };
    if one == 0 {
        return Err(OracleError::DivisionUndefined(x));
    }
    Ok(ExactMarginal(BigRational::new(zero.into(), one.into())))
}

/// Exact model count of a monotone CNF over all its free variables.
pub fn exact_count_cnf(c: &MonotoneCnf, cap: usize) -> Result<ExactCount, OracleError> {
    Ok(finish_count(&compile_cnf(c, cap)?))
}

/// Exact count of satisfying assignments of an at-most-one instance.
pub fn exact_count_amo(c: &AmoInstance, cap: usize) -> Result<ExactCount, OracleError> {
    Ok(finish_count(&compile_amo(c, cap)?))
}

pub fn exact_marginal_cnf(c: &MonotoneCnf, x: VarId, cap: usize) -> Result<ExactMarginal, OracleError> {
    finish_marginal(&compile_cnf(c, cap)?, x, c.pin(x))
}

pub fn exact_marginal_amo(c: &AmoInstance, x: VarId, cap: usize) -> Result<ExactMarginal, OracleError> {
    finish_marginal(&compile_amo(c, cap)?, x, c.pin(x))
}

/// Counts by evaluating every clause literally on every assignment of all
/// free variables. Independent of the bitmask path; slow.
pub fn exact_count_cnf_naive(c: &MonotoneCnf) -> Result<ExactCount, OracleError> {
    let free = c.free_vars();
    check_cap(free.len(), 24)?;
    let mut value = vec![false; c.n_vars()];
    for v in 0..c.n_vars() {
        value[v] = c.pins()[v] == Pin::One;
    }
    let mut count = 0u64;
    for a in 0u64..1 << free.len() {
        for (i, v) in free.iter().enumerate() {
            value[v.index()] = a >> i & 1 == 1;
        }
        if c.clauses().iter().all(|cl| cl.vars().iter().any(|v| value[v.index()])) {
            count += 1;
        }
    }
    Ok(ExactCount(BigUint::from(count)))
}

/// Counts matchings (sets of pairwise disjoint hyperedges, including the
/// empty set) by enumerating edge subsets.
pub fn count_matchings_brute(h: &Hypergraph) -> Result<ExactCount, OracleError> {
    let m = h.edges().len();
    check_cap(m, DEFAULT_ORACLE_CAP)?;
    let masks: Vec<Vec<u64>> = h
        .edges()
        .iter()
        .map(|e| {
            let mut words = vec![0u64; h.n_vertices().div_ceil(64).max(1)];
            for &v in e {
                words[v / 64] |= 1 << (v % 64);
            }
            words
        })
        .collect();
    let mut count = 0u64;
    let mut used = vec![0u64; h.n_vertices().div_ceil(64).max(1)];
    'subsets: for s in 0u64..1 << m {
        used.iter_mut().for_each(|w| *w = 0);
        for (e, mask) in masks.iter().enumerate() {
            if s >> e & 1 == 0 {
                continue;
            }
            for (u, w) in used.iter_mut().zip(mask) {
                if *u & w != 0 {
                    continue 'subsets;
                }
                *u |= w;
            }
        }
        count += 1;
    }
    Ok(ExactCount(BigUint::from(count)))
}
