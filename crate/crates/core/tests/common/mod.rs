#![allow(dead_code)]

use covercount::oracle::{gen_random_deg4_hypergraph, gen_random_read5_cnf};
use covercount::{Hypergraph, MonotoneCnf};

pub struct CnfCase {
    pub seed: u64,
    pub formula: MonotoneCnf,
}

/// Well-formed read-5 formulas with `n` drawn from `vars`, arities 2..=4.
pub fn cnf_corpus(base_seed: u64, count: usize, vars: std::ops::RangeInclusive<usize>) -> Vec<CnfCase> {
    let span = vars.end() - vars.start() + 1;
    let mut out = Vec::with_capacity(count);
    let mut seed = base_seed;
    while out.len() < count {
        let n = vars.start() + (seed as usize % span);
        let m = n / 2 + (seed as usize / span) % (n + 1);
        seed += 1;
        let Ok(raw) = gen_random_read5_cnf(seed, n, m.max(1), 2..=4) else {
            continue;
        };
        let formula = raw.wellform().expect("arity >= 2 and degree <= 5");
        out.push(CnfCase { seed, formula });
    }
    out
}

pub struct GraphCase {
    pub seed: u64,
    pub graph: Hypergraph,
}

/// Alternates graphs and 3-uniform hypergraphs of maximum degree 4 with at
/// most `max_edges` edges.
pub fn hypergraph_corpus(base_seed: u64, count: usize, max_edges: usize) -> Vec<GraphCase> {
    let mut out = Vec::with_capacity(count);
    let mut seed = base_seed;
    while out.len() < count {
        let k = if out.len() % 2 == 0 { 2 } else { 3 };
        let e = 1 + seed as usize % max_edges;
        let v = (k * e).div_ceil(3).max(k + 1);
        seed += 1;
        if let Ok(graph) = gen_random_deg4_hypergraph(seed, v, e, k..=k) {
            out.push(GraphCase { seed, graph });
        }
    }
    out
}
