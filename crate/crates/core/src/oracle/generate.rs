use std::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{MonotoneCnf, VarId, MAX_DEGREE};
use crate::matching::{Hypergraph, MAX_EDGE_SIZE, MAX_VERTEX_DEGREE};

const MAX_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("could not generate an instance satisfying the degree caps after {attempts} attempts")]
pub struct GenerationFailed {
    pub attempts: usize,
}

/// Picks `k` distinct items among those whose degree is still below `cap`.
fn pick<R: Rng>(rng: &mut R, degree: &[usize], cap: usize, k: usize) -> Option<Vec<usize>> {
    let open: Vec<usize> = (0..degree.len()).filter(|&i| degree[i] < cap).collect();
    if open.len() < k {
        return None;
    }
    let mut chosen: Vec<usize> = sample(rng, open.len(), k).into_iter().map(|i| open[i]).collect();
    chosen.sort_unstable();
    Some(chosen)
}

/// Random raw monotone CNF with `m` clauses over `n` variables, every
/// variable in at most five clauses. Deterministic in `seed`.
pub fn gen_random_read5_cnf(
    seed: u64,
    n: usize,
    m: usize,
    arity: RangeInclusive<usize>,
) -> Result<MonotoneCnf, GenerationFailed> {
    assert!(*arity.start() >= 1 && arity.start() <= arity.end());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let mut degree = vec![0usize; n];
        let mut clauses = Vec::with_capacity(m);
        for _ in 0..m {
            let k = rng.random_range(arity.clone());
            let Some(vars) = pick(&mut rng, &degree, MAX_DEGREE, k) else {
                continue 'attempt;
            };
            for &v in &vars {
                degree[v] += 1;
            }
            clauses.push(vars.into_iter().map(|v| VarId(v as u32)).collect());
        }
        return Ok(MonotoneCnf::new(n, clauses).expect("indices are in range"));
    }
    Err(GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

/// Random hypergraph with `e` edges on `v` vertices, edge sizes drawn from
/// `edge_size` (at most 3) and vertex degree at most 4.
pub fn gen_random_deg4_hypergraph(
    seed: u64,
    v: usize,
    e: usize,
    edge_size: RangeInclusive<usize>,
) -> Result<Hypergraph, GenerationFailed> {
    assert!(*edge_size.start() >= 1 && *edge_size.end() <= MAX_EDGE_SIZE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let mut degree = vec![0usize; v];
        let mut edges = Vec::with_capacity(e);
        for _ in 0..e {
            let k = rng.random_range(edge_size.clone());
            let Some(verts) = pick(&mut rng, &degree, MAX_VERTEX_DEGREE, k) else {
                continue 'attempt;
            };
            for &u in &verts {
                degree[u] += 1;
            }
            edges.push(verts);
        }
        return Ok(Hypergraph::new(v, edges).expect("caps enforced during generation"));
    }
    Err(GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}
