//! Grid maximization with box refinement.
//!
//! A pass evaluates every group on its own sub-grid and keeps the Pareto
//! frontier of `(q, G)` (larger is better in both), which loses nothing since
//! the rate is increasing in each `q_a` and each `G_a`. The frontiers are then
//! combined exhaustively. Refinement passes halve the box around the
//! incumbent. Ties go to the lexicographically smallest grid index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kappa::{eval_unchecked, KappaSpec};

/// Smallest accepted resolution per axis.
pub const MIN_RESOLUTION: usize = 64;
/// Smallest accepted number of refinement passes.
pub const MIN_REFINE_PASSES: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub resolution: usize,
    pub refine_passes: usize,
}

#[derive(Clone)]
struct Candidate {
    q: f64,
    g: f64,
    index: Vec<u32>,
}

/// Best `(value, grid index)`; the comparison is total and deterministic.
#[derive(Clone)]
struct Best {
    value: f64,
    index: Vec<u32>,
}

impl Best {
    fn none() -> Self {
        Best {
            value: f64::NEG_INFINITY,
            index: Vec::new(),
        }
    }

    fn better(a: Best, b: Best) -> Best {
        if b.value > a.value || (b.value == a.value && !b.index.is_empty() && (a.index.is_empty() || b.index < a.index)) {
            b
        } else {
            a
        }
    }
}

fn axis(lo: f64, hi: f64, res: usize, k: u32) -> f64 {
    if res == 1 || hi == lo {
        return lo;
    }
    lo + (hi - lo) * f64::from(k) / (res - 1) as f64
}

/// Index tuples of length `k` over `0..res`, non-decreasing when `sorted`.
fn tuples(k: usize, res: usize, sorted: bool) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; k];
    fn rec(pos: usize, min: u32, res: u32, sorted: bool, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        let start = if sorted { min } else { 0 };
        for i in start..res {
            cur[pos] = i;
            rec(pos + 1, i, res, sorted, cur, out);
        }
    }
    rec(0, 0, res as u32, sorted, &mut cur, &mut out);
    out
}

fn frontier(spec: &KappaSpec, a: usize, boxes: &[(f64, f64)], res: usize, sorted: bool) -> Vec<Candidate> {
    let k = boxes.len();
    let mut cands: Vec<Candidate> = tuples(k, res, sorted)
        .into_par_iter()
        .map(|index| {
            let x: Vec<f64> = index
                .iter()
                .zip(boxes)
                .map(|(&i, &(lo, hi))| axis(lo, hi, res, i))
                .collect();
            let (q, g) = spec.group_term(a, &x);
            Candidate { q, g, index }
        })
        .collect();
    cands.sort_by(|x, y| {
        y.q.total_cmp(&x.q)
            .then(y.g.total_cmp(&x.g))
            .then_with(|| x.index.cmp(&y.index))
    });
    let mut kept: Vec<Candidate> = Vec::new();
    for c in cands {
        if kept.last().is_none_or(|last| c.g > last.g) {
            kept.push(c);
        }
    }
    kept
}

struct Fronts<'a> {
    spec: &'a KappaSpec,
    fronts: Vec<Vec<Candidate>>,
    tied_to_prev: Vec<bool>,
    /// Largest `Π q` and `Σ G` reachable from each level on.
    q_rest: Vec<f64>,
    g_rest: Vec<f64>,
}

impl Fronts<'_> {
    fn search(&self, level: usize, min_pos: usize, q: f64, s: f64, chosen: &mut Vec<usize>, best: &mut Best) {
        let spec = self.spec;
        if level == self.fronts.len() {
            let v = spec.combine(q, s);
            if v >= best.value {
                let index: Vec<u32> = chosen
                    .iter()
                    .enumerate()
                    .flat_map(|(a, &p)| self.fronts[a][p].index.iter().copied())
                    .collect();
                *best = Best::better(best.clone(), Best { value: v, index });
            }
            return;
        }
        let f = &self.fronts[level];
        let (qr, gr) = (self.q_rest[level + 1], self.g_rest[level + 1]);
        let start = if self.tied_to_prev[level] { min_pos } else { 0 };
        if start >= f.len() {
            return;
        }
        // q falls and G rises along the frontier: skip the head whose G is
        // too small even with the best q, stop once q is too small even with
        // the best G
        let q_head = q * f[start].q * qr;
        let lo = start + f[start..].partition_point(|c| spec.combine(q_head, s + c.g + gr) < best.value);
        let g_last = f[f.len() - 1].g;
        for p in lo..f.len() {
            let c = &f[p];
            let qc = q * c.q * qr;
            if spec.combine(qc, s + g_last + gr) < best.value {
                break;
            }
            if spec.combine(qc, s + c.g + gr) < best.value {
                continue;
            }
            chosen.push(p);
            self.search(level + 1, p, q * c.q, s + c.g, chosen, best);
            chosen.pop();
        }
    }
}

/// Best grid point of the pass whose value is at least `floor`, if any.
fn pass(spec: &KappaSpec, boxes: &[(f64, f64)], res: usize, symmetric: bool, floor: f64) -> Option<(f64, Vec<f64>)> {
    let groups = spec.groups();
    let fronts: Vec<Vec<Candidate>> = groups
        .iter()
        .enumerate()
        .map(|(a, r)| {
            let sub = &boxes[r.clone()];
            let uniform = sub.iter().all(|b| *b == sub[0]);
            frontier(spec, a, sub, res, symmetric && uniform)
        })
        .collect();
    // identical consecutive groups may be taken in non-decreasing frontier order
    let tied_to_prev: Vec<bool> = (0..groups.len())
        .map(|a| {
            symmetric && a > 0 && spec.w[a] == spec.w[a - 1] && boxes[groups[a].clone()] == boxes[groups[a - 1].clone()]
        })
        .collect();
    let d = fronts.len();
    let mut q_rest = vec![1.0; d + 1];
    let mut g_rest = vec![0.0; d + 1];
    for a in (0..d).rev() {
        q_rest[a] = q_rest[a + 1] * fronts[a][0].q;
        g_rest[a] = g_rest[a + 1] + fronts[a][fronts[a].len() - 1].g;
    }
    let ctx = Fronts {
        spec,
        fronts,
        tied_to_prev,
        q_rest,
        g_rest,
    };
    let seed = Best {
        value: floor,
        index: Vec::new(),
    };
    let best = (0..ctx.fronts[0].len())
        .into_par_iter()
        .map(|p| {
            let mut best = seed.clone();
            let c = &ctx.fronts[0][p];
            if spec.combine(c.q * ctx.q_rest[1], c.g + ctx.g_rest[1]) >= floor {
                ctx.search(1, p, c.q, c.g, &mut vec![p], &mut best);
            }
            best
        })
        .reduce(|| seed.clone(), Best::better);
    if best.index.is_empty() {
        return None;
    }
    let point = best
        .index
        .iter()
        .zip(boxes)
        .map(|(&i, &(lo, hi))| axis(lo, hi, res, i))
        .collect();
    Some((best.value, point))
}

/// Best value among the grid points with all indices equal.
fn diagonal_floor(spec: &KappaSpec, res: usize) -> f64 {
    (0..res as u32)
        .map(|k| {
            let x: Vec<f64> = spec.domain.iter().map(|&(lo, hi)| axis(lo, hi, res, k)).collect();
            eval_unchecked(spec, &x)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn refine_box(domain: &[(f64, f64)], current: &[(f64, f64)], center: &[f64]) -> Vec<(f64, f64)> {
    current
        .iter()
        .zip(domain)
        .zip(center)
        .map(|((&(lo, hi), &(dlo, dhi)), &c)| {
            let half = (hi - lo) / 4.0;
            let (mut a, mut b) = (c - half, c + half);
            if a < dlo {
                b += dlo - a;
                a = dlo;
            }
            if b > dhi {
                a -= b - dhi;
                b = dhi;
            }
            (a.max(dlo), b.min(dhi))
        })
        .collect()
}

/// Deterministic estimate of the maximum over the spec's box.
pub fn grid_max(spec: &KappaSpec, resolution: usize, refine_passes: usize) -> GridResult {
    assert!(resolution >= MIN_RESOLUTION, "resolution must be at least {MIN_RESOLUTION}");
    assert!(refine_passes >= MIN_REFINE_PASSES, "at least {MIN_REFINE_PASSES} refinement passes");
    let floor = diagonal_floor(spec, resolution);
    let (mut value, mut argmax) =
        pass(spec, &spec.domain, resolution, true, floor).expect("the diagonal lies on the grid");
    let mut boxes = spec.domain.clone();
    for _ in 0..refine_passes {
        boxes = refine_box(&spec.domain, &boxes, &argmax);
        if let Some((v, p)) = pass(spec, &boxes, resolution, false, value) {
            if v > value {
                value = v;
                argmax = p;
            }
        }
    }
    GridResult {
        value,
        argmax,
        resolution,
        refine_passes,
    }
}

/// Plain evaluation of every grid point, no pruning or refinement.
pub fn grid_max_brute(spec: &KappaSpec, resolution: usize) -> (f64, Vec<f64>) {
    let dim = spec.dim();
    let total = resolution.pow(dim as u32);
    let best = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rest = flat;
            let mut index = vec![0u32; dim];
            for i in (0..dim).rev() {
                index[i] = (rest % resolution) as u32;
                rest /= resolution;
            }
            let x: Vec<f64> = index
                .iter()
                .zip(&spec.domain)
                .map(|(&i, &(lo, hi))| axis(lo, hi, resolution, i))
                .collect();
            Best {
                value: eval_unchecked(spec, &x),
                index,
            }
        })
        .reduce(Best::none, Best::better);
    let point = best
        .index
        .iter()
        .zip(&spec.domain)
        .map(|(&i, &(lo, hi))| axis(lo, hi, resolution, i))
        .collect();
    (best.value, point)
}
