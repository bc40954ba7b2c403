//! Amortized decay rates.
//!
//! Every family factors as `κ = F(Π_a q_a) · Σ_a G_a` over its groups, with
//! `F` increasing and each `(q_a, G_a)` depending only on the coordinates of
//! group `a`. The grid maximizer relies on this shape.
//!
//! * CNF two-layer, coordinates `t̂_{a,b} ∈ [0, 1/2]`:
//!   `√(ĥ/(1+ĥ)) · Σ_a α^{-c_a} · P_a/(1-P_a) · Σ_b (1-t̂_{a,b})/√t̂_{a,b}`
//!   with `P_a = Π_b t̂_{a,b}`, `ĥ = Π_a (1-P_a)`, `c_a = ⌈log_4(w_a+1)⌉`.
//! * CNF single-layer, one `t_a ∈ [0, 1/2]` per group, `s_a = t_a / 2^{w_a-1}`:
//!   `√(H/(1+H)) · Σ_a α^{-c_a} · s_a/(1-s_a) · ((1-t_a)/√t_a + (w_a-1)/√2)`
//!   with `H = Π_a (1-s_a)`.
//! * AMO two-layer, `r_{j,i} ∈ [0, 1]`:
//!   `Σ_j (Σ_i √(r_{j,i}(1+r_{j,i}))) / (1+Σ_i r_{j,i}) / √(1 + Π_k (1+Σ_i r_{k,i}))`.
//! * AMO single-layer, one `r_j ∈ [0, 1]` per group:
//!   `Σ_j w_j √(r_j(1+r_j)) / (1+w_j r_j) / √(1 + Π_k (1+w_k r_k))`.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf_marginal::depth_decrement;
use crate::CNF_ALPHA;

/// Largest group count accepted.
pub const MAX_GROUPS: usize = 5;

const BOX_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    CnfTwoLayer,
    CnfSingleLayer,
    AmoTwoLayer,
    AmoSingleLayer,
}

impl Family {
    pub fn is_cnf(self) -> bool {
        matches!(self, Family::CnfTwoLayer | Family::CnfSingleLayer)
    }

    pub fn is_two_layer(self) -> bool {
        matches!(self, Family::CnfTwoLayer | Family::AmoTwoLayer)
    }

    /// Per-coordinate domain `[0, 1/2]` (CNF) or `[0, 1]` (AMO).
    pub fn upper(self) -> f64 {
        if self.is_cnf() {
            0.5
        } else {
            1.0
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::CnfTwoLayer => "cnf-two-layer",
            Family::CnfSingleLayer => "cnf-single-layer",
            Family::AmoTwoLayer => "amo-two-layer",
            Family::AmoSingleLayer => "amo-single-layer",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("group count must lie in 1..={MAX_GROUPS}, got {0}")]
    GroupCount(usize),
    #[error("group widths must be positive")]
    ZeroWidth,
    #[error("point has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("coordinate {coord} = {value} lies outside [{lo}, {hi}]")]
    OutOfBox { coord: usize, value: f64, lo: f64, hi: f64 },
    #[error("box [{lo}, {hi}] for coordinate {coord} is not inside the family domain")]
    BadBox { coord: usize, lo: f64, hi: f64 },
}

/// A decay-rate function: family, ascending widths and a box per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaSpec {
    pub family: Family,
    pub w: Vec<usize>,
    pub domain: Vec<(f64, f64)>,
}

impl KappaSpec {
    /// The spec over the full family domain. Widths are sorted ascending.
    pub fn new(family: Family, mut w: Vec<usize>) -> Result<Self, DomainError> {
        if w.is_empty() || w.len() > MAX_GROUPS {
            return Err(DomainError::GroupCount(w.len()));
        }
        if w.contains(&0) {
            return Err(DomainError::ZeroWidth);
        }
        w.sort_unstable();
        let dim = if family.is_two_layer() { w.iter().sum() } else { w.len() };
        Ok(KappaSpec {
            family,
            w,
            domain: vec![(0.0, family.upper()); dim],
        })
    }

    /// Restricts one coordinate to `[lo, hi]`.
    pub fn restrict(mut self, coord: usize, lo: f64, hi: f64) -> Result<Self, DomainError> {
        if coord >= self.domain.len() {
            return Err(DomainError::Dimension {
                expected: self.domain.len(),
                got: coord + 1,
            });
        }
        if !(0.0 <= lo && lo <= hi && hi <= self.family.upper()) {
            return Err(DomainError::BadBox { coord, lo, hi });
        }
        self.domain[coord] = (lo, hi);
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.w.len()
    }

    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    /// Coordinate range of each group.
    pub fn groups(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.w
            .iter()
            .map(|&w| {
                let k = if self.family.is_two_layer() { w } else { 1 };
                let r = start..start + k;
                start += k;
                r
            })
            .collect()
    }

    pub fn label(&self) -> String {
        let w: Vec<String> = self.w.iter().map(ToString::to_string).collect();
        format!("{} d={} w=({})", self.family.name(), self.d(), w.join(","))
    }

    /// `(q, G)` of group `a` at its coordinates.
    pub(crate) fn group_term(&self, a: usize, x: &[f64]) -> (f64, f64) {
        let w = self.w[a];
        match self.family {
            Family::CnfTwoLayer => {
                let p: f64 = x.iter().product();
                let mut s = 0.0;
                for b in 0..x.len() {
                    let rest: f64 = x.iter().enumerate().filter(|&(i, _)| i != b).map(|(_, v)| v).product();
                    s += rest * x[b].sqrt() * (1.0 - x[b]);
                }
                (1.0 - p, alpha_factor(w) * s / (1.0 - p))
            }
            Family::CnfSingleLayer => {
                let t = x[0];
                let scale = 2f64.powi(w as i32 - 1);
                let s = t / scale;
                let g = (t.sqrt() / scale * (1.0 - t) + s * (w as f64 - 1.0) / 2f64.sqrt()) / (1.0 - s);
                (1.0 - s, alpha_factor(w) * g)
            }
            Family::AmoTwoLayer => {
                let u = 1.0 + x.iter().sum::<f64>();
                let num: f64 = x.iter().map(|&r| (r * (1.0 + r)).sqrt()).sum();
                (1.0 / u, num / u)
            }
            Family::AmoSingleLayer => {
                let r = x[0];
                let wf = w as f64;
                let u = 1.0 + wf * r;
                (1.0 / u, wf * (r * (1.0 + r)).sqrt() / u)
            }
        }
    }

    /// `F(Q) · S` for `Q = Π q_a`, `S = Σ G_a`.
    pub(crate) fn combine(&self, q: f64, s: f64) -> f64 {
        if self.family.is_cnf() {
            (q / (1.0 + q)).sqrt() * s
        } else {
            s / (1.0 + 1.0 / q).sqrt()
        }
    }
}

/// `α^{-⌈log_4(w+1)⌉}` with the CNF decay base.
pub fn alpha_factor(w: usize) -> f64 {
    CNF_ALPHA.powi(-(depth_decrement(w) as i32))
}

/// Evaluates the decay rate at `point`, which must lie in the spec's box.
pub fn eval_kappa(spec: &KappaSpec, point: &[f64]) -> Result<f64, DomainError> {
    if point.len() != spec.dim() {
        return Err(DomainError::Dimension {
            expected: spec.dim(),
            got: point.len(),
        });
    }
    for (coord, (&v, &(lo, hi))) in point.iter().zip(&spec.domain).enumerate() {
        if !(v >= lo - BOX_SLACK && v <= hi + BOX_SLACK) {
            return Err(DomainError::OutOfBox { coord, value: v, lo, hi });
        }
    }
    Ok(eval_unchecked(spec, point))
}

pub(crate) fn eval_unchecked(spec: &KappaSpec, point: &[f64]) -> f64 {
    let mut q = 1.0;
    let mut s = 0.0;
    for (a, range) in spec.groups().into_iter().enumerate() {
        let (qa, ga) = spec.group_term(a, &point[range]);
        q *= qa;
        s += ga;
    }
    spec.combine(q, s)
}

/// `T(t, k)` helper of the single-layer CNF rate.
pub fn t_helper(t: f64, k: usize) -> f64 {
    let s = t / 2f64.powi(k as i32 - 1);
    s / (1.0 - s) * ((1.0 - t) / t.sqrt() + (k as f64 - 1.0) / 2f64.sqrt())
}

/// `g(h) = √(h / (1 + h))`.
pub fn g_helper(h: f64) -> f64 {
    (h / (1.0 + h)).sqrt()
}

/// Point of the single-layer family matching a two-layer point: per group,
/// `t_a = 2^{w_a-1} Π_b t̂_{a,b}` (CNF) or `r_a = mean_b r_{a,b}` (AMO).
pub fn collapse_two_layer(spec: &KappaSpec, point: &[f64]) -> (KappaSpec, Vec<f64>) {
    assert!(spec.family.is_two_layer(), "collapse needs a two-layer spec");
    let family = if spec.family.is_cnf() {
        Family::CnfSingleLayer
    } else {
        Family::AmoSingleLayer
    };
    let single = KappaSpec::new(family, spec.w.clone()).expect("widths already validated");
    let t = spec
        .groups()
        .into_iter()
        .zip(&spec.w)
        .map(|(range, &w)| {
            let xs = &point[range];
            if spec.family.is_cnf() {
                2f64.powi(w as i32 - 1) * xs.iter().product::<f64>()
            } else {
                xs.iter().sum::<f64>() / w as f64
            }
        })
        .collect();
    (single, t)
}
