//! The shipped regression set of decay-rate bounds.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::{grid_max, MIN_REFINE_PASSES, MIN_RESOLUTION};
use super::kappa::{collapse_two_layer, eval_kappa, Family, KappaSpec};

/// Largest allowed gap between the two-layer and single-layer maxima.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-3;

const SPOT_SEED: u64 = 0x5eed_dec4;
const SPOT_SAMPLES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub resolution: usize,
    pub refine_passes: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            resolution: MIN_RESOLUTION,
            refine_passes: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub label: String,
    pub spec: KappaSpec,
    pub grid_max: f64,
    pub argmax: Vec<f64>,
    pub claimed_bound: f64,
    pub margin: f64,
    pub resolution: usize,
    pub refine_passes: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub label: String,
    pub two_layer_max: f64,
    pub single_layer_max: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpotCheckReport {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Smallest `rhs - lhs` seen.
    pub worst_slack: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub bounds: Vec<BoundReport>,
    pub equivalences: Vec<EquivalenceReport>,
    pub spot_checks: Vec<SpotCheckReport>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.bounds.iter().all(|b| b.passed)
            && self.equivalences.iter().all(|e| e.passed)
            && self.spot_checks.iter().all(|s| s.passed)
    }

    pub fn bound(&self, family: Family, w: &[usize]) -> Option<&BoundReport> {
        self.bounds.iter().find(|b| b.spec.family == family && b.spec.w == w)
    }
}

/// Grid maximum of `spec` checked against `claimed`.
pub fn check_bound(spec: KappaSpec, claimed: f64, config: SuiteConfig) -> BoundReport {
    let r = grid_max(&spec, config.resolution, config.refine_passes);
    BoundReport {
        label: spec.label(),
        grid_max: r.value,
        argmax: r.argmax,
        claimed_bound: claimed,
        margin: claimed - r.value,
        resolution: r.resolution,
        refine_passes: r.refine_passes,
        passed: r.value < claimed,
        spec,
    }
}

fn multisets(d: usize, values: &[usize]) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        for mut rest in multisets(d - 1, &values[i..]) {
            rest.insert(0, v);
            out.push(rest);
        }
    }
    out
}

fn spec(f: Family, w: &[usize]) -> KappaSpec {
    KappaSpec::new(f, w.to_vec()).expect("suite specs are valid")
}

/// Bound for the single-layer CNF rate with `d` groups of width below 4.
pub fn cnf_small_width_bound(d: usize) -> f64 {
    match d {
        1 => 0.42,
        2 => 0.67,
        3 => 0.85,
        _ => 1.0,
    }
}

/// Per-case bound for the single-layer AMO rate (`d ≤ 2`, widths ≤ 3), or
/// `None` where only the `0.99` condition is claimed.
pub fn amo_case_bound(w: &[usize]) -> Option<f64> {
    match w {
        [1] => Some(0.41),
        [3] => Some(0.58),
        [1, 1] => Some(0.651),
        [2, 2] => Some(0.83),
        [3, 3] => Some(0.98),
        [1, 2] => Some(0.91),
        [1, 3] => Some(0.99),
        [2, 3] => Some(0.91),
        _ => None,
    }
}

/// The `(d, w)` samples on which two-layer and single-layer CNF maxima are
/// compared.
pub fn cnf_equivalence_samples() -> Vec<Vec<usize>> {
    vec![vec![2], vec![3], vec![1, 1], vec![1, 2], vec![2, 2], vec![1, 1, 2], vec![3, 3]]
}

fn equivalence(two: KappaSpec, config: SuiteConfig, single_max: Option<f64>) -> EquivalenceReport {
    let single_family = if two.family.is_cnf() {
        Family::CnfSingleLayer
    } else {
        Family::AmoSingleLayer
    };
    let single = single_max.unwrap_or_else(|| grid_max(&spec(single_family, &two.w), config.resolution, config.refine_passes).value);
    let two_max = grid_max(&two, config.resolution, config.refine_passes).value;
    EquivalenceReport {
        label: two.label(),
        two_layer_max: two_max,
        single_layer_max: single,
        tolerance: EQUIVALENCE_TOLERANCE,
        passed: (two_max - single).abs() <= EQUIVALENCE_TOLERANCE,
    }
}

fn random_point<R: Rng>(rng: &mut R, spec: &KappaSpec) -> Vec<f64> {
    spec.domain.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect()
}

fn spot(name: &str, mut check: impl FnMut(&mut ChaCha8Rng) -> (f64, f64)) -> SpotCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(SPOT_SEED);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..SPOT_SAMPLES {
        let (lhs, rhs) = check(&mut rng);
        let slack = rhs - lhs;
        if slack < -1e-12 {
            violations += 1;
        }
        worst = worst.min(slack);
    }
    SpotCheckReport {
        name: name.to_string(),
        samples: SPOT_SAMPLES,
        violations,
        worst_slack: worst,
        passed: violations == 0,
    }
}

fn random_widths<R: Rng>(rng: &mut R, d_max: usize, w_max: usize) -> Vec<usize> {
    let d = rng.random_range(2..=d_max);
    (0..d).map(|_| rng.random_range(1..=w_max)).collect()
}

/// Point-wise inequality checks behind the reductions.
pub fn spot_checks() -> Vec<SpotCheckReport> {
    let eval = |s: &KappaSpec, p: &[f64]| eval_kappa(s, p).expect("sampled inside the box");
    vec![
        spot("cnf sub-additivity", |rng| {
            let s = spec(Family::CnfSingleLayer, &random_widths(rng, 5, 8));
            let t = random_point(rng, &s);
            let a = rng.random_range(0..s.d());
            let mut rest_w = s.w.clone();
            let wa = rest_w.remove(a);
            let mut rest_t = t.clone();
            let ta = rest_t.remove(a);
            let rhs = eval(&spec(Family::CnfSingleLayer, &rest_w), &rest_t) + eval(&spec(Family::CnfSingleLayer, &[wa]), &[ta]);
            (eval(&s, &t), rhs)
        }),
        spot("amo sub-additivity", |rng| {
            let s = spec(Family::AmoSingleLayer, &random_widths(rng, 3, 3));
            let r = random_point(rng, &s);
            let rhs = s
                .w
                .iter()
                .zip(&r)
                .map(|(&w, &x)| eval(&spec(Family::AmoSingleLayer, &[w]), &[x]))
                .sum();
            (eval(&s, &r), rhs)
        }),
        spot("cnf two-layer below single-layer", |rng| {
            let d = rng.random_range(1..=4);
            let w: Vec<usize> = (0..d).map(|_| rng.random_range(1..=4)).collect();
            let s = spec(Family::CnfTwoLayer, &w);
            let x = random_point(rng, &s);
            let (single, t) = collapse_two_layer(&s, &x);
            (eval(&s, &x), eval(&single, &t))
        }),
        spot("amo two-layer below single-layer", |rng| {
            let d = rng.random_range(1..=3);
            let w: Vec<usize> = (0..d).map(|_| rng.random_range(1..=3)).collect();
            let s = spec(Family::AmoTwoLayer, &w);
            let x = random_point(rng, &s);
            let (single, r) = collapse_two_layer(&s, &x);
            (eval(&s, &x), eval(&single, &r))
        }),
    ]
}

/// Runs every shipped regression.
pub fn verify_all_bounds(config: SuiteConfig) -> SuiteReport {
    assert!(config.resolution >= MIN_RESOLUTION && config.refine_passes >= MIN_REFINE_PASSES);
    let mut bounds = Vec::new();
    for d in 1..=4 {
        for w in multisets(d, &[1, 2, 3]) {
            bounds.push(check_bound(spec(Family::CnfSingleLayer, &w), cnf_small_width_bound(d), config));
        }
    }
    for w in 4..=12 {
        bounds.push(check_bound(spec(Family::CnfSingleLayer, &[w]), 0.14, config));
    }
    let mut equivalences = Vec::new();
    for d in 1..=2 {
        for w in multisets(d, &[1, 2, 3]) {
            let single = check_bound(spec(Family::AmoSingleLayer, &w), amo_case_bound(&w).unwrap_or(0.99), config);
            let two = check_bound(spec(Family::AmoTwoLayer, &w), 0.99, config);
            equivalences.push(EquivalenceReport {
                label: two.label.clone(),
                two_layer_max: two.grid_max,
                single_layer_max: single.grid_max,
                tolerance: EQUIVALENCE_TOLERANCE,
                passed: (two.grid_max - single.grid_max).abs() <= EQUIVALENCE_TOLERANCE,
            });
            bounds.push(single);
            bounds.push(two);
        }
    }
    for w in cnf_equivalence_samples() {
        let single = bounds
            .iter()
            .find(|b| b.spec.family == Family::CnfSingleLayer && b.spec.w == w)
            .map(|b| b.grid_max);
        equivalences.push(equivalence(spec(Family::CnfTwoLayer, &w), config, single));
    }
    SuiteReport {
        config,
        bounds,
        equivalences,
        spot_checks: spot_checks(),
    }
}

/// Plain-text table of the report.
pub fn render_table(report: &SuiteReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<34} {:>10} {:>8} {:>10}  {:<28} {}",
        "case", "grid max", "bound", "margin", "argmax", "status"
    );
    for b in &report.bounds {
        let arg: Vec<String> = b.argmax.iter().map(|v| format!("{v:.4}")).collect();
        let mut arg = arg.join(",");
        if arg.len() > 28 {
            arg.truncate(25);
            arg.push_str("...");
        }
        let _ = writeln!(
            s,
            "{:<34} {:>10.6} {:>8} {:>10.6}  {:<28} {}",
            b.label,
            b.grid_max,
            b.claimed_bound,
            b.margin,
            arg,
            if b.passed { "ok" } else { "FAIL" }
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<34} {:>10} {:>10}  {}", "two-layer vs single-layer", "two", "single", "status");
    for e in &report.equivalences {
        let _ = writeln!(
            s,
            "{:<34} {:>10.6} {:>10.6}  {}",
            e.label,
            e.two_layer_max,
            e.single_layer_max,
            if e.passed { "ok" } else { "FAIL" }
        );
    }
    let _ = writeln!(s);
    for c in &report.spot_checks {
        let _ = writeln!(
            s,
            "{:<34} {} samples, {} violations, worst slack {:.3e}  {}",
            c.name,
            c.samples,
            c.violations,
            c.worst_slack,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "overall: {}", if report.all_passed() { "PASS" } else { "FAIL" });
    s
}
