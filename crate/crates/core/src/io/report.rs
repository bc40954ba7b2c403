//! Run reports. Keys are emitted in sorted order and no field depends on the
//! machine, so two runs on the same input give byte-identical output unless
//! timing is requested.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::counter::{CountMode, Estimate};
use crate::io::formats::InputFormat;

/// Integer counts are printed only up to this many variables.
pub const COUNT_DISPLAY_MAX_VARS: usize = 40;

pub fn input_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn guarantee(mode: &CountMode) -> String {
    match mode {
        CountMode::Certified { epsilon } => format!(
            "certified: exp(-{epsilon}) <= estimate/Z <= exp({epsilon})"
        ),
        CountMode::Heuristic { depth } => format!("heuristic: fixed depth {depth}, no error guarantee"),
        CountMode::Adaptive { tol } => format!(
            "adaptive: depth doubled until the estimate moved by less than {tol}/4 twice; empirical, not certified"
        ),
    }
}

/// Natural log of a big integer, `-inf` for zero.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let head = (n >> shift).to_f64().expect("64 bits fit");
    head.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_value(ln: f64) -> Value {
    if ln.is_finite() {
        json!(ln)
    } else {
        Value::Null
    }
}

pub struct ReportHeader<'a> {
    pub command: &'a str,
    pub input_digest: &'a str,
    pub format: InputFormat,
    pub n_vars: usize,
    pub seed: Option<u64>,
}

impl ReportHeader<'_> {
    fn base(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert("input_digest".into(), json!(self.input_digest));
        m.insert("format".into(), json!(self.format.name()));
        m.insert("n_vars".into(), json!(self.n_vars));
        m.insert("seed".into(), json!(self.seed));
        m
    }
}

pub fn estimate_report(header: &ReportHeader, est: &Estimate) -> Map<String, Value> {
    let mut m = header.base();
    m.insert("mode".into(), json!(est.mode.name()));
    m.insert("epsilon".into(), json!(est.epsilon));
    m.insert("depth".into(), json!(est.depth));
    m.insert("ln_count".into(), ln_value(est.log_count));
    let count = if est.is_zero() {
        json!("0")
    } else if header.n_vars <= COUNT_DISPLAY_MAX_VARS {
        json!(format!("{:.0}", est.count().round()))
    } else {
        Value::Null
    };
    m.insert("count".into(), count);
    m.insert("guarantee".into(), json!(guarantee(&est.mode)));
    m.insert("nodes_visited".into(), json!(est.nodes_visited));
    m.insert("converged".into(), json!(est.converged));
    m.insert("truncated".into(), json!(est.truncated));
    m
}

pub fn exact_report(header: &ReportHeader, count: &BigUint) -> Map<String, Value> {
    let mut m = header.base();
    m.insert("mode".into(), json!("exact"));
    m.insert("epsilon".into(), Value::Null);
    m.insert("depth".into(), Value::Null);
    m.insert("ln_count".into(), ln_value(ln_biguint(count)));
    m.insert("count".into(), json!(count.to_string()));
    m.insert("guarantee".into(), json!("exact: exhaustive enumeration"));
    m.insert("nodes_visited".into(), Value::Null);
    m.insert("converged".into(), json!(true));
    m.insert("truncated".into(), json!(false));
    m
}

pub fn with_timing(mut m: Map<String, Value>, wall_ms: f64) -> Map<String, Value> {
    m.insert("wall_time_ms".into(), json!(wall_ms));
    m
}

pub fn render_json(m: &Map<String, Value>) -> String {
    let mut s = serde_json::to_string_pretty(m).expect("map serializes");
    s.push('\n');
    s
}

pub fn render_text(m: &Map<String, Value>) -> String {
    let width = m.keys().map(|k| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in m {
        let v = match v {
            Value::String(x) => x.clone(),
            Value::Null => "-".into(),
            other => other.to_string(),
        };
        s.push_str(&format!("{k:<width$}  {v}\n"));
    }
    s
}
