//! Python bindings: `import pycovercount`.

use covercount::counter::{count_cnf, count_matchings, CountMode, Estimate};
use covercount::decay::{eval_kappa, verify_all_bounds, Family, KappaSpec, SuiteConfig};
use covercount::io::formats;
use covercount::matching::{from_hypergraph, marginal_exact_amo, marginal_truncated_amo};
use covercount::oracle::{self, OracleError, DEFAULT_ORACLE_CAP};
use covercount::{
    certified_depth_amo, certified_depth_cnf, marginal_exact_recursive, marginal_truncated, AmoInstance, Hypergraph, MonotoneCnf, NodeBudgetExceeded,
    Pin, TruncationPolicy, VarId, DEFAULT_NODE_BUDGET,
};
use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(pycovercount, BudgetExceeded, PyRuntimeError, "Computation tree or oracle exceeded its budget.");

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn budget_err(e: NodeBudgetExceeded) -> PyErr {
    BudgetExceeded::new_err(e.to_string())
}

fn oracle_err(e: OracleError) -> PyErr {
    match e {
        OracleError::TooLargeForOracle { .. } => BudgetExceeded::new_err(e.to_string()),
        other => value_err(other),
    }
}

fn var(x: u32, n: usize) -> PyResult<VarId> {
    if (x as usize) < n {
        Ok(VarId(x))
    } else {
        Err(value_err(format!("variable {x} out of range for {n} variables")))
    }
}

fn to_vars(lists: Vec<Vec<u32>>) -> Vec<Vec<VarId>> {
    lists.into_iter().map(|c| c.into_iter().map(VarId).collect()).collect()
}

fn fraction<'py>(py: Python<'py>, r: &num_rational::BigRational) -> PyResult<Bound<'py, PyAny>> {
    let frac = py.import("fractions")?.getattr("Fraction")?;
    frac.call1((r.numer().clone(), r.denom().clone()))
}

fn mode_of(mode: &str, epsilon: f64, depth: Option<u32>) -> PyResult<CountMode> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(value_err("epsilon must be positive"));
    }
    match mode {
        "certified" => Ok(CountMode::Certified { epsilon }),
        "adaptive" => Ok(CountMode::Adaptive { tol: epsilon }),
        "heuristic" => Ok(CountMode::Heuristic {
            depth: depth.ok_or_else(|| value_err("heuristic mode needs depth"))?,
        }),
        other => Err(value_err(format!("unknown mode {other:?}"))),
    }
}

/// Monotone CNF over 0-based variables.
#[pyclass(name = "MonotoneCnf", module = "pycovercount", frozen)]
struct PyCnf {
    inner: MonotoneCnf,
}

#[pymethods]
impl PyCnf {
    #[new]
    fn new(n_vars: usize, clauses: Vec<Vec<u32>>) -> PyResult<Self> {
        Ok(PyCnf {
            inner: MonotoneCnf::new(n_vars, to_vars(clauses)).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn from_dimacs(text: &str) -> PyResult<Self> {
        Ok(PyCnf {
            inner: formats::parse_dimacs(text).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn from_setcover(text: &str) -> PyResult<Self> {
        Ok(PyCnf {
            inner: formats::parse_setcover(text).map_err(value_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (seed, n_vars, n_clauses, min_arity=2, max_arity=3))]
    fn random(seed: u64, n_vars: usize, n_clauses: usize, min_arity: usize, max_arity: usize) -> PyResult<Self> {
        if min_arity == 0 || min_arity > max_arity {
            return Err(value_err("need 1 <= min_arity <= max_arity"));
        }
        Ok(PyCnf {
            inner: oracle::gen_random_read5_cnf(seed, n_vars, n_clauses, min_arity..=max_arity).map_err(value_err)?,
        })
    }

    fn to_dimacs(&self) -> String {
        formats::to_dimacs(&self.inner)
    }

    fn to_setcover(&self) -> String {
        formats::to_setcover(&self.inner)
    }

    #[getter]
    fn n_vars(&self) -> usize {
        self.inner.n_vars()
    }

    #[getter]
    fn clauses(&self) -> Vec<Vec<u32>> {
        self.inner.clauses().iter().map(|c| c.vars().iter().map(|v| v.0).collect()).collect()
    }

    fn degree(&self, x: u32) -> PyResult<usize> {
        Ok(self.inner.degree(var(x, self.inner.n_vars())?))
    }

    fn free_vars(&self) -> Vec<u32> {
        self.inner.free_vars().into_iter().map(|v| v.0).collect()
    }

    fn is_well_formed(&self) -> bool {
        self.inner.is_well_formed()
    }

    fn wellform(&self) -> PyResult<Self> {
        Ok(PyCnf {
            inner: self.inner.wellform().map_err(value_err)?,
        })
    }

    fn pin_one(&self, x: u32) -> PyResult<Self> {
        let x = var(x, self.inner.n_vars())?;
        if !self.inner.is_free(x) {
            return Err(value_err(format!("{x} is already pinned")));
        }
        Ok(PyCnf {
            inner: self.inner.pin_one(x),
        })
    }

    /// Raises `ValueError` when the pin empties a clause.
    fn pin_zero(&self, x: u32) -> PyResult<Self> {
        let x = var(x, self.inner.n_vars())?;
        if !self.inner.is_free(x) {
            return Err(value_err(format!("{x} is already pinned")));
        }
        let inner = self.inner.pin_zero(x).map_err(|_| value_err("pin empties a clause"))?;
        Ok(PyCnf { inner })
    }

    fn __repr__(&self) -> String {
        format!("MonotoneCnf(n_vars={}, clauses={:?})", self.inner.n_vars(), self.clauses())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Hypergraph over 0-based vertices.
#[pyclass(name = "Hypergraph", module = "pycovercount", frozen)]
struct PyHypergraph {
    inner: Hypergraph,
}

#[pymethods]
impl PyHypergraph {
    #[new]
    fn new(n_vertices: usize, edges: Vec<Vec<usize>>) -> PyResult<Self> {
        Ok(PyHypergraph {
            inner: Hypergraph::new(n_vertices, edges).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyHypergraph {
            inner: formats::parse_hypergraph(text).map_err(value_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (seed, n_vertices, n_edges, min_size=2, max_size=3))]
    fn random(seed: u64, n_vertices: usize, n_edges: usize, min_size: usize, max_size: usize) -> PyResult<Self> {
        if min_size == 0 || min_size > max_size || max_size > covercount::matching::MAX_EDGE_SIZE {
            return Err(value_err("need 1 <= min_size <= max_size <= 3"));
        }
        Ok(PyHypergraph {
            inner: oracle::gen_random_deg4_hypergraph(seed, n_vertices, n_edges, min_size..=max_size).map_err(value_err)?,
        })
    }

    fn to_text(&self) -> String {
        formats::to_hypergraph(&self.inner)
    }

    #[getter]
    fn n_vertices(&self) -> usize {
        self.inner.n_vertices()
    }

    #[getter]
    fn edges(&self) -> Vec<Vec<usize>> {
        self.inner.edges().to_vec()
    }

    fn is_uniform(&self, k: usize) -> bool {
        self.inner.is_uniform(k)
    }

    fn to_amo(&self) -> PyAmo {
        PyAmo {
            inner: from_hypergraph(&self.inner),
        }
    }

    fn __repr__(&self) -> String {
        format!("Hypergraph(n_vertices={}, edges={:?})", self.inner.n_vertices(), self.inner.edges())
    }
}

/// At-most-one constraint instance.
#[pyclass(name = "AmoInstance", module = "pycovercount", frozen)]
struct PyAmo {
    inner: AmoInstance,
}

#[pymethods]
impl PyAmo {
    #[new]
    #[pyo3(signature = (n_vars, constraints, pin_one=Vec::new(), pin_zero=Vec::new()))]
    fn new(n_vars: usize, constraints: Vec<Vec<u32>>, pin_one: Vec<u32>, pin_zero: Vec<u32>) -> PyResult<Self> {
        let mut pins = vec![Pin::Free; n_vars];
        for (list, p) in [(pin_one, Pin::One), (pin_zero, Pin::Zero)] {
            for x in list {
                let slot = pins.get_mut(x as usize).ok_or_else(|| value_err(format!("variable {x} out of range")))?;
                if *slot != Pin::Free {
                    return Err(value_err(format!("variable {x} pinned twice")));
                }
                *slot = p;
            }
        }
        Ok(PyAmo {
            inner: AmoInstance::new(n_vars, to_vars(constraints), pins).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyAmo {
            inner: formats::parse_amo_json(text).map_err(value_err)?,
        })
    }

    fn to_json(&self) -> String {
        formats::to_amo_json(&self.inner)
    }

    #[getter]
    fn n_vars(&self) -> usize {
        self.inner.n_vars()
    }

    #[getter]
    fn constraints(&self) -> Vec<Vec<u32>> {
        self.inner.constraints().iter().map(|c| c.iter().map(|v| v.0).collect()).collect()
    }

    fn free_vars(&self) -> Vec<u32> {
        self.inner.free_vars().into_iter().map(|v| v.0).collect()
    }

    /// Raises `ValueError` when the instance is unsatisfiable.
    fn normalize(&self) -> PyResult<Self> {
        Ok(PyAmo {
            inner: self.inner.normalize().map_err(value_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("AmoInstance(n_vars={}, constraints={:?})", self.inner.n_vars(), self.constraints())
    }
}

/// Count estimate.
#[pyclass(name = "Estimate", module = "pycovercount", frozen)]
struct PyEstimate {
    inner: Estimate,
}

#[pymethods]
impl PyEstimate {
    /// `ln Z`, `-inf` when the instance is unsatisfiable.
    #[getter]
    fn log_count(&self) -> f64 {
        self.inner.log_count
    }

    #[getter]
    fn count(&self) -> f64 {
        self.inner.count()
    }

    #[getter]
    fn depth(&self) -> u32 {
        self.inner.depth
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode.name()
    }

    #[getter]
    fn epsilon(&self) -> Option<f64> {
        self.inner.epsilon
    }

    #[getter]
    fn nodes_visited(&self) -> u64 {
        self.inner.nodes_visited
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn truncated(&self) -> bool {
        self.inner.truncated
    }

    #[getter]
    fn factors(&self) -> Vec<(u32, f64)> {
        self.inner.factors.iter().map(|&(v, f)| (v.0, f)).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Estimate(log_count={}, depth={}, mode={:?}, converged={})",
            self.inner.log_count,
            self.inner.depth,
            self.inner.mode.name(),
            self.inner.converged
        )
    }
}

/// Approximate count of satisfying assignments. Formulas with an empty
/// clause count zero; others are brought to well-formed shape first.
#[pyfunction]
#[pyo3(name = "count_cnf", signature = (formula, mode="adaptive", epsilon=0.01, depth=None, node_budget=DEFAULT_NODE_BUDGET))]
fn py_count_cnf(py: Python<'_>, formula: &PyCnf, mode: &str, epsilon: f64, depth: Option<u32>, node_budget: u64) -> PyResult<PyEstimate> {
    let mode = mode_of(mode, epsilon, depth)?;
    let f = if formula.inner.has_empty_clause() {
        formula.inner.clone()
    } else {
        formula.inner.wellform().map_err(value_err)?
    };
    let inner = py.detach(|| count_cnf(&f, mode, node_budget)).map_err(budget_err)?;
    Ok(PyEstimate { inner })
}

fn amo_arg(instance: &Bound<'_, PyAny>) -> PyResult<AmoInstance> {
    if let Ok(h) = instance.cast::<PyHypergraph>() {
        return Ok(from_hypergraph(&h.get().inner));
    }
    if let Ok(a) = instance.cast::<PyAmo>() {
        return Ok(a.get().inner.clone());
    }
    Err(value_err("expected a Hypergraph or AmoInstance"))
}

/// Approximate count of matchings of a hypergraph, or of solutions of an
/// at-most-one instance.
#[pyfunction]
#[pyo3(name = "count_matchings", signature = (instance, mode="adaptive", epsilon=0.01, depth=None, node_budget=DEFAULT_NODE_BUDGET))]
fn py_count_matchings(
    py: Python<'_>,
    instance: &Bound<'_, PyAny>,
    mode: &str,
    epsilon: f64,
    depth: Option<u32>,
    node_budget: u64,
) -> PyResult<PyEstimate> {
    let mode = mode_of(mode, epsilon, depth)?;
    let inst = amo_arg(instance)?;
    let inner = py.detach(|| count_matchings(&inst, mode, node_budget)).map_err(budget_err)?;
    Ok(PyEstimate { inner })
}

#[pyfunction]
#[pyo3(signature = (formula, cap=DEFAULT_ORACLE_CAP))]
fn exact_count_cnf(py: Python<'_>, formula: &PyCnf, cap: usize) -> PyResult<BigUint> {
    let f = formula.inner.clone();
    Ok(py.detach(|| oracle::exact_count_cnf(&f, cap)).map_err(oracle_err)?.0)
}

#[pyfunction]
#[pyo3(signature = (instance, cap=DEFAULT_ORACLE_CAP))]
fn exact_count_matchings(py: Python<'_>, instance: &Bound<'_, PyAny>, cap: usize) -> PyResult<BigUint> {
    let inst = amo_arg(instance)?;
    Ok(py.detach(|| oracle::exact_count_amo(&inst, cap)).map_err(oracle_err)?.0)
}

/// Truncated marginal ratio `P(x=0)/P(x=1)` of a well-formed formula.
#[pyfunction]
#[pyo3(signature = (formula, x, depth, node_budget=DEFAULT_NODE_BUDGET))]
fn marginal(formula: &PyCnf, x: u32, depth: u32, node_budget: u64) -> PyResult<f64> {
    let f = &formula.inner;
    let x = var(x, f.n_vars())?;
    if !f.is_well_formed() || !f.is_free(x) {
        return Err(value_err("needs a well-formed formula and a free variable"));
    }
    let policy = TruncationPolicy::with_budget(node_budget);
    Ok(marginal_truncated(f, x, depth, &policy).map_err(budget_err)?.value)
}

/// Exact marginal ratio as a `fractions.Fraction`, by the untruncated recursion.
#[pyfunction]
#[pyo3(signature = (formula, x, node_budget=DEFAULT_NODE_BUDGET))]
fn marginal_exact<'py>(py: Python<'py>, formula: &PyCnf, x: u32, node_budget: u64) -> PyResult<Bound<'py, PyAny>> {
    let f = &formula.inner;
    let x = var(x, f.n_vars())?;
    if !f.is_well_formed() || !f.is_free(x) {
        return Err(value_err("needs a well-formed formula and a free variable"));
    }
    let r = marginal_exact_recursive(f, x, node_budget).map_err(budget_err)?;
    fraction(py, &r)
}

/// Truncated and exact marginal ratio of a normalised at-most-one instance.
#[pyfunction]
#[pyo3(signature = (instance, x, depth=None, node_budget=DEFAULT_NODE_BUDGET))]
fn marginal_amo<'py>(py: Python<'py>, instance: &PyAmo, x: u32, depth: Option<u32>, node_budget: u64) -> PyResult<Bound<'py, PyAny>> {
    let inst = &instance.inner;
    let x = var(x, inst.n_vars())?;
    if !inst.is_normalized() || !inst.is_free(x) {
        return Err(value_err("needs a normalised instance and a free variable"));
    }
    match depth {
        Some(l) => Ok(marginal_truncated_amo(inst, x, l, node_budget)
            .map_err(budget_err)?
            .value
            .into_pyobject(py)?
            .into_any()),
        None => fraction(py, &marginal_exact_amo(inst, x, node_budget).map_err(budget_err)?),
    }
}

#[pyfunction]
#[pyo3(name = "certified_depth", signature = (n, epsilon, problem="cnf"))]
fn py_certified_depth(n: usize, epsilon: f64, problem: &str) -> PyResult<u32> {
    if n == 0 || !(epsilon > 0.0) {
        return Err(value_err("need n >= 1 and epsilon > 0"));
    }
    match problem {
        "cnf" => Ok(certified_depth_cnf(n, epsilon)),
        "matching" => Ok(certified_depth_amo(n, epsilon)),
        other => Err(value_err(format!("unknown problem {other:?}"))),
    }
}

fn family_of(name: &str) -> PyResult<Family> {
    match name {
        "cnf-two-layer" => Ok(Family::CnfTwoLayer),
        "cnf-single-layer" => Ok(Family::CnfSingleLayer),
        "amo-two-layer" => Ok(Family::AmoTwoLayer),
        "amo-single-layer" => Ok(Family::AmoSingleLayer),
        other => Err(value_err(format!("unknown family {other:?}"))),
    }
}

/// Decay rate of `family` with widths `w` at `point`.
#[pyfunction]
fn kappa(family: &str, w: Vec<usize>, point: Vec<f64>) -> PyResult<f64> {
    let spec = KappaSpec::new(family_of(family)?, w).map_err(value_err)?;
    eval_kappa(&spec, &point).map_err(value_err)
}

/// Runs the bound suite; returns `(all_passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (resolution=64, refine_passes=4))]
fn verify_decay(py: Python<'_>, resolution: usize, refine_passes: usize) -> PyResult<(bool, String)> {
    if resolution < covercount::decay::MIN_RESOLUTION || refine_passes < covercount::decay::MIN_REFINE_PASSES {
        return Err(value_err("resolution >= 64 and refine_passes >= 2 required"));
    }
    let report = py.detach(|| {
        verify_all_bounds(SuiteConfig {
            resolution,
            refine_passes,
        })
    });
    let json = serde_json::to_string(&report).map_err(value_err)?;
    Ok((report.all_passed(), json))
}

#[pymodule]
fn pycovercount(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    m.add_class::<PyCnf>()?;
    m.add_class::<PyHypergraph>()?;
    m.add_class::<PyAmo>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(py_count_cnf, m)?)?;
    m.add_function(wrap_pyfunction!(py_count_matchings, m)?)?;
    m.add_function(wrap_pyfunction!(exact_count_cnf, m)?)?;
    m.add_function(wrap_pyfunction!(exact_count_matchings, m)?)?;
    m.add_function(wrap_pyfunction!(marginal, m)?)?;
    m.add_function(wrap_pyfunction!(marginal_exact, m)?)?;
    m.add_function(wrap_pyfunction!(marginal_amo, m)?)?;
    m.add_function(wrap_pyfunction!(py_certified_depth, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(verify_decay, m)?)?;
    Ok(())
}
