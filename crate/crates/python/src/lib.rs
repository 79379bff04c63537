use dirflow::classify::RealizationConfig;
use dirflow::cli::{self, MethodArg};
use dirflow::harness::{self, EulerianMode, InstanceSpec, WeightMode};
use dirflow::network::{eulerian_status, min_cut};
use dirflow::solvers::{self, Multiflow};
use dirflow::{DirectedDistance, Error, Network, PartialCut, Rational};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyTuple};
use serde_json::{Map, Number, Value};
use std::collections::BTreeSet;

create_exception!(dirflow_py, DirflowError, PyException);
create_exception!(dirflow_py, HypothesisError, DirflowError);

fn err(e: Error) -> PyErr {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::UnknownElement(_) => PyValueError::new_err(e.to_string()),
        Error::Hypothesis(_) => HypothesisError::new_err(e.to_string()),
        _ => DirflowError::new_err(e.to_string()),
    }
}

/// Python object to JSON. Fractions become `[num, den]` pairs.
fn to_value(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    if obj.is_none() {
        return Ok(Value::Null);
    }
    if obj.is_instance_of::<PyBool>() {
        return Ok(Value::Bool(obj.extract()?));
    }
    if let Ok(i) = obj.extract::<i64>() {
        return Ok(Value::Number(i.into()));
    }
    if let Ok(s) = obj.extract::<String>() {
        return Ok(Value::String(s));
    }
    if let Ok(d) = obj.cast::<PyDict>() {
        let mut map = Map::new();
        for (k, v) in d.iter() {
            map.insert(k.extract::<String>()?, to_value(&v)?);
        }
        return Ok(Value::Object(map));
    }
    if let Ok(l) = obj.cast::<PyList>() {
        return l.iter().map(|x| to_value(&x)).collect::<PyResult<_>>().map(Value::Array);
    }
    if let Ok(t) = obj.cast::<PyTuple>() {
        return t.iter().map(|x| to_value(&x)).collect::<PyResult<_>>().map(Value::Array);
    }
    if obj.hasattr("numerator")? && obj.hasattr("denominator")? {
        let num = to_value(&obj.getattr("numerator")?)?;
        let den = to_value(&obj.getattr("denominator")?)?;
        return Ok(Value::Array(vec![num, den]));
    }
    // large ints travel as decimal strings
    if obj.hasattr("bit_length")? {
        return Ok(Value::String(obj.str()?.to_string()));
    }
    Err(PyValueError::new_err(format!("cannot convert {} to JSON", obj.get_type().name()?)))
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => number_to_py(py, n)?,
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn number_to_py<'py>(py: Python<'py>, n: &Number) -> PyResult<Bound<'py, PyAny>> {
    if let Some(i) = n.as_i64() {
        Ok(i.into_pyobject(py)?.into_any())
    } else if let Some(u) = n.as_u64() {
        Ok(u.into_pyobject(py)?.into_any())
    } else {
        Ok(n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any())
    }
}

fn fraction<'py>(py: Python<'py>, x: &Rational) -> PyResult<Bound<'py, PyAny>> {
    let cls = py.import("fractions")?.getattr("Fraction")?;
    cls.call1((format!("{}/{}", x.numer(), x.denom()),))
}

fn parse_method(s: &str) -> PyResult<MethodArg> {
    match s {
        "lp" => Ok(MethodArg::Lp),
        "tree" => Ok(MethodArg::Tree),
        "mcc" => Ok(MethodArg::Mcc),
        "auto" => Ok(MethodArg::Auto),
        other => Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
}

fn parse_family(obj: &Bound<'_, PyAny>, ground: &[String]) -> PyResult<Vec<PartialCut>> {
    let v = to_value(obj)?;
    v.as_array()
        .ok_or_else(|| PyValueError::new_err("family must be a list of cuts"))?
        .iter()
        .map(|c| PartialCut::from_json(c, ground).map_err(err))
        .collect()
}

/// Directed terminal weight with exact rational entries.
#[pyclass(name = "Distance", module = "dirflow_py", frozen)]
struct PyDistance {
    inner: DirectedDistance,
}

#[pymethods]
impl PyDistance {
    /// Entries may be ints, `fractions.Fraction`, `[num, den]` pairs or
    /// `{"num", "den"}` dicts.
    #[new]
    fn new(elements: Vec<String>, rows: &Bound<'_, PyAny>) -> PyResult<Self> {
        let v = serde_json::json!({ "elements": elements, "rows": to_value(rows)? });
        Ok(Self { inner: DirectedDistance::from_json(&v).map_err(err)? })
    }

    #[staticmethod]
    fn from_dict(d: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self { inner: DirectedDistance::from_json(&to_value(d)?).map_err(err)? })
    }

    #[staticmethod]
    fn all_one(elements: Vec<String>) -> Self {
        Self { inner: DirectedDistance::all_one(elements) }
    }

    #[getter]
    fn elements(&self) -> Vec<String> {
        self.inner.elements().to_vec()
    }

    fn value<'py>(&self, py: Python<'py>, s: &str, t: &str) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.value(s, t).map_err(err)?)
    }

    fn is_metric(&self) -> bool {
        self.inner.is_metric()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.to_json())
    }

    /// Interval, oriented-tree and commodity-graph classification.
    #[pyo3(signature = (budget=None, seed=None, samples=2000))]
    fn classify<'py>(
        &self,
        py: Python<'py>,
        budget: Option<usize>,
        seed: Option<u64>,
        samples: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mut config = RealizationConfig::default();
        if let Some(b) = budget {
            config.node_budget = b;
        }
        let (report, _) = cli::classify_report(&self.inner, &config, seed.map(|s| (s, samples))).map_err(err)?;
        to_py(py, &report)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Distance({})", self.inner.to_json())
    }
}

/// Directed supply network with integer capacities.
#[pyclass(name = "Network", module = "dirflow_py", frozen)]
struct PyNetwork {
    inner: Network,
}

impl PyNetwork {
    fn indices(&self, names: Vec<String>) -> PyResult<BTreeSet<usize>> {
        names.iter().map(|n| self.inner.node_index(n).map_err(err)).collect()
    }
}

#[pymethods]
impl PyNetwork {
    /// `edges` holds `(tail, head, capacity)` triples.
    #[new]
    fn new(nodes: Vec<String>, terminals: Vec<String>, edges: Vec<(String, String, i64)>) -> PyResult<Self> {
        let v = serde_json::json!({ "nodes": nodes, "terminals": terminals, "edges": edges });
        Ok(Self { inner: Network::from_json(&v).map_err(err)? })
    }

    #[staticmethod]
    fn from_dict(d: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self { inner: Network::from_json(&to_value(d)?).map_err(err)? })
    }

    #[getter]
    fn nodes(&self) -> Vec<String> {
        self.inner.nodes().to_vec()
    }

    #[getter]
    fn terminals(&self) -> Vec<String> {
        self.inner.terminal_names()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.to_json())
    }

    fn to_dot(&self) -> String {
        self.inner.to_dot()
    }

    /// Minimum `A -> B` cut: capacity and the source side.
    fn min_cut(&self, a: Vec<String>, b: Vec<String>) -> PyResult<(i64, Vec<String>)> {
        let (a, b) = (self.indices(a)?, self.indices(b)?);
        let (c, x) = min_cut(&self.inner, &a, &b).map_err(err)?;
        Ok((c, x.into_iter().map(|u| self.inner.nodes()[u].clone()).collect()))
    }

    /// Eulerian flags relative to a set of proper terminals.
    #[pyo3(signature = (proper=Vec::new()))]
    fn eulerian_status<'py>(&self, py: Python<'py>, proper: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
        let st = eulerian_status(&self.inner, &self.indices(proper)?);
        let names = |v: &[usize]| v.iter().map(|&u| self.inner.nodes()[u].clone()).collect::<Vec<_>>();
        let v = serde_json::json!({
            "inner": st.inner,
            "totally": st.totally,
            "properly_inner": st.properly_inner,
            "violating_nodes": names(&st.violating_nodes),
            "violating_terminals": names(&st.violating_terminals),
        });
        to_py(py, &v)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Network({})", self.inner.to_json())
    }
}

/// Maximum `mu`-weighted multiflow; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (mu, net, method="auto"))]
fn solve<'py>(py: Python<'py>, mu: &PyDistance, net: &PyNetwork, method: &str) -> PyResult<Bound<'py, PyAny>> {
    let report = cli::solve(&mu.inner, &net.inner, parse_method(method)?, &RealizationConfig::default()).map_err(err)?;
    to_py(py, &report.to_json(&net.inner))
}

/// Integral multiflow locking every cut of a laminar family.
#[pyfunction]
fn lock<'py>(py: Python<'py>, net: &PyNetwork, family: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let ground = net.inner.terminal_names();
    let family = parse_family(family, &ground)?;
    let report = solvers::lock(&family, &ground, &net.inner).map_err(err)?;
    to_py(py, &report.to_json(&net.inner))
}

/// Whether `flow` (a multiflow dict) locks every cut of `family`.
#[pyfunction]
fn verify(net: &PyNetwork, family: &Bound<'_, PyAny>, flow: &Bound<'_, PyAny>) -> PyResult<bool> {
    let ground = net.inner.terminal_names();
    let family = parse_family(family, &ground)?;
    let flow = to_value(flow)?;
    let f = Multiflow::from_json(flow.get("multiflow").unwrap_or(&flow), &net.inner).map_err(err)?;
    solvers::verify_locking(&f, &family, &ground, &net.inner).map_err(err)
}

/// Seeded random instance: `(network, distance)`.
#[pyfunction]
#[pyo3(signature = (seed, nodes=6, terminals=3, edges=10, capacity=3, eulerian="none", weight="random_distance"))]
fn generate(
    seed: u64,
    nodes: usize,
    terminals: usize,
    edges: usize,
    capacity: i64,
    eulerian: &str,
    weight: &str,
) -> PyResult<(PyNetwork, PyDistance)> {
    let spec = InstanceSpec {
        seed,
        node_count: nodes,
        terminal_count: terminals,
        edge_count: edges,
        capacity,
        eulerian_mode: EulerianMode::parse(eulerian).map_err(err)?,
        weight_mode: WeightMode::parse(weight).map_err(err)?,
    };
    let inst = harness::generate(&spec).map_err(err)?;
    Ok((PyNetwork { inner: inst.net }, PyDistance { inner: inst.mu }))
}

#[pymodule]
pub fn dirflow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDistance>()?;
    m.add_class::<PyNetwork>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(lock, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add("DirflowError", m.py().get_type::<DirflowError>())?;
    m.add("HypothesisError", m.py().get_type::<HypothesisError>())?;
    Ok(())
}
