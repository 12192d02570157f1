//! Python bindings for the ballistic cluster simulator.

use ballistic_cluster::fusion::GateParams;
use ballistic_cluster::graphstate::{self as gs, FusionBasis, FusionOutcome, Pauli};
use ballistic_cluster::lattice::{build_instance, BondKind, Dims, LossMode, LossSpec};
use ballistic_cluster::microcluster::default_assignment;
use ballistic_cluster::percolation::{self, sweeps, threshold, LatticeKind, ModelConfig};
use ballistic_cluster::{oracle, resources, rng};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (_, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let l = PyList::empty(py);
            for x in a {
                l.append(to_py(py, x)?)?;
            }
            l.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn ser<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(v).map_err(err)?)
}

fn pauli(s: &str) -> PyResult<Pauli> {
    match s.to_ascii_uppercase().as_str() {
        "X" => Ok(Pauli::X),
        "Y" => Ok(Pauli::Y),
        "Z" => Ok(Pauli::Z),
        other => Err(PyValueError::new_err(format!("unknown Pauli axis '{other}'"))),
    }
}

fn loss_mode(s: &str) -> PyResult<LossMode> {
    match s {
        "unheralded" => Ok(LossMode::Unheralded),
        "heralded" => Ok(LossMode::Heralded),
        other => Err(PyValueError::new_err(format!("unknown loss mode '{other}'"))),
    }
}

fn model(dims: (usize, usize, usize), p: f64, p_loss: f64, mode: &str) -> PyResult<ModelConfig> {
    let d = Dims::new(dims.0, dims.1, dims.2);
    d.validate().map_err(err)?;
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&p_loss) {
        return Err(PyValueError::new_err("probabilities must lie in [0, 1]"));
    }
    let loss = LossSpec { p_loss, mode: loss_mode(mode)?, ..LossSpec::default() };
    Ok(ModelConfig::new(d, p).with_loss(loss))
}

/// Tagged graph state with exact Pauli-measurement and fusion rules.
#[pyclass(name = "GraphState")]
struct PyGraphState {
    inner: gs::GraphState,
}

#[pymethods]
impl PyGraphState {
    #[new]
    fn new() -> Self {
        PyGraphState { inner: gs::GraphState::new() }
    }

    #[staticmethod]
    fn ghz(ids: Vec<u32>) -> PyResult<Self> {
        Ok(PyGraphState { inner: gs::GraphState::ghz(&ids).map_err(err)? })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyGraphState { inner: gs::from_text(text).map_err(err)? })
    }

    fn to_text(&self) -> String {
        gs::to_text(&self.inner)
    }

    fn add_vertex(&mut self, v: u32) -> PyResult<()> {
        self.inner.add_vertex(v).map_err(err)
    }

    fn add_edge(&mut self, a: u32, b: u32) -> PyResult<()> {
        self.inner.add_edge(a, b).map_err(err)
    }

    fn vertices(&self) -> Vec<u32> {
        self.inner.vertices().collect()
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges()
    }

    fn local_complement(&mut self, v: u32) -> PyResult<()> {
        self.inner.local_complement(v).map_err(err)
    }

    /// Measures the physical Pauli `axis` on `v` and removes it.
    fn measure_pauli(&mut self, v: u32, axis: &str) -> PyResult<()> {
        self.inner.measure_pauli(v, pauli(axis)?).map_err(err)
    }

    #[pyo3(signature = (v1, v2, success, mode = "standard", failure = (String::from("X"), String::from("X"))))]
    fn fuse(&mut self, v1: u32, v2: u32, success: bool, mode: &str, failure: (String, String)) -> PyResult<()> {
        let basis = match mode {
            "standard" => FusionBasis::standard(),
            "rotated" => FusionBasis::rotated(),
            other => return Err(PyValueError::new_err(format!("unknown fusion mode '{other}'"))),
        }
        .with_failure(pauli(&failure.0)?, pauli(&failure.1)?);
        let outcome = if success { FusionOutcome::Success } else { FusionOutcome::Failure };
        self.inner.fuse(v1, v2, outcome, basis).map_err(err)
    }

    fn components(&self) -> Vec<Vec<u32>> {
        self.inner.components().into_iter().map(|c| c.into_iter().collect()).collect()
    }

    /// Stabilizer generators of the physical state, one string per qubit.
    fn stabilizers(&self) -> PyResult<Vec<String>> {
        let t = self.inner.to_tableau().map_err(err)?;
        Ok(t.to_string().lines().map(str::to_owned).collect())
    }

    fn __repr__(&self) -> String {
        format!("GraphState(vertices={}, edges={})", self.inner.vertex_count(), self.inner.edges().len())
    }
}

/// One lattice instance: bonds between surviving centres.
#[pyfunction]
#[pyo3(signature = (dims, p, seed, run = 0, p_loss = 0.0, mode = "unheralded"))]
fn build_lattice<'py>(
    py: Python<'py>,
    dims: (usize, usize, usize),
    p: f64,
    seed: u64,
    run: u64,
    p_loss: f64,
    mode: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let m = model(dims, p, p_loss, mode)?;
    let g = build_instance(m.dims, &m.gate, &m.loss, &m.assignment, &mut rng::run_rng(seed, run));
    let d = PyDict::new(py);
    let bonds: Vec<(u32, u32, &str)> = g
        .bonds
        .iter()
        .map(|b| (b.a, b.b, if b.kind == BondKind::Lattice { "lattice" } else { "diagonal" }))
        .collect();
    d.set_item("bonds", bonds)?;
    d.set_item("live", (0..g.sites.len()).filter(|&s| g.is_live(s)).collect::<Vec<_>>())?;
    d.set_item("classes", g.sites.iter().map(|s| s.class().name()).collect::<Vec<_>>())?;
    d.set_item("spans", percolation::spans(&g))?;
    Ok(d.into_any())
}

#[pyfunction]
#[pyo3(signature = (dims, p, n_runs, seed, p_loss = 0.0, mode = "unheralded", calibration = false))]
fn estimate_pi<'py>(
    py: Python<'py>,
    dims: (usize, usize, usize),
    p: f64,
    n_runs: u64,
    seed: u64,
    p_loss: f64,
    mode: &str,
    calibration: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let mut m = model(dims, p, p_loss, mode)?;
    if calibration {
        m.kind = LatticeKind::CubicBond;
    }
    let stats = py.detach(|| percolation::estimate_pi(&m, n_runs, seed)).map_err(err)?;
    ser(py, &stats)
}

#[pyfunction]
#[pyo3(signature = (sizes, p_grid, n_runs, seed, calibration = false))]
fn find_threshold<'py>(
    py: Python<'py>,
    sizes: Vec<usize>,
    p_grid: Vec<f64>,
    n_runs: u64,
    seed: u64,
    calibration: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let mut m = ModelConfig::new(Dims::cube(1), 0.0);
    if calibration {
        m.kind = LatticeKind::CubicBond;
    }
    let est = py.detach(|| threshold::find_threshold(&m, &sizes, &p_grid, n_runs, seed)).map_err(err)?;
    ser(py, &est)
}

#[pyfunction]
#[pyo3(signature = (l, p, p_loss_grid, n_runs, seed, mode = "unheralded"))]
fn loss_sweep<'py>(
    py: Python<'py>,
    l: usize,
    p: f64,
    p_loss_grid: Vec<f64>,
    n_runs: u64,
    seed: u64,
    mode: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let m = model((l, l, l), p, 0.0, mode)?;
    let mode = loss_mode(mode)?;
    let r = py.detach(|| sweeps::loss_sweep(&m, &p_loss_grid, mode, n_runs, seed)).map_err(err)?;
    ser(py, &r)
}

#[pyfunction]
fn lattice_resources<'py>(py: Python<'py>, n: u64, k: u64, l: u64) -> PyResult<Bound<'py, PyAny>> {
    let shape = resources::ComputationShape::new(n, k, l).map_err(err)?;
    ser(py, &resources::lattice_resources(shape))
}

#[pyfunction]
#[pyo3(signature = (ghz_size, paper_compat = true))]
fn bell_pairs_per_ghz(ghz_size: u32, paper_compat: bool) -> PyResult<u64> {
    let spec = match ghz_size {
        3 => resources::SourceSpec::ghz3(),
        4 => resources::SourceSpec::ghz4(),
        _ => return Err(PyValueError::new_err("ghz_size must be 3 or 4")),
    };
    let mode = if paper_compat { resources::CountMode::PaperCompat } else { resources::CountMode::Formula };
    resources::bell_pairs_per_ghz(&spec, mode).map_err(err)
}

#[pyfunction]
fn multiplex_repeats(p_attempt: f64, target_confidence: f64) -> PyResult<u64> {
    let spec = resources::SourceSpec { p_attempt, target_confidence, ..resources::SourceSpec::ghz3() };
    Ok(resources::multiplex_repeats(&spec).map_err(err)?.formula)
}

#[pyfunction]
fn ghz_success_prob(n: u32) -> PyResult<f64> {
    resources::ghz_success_prob(n).map_err(err)
}

/// Rule-versus-tableau check; returns one report per case group.
#[pyfunction]
#[pyo3(signature = (random_cases = 500, seed = 0))]
fn oracle_check<'py>(py: Python<'py>, random_cases: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let reports = py.detach(|| oracle::check_all(&GateParams::default(), random_cases, seed));
    ser(py, &reports)
}

#[pyfunction]
fn default_arm_assignment<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    ser(py, &default_assignment())
}

#[pymodule(name = "ballistic_cluster")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraphState>()?;
    m.add_function(wrap_pyfunction!(build_lattice, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_pi, m)?)?;
    m.add_function(wrap_pyfunction!(find_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(loss_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_resources, m)?)?;
    m.add_function(wrap_pyfunction!(bell_pairs_per_ghz, m)?)?;
    m.add_function(wrap_pyfunction!(multiplex_repeats, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_success_prob, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_check, m)?)?;
    m.add_function(wrap_pyfunction!(default_arm_assignment, m)?)?;
    Ok(())
}
