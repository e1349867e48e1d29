//! Python bindings: graphs, group models, cocycles and presentations.
//!
//! Reports come back as plain dicts with the same shape as the CLI's JSON.

use std::collections::HashMap;

use median_lab_core::cocycle::{euler_cocycle, parse_circle_word, CocycleError, RegisteredCocycle, Sampling};
use median_lab_core::experiments::{cayley_ball as ball, distortion_profile, ExperimentError};
use median_lab_core::graph::{self, all_pairs_distances, GraphError, GraphFormat, GraphKind, DEFAULT_VERTEX_CAP};
use median_lab_core::groups::{order_of, GroupError};
use median_lab_core::median::{self, MedianError};
use median_lab_core::presentation::{
    self as pres, check_relators, count_homs, named_presentation, parse_targets, PresentationError,
    DEFAULT_HOM_BUDGET,
};
use median_lab_core::registry::{parse_model, CliModel};
use median_lab_core::{with_model, DEFAULT_BALL_CAP};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(median_lab, CapExceeded, PyRuntimeError, "A vertex, element, hyperplane or search budget was exceeded.");

struct Error(PyErr);

impl From<Error> for PyErr {
    fn from(e: Error) -> Self {
        e.0
    }
}

macro_rules! errors {
    ($($ty:ty => |$e:ident| $cap:pat),* $(,)?) => {$(
        impl From<$ty> for Error {
            fn from($e: $ty) -> Self {
                let msg = $e.to_string();
                Error(if matches!(&$e, $cap) { CapExceeded::new_err(msg) } else { PyValueError::new_err(msg) })
            }
        }
    )*};
}

errors! {
    GraphError => |e| GraphError::SizeOverflow { .. },
    MedianError => |e| MedianError::TooManyHyperplanes { .. },
    ExperimentError => |e| ExperimentError::CapExceeded { .. },
    CocycleError => |e| CocycleError::Experiment(ExperimentError::CapExceeded { .. }),
    PresentationError => |e| PresentationError::BudgetExceeded { .. },
}

impl From<GroupError> for Error {
    fn from(e: GroupError) -> Self {
        Error(PyValueError::new_err(e.to_string()))
    }
}

type Result<T> = std::result::Result<T, Error>;

/// Serialise through JSON into Python objects.
fn to_py<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn graph_format(name: &str) -> PyResult<GraphFormat> {
    match name {
        "json" => Ok(GraphFormat::Json),
        "edges" | "edgelist" | "csv" => Ok(GraphFormat::EdgeList),
        "dot" => Ok(GraphFormat::Dot),
        other => Err(PyValueError::new_err(format!("unknown graph format `{other}`"))),
    }
}

/// A finite simple graph.
#[pyclass(name = "Graph", frozen)]
struct PyGraph {
    inner: graph::Graph,
}

#[pymethods]
impl PyGraph {
    /// `kind` is hypercube, grid, path, cycle, tree, random, quasiline or complete.
    #[staticmethod]
    #[pyo3(signature = (kind, *, k=None, rows=None, cols=None, n=None, extra=0, seed=0, lam=None, lo=None, hi=None, cap=DEFAULT_VERTEX_CAP))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        kind: &str,
        k: Option<u32>,
        rows: Option<usize>,
        cols: Option<usize>,
        n: Option<usize>,
        extra: usize,
        seed: u64,
        lam: Option<u32>,
        lo: Option<i64>,
        hi: Option<i64>,
        cap: usize,
    ) -> PyResult<Self> {
        fn need<T>(v: Option<T>, name: &str) -> PyResult<T> {
            v.ok_or_else(|| PyValueError::new_err(format!("missing `{name}`")))
        }
        let kind = match kind {
            "hypercube" => GraphKind::Hypercube { k: need(k, "k")? },
            "grid" => GraphKind::Grid { rows: need(rows, "rows")?, cols: need(cols, "cols")? },
            "path" => GraphKind::Path { n: need(n, "n")? },
            "cycle" => GraphKind::Cycle { n: need(n, "n")? },
            "tree" => GraphKind::RandomTree { n: need(n, "n")?, seed },
            "random" => GraphKind::RandomConnected { n: need(n, "n")?, extra, seed },
            "quasiline" => GraphKind::QuasiLine { lambda: need(lam, "lam")?, lo: need(lo, "lo")?, hi: need(hi, "hi")? },
            "complete" => GraphKind::Complete { n: need(n, "n")? },
            other => return Err(PyValueError::new_err(format!("unknown graph kind `{other}`"))),
        };
        Ok(PyGraph { inner: graph::generate_with_cap(&kind, cap).map_err(Error::from)? })
    }

    /// Parses JSON, an edge list or DOT; `format=None` detects it.
    #[staticmethod]
    #[pyo3(signature = (text, format=None))]
    fn parse(text: &str, format: Option<&str>) -> PyResult<Self> {
        let g = match format {
            Some(f) => graph::parse_as(text, graph_format(f)?),
            None => graph::parse(text),
        };
        Ok(PyGraph { inner: g.map_err(Error::from)? })
    }

    #[staticmethod]
    fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyGraph { inner: graph::Graph::from_edges(n, &edges).map_err(Error::from)? })
    }

    #[pyo3(signature = (format="json"))]
    fn serialize(&self, format: &str) -> PyResult<String> {
        Ok(graph::serialize(&self.inner, graph_format(format)?))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    fn distances(&self) -> Vec<Vec<u32>> {
        let dm = all_pairs_distances(&self.inner);
        (0..dm.n()).map(|x| dm.row(x).to_vec()).collect()
    }

    fn product(&self, other: &PyGraph) -> PyResult<Self> {
        Ok(PyGraph { inner: graph::l1_product(&self.inner, &other.inner).map_err(Error::from)? })
    }

    fn check_median<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let dm = all_pairs_distances(&self.inner);
        to_py(py, &median::check_median(&self.inner, &dm))
    }

    #[pyo3(signature = (delta_max=3))]
    fn frontier<'py>(&self, py: Python<'py>, delta_max: u32) -> PyResult<Bound<'py, PyAny>> {
        let dm = all_pairs_distances(&self.inner);
        let fr = median::almost_median_frontier(&self.inner, &dm, delta_max);
        to_py(py, &fr.entries)
    }

    /// Hyperplanes as `{"edges": [...], "halfspaces": [[...], [...]]}` plus the cubical dimension.
    fn hyperplanes<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let dm = all_pairs_distances(&self.inner);
        let hs = median::hyperplanes(&self.inner, &dm).map_err(Error::from)?;
        let dim = median::cubical_dimension(&hs).map_err(Error::from)?;
        let list: Vec<_> =
            hs.iter().map(|h| serde_json::json!({"edges": h.edges, "halfspaces": h.halfspaces})).collect();
        to_py(py, &serde_json::json!({"count": hs.len(), "dimension": dim, "hyperplanes": list}))
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

/// A finite presentation, given by name (`lamplighter`, `GI:I={1}`, `surface:2`, ...) or text.
#[pyclass(name = "Presentation", frozen)]
struct PyPresentation {
    inner: pres::FinitePresentation,
}

#[pymethods]
impl PyPresentation {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyPresentation { inner: named_presentation(text).map_err(Error::from)? })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.inner.generators.clone()
    }

    /// Relator texts followed by relator families.
    #[getter]
    fn relators(&self) -> Vec<String> {
        let fams = self.inner.families.iter().map(|f| f.text().to_string());
        self.inner.relators.iter().map(|r| r.text.clone()).chain(fams).collect()
    }

    #[pyo3(signature = (target, budget=DEFAULT_HOM_BUDGET))]
    fn count_homs(&self, py: Python<'_>, target: &str, budget: u128) -> PyResult<u64> {
        let h = pres::named_target(target).map_err(Error::from)?;
        let r = py.detach(|| count_homs(&self.inner, &h, budget)).map_err(Error::from)?;
        Ok(r.count)
    }

    /// Evaluates every relator in `model`; generators map to the model words in `assign`
    /// or, by default, to the model elements of the same name.
    #[pyo3(signature = (model, assign=None, n_bound=20))]
    fn check<'py>(
        &self,
        py: Python<'py>,
        model: &str,
        assign: Option<HashMap<String, String>>,
        n_bound: i64,
    ) -> PyResult<Bound<'py, PyAny>> {
        fn run<M: CliModel>(
            p: &pres::FinitePresentation,
            m: &M,
            assign: &Option<HashMap<String, String>>,
            n_bound: i64,
        ) -> Result<pres::RelatorReport> {
            let mut images = HashMap::new();
            match assign {
                Some(a) => {
                    for (g, w) in a {
                        images.insert(g.clone(), m.parse_element(w)?);
                    }
                }
                None => {
                    for g in &p.generators {
                        images.insert(g.clone(), m.parse_element(g)?);
                    }
                }
            }
            Ok(check_relators(p, m, &images, n_bound)?)
        }
        let m = parse_model(model).map_err(Error::from)?;
        let r = with_model!(&m, m => run(&self.inner, m, &assign, n_bound))?;
        to_py(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("Presentation({:?})", self.inner.name)
    }
}

/// `"separated by Z2 (4 vs 8)"` or `"indistinguishable by given targets"`.
#[pyfunction]
#[pyo3(signature = (a, b, targets, budget=DEFAULT_HOM_BUDGET))]
fn separate(py: Python<'_>, a: &PyPresentation, b: &PyPresentation, targets: &str, budget: u128) -> PyResult<String> {
    let hs = parse_targets(targets).map_err(Error::from)?;
    let v = py.detach(|| pres::separate(&a.inner, &b.inner, &hs, budget)).map_err(Error::from)?;
    Ok(v.to_string())
}

/// Names of the bundled finite groups of order at most `max_order` (up to 16).
#[pyfunction]
fn small_groups(max_order: usize) -> PyResult<Vec<String>> {
    Ok(pres::small_groups(max_order).map_err(Error::from)?.iter().map(|g| g.name().to_string()).collect())
}

/// Summary of the exact Cayley ball: size and sphere sizes.
#[pyfunction]
#[pyo3(signature = (model, radius, cap=DEFAULT_BALL_CAP))]
fn cayley_ball<'py>(py: Python<'py>, model: &str, radius: u32, cap: usize) -> PyResult<Bound<'py, PyAny>> {
    let m = parse_model(model).map_err(Error::from)?;
    let summary = py.detach(|| with_model!(&m, m => ball(m, radius, cap).map(|b| b.summary_json())));
    to_py(py, &summary.map_err(Error::from)?)
}

/// Word lengths of powers of a central element and the fitted growth exponent.
#[pyfunction]
#[pyo3(signature = (model, radius, central=None, cap=DEFAULT_BALL_CAP))]
fn distortion<'py>(
    py: Python<'py>,
    model: &str,
    radius: u32,
    central: Option<&str>,
    cap: usize,
) -> PyResult<Bound<'py, PyAny>> {
    fn run<M: CliModel>(m: &M, radius: u32, central: Option<&str>, cap: usize) -> Result<serde_json::Value> {
        let text = central
            .or(m.default_central())
            .ok_or_else(|| Error(PyValueError::new_err(format!("`{}` has no default central element", m.name()))))?;
        let z = m.parse_element(text)?;
        let p = distortion_profile(m, &z, radius, cap)?;
        Ok(serde_json::to_value(p).expect("profile serialises"))
    }
    let m = parse_model(model).map_err(Error::from)?;
    let v = with_model!(&m, m => run(m, radius, central, cap))?;
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (model, element, bound=64))]
fn element_order<'py>(py: Python<'py>, model: &str, element: &str, bound: u64) -> PyResult<Bound<'py, PyAny>> {
    let m = parse_model(model).map_err(Error::from)?;
    let o = with_model!(&m, m => m.parse_element(element).map(|e| order_of(m, &e, bound))).map_err(Error::from)?;
    to_py(py, &o)
}

fn sampling(c: &RegisteredCocycle, samples: Option<usize>, radius: Option<u32>, seed: u64, max_len: usize) -> Sampling {
    match (samples, radius) {
        (Some(count), _) => Sampling::Random { count, seed, max_len },
        (None, Some(radius)) => Sampling::Ball { radius },
        (None, None) => c.default_sampling(seed),
    }
}

/// Checks a registered cocycle (`trivial`, `heisenberg`, `euler:T`, `twist:I=...`).
#[pyfunction]
#[pyo3(signature = (name, samples=None, radius=None, seed=0, max_len=6))]
fn check_cocycle<'py>(
    py: Python<'py>,
    name: &str,
    samples: Option<usize>,
    radius: Option<u32>,
    seed: u64,
    max_len: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let c = RegisteredCocycle::parse(name).map_err(Error::from)?;
    let s = sampling(&c, samples, radius, seed, max_len);
    let r = py.detach(|| c.check(s)).map_err(Error::from)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (name, samples=None, radius=None, seed=0, max_len=6))]
fn defect<'py>(
    py: Python<'py>,
    name: &str,
    samples: Option<usize>,
    radius: Option<u32>,
    seed: u64,
    max_len: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let c = RegisteredCocycle::parse(name).map_err(Error::from)?;
    let s = sampling(&c, samples, radius, seed, max_len);
    let r = py.detach(|| c.defect(s)).map_err(Error::from)?;
    to_py(py, &r)
}

/// Euler cocycle value of two circle maps given as words (`r_half`, `A B c`, ...).
#[pyfunction]
fn euler(g: &str, h: &str) -> PyResult<i64> {
    let g = parse_circle_word(g).map_err(Error::from)?;
    let h = parse_circle_word(h).map_err(Error::from)?;
    Ok(euler_cocycle(&g, &h))
}

#[pyfunction]
#[pyo3(signature = (name, element, z=0, n=64))]
fn translation_number<'py>(py: Python<'py>, name: &str, element: &str, z: i64, n: u64) -> PyResult<Bound<'py, PyAny>> {
    let c = RegisteredCocycle::parse(name).map_err(Error::from)?;
    let r = c.translation(z, element, n).map_err(Error::from)?;
    let mut v = serde_json::to_value(&r).expect("report serialises");
    v["value"] = serde_json::json!(r.value().to_string());
    to_py(py, &v)
}

#[pymodule]
fn median_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SCHEMA", median_lab_core::SCHEMA)?;
    m.add("CapExceeded", m.py().get_type::<CapExceeded>())?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyPresentation>()?;
    m.add_function(wrap_pyfunction!(separate, m)?)?;
    m.add_function(wrap_pyfunction!(small_groups, m)?)?;
    m.add_function(wrap_pyfunction!(cayley_ball, m)?)?;
    m.add_function(wrap_pyfunction!(distortion, m)?)?;
    m.add_function(wrap_pyfunction!(element_order, m)?)?;
    m.add_function(wrap_pyfunction!(check_cocycle, m)?)?;
    m.add_function(wrap_pyfunction!(defect, m)?)?;
    m.add_function(wrap_pyfunction!(euler, m)?)?;
    m.add_function(wrap_pyfunction!(translation_number, m)?)?;
    Ok(())
}
