use lipkit::certify::{self, Certificate};
use lipkit::extension::{extend_to_interval, mcshane_envelopes};
use lipkit::local_lipschitz::{
    decompose, generate_local_witness, local_extend, LocalEntry, LocalWitness,
};
use lipkit::metric_space::{validate_metric, Edge};
use lipkit::partition_of_unity::{frolik_grouped, Ball, CozeroCover};
use lipkit::scalar_field::global_lip_values;
use lipkit::selection::insert;
use lipkit::{Field, Interval, LipError, Subset};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(lipkit, LipkitError, PyValueError);

/// Witness entries `(p, delta, K)`.
type Entries = Vec<(usize, f64, f64)>;

fn err(e: LipError) -> PyErr {
    LipkitError::new_err(e.to_string())
}

/// A finite metric space.
#[pyclass(name = "MetricSpace", module = "lipkit", frozen)]
pub struct PyMetricSpace {
    inner: lipkit::MetricSpace,
}

#[pymethods]
impl PyMetricSpace {
    #[staticmethod]
    fn from_matrix(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: lipkit::MetricSpace::from_matrix(rows).map_err(err)?,
        })
    }

    #[staticmethod]
    fn euclidean(coords: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: lipkit::MetricSpace::euclidean(coords).map_err(err)?,
        })
    }

    #[staticmethod]
    fn grid(lo: f64, hi: f64, step: f64) -> PyResult<Self> {
        Ok(Self {
            inner: lipkit::MetricSpace::grid(lo, hi, step).map_err(err)?,
        })
    }

    /// Shortest-path metric of a weighted graph given as `(u, v, w)` triples.
    #[staticmethod]
    fn graph(nodes: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|(u, v, w)| Edge { u, v, w })
            .collect();
        Ok(Self {
            inner: lipkit::MetricSpace::graph(nodes, &edges).map_err(err)?,
        })
    }

    fn dist(&self, p: usize, q: usize) -> PyResult<f64> {
        self.inner.dist(p, q).map_err(err)
    }

    fn is_metric(&self) -> bool {
        validate_metric(&self.inner).is_valid()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "MetricSpace({}, {} points)",
            self.inner.backend_name(),
            self.inner.len()
        )
    }
}

fn subset_field(
    space: &lipkit::MetricSpace,
    ids: &[usize],
    values: &[f64],
) -> PyResult<(Subset, Field)> {
    if ids.len() != values.len() {
        return Err(PyValueError::new_err("ids and values differ in length"));
    }
    let a = space.subset(ids.iter().copied()).map_err(err)?;
    let phi = Field::partial(space.len(), ids.iter().copied().zip(values.iter().copied()))
        .map_err(err)?;
    Ok((a, phi))
}

fn interval(lo: Option<f64>, hi: Option<f64>) -> Interval {
    Interval::new(
        lo.unwrap_or(f64::NEG_INFINITY),
        hi.unwrap_or(f64::INFINITY),
        false,
        false,
    )
}

fn witness(entries: Entries) -> PyResult<LocalWitness> {
    LocalWitness::new(
        entries
            .into_iter()
            .map(|(p, delta, k)| LocalEntry { p, delta, k })
            .collect(),
    )
    .map_err(err)
}

fn tabulate(space: &lipkit::MetricSpace, f: &Field) -> PyResult<Vec<f64>> {
    f.tabulate(space).map_err(err)
}

fn cert_dict<'py>(py: Python<'py>, c: &Certificate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let kind = format!("{:?}", c.kind);
    d.set_item("kind", kind.to_lowercase())?;
    d.set_item("pass", c.pass)?;
    d.set_item("worst_violation", c.worst_violation)?;
    d.set_item("tolerance", c.tolerance)?;
    d.set_item("witness", c.witness.clone())?;
    d.set_item("checked", c.checked)?;
    Ok(d)
}

/// Lower and upper McShane envelopes of `K`-Lipschitz data on `ids`.
#[pyfunction]
fn envelopes(
    space: &PyMetricSpace,
    ids: Vec<usize>,
    values: Vec<f64>,
    k: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let s = &space.inner;
    let (a, phi) = subset_field(s, &ids, &values)?;
    let env = mcshane_envelopes(s, &a, &phi, k).map_err(err)?;
    Ok((tabulate(s, &env.lower)?, tabulate(s, &env.upper)?))
}

/// `K`-Lipschitz extension with values in `[lo, hi]`; a missing end is
/// unbounded.
#[pyfunction]
#[pyo3(signature = (space, ids, values, k, lo=None, hi=None))]
fn extend(
    space: &PyMetricSpace,
    ids: Vec<usize>,
    values: Vec<f64>,
    k: f64,
    lo: Option<f64>,
    hi: Option<f64>,
) -> PyResult<Vec<f64>> {
    let s = &space.inner;
    let (a, phi) = subset_field(s, &ids, &values)?;
    let f = extend_to_interval(s, &a, &phi, k, &interval(lo, hi)).map_err(err)?;
    tabulate(s, &f)
}

/// Locally Lipschitz extension from `(p, delta, K)` witness entries; entries
/// centred outside `ids` are ignored. Returns the values and a witness for
/// the output.
#[pyfunction]
#[pyo3(signature = (space, ids, values, witness_entries, lo=None, hi=None))]
fn extend_local(
    space: &PyMetricSpace,
    ids: Vec<usize>,
    values: Vec<f64>,
    witness_entries: Entries,
    lo: Option<f64>,
    hi: Option<f64>,
) -> PyResult<(Vec<f64>, Entries)> {
    let s = &space.inner;
    let (a, phi) = subset_field(s, &ids, &values)?;
    let w = witness(
        witness_entries
            .into_iter()
            .filter(|e| a.contains(e.0))
            .collect(),
    )?;
    let ext = local_extend(s, &a, &phi, &w, &interval(lo, hi)).map_err(err)?;
    let out = ext
        .witness
        .entries()
        .iter()
        .map(|e| (e.p, e.delta, e.k))
        .collect();
    Ok((tabulate(s, &ext.field)?, out))
}

/// Witness with radius `deltas[p]` at each point for fully tabulated values.
#[pyfunction]
fn local_witness(space: &PyMetricSpace, values: Vec<f64>, deltas: Vec<f64>) -> PyResult<Entries> {
    let w = generate_local_witness(&space.inner, &values, &deltas).map_err(err)?;
    Ok(w.entries().iter().map(|e| (e.p, e.delta, e.k)).collect())
}

/// Members of a partition of unity subordinated to unions of open balls,
/// each union a list of `(center, radius)`.
#[pyfunction]
#[pyo3(signature = (space, unions, cap=1.0))]
fn partition_of_unity(
    space: &PyMetricSpace,
    unions: Vec<Vec<(usize, f64)>>,
    cap: f64,
) -> PyResult<Vec<Vec<f64>>> {
    let s = &space.inner;
    let unions: Vec<Vec<Ball>> = unions
        .into_iter()
        .map(|u| {
            u.into_iter()
                .map(|(center, radius)| Ball { center, radius })
                .collect()
        })
        .collect();
    let cover = CozeroCover::from_balls(s, &unions, cap).map_err(err)?;
    let fp = frolik_grouped(s, &cover).map_err(err)?;
    fp.pou.tabulate(s).map_err(err)
}

/// Bounded Lipschitz members summing to a locally Lipschitz function.
#[pyfunction]
fn decompose_values(
    space: &PyMetricSpace,
    values: Vec<f64>,
    witness_entries: Entries,
) -> PyResult<Vec<Vec<f64>>> {
    let s = &space.inner;
    let w = witness(witness_entries)?;
    let dec = decompose(s, &Field::tabulated(values), &w).map_err(err)?;
    dec.members.iter().map(|m| tabulate(s, m)).collect()
}

/// A locally Lipschitz function strictly between the bounds; a missing
/// bound is infinite.
#[pyfunction]
#[pyo3(signature = (space, lower=None, upper=None))]
fn select(
    space: &PyMetricSpace,
    lower: Option<Vec<f64>>,
    upper: Option<Vec<f64>>,
) -> PyResult<Vec<f64>> {
    let s = &space.inner;
    let sel = insert(
        s,
        lower.map(Field::tabulated),
        upper.map(Field::tabulated),
        None,
    )
    .map_err(err)?;
    Ok(sel.values)
}

#[pyfunction]
fn global_lip(space: &PyMetricSpace, values: Vec<f64>) -> f64 {
    global_lip_values(&space.inner, &values).value
}

#[pyfunction]
#[pyo3(signature = (space, values, k, tol=certify::DEFAULT_TOL))]
fn check_k_lipschitz<'py>(
    py: Python<'py>,
    space: &PyMetricSpace,
    values: Vec<f64>,
    k: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    cert_dict(
        py,
        &certify::check_k_lipschitz(&space.inner, &values, k, tol),
    )
}

#[pyfunction]
#[pyo3(signature = (space, values, witness_entries, tol=certify::DEFAULT_TOL))]
fn check_local_witness<'py>(
    py: Python<'py>,
    space: &PyMetricSpace,
    values: Vec<f64>,
    witness_entries: Entries,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let w = witness(witness_entries)?;
    cert_dict(
        py,
        &certify::certify_local_witness(&space.inner, &values, &w, None, tol),
    )
}

#[pymodule]
#[pyo3(name = "lipkit")]
fn lipkit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LipkitError", m.py().get_type::<LipkitError>())?;
    m.add_class::<PyMetricSpace>()?;
    m.add_function(wrap_pyfunction!(envelopes, m)?)?;
    m.add_function(wrap_pyfunction!(extend, m)?)?;
    m.add_function(wrap_pyfunction!(extend_local, m)?)?;
    m.add_function(wrap_pyfunction!(local_witness, m)?)?;
    m.add_function(wrap_pyfunction!(partition_of_unity, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_values, m)?)?;
    m.add_function(wrap_pyfunction!(select, m)?)?;
    m.add_function(wrap_pyfunction!(global_lip, m)?)?;
    m.add_function(wrap_pyfunction!(check_k_lipschitz, m)?)?;
    m.add_function(wrap_pyfunction!(check_local_witness, m)?)?;
    Ok(())
}
