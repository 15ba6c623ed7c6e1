use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use nilforge::coboundary::{decide_coboundary, CubeSource, Target};
use nilforge::cocycle::coboundary_of;
use nilforge::cube::FilteredGroup;
use nilforge::experiments;
use nilforge::gowers;
use nilforge::poly::degree_test;
use nilforge::rho::{self, Rho};
use nilforge::x5::{self, PseudoQuintic, QuadPair};
use nilforge::{DyadicTorus, FuncTable, PolyRep};

fn err(e: nilforge::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// An element `num / 2^level` of the dyadic torus.
#[pyclass(name = "Dyadic", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyDyadic(DyadicTorus);

#[pymethods]
impl PyDyadic {
    #[new]
    fn new(num: i64, level: u8) -> PyResult<Self> {
        DyadicTorus::new(num as i128, level).map(PyDyadic).map_err(err)
    }
    #[staticmethod]
    fn parse(s: &str) -> PyResult<Self> {
        s.parse().map(PyDyadic).map_err(err)
    }
    #[getter]
    fn num(&self) -> u64 {
        self.0.num()
    }
    #[getter]
    fn level(&self) -> u8 {
        self.0.level()
    }
    fn __add__(&self, o: &Self) -> Self {
        PyDyadic(self.0 + o.0)
    }
    fn __sub__(&self, o: &Self) -> Self {
        PyDyadic(self.0 - o.0)
    }
    fn __neg__(&self) -> Self {
        PyDyadic(-self.0)
    }
    fn __float__(&self) -> f64 {
        self.0.num() as f64 / (1u64 << self.0.level()) as f64
    }
    fn __str__(&self) -> String {
        self.0.to_string()
    }
    fn __repr__(&self) -> String {
        format!("Dyadic({}, {})", self.0.num(), self.0.level())
    }
}

/// A polynomial `F_2^n -> T` in the canonical text format.
#[pyclass(name = "Poly", frozen)]
struct PyPoly(PolyRep);

#[pymethods]
impl PyPoly {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        PolyRep::from_text(text).map(PyPoly).map_err(err)
    }
    fn to_text(&self) -> String {
        self.0.to_text()
    }
    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }
    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }
    fn __call__(&self, x: u32) -> PyDyadic {
        PyDyadic(self.0.eval(x))
    }
    /// Values on `0..2^n`, as strings `a/b`.
    fn table(&self) -> Vec<String> {
        self.0.to_table().values().iter().map(|v| v.to_string()).collect()
    }
    fn has_degree_at_most(&self, k: i32) -> bool {
        degree_test(&self.0.to_table(), k)
    }
}

fn read_function(text: &str) -> nilforge::Result<FuncTable> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
    if first.starts_with("PSEUDOQUINTIC") {
        PseudoQuintic::from_text(text).map(|s| s.table())
    } else if first.starts_with("POLY") {
        PolyRep::from_text(text).map(|p| p.to_table())
    } else {
        FuncTable::from_csv(text)
    }
}

/// Pseudo-quintic text of the explicit lift of `(Q_1, Q_2)`.
#[pyfunction]
#[pyo3(signature = (q1, q2, r = 5))]
fn lift(q1: &str, q2: &str, r: u8) -> PyResult<String> {
    let q = QuadPair::new(PolyRep::from_text(q1).map_err(err)?, PolyRep::from_text(q2).map_err(err)?).map_err(err)?;
    Ok(x5::lift(&q, r).map_err(err)?.to_text())
}

/// Pseudo-quintic text of the `S` of a seeded random n-cube of `X_{5,r}`.
#[pyfunction]
#[pyo3(signature = (n, seed, r = 5))]
fn sample_cube(n: usize, seed: u64, r: u8) -> PyResult<String> {
    Ok(x5::sample_ncube_seeded(n, r, seed).map_err(err)?.1.to_text())
}

/// `||e(f)||_{U^{k+1}}` for a POLY, PSEUDOQUINTIC or CSV text.
#[pyfunction]
#[pyo3(signature = (text, k, engine = "recursive"))]
fn gowers_norm(py: Python<'_>, text: &str, k: usize, engine: &str) -> PyResult<f64> {
    let f = read_function(text).map_err(err)?;
    let naive = match engine {
        "naive" => true,
        "recursive" => false,
        e => return Err(PyValueError::new_err(format!("unknown engine {e:?}"))),
    };
    py.detach(|| if naive { gowers::gowers_norm_naive(&f, k) } else { gowers::gowers_norm_recursive(&f, k) })
        .map_err(err)
}

/// `|E e(S - P)|` for a pseudo-quintic text.
#[pyfunction]
fn correlation(py: Python<'_>, pq: &str) -> PyResult<f64> {
    let s = PseudoQuintic::from_text(pq).map_err(err)?;
    py.detach(|| {
        let s = s.with_cache();
        gowers::correlation(&s, &s.p).map(|c| c.magnitude)
    })
    .map_err(err)
}

#[pyfunction]
fn limit_constant(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    let c = py.detach(gowers::limit_constant);
    to_py(py, &c)
}

/// The rho certificate bundle as a dict.
#[pyfunction]
#[pyo3(signature = (samples = 100_000, seed = 0, levels = 8))]
fn verify_rho(py: Python<'_>, samples: u64, seed: u64, levels: u8) -> PyResult<Bound<'_, PyAny>> {
    let (cocycle, strong, cert) = py
        .detach(|| {
            let rho = Rho::standard();
            let levels: Vec<u8> = (1..=levels).collect();
            Ok::<_, nilforge::Error>((
                rho::verify_cocycle(&rho, samples, seed),
                rho::verify_strong_homogeneity(&rho, samples, seed, samples > 0)?,
                rho::non_coboundary_certificate(&rho, samples, seed, &levels)?,
            ))
        })
        .map_err(err)?;
    let passed = cocycle.passed() && strong.passed() && cert.passed();
    to_py(
        py,
        &serde_json::json!({
            "passed": passed,
            "pairing": cert.certificate.pairing.to_string(),
            "cocycle": cocycle,
            "strong_homogeneity": strong,
            "non_coboundary": cert,
        }),
    )
}

/// Decides whether `d^{k+1} F` is a coboundary (always yes) by elimination.
#[pyfunction]
fn coboundary_of_poly<'py>(py: Python<'py>, text: &str, k: usize) -> PyResult<Bound<'py, PyAny>> {
    let f = read_function(text).map_err(err)?;
    let handle = coboundary_of(FilteredGroup::f2(f.n(), 1), k, &f);
    let v = decide_coboundary(&handle, Target::Torus, CubeSource::Exhaustive).map_err(err)?;
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (n, m = 1, d = 1, samples = 100_000, seed = 0))]
fn estimate_tv(py: Python<'_>, n: usize, m: usize, d: usize, samples: u64, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let r = py.detach(|| experiments::estimate_tv(n, m, d, samples, seed)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (n, m = 1, r = 5, seed = 0))]
fn measurability_probe(py: Python<'_>, n: usize, m: usize, r: u8, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let rep = py.detach(|| experiments::measurability_probe(n, m, r, seed)).map_err(err)?;
    to_py(py, &rep)
}

#[pymodule]
#[pyo3(name = "nilforge")]
fn nilforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDyadic>()?;
    m.add_class::<PyPoly>()?;
    m.add_function(wrap_pyfunction!(lift, m)?)?;
    m.add_function(wrap_pyfunction!(sample_cube, m)?)?;
    m.add_function(wrap_pyfunction!(gowers_norm, m)?)?;
    m.add_function(wrap_pyfunction!(correlation, m)?)?;
    m.add_function(wrap_pyfunction!(limit_constant, m)?)?;
    m.add_function(wrap_pyfunction!(verify_rho, m)?)?;
    m.add_function(wrap_pyfunction!(coboundary_of_poly, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_tv, m)?)?;
    m.add_function(wrap_pyfunction!(measurability_probe, m)?)?;
    Ok(())
}
