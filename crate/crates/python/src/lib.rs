//! Python bindings. Structured results (reports, scans, family specs) come
//! back as plain dicts and lists, decoded from the same JSON the CLI prints.

use std::collections::BTreeMap;

use liemorph_core::catalog;
use liemorph_core::{conditions, geometry, io, rootspace, Decomposition, MetricLieAlgebra};
use nalgebra::DVector;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: liemorph_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A metric Lie algebra with an optional `a + k + m` decomposition.
#[pyclass(name = "Algebra", module = "liemorph", frozen)]
pub struct PyAlgebra {
    inner: MetricLieAlgebra,
    decomposition: Option<Decomposition>,
}

impl PyAlgebra {
    fn decomposed(&self) -> PyResult<&Decomposition> {
        self.decomposition.as_ref().ok_or_else(|| PyValueError::new_err("algebra has no decomposition"))
    }

    fn blocks(&self, a: Option<Vec<usize>>, n: Option<Vec<usize>>) -> PyResult<(Vec<usize>, Vec<usize>)> {
        let a = match a {
            Some(a) => a,
            None => self.decomposed()?.a.clone(),
        };
        let n = match n {
            Some(n) => n,
            None => self.decomposed()?.n(),
        };
        Ok((a, n))
    }
}

#[pymethods]
impl PyAlgebra {
    /// Parses the algebra JSON format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (inner, decomposition) = io::read_algebra(text).map_err(err)?;
        Ok(Self { inner, decomposition })
    }

    fn to_json(&self) -> String {
        io::write_algebra(&self.inner, self.decomposition.as_ref())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    /// `(a, k, m)` index lists, or `None`.
    #[getter]
    fn decomposition(&self) -> Option<(Vec<usize>, Vec<usize>, Vec<usize>)> {
        self.decomposition.as_ref().map(|d| (d.a.clone(), d.k.clone(), d.m.clone()))
    }

    /// Coordinates of `[e_i, e_j]`.
    fn bracket(&self, i: usize, j: usize) -> PyResult<Vec<f64>> {
        let d = self.inner.dim();
        if i >= d || j >= d {
            return Err(PyValueError::new_err(format!("index out of range for dimension {d}")));
        }
        Ok(self.inner.bracket_basis(i, j).as_slice().to_vec())
    }

    /// `(max_residual, worst_triple)`.
    fn jacobi_residual(&self) -> (f64, (usize, usize, usize)) {
        let r = self.inner.jacobi_residual();
        (r.max_residual, r.worst_triple)
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn check_morphism<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let r = conditions::check_morphism(&self.inner, self.decomposed()?, tol).map_err(err)?;
        to_py(py, &r)
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn check_foliation<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let r = conditions::check_foliation(&self.inner, self.decomposed()?, tol).map_err(err)?;
        to_py(py, &r)
    }

    fn sectional_curvature(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        geometry::sectional_curvature(&self.inner, &DVector::from_vec(x), &DVector::from_vec(y)).map_err(err)
    }

    /// Seeded search for the largest sectional curvature; releases the GIL.
    #[pyo3(signature = (budget = 10_000, seed = 0, tol = 1e-9))]
    fn curvature_scan<'py>(&self, py: Python<'py>, budget: usize, seed: u64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let r = py.detach(|| geometry::curvature_scan(&self.inner, budget, seed, tol)).map_err(err)?;
        to_py(py, &r)
    }

    /// Root spaces of `n` under `ad(a)`; blocks default to the decomposition.
    #[pyo3(signature = (a = None, n = None, tol = 1e-9))]
    fn root_spaces<'py>(
        &self,
        py: Python<'py>,
        a: Option<Vec<usize>>,
        n: Option<Vec<usize>>,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let (a, n) = self.blocks(a, n)?;
        let roots = rootspace::root_decomposition(&self.inner, &a, &n, tol).map_err(err)?;
        to_py(py, &roots)
    }

    #[pyo3(signature = (root, a = None, n = None, tol = 1e-9))]
    fn check_hadamard<'py>(
        &self,
        py: Python<'py>,
        root: usize,
        a: Option<Vec<usize>>,
        n: Option<Vec<usize>>,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let (a, n) = self.blocks(a, n)?;
        let roots = rootspace::root_decomposition(&self.inner, &a, &n, tol).map_err(err)?;
        let space = roots
            .get(root)
            .ok_or_else(|| PyValueError::new_err(format!("root {root} out of range ({} root spaces)", roots.len())))?;
        let r = rootspace::check_hadamard_morphism(&self.inner, &a, &n, space, tol).map_err(err)?;
        to_py(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("Algebra(dim={}, labels={:?})", self.inner.dim(), self.inner.labels())
    }
}

#[pyfunction]
fn list_families<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &catalog::list_families())
}

#[pyfunction]
#[pyo3(signature = (id, values, n = None))]
fn instantiate(id: &str, values: BTreeMap<String, f64>, n: Option<usize>) -> PyResult<PyAlgebra> {
    let inst = catalog::instantiate(id, &values, n).map_err(err)?;
    Ok(PyAlgebra { inner: inst.algebra, decomposition: Some(inst.decomposition) })
}

/// `(satisfied, [(inequality, slack), ...])`.
#[pyfunction]
#[pyo3(signature = (id, values, n = None))]
fn hadamard_predicate(id: &str, values: BTreeMap<String, f64>, n: Option<usize>) -> PyResult<(bool, Vec<(String, f64)>)> {
    let r = catalog::hadamard_predicate(id, &values, n).map_err(err)?;
    Ok((r.satisfied, r.margins))
}

#[pymodule]
pub fn liemorph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebra>()?;
    m.add_function(wrap_pyfunction!(list_families, m)?)?;
    m.add_function(wrap_pyfunction!(instantiate, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_predicate, m)?)?;
    Ok(())
}
