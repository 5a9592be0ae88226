//! Python bindings: the polynomial/construction/class types and the family
//! and oracle entry points, exposed as the `melonic_py` extension module.
//!
//! Build with `cargo build --release -p melonic-py`, then rename/symlink
//! `libmelonic_py.so` to `melonic_py.so` somewhere on `sys.path` (see
//! `python/smoke_test.py` for the dance).

use num_bigint::BigInt;
use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;

use melonic::construction::MelonicConstruction;
use melonic::motive::ClassEngine;
use melonic::polyring::{Basis, IntPoly, PolyError};

fn parse_basis(tag: &str) -> PyResult<Basis> {
    Basis::parse(tag).ok_or_else(|| PyValueError::new_err(format!("unknown basis {tag:?}")))
}

fn poly_err(e: PolyError) -> PyErr {
    match e {
        PolyError::DivisionByZero => PyZeroDivisionError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Dense integer polynomial in one of the bases L, T, S.
#[pyclass(name = "IntPoly", skip_from_py_object)]
#[derive(Clone)]
struct PyIntPoly {
    inner: IntPoly,
}

#[pymethods]
impl PyIntPoly {
    /// IntPoly("T", [coeff_of_1, coeff_of_var, ...]) with Python ints.
    #[new]
    fn new(basis: &str, coeffs: Vec<BigInt>) -> PyResult<Self> {
        Ok(PyIntPoly {
            inner: IntPoly::new(parse_basis(basis)?, coeffs),
        })
    }

    #[getter]
    fn basis(&self) -> String {
        self.inner.basis().letter().to_string()
    }

    #[getter]
    fn coeffs(&self) -> Vec<BigInt> {
        self.inner.coeffs().to_vec()
    }

    /// Degree, or None for the zero polynomial.
    #[getter]
    fn degree(&self) -> Option<usize> {
        self.inner.degree()
    }

    fn add(&self, other: &PyIntPoly) -> PyResult<PyIntPoly> {
        Ok(PyIntPoly {
            inner: self.inner.add(&other.inner).map_err(poly_err)?,
        })
    }

    fn mul(&self, other: &PyIntPoly) -> PyResult<PyIntPoly> {
        Ok(PyIntPoly {
            inner: self.inner.mul(&other.inner).map_err(poly_err)?,
        })
    }

    fn exact_div(&self, other: &PyIntPoly) -> PyResult<PyIntPoly> {
        Ok(PyIntPoly {
            inner: self.inner.exact_div(&other.inner).map_err(poly_err)?,
        })
    }

    fn change_basis(&self, basis: &str) -> PyResult<PyIntPoly> {
        Ok(PyIntPoly {
            inner: self.inner.change_basis(parse_basis(basis)?),
        })
    }

    fn eval_int(&self, x: BigInt) -> BigInt {
        self.inner.eval_int(&x)
    }

    /// Evaluate as a function of L at L = x, whatever the stored basis.
    fn eval_at_l(&self, x: BigInt) -> BigInt {
        self.inner.eval_at_l(&x)
    }

    fn is_nonneg_coeffs(&self) -> bool {
        self.inner.is_nonneg_coeffs()
    }

    fn is_log_concave(&self) -> bool {
        self.inner.is_log_concave()
    }

    fn euler_characteristic(&self) -> BigInt {
        self.inner.euler_characteristic()
    }

    fn hodge_deligne(&self) -> String {
        self.inner.specialize_hodge_deligne().to_string()
    }

    fn factored(&self) -> String {
        self.inner.render_factored()
    }

    fn latex(&self) -> String {
        self.inner.render_latex()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).unwrap()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyIntPoly> {
        Ok(PyIntPoly {
            inner: serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?,
        })
    }

    fn __str__(&self) -> String {
        self.inner.render_expanded()
    }

    fn __repr__(&self) -> String {
        format!(
            "IntPoly({}: {})",
            self.inner.basis(),
            self.inner.render_expanded()
        )
    }

    fn __eq__(&self, other: &PyIntPoly) -> bool {
        self.inner == other.inner
    }
}

/// Grothendieck class: polynomial in T plus the edge count of the graph.
#[pyclass(name = "GrothendieckClass", skip_from_py_object)]
#[derive(Clone)]
struct PyClass {
    inner: melonic::motive::GrothendieckClass,
}

#[pymethods]
impl PyClass {
    #[getter]
    fn poly(&self) -> PyIntPoly {
        PyIntPoly {
            inner: self.inner.poly.clone(),
        }
    }

    #[getter]
    fn edges(&self) -> usize {
        self.inner.edges
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).unwrap()
    }

    fn __str__(&self) -> String {
        self.inner.poly.render_expanded()
    }

    fn __repr__(&self) -> String {
        format!(
            "GrothendieckClass(edges={}, {})",
            self.inner.edges,
            self.inner.poly.render_factored()
        )
    }

    fn __eq__(&self, other: &PyClass) -> bool {
        self.inner == other.inner
    }
}

/// A melonic construction.
#[pyclass(name = "Construction", skip_from_py_object)]
#[derive(Clone)]
struct PyConstruction {
    inner: MelonicConstruction,
}

#[pymethods]
impl PyConstruction {
    /// Construction from the text DSL, e.g. "(4)@0.1; (1,3,1)@1.1".
    #[new]
    fn new(dsl: &str) -> PyResult<Self> {
        Ok(PyConstruction {
            inner: MelonicConstruction::parse_dsl(dsl)
                .map_err(|e| PyValueError::new_err(e.to_string()))?,
        })
    }

    /// Valence-4 shorthand, e.g. "0,1+,2+,3-".
    #[staticmethod]
    fn from_shorthand(spec: &str) -> PyResult<PyConstruction> {
        Ok(PyConstruction {
            inner: MelonicConstruction::parse_valence4_shorthand(spec)
                .map_err(|e| PyValueError::new_err(e.to_string()))?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyConstruction> {
        Ok(PyConstruction {
            inner: serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).unwrap()
    }

    fn dsl(&self) -> String {
        self.inner.to_dsl()
    }

    /// (valid, reduced) flags plus a list of violation strings.
    fn validate(&self) -> (bool, bool, Vec<String>) {
        let report = self.inner.validate();
        (
            report.is_valid(),
            report.reduced,
            report
                .violations
                .iter()
                .map(|v| {
                    format!(
                        "stage {}: condition ({}): {}",
                        v.stage, v.condition, v.message
                    )
                })
                .collect(),
        )
    }

    fn reduce(&self) -> PyResult<PyConstruction> {
        Ok(PyConstruction {
            inner: self
                .inner
                .reduce()
                .map_err(|e| PyValueError::new_err(e.to_string()))?,
        })
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn is_vacuum(&self) -> PyResult<bool> {
        self.inner
            .is_vacuum()
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// (vertex_count, edge list) of the realized multigraph.
    fn realize(&self) -> PyResult<(usize, Vec<(usize, usize)>)> {
        let g = self
            .inner
            .realize_graph()
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok((g.vertex_count, g.edges))
    }

    /// Grothendieck class by the generic recursion.
    fn grothendieck_class(&self) -> PyResult<PyClass> {
        Ok(PyClass {
            inner: melonic::motive::class_of(&self.inner)
                .map_err(|e| PyValueError::new_err(e.to_string()))?,
        })
    }

    /// Brute-force point count of the hypersurface complement over F_q.
    #[pyo3(signature = (q, budget = melonic::oracle::DEFAULT_BUDGET))]
    fn point_count(&self, q: u64, budget: u64) -> PyResult<u64> {
        let g = self
            .inner
            .realize_graph()
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        melonic::oracle::point_count(&g, q, budget)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Construction(\"{}\")", self.inner.to_dsl())
    }
}

#[pyfunction]
fn banana_class(m: u32) -> PyClass {
    PyClass {
        inner: melonic::motive::banana_class(m),
    }
}

#[pyfunction]
fn gamma_class(n: usize) -> PyClass {
    PyClass {
        inner: melonic::families::gamma_class(n),
    }
}

#[pyfunction]
fn gammaprime_class(n: usize) -> PyClass {
    PyClass {
        inner: melonic::families::gammaprime_class(n),
    }
}

#[pyfunction]
fn gamma3_class(n: usize) -> PyClass {
    PyClass {
        inner: melonic::families::gamma3_class(n),
    }
}

#[pyfunction]
fn gammav_class(v: usize, n: usize) -> PyClass {
    PyClass {
        inner: melonic::families::gammav_class(v, n),
    }
}

#[pyfunction]
fn sigma_poly(s: usize, n: usize) -> PyIntPoly {
    PyIntPoly {
        inner: melonic::families::sigma_poly(s, n),
    }
}

#[pyfunction]
fn sigma_class(s: usize, n: usize) -> PyClass {
    PyClass {
        inner: melonic::families::sigma_class(s, n),
    }
}

#[pyfunction]
fn a_poly(n: usize) -> PyIntPoly {
    PyIntPoly {
        inner: melonic::families::a_poly(n),
    }
}

#[pyfunction]
fn gammav_poly(v: usize, n: usize) -> PyIntPoly {
    PyIntPoly {
        inner: melonic::families::gammav_poly(v, n),
    }
}

/// Distinct-class counts for edge counts 1..=max_edges.
#[pyfunction]
fn distinct_class_counts(max_edges: usize) -> Vec<usize> {
    melonic::motive::distinct_class_counts(max_edges)
}

/// All distinct classes with exactly `edges` edges, in the given basis.
#[pyfunction]
#[pyo3(signature = (edges, basis = "T"))]
fn distinct_classes_at(edges: usize, basis: &str) -> PyResult<Vec<PyIntPoly>> {
    let b = parse_basis(basis)?;
    let classes = melonic::motive::distinct_classes(edges);
    Ok(classes
        .into_iter()
        .filter(|(e, _)| *e == edges)
        .flat_map(|(_, set)| set)
        .map(|p| PyIntPoly {
            inner: p.change_basis(b),
        })
        .collect())
}

/// Classes of every reduced construction with at most `max_edges` edges,
/// as (dsl, class) pairs in deterministic order.
#[pyfunction]
fn enumerate_classes(max_edges: usize) -> Vec<(String, PyClass)> {
    let engine = ClassEngine::new();
    melonic::construction::enumerate_reduced(max_edges)
        .into_iter()
        .map(|tree| {
            let c = tree.to_construction();
            let class = engine.class_of_tree(&tree);
            (c.to_dsl(), PyClass { inner: class })
        })
        .collect()
}

#[pymodule]
fn melonic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIntPoly>()?;
    m.add_class::<PyClass>()?;
    m.add_class::<PyConstruction>()?;
    m.add_function(wrap_pyfunction!(banana_class, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_class, m)?)?;
    m.add_function(wrap_pyfunction!(gammaprime_class, m)?)?;
    m.add_function(wrap_pyfunction!(gamma3_class, m)?)?;
    m.add_function(wrap_pyfunction!(gammav_class, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_poly, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_class, m)?)?;
    m.add_function(wrap_pyfunction!(a_poly, m)?)?;
    m.add_function(wrap_pyfunction!(gammav_poly, m)?)?;
    m.add_function(wrap_pyfunction!(distinct_class_counts, m)?)?;
    m.add_function(wrap_pyfunction!(distinct_classes_at, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_classes, m)?)?;
    Ok(())
}
