//! Python bindings: operators, fundamental solutions, domains, potentials and
//! the `epot` command line.

use std::cell::RefCell;

use elliptic_potentials as ep;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_error(e: ep::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Coefficients `a2`, `a1`, `a0` of a constant-coefficient second-order operator.
#[pyclass(name = "OperatorCoefficients", module = "elliptic_potentials", from_py_object)]
#[derive(Clone)]
pub struct PyOperator {
    pub inner: ep::OperatorCoefficients,
}

#[pymethods]
impl PyOperator {
    #[new]
    #[pyo3(signature = (a2, a1 = None, a0 = Complex64::new(0.0, 0.0)))]
    fn new(a2: Vec<Vec<f64>>, a1: Option<Vec<Complex64>>, a0: Complex64) -> PyResult<Self> {
        let a1 = a1.unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); a2.len()]);
        Ok(Self { inner: ep::OperatorCoefficients::new(&a2, &a1, a0).map_err(value_error)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn a2(&self) -> Vec<Vec<f64>> {
        self.inner.a2_rows()
    }

    #[getter]
    fn ellipticity_margin(&self) -> f64 {
        self.inner.ellipticity_margin()
    }

    fn __repr__(&self) -> String {
        format!("OperatorCoefficients(a2={:?})", self.inner.a2_rows())
    }
}

/// Closed-form fundamental solution of an operator.
#[pyclass(name = "FundamentalSolution", module = "elliptic_potentials", from_py_object)]
#[derive(Clone)]
pub struct PyFundamentalSolution {
    pub inner: ep::FundamentalSolution,
}

#[pymethods]
impl PyFundamentalSolution {
    #[staticmethod]
    fn laplace(n: usize) -> PyResult<Self> {
        Ok(Self { inner: ep::FundamentalSolution::laplace(n).map_err(value_error)? })
    }

    #[staticmethod]
    fn modified_helmholtz(n: usize, kappa: f64) -> PyResult<Self> {
        Ok(Self { inner: ep::FundamentalSolution::modified_helmholtz(n, kappa).map_err(value_error)? })
    }

    #[staticmethod]
    fn principal(op: &PyOperator) -> PyResult<Self> {
        Ok(Self { inner: ep::FundamentalSolution::principal(op.inner.clone()).map_err(value_error)? })
    }

    #[staticmethod]
    fn from_operator(op: &PyOperator) -> PyResult<Self> {
        Ok(Self { inner: ep::FundamentalSolution::from_operator(op.inner.clone()).map_err(value_error)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().name()
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<Complex64> {
        self.inner.eval(&x).map_err(value_error)
    }

    fn grad(&self, x: Vec<f64>) -> PyResult<Vec<Complex64>> {
        self.inner.grad(&x).map_err(value_error)
    }

    fn hess(&self, x: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
        self.inner.hess(&x).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("FundamentalSolution(kind={:?}, dim={})", self.inner.kind().name(), self.inner.dim())
    }
}

/// Bounded domain: a ball, an ellipse or a planar star-shaped domain.
#[pyclass(name = "Domain", module = "elliptic_potentials", from_py_object)]
#[derive(Clone)]
pub struct PyDomain {
    pub inner: ep::Domain,
}

#[pymethods]
impl PyDomain {
    #[staticmethod]
    fn ball(center: Vec<f64>, radius: f64) -> PyResult<Self> {
        Ok(Self { inner: ep::Domain::ball(&center, radius).map_err(value_error)? })
    }

    #[staticmethod]
    fn ellipse(center: Vec<f64>, a: f64, b: f64) -> PyResult<Self> {
        Ok(Self { inner: ep::Domain::ellipse(&center, a, b).map_err(value_error)? })
    }

    /// Star domain `r(t) = c0 + sum_k c_k cos(k t)` about `center`.
    #[staticmethod]
    fn star(center: Vec<f64>, coefficients: Vec<f64>) -> PyResult<Self> {
        let profile = ep::geometry::Profile::CosineSeries(coefficients);
        Ok(Self { inner: ep::Domain::star2d(&center, profile).map_err(value_error)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind_name()
    }

    fn contains(&self, x: Vec<f64>) -> bool {
        self.inner.contains(&x)
    }

    fn distance_to_boundary(&self, x: Vec<f64>) -> PyResult<f64> {
        Ok(self.inner.project(&x).map_err(value_error)?.distance)
    }

    fn __repr__(&self) -> String {
        format!("Domain(kind={:?}, dim={})", self.inner.kind_name(), self.inner.dim())
    }
}

/// Calls a Python density, keeping the first exception for re-raising.
struct Callback<'py> {
    f: &'py Bound<'py, PyAny>,
    error: RefCell<Option<PyErr>>,
}

impl<'py> Callback<'py> {
    fn new(f: &'py Bound<'py, PyAny>) -> Self {
        Self { f, error: RefCell::new(None) }
    }

    fn call(&self, args: impl pyo3::call::PyCallArgs<'py>) -> Complex64 {
        let nan = Complex64::new(f64::NAN, 0.0);
        if self.error.borrow().is_some() {
            return nan;
        }
        match self.f.call1(args).and_then(|v| v.extract::<Complex64>()) {
            Ok(v) => v,
            Err(e) => {
                *self.error.borrow_mut() = Some(e);
                nan
            }
        }
    }

    fn finish<T>(self, r: ep::Result<T>) -> PyResult<T> {
        if let Some(e) = self.error.into_inner() {
            return Err(e);
        }
        r.map_err(value_error)
    }
}

/// Volume and single-layer potentials of a fundamental solution over a domain.
#[pyclass(name = "PotentialField", module = "elliptic_potentials")]
pub struct PyPotentialField {
    pub inner: ep::PotentialField,
}

#[pymethods]
impl PyPotentialField {
    #[new]
    #[pyo3(signature = (fs, domain, n = 32))]
    fn new(fs: &PyFundamentalSolution, domain: &PyDomain, n: usize) -> PyResult<Self> {
        Ok(Self { inner: ep::PotentialField::new(fs.inner.clone(), domain.inner.clone(), n).map_err(value_error)? })
    }

    #[getter]
    fn resolution(&self) -> usize {
        self.inner.resolution()
    }

    /// Volume potential of `f(y)` at `x`.
    fn volume_potential(&self, f: Bound<'_, PyAny>, x: Vec<f64>) -> PyResult<Complex64> {
        let cb = Callback::new(&f);
        let r = self.inner.volume_potential(&|y: &[f64]| cb.call((y.to_vec(),)), &x);
        cb.finish(r)
    }

    fn volume_potential_gradient(&self, f: Bound<'_, PyAny>, x: Vec<f64>) -> PyResult<Vec<Complex64>> {
        let cb = Callback::new(&f);
        let r = self.inner.volume_potential_gradient(&|y: &[f64]| cb.call((y.to_vec(),)), &x);
        cb.finish(r)
    }

    fn volume_potential_hessian(&self, f: Bound<'_, PyAny>, x: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
        let cb = Callback::new(&f);
        let r = self.inner.volume_potential_hessian(&|y: &[f64]| cb.call((y.to_vec(),)), &x);
        cb.finish(r)
    }

    /// Single-layer potential of `phi(y, nu)` at `x`.
    fn single_layer(&self, phi: Bound<'_, PyAny>, x: Vec<f64>) -> PyResult<Complex64> {
        let cb = Callback::new(&phi);
        let r = self.inner.single_layer(&|y: &[f64], nu: &[f64]| cb.call((y.to_vec(), nu.to_vec())), &x);
        cb.finish(r)
    }
}

/// Runs the `epot` command line with `args` (without program name); returns
/// `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> PyResult<(i32, String, String)> {
    let mut out = vec![];
    let mut err = vec![];
    let argv = std::iter::once("epot".to_string()).chain(args);
    let code = ep::cli::run(argv, &mut out, &mut err);
    let text = |b: Vec<u8>| String::from_utf8(b).map_err(|e| PyRuntimeError::new_err(e.to_string()));
    Ok((code, text(out)?, text(err)?))
}

#[pymodule(name = "elliptic_potentials")]
pub fn elliptic_potentials_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOperator>()?;
    m.add_class::<PyFundamentalSolution>()?;
    m.add_class::<PyDomain>()?;
    m.add_class::<PyPotentialField>()?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
