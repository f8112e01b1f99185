//! Python bindings: the field arithmetic plus the JSON-driven
//! construct / certify / simulate pipeline.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use locus_core::field::Field as CoreField;
use locus_core::hlrc;
use locus_core::oracle::Budget;
use locus_core::report::{
    certify_job, construct_job, sim_rows_to_csv, simulate_job, Descriptor, JobConfig, PatternSpec,
};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// GF(p^m) arithmetic on element values in [0, q).
#[pyclass]
struct Field {
    inner: CoreField,
}

#[pymethods]
impl Field {
    #[new]
    fn new(p: u64, m: u32) -> PyResult<Self> {
        Ok(Field { inner: CoreField::new(p, m).map_err(err)? })
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.q()
    }
    #[getter]
    fn p(&self) -> u32 {
        self.inner.p()
    }
    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }
    #[getter]
    fn generator(&self) -> u16 {
        self.inner.generator()
    }

    fn add(&self, a: u16, b: u16) -> u16 {
        self.inner.add(a, b)
    }
    fn sub(&self, a: u16, b: u16) -> u16 {
        self.inner.sub(a, b)
    }
    fn mul(&self, a: u16, b: u16) -> u16 {
        self.inner.mul(a, b)
    }
    fn inv(&self, a: u16) -> PyResult<u16> {
        self.inner.inv(a).map_err(err)
    }
    fn pow(&self, a: u16, e: u64) -> u16 {
        self.inner.pow(a, e)
    }
    fn root_of_unity(&self, n: usize) -> PyResult<u16> {
        Ok(self.inner.root_of_unity(n).map_err(err)?.value())
    }

    fn __repr__(&self) -> String {
        format!("Field(GF({}))", self.inner.q())
    }
}

/// Derive the hierarchical parameter ledger; returns it as a JSON string.
#[pyfunction]
fn derive_profile(r: Vec<usize>, delta1: usize, nu: Vec<usize>) -> PyResult<String> {
    let p = hlrc::derive_profile(&r, delta1, &nu).map_err(err)?;
    serde_json::to_string_pretty(&p).map_err(err)
}

/// Build a code from a JSON job config; returns the descriptor JSON.
#[pyfunction]
fn construct(config_json: &str) -> PyResult<String> {
    let cfg = JobConfig::from_json(config_json).map_err(err)?;
    Ok(construct_job(&cfg).map_err(err)?.to_json())
}

/// Certify a descriptor; returns the certificate JSON.
#[pyfunction]
#[pyo3(signature = (descriptor_json, max_enum=None))]
fn certify(descriptor_json: &str, max_enum: Option<u64>) -> PyResult<String> {
    let d = Descriptor::from_json(descriptor_json).map_err(err)?;
    let budget = match max_enum {
        Some(cap) => Budget::with_max_enumerations(cap),
        None => Budget::default(),
    };
    Ok(certify_job(&d, &budget).map_err(err)?.to_json())
}

/// Run the seeded repair simulation; returns the CSV text.
#[pyfunction]
fn simulate(descriptor_json: &str, pattern: &str, seed: u64, trials: u64) -> PyResult<String> {
    let d = Descriptor::from_json(descriptor_json).map_err(err)?;
    let spec = PatternSpec::parse(pattern).map_err(err)?;
    let rows = simulate_job(&d, &spec, seed, trials).map_err(err)?;
    Ok(sim_rows_to_csv(&rows))
}

#[pymodule]
fn locus_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_function(wrap_pyfunction!(derive_profile, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
