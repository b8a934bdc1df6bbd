//! Python bindings for `subfn_core`.
//!
//! Subsets are passed as integer bitmasks; element `i` is bit `i`.

use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;

use subfn_core::completions::{self, sam_upper_iterative};
use subfn_core::divergence::{divergence_value, Norm};
use subfn_core::planners::{self, PlanConfig};
use subfn_core::sketch::alpha_ratio as core_alpha_ratio;
use subfn_core::{
    check_class as core_check_class, normalize as core_normalize, DistributionSpec, Error, FunctionClass,
    GroundSet, IncompleteSetFunction, KnownMask, SetFunction, SubsetId,
};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn class_of(class: &str, weights: Option<Vec<f64>>) -> PyResult<FunctionClass> {
    FunctionClass::parse(class, weights).map_err(err)
}

/// A complete set function on `n ≤ 16` elements.
#[pyclass(name = "SetFunction", module = "subfn", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySetFunction {
    inner: SetFunction,
}

#[pymethods]
impl PySetFunction {
    #[new]
    fn new(n: usize, values: Vec<f64>) -> PyResult<Self> {
        let ground = GroundSet::new(n).map_err(err)?;
        Ok(Self {
            inner: SetFunction::new(ground, values).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("set functions serialize")
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.values().len()
    }

    fn __getitem__(&self, mask: u32) -> PyResult<f64> {
        let s = SubsetId(mask);
        self.inner
            .ground()
            .check(s)
            .map_err(|e| PyIndexError::new_err(e.to_string()))?;
        Ok(self.inner.get(s))
    }

    #[pyo3(signature = (cls, weights=None))]
    fn is_member(&self, cls: &str, weights: Option<Vec<f64>>) -> PyResult<bool> {
        Ok(core_check_class(&self.inner, &class_of(cls, weights)?))
    }

    fn __repr__(&self) -> String {
        format!("SetFunction(n={}, values={:?})", self.inner.n(), self.inner.values())
    }
}

fn incomplete(f: &PySetFunction, known: Option<Vec<u32>>) -> PyResult<IncompleteSetFunction> {
    let f = f.inner.clone();
    match known {
        None => Ok(IncompleteSetFunction::minimal(f)),
        Some(sets) => {
            let mask = KnownMask::from_sets(f.ground(), sets.into_iter().map(SubsetId)).map_err(err)?;
            IncompleteSetFunction::new(f, mask).map_err(err)
        }
    }
}

/// Lower and upper completions of `f` observed on `known` (the minimal
/// mask when omitted), as two value lists.
#[pyfunction]
#[pyo3(signature = (f, known=None, cls="s", weights=None))]
fn bounds(
    f: &PySetFunction,
    known: Option<Vec<u32>>,
    cls: &str,
    weights: Option<Vec<f64>>,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let g = incomplete(f, known)?;
    let b = completions::bounds(&g, &class_of(cls, weights)?).map_err(err)?;
    Ok((b.lower.values().to_vec(), b.upper.values().to_vec()))
}

/// Iterative SAM upper function.
#[pyfunction]
#[pyo3(signature = (f, known=None, max_steps=100, eps=1e-9))]
fn sam_upper(f: &PySetFunction, known: Option<Vec<u32>>, max_steps: usize, eps: f64) -> PyResult<Vec<f64>> {
    let g = incomplete(f, known)?;
    Ok(sam_upper_iterative(&g, max_steps, eps).values().to_vec())
}

#[pyfunction]
#[pyo3(signature = (f, known=None, cls="s", norm="l1", weights=None))]
fn divergence(
    f: &PySetFunction,
    known: Option<Vec<u32>>,
    cls: &str,
    norm: &str,
    weights: Option<Vec<f64>>,
) -> PyResult<f64> {
    let g = incomplete(f, known)?;
    divergence_value(&g, &class_of(cls, weights)?, Norm::parse(norm).map_err(err)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (f, cls, weights=None))]
fn check_class(f: &PySetFunction, cls: &str, weights: Option<Vec<f64>>) -> PyResult<bool> {
    f.is_member(cls, weights)
}

/// Returns `(g, scale, shift)` with `g(S) = scale·f(S) + Σ_{i∈S} shift[i]`.
#[pyfunction]
fn normalize(f: &PySetFunction) -> PyResult<(PySetFunction, f64, Vec<f64>)> {
    let (g, map) = core_normalize(&f.inner).map_err(err)?;
    Ok((PySetFunction { inner: g }, map.scale, map.shift))
}

/// Sample `index` of a named distribution.
#[pyfunction]
#[pyo3(signature = (dist, n, seed=0, index=0))]
fn sample(dist: &str, n: usize, seed: u64, index: u64) -> PyResult<PySetFunction> {
    let spec = DistributionSpec::named(dist, n, seed).map_err(err)?;
    Ok(PySetFunction {
        inner: spec.sample(index),
    })
}

/// Query plan as `(queries, step_divergence)`. Offline planners and
/// `random` draw from the named distribution; the oracle planners plan on
/// `f`.
#[pyfunction]
#[pyo3(signature = (planner, t, dist=None, n=None, f=None, kappa=90, seed=0, cls=None, norm="l1"))]
#[allow(clippy::too_many_arguments)]
fn plan(
    planner: &str,
    t: usize,
    dist: Option<&str>,
    n: Option<usize>,
    f: Option<&PySetFunction>,
    kappa: usize,
    seed: u64,
    cls: Option<&str>,
    norm: &str,
) -> PyResult<(Vec<u32>, Vec<f64>)> {
    let spec = match (dist, f) {
        (Some(d), _) => {
            let n = n.ok_or_else(|| PyValueError::new_err("n is required with dist"))?;
            DistributionSpec::named(d, n, seed).map_err(err)?
        }
        (None, Some(f)) => DistributionSpec::point_mass(f.inner.clone()),
        (None, None) => return Err(PyValueError::new_err("give dist or f")),
    };
    let class = match cls {
        Some(c) => class_of(c, None)?,
        None => spec.default_class(),
    };
    let cfg = PlanConfig {
        norm: Norm::parse(norm).map_err(err)?,
        seed,
        ..PlanConfig::new(t, kappa, class)
    };
    let oracle = || f.map(|f| &f.inner).ok_or_else(|| PyValueError::new_err(format!("{planner} needs f")));
    let result = match planner {
        "offline_greedy" => planners::offline_greedy(&spec, &cfg),
        "offline_optimal" => planners::offline_optimal(&spec, &cfg),
        "random" => planners::random_plan(&spec, &cfg),
        "oracle_greedy" => planners::oracle_greedy(oracle()?, &cfg),
        "oracle_optimal" => planners::oracle_optimal(oracle()?, &cfg),
        other => return Err(PyValueError::new_err(format!("unknown planner {other:?}"))),
    }
    .map_err(err)?;
    Ok((result.queries.iter().map(|s| s.0).collect(), result.step_divergence))
}

/// `(alpha, witness)`: the largest `upper/lower` ratio and where it occurs.
#[pyfunction]
fn alpha_ratio(lower: &PySetFunction, upper: &PySetFunction) -> PyResult<(f64, u32)> {
    let r = core_alpha_ratio(&lower.inner, &upper.inner).map_err(err)?;
    Ok((r.alpha, r.witness.0))
}

#[pymodule]
fn subfn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySetFunction>()?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(sam_upper, m)?)?;
    m.add_function(wrap_pyfunction!(divergence, m)?)?;
    m.add_function(wrap_pyfunction!(check_class, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_ratio, m)?)?;
    Ok(())
}
