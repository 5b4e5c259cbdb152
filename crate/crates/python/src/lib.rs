//! Python bindings: parameter classes, simulation, fixed points, limit
//! cycles, bifurcation scans, thresholds and investment/saving splits.
//!
//! Structured results (fixed points, cycles, sweep rows, reports) are
//! returned as plain dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use rescycle_core::analysis::{self, Control, Criterion, SweepSpec};
use rescycle_core::integrator::{self, IntegratorSettings, Method};
use rescycle_core::kaldor::{self, SplitKind};
use rescycle_core::model;
use rescycle_core::{Attractor, Field, FieldKind};

create_exception!(rescycle, RescycleError, PyValueError);

fn err(e: rescycle_core::Error) -> PyErr {
    RescycleError::new_err(e.to_string())
}

// Converts any serializable result through JSON so Python receives plain
// dicts, lists and floats.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| RescycleError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(name = "ModelParams", module = "rescycle", from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    inner: model::ModelParams,
}

macro_rules! model_fields {
    ($($name:ident : $($path:ident).+),* $(,)?) => {
        #[pymethods]
        #[allow(non_snake_case)]
        impl PyModelParams {
            $(
                #[getter]
                fn $name(&self) -> f64 {
                    self.inner.$($path).+
                }
            )*

            /// Copy with the given fields replaced, e.g. `p.replace(zeta=0.03)`.
            #[pyo3(signature = (**changes))]
            fn replace(&self, changes: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
                let mut p = self.inner;
                if let Some(changes) = changes {
                    for (key, value) in changes.iter() {
                        let key: String = key.extract()?;
                        let value: f64 = value.extract()?;
                        match key.as_str() {
                            $(stringify!($name) => p.$($path).+ = value,)*
                            other => {
                                return Err(RescycleError::new_err(format!(
                                    "unknown parameter `{other}`"
                                )))
                            }
                        }
                    }
                }
                p.validate().map_err(err)?;
                Ok(PyModelParams { inner: p })
            }

            fn to_dict(&self) -> std::collections::BTreeMap<&'static str, f64> {
                [$((stringify!($name), self.inner.$($path).+)),*].into_iter().collect()
            }
        }
    };
}

model_fields! {
    A: production.tfp,
    a_K: production.a_k,
    a_E: production.a_e,
    Y0: production.y0,
    K_f: production.k_floor,
    E_f: production.e_floor,
    s: capital.s,
    kappa: capital.kappa,
    q: energy.q,
    c: energy.c,
    d1: energy.d1,
    zeta: energy.zeta,
    g1: eigen.g1,
    g2: eigen.g2,
    eps_K: scales.eps_k,
    eps_E: scales.eps_e,
}

#[pymethods]
impl PyModelParams {
    /// Converging (zeta = 0.04) or oscillating (zeta = 0.02) example set.
    #[staticmethod]
    #[pyo3(signature = (zeta = 0.04))]
    fn fig1(zeta: f64) -> PyResult<Self> {
        let inner = model::ModelParams::fig1(zeta);
        inner.validate().map_err(err)?;
        Ok(PyModelParams { inner })
    }

    /// Parameter set with three equilibria.
    #[staticmethod]
    fn fig2() -> Self {
        PyModelParams {
            inner: model::ModelParams::fig2(),
        }
    }

    /// Parameter set of the investment/saving splits.
    #[staticmethod]
    fn fig3() -> Self {
        PyModelParams {
            inner: model::ModelParams::fig3(),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: model::ModelParams =
            serde_json::from_str(text).map_err(|e| RescycleError::new_err(e.to_string()))?;
        inner.validate().map_err(err)?;
        Ok(PyModelParams { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| RescycleError::new_err(e.to_string()))
    }

    /// Y_s, K0, E0, E_Q and A²; raises when the baseline energy level is
    /// undefined.
    fn derived(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &model::derived_constants(&self.inner).map_err(err)?)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("ModelParams({})", self.to_json().unwrap_or_default())
    }
}

#[pyclass(name = "SolowParams", module = "rescycle", from_py_object)]
#[derive(Clone)]
struct PySolowParams {
    inner: model::SolowParams,
}

#[pymethods]
impl PySolowParams {
    #[new]
    #[pyo3(signature = (alpha, s, r, kappa, A = 1.0))]
    #[allow(non_snake_case)]
    fn new(alpha: f64, s: f64, r: f64, kappa: f64, A: f64) -> PyResult<Self> {
        let inner = model::SolowParams {
            tfp: A,
            alpha,
            s,
            r,
            kappa,
        };
        inner.validate().map_err(err)?;
        Ok(PySolowParams { inner })
    }

    /// Steady state, golden-rule saving rate and capital, consumption.
    fn statics(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &analysis::solow_statics(&self.inner).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "SolowParams(alpha={}, s={}, r={}, kappa={}, A={})",
            p.alpha, p.s, p.r, p.kappa, p.tfp
        )
    }
}

#[pyclass(name = "VdpParams", module = "rescycle", from_py_object)]
#[derive(Clone)]
struct PyVdpParams {
    inner: rescycle_core::VdpParams,
}

#[pymethods]
impl PyVdpParams {
    #[new]
    fn new(omega: f64) -> PyResult<Self> {
        let inner = rescycle_core::VdpParams { omega };
        inner.validate().map_err(err)?;
        Ok(PyVdpParams { inner })
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    fn __repr__(&self) -> String {
        format!("VdpParams(omega={})", self.inner.omega)
    }
}

fn build_field(kind: &str, params: &Bound<'_, PyAny>) -> PyResult<Field> {
    let kind: FieldKind = kind.parse().map_err(err)?;
    let field = if let Ok(p) = params.extract::<PyModelParams>() {
        Field::model(kind, p.inner)
    } else if let Ok(p) = params.extract::<PySolowParams>() {
        match kind {
            FieldKind::Solow => Field::solow(p.inner),
            _ => return Err(RescycleError::new_err(format!("`{kind}` needs ModelParams"))),
        }
    } else if let Ok(p) = params.extract::<PyVdpParams>() {
        match kind {
            FieldKind::Vdp => Field::vdp(p.inner),
            _ => return Err(RescycleError::new_err(format!("`{kind}` needs ModelParams"))),
        }
    } else {
        return Err(RescycleError::new_err(
            "params must be ModelParams, SolowParams or VdpParams",
        ));
    };
    field.map_err(err)
}

fn settings(t_end: Option<f64>, method: Option<&str>, dt: Option<f64>) -> PyResult<IntegratorSettings> {
    let mut s = match t_end {
        Some(t) => IntegratorSettings::with_horizon(t),
        None => IntegratorSettings::default(),
    };
    if let Some(m) = method {
        s.method = m.parse::<Method>().map_err(err)?;
    }
    if let Some(dt) = dt {
        s.dt = dt;
    }
    s.validate().map_err(err)?;
    Ok(s)
}

fn initial_or_default(field: &Field, initial: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
    match initial {
        Some(x) => Ok(x),
        None => Ok(analysis::standard_initial_states(field).map_err(err)?.swap_remove(0)),
    }
}

/// Integrates a catalog field and classifies the outcome.
///
/// Returns a dict with `times`, `states`, `state_names`, `attractor`
/// (`converged_point`, `cycle_handoff` or `divergent`) and `final_state`.
#[pyfunction]
#[pyo3(signature = (field, params, initial = None, t_end = None, method = None, dt = None))]
fn simulate(
    py: Python<'_>,
    field: &str,
    params: &Bound<'_, PyAny>,
    initial: Option<Vec<f64>>,
    t_end: Option<f64>,
    method: Option<&str>,
    dt: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let f = build_field(field, params)?;
    let init = initial_or_default(&f, initial)?;
    let s = settings(t_end, method, dt)?;
    let traj = py
        .detach(|| integrator::integrate_marked(&f, &init, &s, ""))
        .map_err(err)?;
    let attractor = integrator::classify_trajectory(&traj, &s);
    let out = PyDict::new(py);
    out.set_item("times", &traj.times)?;
    out.set_item("states", &traj.states)?;
    out.set_item("state_names", &traj.state_names)?;
    out.set_item("attractor", attractor.label())?;
    out.set_item("final_state", traj.last_state())?;
    if let Attractor::Divergent { time } = attractor {
        out.set_item("diverged_at", time)?;
    }
    Ok(out.into_any().unbind())
}

/// Limit cycle reached from `initial`, or None.
#[pyfunction]
#[pyo3(signature = (field, params, initial = None, t_end = None))]
fn detect_limit_cycle(
    py: Python<'_>,
    field: &str,
    params: &Bound<'_, PyAny>,
    initial: Option<Vec<f64>>,
    t_end: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let f = build_field(field, params)?;
    let init = initial_or_default(&f, initial)?;
    let s = settings(t_end, None, None)?;
    let cycle = py
        .detach(|| analysis::detect_limit_cycle(&f, &init, &s, ""))
        .map_err(err)?;
    to_py(py, &cycle)
}

/// Equilibria of the reduced production/capital system, ordered by Y.
#[pyfunction]
fn fixed_points(py: Python<'_>, params: &PyModelParams) -> PyResult<Py<PyAny>> {
    to_py(py, &analysis::fixed_points_2d(&params.inner).map_err(err)?)
}

/// Baseline equilibrium of the full three-variable system.
#[pyfunction]
fn fixed_point_3d(py: Python<'_>, params: &PyModelParams) -> PyResult<Py<PyAny>> {
    to_py(py, &analysis::fixed_point_3d(&params.inner).map_err(err)?)
}

/// One-parameter scan over `n` evenly spaced values of `control`.
#[pyfunction]
#[pyo3(signature = (params, control, min, max, n, with_cycles = false))]
fn sweep(
    py: Python<'_>,
    params: &PyModelParams,
    control: &str,
    min: f64,
    max: f64,
    n: usize,
    with_cycles: bool,
) -> PyResult<Py<PyAny>> {
    let spec = SweepSpec {
        control: control.parse::<Control>().map_err(err)?,
        min,
        max,
        n,
        with_cycles,
    };
    let p = params.inner;
    let rows = py
        .detach(|| analysis::sweep(&p, &spec, &IntegratorSettings::default()))
        .map_err(err)?;
    to_py(py, &rows)
}

/// Critical value of `control` in [lo, hi] where `criterion` changes.
///
/// `criterion` is `trace-zero-at-branch[:baseline|lower|middle|upper]`,
/// `discriminant-zero` or `cycle-exists`.
#[pyfunction]
fn bisect(params: &PyModelParams, control: &str, lo: f64, hi: f64, criterion: &str) -> PyResult<f64> {
    let control: Control = control.parse().map_err(err)?;
    let criterion = match criterion.split_once(':') {
        Some(("trace-zero-at-branch", b)) => Criterion::TraceZeroAtBranch {
            branch: b.parse().map_err(err)?,
        },
        None if criterion == "trace-zero-at-branch" => Criterion::TraceZeroAtBranch {
            branch: analysis::BranchSelector::Baseline,
        },
        None if criterion == "discriminant-zero" => Criterion::DiscriminantZero,
        None if criterion == "cycle-exists" => Criterion::CycleExists,
        _ => return Err(RescycleError::new_err(format!("unknown criterion `{criterion}`"))),
    };
    analysis::bisect_threshold(
        &params.inner,
        control,
        (lo, hi),
        criterion,
        &IntegratorSettings::default(),
    )
    .map(|r| r.value)
    .map_err(err)
}

/// (I, S) of the named split at (Y, K).
#[pyfunction]
fn kaldor_split(kind: &str, params: &PyModelParams, y: f64, k: f64) -> PyResult<(f64, f64)> {
    let kind: SplitKind = kind.parse().map_err(err)?;
    let p = kaldor::split(kind, &params.inner, y, k);
    Ok((p.i, p.s))
}

/// Requirement check of a split over Y in [0.5·Y0, 2·Y0] between two
/// capital levels.
#[pyfunction]
fn kaldor_report(
    py: Python<'_>,
    kind: &str,
    params: &PyModelParams,
    k_low: f64,
    k_high: f64,
) -> PyResult<Py<PyAny>> {
    let kind: SplitKind = kind.parse().map_err(err)?;
    let range = kaldor::default_y_range(&params.inner);
    let report = kaldor::check_kaldor_requirements(
        kind,
        &params.inner,
        range,
        kaldor::DEFAULT_SAMPLES,
        k_low,
        k_high,
    )
    .map_err(err)?;
    let out = to_py(py, &report)?;
    out.bind(py).set_item("passes", report.passes())?;
    Ok(out)
}

#[pymodule]
fn rescycle(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RescycleError", m.py().get_type::<RescycleError>())?;
    m.add_class::<PyModelParams>()?;
    m.add_class::<PySolowParams>()?;
    m.add_class::<PyVdpParams>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(detect_limit_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_points, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_point_3d, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(bisect, m)?)?;
    m.add_function(wrap_pyfunction!(kaldor_split, m)?)?;
    m.add_function(wrap_pyfunction!(kaldor_report, m)?)?;
    Ok(())
}
