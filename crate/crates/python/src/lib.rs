//! Python bindings: environments, decoherence and diffusion, the qubit
//! density matrix, geometric phases and figure sweeps.

use gpdephase_core::envmodels::markovianity_report;
use gpdephase_core::gp::{self, DEFAULT_GRID};
use gpdephase_core::qubit;
use gpdephase_core::sweep::{self as core_sweep, EnvParams, SweepOptions};
use gpdephase_core::{
    Axis, BlochInitial, EnvKind, Environment as CoreEnv, GpRun, NonEqEnv, NonEqMode,
    QuadratureSpec, ReducedDensity, SpectralDensity, SweepTable as CoreTable, ThermalEnv,
};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

pyo3::create_exception!(gpdephase, GpdephaseError, PyValueError);

fn err(e: gpdephase_core::Error) -> PyErr {
    GpdephaseError::new_err(e.to_string())
}

fn parse_mode(mode: &str) -> PyResult<NonEqMode> {
    mode.parse::<NonEqMode>().map_err(err)
}

fn parse_kind(kind: &str) -> PyResult<EnvKind> {
    match kind {
        "thermal" => Ok(EnvKind::Thermal),
        "noneq" => Ok(EnvKind::NonEquilibrium),
        other => Err(GpdephaseError::new_err(format!(
            "unknown environment {other:?} (expected \"thermal\" or \"noneq\")"
        ))),
    }
}

fn spec(
    relative_tolerance: f64,
    absolute_tolerance: f64,
    max_subdivisions: usize,
) -> PyResult<QuadratureSpec> {
    QuadratureSpec::new(relative_tolerance, absolute_tolerance, max_subdivisions).map_err(err)
}

/// Thermal or non-equilibrium dephasing environment.
#[pyclass(
    name = "Environment",
    module = "gpdephase",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyEnvironment {
    inner: CoreEnv,
}

#[pymethods]
impl PyEnvironment {
    /// Equilibrium bath at temperature `temperature` (units of ħΩ/k_B).
    #[staticmethod]
    #[pyo3(signature = (gamma0, s, cutoff = 10.0, temperature = 0.0))]
    fn thermal(gamma0: f64, s: f64, cutoff: f64, temperature: f64) -> PyResult<Self> {
        let sd = SpectralDensity::new(gamma0, s, cutoff).map_err(err)?;
        Ok(Self {
            inner: ThermalEnv::new(sd, temperature).map_err(err)?.into(),
        })
    }

    /// Non-equilibrium bath with time offset `lam` and relaxation rate `d`.
    #[staticmethod]
    #[pyo3(signature = (gamma0, s, cutoff = 10.0, lam = 0.3, d = 2.0, mode = "rebased"))]
    fn noneq(gamma0: f64, s: f64, cutoff: f64, lam: f64, d: f64, mode: &str) -> PyResult<Self> {
        let sd = SpectralDensity::new(gamma0, s, cutoff).map_err(err)?;
        Ok(Self {
            inner: NonEqEnv::new(sd, lam, d, parse_mode(mode)?)
                .map_err(err)?
                .into(),
        })
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    #[getter]
    fn gamma0(&self) -> f64 {
        self.inner.spectral().gamma0()
    }

    #[getter]
    fn s(&self) -> f64 {
        self.inner.spectral().s()
    }

    #[getter]
    fn cutoff(&self) -> f64 {
        self.inner.spectral().cutoff()
    }

    /// Spectral density I(ω).
    fn spectral_density(&self, omega: f64) -> PyResult<f64> {
        self.inner.spectral().eval(omega).map_err(err)
    }

    #[pyo3(signature = (t, relative_tolerance = 1e-9, absolute_tolerance = 1e-12, max_subdivisions = 2000))]
    fn decoherence(
        &self,
        t: f64,
        relative_tolerance: f64,
        absolute_tolerance: f64,
        max_subdivisions: usize,
    ) -> PyResult<f64> {
        let q = spec(relative_tolerance, absolute_tolerance, max_subdivisions)?;
        self.inner.decoherence(t, &q).map_err(err)
    }

    #[pyo3(signature = (t, relative_tolerance = 1e-9, absolute_tolerance = 1e-12, max_subdivisions = 2000))]
    fn diffusion(
        &self,
        t: f64,
        relative_tolerance: f64,
        absolute_tolerance: f64,
        max_subdivisions: usize,
    ) -> PyResult<f64> {
        let q = spec(relative_tolerance, absolute_tolerance, max_subdivisions)?;
        self.inner.diffusion(t, &q).map_err(err)
    }

    /// Negative-diffusion scan on (0, t_max]; returns a dict with
    /// `markovian`, `intervals`, `first_crossing` and `min_diffusion`.
    #[pyo3(signature = (t_max, samples = 2000))]
    fn markovianity<'py>(
        &self,
        py: Python<'py>,
        t_max: f64,
        samples: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = markovianity_report(
            &self.inner,
            (0.0, t_max),
            samples,
            &QuadratureSpec::default(),
        )
        .map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("markovian", r.is_markovian_on_window)?;
        d.set_item("intervals", r.negative_intervals.intervals)?;
        d.set_item("first_crossing", r.negative_intervals.first_crossing)?;
        d.set_item("min_diffusion", r.min_diffusion)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let sd = self.inner.spectral();
        match &self.inner {
            CoreEnv::Thermal(e) => format!(
                "Environment.thermal(gamma0={}, s={}, cutoff={}, temperature={})",
                sd.gamma0(),
                sd.s(),
                sd.cutoff(),
                e.temperature()
            ),
            CoreEnv::NonEq(e) => format!(
                "Environment.noneq(gamma0={}, s={}, cutoff={}, lam={}, d={}, mode={:?})",
                sd.gamma0(),
                sd.s(),
                sd.cutoff(),
                e.lambda(),
                e.d(),
                match e.mode() {
                    NonEqMode::Rebased => "rebased",
                    NonEqMode::Raw => "raw",
                }
            ),
        }
    }
}

#[pyclass(name = "GpResult", module = "gpdephase", frozen, get_all)]
struct PyGpResult {
    phi_g: f64,
    phi_u: f64,
    delta_phi: f64,
    normalized_delta: f64,
    grid_points: usize,
    richardson_gap: f64,
}

#[pymethods]
impl PyGpResult {
    fn __repr__(&self) -> String {
        format!(
            "GpResult(phi_g={}, phi_u={}, delta_phi={}, normalized_delta={}, grid_points={}, richardson_gap={})",
            self.phi_g, self.phi_u, self.delta_phi, self.normalized_delta, self.grid_points, self.richardson_gap
        )
    }
}

/// Rectangular table of sweep results.
#[pyclass(name = "SweepTable", module = "gpdephase", frozen)]
struct PySweepTable {
    inner: CoreTable,
}

#[pymethods]
impl PySweepTable {
    /// `[(name, points), ...]`, outermost axis first.
    #[getter]
    fn axes(&self) -> Vec<(String, Vec<f64>)> {
        self.inner
            .axes
            .iter()
            .map(|a| (a.name.clone(), a.points.clone()))
            .collect()
    }

    #[getter]
    fn columns(&self) -> Vec<String> {
        self.inner.columns.clone()
    }

    /// Row-major values, one row of `len(columns)` per grid point.
    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }

    #[getter]
    fn metadata<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let text = serde_json::to_string(&self.inner.metadata)
            .map_err(|e| GpdephaseError::new_err(e.to_string()))?;
        py.import("json")?.call_method1("loads", (text,))
    }

    fn points(&self) -> usize {
        self.inner.points()
    }

    fn column(&self, name: &str) -> PyResult<Vec<f64>> {
        self.inner
            .column(name)
            .ok_or_else(|| GpdephaseError::new_err(format!("no column {name:?}")))
    }

    fn coordinates(&self, index: usize) -> PyResult<Vec<f64>> {
        if index >= self.inner.points() {
            return Err(GpdephaseError::new_err(format!(
                "point {index} out of range"
            )));
        }
        Ok(self.inner.coordinates(index))
    }

    fn to_csv(&self) -> PyResult<String> {
        self.inner.to_csv().map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: CoreTable::from_csv(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: CoreTable::from_json(text).map_err(err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.points()
    }

    fn __repr__(&self) -> String {
        let shape: Vec<String> = self
            .inner
            .axes
            .iter()
            .map(|a| format!("{}={}", a.name, a.len()))
            .collect();
        format!(
            "SweepTable([{}], columns={:?})",
            shape.join(", "),
            self.inner.columns
        )
    }
}

#[pyfunction]
fn gamma(x: f64) -> PyResult<f64> {
    gpdephase_core::numerics::gamma(x).map_err(err)
}

/// Reduced density matrix at time `t` (units of 1/Ω) for decoherence factor
/// `decoherence`, as a 2×2 nested list of complex numbers.
#[pyfunction]
fn reduced_density(theta: f64, decoherence: f64, t: f64) -> PyResult<Vec<Vec<Complex64>>> {
    let init = BlochInitial::new(theta).map_err(err)?;
    let rho = qubit::reduced_density(&init, decoherence, t).map_err(err)?;
    Ok(rho.entries.iter().map(|r| r.to_vec()).collect())
}

/// Eigenpairs `[(value, [c0, c1]), ...]` of a 2×2 Hermitian matrix.
#[pyfunction]
fn eigensystem(matrix: Vec<Vec<Complex64>>) -> PyResult<Vec<(f64, Vec<Complex64>)>> {
    if matrix.len() != 2 || matrix.iter().any(|r| r.len() != 2) {
        return Err(GpdephaseError::new_err("expected a 2x2 matrix"));
    }
    let rho = ReducedDensity::from_entries(
        [[matrix[0][0], matrix[0][1]], [matrix[1][0], matrix[1][1]]],
        0.0,
    );
    let (a, b) = qubit::eigensystem(&rho).map_err(err)?;
    Ok([a, b]
        .into_iter()
        .map(|p| (p.eigenvalue, p.eigenvector.to_vec()))
        .collect())
}

/// Closed-system phase π(1 − cos θ).
#[pyfunction]
fn gp_unitary(theta: f64) -> PyResult<f64> {
    Ok(gp::gp_unitary(&BlochInitial::new(theta).map_err(err)?))
}

/// Geometric phase over one period for initial polar angle `theta`.
#[pyfunction]
#[pyo3(signature = (env, theta, grid = DEFAULT_GRID))]
fn gp_evaluate(
    py: Python<'_>,
    env: &PyEnvironment,
    theta: f64,
    grid: usize,
) -> PyResult<PyGpResult> {
    let init = BlochInitial::new(theta).map_err(err)?;
    let run = GpRun::new(init, env.inner).with_grid(grid).map_err(err)?;
    let r = py.detach(|| gp::gp_evaluate(&run)).map_err(err)?;
    Ok(PyGpResult {
        phi_g: r.phi_g,
        phi_u: r.phi_u,
        delta_phi: r.delta_phi,
        normalized_delta: r.normalized_delta,
        grid_points: r.grid_points,
        richardson_gap: r.richardson_gap,
    })
}

/// First-order phase correction for the zero-temperature thermal bath.
#[pyfunction]
#[pyo3(signature = (gamma0, s, theta, cutoff = 10.0))]
fn correction_thermal_perturbative(gamma0: f64, s: f64, theta: f64, cutoff: f64) -> PyResult<f64> {
    let sd = SpectralDensity::new(gamma0, s, cutoff).map_err(err)?;
    gp::correction_thermal_perturbative(&sd, &BlochInitial::new(theta).map_err(err)?).map_err(err)
}

/// First-order phase correction for the non-equilibrium bath.
#[pyfunction]
#[pyo3(signature = (gamma0, s, theta, cutoff = 10.0))]
fn correction_noneq_perturbative(gamma0: f64, s: f64, theta: f64, cutoff: f64) -> PyResult<f64> {
    let sd = SpectralDensity::new(gamma0, s, cutoff).map_err(err)?;
    Ok(gp::correction_noneq_perturbative(
        &sd,
        &BlochInitial::new(theta).map_err(err)?,
    ))
}

struct SweepArgs {
    kind: EnvKind,
    params: EnvParams,
    opts: SweepOptions,
}

#[allow(clippy::too_many_arguments)]
fn sweep_args(
    kind: &str,
    gamma0: f64,
    cutoff: f64,
    temperature: f64,
    lam: f64,
    d: f64,
    mode: &str,
    grid: usize,
) -> PyResult<SweepArgs> {
    Ok(SweepArgs {
        kind: parse_kind(kind)?,
        params: EnvParams {
            gamma0,
            cutoff,
            temperature,
            lambda: lam,
            d,
            mode: parse_mode(mode)?,
        },
        opts: SweepOptions {
            gp_grid: grid,
            ..Default::default()
        },
    })
}

/// D(t) over s_values × (0, t_max] with t_count points.
#[pyfunction]
#[pyo3(signature = (kind, s_values, t_max = 3.0, t_count = 200, gamma0 = 0.1, cutoff = 10.0, temperature = 0.0, lam = 0.3, d = 2.0, mode = "rebased"))]
#[allow(clippy::too_many_arguments)]
fn diffusion_map(
    py: Python<'_>,
    kind: &str,
    s_values: Vec<f64>,
    t_max: f64,
    t_count: usize,
    gamma0: f64,
    cutoff: f64,
    temperature: f64,
    lam: f64,
    d: f64,
    mode: &str,
) -> PyResult<PySweepTable> {
    let a = sweep_args(
        kind,
        gamma0,
        cutoff,
        temperature,
        lam,
        d,
        mode,
        DEFAULT_GRID,
    )?;
    let t = Axis::half_open("t", t_max, t_count).map_err(err)?;
    let s = Axis::values("s", s_values).map_err(err)?;
    let inner = py
        .detach(|| core_sweep::diffusion_map(a.kind, &a.params, &t, &s, &a.opts))
        .map_err(err)?;
    Ok(PySweepTable { inner })
}

/// F(t) for each s on [0, t_max] with t_count points.
#[pyfunction]
#[pyo3(signature = (kind, s_values, t_max = 3.0, t_count = 301, gamma0 = 0.1, cutoff = 10.0, temperature = 0.0, lam = 0.3, d = 2.0, mode = "rebased"))]
#[allow(clippy::too_many_arguments)]
fn decoherence_curves(
    py: Python<'_>,
    kind: &str,
    s_values: Vec<f64>,
    t_max: f64,
    t_count: usize,
    gamma0: f64,
    cutoff: f64,
    temperature: f64,
    lam: f64,
    d: f64,
    mode: &str,
) -> PyResult<PySweepTable> {
    let a = sweep_args(
        kind,
        gamma0,
        cutoff,
        temperature,
        lam,
        d,
        mode,
        DEFAULT_GRID,
    )?;
    let t = Axis::linspace("t", 0.0, t_max, t_count).map_err(err)?;
    let inner = py
        .detach(|| core_sweep::decoherence_curves(a.kind, &a.params, &t, &s_values, &a.opts))
        .map_err(err)?;
    Ok(PySweepTable { inner })
}

/// Geometric phase over gamma0_values × s_values at fixed theta.
#[pyfunction]
#[pyo3(signature = (kind, s_values, gamma0_values, theta, cutoff = 10.0, temperature = 0.0, lam = 0.5, d = 1.0, mode = "rebased", grid = DEFAULT_GRID))]
#[allow(clippy::too_many_arguments)]
fn gp_vs_s(
    py: Python<'_>,
    kind: &str,
    s_values: Vec<f64>,
    gamma0_values: Vec<f64>,
    theta: f64,
    cutoff: f64,
    temperature: f64,
    lam: f64,
    d: f64,
    mode: &str,
    grid: usize,
) -> PyResult<PySweepTable> {
    let g0 = gamma0_values.first().copied().unwrap_or(0.0);
    let a = sweep_args(kind, g0, cutoff, temperature, lam, d, mode, grid)?;
    let s = Axis::values("s", s_values).map_err(err)?;
    let inner = py
        .detach(|| core_sweep::gp_vs_s(a.kind, &a.params, &s, &gamma0_values, theta, &a.opts))
        .map_err(err)?;
    Ok(PySweepTable { inner })
}

/// Geometric phase over s_values × theta_values at fixed gamma0.
#[pyfunction]
#[pyo3(signature = (kind, s_values, theta_values, gamma0, cutoff = 10.0, temperature = 0.0, lam = 0.5, d = 1.0, mode = "rebased", grid = DEFAULT_GRID))]
#[allow(clippy::too_many_arguments)]
fn gp_vs_theta(
    py: Python<'_>,
    kind: &str,
    s_values: Vec<f64>,
    theta_values: Vec<f64>,
    gamma0: f64,
    cutoff: f64,
    temperature: f64,
    lam: f64,
    d: f64,
    mode: &str,
    grid: usize,
) -> PyResult<PySweepTable> {
    let a = sweep_args(kind, gamma0, cutoff, temperature, lam, d, mode, grid)?;
    let theta = Axis::values("theta", theta_values).map_err(err)?;
    let inner = py
        .detach(|| core_sweep::gp_vs_theta(a.kind, &a.params, &theta, &s_values, &a.opts))
        .map_err(err)?;
    Ok(PySweepTable { inner })
}

#[pymodule]
fn gpdephase(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", gpdephase_core::VERSION)?;
    m.add("GpdephaseError", m.py().get_type::<GpdephaseError>())?;
    m.add_class::<PyEnvironment>()?;
    m.add_class::<PyGpResult>()?;
    m.add_class::<PySweepTable>()?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(reduced_density, m)?)?;
    m.add_function(wrap_pyfunction!(eigensystem, m)?)?;
    m.add_function(wrap_pyfunction!(gp_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(gp_evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(correction_thermal_perturbative, m)?)?;
    m.add_function(wrap_pyfunction!(correction_noneq_perturbative, m)?)?;
    m.add_function(wrap_pyfunction!(diffusion_map, m)?)?;
    m.add_function(wrap_pyfunction!(decoherence_curves, m)?)?;
    m.add_function(wrap_pyfunction!(gp_vs_s, m)?)?;
    m.add_function(wrap_pyfunction!(gp_vs_theta, m)?)?;
    Ok(())
}
