//! Python bindings over the solver core.
//!
//! Exposes the two entry points the CLI wraps: scenario simulation (from a
//! preset name or a config document) and manufactured convergence studies.
//! Results come back as plain lists and strings so callers need nothing
//! beyond the extension module itself.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ardfem::analysis::{convergence_study, DensitySeries, StudyKind};
use ardfem::config::{parse_config, RunConfig};
use ardfem::presets;
use ardfem::stepping::{run, StepObserver};
use ardfem::Scheme;

fn value_err(e: ardfem::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_scheme(name: &str) -> PyResult<Scheme> {
    match name {
        "dbe" => Ok(Scheme::Dbe),
        "dbdf2" => Ok(Scheme::Dbdf2),
        other => Err(PyValueError::new_err(format!(
            "scheme must be 'dbe' or 'dbdf2' (got '{other}')"
        ))),
    }
}

fn scheme_name(scheme: Scheme) -> &'static str {
    match scheme {
        Scheme::Dbe => "dbe",
        Scheme::Dbdf2 => "dbdf2",
    }
}

/// A configured run: mesh, time grid, environment and species parameters.
///
/// Build one from a preset name or a config document, inspect or reserialize
/// the configuration, then `run()` it to get a `RunResult`.
#[pyclass]
struct Simulation {
    config: RunConfig,
}

#[pymethods]
impl Simulation {
    /// Parses a config document (same format the CLI reads from a file).
    #[new]
    fn new(config_text: &str) -> PyResult<Self> {
        let config = parse_config(config_text).map_err(value_err)?;
        Ok(Simulation { config })
    }

    /// Loads a named scenario preset; see `preset_names()`.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        let config = presets::preset(name).map_err(value_err)?;
        Ok(Simulation { config })
    }

    #[getter]
    fn n_species(&self) -> usize {
        self.config.species.len()
    }

    #[getter]
    fn n_steps(&self) -> usize {
        self.config.n_steps()
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.config.dt
    }

    #[getter]
    fn t_end(&self) -> f64 {
        self.config.t_end
    }

    #[getter]
    fn scheme(&self) -> &'static str {
        scheme_name(self.config.scheme)
    }

    /// Canonical config text; parsing it back reproduces this simulation.
    fn config_text(&self) -> String {
        self.config.to_text()
    }

    /// Runs every time step and records the per-species mean densities.
    fn run(&self) -> PyResult<RunResult> {
        let problem = self.config.problem().map_err(value_err)?;
        let mut series = DensitySeries::new(&problem.space);
        let mut observers: [&mut dyn StepObserver; 1] = [&mut series];
        let summary = run(&problem, self.config.scheme, &mut observers).map_err(value_err)?;
        Ok(RunResult {
            times: series.times,
            means: series.means,
            steps: summary.steps,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Simulation(scheme='{}', mesh={}x{}, dt={}, T={}, species={})",
            scheme_name(self.config.scheme),
            self.config.nx,
            self.config.ny,
            self.config.dt,
            self.config.t_end,
            self.config.species.len(),
        )
    }
}

/// Mean-density history of a finished run: `times[k]` pairs with
/// `means[k][i]` for species `i` (k = 0 is the initial state).
#[pyclass]
struct RunResult {
    #[pyo3(get)]
    times: Vec<f64>,
    #[pyo3(get)]
    means: Vec<Vec<f64>>,
    #[pyo3(get)]
    steps: usize,
}

#[pymethods]
impl RunResult {
    /// Per-species mean density at the final time.
    fn final_means(&self) -> Vec<f64> {
        self.means.last().cloned().unwrap_or_default()
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(steps={}, final_means={:?})",
            self.steps,
            self.final_means()
        )
    }
}

/// Errors and observed orders from a manufactured refinement ladder.
#[pyclass]
struct Convergence {
    #[pyo3(get)]
    scheme: &'static str,
    #[pyo3(get)]
    study: &'static str,
    /// Refined parameter per level: mesh width h, or step size dt.
    #[pyo3(get)]
    level_params: Vec<f64>,
    /// `errors[level][species]`, space-time H1 norm.
    #[pyo3(get)]
    errors: Vec<Vec<f64>>,
    /// `rates[level][species]`; the first level has no rate (None).
    #[pyo3(get)]
    rates: Vec<Vec<Option<f64>>>,
    table: String,
    csv: String,
}

#[pymethods]
impl Convergence {
    /// Human-readable error/rate table.
    fn table(&self) -> &str {
        &self.table
    }

    /// The table as CSV, identical to the CLI's convergence output.
    fn csv(&self) -> &str {
        &self.csv
    }

    fn __repr__(&self) -> String {
        format!(
            "Convergence(scheme='{}', study='{}', levels={})",
            self.scheme,
            self.study,
            self.errors.len()
        )
    }
}

/// Runs a manufactured convergence study.
///
/// `scheme` is 'dbe' or 'dbdf2', `study` is 'spatial' or 'temporal',
/// `levels` counts successive halvings of h or dt.
#[pyfunction]
fn convergence(scheme: &str, study: &str, levels: usize) -> PyResult<Convergence> {
    let scheme = parse_scheme(scheme)?;
    let study = match study {
        "spatial" => StudyKind::Spatial,
        "temporal" => StudyKind::Temporal,
        other => {
            return Err(PyValueError::new_err(format!(
                "study must be 'spatial' or 'temporal' (got '{other}')"
            )))
        }
    };
    let report = convergence_study(scheme, study, levels).map_err(value_err)?;
    Ok(Convergence {
        scheme: scheme_name(scheme),
        study: match study {
            StudyKind::Spatial => "spatial",
            StudyKind::Temporal => "temporal",
        },
        level_params: report.level_params.clone(),
        errors: report.errors.iter().map(|row| row.to_vec()).collect(),
        rates: report.rates(),
        table: report.to_table(),
        csv: report.to_csv(),
    })
}

/// Names accepted by `Simulation.preset`.
#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    presets::preset_names()
}

/// One-line description of a preset, or None for unknown names.
#[pyfunction]
fn preset_summary(name: &str) -> Option<&'static str> {
    presets::preset_summary(name)
}

#[pymodule]
fn ardfem_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Simulation>()?;
    m.add_class::<RunResult>()?;
    m.add_class::<Convergence>()?;
    m.add_function(wrap_pyfunction!(convergence, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset_summary, m)?)?;
    Ok(())
}
