//! Python bindings. Matrices cross the boundary as lists of rows of
//! Python complex numbers.

use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qbattery::experiment::{self, RunOptions, ScenarioConfig};
use qbattery::observables::{coherence_l1_energy_basis, ergotropy as spectral_ergotropy};
use qbattery::oracles::{self, DephasingTwoQubitParams};
use qbattery::{DensityMatrix, OperatorMatrix};

create_exception!(qbattery_py, QBatteryError, PyException, "Error raised by the simulation library.");

/// Carries the CLI exit status as the second exception argument.
fn to_py(e: qbattery::Error) -> PyErr {
    QBatteryError::new_err((e.to_string(), e.exit_code()))
}

type Rows = Vec<Vec<Complex64>>;

fn load(target: &str) -> PyResult<ScenarioConfig> {
    if target.contains('=') {
        ScenarioConfig::parse(target).map_err(to_py)
    } else {
        ScenarioConfig::load(target).map_err(to_py)
    }
}

#[pyfunction]
fn list_presets() -> Vec<(&'static str, &'static str)> {
    experiment::list_presets()
}

/// Schema and CPTP check; returns the number of runs the scenario expands to.
#[pyfunction]
#[pyo3(signature = (target, auto_cptp = false))]
fn validate(target: &str, auto_cptp: bool) -> PyResult<usize> {
    let config = load(target)?;
    Ok(experiment::validate(&config, auto_cptp).map_err(to_py)?.len())
}

/// Same as `qbattery run`: writes CSV files and a manifest, returns their paths.
#[pyfunction]
#[pyo3(signature = (target, out_dir, auto_cptp = false))]
fn run<'py>(py: Python<'py>, target: &str, out_dir: PathBuf, auto_cptp: bool) -> PyResult<Bound<'py, PyDict>> {
    let config = load(target)?;
    let opts = RunOptions { out_dir, auto_cptp };
    let outcome = py.detach(|| experiment::run_scenario(&config, &opts)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("manifest", outcome.manifest_path)?;
    out.set_item("csv", outcome.csv_paths)?;
    Ok(out)
}

/// Runs a scenario in memory. `target` is a preset name, a config path or
/// config text. One dict per run, with each CSV column as a list.
#[pyfunction]
fn simulate<'py>(py: Python<'py>, target: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let config = load(target)?;
    let plans = experiment::plan_runs(&config, false).map_err(to_py)?;
    let mut out = Vec::with_capacity(plans.len());
    for plan in &plans {
        let r = py.detach(|| experiment::simulate(&config, plan)).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("channel", plan.channel.name())?;
        d.set_item("topology", plan.topology.name())?;
        d.set_item("n_sites", plan.n_sites)?;
        d.set_item("converged", r.converged)?;
        d.set_item("t", r.rows.iter().map(|x| x.t).collect::<Vec<_>>())?;
        d.set_item("W", r.rows.iter().map(|x| x.w).collect::<Vec<_>>())?;
        d.set_item("ergotropy", r.rows.iter().map(|x| x.ergotropy).collect::<Vec<_>>())?;
        d.set_item("stored_E", r.rows.iter().map(|x| x.stored).collect::<Vec<_>>())?;
        d.set_item("ratio_R", r.rows.iter().map(|x| x.ratio).collect::<Vec<_>>())?;
        d.set_item(
            "coherence_per_site",
            r.rows.iter().map(|x| x.coherence_per_site).collect::<Vec<_>>(),
        )?;
        out.push(d);
    }
    Ok(out)
}

/// Returns `(W, passive_energy, ergotropy)`.
#[pyfunction]
fn ergotropy(rho: Rows, h: Rows) -> PyResult<(f64, f64, f64)> {
    let rho = DensityMatrix::from_rows(&rho).map_err(to_py)?;
    let h = OperatorMatrix::from_rows(&h).map_err(to_py)?;
    let e = spectral_ergotropy(&rho, &h).map_err(to_py)?;
    Ok((e.w, e.passive_energy, e.ergotropy))
}

/// l1 coherence of `rho` in the eigenbasis of `h`.
#[pyfunction]
fn coherence_l1(rho: Rows, h: Rows) -> PyResult<f64> {
    let rho = DensityMatrix::from_rows(&rho).map_err(to_py)?;
    let h = OperatorMatrix::from_rows(&h).map_err(to_py)?;
    coherence_l1_energy_basis(&rho, &h).map_err(to_py)
}

/// Closed-form two-qubit state under correlated dephasing, from `|->|->`.
#[pyfunction]
fn correlated_dephasing_state(h: f64, gamma: f64, modulus: f64, phase: f64, j_z: f64, t: f64) -> PyResult<Rows> {
    let params = DephasingTwoQubitParams::from_polar(h, gamma, modulus, phase, j_z);
    Ok(oracles::correlated_dephasing_state(&params, t).map_err(to_py)?.to_rows())
}

#[pyfunction]
fn local_ad_state(gamma: f64, t: f64) -> PyResult<Rows> {
    Ok(oracles::local_ad_state(gamma, t).map_err(to_py)?.to_rows())
}

#[pyfunction]
fn gamma_nn_eigenvalues(gamma: f64, gamma12: Complex64, n: usize) -> Vec<f64> {
    oracles::gamma_nn_eigenvalues(gamma, gamma12, n)
}

#[pymodule]
fn qbattery_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", qbattery::VERSION)?;
    m.add("QBatteryError", m.py().get_type::<QBatteryError>())?;
    m.add_function(wrap_pyfunction!(list_presets, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(ergotropy, m)?)?;
    m.add_function(wrap_pyfunction!(coherence_l1, m)?)?;
    m.add_function(wrap_pyfunction!(correlated_dephasing_state, m)?)?;
    m.add_function(wrap_pyfunction!(local_ad_state, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_nn_eigenvalues, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_travels_with_the_error() {
        Python::initialize();
        Python::attach(|py| {
            let err = to_py(qbattery::Error::Cptp("negative rate".into()));
            assert!(err.is_instance_of::<QBatteryError>(py));
            let args = err.value(py).getattr("args").unwrap();
            let (msg, code): (String, i32) = args.extract().unwrap();
            assert_eq!(code, 3);
            assert!(msg.contains("negative rate"));
        });
    }

    #[test]
    fn config_text_is_accepted_inline() {
        let cfg = load("preset = \"fig2_dephasing_product\"\nn_sites = [2]").unwrap();
        assert_eq!(cfg.n_sites, vec![2]);
    }
}
