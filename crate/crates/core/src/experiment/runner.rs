//! Executes a scenario: one evolution per (channel, N, topology), written
//! as CSV plus a JSON manifest.

use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::config::ScenarioConfig;
use super::csv::{format_number, CSV_HEADER};
use crate::dissipation::{build_gamma, validate_cptp, Channel, NoiseSpec, Topology};
use crate::error::{Error, Result};
use crate::evolver::{evolve_with, steady_state_probe, EvolutionConfig, EvolutionSummary};
use crate::observables::EnergyBasis;
use crate::state::DensityMatrix;

/// States kept for the steady-state check (the window is subsampled).
const MAX_WINDOW_STATES: usize = 64;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Shrink all-to-all cross rates to `gamma / (N - 1)` when they would
    /// break complete positivity, instead of refusing.
    pub auto_cptp: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AutoCptp {
    pub requested_modulus: f64,
    pub applied_modulus: f64,
}

#[derive(Clone, Debug)]
pub struct RunPlan {
    pub channel: Channel,
    pub topology: Topology,
    pub n_sites: usize,
    pub spec: NoiseSpec,
    pub evolution: EvolutionConfig,
    pub auto_cptp: Option<AutoCptp>,
}

/// One CSV row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub t: f64,
    pub w: f64,
    pub ergotropy: f64,
    pub stored: f64,
    pub ratio: Option<f64>,
    pub coherence_per_site: f64,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub plan: RunPlan,
    pub rows: Vec<Row>,
    pub summary: EvolutionSummary,
    pub converged: bool,
    pub steady_state_deviation: f64,
    pub wall_time: f64,
}

#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub manifest_path: PathBuf,
    pub csv_paths: Vec<PathBuf>,
    pub results: Vec<RunResult>,
}

/// Builds and CPTP-checks every run before any integration starts.
pub fn plan_runs(config: &ScenarioConfig, auto_cptp: bool) -> Result<Vec<RunPlan>> {
    let mut plans = Vec::new();
    for &channel in &config.channel {
        for &n_sites in &config.n_sites {
            for &topology in &config.topology {
                let mut spec = config.noise_spec(channel, topology);
                spec.validate()?;
                let mut applied = None;
                let report = validate_cptp(&build_gamma(&spec, n_sites)?)?;
                if !report.valid {
                    if auto_cptp && topology == Topology::AllToAll && n_sites > 1 {
                        let modulus = spec.gamma / (n_sites - 1) as f64;
                        applied = Some(AutoCptp {
                            requested_modulus: spec.gamma_offdiag.norm(),
                            applied_modulus: modulus,
                        });
                        spec.gamma_offdiag = Complex64::from_polar(modulus, spec.gamma_offdiag.arg());
                        let rescaled = validate_cptp(&build_gamma(&spec, n_sites)?)?;
                        if !rescaled.valid {
                            return Err(cptp_error(channel, topology, n_sites, &rescaled));
                        }
                    } else {
                        return Err(cptp_error(channel, topology, n_sites, &report));
                    }
                }
                let evolution = config.evolution_config(&spec);
                evolution.validate()?;
                plans.push(RunPlan {
                    channel,
                    topology,
                    n_sites,
                    spec,
                    evolution,
                    auto_cptp: applied,
                });
            }
        }
    }
    Ok(plans)
}

fn cptp_error(channel: Channel, topology: Topology, n: usize, report: &crate::dissipation::CptpReport) -> Error {
    Error::Cptp(format!(
        "{} {} reservoirs with N = {n}: bound {} {}, min eigenvalue of the rate matrix {:.6e}",
        topology.name(),
        channel.name(),
        report.bound,
        if report.analytic_bound_satisfied { "holds" } else { "violated" },
        report.min_eigenvalue
    ))
}

/// Integrates one run and evaluates all observables at every sample.
pub fn simulate(config: &ScenarioConfig, plan: &RunPlan) -> Result<RunResult> {
    let start = Instant::now();
    let n = plan.n_sites;
    let h_b = config.battery_hamiltonian(n)?;
    let basis = EnergyBasis::new(&h_b)?;
    let rho0 = config.initial_state(n)?;
    let w0 = basis.energy(&rho0)?;

    let cfg = &plan.evolution;
    let total = cfg.n_samples();
    let window_samples = ((config.steady_window / cfg.dt_sample).round() as usize).min(total);
    let stride = window_samples.div_ceil(MAX_WINDOW_STATES).max(1);
    let mut window: Vec<(f64, DensityMatrix)> = Vec::new();

    let mut rows = Vec::with_capacity(total + 1);
    let mut k = 0usize;
    let summary = evolve_with(&rho0, &plan.spec.effective_hamiltonian(n), &plan.spec, cfg, |t, rho| {
        let r = basis.report(rho, w0)?;
        rows.push(Row {
            t,
            w: r.w,
            ergotropy: r.ergotropy,
            stored: r.stored,
            ratio: r.ratio,
            coherence_per_site: r.coherence / n as f64,
        });
        if total - k <= window_samples && (total - k).is_multiple_of(stride) {
            window.push((t, rho.clone()));
        }
        k += 1;
        Ok(())
    })?;

    let steady = steady_state_probe(&window, config.steady_window)?;
    Ok(RunResult {
        plan: plan.clone(),
        rows,
        summary,
        converged: steady.converged,
        steady_state_deviation: steady.max_deviation,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

pub fn csv_text(rows: &[Row]) -> String {
    let mut out = String::with_capacity(rows.len() * 96);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let ratio = r.ratio.map(format_number).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            format_number(r.t),
            format_number(r.w),
            format_number(r.ergotropy),
            format_number(r.stored),
            ratio,
            format_number(r.coherence_per_site)
        ));
    }
    out
}

pub fn csv_file_name(config: &ScenarioConfig, plan: &RunPlan) -> String {
    let channel = if config.channel.len() > 1 {
        format!("_{}", plan.channel.name())
    } else {
        String::new()
    };
    format!("{}{}_N{}_{}.csv", config.name, channel, plan.n_sites, plan.topology.name())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Validates, runs every variant (in parallel) and writes the outputs.
pub fn run_scenario(config: &ScenarioConfig, opts: &RunOptions) -> Result<ScenarioOutcome> {
    config.validate()?;
    let plans = plan_runs(config, opts.auto_cptp)?;
    std::fs::create_dir_all(&opts.out_dir)?;

    let started_at = chrono::Utc::now();
    let start = Instant::now();
    let results = plans
        .par_iter()
        .map(|plan| simulate(config, plan))
        .collect::<Result<Vec<_>>>()?;

    let mut csv_paths = Vec::new();
    let mut runs = Vec::new();
    for result in &results {
        let plan = &result.plan;
        let file_name = csv_file_name(config, plan);
        let text = csv_text(&result.rows);
        let path = opts.out_dir.join(&file_name);
        std::fs::write(&path, &text)?;
        csv_paths.push(path);
        runs.push(json!({
            "channel": plan.channel.name(),
            "topology": plan.topology.name(),
            "n_sites": plan.n_sites,
            "csv": file_name,
            "sha256": sha256_hex(text.as_bytes()),
            "integrator": plan.evolution.integrator,
            "integrator_step": result.summary.step,
            "samples": result.summary.samples,
            "converged": result.converged,
            "steady_state_deviation": result.steady_state_deviation,
            "max_trace_drift": result.summary.max_trace_drift,
            "max_hermiticity_error": result.summary.max_hermiticity,
            "min_eigenvalue": result.summary.min_eigenvalue,
            "gamma_offdiag_modulus": plan.spec.gamma_offdiag.norm(),
            "auto_cptp": plan.auto_cptp,
            "wall_time_s": result.wall_time,
        }));
    }

    let manifest = json!({
        "name": config.name,
        "library_version": crate::VERSION,
        "config": config,
        "auto_cptp_enabled": opts.auto_cptp,
        "started_at": started_at.to_rfc3339(),
        "finished_at": chrono::Utc::now().to_rfc3339(),
        "wall_time_s": start.elapsed().as_secs_f64(),
        "converged": results.iter().all(|r| r.converged),
        "runs": runs,
    });
    let manifest_path = opts.out_dir.join(format!("{}_manifest.json", config.name));
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.into()))?;
    text.push('\n');
    std::fs::write(&manifest_path, text)?;

    Ok(ScenarioOutcome {
        manifest_path,
        csv_paths,
        results,
    })
}

/// Schema and CPTP checks without integrating.
pub fn validate(config: &ScenarioConfig, auto_cptp: bool) -> Result<Vec<RunPlan>> {
    config.validate()?;
    plan_runs(config, auto_cptp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioConfig {
        ScenarioConfig::parse(
            "preset = \"fig2_dephasing_product\"\nn_sites = [2, 3]\nt_max = 1.0\ndt_sample = 0.05\n",
        )
        .unwrap()
    }

    #[test]
    fn plans_cover_every_variant() {
        let plans = plan_runs(&small(), false).unwrap();
        assert_eq!(plans.len(), 4);
        assert!(plans.iter().all(|p| p.auto_cptp.is_none()));
    }

    #[test]
    fn cptp_violation_is_refused() {
        let mut cfg = small();
        cfg.gamma = 0.01;
        cfg.gamma_offdiag_modulus = 0.02;
        cfg.n_sites = vec![4];
        let err = plan_runs(&cfg, true).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("nearest_neighbor"));
    }

    #[test]
    fn auto_cptp_rescales_all_to_all() {
        let mut cfg = small();
        cfg.topology = vec![Topology::AllToAll];
        cfg.n_sites = vec![6];
        cfg.gamma_offdiag_modulus = 0.1;
        assert!(matches!(plan_runs(&cfg, false), Err(Error::Cptp(_))));
        let plans = plan_runs(&cfg, true).unwrap();
        let applied = plans[0].auto_cptp.unwrap();
        assert_eq!(applied.requested_modulus, 0.1);
        assert!((applied.applied_modulus - 0.04).abs() < 1e-15);
        assert!((plans[0].spec.gamma_offdiag.arg() - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
    }

    #[test]
    fn rows_satisfy_output_invariants() {
        let cfg = small();
        let plans = plan_runs(&cfg, false).unwrap();
        let result = simulate(&cfg, &plans[0]).unwrap();
        assert_eq!(result.rows.len(), 21);
        let w0 = result.rows[0].w;
        for r in &result.rows {
            assert!(r.ergotropy >= -1e-10);
            assert!((r.stored - (r.w - w0)).abs() < 1e-12);
            assert_eq!(r.ratio.is_none(), r.stored.abs() <= 1e-9);
        }
        assert_eq!(result.rows[0].ratio, None);
    }

    #[test]
    fn csv_layout() {
        let rows = [
            Row {
                t: 0.0,
                w: -1.0,
                ergotropy: 0.0,
                stored: 0.0,
                ratio: None,
                coherence_per_site: 0.5,
            },
            Row {
                t: 0.01,
                w: -0.9,
                ergotropy: 0.25,
                stored: 0.1,
                ratio: Some(2.5),
                coherence_per_site: 1.0 / 3.0,
            },
        ];
        let text = csv_text(&rows);
        assert_eq!(
            text,
            "t,W,ergotropy,stored_E,ratio_R,coherence_per_site\n0,-1,0,0,,0.5\n0.01,-0.9,0.25,0.1,2.5,0.333333333333\n"
        );
    }

    #[test]
    fn file_names() {
        let cfg = small();
        let plans = plan_runs(&cfg, false).unwrap();
        assert_eq!(csv_file_name(&cfg, &plans[0]), "fig2_dephasing_product_N2_nearest_neighbor.csv");
        let fig7 = ScenarioConfig::load("fig7_longrange_comparison").unwrap();
        let plans = plan_runs(&fig7, false).unwrap();
        assert_eq!(
            csv_file_name(&fig7, &plans[0]),
            "fig7_longrange_comparison_dephasing_N6_all_to_all.csv"
        );
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
