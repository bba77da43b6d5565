//! GKSL time evolution of the battery state.
//!
//! The default integrator is fixed-step RK4 applied directly to the
//! matrix-valued right-hand side. The generator is compiled once into
//! either an elementwise multiplier (all operators diagonal, i.e.
//! dephasing) or a sparse effective non-Hermitian Hamiltonian
//! `G = H - (i/2) sum Gamma_ij L_i^dag L_j` plus monomial jump terms.
//! A dense superoperator exponential is available for small systems as an
//! integrator-independent cross-check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dissipation::{build_gamma, dissipator_matrix, jump_operators, validate_cptp, Channel, GammaMatrix, NoiseSpec};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, I, ONE, ZERO};
use crate::spin::OperatorMatrix;
use crate::state::DensityMatrix;

/// Largest register for the dense superoperator exponential.
pub const EXPM_MAX_SITES: usize = 5;
/// Upper bound on the number of samples per run.
pub const MAX_SAMPLES: f64 = 1e6;
/// Internal RK4 step in units of the inverse largest rate.
pub const DEFAULT_STEP_FACTOR: f64 = 3e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    FixedStepRk4,
    LiouvillianExpm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub t_max: f64,
    /// Observable sampling interval.
    pub dt_sample: f64,
    pub integrator: Integrator,
    /// Requested RK4 step; the actual step divides `dt_sample` evenly and
    /// never exceeds this value.
    pub dt_internal: f64,
}

impl EvolutionConfig {
    pub fn rk4(t_max: f64, dt_sample: f64, dt_internal: f64) -> Self {
        Self {
            t_max,
            dt_sample,
            integrator: Integrator::FixedStepRk4,
            dt_internal,
        }
    }

    /// RK4 with step `DEFAULT_STEP_FACTOR / rate_scale` (capped at `dt_sample`).
    pub fn with_default_step(t_max: f64, dt_sample: f64, rate_scale: f64) -> Self {
        let dt = if rate_scale > 0.0 {
            DEFAULT_STEP_FACTOR / rate_scale
        } else {
            dt_sample
        };
        Self::rk4(t_max, dt_sample, dt.min(dt_sample))
    }

    pub fn expm(t_max: f64, dt_sample: f64) -> Self {
        Self {
            t_max,
            dt_sample,
            integrator: Integrator::LiouvillianExpm,
            dt_internal: dt_sample,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")))
            }
        };
        positive("t_max", self.t_max)?;
        positive("dt_sample", self.dt_sample)?;
        positive("dt_internal", self.dt_internal)?;
        if self.dt_internal > self.dt_sample * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "dt_internal {} exceeds dt_sample {}",
                self.dt_internal, self.dt_sample
            )));
        }
        if self.t_max / self.dt_sample > MAX_SAMPLES {
            return Err(Error::InvalidParameter("more than 1e6 samples requested".into()));
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        (self.t_max / self.dt_sample).round() as usize
    }

    pub fn substeps(&self) -> usize {
        ((self.dt_sample / self.dt_internal) - 1e-9).ceil().max(1.0) as usize
    }

    /// The RK4 step actually taken.
    pub fn effective_step(&self) -> f64 {
        self.dt_sample / self.substeps() as f64
    }

    pub fn sample_time(&self, k: usize) -> f64 {
        k as f64 * self.dt_sample
    }
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug)]
struct Csr {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex64>,
}

impl Csr {
    fn from_dense(m: &CMatrix) -> Self {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut values = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != ZERO {
                    cols.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { row_ptr, cols, values }
    }

    fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }
}

/// Operator with at most one nonzero per column: column `k` maps to
/// `(row, coefficient)`. Embedded sigma^z and sigma^- have this form.
fn monomial_columns(op: &CMatrix) -> Option<Vec<(usize, usize, Complex64)>> {
    let mut out = Vec::new();
    for k in 0..op.ncols() {
        let mut hit = None;
        for r in 0..op.nrows() {
            let v = op[(r, k)];
            if v != ZERO {
                if hit.is_some() {
                    return None;
                }
                hit = Some((k, r, v));
            }
        }
        out.extend(hit);
    }
    Some(out)
}

#[derive(Clone, Debug)]
struct JumpTerm {
    rate: Complex64,
    /// `(k, a, c)`: column k of L_j lands on row a with coefficient c.
    left: Vec<(usize, usize, Complex64)>,
    /// `(l, b, c)` for L_i, used conjugated.
    right: Vec<(usize, usize, Complex64)>,
    /// Every `left` coefficient is 1 (sigma^-).
    unit_left: bool,
}

#[derive(Clone, Debug)]
enum Compiled {
    /// `d rho_ab / dt = lambda_ab rho_ab`
    Elementwise(CMatrix),
    Sparse { g: Csr, jumps: Vec<JumpTerm> },
}

/// The GKSL generator `rho -> -i[H, rho] + D[rho]`, compiled for repeated
/// application.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    dim: usize,
    compiled: Compiled,
}

impl Liouvillian {
    pub fn new(h_eff: &OperatorMatrix, gamma: &GammaMatrix, channel: Channel) -> Result<Self> {
        let n_sites = h_eff.n_sites();
        if gamma.n() != n_sites {
            return Err(Error::DimensionMismatch {
                expected: n_sites,
                actual: gamma.n(),
            });
        }
        h_eff.ensure_hermitian()?;
        let dim = h_eff.dim();
        let jumps = jump_operators(channel, n_sites);

        let mut g = h_eff.matrix().clone();
        for (i, li) in jumps.iter().enumerate() {
            let li_dag = li.matrix().adjoint();
            for (j, lj) in jumps.iter().enumerate() {
                let rate = gamma.get(i, j);
                if rate != ZERO {
                    g -= (&li_dag * lj.matrix()) * (rate * I * 0.5);
                }
            }
        }

        let monomials: Vec<_> = jumps
            .iter()
            .map(|l| monomial_columns(l.matrix()).expect("site jump operators are monomial"))
            .collect();
        let is_diagonal = |m: &CMatrix| (0..dim).all(|c| (0..dim).all(|r| r == c || m[(r, c)] == ZERO));
        let jumps_diagonal = monomials.iter().all(|cols| cols.iter().all(|&(k, a, _)| k == a));

        let compiled = if jumps_diagonal && is_diagonal(&g) {
            let lambda = CMatrix::from_fn(dim, dim, |a, b| {
                let mut v = -I * (g[(a, a)] - g[(b, b)].conj());
                for (i, li) in jumps.iter().enumerate() {
                    for (j, lj) in jumps.iter().enumerate() {
                        let rate = gamma.get(i, j);
                        if rate != ZERO {
                            v += rate * lj.matrix()[(a, a)] * li.matrix()[(b, b)].conj();
                        }
                    }
                }
                v
            });
            Compiled::Elementwise(lambda)
        } else {
            let mut terms = Vec::new();
            for i in 0..n_sites {
                for j in 0..n_sites {
                    let rate = gamma.get(i, j);
                    if rate != ZERO {
                        terms.push(JumpTerm {
                            rate,
                            unit_left: monomials[j].iter().all(|&(_, _, c)| c == ONE),
                            left: monomials[j].clone(),
                            right: monomials[i].clone(),
                        });
                    }
                }
            }
            Compiled::Sparse {
                g: Csr::from_dense(&g),
                jumps: terms,
            }
        };
        Ok(Self { dim, compiled })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out = L[rho]` for Hermitian `rho`.
    pub fn apply_into(&self, rho: &CMatrix, out: &mut CMatrix) {
        let dim = self.dim;
        let src = rho.as_slice();
        let dst = out.as_mut_slice();
        match &self.compiled {
            Compiled::Elementwise(lambda) => {
                for ((o, r), l) in dst.iter_mut().zip(src).zip(lambda.as_slice()) {
                    *o = r * l;
                }
            }
            Compiled::Sparse { g, jumps } => {
                // X = -i G rho, then the coherent part is X + X^dag.
                for c in 0..dim {
                    let col = &src[c * dim..(c + 1) * dim];
                    for a in 0..dim {
                        let s: Complex64 = g.row(a).map(|(k, v)| v * col[k]).sum();
                        dst[a + c * dim] = Complex64::new(s.im, -s.re);
                    }
                }
                for c in 0..dim {
                    for a in 0..c {
                        let x = dst[a + c * dim];
                        let y = dst[c + a * dim];
                        dst[a + c * dim] = x + y.conj();
                        dst[c + a * dim] = y + x.conj();
                    }
                    let d = &mut dst[c + c * dim];
                    *d = Complex64::new(2.0 * d.re, 0.0);
                }
                // Gamma_ij L_j rho L_i^dag
                for term in jumps {
                    for &(l, b, cl) in &term.right {
                        let f = term.rate * cl.conj();
                        let base_src = l * dim;
                        let base_dst = b * dim;
                        if term.unit_left {
                            for &(k, a, _) in &term.left {
                                dst[a + base_dst] += f * src[k + base_src];
                            }
                        } else {
                            for &(k, a, ck) in &term.left {
                                dst[a + base_dst] += f * ck * src[k + base_src];
                            }
                        }
                    }
                }
            }
        }
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        self.apply_into(rho, &mut out);
        out
    }
}

/// Reference right-hand side `-i[h_eff, rho] + dissipator(rho)`, evaluated
/// term by term with dense products.
pub fn liouvillian_rhs(
    h_eff: &OperatorMatrix,
    gamma: &GammaMatrix,
    channel: Channel,
    rho: &DensityMatrix,
) -> Result<OperatorMatrix> {
    if h_eff.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: h_eff.dim(),
        });
    }
    if gamma.n() != rho.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: rho.n_sites(),
            actual: gamma.n(),
        });
    }
    h_eff.ensure_hermitian()?;
    Ok(OperatorMatrix::from_raw(reference_rhs(
        h_eff.matrix(),
        gamma,
        &jump_operators(channel, rho.n_sites()),
        rho.matrix(),
    )))
}

fn reference_rhs(h: &CMatrix, gamma: &GammaMatrix, jumps: &[OperatorMatrix], rho: &CMatrix) -> CMatrix {
    let coherent = (h * rho - rho * h) * (-I);
    coherent + dissipator_matrix(gamma, jumps, rho)
}

/// Dense `dim^2 x dim^2` generator acting on column-stacked `vec(rho)`,
/// built from Kronecker products: `vec(A X B) = (B^T (x) A) vec(X)`.
pub fn superoperator(h_eff: &OperatorMatrix, gamma: &GammaMatrix, channel: Channel) -> Result<CMatrix> {
    let n_sites = h_eff.n_sites();
    if n_sites > EXPM_MAX_SITES {
        return Err(Error::DimensionTooLarge {
            dim: h_eff.dim(),
            limit: 1 << EXPM_MAX_SITES,
        });
    }
    let dim = h_eff.dim();
    let id = CMatrix::identity(dim, dim);
    let h = h_eff.matrix();
    let mut sup = (id.kronecker(h) - h.transpose().kronecker(&id)) * (-I);
    let jumps = jump_operators(channel, n_sites);
    let half = Complex64::new(0.5, 0.0);
    for (i, li) in jumps.iter().enumerate() {
        for (j, lj) in jumps.iter().enumerate() {
            let rate = gamma.get(i, j);
            if rate == ZERO {
                continue;
            }
            let li = li.matrix();
            let lj = lj.matrix();
            let k = li.adjoint() * lj;
            let term = li.map(|z| z.conj()).kronecker(lj) - (id.kronecker(&k) + k.transpose().kronecker(&id)) * half;
            sup += term * rate;
        }
    }
    Ok(sup)
}

/// Summary of a completed run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolutionSummary {
    pub samples: usize,
    pub integrator: Integrator,
    pub step: f64,
    /// Worst invariant deviations seen over all samples.
    pub max_trace_drift: f64,
    pub max_hermiticity: f64,
    pub min_eigenvalue: f64,
}

/// Integrates from `rho0`, calling `observe(t, rho)` at every sample
/// including `t = 0`. Stops with an error on CPTP failure or if any
/// sampled state leaves the density-matrix tolerances.
pub fn evolve_with<F>(
    rho0: &DensityMatrix,
    h_eff: &OperatorMatrix,
    spec: &NoiseSpec,
    cfg: &EvolutionConfig,
    mut observe: F,
) -> Result<EvolutionSummary>
where
    F: FnMut(f64, &DensityMatrix) -> Result<()>,
{
    spec.validate()?;
    cfg.validate()?;
    let n_sites = rho0.n_sites();
    if h_eff.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            actual: h_eff.dim(),
        });
    }
    let gamma = build_gamma(spec, n_sites)?;
    let report = validate_cptp(&gamma)?;
    if !report.valid {
        return Err(Error::Cptp(format!(
            "rate matrix has min eigenvalue {:.6e}; {} is {}",
            report.min_eigenvalue,
            report.bound,
            if report.analytic_bound_satisfied { "satisfied" } else { "violated" }
        )));
    }
    let initial = rho0.diagnostics();
    if !initial.is_valid() {
        return Err(Error::InvalidState(format!("initial state: {initial:?}")));
    }

    let mut summary = EvolutionSummary {
        samples: 0,
        integrator: cfg.integrator,
        step: match cfg.integrator {
            Integrator::FixedStepRk4 => cfg.effective_step(),
            Integrator::LiouvillianExpm => cfg.dt_sample,
        },
        max_trace_drift: initial.trace_drift,
        max_hermiticity: initial.hermiticity,
        min_eigenvalue: initial.min_eigenvalue,
    };
    observe(0.0, rho0)?;
    summary.samples = 1;

    let mut stepper = Stepper::new(h_eff, &gamma, spec.channel, cfg)?;
    let mut current = rho0.matrix().clone();
    for k in 1..=cfg.n_samples() {
        stepper.advance(&mut current);
        let t = cfg.sample_time(k);
        let rho = DensityMatrix::from_matrix_unchecked(current.clone())?;
        let diag = rho.diagnostics();
        summary.max_trace_drift = summary.max_trace_drift.max(diag.trace_drift);
        summary.max_hermiticity = summary.max_hermiticity.max(diag.hermiticity);
        summary.min_eigenvalue = summary.min_eigenvalue.min(diag.min_eigenvalue);
        if !diag.is_valid() {
            return Err(Error::StateInvariant {
                t,
                trace_drift: diag.trace_drift,
                hermiticity: diag.hermiticity,
                min_eigenvalue: diag.min_eigenvalue,
            });
        }
        observe(t, &rho)?;
        summary.samples += 1;
    }
    Ok(summary)
}

/// Collecting variant of [`evolve_with`].
pub fn evolve(
    rho0: &DensityMatrix,
    h_eff: &OperatorMatrix,
    spec: &NoiseSpec,
    cfg: &EvolutionConfig,
) -> Result<Vec<(f64, DensityMatrix)>> {
    let mut series = Vec::with_capacity(cfg.n_samples() + 1);
    evolve_with(rho0, h_eff, spec, cfg, |t, rho| {
        series.push((t, rho.clone()));
        Ok(())
    })?;
    Ok(series)
}

enum Stepper {
    Rk4 {
        generator: Liouvillian,
        dt: f64,
        substeps: usize,
        k: [CMatrix; 4],
        stage: CMatrix,
    },
    Expm {
        propagator: CMatrix,
    },
}

impl Stepper {
    fn new(h_eff: &OperatorMatrix, gamma: &GammaMatrix, channel: Channel, cfg: &EvolutionConfig) -> Result<Self> {
        let dim = h_eff.dim();
        match cfg.integrator {
            Integrator::FixedStepRk4 => {
                let zeros = || CMatrix::zeros(dim, dim);
                Ok(Stepper::Rk4 {
                    generator: Liouvillian::new(h_eff, gamma, channel)?,
                    dt: cfg.effective_step(),
                    substeps: cfg.substeps(),
                    k: [zeros(), zeros(), zeros(), zeros()],
                    stage: zeros(),
                })
            }
            Integrator::LiouvillianExpm => {
                let sup = superoperator(h_eff, gamma, channel)?;
                Ok(Stepper::Expm {
                    propagator: (sup * Complex64::new(cfg.dt_sample, 0.0)).exp(),
                })
            }
        }
    }

    /// Advances `rho` by one sampling interval.
    fn advance(&mut self, rho: &mut CMatrix) {
        match self {
            Stepper::Rk4 {
                generator,
                dt,
                substeps,
                k,
                stage,
            } => {
                let h = *dt;
                for _ in 0..*substeps {
                    rk4_step(generator, rho, h, k, stage);
                }
            }
            Stepper::Expm { propagator } => {
                let dim = rho.nrows();
                let v = nalgebra::DVector::from_column_slice(rho.as_slice());
                let next = &*propagator * v;
                *rho = CMatrix::from_column_slice(dim, dim, next.as_slice());
            }
        }
    }
}

fn rk4_step(gen: &Liouvillian, rho: &mut CMatrix, h: f64, k: &mut [CMatrix; 4], stage: &mut CMatrix) {
    let axpy = |dst: &mut CMatrix, base: &CMatrix, f: f64, dir: &CMatrix| {
        for ((d, b), x) in dst.as_mut_slice().iter_mut().zip(base.as_slice()).zip(dir.as_slice()) {
            *d = b + x * f;
        }
    };
    gen.apply_into(rho, &mut k[0]);
    axpy(stage, rho, h / 2.0, &k[0]);
    gen.apply_into(stage, &mut k[1]);
    axpy(stage, rho, h / 2.0, &k[1]);
    gen.apply_into(stage, &mut k[2]);
    axpy(stage, rho, h, &k[2]);
    gen.apply_into(stage, &mut k[3]);
    let w = h / 6.0;
    let slices = rho.as_mut_slice();
    let (k0, k1, k2, k3) = (k[0].as_slice(), k[1].as_slice(), k[2].as_slice(), k[3].as_slice());
    for idx in 0..slices.len() {
        slices[idx] += (k0[idx] + (k1[idx] + k2[idx]) * 2.0 + k3[idx]) * w;
    }
}

/// Result of a steady-state check on a sampled trajectory.
#[derive(Clone, Debug)]
pub struct SteadyState {
    pub converged: bool,
    /// Largest entrywise distance to the final state over the window.
    pub max_deviation: f64,
    pub rho_ss: DensityMatrix,
}

pub const STEADY_STATE_TOL: f64 = 1e-6;

/// Converged when every sample in the trailing `window` stays within 1e-6
/// (entrywise) of the final state.
pub fn steady_state_probe(series: &[(f64, DensityMatrix)], window: f64) -> Result<SteadyState> {
    let (t_end, last) = series
        .last()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?;
    let max_deviation = series
        .iter()
        .rev()
        .take_while(|(t, _)| *t >= t_end - window - 1e-12)
        .map(|(_, rho)| rho.max_abs_diff(last))
        .fold(0.0, f64::max);
    Ok(SteadyState {
        converged: max_deviation < STEADY_STATE_TOL,
        max_deviation,
        rho_ss: last.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipation::Topology;
    use crate::linalg::max_abs_diff;
    use crate::model::{product_minus_state, CouplingRange, EffectiveCoupling};
    use std::f64::consts::PI;

    fn random_hermitian_state(n_sites: usize, seed: u64) -> DensityMatrix {
        // Deterministic full-rank state A A^dag / Tr without an RNG dependency.
        let dim = 1usize << n_sites;
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = CMatrix::from_fn(dim, dim, |_, _| Complex64::new(next(), next()));
        let m = &a * a.adjoint();
        let tr = crate::linalg::trace(&m);
        DensityMatrix::new(m / tr).unwrap()
    }

    fn specs() -> Vec<NoiseSpec> {
        let off = Complex64::from_polar(0.01, PI / 3.0);
        vec![
            NoiseSpec::local(Channel::Dephasing, 0.2),
            NoiseSpec::local(Channel::AmplitudeDamping, 0.2),
            NoiseSpec::correlated(
                Channel::Dephasing,
                Topology::NearestNeighbor,
                0.2,
                off,
                EffectiveCoupling::ising(1.0, CouplingRange::NearestNeighbor),
            ),
            NoiseSpec::correlated(
                Channel::AmplitudeDamping,
                Topology::NearestNeighbor,
                0.2,
                off,
                EffectiveCoupling::xx_dm(1.2, 0.2, CouplingRange::NearestNeighbor),
            ),
            NoiseSpec::correlated(
                Channel::AmplitudeDamping,
                Topology::AllToAll,
                0.2,
                off,
                EffectiveCoupling::xx_dm(1.2, 0.2, CouplingRange::AllToAll),
            ),
        ]
    }

    #[test]
    fn compiled_generator_matches_reference() {
        for n in [2, 3] {
            let rho = random_hermitian_state(n, 7 + n as u64);
            for spec in specs() {
                let gamma = build_gamma(&spec, n).unwrap();
                let h = spec.effective_hamiltonian(n);
                let fast = Liouvillian::new(&h, &gamma, spec.channel).unwrap().apply(rho.matrix());
                let reference = liouvillian_rhs(&h, &gamma, spec.channel, &rho).unwrap();
                assert!(max_abs_diff(&fast, reference.matrix()) < 1e-14, "{spec:?}");
            }
        }
    }

    #[test]
    fn superoperator_matches_reference() {
        let rho = random_hermitian_state(2, 3);
        for spec in specs() {
            let gamma = build_gamma(&spec, 2).unwrap();
            let h = spec.effective_hamiltonian(2);
            let sup = superoperator(&h, &gamma, spec.channel).unwrap();
            let v = &sup * nalgebra::DVector::from_column_slice(rho.matrix().as_slice());
            let reference = liouvillian_rhs(&h, &gamma, spec.channel, &rho).unwrap();
            let m = CMatrix::from_column_slice(4, 4, v.as_slice());
            assert!(max_abs_diff(&m, reference.matrix()) < 1e-14);
        }
    }

    #[test]
    fn zero_generator_gives_zero() {
        let spec = NoiseSpec::local(Channel::Dephasing, 0.0);
        let gamma = build_gamma(&spec, 2).unwrap();
        let h = OperatorMatrix::zeros(4).unwrap();
        let rhs = liouvillian_rhs(&h, &gamma, Channel::Dephasing, &random_hermitian_state(2, 1)).unwrap();
        assert_eq!(crate::linalg::max_abs(rhs.matrix()), 0.0);
    }

    #[test]
    fn rhs_is_hermitian_and_traceless() {
        let rho = random_hermitian_state(3, 11);
        for spec in specs() {
            let gamma = build_gamma(&spec, 3).unwrap();
            let h = spec.effective_hamiltonian(3);
            let rhs = liouvillian_rhs(&h, &gamma, spec.channel, &rho).unwrap();
            assert!(rhs.hermiticity_error() < 1e-14);
            assert!(rhs.trace().norm() < 1e-11);
        }
    }

    #[test]
    fn local_dephasing_single_qubit() {
        let spec = NoiseSpec::local(Channel::Dephasing, 0.2);
        let cfg = EvolutionConfig::with_default_step(5.0, 0.25, 0.2);
        let series = evolve(&product_minus_state(1).unwrap(), &spec.effective_hamiltonian(1), &spec, &cfg).unwrap();
        assert_eq!(series.len(), 21);
        for (t, rho) in &series {
            let expected = -0.5 * (-0.4 * t).exp();
            assert!((rho.matrix()[(0, 1)].re - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn refuses_invalid_rates() {
        let spec = NoiseSpec::correlated(
            Channel::Dephasing,
            Topology::NearestNeighbor,
            0.01,
            Complex64::from_polar(0.02, PI / 3.0),
            EffectiveCoupling::ising(1.0, CouplingRange::NearestNeighbor),
        );
        let cfg = EvolutionConfig::rk4(1.0, 0.1, 0.01);
        let err = evolve(&product_minus_state(4).unwrap(), &spec.effective_hamiltonian(4), &spec, &cfg).unwrap_err();
        assert!(matches!(err, Error::Cptp(_)));
    }

    #[test]
    fn config_validation() {
        assert!(EvolutionConfig::rk4(1.0, 0.1, 0.2).validate().is_err());
        assert!(EvolutionConfig::rk4(-1.0, 0.1, 0.01).validate().is_err());
        assert!(EvolutionConfig::rk4(1e7, 1.0, 0.5).validate().is_err());
        let cfg = EvolutionConfig::rk4(1.0, 0.01, 0.003);
        assert_eq!(cfg.substeps(), 4);
        assert!((cfg.effective_step() - 0.0025).abs() < 1e-15);
        assert_eq!(EvolutionConfig::rk4(1.0, 0.01, 0.01).substeps(), 1);
    }

    #[test]
    fn expm_matches_rk4() {
        let spec = &specs()[3];
        let rho0 = product_minus_state(2).unwrap();
        let h = spec.effective_hamiltonian(2);
        let a = evolve(&rho0, &h, spec, &EvolutionConfig::with_default_step(2.0, 0.1, 1.2)).unwrap();
        let b = evolve(&rho0, &h, spec, &EvolutionConfig::expm(2.0, 0.1)).unwrap();
        for ((_, x), (_, y)) in a.iter().zip(&b) {
            assert!(x.max_abs_diff(y) < 1e-10);
        }
    }

    #[test]
    fn expm_refuses_large_registers() {
        let spec = NoiseSpec::local(Channel::Dephasing, 0.1);
        let gamma = build_gamma(&spec, 6).unwrap();
        assert!(matches!(
            superoperator(&spec.effective_hamiltonian(6), &gamma, Channel::Dephasing),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn steady_state_of_local_dephasing_is_diagonal() {
        let spec = NoiseSpec::local(Channel::Dephasing, 0.2);
        let cfg = EvolutionConfig::rk4(250.0, 1.0, 0.05);
        let series = evolve(&product_minus_state(2).unwrap(), &spec.effective_hamiltonian(2), &spec, &cfg).unwrap();
        let ss = steady_state_probe(&series, 10.0).unwrap();
        assert!(ss.converged);
        let m = ss.rho_ss.matrix();
        for r in 0..4 {
            for c in 0..4 {
                if r != c {
                    assert!(m[(r, c)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn steady_state_not_converged_early() {
        let spec = NoiseSpec::local(Channel::Dephasing, 0.2);
        let cfg = EvolutionConfig::rk4(2.0, 0.1, 0.01);
        let series = evolve(&product_minus_state(1).unwrap(), &spec.effective_hamiltonian(1), &spec, &cfg).unwrap();
        assert!(!steady_state_probe(&series, 1.0).unwrap().converged);
        assert!(steady_state_probe(&[], 1.0).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn generator_is_trace_free_and_hermitian(
            n in 2usize..4,
            ad in proptest::bool::ANY,
            all_to_all in proptest::bool::ANY,
            fraction in 0.0f64..0.3,
            phase in -PI..PI,
            seed in 0u64..1000,
        ) {
            let channel = if ad { Channel::AmplitudeDamping } else { Channel::Dephasing };
            let (topology, range) = if all_to_all {
                (Topology::AllToAll, CouplingRange::AllToAll)
            } else {
                (Topology::NearestNeighbor, CouplingRange::NearestNeighbor)
            };
            let coupling = if ad {
                EffectiveCoupling::xx_dm(1.2, 0.2, range)
            } else {
                EffectiveCoupling::ising(1.0, range)
            };
            let spec = NoiseSpec::correlated(channel, topology, 0.4, Complex64::from_polar(0.4 * fraction, phase), coupling);
            let gamma = build_gamma(&spec, n).unwrap();
            let h = spec.effective_hamiltonian(n);
            let rho = random_hermitian_state(n, seed);
            let compiled = Liouvillian::new(&h, &gamma, channel).unwrap().apply(rho.matrix());
            let reference = liouvillian_rhs(&h, &gamma, channel, &rho).unwrap();
            proptest::prop_assert!(max_abs_diff(&compiled, reference.matrix()) < 1e-12);
            proptest::prop_assert!(crate::linalg::trace(&compiled).norm() < 1e-12);
            proptest::prop_assert!(crate::linalg::hermiticity_error(&compiled) < 1e-12);
        }
    }
}
