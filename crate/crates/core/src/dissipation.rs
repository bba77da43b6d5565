//! Dissipation-rate (Kossakowski) matrices and the Lindblad dissipator.
//!
//! The dissipator is `sum_ij Gamma_ij (L_j rho L_i^dag - {L_i^dag L_j, rho}/2)`
//! with `L = sigma^z` for dephasing and `L = sigma^-` for zero-temperature
//! amplitude damping.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ZERO};
use crate::model::{chain_bonds, effective_hamiltonian, CouplingKind, CouplingRange, EffectiveCoupling};
use crate::oracles::gamma_nn_eigenvalues;
use crate::spin::{site_op, OperatorMatrix, Pauli};
use crate::state::DensityMatrix;

/// Minimum eigenvalue of Gamma accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-12;
/// Hermiticity tolerance for Gamma.
pub const GAMMA_HERMITIAN_TOL: f64 = 1e-12;
/// Agreement required between the numerical ring spectrum and its closed form.
pub const RING_SPECTRUM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Dephasing,
    AmplitudeDamping,
}

impl Channel {
    pub fn jump(&self) -> Pauli {
        match self {
            Channel::Dephasing => Pauli::Z,
            Channel::AmplitudeDamping => Pauli::Minus,
        }
    }

    pub fn coupling_kind(&self) -> CouplingKind {
        match self {
            Channel::Dephasing => CouplingKind::IsingZ,
            Channel::AmplitudeDamping => CouplingKind::XxDm,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Channel::Dephasing => "dephasing",
            Channel::AmplitudeDamping => "amplitude_damping",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Local,
    NearestNeighbor,
    AllToAll,
}

impl Topology {
    pub fn name(&self) -> &'static str {
        match self {
            Topology::Local => "local",
            Topology::NearestNeighbor => "nearest_neighbor",
            Topology::AllToAll => "all_to_all",
        }
    }

    pub fn coupling_range(&self) -> Option<CouplingRange> {
        match self {
            Topology::Local => None,
            Topology::NearestNeighbor => Some(CouplingRange::NearestNeighbor),
            Topology::AllToAll => Some(CouplingRange::AllToAll),
        }
    }
}

/// Channel, correlation topology, rates and the induced coherent coupling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub channel: Channel,
    pub topology: Topology,
    /// Local rate `gamma_ii`.
    pub gamma: f64,
    /// Uniform cross-site rate `gamma_ij = p + iq` (i < j in the chain orientation).
    pub gamma_offdiag: Complex64,
    pub coupling: EffectiveCoupling,
    /// Ring closure for nearest-neighbor correlations.
    pub periodic: bool,
}

impl NoiseSpec {
    pub fn local(channel: Channel, gamma: f64) -> Self {
        let coupling = match channel.coupling_kind() {
            CouplingKind::IsingZ => EffectiveCoupling::ising(0.0, CouplingRange::NearestNeighbor),
            CouplingKind::XxDm => EffectiveCoupling::xx_dm(0.0, 0.0, CouplingRange::NearestNeighbor),
        };
        Self {
            channel,
            topology: Topology::Local,
            gamma,
            gamma_offdiag: ZERO,
            coupling,
            periodic: true,
        }
    }

    /// Correlated reservoirs; the coupling range follows the topology.
    pub fn correlated(
        channel: Channel,
        topology: Topology,
        gamma: f64,
        gamma_offdiag: Complex64,
        coupling: EffectiveCoupling,
    ) -> Self {
        Self {
            channel,
            topology,
            gamma,
            gamma_offdiag,
            coupling,
            periodic: true,
        }
    }

    pub fn open(mut self) -> Self {
        self.periodic = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if self.coupling.kind != self.channel.coupling_kind() {
            return Err(Error::InvalidParameter(format!(
                "{} reservoirs induce a {:?} coupling, got {:?}",
                self.channel.name(),
                self.channel.coupling_kind(),
                self.coupling.kind
            )));
        }
        match self.topology.coupling_range() {
            None => {
                if self.gamma_offdiag != ZERO || !self.coupling.is_zero() {
                    return Err(Error::InvalidParameter(
                        "local reservoirs carry no cross-site rate or induced coupling".into(),
                    ));
                }
            }
            Some(range) if range != self.coupling.range => {
                return Err(Error::InvalidParameter(format!(
                    "coupling range {:?} does not match topology {}",
                    self.coupling.range,
                    self.topology.name()
                )));
            }
            Some(_) => {}
        }
        Ok(())
    }

    /// Coherent part of the generator (zero for local reservoirs).
    pub fn effective_hamiltonian(&self, n_sites: usize) -> OperatorMatrix {
        if self.topology == Topology::Local {
            let dim = 1usize << n_sites;
            return OperatorMatrix::from_raw(CMatrix::zeros(dim, dim));
        }
        effective_hamiltonian(&self.coupling, n_sites, self.periodic)
    }

    /// Largest rate or coupling in the generator.
    pub fn rate_scale(&self) -> f64 {
        self.gamma.max(self.gamma_offdiag.norm()).max(self.coupling.magnitude())
    }
}

/// N x N Hermitian dissipation-rate matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaMatrix {
    entries: CMatrix,
    origin: Option<GammaOrigin>,
}

/// Construction parameters, kept for the analytic CPTP bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaOrigin {
    pub topology: Topology,
    pub gamma: f64,
    pub gamma_offdiag: Complex64,
    pub periodic: bool,
}

impl GammaMatrix {
    /// Arbitrary rate matrix; CPTP bounds fall back to diagonal dominance.
    pub fn from_entries(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                actual: entries.ncols(),
            });
        }
        Ok(Self { entries, origin: None })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn origin(&self) -> Option<&GammaOrigin> {
        self.origin.as_ref()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.entries)
    }
}

pub fn build_gamma(spec: &NoiseSpec, n_sites: usize) -> Result<GammaMatrix> {
    if n_sites == 0 {
        return Err(Error::InvalidParameter("n_sites must be at least 1".into()));
    }
    if spec.topology != Topology::Local && n_sites < 2 {
        return Err(Error::InvalidParameter(
            "correlated reservoirs need at least two sites".into(),
        ));
    }
    let g = spec.gamma_offdiag;
    let mut m = CMatrix::identity(n_sites, n_sites) * Complex64::new(spec.gamma, 0.0);
    match spec.topology {
        Topology::Local => {}
        Topology::NearestNeighbor => {
            // Superdiagonal g, subdiagonal g*, and the ring closure g* in the
            // top-right / g in the bottom-left corner: a Hermitian circulant.
            for (i, j) in chain_bonds(n_sites, spec.periodic) {
                m[(i, j)] += g;
                m[(j, i)] += g.conj();
            }
        }
        Topology::AllToAll => {
            for i in 0..n_sites {
                for j in i + 1..n_sites {
                    m[(i, j)] = g;
                    m[(j, i)] = g.conj();
                }
            }
        }
    }
    Ok(GammaMatrix {
        entries: m,
        origin: Some(GammaOrigin {
            topology: spec.topology,
            gamma: spec.gamma,
            gamma_offdiag: g,
            periodic: spec.periodic,
        }),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CptpReport {
    /// Gamma is positive semidefinite (min eigenvalue >= -1e-12).
    pub valid: bool,
    pub min_eigenvalue: f64,
    /// The topology's sufficient condition holds.
    pub analytic_bound_satisfied: bool,
    /// Human-readable statement of the sufficient condition.
    pub bound: String,
    /// For periodic nearest-neighbor matrices: max deviation between the
    /// numerical spectrum and the closed form.
    pub spectrum_formula_deviation: Option<f64>,
}

pub fn validate_cptp(gamma: &GammaMatrix) -> Result<CptpReport> {
    let herm = linalg::hermiticity_error(&gamma.entries);
    if herm > GAMMA_HERMITIAN_TOL {
        return Err(Error::NotHermitian(herm));
    }
    let eigs = gamma.eigenvalues();
    let min_eigenvalue = eigs.first().copied().unwrap_or(0.0);
    let n = gamma.n();

    let (analytic_bound_satisfied, bound, spectrum_formula_deviation) = match gamma.origin {
        Some(GammaOrigin {
            topology: Topology::Local,
            gamma: g,
            ..
        }) => (g >= 0.0, format!("gamma = {g} >= 0"), None),
        Some(GammaOrigin {
            topology: Topology::NearestNeighbor,
            gamma: g,
            gamma_offdiag: off,
            periodic,
        }) => {
            let rhs = 2.0 * off.norm();
            let deviation = periodic.then(|| {
                let closed = gamma_nn_eigenvalues(g, off, n);
                closed.iter().zip(&eigs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            });
            (
                g >= rhs,
                format!("gamma = {g} >= 2|gamma_12| = {rhs} (nearest-neighbor bound)"),
                deviation,
            )
        }
        Some(GammaOrigin {
            topology: Topology::AllToAll,
            gamma: g,
            gamma_offdiag: off,
            ..
        }) => {
            let rhs = (n as f64 - 1.0) * off.norm();
            (
                g >= rhs,
                format!("gamma = {g} >= (N-1)|gamma_ij| = {rhs} (all-to-all bound, N = {n})"),
                None,
            )
        }
        None => {
            let margin = (0..n)
                .map(|i| {
                    let off: f64 = (0..n).filter(|&j| j != i).map(|j| gamma.entries[(i, j)].norm()).sum();
                    gamma.entries[(i, i)].re - off
                })
                .fold(f64::INFINITY, f64::min);
            (margin >= 0.0, format!("diagonal dominance margin {margin} >= 0"), None)
        }
    };

    if let Some(dev) = spectrum_formula_deviation {
        if dev > RING_SPECTRUM_TOL {
            return Err(Error::Cptp(format!(
                "ring spectrum deviates from its closed form by {dev:.3e}"
            )));
        }
    }

    Ok(CptpReport {
        valid: min_eigenvalue >= PSD_TOL,
        min_eigenvalue,
        analytic_bound_satisfied,
        bound,
        spectrum_formula_deviation,
    })
}

/// Embedded jump operators `L_j`, one per site.
pub fn jump_operators(channel: Channel, n_sites: usize) -> Vec<OperatorMatrix> {
    (0..n_sites).map(|j| site_op(channel.jump(), j, n_sites)).collect()
}

/// Reference (dense, term-by-term) dissipator on an arbitrary matrix.
pub(crate) fn dissipator_matrix(gamma: &GammaMatrix, jumps: &[OperatorMatrix], rho: &CMatrix) -> CMatrix {
    let dim = rho.nrows();
    let half = Complex64::new(0.5, 0.0);
    let mut out = CMatrix::zeros(dim, dim);
    for (i, li) in jumps.iter().enumerate() {
        let li_dag = li.matrix().adjoint();
        for (j, lj) in jumps.iter().enumerate() {
            let rate = gamma.get(i, j);
            if rate == ZERO {
                continue;
            }
            let lj = lj.matrix();
            let k = &li_dag * lj;
            let term = lj * rho * &li_dag - (&k * rho + rho * &k) * half;
            out += term * rate;
        }
    }
    out
}

pub fn dissipator_apply(gamma: &GammaMatrix, channel: Channel, rho: &DensityMatrix) -> Result<OperatorMatrix> {
    let n_sites = rho.n_sites();
    if gamma.n() != n_sites {
        return Err(Error::DimensionMismatch {
            expected: n_sites,
            actual: gamma.n(),
        });
    }
    let jumps = jump_operators(channel, n_sites);
    Ok(OperatorMatrix::from_raw(dissipator_matrix(gamma, &jumps, rho.matrix())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::product_minus_state;
    use std::f64::consts::PI;

    fn fig2_offdiag() -> Complex64 {
        Complex64::from_polar(0.01, PI / 3.0)
    }

    fn nn_spec(gamma: f64, off: Complex64) -> NoiseSpec {
        NoiseSpec::correlated(
            Channel::Dephasing,
            Topology::NearestNeighbor,
            gamma,
            off,
            EffectiveCoupling::ising(1.0, CouplingRange::NearestNeighbor),
        )
    }

    fn all_spec(gamma: f64, off: Complex64) -> NoiseSpec {
        NoiseSpec::correlated(
            Channel::Dephasing,
            Topology::AllToAll,
            gamma,
            off,
            EffectiveCoupling::ising(1.0, CouplingRange::AllToAll),
        )
    }

    #[test]
    fn local_gamma_is_scaled_identity() {
        let g = build_gamma(&NoiseSpec::local(Channel::Dephasing, 0.2), 3).unwrap();
        let expected = CMatrix::identity(3, 3) * Complex64::new(0.2, 0.0);
        assert_eq!(g.entries(), &expected);
    }

    #[test]
    fn ring_corners_follow_circulant_pattern() {
        let off = fig2_offdiag();
        let g = build_gamma(&nn_spec(0.2, off), 4).unwrap();
        assert_eq!(g.get(0, 1), off);
        assert_eq!(g.get(1, 0), off.conj());
        assert_eq!(g.get(0, 3), off.conj());
        assert_eq!(g.get(3, 0), off);
        assert_eq!(g.get(0, 2), ZERO);
    }

    #[test]
    fn ring_of_four_spectrum() {
        // Closed form gamma + 2|g| cos(pi m / 2 + pi / 3), evaluated by hand.
        let g = build_gamma(&nn_spec(0.2, fig2_offdiag()), 4).unwrap();
        let mut expected: Vec<f64> = (0..4)
            .map(|m| 0.2 + 0.02 * (PI * m as f64 / 2.0 + PI / 3.0).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in g.eigenvalues().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn all_to_all_six_is_psd() {
        let g = build_gamma(&all_spec(0.2, fig2_offdiag()), 6).unwrap();
        assert!(linalg::hermiticity_error(g.entries()) < 1e-15);
        assert!(g.eigenvalues()[0] >= 0.0);
        let report = validate_cptp(&g).unwrap();
        assert!(report.valid && report.analytic_bound_satisfied);
    }

    #[test]
    fn cptp_valid_for_fig2_parameters() {
        let report = validate_cptp(&build_gamma(&nn_spec(0.2, fig2_offdiag()), 4).unwrap()).unwrap();
        assert!(report.valid);
        assert!(report.analytic_bound_satisfied);
        assert!(report.spectrum_formula_deviation.unwrap() < 1e-12);
    }

    #[test]
    fn cptp_invalid_when_bound_violated() {
        let off = Complex64::from_polar(0.02, PI / 3.0);
        let report = validate_cptp(&build_gamma(&nn_spec(0.01, off), 4).unwrap()).unwrap();
        assert!(!report.valid);
        assert!(!report.analytic_bound_satisfied);
        // m = 1: 0.01 + 0.04 cos(5 pi / 6)
        let expected = 0.01 + 0.04 * (5.0 * PI / 6.0).cos();
        assert!((report.min_eigenvalue - expected).abs() < 1e-12);
    }

    #[test]
    fn all_to_all_bound_can_fail_while_psd_holds() {
        let off = Complex64::from_polar(0.05, PI / 3.0);
        let report = validate_cptp(&build_gamma(&all_spec(0.2, off), 6).unwrap()).unwrap();
        // 0.2 >= 5 * 0.05 is false; the matrix itself stays PSD.
        assert!(!report.analytic_bound_satisfied);
        assert!(report.valid);
        assert!(report.min_eigenvalue > 0.0);
    }

    #[test]
    fn cptp_rejects_non_hermitian() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        let g = GammaMatrix::from_entries(m).unwrap();
        assert!(matches!(validate_cptp(&g), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn local_dephasing_of_minus_state() {
        let g = build_gamma(&NoiseSpec::local(Channel::Dephasing, 0.2), 1).unwrap();
        let rho = product_minus_state(1).unwrap();
        let d = dissipator_apply(&g, Channel::Dephasing, &rho).unwrap();
        // sigma^z rho sigma^z - rho flips the off-diagonal sign: 0.2 * (0.5 + 0.5).
        assert!((d.matrix()[(0, 1)].re - 0.2).abs() < 1e-15);
        assert!((d.matrix()[(1, 0)].re - 0.2).abs() < 1e-15);
        assert_eq!(d.matrix()[(0, 0)], ZERO);
        assert_eq!(d.matrix()[(1, 1)], ZERO);
    }

    #[test]
    fn maximally_mixed_is_dephasing_fixed_point() {
        let g = build_gamma(&nn_spec(0.2, fig2_offdiag()), 3).unwrap();
        let d = dissipator_apply(&g, Channel::Dephasing, &DensityMatrix::maximally_mixed(3)).unwrap();
        assert!(linalg::max_abs(d.matrix()) < 1e-16);
    }

    #[test]
    fn all_down_is_amplitude_damping_dark_state() {
        let g = build_gamma(&NoiseSpec::local(Channel::AmplitudeDamping, 0.3), 2).unwrap();
        let mut down = vec![ZERO; 4];
        down[3] = Complex64::new(1.0, 0.0);
        let rho = DensityMatrix::from_pure(&down).unwrap();
        let d = dissipator_apply(&g, Channel::AmplitudeDamping, &rho).unwrap();
        assert!(linalg::max_abs(d.matrix()) < 1e-16);
    }

    #[test]
    fn zero_offdiag_reproduces_local() {
        let rho = product_minus_state(3).unwrap();
        for channel in [Channel::Dephasing, Channel::AmplitudeDamping] {
            let local = build_gamma(&NoiseSpec::local(channel, 0.2), 3).unwrap();
            let corr = build_gamma(&nn_spec(0.2, ZERO), 3).unwrap();
            let a = dissipator_apply(&local, channel, &rho).unwrap();
            let b = dissipator_apply(&corr, channel, &rho).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-14);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(NoiseSpec::local(Channel::Dephasing, -0.1).validate().is_err());
        let mut bad = NoiseSpec::local(Channel::Dephasing, 0.1);
        bad.gamma_offdiag = fig2_offdiag();
        assert!(bad.validate().is_err());
        let mut wrong_kind = nn_spec(0.2, fig2_offdiag());
        wrong_kind.channel = Channel::AmplitudeDamping;
        assert!(wrong_kind.validate().is_err());
        assert!(nn_spec(0.2, fig2_offdiag()).validate().is_ok());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(128))]

        #[test]
        fn ring_is_cptp_exactly_when_its_spectrum_is(
            n in 2usize..9,
            gamma in 0.01f64..2.0,
            fraction in 0.0f64..1.0,
            phase in -PI..PI,
        ) {
            let g = Complex64::from_polar(fraction * gamma, phase);
            let formula = crate::oracles::gamma_nn_eigenvalues(gamma, g, n);
            let report = validate_cptp(&build_gamma(&nn_spec(gamma, g), n).unwrap()).unwrap();
            if formula[0].abs() > 1e-9 {
                proptest::prop_assert_eq!(report.valid, formula[0] > 0.0);
            }
        }
    }
}
