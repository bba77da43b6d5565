use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Battery state: Hermitian, unit trace, positive semidefinite.
///
/// The spectrum is computed lazily and cached, since both the validity
/// check and the ergotropy need it.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    data: CMatrix,
    spectrum: OnceLock<Vec<f64>>,
}

/// Measured deviations from the density-matrix invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDiagnostics {
    pub trace_drift: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.trace_drift < TRACE_TOL
            && self.hermiticity < HERMITIAN_TOL
            && self.min_eigenvalue >= -POSITIVITY_TOL
    }
}

impl DensityMatrix {
    /// Validating constructor.
    pub fn new(data: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(data)?;
        let diag = rho.diagnostics();
        if !diag.is_valid() {
            return Err(Error::InvalidState(format!(
                "trace drift {:.3e}, hermiticity {:.3e}, min eigenvalue {:.3e}",
                diag.trace_drift, diag.hermiticity, diag.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    /// Shape checks only; used for intermediate integrator states and
    /// closed-form oracles that are validated separately.
    pub fn from_matrix_unchecked(data: CMatrix) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                actual: data.ncols(),
            });
        }
        if !data.nrows().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(data.nrows()));
        }
        Ok(Self {
            data,
            spectrum: OnceLock::new(),
        })
    }

    /// |psi><psi| for a (not necessarily normalized) state vector.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let n = psi.len();
        let data = CMatrix::from_fn(n, n, |r, c| psi[r] * psi[c].conj() / norm2);
        Self::new(data)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        Self::new(CMatrix::from_fn(n, n, |r, c| rows[r][c]))
    }

    pub fn maximally_mixed(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let data = CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0);
        Self::from_matrix_unchecked(data).expect("power-of-two dimension")
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_sites(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.data[(r, c)]).collect())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.data)
    }

    pub fn purity(&self) -> f64 {
        // Tr[rho^2] = sum |rho_ij|^2 for Hermitian rho
        self.data.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order (computed from the lower triangle).
    pub fn spectrum(&self) -> &[f64] {
        self.spectrum.get_or_init(|| linalg::eigvalsh(&self.data))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum()[0]
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        StateDiagnostics {
            trace_drift: (self.trace() - Complex64::new(1.0, 0.0)).norm(),
            hermiticity: linalg::hermiticity_error(&self.data),
            min_eigenvalue: self.min_eigenvalue(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_diff(&self.data, &other.data)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_matrix_unchecked(self.data.kronecker(&other.data)).expect("power-of-two dimension")
    }

    /// Reduced state of the first `keep` sites (partial trace over the rest).
    pub fn reduced_leading(&self, keep: usize) -> Result<Self> {
        let n = self.n_sites();
        if keep == 0 || keep > n {
            return Err(Error::SiteOutOfRange { site: keep, n_sites: n });
        }
        let kept = 1usize << keep;
        let traced = 1usize << (n - keep);
        let mut out = CMatrix::from_element(kept, kept, ZERO);
        for a in 0..kept {
            for b in 0..kept {
                out[(a, b)] = (0..traced)
                    .map(|e| self.data[(a * traced + e, b * traced + e)])
                    .sum();
            }
        }
        Self::from_matrix_unchecked(out)
    }
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}
