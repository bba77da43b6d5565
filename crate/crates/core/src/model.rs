//! Battery Hamiltonian, reservoir-induced effective Hamiltonians and
//! initial-state preparation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::spin::{site_op, OperatorMatrix, Pauli};
use crate::state::DensityMatrix;

/// Spectral gap below which the ground level counts as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Transverse-field Ising battery
/// `H_B = sum_i (h/2) sigma^x_i + (j_coupling/4) sum_i sigma^z_i sigma^z_{i+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryModel {
    pub n_sites: usize,
    pub h: f64,
    pub j_coupling: f64,
    pub periodic: bool,
}

impl BatteryModel {
    pub fn new(n_sites: usize, h: f64, j_coupling: f64) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidParameter("n_sites must be at least 1".into()));
        }
        Ok(Self {
            n_sites,
            h,
            j_coupling,
            periodic: true,
        })
    }

    pub fn open(mut self) -> Self {
        self.periodic = false;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    /// `J_z sigma^z_j sigma^z_k`, induced by correlated dephasing.
    IsingZ,
    /// `(J/2)(XX + YY) + (D/2)(XY - YX)`, induced by correlated amplitude damping.
    XxDm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingRange {
    NearestNeighbor,
    AllToAll,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCoupling {
    pub kind: CouplingKind,
    pub j_z: f64,
    pub j_xx: f64,
    pub d_dm: f64,
    pub range: CouplingRange,
}

impl EffectiveCoupling {
    pub fn ising(j_z: f64, range: CouplingRange) -> Self {
        Self {
            kind: CouplingKind::IsingZ,
            j_z,
            j_xx: 0.0,
            d_dm: 0.0,
            range,
        }
    }

    pub fn xx_dm(j_xx: f64, d_dm: f64, range: CouplingRange) -> Self {
        Self {
            kind: CouplingKind::XxDm,
            j_z: 0.0,
            j_xx,
            d_dm,
            range,
        }
    }

    /// Strength entering the ladder form, `J + iD`.
    pub fn complex_xy(&self) -> Complex64 {
        Complex64::new(self.j_xx, self.d_dm)
    }

    pub fn is_zero(&self) -> bool {
        match self.kind {
            CouplingKind::IsingZ => self.j_z == 0.0,
            CouplingKind::XxDm => self.j_xx == 0.0 && self.d_dm == 0.0,
        }
    }

    /// Largest coupling magnitude, used to pick integrator step sizes.
    pub fn magnitude(&self) -> f64 {
        match self.kind {
            CouplingKind::IsingZ => self.j_z.abs(),
            CouplingKind::XxDm => self.complex_xy().norm(),
        }
    }
}

/// Ordered site pairs `(i, i+1)` of a chain. With periodic boundaries the
/// closing bond `(N-1, 0)` is added for N >= 2; for N = 2 this bond repeats
/// the pair (0, 1), so the ring of two counts it twice.
pub fn chain_bonds(n_sites: usize, periodic: bool) -> Vec<(usize, usize)> {
    let mut bonds: Vec<_> = (0..n_sites.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if periodic && n_sites >= 2 {
        bonds.push((n_sites - 1, 0));
    }
    bonds
}

/// All pairs `j < k`.
pub fn all_pairs(n_sites: usize) -> Vec<(usize, usize)> {
    (0..n_sites)
        .flat_map(|j| (j + 1..n_sites).map(move |k| (j, k)))
        .collect()
}

pub fn battery_hamiltonian(model: &BatteryModel) -> OperatorMatrix {
    let n = model.n_sites;
    let dim = 1usize << n;
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..n {
        h += site_op(Pauli::X, i, n).matrix() * Complex64::new(model.h / 2.0, 0.0);
    }
    if model.j_coupling != 0.0 {
        for (i, j) in chain_bonds(n, model.periodic) {
            let zz = &site_op(Pauli::Z, i, n) * &site_op(Pauli::Z, j, n);
            h += zz.matrix() * Complex64::new(model.j_coupling / 4.0, 0.0);
        }
    }
    OperatorMatrix::from_raw(h)
}

pub fn effective_hamiltonian(
    coupling: &EffectiveCoupling,
    n_sites: usize,
    periodic: bool,
) -> OperatorMatrix {
    let dim = 1usize << n_sites;
    let pairs = match coupling.range {
        CouplingRange::NearestNeighbor => chain_bonds(n_sites, periodic),
        CouplingRange::AllToAll => all_pairs(n_sites),
    };
    let mut h = CMatrix::zeros(dim, dim);
    for (j, k) in pairs {
        match coupling.kind {
            CouplingKind::IsingZ => {
                let zz = &site_op(Pauli::Z, j, n_sites) * &site_op(Pauli::Z, k, n_sites);
                h += zz.matrix() * Complex64::new(coupling.j_z, 0.0);
            }
            CouplingKind::XxDm => {
                let c = coupling.complex_xy();
                let pm = &site_op(Pauli::Plus, j, n_sites) * &site_op(Pauli::Minus, k, n_sites);
                let mp = &site_op(Pauli::Minus, j, n_sites) * &site_op(Pauli::Plus, k, n_sites);
                h += pm.matrix() * c + mp.matrix() * c.conj();
            }
        }
    }
    OperatorMatrix::from_raw(h)
}

/// Pure ground state of a Hermitian operator; a degenerate ground level is
/// an error rather than an arbitrary pick.
pub fn ground_state(h: &OperatorMatrix) -> Result<DensityMatrix> {
    h.ensure_hermitian()?;
    let (values, vectors) = linalg::eigh(h.matrix());
    if values.len() > 1 {
        let gap = values[1] - values[0];
        if gap < DEGENERACY_GAP {
            return Err(Error::DegenerateGround { gap });
        }
    }
    let psi: Vec<Complex64> = vectors.column(0).iter().copied().collect();
    DensityMatrix::from_pure(&psi)
}

/// `(|-><-|)^{(x)N}` with `|-> = (|up> - |down>)/sqrt(2)`.
pub fn product_minus_state(n_sites: usize) -> Result<DensityMatrix> {
    if n_sites == 0 {
        return Err(Error::InvalidParameter("n_sites must be at least 1".into()));
    }
    let dim = 1usize << n_sites;
    let norm = 1.0 / dim as f64;
    let sign = |b: usize| if b.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    let data = CMatrix::from_fn(dim, dim, |a, b| Complex64::new(sign(a) * sign(b) * norm, 0.0));
    DensityMatrix::new(data)
}
