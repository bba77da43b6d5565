//! Figures of merit for a battery state: energy, ergotropy, stored energy,
//! extractable fraction and l1 coherence in the battery eigenbasis.

use std::ops::Range;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::spin::{site_op, total, trace_of_product, OperatorMatrix, Pauli};
use crate::state::DensityMatrix;

/// Below this |E| the extractable fraction is undefined.
pub const RATIO_THRESHOLD: f64 = 1e-9;
/// Largest dimension for exhaustive permutation search.
pub const ORACLE_MAX_DIM: usize = 8;
const CLUSTER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ergotropy {
    pub w: f64,
    pub passive_energy: f64,
    pub ergotropy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErgotropyReport {
    pub w: f64,
    pub passive_energy: f64,
    pub ergotropy: f64,
    /// `W(t) - W(0)`
    pub stored: f64,
    pub ratio: Option<f64>,
    /// Total l1 coherence (not divided by the number of sites).
    pub coherence: f64,
}

fn check_dims(rho: &DensityMatrix, h_b: &OperatorMatrix) -> Result<()> {
    if rho.dim() != h_b.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_b.dim(),
            actual: rho.dim(),
        });
    }
    Ok(())
}

fn energy(rho: &CMatrix, h: &CMatrix) -> f64 {
    trace_of_product(rho, h).re
}

/// `sum lambda_i eps_i`, populations ascending against energies descending.
fn passive_energy(populations_asc: &[f64], energies_asc: &[f64]) -> f64 {
    populations_asc
        .iter()
        .zip(energies_asc.iter().rev())
        .map(|(l, e)| l * e)
        .sum()
}

/// Ergotropy `Tr[H rho] - min_U Tr[H U rho U^dag]` via the passive state.
pub fn ergotropy(rho: &DensityMatrix, h_b: &OperatorMatrix) -> Result<Ergotropy> {
    check_dims(rho, h_b)?;
    h_b.ensure_hermitian()?;
    let energies = linalg::eigvalsh(h_b.matrix());
    let w = energy(rho.matrix(), h_b.matrix());
    let passive = passive_energy(rho.spectrum(), &energies);
    Ok(Ergotropy {
        w,
        passive_energy: passive,
        ergotropy: w - passive,
    })
}

/// `ergotropy / stored`, or `None` when `|stored| <= 1e-9`.
pub fn extraction_ratio(ergotropy: f64, stored: f64) -> Option<f64> {
    (stored.abs() > RATIO_THRESHOLD).then(|| ergotropy / stored)
}

/// Sum of absolute off-diagonal entries of `rho` in the eigenbasis of `h_b`
/// (see [`EnergyBasis`] for the basis choice under degeneracy).
pub fn coherence_l1_energy_basis(rho: &DensityMatrix, h_b: &OperatorMatrix) -> Result<f64> {
    EnergyBasis::new(h_b)?.coherence(rho)
}

/// Eigen-decomposition of a battery Hamiltonian with a reproducible basis.
///
/// Columns are ordered by ascending energy. Inside a degenerate level the
/// basis diagonalizes, in turn, total `sigma^z`, then `sum 2^i sigma^x_i`,
/// then `sum 2^i sigma^z_i`, each restricted to the level. With no
/// interaction the first key is zero on every level and the second picks
/// out the `sigma^x` product basis.
#[derive(Clone, Debug)]
pub struct EnergyBasis {
    h: OperatorMatrix,
    energies: Vec<f64>,
    vectors: CMatrix,
    change: linalg::BasisChange,
}

impl EnergyBasis {
    pub fn new(h_b: &OperatorMatrix) -> Result<Self> {
        h_b.ensure_hermitian()?;
        let (energies, mut vectors) = linalg::eigh(h_b.matrix());
        let n = h_b.n_sites();
        let scale = energies.iter().fold(1.0f64, |m, e| m.max(e.abs()));
        let clusters = linalg::degenerate_clusters(&energies, CLUSTER_TOL * scale);
        if clusters.iter().any(|c| c.len() > 1) {
            let weighted = |kind| {
                (0..n).fold(CMatrix::zeros(h_b.dim(), h_b.dim()), |acc, i| {
                    acc + site_op(kind, i, n).matrix() * Complex64::new((1u64 << i) as f64, 0.0)
                })
            };
            let keys = [
                total(Pauli::Z, n).into_matrix(),
                weighted(Pauli::X),
                weighted(Pauli::Z),
            ];
            for cluster in clusters {
                refine(&mut vectors, cluster, &keys);
            }
        }
        Ok(Self {
            h: h_b.clone(),
            energies,
            change: linalg::BasisChange::new(&vectors),
            vectors,
        })
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.h
    }

    /// Ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Eigenvectors as columns, in basis order.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn energy(&self, rho: &DensityMatrix) -> Result<f64> {
        check_dims(rho, &self.h)?;
        Ok(energy(rho.matrix(), self.h.matrix()))
    }

    pub fn ergotropy(&self, rho: &DensityMatrix) -> Result<Ergotropy> {
        let w = self.energy(rho)?;
        let passive = passive_energy(rho.spectrum(), &self.energies);
        Ok(Ergotropy {
            w,
            passive_energy: passive,
            ergotropy: w - passive,
        })
    }

    /// `rho` expressed in this basis.
    pub fn transform(&self, rho: &DensityMatrix) -> Result<CMatrix> {
        check_dims(rho, &self.h)?;
        Ok(self.change.apply(rho.matrix()))
    }

    pub fn coherence(&self, rho: &DensityMatrix) -> Result<f64> {
        let m = self.transform(rho)?;
        let dim = m.nrows();
        let mut sum = 0.0;
        for c in 0..dim {
            for r in 0..dim {
                if r != c {
                    sum += m[(r, c)].norm();
                }
            }
        }
        Ok(sum)
    }

    /// All observables for one sample; `w0` is the energy at `t = 0`.
    pub fn report(&self, rho: &DensityMatrix, w0: f64) -> Result<ErgotropyReport> {
        let e = self.ergotropy(rho)?;
        let stored = e.w - w0;
        Ok(ErgotropyReport {
            w: e.w,
            passive_energy: e.passive_energy,
            ergotropy: e.ergotropy,
            stored,
            ratio: extraction_ratio(e.ergotropy, stored),
            coherence: self.coherence(rho)?,
        })
    }
}

fn refine(vectors: &mut CMatrix, cols: Range<usize>, keys: &[CMatrix]) {
    if cols.len() < 2 || keys.is_empty() {
        return;
    }
    let block = vectors.columns(cols.start, cols.len()).into_owned();
    let restricted = block.adjoint() * &keys[0] * &block;
    let (values, rotation) = linalg::eigh(&restricted);
    let rotated = block * rotation;
    vectors.columns_mut(cols.start, cols.len()).copy_from(&rotated);
    for sub in linalg::degenerate_clusters(&values, CLUSTER_TOL) {
        refine(vectors, cols.start + sub.start..cols.start + sub.end, &keys[1..]);
    }
}

/// Components of the brute-force ergotropy search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleBreakdown {
    pub w: f64,
    /// Lowest energy over all pairings of rho eigenvectors with H eigenvectors.
    pub permutation_passive: f64,
    /// Lowest `Tr[H U rho U^dag]` over the sampled Haar unitaries.
    pub best_random_energy: f64,
}

impl OracleBreakdown {
    pub fn ergotropy(&self) -> f64 {
        self.w - self.permutation_passive.min(self.best_random_energy)
    }
}

/// Ergotropy by direct minimization over unitaries: every permutation
/// pairing of eigenvectors plus `n_random_unitaries` Haar samples.
pub fn ergotropy_bruteforce_oracle(
    rho: &DensityMatrix,
    h_b: &OperatorMatrix,
    n_random_unitaries: usize,
    seed: u64,
) -> Result<f64> {
    Ok(ergotropy_oracle_breakdown(rho, h_b, n_random_unitaries, seed)?.ergotropy())
}

pub fn ergotropy_oracle_breakdown(
    rho: &DensityMatrix,
    h_b: &OperatorMatrix,
    n_random_unitaries: usize,
    seed: u64,
) -> Result<OracleBreakdown> {
    check_dims(rho, h_b)?;
    h_b.ensure_hermitian()?;
    let dim = rho.dim();
    if dim > ORACLE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            limit: ORACLE_MAX_DIM,
        });
    }
    let energies = linalg::eigvalsh(h_b.matrix());
    let populations = rho.spectrum();

    let mut perm: Vec<usize> = (0..dim).collect();
    let mut permutation_passive = f64::INFINITY;
    heap_permutations(&mut perm, dim, &mut |p| {
        let e: f64 = p.iter().enumerate().map(|(i, &k)| populations[i] * energies[k]).sum();
        permutation_passive = permutation_passive.min(e);
    });

    let mut rng = StdRng::seed_from_u64(seed);
    let mut best_random_energy = f64::INFINITY;
    for _ in 0..n_random_unitaries {
        let u = haar_unitary(dim, &mut rng);
        let rotated = &u * rho.matrix() * u.adjoint();
        best_random_energy = best_random_energy.min(energy(&rotated, h_b.matrix()));
    }

    Ok(OracleBreakdown {
        w: energy(rho.matrix(), h_b.matrix()),
        permutation_passive,
        best_random_energy,
    })
}

fn heap_permutations(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        visit(items);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(items, k - 1, visit);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
    heap_permutations(items, k - 1, visit);
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of R's diagonal folded into Q.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    });
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    q
}
