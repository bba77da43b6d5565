//! Small dense helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest entrywise modulus of `A - A^dag`.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `V^dag M V` for a fixed `V`, done as real products: nalgebra's real
/// gemm is several times faster than its complex one.
#[derive(Clone, Debug)]
pub struct BasisChange {
    vr: DMatrix<f64>,
    vi: DMatrix<f64>,
    vr_t: DMatrix<f64>,
    vi_t: DMatrix<f64>,
}

impl BasisChange {
    pub fn new(v: &CMatrix) -> Self {
        let vr = v.map(|z| z.re);
        let vi = v.map(|z| z.im);
        Self {
            vr_t: vr.transpose(),
            vi_t: vi.transpose(),
            vr,
            vi,
        }
    }

    pub fn apply(&self, m: &CMatrix) -> CMatrix {
        let mr = m.map(|z| z.re);
        let mi = m.map(|z| z.im);
        let ar = &mr * &self.vr - &mi * &self.vi;
        let ai = &mr * &self.vi + &mi * &self.vr;
        let br = &self.vr_t * &ar + &self.vi_t * &ai;
        let bi = &self.vr_t * &ai - &self.vi_t * &ar;
        CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| Complex64::new(br[(r, c)], bi[(r, c)]))
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigen-decomposition of a Hermitian matrix, columns sorted by ascending
/// eigenvalue.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Split an ascending spectrum into runs of (near-)equal values.
pub fn degenerate_clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tol {
            clusters.push(start..k);
            start = k;
        }
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorts_ascending() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        let (vals, vecs) = eigh(&m);
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
        assert!((vecs[(1, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clusters_group_close_values() {
        let c = degenerate_clusters(&[0.0, 1e-12, 1.0, 2.0, 2.0], 1e-9);
        assert_eq!(c, vec![0..2, 2..3, 3..5]);
    }

    #[test]
    fn basis_change_matches_complex_product() {
        let v = CMatrix::from_fn(5, 5, |r, c| Complex64::new((r * 3 + c) as f64 * 0.1, (r as f64 - c as f64) * 0.2));
        let m = CMatrix::from_fn(5, 5, |r, c| Complex64::new((r + c) as f64, (r * c) as f64 * 0.5 - 1.0));
        let direct = v.adjoint() * &m * &v;
        assert!(max_abs_diff(&BasisChange::new(&v).apply(&m), &direct) < 1e-12);
    }
}
