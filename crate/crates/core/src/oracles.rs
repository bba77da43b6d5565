//! Closed-form reference results used as ground truth in tests.
//!
//! Basis order follows [`crate::spin`]: index 0 is all-up, and the last
//! index is all-down (the amplitude-damping dark state).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::state::DensityMatrix;

/// Two-cell dephasing parameters: local rate `gamma`, cross rate `p + iq`,
/// induced Ising coupling `j_z` and battery field `h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DephasingTwoQubitParams {
    pub h: f64,
    pub gamma: f64,
    pub p: f64,
    pub q: f64,
    pub j_z: f64,
}

impl DephasingTwoQubitParams {
    pub fn from_polar(h: f64, gamma: f64, modulus: f64, phase: f64, j_z: f64) -> Self {
        let g = Complex64::from_polar(modulus, phase);
        Self {
            h,
            gamma,
            p: g.re,
            q: g.im,
            j_z,
        }
    }

    pub fn gamma_offdiag(&self) -> Complex64 {
        Complex64::new(self.p, self.q)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time must be finite and >= 0, got {t}")))
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Single qubit `|-><-|` under local dephasing: coherences decay as `e^{-2 gamma t}`.
pub fn local_dephasing_state(gamma: f64, t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    let off = -0.5 * (-2.0 * gamma * t).exp();
    DensityMatrix::new(CMatrix::from_row_slice(
        2,
        2,
        &[real(0.5), real(off), real(off), real(0.5)],
    ))
}

/// Two cells from `|-><-|^{(x)2}` under correlated dephasing with
/// `H_z = j_z sigma^z_1 sigma^z_2`.
///
/// Single-flip coherences pick up phases `2(j_z -+ q) t` and decay as
/// `e^{-2 gamma t}`; the double-flip coherences decay as `e^{-4(gamma +- p) t}`.
pub fn correlated_dephasing_state(params: &DephasingTwoQubitParams, t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    let DephasingTwoQubitParams { gamma, p, q, j_z, .. } = *params;
    let single = |phase: f64| -0.25 * Complex64::from_polar((-2.0 * gamma * t).exp(), phase);
    let mut m = CMatrix::from_element(4, 4, real(0.25));
    m[(0, 1)] = single(-2.0 * (j_z - q) * t);
    m[(0, 2)] = single(-2.0 * (j_z + q) * t);
    m[(1, 3)] = single(2.0 * (j_z + q) * t);
    m[(2, 3)] = single(2.0 * (j_z - q) * t);
    m[(0, 3)] = real(0.25 * (-4.0 * (gamma + p) * t).exp());
    m[(1, 2)] = real(0.25 * (-4.0 * (gamma - p) * t).exp());
    for r in 0..4 {
        for c in 0..r {
            m[(r, c)] = m[(c, r)].conj();
        }
    }
    DensityMatrix::from_matrix_unchecked(m)
}

/// `W(t) = -h e^{-2 gamma t} cos(2 j_z t) cos(2 q t)`.
pub fn correlated_dephasing_energy(params: &DephasingTwoQubitParams, t: f64) -> f64 {
    -params.h * (-2.0 * params.gamma * t).exp() * (2.0 * params.j_z * t).cos() * (2.0 * params.q * t).cos()
}

/// Ergotropy of the two-cell correlated-dephasing state in the weak
/// cross-rate limit `gamma >> |p + iq|`.
pub fn correlated_dephasing_ergotropy_limit(params: &DephasingTwoQubitParams, t: f64) -> f64 {
    let DephasingTwoQubitParams { h, gamma, p, q, .. } = *params;
    let root = ((4.0 * t * p).sinh().powi(2) + 4.0 * (4.0 * gamma * t).exp() * (2.0 * t * q).cos().powi(2)).sqrt();
    correlated_dephasing_energy(params, t) + 0.5 * h * (-4.0 * gamma * t).exp() * root
}

/// Single qubit `|-><-|` under zero-temperature local amplitude damping.
///
/// Population flows into the down state (second basis element); coherences
/// decay as `e^{-gamma t / 2}`.
pub fn local_ad_state(gamma: f64, t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    let up = 0.5 * (-gamma * t).exp();
    let off = -0.5 * (-gamma * t / 2.0).exp();
    DensityMatrix::new(CMatrix::from_row_slice(
        2,
        2,
        &[real(up), real(off), real(off), real(1.0 - up)],
    ))
}

/// Spectrum of the periodic nearest-neighbor rate matrix,
/// `gamma + 2|g| cos(2 pi m / N + arg g)` for `m = 0..N`, ascending.
pub fn gamma_nn_eigenvalues(gamma: f64, gamma12: Complex64, n: usize) -> Vec<f64> {
    let (modulus, phi) = gamma12.to_polar();
    let mut values: Vec<f64> = (0..n)
        .map(|m| gamma + 2.0 * modulus * (2.0 * PI * m as f64 / n as f64 + phi).cos())
        .collect();
    values.sort_by(f64::total_cmp);
    values
}
