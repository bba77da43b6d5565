//! Multi-qubit operator algebra.
//!
//! Site ordering convention: site 0 is the leftmost tensor factor, so for
//! N sites the computational basis index `b` has site `j` in the bit
//! `b >> (N - 1 - j)`. Bit value 0 is the sigma^z = +1 ("up") state.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, I, ONE, ZERO};
use crate::state::DensityMatrix;

/// Tolerance for Hermiticity assertions on operators.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest imaginary residue accepted in an expectation value.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

/// Dense complex square matrix on a 2^N dimensional Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    data: CMatrix,
}

impl OperatorMatrix {
    pub fn new(data: CMatrix) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                actual: data.ncols(),
            });
        }
        if !data.nrows().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(data.nrows()));
        }
        Ok(Self { data })
    }

    /// Wraps a matrix whose shape is already known to be valid.
    pub(crate) fn from_raw(data: CMatrix) -> Self {
        debug_assert!(data.is_square() && data.nrows().is_power_of_two());
        Self { data }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(CMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(CMatrix::identity(dim, dim))
    }

    /// Real diagonal operator.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::new(CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(values[r], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// Row-major nested entries, as used by the bindings and tests.
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

    pub fn dagger(&self) -> Self {
        Self::from_raw(self.data.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.data)
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.data)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() < HERMITIAN_TOL
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let err = self.hermiticity_error();
        if err < HERMITIAN_TOL {
            Ok(())
        } else {
            Err(Error::NotHermitian(err))
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_raw(&self.data * Complex64::new(c, 0.0))
    }

    pub fn scale_complex(&self, c: Complex64) -> Self {
        Self::from_raw(&self.data * c)
    }

    /// Eigenvalues in ascending order. Requires a Hermitian operator.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.ensure_hermitian()?;
        Ok(linalg::eigvalsh(&self.data))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_raw(linalg::kron(&self.data, &other.data))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_diff(&self.data, &other.data)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            })
        }
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: Self) -> OperatorMatrix {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        OperatorMatrix::from_raw(&self.data + &rhs.data)
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: Self) -> OperatorMatrix {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        OperatorMatrix::from_raw(&self.data - &rhs.data)
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: Self) -> OperatorMatrix {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        OperatorMatrix::from_raw(&self.data * &rhs.data)
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        OperatorMatrix::from_raw(-&self.data)
    }
}

/// Single-qubit operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// sigma^+ = (sigma^x + i sigma^y) / 2
    Plus,
    /// sigma^- = (sigma^x - i sigma^y) / 2
    Minus,
    Identity,
}

impl std::str::FromStr for Pauli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Pauli::X),
            "y" => Ok(Pauli::Y),
            "z" => Ok(Pauli::Z),
            "plus" | "+" => Ok(Pauli::Plus),
            "minus" | "-" => Ok(Pauli::Minus),
            "identity" | "i" => Ok(Pauli::Identity),
            other => Err(Error::InvalidParameter(format!("unknown Pauli kind `{other}`"))),
        }
    }
}

pub fn pauli(kind: Pauli) -> OperatorMatrix {
    let m = |a, b, c, d| DMatrix::from_row_slice(2, 2, &[a, b, c, d]);
    let data = match kind {
        Pauli::X => m(ZERO, ONE, ONE, ZERO),
        Pauli::Y => m(ZERO, -I, I, ZERO),
        Pauli::Z => m(ONE, ZERO, ZERO, -ONE),
        Pauli::Plus => m(ZERO, ONE, ZERO, ZERO),
        Pauli::Minus => m(ZERO, ZERO, ONE, ZERO),
        Pauli::Identity => m(ONE, ZERO, ZERO, ONE),
    };
    OperatorMatrix::from_raw(data)
}

/// Places a single-qubit operator at `site` of an `n_sites` register.
pub fn embed(op: &OperatorMatrix, site: usize, n_sites: usize) -> Result<OperatorMatrix> {
    if op.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: op.dim(),
        });
    }
    if site >= n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    let left = CMatrix::identity(1 << site, 1 << site);
    let right_dim = 1 << (n_sites - 1 - site);
    let right = CMatrix::identity(right_dim, right_dim);
    Ok(OperatorMatrix::from_raw(left.kronecker(&op.data).kronecker(&right)))
}

/// `embed(pauli(kind), site, n_sites)` for an index known to be in range.
pub fn site_op(kind: Pauli, site: usize, n_sites: usize) -> OperatorMatrix {
    embed(&pauli(kind), site, n_sites).expect("site index checked by caller")
}

pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.check_dim(b)?;
    Ok(OperatorMatrix::from_raw(&a.data * &b.data - &b.data * &a.data))
}

pub fn anticommutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.check_dim(b)?;
    Ok(OperatorMatrix::from_raw(&a.data * &b.data + &b.data * &a.data))
}

/// Sum of `kind` over all sites, e.g. the total magnetization for `Pauli::Z`.
pub fn total(kind: Pauli, n_sites: usize) -> OperatorMatrix {
    let dim = 1 << n_sites;
    (0..n_sites).fold(OperatorMatrix::from_raw(CMatrix::zeros(dim, dim)), |acc, j| {
        &acc + &site_op(kind, j, n_sites)
    })
}

/// Tr[rho op], asserting the result is real.
pub fn expectation(rho: &DensityMatrix, op: &OperatorMatrix) -> Result<f64> {
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: op.dim(),
        });
    }
    let value = trace_of_product(rho.matrix(), op.matrix());
    if value.im.abs() >= EXPECTATION_IMAG_TOL {
        return Err(Error::ComplexExpectation(value.im));
    }
    Ok(value.re)
}

/// Tr[A B] without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
