//! Exponential and banded correlation matrices.
//!
//! `[Σ]_{ij} = ρ^|i-j|` inside the band `|i-j| <= l_band`, zero outside.
//! Tridiagonal is `l_band = 1`, pentadiagonal `l_band = 2`, and
//! `l_band = n - 1` is the full exponential model.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance on negative eigenvalues.
pub const DEFAULT_PSD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSpec {
    n: usize,
    rho: f64,
    l_band: usize,
}

impl CorrelationSpec {
    pub fn new(n: usize, rho: f64, l_band: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("correlation dimension n must be >= 1".into()));
        }
        if !(rho.is_finite() && (0.0..1.0).contains(&rho)) {
            return Err(Error::Config(format!("rho out of range [0, 1): {rho}")));
        }
        if l_band > n - 1 {
            return Err(Error::Config(format!(
                "l_band exceeds n-1: l_band = {l_band}, n = {n}"
            )));
        }
        Ok(Self { n, rho, l_band })
    }

    /// Full (unbanded) exponential model.
    pub fn full(n: usize, rho: f64) -> Result<Self> {
        Self::new(n, rho, n.saturating_sub(1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn l_band(&self) -> usize {
        self.l_band
    }
}

impl fmt::Display for CorrelationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, rho={}, l_band={}", self.n, self.rho, self.l_band)
    }
}

/// Square complex matrix equal to its conjugate transpose.
///
/// Constructors only ever fill the upper triangle and mirror it, so the
/// symmetry holds bit-exactly and the diagonal is real.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Build from a generator evaluated on the upper triangle (`i <= j`).
    /// The imaginary part of diagonal entries is dropped.
    pub fn from_upper(dim: usize, mut entry: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(entry(i, i).re, 0.0);
            for j in i + 1..dim {
                let v = entry(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        Self { inner: m }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_upper(dim, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Real symmetric matrix from row-major rows; only the upper triangle is read.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape(format!("expected {dim}x{dim} rows")));
        }
        Ok(Self::from_upper(dim, |i, j| {
            Complex64::new(rows[i][j], 0.0)
        }))
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    fn fingerprint(&self) -> String {
        let frob = self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let trace: f64 = (0..self.dim()).map(|i| self.inner[(i, i)].re).sum();
        format!(
            "dim={}, trace={trace:.6e}, frobenius={frob:.6e}",
            self.dim()
        )
    }
}

/// `[Σ]_{ij} = ρ^|i-j|` for `|i-j| <= l_band`, else exactly zero.
pub fn build_banded_correlation(spec: &CorrelationSpec) -> HermitianMatrix {
    HermitianMatrix::from_upper(spec.n, |i, j| {
        let d = j - i;
        if d <= spec.l_band {
            Complex64::new(spec.rho.powi(d as i32), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    pub min_eig: f64,
    pub is_psd: bool,
}

/// What to do with eigenvalues below `-tol` when taking a square root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PsdPolicy {
    #[default]
    Error,
    /// Zero every negative eigenvalue. The diagonal is not renormalized.
    Clamp,
}

fn eigen(m: &HermitianMatrix) -> Result<nalgebra::SymmetricEigen<Complex64, nalgebra::Dyn>> {
    m.inner
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| {
            Error::Numerical(format!(
                "Hermitian eigendecomposition failed ({})",
                m.fingerprint()
            ))
        })
}

pub fn psd_check(m: &HermitianMatrix, tol: f64) -> Result<PsdReport> {
    let eig = eigen(m)?;
    let min_eig = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(PsdReport {
        min_eig,
        is_psd: min_eig >= -tol,
    })
}

/// Principal square root through the Hermitian eigendecomposition.
///
/// Eigenvalues in `[-tol, 0)` are treated as zero. Anything more negative is
/// an error under [`PsdPolicy::Error`] and is zeroed under [`PsdPolicy::Clamp`].
/// `spec` is only used to label the error.
pub fn matrix_sqrt_with(
    m: &HermitianMatrix,
    tol: f64,
    policy: PsdPolicy,
    spec: Option<&CorrelationSpec>,
) -> Result<HermitianMatrix> {
    let eig = eigen(m)?;
    let min_eig = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -tol && policy == PsdPolicy::Error {
        return Err(Error::NotPsd {
            min_eig,
            spec: spec.map(|s| s.to_string()),
        });
    }
    let v = &eig.eigenvectors;
    let roots: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let dim = m.dim();
    Ok(HermitianMatrix::from_upper(dim, |i, j| {
        (0..dim)
            .map(|k| v[(i, k)] * v[(j, k)].conj() * roots[k])
            .sum()
    }))
}

pub fn matrix_sqrt(m: &HermitianMatrix, tol: f64) -> Result<HermitianMatrix> {
    matrix_sqrt_with(m, tol, PsdPolicy::Error, None)
}

/// Build `Σ_band` for `spec` and return its square root.
pub fn correlation_sqrt(spec: &CorrelationSpec, policy: PsdPolicy) -> Result<HermitianMatrix> {
    matrix_sqrt_with(
        &build_banded_correlation(spec),
        DEFAULT_PSD_TOL,
        policy,
        Some(spec),
    )
}
