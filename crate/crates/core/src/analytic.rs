//! Closed-form ergodic sum-rate capacity for exponentially distributed
//! per-user SINRs, its moment generating function and the density of the
//! sum capacity.
//!
//! With `γ_i ~ Exp(mean β_i)` independent and `ξ_i = log₂(1 + γ_i)`:
//!
//! ```text
//! E[Σ ξ_i]        = (1/ln2) Σ e^(1/β_i) E_1(1/β_i)
//! E[e^(s Σ ξ_i)]  = Π (1/β_i) U(1, 2 + s/ln2, 1/β_i)
//! ```
//!
//! The MGF uses the `e^(+sξ)` kernel, so its derivative at zero is the mean.
//! The Laplace transform of the density is the MGF at `-s`.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::quad::{integrate, QuadOptions};
use crate::specfun::{
    exp_scaled_e1, invert_laplace, tricomi_u1, tricomi_u1_complex, LaplaceInversionConfig,
};

/// Per-user exponential SINR scales.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaVector {
    betas: Vec<f64>,
}

impl BetaVector {
    pub fn new(betas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::domain("BetaVector::new", "need at least one user"));
        }
        if let Some((i, b)) = betas
            .iter()
            .enumerate()
            .find(|(_, b)| !(b.is_finite() && **b > 0.0))
        {
            return Err(Error::domain(
                "BetaVector::new",
                format!("beta[{i}] = {b} must be finite and > 0"),
            ));
        }
        Ok(Self { betas })
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.betas
    }

    pub fn max(&self) -> f64 {
        self.betas.iter().cloned().fold(0.0, f64::max)
    }

    pub fn concat(&self, other: &BetaVector) -> BetaVector {
        let mut betas = self.betas.clone();
        betas.extend_from_slice(&other.betas);
        BetaVector { betas }
    }

    /// Distinct scales with multiplicities, so equal users share one evaluation.
    fn grouped(&self) -> Vec<(f64, i32)> {
        let mut out: Vec<(f64, i32)> = Vec::new();
        for &b in &self.betas {
            match out.iter_mut().find(|(v, _)| *v == b) {
                Some((_, k)) => *k += 1,
                None => out.push((b, 1)),
            }
        }
        out
    }
}

/// Ergodic sum rate in bits/s/Hz, using the overflow-free `e^x E_1(x)`.
pub fn esrc_closed_form(b: &BetaVector) -> Result<f64> {
    let mut total = 0.0;
    for (i, &beta) in b.betas.iter().enumerate() {
        let term = exp_scaled_e1(1.0 / beta)? / LN_2;
        if !term.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite capacity term for beta[{i}] = {beta}"
            )));
        }
        total += term;
    }
    Ok(total)
}

/// `∫₀^∞ log₂(1+x) e^(-x/β)/β dx` by adaptive quadrature.
pub fn per_user_capacity_quadrature(beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::domain(
            "per_user_capacity_quadrature",
            format!("beta must be > 0, got {beta}"),
        ));
    }
    // x = β u; the weight e^-u is below 1e-320 past u = 740
    let mut breaks = vec![0.0];
    let mut u = 1.0 / 64.0;
    while u < 740.0 {
        breaks.push(u);
        u *= 2.0;
    }
    breaks.push(740.0);
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    let r = integrate(|u: f64| (beta * u).ln_1p() * (-u).exp(), &breaks, opts)?;
    Ok(r.value / LN_2)
}

/// Moment generating function `E[e^(s C)]` of the sum capacity `C`.
///
/// The function is entire in `s`; it is evaluated for every real `s` with
/// `2 + s/ln2 - 1` above the incomplete-gamma order floor.
pub fn sum_capacity_mgf(s: f64, b: &BetaVector) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::domain(
            "sum_capacity_mgf",
            format!("s must be finite, got {s}"),
        ));
    }
    let order = 2.0 + s / LN_2;
    b.grouped().into_iter().try_fold(1.0, |acc, (beta, k)| {
        let u = tricomi_u1(order, 1.0 / beta)?;
        Ok(acc * (u / beta).powi(k))
    })
}

/// [`sum_capacity_mgf`] at complex `s`.
pub fn sum_capacity_mgf_complex(s: Complex64, b: &BetaVector) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::domain(
            "sum_capacity_mgf_complex",
            format!("s must be finite, got {s}"),
        ));
    }
    let order = Complex64::new(2.0, 0.0) + s / LN_2;
    b.grouped()
        .into_iter()
        .try_fold(Complex64::new(1.0, 0.0), |acc, (beta, k)| {
            let u = tricomi_u1_complex(order, 1.0 / beta)?;
            Ok(acc * (u / beta).powi(k))
        })
}

/// Mean capacity from a central difference of the MGF at zero.
pub fn mgf_mean_check(b: &BetaVector, step: f64) -> Result<f64> {
    if !(1e-6..=1e-3).contains(&step) {
        return Err(Error::domain(
            "mgf_mean_check",
            format!("step must lie in [1e-6, 1e-3], got {step}"),
        ));
    }
    let plus = sum_capacity_mgf(step, b)?;
    let minus = sum_capacity_mgf(-step, b)?;
    Ok(((plus - minus) / (2.0 * step)).abs())
}

/// Inversion settings suited to the capacity density. Its transform grows
/// factorially in the left half-plane, so only right-half-plane methods work.
pub fn capacity_pdf_config() -> LaplaceInversionConfig {
    LaplaceInversionConfig::euler(40)
}

/// Density of the sum capacity on `grid` (bits), by Laplace inversion.
pub fn capacity_pdf(
    b: &BetaVector,
    grid: &[f64],
    cfg: &LaplaceInversionConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let transform = |p: Complex64| {
        sum_capacity_mgf_complex(-p, b).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    let rows: Vec<Result<Vec<f64>>> = grid
        .par_iter()
        .map(|&t| invert_laplace(transform, &[t], cfg))
        .collect();
    rows.into_iter().map(|r| r.map(|v| v[0])).collect()
}

/// Upper end of the default density grid: covers the bulk at ten times the
/// largest mean SINR and pushes the union-bound tail mass below `1e-6`.
pub fn default_grid_max(b: &BetaVector) -> f64 {
    let n = b.len() as f64;
    let beta = b.max();
    let bulk = n * (10.0 * beta).ln_1p() / LN_2;
    let tail = n * (beta * (n * 1e6).ln()).ln_1p() / LN_2;
    bulk.max(tail)
}

/// `points` equally spaced abscissae on `(0, grid_max]`.
pub fn uniform_grid(grid_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(grid_max.is_finite() && grid_max > 0.0) || points == 0 {
        return Err(Error::domain(
            "uniform_grid",
            format!("need grid_max > 0 and points >= 1, got {grid_max}, {points}"),
        ));
    }
    Ok((1..=points)
        .map(|i| grid_max * i as f64 / points as f64)
        .collect())
}

pub fn default_pdf_grid(b: &BetaVector) -> Vec<f64> {
    uniform_grid(default_grid_max(b), 512).expect("positive grid bound")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(v: &[f64]) -> BetaVector {
        BetaVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn beta_vector_validation() {
        assert!(BetaVector::new(vec![]).is_err());
        let e = BetaVector::new(vec![1.0, -2.0]).unwrap_err().to_string();
        assert!(e.contains("beta[1]"), "{e}");
        assert!(BetaVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let one = esrc_closed_form(&bv(&[1.0])).unwrap();
        assert!((one - 0.860_347_382_270_886).abs() < 1e-13);
        let three = esrc_closed_form(&bv(&[1.0, 1.0, 1.0])).unwrap();
        assert!((three - 3.0 * one).abs() < 1e-13);
        let tiny = esrc_closed_form(&bv(&[1e-8])).unwrap();
        assert!((tiny - 1e-8 / LN_2).abs() < 1e-15);
    }

    #[test]
    fn mgf_examples() {
        assert!((sum_capacity_mgf(0.0, &bv(&[0.3, 7.0, 42.0])).unwrap() - 1.0).abs() < 1e-12);
        let m = sum_capacity_mgf(-LN_2, &bv(&[1.0])).unwrap();
        assert!((m - 0.596_347_362_323_194).abs() < 1e-13);
        let m2 = sum_capacity_mgf(0.37, &bv(&[1.0, 1.0])).unwrap();
        let m1 = sum_capacity_mgf(0.37, &bv(&[1.0])).unwrap();
        assert!((m2 - m1 * m1).abs() < 1e-14);
    }

    #[test]
    fn mean_check_examples() {
        let v = mgf_mean_check(&bv(&[1.0]), 1e-4).unwrap();
        assert!((v - 0.860_347_382_270_886).abs() < 1e-7);
        assert!(mgf_mean_check(&bv(&[1e-8]), 1e-4).unwrap() < 1e-7);
        assert!(mgf_mean_check(&bv(&[1.0]), 0.1).is_err());
    }

    #[test]
    fn default_grid_covers_the_tail() {
        let b = bv(&[2.0, 5.0]);
        let g = default_pdf_grid(&b);
        assert_eq!(g.len(), 512);
        let x = g[511] / 2.0;
        let tail: f64 = b
            .as_slice()
            .iter()
            .map(|beta| (-(2f64.powf(x) - 1.0) / beta).exp())
            .sum();
        assert!(tail <= 1e-6);
    }
}
