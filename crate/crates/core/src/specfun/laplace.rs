//! Numerical inverse Laplace transform.
//!
//! Two methods are provided:
//!
//! - **Fixed Talbot** (Abate–Valkó): deformed Bromwich contour
//!   `s(θ) = r θ (cot θ + i)`, `r = scale · M / t`. Very accurate for
//!   transforms that decay in the left half-plane.
//! - **Euler summation** (Abate–Whitt): trapezoidal rule on the vertical line
//!   `Re s = A / 2t`, accelerated by binomial averaging of the last partial
//!   sums. Needs the transform only in the right half-plane, which makes it
//!   the right choice for densities with super-exponentially light tails
//!   (their transforms grow factorially to the left and break Talbot).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Number of binomially averaged partial sums in the Euler method.
const EULER_AVERAGING: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionMethod {
    FixedTalbot,
    EulerSummation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceInversionConfig {
    pub method: InversionMethod,
    /// Talbot: contour nodes `M`. Euler: series terms before averaging.
    pub node_count: usize,
    /// Talbot: `r = scale · M / t` (0.4 is standard). Euler: the abscissa
    /// parameter `A`; discretization error is roughly `e^-A`.
    pub abscissa_scale: f64,
}

impl Default for LaplaceInversionConfig {
    fn default() -> Self {
        Self::talbot(32)
    }
}

impl LaplaceInversionConfig {
    pub fn talbot(node_count: usize) -> Self {
        Self {
            method: InversionMethod::FixedTalbot,
            node_count,
            abscissa_scale: 0.4,
        }
    }

    pub fn euler(node_count: usize) -> Self {
        Self {
            method: InversionMethod::EulerSummation,
            node_count,
            abscissa_scale: 18.4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(Error::domain(
                "invert_laplace",
                format!("node_count must be >= 8, got {}", self.node_count),
            ));
        }
        if !(self.abscissa_scale.is_finite() && self.abscissa_scale > 0.0) {
            return Err(Error::domain(
                "invert_laplace",
                format!("abscissa_scale must be > 0, got {}", self.abscissa_scale),
            ));
        }
        Ok(())
    }
}

/// Invert `transform` at every point of `grid` (all points finite and > 0).
///
/// A non-finite transform value aborts with [`Error::InversionFailure`]
/// naming the grid point and the contour node.
pub fn invert_laplace<F>(
    transform: F,
    grid: &[f64],
    cfg: &LaplaceInversionConfig,
) -> Result<Vec<f64>>
where
    F: Fn(Complex64) -> Complex64,
{
    cfg.validate()?;
    if let Some(&t) = grid.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::domain(
            "invert_laplace",
            format!("grid points must be > 0, got {t}"),
        ));
    }
    grid.iter()
        .map(|&t| match cfg.method {
            InversionMethod::FixedTalbot => talbot_point(&transform, t, cfg),
            InversionMethod::EulerSummation => euler_point(&transform, t, cfg),
        })
        .collect()
}

fn eval<F: Fn(Complex64) -> Complex64>(transform: &F, s: Complex64, t: f64) -> Result<Complex64> {
    let v = transform(s);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::InversionFailure { t, node: s })
    }
}

fn talbot_point<F: Fn(Complex64) -> Complex64>(
    transform: &F,
    t: f64,
    cfg: &LaplaceInversionConfig,
) -> Result<f64> {
    let m = cfg.node_count;
    let r = cfg.abscissa_scale * m as f64 / t;
    let s0 = Complex64::new(r, 0.0);
    let mut acc = 0.5 * (eval(transform, s0, t)? * (r * t).exp()).re;
    for k in 1..m {
        let theta = k as f64 * PI / m as f64;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (s * t).exp() * eval(transform, s, t)? * Complex64::new(1.0, sigma);
        if !term.re.is_finite() {
            return Err(Error::InversionFailure { t, node: s });
        }
        acc += term.re;
    }
    Ok(acc * r / m as f64)
}

fn euler_point<F: Fn(Complex64) -> Complex64>(
    transform: &F,
    t: f64,
    cfg: &LaplaceInversionConfig,
) -> Result<f64> {
    let a = cfg.abscissa_scale;
    let n = cfg.node_count;
    let total = n + EULER_AVERAGING;
    let re_s = a / (2.0 * t);

    let mut partial = Vec::with_capacity(total + 1);
    let mut sum = 0.5 * eval(transform, Complex64::new(re_s, 0.0), t)?.re;
    partial.push(sum);
    for k in 1..=total {
        let s = Complex64::new(re_s, k as f64 * PI / t);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * eval(transform, s, t)?.re;
        partial.push(sum);
    }

    // binomial average of partial sums n..=n+EULER_AVERAGING
    let mut avg = 0.0;
    let mut binom = 1.0;
    for j in 0..=EULER_AVERAGING {
        avg += binom * partial[n + j];
        binom *= (EULER_AVERAGING - j) as f64 / (j + 1) as f64;
    }
    avg /= 2f64.powi(EULER_AVERAGING as i32);
    Ok(avg * (0.5 * a).exp() / t)
}
