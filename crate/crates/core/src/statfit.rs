//! Gamma and exponential maximum-likelihood fits with Pearson χ² and
//! Kolmogorov goodness-of-fit gates.
//!
//! Both gates use the plain asymptotic null distributions even though the
//! tested parameters were estimated from the same data, so they are somewhat
//! anticonservative (no Lilliefors-type correction).

use crate::error::{Error, Result};
use crate::specfun::{digamma, ln_gamma, regularized_gamma_p, trigamma};

pub const CHI2_BINS: usize = 20;
pub const DEFAULT_LEVEL: f64 = 0.05;
pub const MIN_FIT_SAMPLES: usize = 100;
pub const MIN_CHI2_SAMPLES: usize = 200;
pub const MIN_KS_SAMPLES: usize = 50;
const MAX_NEWTON_ITERS: usize = 200;
const SHAPE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GammaFit {
    pub alpha: f64,
    pub beta: f64,
    pub log_likelihood: f64,
    pub chi2_pass: bool,
    pub ks_pass: bool,
    /// `NaN` when there were too few samples to run the test.
    pub chi2_stat: f64,
    pub ks_stat: f64,
}

impl GammaFit {
    pub fn cdf(&self, x: f64) -> f64 {
        gamma_cdf(self.alpha, self.beta, x)
    }

    pub fn gates_pass(&self) -> bool {
        self.chi2_pass && self.ks_pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareOutcome {
    pub stat: f64,
    pub dof: usize,
    pub critical: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub stat: f64,
    pub critical: f64,
    pub pass: bool,
}

pub fn gamma_cdf(alpha: f64, beta: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    regularized_gamma_p(alpha, x / beta).unwrap_or(f64::NAN)
}

fn check_samples(func: &'static str, samples: &[f64], min: usize) -> Result<()> {
    if samples.len() < min {
        return Err(Error::domain(
            func,
            format!("need at least {min} samples, got {}", samples.len()),
        ));
    }
    if let Some(x) = samples.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::domain(
            func,
            format!("samples must be positive and finite, found {x}"),
        ));
    }
    Ok(())
}

/// Shape and scale maximizing the gamma likelihood, with both GoF gates
/// evaluated at [`DEFAULT_LEVEL`].
pub fn fit_gamma_ml(samples: &[f64]) -> Result<GammaFit> {
    check_samples("fit_gamma_ml", samples, MIN_FIT_SAMPLES)?;
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let mean_log = samples.iter().map(|x| x.ln()).sum::<f64>() / n;
    let s = mean.ln() - mean_log;
    if !(s > 1e-14) {
        return Err(Error::Fit(format!(
            "degenerate sample: ln(mean) - mean(ln) = {s:e}, shape estimate diverges"
        )));
    }

    let mut alpha = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_NEWTON_ITERS {
        residual = alpha.ln() - digamma(alpha)? - s;
        if residual.abs() < SHAPE_TOL {
            break;
        }
        let slope = 1.0 / alpha - trigamma(alpha)?;
        let mut next = alpha - residual / slope;
        if !(next > 0.0) || !next.is_finite() {
            next = 0.5 * alpha;
        }
        alpha = next;
    }
    if !(residual.abs() < SHAPE_TOL) {
        return Err(Error::Fit(format!(
            "shape equation did not converge in {MAX_NEWTON_ITERS} iterations, residual {residual:e}"
        )));
    }
    let beta = mean / alpha;
    let log_likelihood =
        (alpha - 1.0) * n * mean_log - n * mean / beta - n * (ln_gamma(alpha)? + alpha * beta.ln());

    let cdf = |x: f64| gamma_cdf(alpha, beta, x);
    let (chi2_stat, chi2_pass) = if samples.len() >= MIN_CHI2_SAMPLES {
        let c = chi_square_gof(samples, cdf, 2, DEFAULT_LEVEL)?;
        (c.stat, c.pass)
    } else {
        (f64::NAN, false)
    };
    let ks = ks_gof(samples, cdf, DEFAULT_LEVEL)?;
    Ok(GammaFit {
        alpha,
        beta,
        log_likelihood,
        chi2_pass,
        ks_pass: ks.pass,
        chi2_stat,
        ks_stat: ks.stat,
    })
}

/// Scale of the exponential law (gamma with shape fixed at 1): the sample mean.
pub fn fit_exponential(samples: &[f64]) -> Result<f64> {
    check_samples("fit_exponential", samples, 1)?;
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// Pearson χ² over [`CHI2_BINS`] bins that are equiprobable under `cdf`.
pub fn chi_square_gof(
    samples: &[f64],
    cdf: impl Fn(f64) -> f64,
    fitted_param_count: usize,
    level: f64,
) -> Result<ChiSquareOutcome> {
    check_level("chi_square_gof", level)?;
    if samples.len() < MIN_CHI2_SAMPLES {
        return Err(Error::Binning(format!(
            "need at least {MIN_CHI2_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let expected = samples.len() as f64 / CHI2_BINS as f64;
    if expected < 5.0 {
        return Err(Error::Binning(format!(
            "expected bin count {expected} is below 5"
        )));
    }
    if fitted_param_count + 1 >= CHI2_BINS {
        return Err(Error::domain(
            "chi_square_gof",
            "too many fitted parameters for the bin count",
        ));
    }
    let mut counts = [0usize; CHI2_BINS];
    for &x in samples {
        let u = cdf(x);
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Numerical(format!("cdf returned {u} at x = {x}")));
        }
        counts[((u * CHI2_BINS as f64) as usize).min(CHI2_BINS - 1)] += 1;
    }
    let stat = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dof = CHI2_BINS - 1 - fitted_param_count;
    let critical = chi_square_quantile(dof, 1.0 - level)?;
    Ok(ChiSquareOutcome {
        stat,
        dof,
        critical,
        pass: stat < critical,
    })
}

/// Kolmogorov test: sup-distance between the empirical cdf and `cdf`.
pub fn ks_gof(samples: &[f64], cdf: impl Fn(f64) -> f64, level: f64) -> Result<KsOutcome> {
    check_level("ks_gof", level)?;
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::domain(
            "ks_gof",
            format!(
                "need at least {MIN_KS_SAMPLES} samples, got {}",
                samples.len()
            ),
        ));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut stat: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Numerical(format!("cdf returned {f} at x = {x}")));
        }
        stat = stat.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let critical = kolmogorov_quantile(1.0 - level) / n.sqrt();
    Ok(KsOutcome {
        stat,
        critical,
        pass: stat < critical,
    })
}

fn check_level(func: &'static str, level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(
            func,
            format!("level must lie in (0, 1), got {level}"),
        ));
    }
    Ok(())
}

/// Quantile of the chi-squared law with `dof` degrees of freedom.
pub fn chi_square_quantile(dof: usize, p: f64) -> Result<f64> {
    if dof == 0 || !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(
            "chi_square_quantile",
            format!("need dof >= 1 and p in (0, 1), got {dof}, {p}"),
        ));
    }
    let k = 0.5 * dof as f64;
    let cdf = |x: f64| regularized_gamma_p(k, 0.5 * x);
    let mut hi = dof as f64 + 10.0;
    while cdf(hi)? < p {
        hi *= 2.0;
    }
    bisect(0.0, hi, |x| Ok(cdf(x)? - p))
}

/// Quantile of the asymptotic Kolmogorov distribution of `√n·D`.
pub fn kolmogorov_quantile(p: f64) -> f64 {
    let cdf = |c: f64| {
        let mut acc = 0.0;
        for k in 1..=100 {
            let term = (-2.0 * (k * k) as f64 * c * c).exp();
            acc += if k % 2 == 1 { term } else { -term };
            if term < 1e-18 {
                break;
            }
        }
        1.0 - 2.0 * acc
    };
    bisect(0.2, 5.0, |c| Ok(cdf(c) - p)).expect("bracketed")
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
