//! Zero-forcing post-processing SINR and the Monte Carlo sum-rate estimator.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{
    compose_channel, sample_channel_with, ChannelMatrix, CorrelationSide, FadingParams,
    NakagamiComponent, SemiCorrelationMode,
};
use crate::correlation::{correlation_sqrt, CorrelationSpec, HermitianMatrix, PsdPolicy};
use crate::error::{Error, Result};
use crate::rng::stream;

/// Largest accepted 1-norm condition number of the Gram matrix `H*H`.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Fraction of trials allowed to hit a singular channel before the run aborts.
pub const MAX_SINGULAR_FRACTION: f64 = 1e-3;

const CHUNK: usize = 512;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One point of the system model.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    n_t: usize,
    n_r: usize,
    snr_db: f64,
    fading: FadingParams,
    correlation: CorrelationSpec,
    mode: SemiCorrelationMode,
    trials: usize,
    seed: u64,
}

impl SystemConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_t: usize,
        n_r: usize,
        snr_db: f64,
        fading: FadingParams,
        correlation: CorrelationSpec,
        side: CorrelationSide,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        if n_t == 0 || n_r == 0 {
            return Err(Error::Config(format!(
                "antenna counts must be >= 1, got n_t={n_t}, n_r={n_r}"
            )));
        }
        if n_r < n_t {
            return Err(Error::Config(format!(
                "zero-forcing needs n_r >= n_t, got n_t={n_t}, n_r={n_r}"
            )));
        }
        if !snr_db.is_finite() {
            return Err(Error::Config(format!(
                "snr_db must be finite, got {snr_db}"
            )));
        }
        if trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        let mode = SemiCorrelationMode::new(side, n_t, n_r);
        let need = mode.correlated_dim(n_t, n_r);
        if correlation.n() != need {
            return Err(Error::Config(format!(
                "correlation dimension {} does not match the {side:?} side with {need} antennas",
                correlation.n()
            )));
        }
        Ok(Self {
            n_t,
            n_r,
            snr_db,
            fading,
            correlation,
            mode,
            trials,
            seed,
        })
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    /// Active users; every transmit antenna carries one user's stream.
    pub fn n_users(&self) -> usize {
        self.n_t
    }

    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    pub fn snr_linear(&self) -> f64 {
        db_to_linear(self.snr_db)
    }

    pub fn fading(&self) -> FadingParams {
        self.fading
    }

    pub fn correlation(&self) -> &CorrelationSpec {
        &self.correlation
    }

    pub fn mode(&self) -> SemiCorrelationMode {
        self.mode
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.snr_db = snr_db;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials.max(1);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Per-user SINR draws, one array per user, each of length `trials`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrSampleSet {
    samples: Vec<Vec<f64>>,
}

impl SinrSampleSet {
    pub fn new(samples: Vec<Vec<f64>>) -> Result<Self> {
        let trials = samples.first().map_or(0, Vec::len);
        if samples.is_empty() || trials == 0 {
            return Err(Error::Shape(
                "sample set needs at least one user and one trial".into(),
            ));
        }
        if samples.iter().any(|u| u.len() != trials) {
            return Err(Error::Shape(
                "per-user sample arrays differ in length".into(),
            ));
        }
        if samples
            .iter()
            .flatten()
            .any(|&x| !(x.is_finite() && x > 0.0))
        {
            return Err(Error::Numerical(
                "SINR samples must be positive and finite".into(),
            ));
        }
        Ok(Self { samples })
    }

    pub fn n_users(&self) -> usize {
        self.samples.len()
    }

    pub fn trials(&self) -> usize {
        self.samples[0].len()
    }

    pub fn user(&self, k: usize) -> &[f64] {
        &self.samples[k]
    }

    pub fn users(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.iter().map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsrcResult {
    pub esrc_mc: f64,
    pub std_err: f64,
    pub esrc_analytic: Option<f64>,
    pub betas: Option<Vec<f64>>,
    pub trials: usize,
    /// Draws rejected as singular and replaced.
    pub resampled: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    StrictSequential,
}

/// `SINR_k = snr / [(H*H)^{-1}]_{kk}` for each user `k`.
pub fn zf_sinr(h: &ChannelMatrix, snr: f64) -> Result<Vec<f64>> {
    if !(snr.is_finite() && snr > 0.0) {
        return Err(Error::domain(
            "zf_sinr",
            format!("snr must be > 0, got {snr}"),
        ));
    }
    if h.n_r() < h.n_t() {
        return Err(Error::Shape(format!(
            "zero-forcing needs n_r >= n_t, got {}x{}",
            h.n_r(),
            h.n_t()
        )));
    }
    let inv_diag = gram_inverse_diagonal(h.as_matrix())?;
    Ok(inv_diag.into_iter().map(|d| snr / d).collect())
}

fn gram_inverse_diagonal(h: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let gram = h.ad_mul(h);
    let singular = |condition| Error::SingularChannel {
        condition,
        limit: MAX_GRAM_CONDITION,
    };
    let inv = gram
        .clone()
        .cholesky()
        .ok_or_else(|| singular(f64::INFINITY))?
        .inverse();
    let condition = one_norm(&gram) * one_norm(&inv);
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(singular(condition));
    }
    let diag: Vec<f64> = (0..inv.nrows()).map(|k| inv[(k, k)].re).collect();
    if diag.iter().any(|&d| !(d.is_finite() && d > 0.0)) {
        return Err(singular(condition));
    }
    Ok(diag)
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `Σ_k log₂(1 + sinr_k)`.
pub fn sum_rate(sinr: &[f64]) -> f64 {
    sinr.iter().map(|&g| g.ln_1p()).sum::<f64>() / std::f64::consts::LN_2
}

pub fn monte_carlo_esrc(
    config: &SystemConfig,
    trials: usize,
    seed: u64,
) -> Result<(EsrcResult, SinrSampleSet)> {
    monte_carlo_esrc_with(config, trials, seed, Execution::Parallel)
}

/// Monte Carlo estimate of the ergodic sum rate. Trial `t` draws from the
/// sub-stream `(seed, t, attempt)`, so the output does not depend on `exec`.
pub fn monte_carlo_esrc_with(
    config: &SystemConfig,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<(EsrcResult, SinrSampleSet)> {
    if trials == 0 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    let root = correlation_sqrt(&config.correlation, PsdPolicy::Error)?;
    let job = TrialJob {
        n_t: config.n_t,
        n_r: config.n_r,
        snr: config.snr_linear(),
        component: NakagamiComponent::new(&config.fading),
        root,
        mode: config.mode,
        seed,
        max_singular: (MAX_SINGULAR_FRACTION * trials as f64).floor() as usize,
    };

    let chunks: Vec<(usize, usize)> = (0..trials)
        .step_by(CHUNK)
        .map(|start| (start, (start + CHUNK).min(trials)))
        .collect();
    let run = |&(a, b): &(usize, usize)| job.run_range(a, b);
    let outcomes: Vec<Result<ChunkOutcome>> = match exec {
        Execution::Parallel => chunks.par_iter().map(run).collect(),
        Execution::StrictSequential => chunks.iter().map(run).collect(),
    };

    let n = config.n_t;
    let mut samples = vec![Vec::with_capacity(trials); n];
    let mut rates = Vec::with_capacity(trials);
    let mut resampled = 0;
    for outcome in outcomes {
        let outcome = outcome?;
        resampled += outcome.singular;
        for row in outcome.sinr.chunks_exact(n) {
            for (user, &g) in samples.iter_mut().zip(row) {
                user.push(g);
            }
            rates.push(sum_rate(row));
        }
    }
    if resampled > job.max_singular {
        return Err(Error::TooManySingular {
            singular: resampled,
            trials,
            limit: job.max_singular,
        });
    }

    let (mean, std_err) = mean_and_stderr(&rates);
    let result = EsrcResult {
        esrc_mc: mean,
        std_err,
        esrc_analytic: None,
        betas: None,
        trials,
        resampled,
    };
    Ok((result, SinrSampleSet::new(samples)?))
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

struct TrialJob {
    n_t: usize,
    n_r: usize,
    snr: f64,
    component: NakagamiComponent,
    root: HermitianMatrix,
    mode: SemiCorrelationMode,
    seed: u64,
    max_singular: usize,
}

struct ChunkOutcome {
    sinr: Vec<f64>,
    singular: usize,
}

impl TrialJob {
    fn run_range(&self, start: usize, end: usize) -> Result<ChunkOutcome> {
        let mut sinr = Vec::with_capacity((end - start) * self.n_t);
        let mut singular = 0;
        for trial in start..end {
            let mut attempt = 0u64;
            loop {
                let mut rng = stream(self.seed, &[trial as u64, attempt]);
                let h_w = sample_channel_with(self.n_r, self.n_t, &self.component, &mut rng);
                let h = compose_channel(&h_w, &self.root, self.mode)?;
                match zf_sinr(&h, self.snr) {
                    Ok(g) => {
                        sinr.extend(g);
                        break;
                    }
                    Err(Error::SingularChannel { .. }) => {
                        singular += 1;
                        attempt += 1;
                        if singular > self.max_singular {
                            return Ok(ChunkOutcome { sinr, singular });
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(ChunkOutcome { sinr, singular })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(rows: usize, cols: usize, data: &[Complex64]) -> ChannelMatrix {
        ChannelMatrix::from_matrix(DMatrix::from_row_slice(rows, cols, data)).unwrap()
    }

    #[test]
    fn scalar_channel() {
        let h = cm(1, 1, &[Complex64::new(1.0, 0.0)]);
        assert_eq!(zf_sinr(&h, 5.0).unwrap(), vec![5.0]);
    }

    #[test]
    fn diagonal_channel() {
        let d = [Complex64::new(0.5, 0.5), Complex64::new(0.0, 2.0)];
        let h = cm(
            2,
            2,
            &[
                d[0],
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                d[1],
            ],
        );
        let g = zf_sinr(&h, 3.0).unwrap();
        assert!((g[0] - 3.0 * 0.5).abs() < 1e-14);
        assert!((g[1] - 3.0 * 4.0).abs() < 1e-14);
    }

    #[test]
    fn unitary_channel() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = cm(
            2,
            2,
            &[
                Complex64::new(s, 0.0),
                Complex64::new(0.0, s),
                Complex64::new(0.0, s),
                Complex64::new(s, 0.0),
            ],
        );
        for g in zf_sinr(&h, 7.0).unwrap() {
            assert!((g - 7.0).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_and_shape_errors() {
        let one = Complex64::new(1.0, 0.0);
        let h = cm(2, 2, &[one, one, one, one]);
        assert!(matches!(
            zf_sinr(&h, 1.0),
            Err(Error::SingularChannel { .. })
        ));
        let h = cm(2, 2, &[one, one, one, one + 1e-14]);
        assert!(matches!(
            zf_sinr(&h, 1.0),
            Err(Error::SingularChannel { .. })
        ));
        let wide = cm(1, 2, &[one, one]);
        assert!(matches!(zf_sinr(&wide, 1.0), Err(Error::Shape(_))));
        assert!(zf_sinr(&cm(1, 1, &[one]), 0.0).is_err());
    }

    #[test]
    fn sum_rate_examples() {
        assert!((sum_rate(&[1.0]) - 1.0).abs() < 1e-15);
        assert!((sum_rate(&[3.0, 3.0]) - 4.0).abs() < 1e-15);
        assert!((sum_rate(&[0.5, 1.0, 7.0]) - 4.584_962_500_721_156).abs() < 1e-14);
    }

    #[test]
    fn config_validation() {
        let f = FadingParams::new(1.0, 1.0).unwrap();
        let c4 = CorrelationSpec::full(4, 0.3).unwrap();
        assert!(SystemConfig::new(4, 2, 0.0, f, c4, CorrelationSide::Transmit, 10, 1).is_err());
        assert!(SystemConfig::new(2, 4, 0.0, f, c4, CorrelationSide::Transmit, 10, 1).is_err());
        assert!(SystemConfig::new(2, 4, 0.0, f, c4, CorrelationSide::Receive, 10, 1).is_ok());
        assert!(SystemConfig::new(4, 4, 0.0, f, c4, CorrelationSide::Transmit, 0, 1).is_err());
    }
}
