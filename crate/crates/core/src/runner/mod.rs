//! Parameter sweeps over the system model and their CSV output.

mod config;
mod output;

pub use crate::zf::SystemConfig;
pub use config::{
    parse_config, parse_config_with, Axis, Param, ParseOptions, Preset, SweepPlan, DEFAULT_TRIALS,
    RHO_MAX,
};
pub use output::{emit_csv, format_sig, read_csv, write_csv, write_gnuplot_data, CSV_HEADER};

use rayon::prelude::*;

use crate::analytic::{esrc_closed_form, BetaVector};
use crate::channel::FadingParams;
use crate::correlation::CorrelationSpec;
use crate::error::Result;
use crate::rng::derive_seed;
use crate::statfit::{fit_exponential, fit_gamma_ml};
use crate::zf::{monte_carlo_esrc_with, Execution};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Also fit the full gamma law per user and run the GoF gates.
    pub full_fit: bool,
    pub execution: Execution,
}

/// Parameter values of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub snr_db: f64,
    pub rho: f64,
    pub l_band: usize,
    pub m: f64,
    pub omega: f64,
}

impl PointParams {
    fn from_base(base: &SystemConfig) -> Self {
        Self {
            snr_db: base.snr_db(),
            rho: base.correlation().rho(),
            l_band: base.correlation().l_band(),
            m: base.fading().m(),
            omega: base.fading().omega(),
        }
    }

    fn set(&mut self, param: Param, v: f64) {
        match param {
            Param::SnrDb => self.snr_db = v,
            Param::Rho => self.rho = v,
            Param::LBand => self.l_band = v as usize,
            Param::M => self.m = v,
            Param::Omega => self.omega = v,
        }
    }

    /// Seed of this point: a function of the master seed and the point's own
    /// values only, so other axis values never shift it.
    pub fn seed(&self, master: u64) -> u64 {
        derive_seed(
            master,
            &[
                self.snr_db.to_bits(),
                self.rho.to_bits(),
                self.l_band as u64,
                self.m.to_bits(),
                self.omega.to_bits(),
            ],
        )
    }

    fn config(&self, base: &SystemConfig, seed: u64) -> Result<SystemConfig> {
        let n = base.correlation().n();
        SystemConfig::new(
            base.n_t(),
            base.n_r(),
            self.snr_db,
            FadingParams::new(self.m, self.omega)?,
            CorrelationSpec::new(n, self.rho, self.l_band)?,
            base.mode().side(),
            base.trials(),
            seed,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointMetrics {
    pub esrc_mc: f64,
    pub std_err: f64,
    pub esrc_analytic: f64,
    pub rel_err: f64,
    pub betas: Vec<f64>,
    /// Present only with the full gamma fit.
    pub alpha_mean: Option<f64>,
    pub gof_pass_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointOutcome {
    Ok(PointMetrics),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: PointParams,
    pub trials: usize,
    pub seed: u64,
    pub outcome: PointOutcome,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn all_ok(&self) -> bool {
        self.rows
            .iter()
            .all(|r| matches!(r.outcome, PointOutcome::Ok(_)))
    }

    pub fn failures(&self) -> impl Iterator<Item = (&SweepRow, &str)> {
        self.rows.iter().filter_map(|r| match &r.outcome {
            PointOutcome::Failed(why) => Some((r, why.as_str())),
            PointOutcome::Ok(_) => None,
        })
    }
}

impl SweepPlan {
    /// Every point of the axes' Cartesian product; the first axis varies slowest.
    pub fn points(&self) -> Vec<PointParams> {
        let mut points = vec![PointParams::from_base(&self.base)];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.values.iter().map(move |&v| {
                        let mut q = p;
                        q.set(axis.param, v);
                        q
                    })
                })
                .collect();
        }
        points
    }
}

pub fn run_sweep(plan: &SweepPlan, opts: RunOptions) -> SweepTable {
    let points = plan.points();
    let run = |p: &PointParams| run_point(plan, *p, opts);
    let rows = match opts.execution {
        Execution::Parallel => points.par_iter().map(run).collect(),
        Execution::StrictSequential => points.iter().map(run).collect(),
    };
    SweepTable { rows }
}

fn run_point(plan: &SweepPlan, params: PointParams, opts: RunOptions) -> SweepRow {
    let seed = params.seed(plan.base.seed());
    let trials = plan.base.trials();
    let outcome = match evaluate_point(plan, params, seed, opts) {
        Ok(m) => PointOutcome::Ok(m),
        Err(e) => PointOutcome::Failed(e.to_string()),
    };
    SweepRow {
        params,
        trials,
        seed,
        outcome,
    }
}

fn evaluate_point(
    plan: &SweepPlan,
    params: PointParams,
    seed: u64,
    opts: RunOptions,
) -> Result<PointMetrics> {
    let cfg = params.config(&plan.base, seed)?;
    let (mc, samples) = monte_carlo_esrc_with(&cfg, cfg.trials(), seed, opts.execution)?;
    let betas = samples
        .users()
        .map(fit_exponential)
        .collect::<Result<Vec<_>>>()?;
    let esrc_analytic = esrc_closed_form(&BetaVector::new(betas.clone())?)?;
    let (alpha_mean, gof_pass_rate) = if opts.full_fit {
        let fits = samples
            .users()
            .map(fit_gamma_ml)
            .collect::<Result<Vec<_>>>()?;
        let n = fits.len() as f64;
        let alpha = fits.iter().map(|f| f.alpha).sum::<f64>() / n;
        let pass = fits.iter().filter(|f| f.gates_pass()).count() as f64 / n;
        (Some(alpha), Some(pass))
    } else {
        (None, None)
    };
    Ok(PointMetrics {
        esrc_mc: mc.esrc_mc,
        std_err: mc.std_err,
        esrc_analytic,
        rel_err: (mc.esrc_mc - esrc_analytic).abs() / esrc_analytic,
        betas,
        alpha_mean,
        gof_pass_rate,
    })
}
