use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mimo_esrc::analytic::{
    capacity_pdf, capacity_pdf_config, default_grid_max, uniform_grid, BetaVector,
};
use mimo_esrc::runner::{
    emit_csv, format_sig, parse_config_with, run_sweep, write_csv, write_gnuplot_data, Param,
    ParseOptions, Preset, RunOptions,
};
use mimo_esrc::zf::Execution;
use mimo_esrc::{Error, Result};

#[derive(Parser)]
#[command(
    name = "mimo-esrc",
    version,
    about = "Ergodic sum-rate capacity of zero-forcing MU-MIMO links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and write the result table as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// fig1, fig2 or fig3; replaces the document's preset.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fit the full gamma law per user and run the goodness-of-fit gates.
        #[arg(long)]
        full_fit: bool,
        /// Accept rho in [0, 1) instead of [0, 0.5].
        #[arg(long)]
        allow_extended: bool,
        /// Run points and trials on one thread.
        #[arg(long)]
        strict_sequential: bool,
    },
    /// Density of the sum capacity for given per-user SINR scales.
    Pdf {
        /// Comma-separated per-user scales, e.g. `1,2.5,10`.
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        /// Upper end of the grid in bits; chosen from the scales when omitted.
        #[arg(long)]
        grid_max: Option<f64>,
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regroup a results CSV into gnuplot data blocks along one parameter.
    Gnuplot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "snr_db")]
        x: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| {
            Error::Io {
                path: p.clone(),
                source,
            }
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Run {
            config,
            preset,
            trials,
            seed,
            out,
            full_fit,
            allow_extended,
            strict_sequential,
        } => {
            let opts = ParseOptions {
                allow_extended,
                preset: preset.as_deref().map(str::parse::<Preset>).transpose()?,
            };
            let mut plan = parse_config_with(&read(&config)?, opts)?;
            if let Some(t) = trials {
                if t == 0 {
                    return Err(Error::Config("--trials must be >= 1".into()));
                }
                plan.base = plan.base.with_trials(t);
            }
            if let Some(s) = seed {
                plan.base = plan.base.with_seed(s);
            }
            let execution = if strict_sequential {
                Execution::StrictSequential
            } else {
                Execution::Parallel
            };
            let table = run_sweep(
                &plan,
                RunOptions {
                    full_fit,
                    execution,
                },
            );
            match &out {
                Some(p) => emit_csv(&table, p)?,
                None => write_csv(&table, io::stdout().lock())?,
            }
            for (row, why) in table.failures() {
                eprintln!("point {:?} failed: {why}", row.params);
            }
            Ok(table.all_ok())
        }
        Command::Pdf {
            betas,
            grid_max,
            points,
            out,
        } => {
            let b = BetaVector::new(betas)?;
            let grid = uniform_grid(grid_max.unwrap_or_else(|| default_grid_max(&b)), points)?;
            let f = capacity_pdf(&b, &grid, &capacity_pdf_config())?;
            let mut w = open_out(&out)?;
            writeln!(w, "x,density").map_err(Error::Write)?;
            for (x, v) in grid.iter().zip(&f) {
                writeln!(w, "{},{}", format_sig(*x), format_sig(*v)).map_err(Error::Write)?;
            }
            w.flush().map_err(Error::Write)?;
            Ok(true)
        }
        Command::Gnuplot { input, x, out } => {
            let param: Param = x.parse()?;
            let file = File::open(&input).map_err(|source| Error::Io {
                path: input.clone(),
                source,
            })?;
            let mut w = open_out(&out)?;
            write_gnuplot_data(file, param, &mut w)?;
            w.flush().map_err(Error::Write)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
