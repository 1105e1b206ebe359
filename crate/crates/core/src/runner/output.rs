//! CSV result tables and gnuplot data blocks.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::{Param, PointOutcome, SweepTable};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 14] = [
    "snr_db",
    "rho",
    "l_band",
    "m",
    "omega",
    "trials",
    "seed",
    "esrc_mc",
    "esrc_stderr",
    "esrc_analytic",
    "rel_err",
    "alpha_mean",
    "gof_pass_rate",
    "status",
];

/// `x` with 9 significant digits, trailing zeros dropped; scientific
/// notation outside `[1e-5, 1e9)`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..9).contains(&exp) {
        let s = format!("{x:.8e}");
        let (mantissa, e) = s.split_once('e').expect("exponent");
        return format!("{}e{e}", trim_zeros(mantissa));
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_csv<W: Write>(table: &SweepTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in &table.rows {
        let p = &row.params;
        let mut rec = vec![
            format_sig(p.snr_db),
            format_sig(p.rho),
            p.l_band.to_string(),
            format_sig(p.m),
            format_sig(p.omega),
            row.trials.to_string(),
            row.seed.to_string(),
        ];
        match &row.outcome {
            PointOutcome::Ok(m) => {
                let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
                rec.extend([
                    format_sig(m.esrc_mc),
                    format_sig(m.std_err),
                    format_sig(m.esrc_analytic),
                    format_sig(m.rel_err),
                    opt(m.alpha_mean),
                    opt(m.gof_pass_rate),
                    "ok".into(),
                ]);
            }
            PointOutcome::Failed(_) => {
                rec.extend(std::iter::repeat_n(String::new(), 6));
                rec.push("failed".into());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(Error::Write)
}

pub fn emit_csv(table: &SweepTable, destination: &Path) -> Result<()> {
    let file = File::create(destination).map_err(io_err(destination))?;
    let mut buf = BufWriter::new(file);
    write_csv(table, &mut buf).map_err(|e| match e {
        Error::Write(source) => io_err(destination)(source),
        other => other,
    })?;
    buf.flush().map_err(io_err(destination))
}

/// Records of a results CSV as header-keyed string maps, in file order.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<Vec<(String, String)>>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!(
            "unexpected CSV header: {}",
            header.join(",")
        )));
    }
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok(header
                .iter()
                .cloned()
                .zip(rec.iter().map(str::to_owned))
                .collect())
        })
        .collect()
}

/// Successful rows of a results CSV regrouped into gnuplot data blocks:
/// one block per combination of the non-`x` parameters, separated by two
/// blank lines (address them with `index`). Columns: `x esrc_mc esrc_stderr
/// esrc_analytic`.
pub fn write_gnuplot_data<R: Read, W: Write>(input: R, x: Param, mut out: W) -> Result<()> {
    let records = read_csv(input)?;
    let get = |rec: &[(String, String)], key: &str| -> String {
        rec.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .unwrap_or_default()
    };
    let others: Vec<&str> = ["snr_db", "rho", "l_band", "m", "omega"]
        .into_iter()
        .filter(|k| *k != x.name())
        .collect();

    let mut blocks: Vec<(String, Vec<(f64, String)>)> = Vec::new();
    for rec in records.iter().filter(|r| get(r, "status") == "ok") {
        let key = others
            .iter()
            .map(|k| format!("{k}={}", get(rec, k)))
            .collect::<Vec<_>>()
            .join(" ");
        let xv: f64 = get(rec, x.name())
            .parse()
            .map_err(|_| Error::Config(format!("column {x} is not numeric")))?;
        let line = format!(
            "{} {} {} {}",
            get(rec, x.name()),
            get(rec, "esrc_mc"),
            get(rec, "esrc_stderr"),
            get(rec, "esrc_analytic")
        );
        match blocks.iter_mut().find(|(k, _)| *k == key) {
            Some((_, lines)) => lines.push((xv, line)),
            None => blocks.push((key, vec![(xv, line)])),
        }
    }

    let wr = Error::Write;
    for (i, (key, mut lines)) in blocks.into_iter().enumerate() {
        if i > 0 {
            writeln!(out, "\n").map_err(wr)?;
        }
        lines.sort_by(|a, b| a.0.total_cmp(&b.0));
        writeln!(out, "# {key}").map_err(wr)?;
        writeln!(out, "# {x} esrc_mc esrc_stderr esrc_analytic").map_err(wr)?;
        for (_, line) in lines {
            writeln!(out, "{line}").map_err(wr)?;
        }
    }
    Ok(())
}
