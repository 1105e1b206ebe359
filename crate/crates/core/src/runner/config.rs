//! Sweep configuration documents.
//!
//! A document is TOML with scalar keys for the base system and one
//! `[sweep.<param>]` table per swept parameter:
//!
//! ```toml
//! n_t = 8
//! snr_db = 10
//! m = 0.7
//! rho = 0.3
//!
//! [sweep.snr_db]
//! start = 0
//! stop = 20
//! step = 1
//!
//! [sweep.m]
//! values = [0.7, 2.5]
//! ```
//!
//! | key       | type    | default            | range                                   |
//! |-----------|---------|--------------------|-----------------------------------------|
//! | `preset`  | string  | none               | `fig1`, `fig2`, `fig3`, `none`          |
//! | `n_t`     | integer | required           | `>= 1`                                  |
//! | `n_r`     | integer | `n_t`              | `>= n_t`                                |
//! | `side`    | string  | `transmit`         | `transmit`, `receive`                   |
//! | `snr_db`  | real    | required           | finite                                  |
//! | `m`       | real    | required           | `> 0`                                   |
//! | `omega`   | real    | `1`                | `> 0`                                   |
//! | `rho`     | real    | required           | `[0, 0.5]`, or `[0, 1)` when extended   |
//! | `l_band`  | integer | `n - 1` (full)     | `0 ..= n - 1`                           |
//! | `trials`  | integer | `100000`           | `>= 1`                                  |
//! | `seed`    | integer | `0`                | `0 ..= 2^64 - 1` (strings accepted)     |
//!
//! `n` is the antenna count on the correlated side. A key is not required
//! when its parameter is swept or set by the preset. A preset fixes the
//! sweep axes (any user axis other than `omega` is replaced) and supplies
//! defaults for base keys; explicit base keys still win.

use std::fmt;
use std::str::FromStr;

use toml::{Table, Value};

use crate::channel::{CorrelationSide, FadingParams};
use crate::correlation::CorrelationSpec;
use crate::error::{Error, Result};
use crate::zf::SystemConfig;

pub const DEFAULT_TRIALS: usize = 100_000;
pub const RHO_MAX: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    LBand,
    M,
    Omega,
    Rho,
    SnrDb,
}

impl Param {
    /// In lexicographic order of their names, which is also the sweep nesting order.
    pub const ALL: [Param; 5] = [
        Param::LBand,
        Param::M,
        Param::Omega,
        Param::Rho,
        Param::SnrDb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::LBand => "l_band",
            Param::M => "m",
            Param::Omega => "omega",
            Param::Rho => "rho",
            Param::SnrDb => "snr_db",
        }
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown sweep parameter `{s}` (expected one of l_band, m, omega, rho, snr_db)"
                ))
            })
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
        }
    }

    /// Base values the preset assumes for keys it does not sweep.
    fn defaults(self) -> Vec<(&'static str, f64)> {
        let common = [("n_t", 8.0), ("omega", 1.0)];
        let own: &[(&str, f64)] = match self {
            Preset::Fig1 => &[("rho", 0.3), ("l_band", 7.0)],
            Preset::Fig2 => &[("snr_db", 10.0), ("rho", 0.4)],
            Preset::Fig3 => &[("snr_db", 10.0), ("l_band", 3.0)],
        };
        common.iter().chain(own).copied().collect()
    }

    fn axes(self) -> Vec<Axis> {
        let m = Axis::new(Param::M, vec![0.7, 2.5]);
        match self {
            Preset::Fig1 => vec![
                m,
                Axis::new(Param::SnrDb, (0..=20).map(f64::from).collect()),
            ],
            Preset::Fig2 => vec![Axis::new(Param::LBand, (1..=7).map(f64::from).collect()), m],
            Preset::Fig3 => vec![
                m,
                Axis::new(Param::Rho, (0..=5).map(|i| 0.1 * f64::from(i)).collect()),
            ],
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            _ => Err(Error::Config(format!(
                "unknown preset `{s}` (expected fig1, fig2, fig3 or none)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(param: Param, values: Vec<f64>) -> Self {
        Self { param, values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub base: SystemConfig,
    /// Sorted by parameter name; the first axis is the outermost loop.
    pub axes: Vec<Axis>,
    pub preset: Option<Preset>,
    pub allow_extended: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Widen the `rho` range from `[0, 0.5]` to `[0, 1)`.
    pub allow_extended: bool,
    /// Replaces the document's `preset` key.
    pub preset: Option<Preset>,
}

pub fn parse_config(text: &str) -> Result<SweepPlan> {
    parse_config_with(text, ParseOptions::default())
}

const BASE_KEYS: [&str; 11] = [
    "preset", "n_t", "n_r", "side", "snr_db", "m", "omega", "rho", "l_band", "trials", "seed",
];

pub fn parse_config_with(text: &str, opts: ParseOptions) -> Result<SweepPlan> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| {
        Error::Config(format!("malformed document: {}", e.message()))
    })?;
    for key in doc.keys() {
        if key != "sweep" && !BASE_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
    }

    let preset = match opts.preset {
        Some(p) => Some(p),
        None => match doc.get("preset") {
            None => None,
            Some(v) => match expect_str("preset", v)? {
                "none" => None,
                s => Some(s.parse()?),
            },
        },
    };

    let mut axes = parse_axes(doc.get("sweep"))?;
    if let Some(p) = preset {
        axes.retain(|a| a.param == Param::Omega);
        axes.extend(p.axes());
    }
    axes.sort_by_key(|a| a.param);
    let swept = |p: Param| axes.iter().find(|a| a.param == p);

    let defaults = preset.map(Preset::defaults).unwrap_or_default();
    let preset_default = |key: &str| defaults.iter().find(|(k, _)| *k == key).map(|&(_, v)| v);
    let real = |key: &'static str, fallback: Option<f64>| -> Result<Option<f64>> {
        match doc.get(key) {
            Some(v) => expect_real(key, v).map(Some),
            None => Ok(preset_default(key).or(fallback)),
        }
    };
    let int = |key: &'static str| -> Result<Option<u64>> {
        match doc.get(key) {
            Some(v) => expect_uint(key, v).map(Some),
            None => Ok(preset_default(key).map(|v| v as u64)),
        }
    };
    let first_of = |p: Param| swept(p).map(|a| a.values[0]);
    let required = |key: &'static str, v: Option<f64>| {
        v.ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    };

    let n_t =
        int("n_t")?.ok_or_else(|| Error::Config("missing required key `n_t`".into()))? as usize;
    if n_t == 0 {
        return Err(Error::Config("n_t out of range [1, inf): got 0".into()));
    }
    let n_r = int("n_r")?.map_or(n_t, |v| v as usize);
    if n_r < n_t {
        return Err(Error::Config(format!(
            "n_r out of range [n_t, inf) = [{n_t}, inf): got {n_r}"
        )));
    }
    let side = match doc.get("side") {
        None => CorrelationSide::Transmit,
        Some(v) => match expect_str("side", v)? {
            "transmit" => CorrelationSide::Transmit,
            "receive" => CorrelationSide::Receive,
            s => {
                return Err(Error::Config(format!(
                    "side must be `transmit` or `receive`, got `{s}`"
                )))
            }
        },
    };
    let n = match side {
        CorrelationSide::Transmit => n_t,
        CorrelationSide::Receive => n_r,
    };
    let extended = opts.allow_extended;

    let snr_db = required("snr_db", real("snr_db", None)?.or(first_of(Param::SnrDb)))?;
    let m = required("m", real("m", None)?.or(first_of(Param::M)))?;
    let omega = required("omega", real("omega", Some(1.0))?)?;
    let rho = required("rho", real("rho", None)?.or(first_of(Param::Rho)))?;
    let l_band = match doc.get("l_band") {
        Some(v) => expect_uint("l_band", v)? as f64,
        None => preset_default("l_band")
            .or(first_of(Param::LBand))
            .unwrap_or((n - 1) as f64),
    };
    let trials = int("trials")?.map_or(DEFAULT_TRIALS, |v| v as usize);
    if trials == 0 {
        return Err(Error::Config("trials out of range [1, inf): got 0".into()));
    }
    let seed = match doc.get("seed") {
        None => 0,
        Some(Value::String(s)) => s.parse().map_err(|_| {
            Error::Config(format!(
                "seed must be an unsigned 64-bit integer, got `{s}`"
            ))
        })?,
        Some(v) => expect_uint("seed", v)?,
    };

    check_value(Param::SnrDb, snr_db, n, extended)?;
    check_value(Param::M, m, n, extended)?;
    check_value(Param::Omega, omega, n, extended)?;
    check_value(Param::Rho, rho, n, extended)?;
    check_value(Param::LBand, l_band, n, extended)?;
    for axis in &axes {
        for &v in &axis.values {
            check_value(axis.param, v, n, extended)?;
        }
    }

    let base = SystemConfig::new(
        n_t,
        n_r,
        snr_db,
        FadingParams::new(m, omega)?,
        CorrelationSpec::new(n, rho, l_band as usize)?,
        side,
        trials,
        seed,
    )?;
    Ok(SweepPlan {
        base,
        axes,
        preset,
        allow_extended: opts.allow_extended,
    })
}

fn parse_axes(sweep: Option<&Value>) -> Result<Vec<Axis>> {
    let Some(sweep) = sweep else {
        return Ok(Vec::new());
    };
    let Value::Table(sweep) = sweep else {
        return Err(Error::Config(
            "`sweep` must be a table of [sweep.<param>] sections".into(),
        ));
    };
    let mut axes = Vec::new();
    for (name, body) in sweep {
        let param: Param = name.parse()?;
        let key = format!("sweep.{name}");
        let Value::Table(body) = body else {
            return Err(Error::Config(format!("`{key}` must be a table")));
        };
        for k in body.keys() {
            if !["values", "start", "stop", "step"].contains(&k.as_str()) {
                return Err(Error::Config(format!("unknown key `{key}.{k}`")));
            }
        }
        let values = match (
            body.get("values"),
            body.get("start"),
            body.get("stop"),
            body.get("step"),
        ) {
            (Some(Value::Array(vs)), None, None, None) => vs
                .iter()
                .map(|v| expect_real(&format!("{key}.values"), v))
                .collect::<Result<Vec<_>>>()?,
            (Some(_), None, None, None) => {
                return Err(Error::Config(format!("`{key}.values` must be an array")))
            }
            (None, Some(a), Some(b), Some(s)) => range(
                &key,
                expect_real(&format!("{key}.start"), a)?,
                expect_real(&format!("{key}.stop"), b)?,
                expect_real(&format!("{key}.step"), s)?,
            )?,
            _ => {
                return Err(Error::Config(format!(
                    "`{key}` needs either `values` or all of `start`, `stop`, `step`"
                )))
            }
        };
        if values.is_empty() {
            return Err(Error::Config(format!("`{key}` has no values")));
        }
        if param == Param::LBand && values.iter().any(|v| v.fract() != 0.0) {
            return Err(Error::Config(format!("`{key}` values must be integers")));
        }
        axes.push(Axis::new(param, values));
    }
    Ok(axes)
}

fn range(key: &str, start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || stop < start {
        return Err(Error::Config(format!(
            "`{key}` needs step > 0 and stop >= start"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Error::Config(format!("`{key}` expands to {count} values")));
    }
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

fn check_value(param: Param, v: f64, n: usize, extended: bool) -> Result<()> {
    let bad = |range: &str| {
        Err(Error::Config(format!(
            "{param} out of range {range}: got {v}"
        )))
    };
    match param {
        Param::SnrDb if !v.is_finite() => bad("(-inf, inf)"),
        Param::M | Param::Omega if !(v.is_finite() && v > 0.0) => bad("(0, inf)"),
        Param::Rho if extended && !(0.0..1.0).contains(&v) => bad("[0, 1)"),
        Param::Rho if !extended && !(0.0..=RHO_MAX).contains(&v) => bad("[0, 0.5]"),
        Param::LBand if v.fract() != 0.0 || v < 0.0 => bad(&format!("[0, {}]", n - 1)),
        Param::LBand if v > (n - 1) as f64 => Err(Error::Config(format!(
            "l_band exceeds n-1 (l_band={v}, n={n})"
        ))),
        _ => Ok(()),
    }
}

fn expect_real(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        other => Err(Error::Config(format!(
            "`{key}` must be a number, got {}",
            other.type_str()
        ))),
    }
}

fn expect_uint(key: &str, v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        Value::Integer(i) => Err(Error::Config(format!(
            "{key} out of range [0, inf): got {i}"
        ))),
        other => Err(Error::Config(format!(
            "`{key}` must be an integer, got {}",
            other.type_str()
        ))),
    }
}

fn expect_str<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::Config(format!("`{key}` must be a string, got {}", v.type_str())))
}
