//! Gamma-family functions on the positive real axis.
//!
//! The upper incomplete gamma function is the workhorse here. Every public
//! entry point is built on one of three evaluation paths:
//!
//! - a Lentz continued fraction when `x >= 1` and either `s < 1` or `x >= s + 1`,
//! - `Γ(s) - γ(s, x)` with the lower series when `s >= 1` and `x < s + 1`,
//! - a cancellation-free small-`x` expansion for `s < 1, x < 1`, extended to
//!   `s <= -1` by downward recurrence.
//!
//! The scaled variant `e^x x^(-s) Γ(s, x)` never forms `e^x` on its own, so it
//! stays finite for arguments where `Γ(s, x)` itself underflows.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Lowest order supported by the incomplete gamma routines.
pub const MIN_ORDER: f64 = -20.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// Taylor coefficients of 1/Γ(1+s) around s = 0, i.e. 1/Γ(1+s) = Σ c_k s^k.
const RECIP_GAMMA_COEF: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 20_000;

fn check_positive(func: &'static str, name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            func,
            format!("{name} must be finite and > 0, got {v}"),
        ))
    }
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_positive("ln_gamma", "x", x)?;
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `(Γ(1+s) - 1) / s` for `|s| < 1`, with the `s -> 0` limit `-γ`.
fn gamma1pm1_over_s(s: f64) -> f64 {
    // 1/Γ(1+s) = 1 + s·T(s)  =>  (Γ(1+s) - 1)/s = -T / (1 + s·T)
    let mut t = 0.0;
    for c in RECIP_GAMMA_COEF[1..].iter().rev() {
        t = t * s + c;
    }
    -t / (1.0 + s * t)
}

/// Lentz continued fraction for `e^x x^(-s) Γ(s, x)`.
fn cf_scaled(s: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::Numerical(format!(
        "incomplete gamma continued fraction did not converge for s={s}, x={x}"
    )))
}

/// `Σ_n x^n / (s (s+1) ... (s+n))`, so that `γ(s, x) = x^s e^-x · sum`.
fn lower_series(s: f64, x: f64) -> Result<f64> {
    let mut term = 1.0 / s;
    let mut sum = term;
    for n in 1..MAX_ITER {
        term *= x / (s + n as f64);
        sum += term;
        if term.abs() < sum.abs() * EPS {
            return Ok(sum);
        }
    }
    Err(Error::Numerical(format!(
        "lower incomplete gamma series did not converge for s={s}, x={x}"
    )))
}

/// Unscaled `Γ(s, x)` for `x < 1`, `s < 1`.
fn small_x(s: f64, x: f64) -> f64 {
    let steps = if s <= 0.0 { (-s).floor() } else { 0.0 };
    let base = s + steps;
    let ln_x = x.ln();

    // Γ(base) - x^base/base, written so that neither piece blows up as base -> 0
    let x_pow_m1 = if base == 0.0 {
        ln_x
    } else {
        (base * ln_x).exp_m1() / base
    };
    let head = gamma1pm1_over_s(base) - x_pow_m1;

    // remaining part of -γ(base, x): -x^base Σ_{k>=1} (-x)^k / (k! (base+k))
    let mut tail = 0.0;
    let mut fact_term = 1.0;
    for k in 1..200 {
        fact_term *= -x / k as f64;
        let add = fact_term / (base + k as f64);
        tail += add;
        if add.abs() < EPS * tail.abs() {
            break;
        }
    }
    let mut value = head - (base * ln_x).exp() * tail;

    // Γ(a-1, x) = (Γ(a, x) - x^(a-1) e^-x) / (a-1)
    let mut a = base;
    for _ in 0..steps as usize {
        let am1 = a - 1.0;
        value = (value - (am1 * ln_x - x).exp()) / am1;
        a = am1;
    }
    value
}

fn check_order(func: &'static str, s: f64) -> Result<()> {
    if s.is_finite() && s > MIN_ORDER {
        Ok(())
    } else {
        Err(Error::domain(
            func,
            format!("order s must be finite and > {MIN_ORDER}, got {s}"),
        ))
    }
}

fn use_cf(s: f64, x: f64) -> bool {
    x >= 1.0 && (s < 1.0 || x >= s + 1.0)
}

/// Upper incomplete gamma `Γ(s, x) = ∫_x^∞ t^(s-1) e^-t dt` for `x > 0`, `s > -20`.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    check_positive("upper_incomplete_gamma", "x", x)?;
    check_order("upper_incomplete_gamma", s)?;
    let prefactor = (s * x.ln() - x).exp();
    if use_cf(s, x) {
        Ok(prefactor * cf_scaled(s, x)?)
    } else if s >= 1.0 {
        Ok(ln_gamma_unchecked(s).exp() - prefactor * lower_series(s, x)?)
    } else {
        Ok(small_x(s, x))
    }
}

/// `e^x x^(-s) Γ(s, x)`, evaluated without forming `e^x` separately.
pub fn upper_incomplete_gamma_scaled(s: f64, x: f64) -> Result<f64> {
    check_positive("upper_incomplete_gamma_scaled", "x", x)?;
    check_order("upper_incomplete_gamma_scaled", s)?;
    if use_cf(s, x) {
        cf_scaled(s, x)
    } else if s >= 1.0 {
        Ok((x - s * x.ln() + ln_gamma_unchecked(s)).exp() - lower_series(s, x)?)
    } else {
        Ok(small_x(s, x) * (x - s * x.ln()).exp())
    }
}

/// `e^x E_1(x) = e^x Γ(0, x)`.
pub fn exp_scaled_e1(x: f64) -> Result<f64> {
    check_positive("exp_scaled_e1", "x", x)?;
    upper_incomplete_gamma_scaled(0.0, x)
}

/// Regularized lower incomplete gamma `P(a, x)`; the gamma CDF.
pub fn regularized_gamma_p(a: f64, x: f64) -> Result<f64> {
    check_positive("regularized_gamma_p", "a", a)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(
            "regularized_gamma_p",
            format!("x must be >= 0, got {x}"),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let log_pref = a * x.ln() - x - ln_gamma_unchecked(a);
    if x < a + 1.0 {
        Ok((log_pref.exp() * lower_series(a, x)?).min(1.0))
    } else {
        Ok(1.0 - log_pref.exp() * cf_scaled(a, x)?)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn regularized_gamma_q(a: f64, x: f64) -> Result<f64> {
    check_positive("regularized_gamma_q", "a", a)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(
            "regularized_gamma_q",
            format!("x must be >= 0, got {x}"),
        ));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let log_pref = a * x.ln() - x - ln_gamma_unchecked(a);
    if x < a + 1.0 {
        Ok(1.0 - log_pref.exp() * lower_series(a, x)?)
    } else {
        Ok(log_pref.exp() * cf_scaled(a, x)?)
    }
}

/// Digamma `ψ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", "x", x)?;
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let series = r
        * (1.0 / 12.0
            - r * (1.0 / 120.0
                - r * (1.0 / 252.0
                    - r * (1.0 / 240.0 - r * (1.0 / 132.0 - r * (691.0 / 32_760.0 - r / 12.0))))));
    Ok(acc + x.ln() - 0.5 / x - series)
}

/// Trigamma `ψ'(x)` for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive("trigamma", "x", x)?;
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let series = 1.0 / 6.0
        - r * (1.0 / 30.0
            - r * (1.0 / 42.0
                - r * (1.0 / 30.0 - r * (5.0 / 66.0 - r * (691.0 / 2730.0 - r * 7.0 / 6.0)))));
    Ok(acc + 1.0 / x + r / 2.0 + series * r / x)
}
