//! Test-only oracles. Nothing here calls into the crate's numerical kernels.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Double-exponential (tanh-sinh) quadrature on a finite interval.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let r = 0.5 * (b - a);
    let mut prev = f64::NAN;
    let mut h = 0.5;
    loop {
        let n = (4.0 / h) as i64;
        let mut sum = 0.0;
        for k in -n..=n {
            let t = k as f64 * h;
            let u = FRAC_PI_2 * t.sinh();
            let ch = u.cosh();
            let x = u.tanh();
            // distance from the nearer endpoint, computed without cancellation
            let gap = r / (u.abs().exp() * ch);
            let w = FRAC_PI_2 * t.cosh() / (ch * ch);
            if gap == 0.0 {
                continue;
            }
            let xx = if x < 0.0 { a + gap } else { b - gap };
            let v = f(xx);
            if v.is_finite() {
                sum += w * v;
            }
        }
        let est = sum * r * h;
        if (est - prev).abs() <= 1e-14 * est.abs().max(1e-300) || h < 1.0 / 512.0 {
            return est;
        }
        prev = est;
        h *= 0.5;
    }
}

/// Double-exponential (exp-sinh) quadrature on `[a, ∞)` for decaying integrands.
pub fn exp_sinh(f: impl Fn(f64) -> f64, a: f64) -> f64 {
    let mut prev = f64::NAN;
    let mut h = 0.5;
    loop {
        let n = (5.0 / h) as i64;
        let mut sum = 0.0;
        for k in -n..=n {
            let t = k as f64 * h;
            let e = (FRAC_PI_2 * t.sinh()).exp();
            let w = FRAC_PI_2 * t.cosh() * e;
            let v = f(a + e);
            if v.is_finite() && w.is_finite() {
                sum += w * v;
            }
        }
        let est = sum * h;
        if (est - prev).abs() <= 1e-14 * est.abs().max(1e-300) || h < 1.0 / 512.0 {
            return est;
        }
        prev = est;
        h *= 0.5;
    }
}

/// Composite Simpson rule on `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// Two-sided Kolmogorov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Standard normal CDF via a high-accuracy erfc (W. J. Cody rational fits are
/// overkill here; the Abramowitz–Stegun 7.1.26 form is accurate to 1.5e-7).
pub fn normal_cdf(x: f64) -> f64 {
    let z = x / std::f64::consts::SQRT_2;
    let t = 1.0 / (1.0 + 0.327_591_1 * z.abs());
    let poly = t
        * (0.254_829_592
            + t * (-0.284_496_736
                + t * (1.421_413_741 + t * (-1.453_152_027 + t * 1.061_405_429))));
    let erf = 1.0 - poly * (-z * z).exp();
    if z >= 0.0 {
        0.5 * (1.0 + erf)
    } else {
        0.5 * (1.0 - erf)
    }
}

/// Regularized lower incomplete gamma `P(a, x)` by its power series, with
/// `Γ(a + 1)` supplied by the caller.
pub fn gamma_p_series(a: f64, x: f64, gamma_a_plus_1: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 1.0;
    while term > 1e-17 * sum {
        term *= x / (a + n);
        sum += term;
        n += 1.0;
    }
    ((a * x.ln() - x).exp() * sum / gamma_a_plus_1).min(1.0)
}

/// `Γ(a + 1)` by quadrature.
pub fn gamma_fn_plus_1(a: f64) -> f64 {
    exp_sinh(|t| (a * t.ln() - t).exp(), 0.0)
}
