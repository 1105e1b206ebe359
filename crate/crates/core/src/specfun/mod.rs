//! Special-function kernel: incomplete gamma, exponential integral, Tricomi
//! `U(1, b, z)`, the Gompertz–Makeham density and numerical Laplace inversion.
//!
//! All functions are pure and thread-safe.

mod gamma;
pub mod laplace;
pub mod quad;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use gamma::{
    digamma, exp_scaled_e1, ln_gamma, regularized_gamma_p, regularized_gamma_q, trigamma,
    upper_incomplete_gamma, upper_incomplete_gamma_scaled, EULER_GAMMA, MIN_ORDER,
};
pub use laplace::{invert_laplace, InversionMethod, LaplaceInversionConfig};

/// Tricomi confluent hypergeometric function at unit first parameter,
/// `U(1, b, z) = e^z z^(1-b) Γ(b-1, z)`, for real `b` and `z > 0`.
///
/// This is exactly the scaled incomplete gamma of order `b - 1`, so it stays
/// finite for large `z` where `e^z` alone would overflow.
pub fn tricomi_u1(b: f64, z: f64) -> Result<f64> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::domain(
            "tricomi_u1",
            format!("z must be finite and > 0, got {z}"),
        ));
    }
    if !(b.is_finite() && b - 1.0 > MIN_ORDER) {
        return Err(Error::domain(
            "tricomi_u1",
            format!("b must be finite and > {}, got {b}", MIN_ORDER + 1.0),
        ));
    }
    upper_incomplete_gamma_scaled(b - 1.0, z)
}

// Integrand magnitudes below e^-46 of the peak are dropped.
const U1_DROP: f64 = 46.0;

/// `U(1, b, z)` for complex `b` from the integral representation
/// `∫_0^∞ e^(-z t) (1+t)^(b-2) dt`, integrated in `v = ln(1+t)`.
///
/// Used where `b` leaves the real axis (Laplace inversion of the capacity
/// density). Returns a non-finite value when the result overflows.
pub fn tricomi_u1_complex(b: Complex64, z: f64) -> Result<Complex64> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::domain(
            "tricomi_u1_complex",
            format!("z must be finite and > 0, got {z}"),
        ));
    }
    if !(b.re.is_finite() && b.im.is_finite()) {
        return Err(Error::domain(
            "tricomi_u1_complex",
            format!("b must be finite, got {b}"),
        ));
    }
    let c = b.re - 1.0;
    let omega = b.im;
    let re_phi = |v: f64| -z * v.exp_m1() + c * v;
    let v_peak = if c > z { (c / z).ln() } else { 0.0 };
    let peak = re_phi(v_peak);
    let floor = peak - U1_DROP;

    // right cut-off: re_phi is concave, so it decreases monotonically past the peak
    let mut d = 1e-6;
    while re_phi(v_peak + d) > floor {
        d *= 2.0;
    }
    let (mut lo, mut hi) = (v_peak + 0.5 * d, v_peak + d);
    if d == 1e-6 {
        lo = v_peak;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if re_phi(mid) > floor {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let right = hi;

    let left = if re_phi(0.0) < floor {
        let (mut lo, mut hi) = (0.0, v_peak);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if re_phi(mid) < floor {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    } else {
        0.0
    };

    let mut breaks = Vec::new();
    let span = |a: f64, b: f64, out: &mut Vec<f64>| {
        let pieces =
            ((omega.abs() * (b - a) / std::f64::consts::PI).ceil() as usize).clamp(1, 4000);
        for i in 0..pieces {
            out.push(a + (b - a) * i as f64 / pieces as f64);
        }
    };
    if v_peak > left {
        span(left, v_peak, &mut breaks);
    }
    span(v_peak.max(left), right, &mut breaks);
    breaks.push(right);

    let bm1 = b - 1.0;
    let integrand = |v: f64| (Complex64::new(-z * v.exp_m1() - peak, 0.0) + bm1 * v).exp();
    let opts = quad::QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_intervals: 20_000,
    };
    let r = quad::integrate(integrand, &breaks, opts)?;
    Ok(r.value * peak.exp())
}

/// Gompertz–Makeham density `λ κ e^(λx) e^κ e^(-κ e^(λx))` for `x >= 0`.
///
/// With `λ = ln 2` and `κ = 1/β` this is the law of `log2(1 + γ)` when `γ`
/// is exponential with mean `β`.
pub fn gm_pdf(x: f64, lambda: f64, kappa: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(
            "gm_pdf",
            format!("lambda must be > 0, got {lambda}"),
        ));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::domain(
            "gm_pdf",
            format!("kappa must be > 0, got {kappa}"),
        ));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain("gm_pdf", format!("x must be >= 0, got {x}")));
    }
    let lx = lambda * x;
    Ok(lambda * kappa * (lx - kappa * lx.exp_m1()).exp())
}
