//! Globally adaptive Gauss–Kronrod (7/15) quadrature over finite intervals.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values the integrator can accumulate: reals and complex numbers.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    /// Integral of the magnitude of the integrand; the reference scale for `rel_tol`.
    pub magnitude: f64,
    pub evaluations: usize,
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    magnitude: f64,
}

fn gk15<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Segment<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut magnitude = fc.magnitude() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let pair = f1 + f2;
        kronrod = kronrod + pair * WGK[j];
        magnitude += (f1.magnitude() + f2.magnitude()) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).magnitude();
    Segment {
        a,
        b,
        value,
        error,
        magnitude: magnitude * half.abs(),
    }
}

/// Integrate `f` over the union of consecutive intervals given by `breaks`
/// (ascending, at least two points), bisecting the worst segment until the
/// summed error estimate is below `max(abs_tol, rel_tol * ∫|f|)`.
pub fn integrate<T, F>(f: F, breaks: &[f64], opts: QuadOptions) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    assert!(breaks.len() >= 2, "need at least one interval");
    let mut segments: Vec<Segment<T>> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 15 * segments.len();

    loop {
        let (mut value, mut error, mut magnitude) = (T::zero(), 0.0, 0.0);
        for s in &segments {
            value = value + s.value;
            error += s.error;
            magnitude += s.magnitude;
        }
        if !value.magnitude().is_finite() || !error.is_finite() {
            return Err(Error::Quadrature {
                estimate: value.magnitude(),
                error,
                evaluations,
            });
        }
        let target = opts.abs_tol.max(opts.rel_tol * magnitude);
        if error <= target || magnitude == 0.0 {
            return Ok(QuadResult {
                value,
                error,
                magnitude,
                evaluations,
            });
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                estimate: value.magnitude(),
                error,
                evaluations,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval can no longer be split in floating point
            return Err(Error::Quadrature {
                estimate: value.magnitude(),
                error,
                evaluations,
            });
        }
        segments.push(gk15(&f, seg.a, mid));
        segments.push(gk15(&f, mid, seg.b));
        evaluations += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(
            |x: f64| x.powi(7) - 3.0 * x * x,
            &[0.0, 2.0],
            QuadOptions::default(),
        )
        .unwrap();
        assert!((r.value - (256.0 / 8.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn refines_a_sharp_peak() {
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let r = integrate(f, &[-1.0, 1.0], QuadOptions::default()).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!(((r.value - exact) / exact).abs() < 1e-11);
    }

    #[test]
    fn complex_oscillation() {
        let f = |x: f64| Complex64::new(0.0, 40.0 * x).exp();
        let r = integrate(f, &[0.0, 1.0], QuadOptions::default()).unwrap();
        let exact = (Complex64::new(0.0, 40.0).exp() - 1.0) / Complex64::new(0.0, 40.0);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = QuadOptions {
            max_intervals: 3,
            ..QuadOptions::default()
        };
        let r = integrate(|x: f64| x.abs().sqrt().recip(), &[-1.0, 0.0, 1.0], opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
