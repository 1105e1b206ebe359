//! Complex Nakagami-m channel sampling and semi-correlated composition.
//!
//! Each quadrature `h` of a channel coefficient has density
//!
//! ```text
//! w(h) = m^(m/2) / (Ω^(m/2) Γ(m/2)) · |h|^(m-1) · exp(-m h² / Ω)
//! ```
//!
//! on the whole real line, so `h²` is `Gamma(m/2, Ω/m)` and `E[h²] = Ω/2`.
//! In-phase and quadrature parts are drawn independently, giving `E[|ḣ|²] = Ω`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::correlation::HermitianMatrix;
use crate::error::{Error, Result};
use crate::specfun::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingRegime {
    HyperRayleigh,
    Rayleigh,
    LighterThanRayleigh,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    m: f64,
    omega: f64,
}

impl FadingParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Config(format!(
                "fading shape m must be > 0, got {m}"
            )));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Config(format!(
                "fading power omega must be > 0, got {omega}"
            )));
        }
        Ok(Self { m, omega })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn regime(&self) -> FadingRegime {
        if self.m < 1.0 {
            FadingRegime::HyperRayleigh
        } else if self.m == 1.0 {
            FadingRegime::Rayleigh
        } else {
            FadingRegime::LighterThanRayleigh
        }
    }

    /// Density of one quadrature component.
    pub fn component_pdf(&self, h: f64) -> f64 {
        let (m, omega) = (self.m, self.omega);
        let half = 0.5 * m;
        let log_norm = half * (m / omega).ln() - ln_gamma(half).expect("m > 0");
        if h == 0.0 {
            return match m.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => log_norm.exp(),
                _ => 0.0,
            };
        }
        (log_norm + (m - 1.0) * h.abs().ln() - m * h * h / omega).exp()
    }
}

/// Exact gamma variate generator with shape `k` and scale `θ`.
///
/// Shape `>= 1` uses Marsaglia–Tsang squeeze/rejection; shape `< 1` uses the
/// Ahrens–Dieter GS rejection scheme directly (no `U^(1/k)` boosting).
#[derive(Debug, Clone, Copy)]
pub struct GammaVariate {
    shape: f64,
    scale: f64,
    method: GammaMethod,
}

#[derive(Debug, Clone, Copy)]
enum GammaMethod {
    MarsagliaTsang { d: f64, c: f64 },
    AhrensDieter { b: f64, inv_shape: f64 },
}

impl GammaVariate {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0 && scale.is_finite() && scale > 0.0) {
            return Err(Error::domain(
                "GammaVariate::new",
                format!("shape and scale must be > 0, got {shape}, {scale}"),
            ));
        }
        let method = if shape >= 1.0 {
            let d = shape - 1.0 / 3.0;
            GammaMethod::MarsagliaTsang {
                d,
                c: 1.0 / (9.0 * d).sqrt(),
            }
        } else {
            GammaMethod::AhrensDieter {
                b: 1.0 + shape / std::f64::consts::E,
                inv_shape: 1.0 / shape,
            }
        };
        Ok(Self {
            shape,
            scale,
            method,
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let unit = match self.method {
            GammaMethod::MarsagliaTsang { d, c } => loop {
                let x: f64 = rng.sample(StandardNormal);
                let v = 1.0 + c * x;
                if v <= 0.0 {
                    continue;
                }
                let v = v * v * v;
                let u = open_unit(rng);
                let x2 = x * x;
                if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                    break d * v;
                }
            },
            GammaMethod::AhrensDieter { b, inv_shape } => loop {
                let p = b * open_unit(rng);
                if p <= 1.0 {
                    let x = p.powf(inv_shape);
                    if open_unit(rng) <= (-x).exp() {
                        break x;
                    }
                } else {
                    let x = -((b - p) * inv_shape).ln();
                    if open_unit(rng) <= x.powf(self.shape - 1.0) {
                        break x;
                    }
                }
            },
        };
        unit * self.scale
    }
}

/// Uniform on (0, 1].
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Sampler for one real quadrature component: `±√g`, `g ~ Gamma(m/2, Ω/m)`.
#[derive(Debug, Clone, Copy)]
pub struct NakagamiComponent {
    power: GammaVariate,
}

impl NakagamiComponent {
    pub fn new(params: &FadingParams) -> Self {
        let power =
            GammaVariate::new(0.5 * params.m, params.omega / params.m).expect("validated params");
        Self { power }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let magnitude = self.power.sample(rng).sqrt();
        if rng.random::<bool>() {
            magnitude
        } else {
            -magnitude
        }
    }
}

pub fn sample_nakagami_component<R: Rng + ?Sized>(params: &FadingParams, rng: &mut R) -> f64 {
    NakagamiComponent::new(params).sample(rng)
}

/// `n_r × n_t` matrix of complex transmission coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    inner: DMatrix<Complex64>,
}

impl ChannelMatrix {
    pub fn from_matrix(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::Shape("channel matrix must be at least 1x1".into()));
        }
        if inner
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Numerical(
                "channel matrix has non-finite entries".into(),
            ));
        }
        Ok(Self { inner })
    }

    pub fn n_r(&self) -> usize {
        self.inner.nrows()
    }

    pub fn n_t(&self) -> usize {
        self.inner.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }
}

pub fn sample_channel_matrix<R: Rng + ?Sized>(
    n_r: usize,
    n_t: usize,
    params: &FadingParams,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    if n_r == 0 || n_t == 0 {
        return Err(Error::Shape(format!(
            "channel dimensions must be >= 1, got {n_r}x{n_t}"
        )));
    }
    let component = NakagamiComponent::new(params);
    Ok(sample_channel_with(n_r, n_t, &component, rng))
}

pub(crate) fn sample_channel_with<R: Rng + ?Sized>(
    n_r: usize,
    n_t: usize,
    component: &NakagamiComponent,
    rng: &mut R,
) -> ChannelMatrix {
    let mut m = DMatrix::zeros(n_r, n_t);
    for i in 0..n_r {
        for j in 0..n_t {
            let re = component.sample(rng);
            let im = component.sample(rng);
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    ChannelMatrix { inner: m }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationSide {
    Transmit,
    Receive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiCorrelationLabel {
    /// Correlation sits on the side with fewer antennas (or on either side of a square link).
    MinSemicorrelated,
    MaxSemicorrelated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemiCorrelationMode {
    side: CorrelationSide,
    label: SemiCorrelationLabel,
}

impl SemiCorrelationMode {
    pub fn new(side: CorrelationSide, n_t: usize, n_r: usize) -> Self {
        let (own, other) = match side {
            CorrelationSide::Transmit => (n_t, n_r),
            CorrelationSide::Receive => (n_r, n_t),
        };
        let label = if own <= other {
            SemiCorrelationLabel::MinSemicorrelated
        } else {
            SemiCorrelationLabel::MaxSemicorrelated
        };
        Self { side, label }
    }

    pub fn side(&self) -> CorrelationSide {
        self.side
    }

    pub fn label(&self) -> SemiCorrelationLabel {
        self.label
    }

    /// Antenna count on the correlated side.
    pub fn correlated_dim(&self, n_t: usize, n_r: usize) -> usize {
        match self.side {
            CorrelationSide::Transmit => n_t,
            CorrelationSide::Receive => n_r,
        }
    }
}

/// `Σ_R^{1/2} H_w` for receive-side correlation, `H_w Σ_T^{1/2}` for transmit-side.
pub fn compose_channel(
    h_w: &ChannelMatrix,
    sqrt_sigma: &HermitianMatrix,
    mode: SemiCorrelationMode,
) -> Result<ChannelMatrix> {
    let need = mode.correlated_dim(h_w.n_t(), h_w.n_r());
    if sqrt_sigma.dim() != need {
        return Err(Error::Shape(format!(
            "correlation square root is {0}x{0} but the {1:?} side has {need} antennas",
            sqrt_sigma.dim(),
            mode.side
        )));
    }
    let s = sqrt_sigma.as_matrix();
    let inner = match mode.side {
        CorrelationSide::Receive => s * &h_w.inner,
        CorrelationSide::Transmit => &h_w.inner * s,
    };
    Ok(ChannelMatrix { inner })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::{correlation_sqrt, CorrelationSpec, PsdPolicy};
    use crate::rng::stream;

    #[test]
    fn regime_labels() {
        assert_eq!(
            FadingParams::new(0.7, 1.0).unwrap().regime(),
            FadingRegime::HyperRayleigh
        );
        assert_eq!(
            FadingParams::new(1.0, 1.0).unwrap().regime(),
            FadingRegime::Rayleigh
        );
        assert_eq!(
            FadingParams::new(2.5, 1.0).unwrap().regime(),
            FadingRegime::LighterThanRayleigh
        );
    }

    #[test]
    fn params_validation() {
        assert!(FadingParams::new(0.0, 1.0).is_err());
        assert!(FadingParams::new(1.0, -1.0).is_err());
        assert!(FadingParams::new(f64::NAN, 1.0).is_err());
        assert!(GammaVariate::new(0.0, 1.0).is_err());
    }

    #[test]
    fn rayleigh_component_pdf_is_gaussian() {
        // m = 1, Ω = 2: N(0, 1)
        let p = FadingParams::new(1.0, 2.0).unwrap();
        for &h in &[0.0f64, 0.3, -1.2, 2.5] {
            let g = (-0.5 * h * h).exp() / (2.0 * std::f64::consts::PI).sqrt();
            assert!((p.component_pdf(h) - g).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_root_leaves_channel_unchanged() {
        let p = FadingParams::new(1.0, 1.0).unwrap();
        let h = sample_channel_matrix(3, 3, &p, &mut stream(1, &[])).unwrap();
        for side in [CorrelationSide::Transmit, CorrelationSide::Receive] {
            let out = compose_channel(
                &h,
                &HermitianMatrix::identity(3),
                SemiCorrelationMode::new(side, 3, 3),
            )
            .unwrap();
            assert_eq!(out, h);
        }
    }

    #[test]
    fn identity_channel_returns_the_root() {
        let h = ChannelMatrix::from_matrix(DMatrix::identity(2, 2)).unwrap();
        let s =
            correlation_sqrt(&CorrelationSpec::full(2, 0.5).unwrap(), PsdPolicy::Error).unwrap();
        let out = compose_channel(
            &h,
            &s,
            SemiCorrelationMode::new(CorrelationSide::Receive, 2, 2),
        )
        .unwrap();
        assert_eq!(out.as_matrix(), s.as_matrix());
    }

    #[test]
    fn shape_mismatch_names_dims() {
        let p = FadingParams::new(1.0, 1.0).unwrap();
        let h = sample_channel_matrix(4, 2, &p, &mut stream(1, &[])).unwrap();
        let err = compose_channel(
            &h,
            &HermitianMatrix::identity(4),
            SemiCorrelationMode::new(CorrelationSide::Transmit, 2, 4),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("4x4") && msg.contains("2 antennas"), "{msg}");
        assert!(sample_channel_matrix(0, 2, &p, &mut stream(1, &[])).is_err());
    }

    #[test]
    fn mode_labels() {
        let m = SemiCorrelationMode::new(CorrelationSide::Transmit, 4, 8);
        assert_eq!(m.label(), SemiCorrelationLabel::MinSemicorrelated);
        let m = SemiCorrelationMode::new(CorrelationSide::Receive, 4, 8);
        assert_eq!(m.label(), SemiCorrelationLabel::MaxSemicorrelated);
        assert_eq!(m.correlated_dim(4, 8), 8);
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let p = FadingParams::new(0.7, 1.2).unwrap();
        let a = sample_channel_matrix(5, 3, &p, &mut stream(99, &[4])).unwrap();
        let b = sample_channel_matrix(5, 3, &p, &mut stream(99, &[4])).unwrap();
        assert_eq!(a, b);
    }
}
