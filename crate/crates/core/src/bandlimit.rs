//! Band limiting.
//!
//! * [`dirichlet_op`]: the windowed sinc convolution
//!   `(F_N f_T)(x) = (1/π) ∫_{-T}^{T} sin(N(x−s))/(x−s) f(s) ds`.
//! * [`f_n_eval`]: the band-limited companion `f_N = (f̂ χ_{(−N,N)})^∨`, from the transform
//!   when it is known in closed form and by the full-line sinc convolution otherwise.
//! * [`lemma2_residual`]: both sides of
//!   `‖f − F_N f_T‖_{L²[−T,T]} ≤ ‖f‖_{L²(|t|>T)} + ‖f̂‖_{L²(|ω|>N)}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{ErrorSlot, Integrator, QuadError, QuadratureSpec};
use crate::test_functions::{line_integral, line_integral_vec, TestFunction, INV_SQRT_2PI};

/// Within this distance of the diagonal `sin(Nu)/u` is replaced by its Taylor polynomial.
pub const SINC_PATCH_RADIUS: f64 = 1e-8;

/// Gauss–Legendre order used for the inner integrals of nested quadratures. The initial
/// partition already resolves every oscillation, so low-order panels converge at once.
pub const NESTED_PANEL_ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BandLimitError {
    #[error("truncation order K = {0} is odd; K must be even")]
    OddTruncation(usize),
    #[error("band edge N and half-width T must be positive and finite (N = {band}, T = {half_width})")]
    BadParams { band: f64, half_width: f64 },
    #[error("f_N({t}) has imaginary part {imag:e}; f is not real")]
    NotReal { t: f64, imag: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandLimitParams {
    #[serde(rename = "N")]
    pub band: f64,
    #[serde(rename = "T")]
    pub half_width: f64,
}

impl BandLimitParams {
    pub fn new(band: f64, half_width: f64) -> Result<Self, BandLimitError> {
        if band > 0.0 && band.is_finite() && half_width > 0.0 && half_width.is_finite() {
            Ok(Self { band, half_width })
        } else {
            Err(BandLimitError::BadParams { band, half_width })
        }
    }

    /// `N` from [`band_edge`].
    pub fn for_order(order: usize, half_width: f64) -> Result<Self, BandLimitError> {
        Self::new(band_edge(order)?, half_width)
    }
}

/// `N = (√(2K+1) + √(2K+3))/2` for even `K`.
pub fn band_edge(order: usize) -> Result<f64, BandLimitError> {
    if order % 2 == 1 {
        return Err(BandLimitError::OddTruncation(order));
    }
    let k = order as f64;
    Ok(((2.0 * k + 1.0).sqrt() + (2.0 * k + 3.0).sqrt()) / 2.0)
}

/// `sin(N u)/u`, continuous at `u = 0`.
#[inline]
pub fn sinc_kernel(band: f64, u: f64) -> f64 {
    if u.abs() < SINC_PATCH_RADIUS {
        let z2 = (band * u).powi(2);
        band * (1.0 - z2 / 6.0 * (1.0 - z2 / 20.0))
    } else {
        (band * u).sin() / u
    }
}

fn nested_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    spec.with_panel_order(spec.panel_order.min(NESTED_PANEL_ORDER))
}

/// `(F_N f_T)(x)`.
pub fn dirichlet_op<F: TestFunction + ?Sized>(
    f: &F,
    p: &BandLimitParams,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    let t = p.half_width;
    let integ = Integrator::new(nested_spec(spec).with_frequency_hint(-t, t, p.band))?;
    let r = integ.integrate(|s| sinc_kernel(p.band, x - s) * f.value(s), -t, t)?;
    Ok(r.value / PI)
}

/// `f̂(ω)`: closed form when available, otherwise quadrature of
/// `(2π)^{-1/2} ∫ f(t) e^{-iωt} dt`.
pub fn fourier<F: TestFunction + ?Sized>(f: &F, omega: f64, spec: &QuadratureSpec) -> Result<Complex64, QuadError> {
    match f.fourier(omega) {
        Some(v) => Ok(v),
        None => fourier_by_quadrature(f, omega, spec),
    }
}

pub fn fourier_by_quadrature<F: TestFunction + ?Sized>(
    f: &F,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64, QuadError> {
    let g = |t: f64, out: &mut [f64]| {
        let v = f.value(t);
        let (s, c) = (omega * t).sin_cos();
        out[0] = v * c;
        out[1] = -v * s;
    };
    let r = line_integral_vec(f, g, 2, spec, omega.abs())?;
    Ok(Complex64::new(r.values[0], r.values[1]) * INV_SQRT_2PI)
}

/// `f_N(t)`.
pub fn f_n_eval<F: TestFunction + ?Sized>(
    f: &F,
    band: f64,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<f64, BandLimitError> {
    if !f.has_fourier() {
        return Ok(sinc_convolution(f, band, t, spec)?);
    }
    let freq = t.abs() + f.phase_reach();
    let spec = spec.with_panel_order(spec.panel_order.min(NESTED_PANEL_ORDER));
    let integ = Integrator::new(spec.with_frequency_hint(-band, band, freq))?;
    let g = |w: f64, out: &mut [f64]| {
        let v = f.fourier(w).unwrap_or_default() * Complex64::from_polar(1.0, w * t);
        out[0] = v.re;
        out[1] = v.im;
    };
    let r = integ.integrate_vec(g, 2, -band, band)?;
    let (re, im) = (r.values[0] * INV_SQRT_2PI, r.values[1] * INV_SQRT_2PI);
    if im.abs() > 1e-9 * re.abs().max(1.0) {
        return Err(BandLimitError::NotReal { t, imag: im });
    }
    Ok(re)
}

/// `(1/π) ∫_ℝ sin(N(t−s))/(t−s) f(s) ds`.
pub fn sinc_convolution<F: TestFunction + ?Sized>(
    f: &F,
    band: f64,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    Ok(line_integral(f, |s| sinc_kernel(band, t - s) * f.value(s), &nested_spec(spec), band)? / PI)
}

/// `f_N` as a function in its own right.
#[derive(Debug, Clone, Copy)]
pub struct BandLimited<F> {
    pub inner: F,
    pub band: f64,
    pub spec: QuadratureSpec,
}

impl<F: TestFunction> TestFunction for BandLimited<F> {
    fn value(&self, t: f64) -> f64 {
        f_n_eval(&self.inner, self.band, t, &self.spec).unwrap_or(f64::NAN)
    }
    fn fourier(&self, omega: f64) -> Option<Complex64> {
        if omega.abs() < self.band {
            self.inner.fourier(omega)
        } else {
            self.inner.fourier(omega).map(|_| Complex64::default())
        }
    }
    fn core_radius(&self) -> f64 {
        self.inner.core_radius()
    }
}

/// `∫_{|t|>T} f²`, closed form when available.
pub fn l2_tail<F: TestFunction + ?Sized>(f: &F, threshold: f64, spec: &QuadratureSpec) -> Result<f64, QuadError> {
    match f.l2_tail(threshold) {
        Some(v) => Ok(v),
        None => Ok(Integrator::new(*spec)?
            .integrate_tail(|t| f.value(t).powi(2), threshold)?
            .value),
    }
}

/// `∫_{|ω|>N} |f̂|²`, closed form when available.
pub fn fourier_l2_tail<F: TestFunction + ?Sized>(f: &F, band: f64, spec: &QuadratureSpec) -> Result<f64, QuadError> {
    if let Some(v) = f.fourier_l2_tail(band) {
        return Ok(v);
    }
    // ‖f‖² − ∫_{−N}^{N} |f̂|²: transforms are then only needed at bounded frequency.
    let total = line_integral(f, |t| f.value(t).powi(2), spec, 0.0)?;
    let inner = nested_spec(spec);
    let outer = Integrator::new(inner.with_frequency_hint(-band, band, 2.0 * f.phase_reach()))?;
    let slot = ErrorSlot::default();
    let r = outer.integrate_par(|w| slot.guard(fourier(f, w, &inner)).norm_sqr(), -band, band)?;
    slot.finish((total - r.value).max(0.0))
}

/// Both sides of the band-limiting inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Residual {
    /// `[∫_{−T}^{T} (f − F_N f_T)²]^{1/2}`.
    pub lhs: f64,
    /// `[∫_{|t|>T} f²]^{1/2} + [∫_{|ω|>N} |f̂|²]^{1/2}`.
    pub rhs: f64,
}

pub fn lemma2_residual<F: TestFunction + ?Sized>(
    f: &F,
    p: &BandLimitParams,
    spec: &QuadratureSpec,
) -> Result<Lemma2Residual, QuadError> {
    let t = p.half_width;
    let outer = Integrator::new(nested_spec(spec).with_frequency_hint(-t, t, p.band))?;
    let slot = ErrorSlot::default();
    let sq = outer.integrate_par(|x| (f.value(x) - slot.guard(dirichlet_op(f, p, x, spec))).powi(2), -t, t)?;
    slot.finish(())?;
    let rhs = l2_tail(f, t, spec)?.sqrt() + fourier_l2_tail(f, p.band, spec)?.sqrt();
    Ok(Lemma2Residual {
        lhs: sq.value.max(0.0).sqrt(),
        rhs,
    })
}
