//! Functions the bounds are evaluated on.
//!
//! [`GaussianMixture`] is the analytic family: `f(t) = Σ wᵢ φ(aᵢ(t − cᵢ))` with
//! `φ(t) = e^{-t²/2}/√(2π)`. Its derivative, Fourier transform
//! `f̂(ω) = (2π)^{-1/2} ∫ f(t) e^{-iωt} dt` and both L² tails are closed form, so ledger
//! computations on mixtures never need a transform by quadrature. Anything else goes through
//! [`BlackBox`] and the generic fallbacks in [`crate::bandlimit`] and [`crate::bound`].

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hermite::HermiteBasis;
use crate::quadrature::{Integrator, QuadError, QuadratureSpec, VecIntegrationResult};

/// `1/√(2π)`.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn std_normal_pdf(t: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * t * t).exp()
}

/// A real function on ℝ together with whatever closed forms it knows about itself.
pub trait TestFunction: Send + Sync {
    fn value(&self, t: f64) -> f64;

    fn derivative(&self, _t: f64) -> Option<f64> {
        None
    }

    fn has_derivative(&self) -> bool {
        self.derivative(0.0).is_some()
    }

    /// `f̂(ω)` under the unitary convention, if known in closed form.
    fn fourier(&self, _omega: f64) -> Option<Complex64> {
        None
    }

    fn has_fourier(&self) -> bool {
        self.fourier(0.0).is_some()
    }

    /// `∫_{|t|>T} f²`, if known in closed form.
    fn l2_tail(&self, _threshold: f64) -> Option<f64> {
        None
    }

    /// `∫_{|ω|>N} |f̂|²`, if known in closed form.
    fn fourier_l2_tail(&self, _band: f64) -> Option<f64> {
        None
    }

    /// Radius outside of which `f` is negligible; quadratures over ℝ split there into a
    /// core interval and two mapped tails.
    fn core_radius(&self) -> f64 {
        12.0
    }

    /// Points inside the core where `f` is not smooth (windows, kinks).
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Largest `|c|` among the phases `e^{−iωc}` in `f̂`; bounds how fast `f̂` oscillates.
    fn phase_reach(&self) -> f64 {
        self.core_radius()
    }
}

impl<F: TestFunction + ?Sized> TestFunction for &F {
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }
    fn derivative(&self, t: f64) -> Option<f64> {
        (**self).derivative(t)
    }
    fn has_derivative(&self) -> bool {
        (**self).has_derivative()
    }
    fn fourier(&self, omega: f64) -> Option<Complex64> {
        (**self).fourier(omega)
    }
    fn has_fourier(&self) -> bool {
        (**self).has_fourier()
    }
    fn l2_tail(&self, threshold: f64) -> Option<f64> {
        (**self).l2_tail(threshold)
    }
    fn fourier_l2_tail(&self, band: f64) -> Option<f64> {
        (**self).fourier_l2_tail(band)
    }
    fn core_radius(&self) -> f64 {
        (**self).core_radius()
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
    fn phase_reach(&self) -> f64 {
        (**self).phase_reach()
    }
}

/// One mixture term `w·φ(a(t − c))`. Serialises as the triple `[w, a, c]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Component {
    pub weight: f64,
    pub scale: f64,
    pub center: f64,
}

impl From<[f64; 3]> for Component {
    fn from([weight, scale, center]: [f64; 3]) -> Self {
        Self {
            weight,
            scale,
            center,
        }
    }
}

impl From<Component> for [f64; 3] {
    fn from(c: Component) -> Self {
        [c.weight, c.scale, c.center]
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixtureError {
    #[error("component {index}: scale must be positive and finite, got {scale}")]
    BadScale { index: usize, scale: f64 },
    #[error("component {index}: weight and center must be finite")]
    NonFinite { index: usize },
    #[error("mixture literal is not a JSON array of [w, a, c] triples: {0}")]
    Parse(String),
}

/// `Σ wᵢ φ(aᵢ(t − cᵢ))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Component>", into = "Vec<Component>")]
pub struct GaussianMixture {
    components: Vec<Component>,
}

impl TryFrom<Vec<Component>> for GaussianMixture {
    type Error = MixtureError;
    fn try_from(components: Vec<Component>) -> Result<Self, Self::Error> {
        Self::new(components)
    }
}

impl From<GaussianMixture> for Vec<Component> {
    fn from(m: GaussianMixture) -> Self {
        m.components
    }
}

impl GaussianMixture {
    pub fn new(components: Vec<Component>) -> Result<Self, MixtureError> {
        for (index, c) in components.iter().enumerate() {
            if !(c.scale > 0.0 && c.scale.is_finite()) {
                return Err(MixtureError::BadScale {
                    index,
                    scale: c.scale,
                });
            }
            if !(c.weight.is_finite() && c.center.is_finite()) {
                return Err(MixtureError::NonFinite { index });
            }
        }
        Ok(Self { components })
    }

    pub fn from_triples(triples: &[[f64; 3]]) -> Result<Self, MixtureError> {
        Self::new(triples.iter().copied().map(Component::from).collect())
    }

    /// Parses `[[w, a, c], …]`.
    pub fn from_json(literal: &str) -> Result<Self, MixtureError> {
        let triples: Vec<[f64; 3]> =
            serde_json::from_str(literal).map_err(|e| MixtureError::Parse(e.to_string()))?;
        Self::from_triples(&triples)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// `φ` itself.
    pub fn standard_normal() -> Self {
        Self::from_triples(&[[1.0, 1.0, 0.0]]).unwrap()
    }

    /// The three-bump density `0.5φ(t) + 3φ(10(t − 0.8)) + 2φ(10(t − 1.2))`.
    pub fn trimodal() -> Self {
        Self::from_triples(&[[0.5, 1.0, 0.0], [3.0, 10.0, 0.8], [2.0, 10.0, 1.2]]).unwrap()
    }

    /// `λ·f`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            components: self
                .components
                .iter()
                .map(|c| Component {
                    weight: lambda * c.weight,
                    ..*c
                })
                .collect(),
        }
    }

    /// `∫_ℝ f = Σ wᵢ/aᵢ`.
    pub fn integral(&self) -> f64 {
        self.components.iter().map(|c| c.weight / c.scale).sum()
    }

    /// `∫_ℝ f²`.
    pub fn l2_norm_squared(&self) -> f64 {
        self.pairwise_tail(0.0, true)
    }

    fn pairwise_tail(&self, threshold: f64, whole_line: bool) -> f64 {
        let mut total = 0.0;
        for ci in &self.components {
            for cj in &self.components {
                let (ai2, aj2) = (ci.scale * ci.scale, cj.scale * cj.scale);
                let a = ai2 + aj2;
                let m = (ai2 * ci.center + aj2 * cj.center) / a;
                let d = ci.center - cj.center;
                let rest = ai2 * aj2 * d * d / a;
                let pref = ci.weight * cj.weight / (2.0 * PI) * (-0.5 * rest).exp() * (PI / (2.0 * a)).sqrt();
                let r = (a / 2.0).sqrt();
                let mass = if whole_line {
                    2.0
                } else {
                    libm::erfc(r * (threshold - m)) + libm::erfc(r * (threshold + m))
                };
                total += pref * mass;
            }
        }
        total.max(0.0)
    }

    fn fourier_tail(&self, band: f64) -> Result<f64, QuadError> {
        let integ = Integrator::<f64>::new(QuadratureSpec::default().with_tolerances(1e-12, 1e-300))?;
        let mut total = 0.0;
        let n = self.components.len();
        for i in 0..n {
            for j in i..n {
                let (ci, cj) = (self.components[i], self.components[j]);
                let b = 1.0 / (ci.scale * ci.scale) + 1.0 / (cj.scale * cj.scale);
                let d = ci.center - cj.center;
                let pref = ci.weight * cj.weight / (ci.scale * cj.scale) / (2.0 * PI);
                let mult = if i == j { 1.0 } else { 2.0 };
                let part = if d == 0.0 {
                    2.0 * (PI / (2.0 * b)).sqrt() * libm::erfc((b / 2.0).sqrt() * band)
                } else {
                    integ
                        .integrate_tail(|w| (d * w).cos() * (-0.5 * b * w * w).exp(), band)?
                        .value
                };
                total += mult * pref * part;
            }
        }
        Ok(total.max(0.0))
    }
}

impl fmt::Display for GaussianMixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let triples: Vec<[f64; 3]> = self.components.iter().map(|&c| c.into()).collect();
        write!(f, "{}", serde_json::to_string(&triples).map_err(|_| fmt::Error)?)
    }
}

/// Closed-form `f̂(ω) = Σ (wᵢ/aᵢ)(2π)^{-1/2} e^{-iωcᵢ} e^{-ω²/(2aᵢ²)}`.
pub fn mixture_fourier(m: &GaussianMixture, omega: f64) -> Complex64 {
    m.components
        .iter()
        .map(|c| {
            let amp = c.weight / c.scale * INV_SQRT_2PI * (-0.5 * omega * omega / (c.scale * c.scale)).exp();
            Complex64::from_polar(amp, -omega * c.center)
        })
        .sum()
}

/// `(∫_{|t|>T} f², ∫_{|ω|>N} |f̂|²)`.
pub fn mixture_tails(m: &GaussianMixture, threshold: f64, band: f64) -> Result<(f64, f64), QuadError> {
    Ok((m.pairwise_tail(threshold, false), m.fourier_tail(band)?))
}

impl TestFunction for GaussianMixture {
    fn value(&self, t: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * std_normal_pdf(c.scale * (t - c.center)))
            .sum()
    }

    fn derivative(&self, t: f64) -> Option<f64> {
        Some(
            self.components
                .iter()
                .map(|c| {
                    let u = c.scale * (t - c.center);
                    -c.weight * c.scale * u * std_normal_pdf(u)
                })
                .sum(),
        )
    }

    fn has_derivative(&self) -> bool {
        true
    }

    fn fourier(&self, omega: f64) -> Option<Complex64> {
        Some(mixture_fourier(self, omega))
    }

    fn has_fourier(&self) -> bool {
        true
    }

    fn l2_tail(&self, threshold: f64) -> Option<f64> {
        Some(self.pairwise_tail(threshold, false))
    }

    fn fourier_l2_tail(&self, band: f64) -> Option<f64> {
        self.fourier_tail(band).ok()
    }

    fn core_radius(&self) -> f64 {
        let reach = self
            .components
            .iter()
            .map(|c| c.center.abs())
            .fold(0.0, f64::max);
        let width = self
            .components
            .iter()
            .map(|c| c.scale)
            .fold(f64::INFINITY, f64::min);
        if width.is_finite() {
            reach + 12.0 / width
        } else {
            12.0
        }
    }

    fn phase_reach(&self) -> f64 {
        self.components.iter().map(|c| c.center.abs()).fold(0.0, f64::max)
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An arbitrary function, optionally with its derivative. Transforms and tails are left to
/// quadrature.
#[derive(Clone)]
pub struct BlackBox {
    value: RealFn,
    derivative: Option<RealFn>,
    core_radius: f64,
}

impl fmt::Debug for BlackBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBox")
            .field("has_derivative", &self.derivative.is_some())
            .field("core_radius", &self.core_radius)
            .finish()
    }
}

impl BlackBox {
    pub fn new(value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(value),
            derivative: None,
            core_radius: 12.0,
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_core_radius(mut self, radius: f64) -> Self {
        self.core_radius = radius;
        self
    }
}

impl TestFunction for BlackBox {
    fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }
    fn derivative(&self, t: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(t))
    }
    fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }
    fn core_radius(&self) -> f64 {
        self.core_radius
    }
}

/// A single Hermite function `h_k`, with no closed-form transform: used to check the
/// transform machinery against the eigenfunction property.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermiteFunction {
    pub k: usize,
}

impl TestFunction for HermiteFunction {
    fn value(&self, t: f64) -> f64 {
        HermiteBasis::<f64>::new(self.k).eval_all(t)[self.k]
    }
    fn derivative(&self, t: f64) -> Option<f64> {
        Some(HermiteBasis::<f64>::new(self.k).derivatives(t)[self.k])
    }
    fn has_derivative(&self) -> bool {
        true
    }
    fn core_radius(&self) -> f64 {
        // turning point √(2k+1) plus room for the Gaussian decay
        (2.0 * self.k as f64 + 1.0).sqrt() + 10.0
    }
}

/// `f·χ_{[−T,T]}`.
#[derive(Debug, Clone, Copy)]
pub struct Windowed<F> {
    pub inner: F,
    pub half_width: f64,
}

impl<F: TestFunction> TestFunction for Windowed<F> {
    fn value(&self, t: f64) -> f64 {
        if t.abs() <= self.half_width {
            self.inner.value(t)
        } else {
            0.0
        }
    }
    fn l2_tail(&self, threshold: f64) -> Option<f64> {
        (threshold >= self.half_width).then_some(0.0)
    }
    fn core_radius(&self) -> f64 {
        self.half_width
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![-self.half_width, self.half_width]
    }
}

/// `∫_ℝ g` for an integrand `g` built from `f`: the core `[-R, R]` of `f` (split at its
/// breakpoints, started from the partition `frequency` asks for) plus both mapped tails.
pub fn line_integral_vec<F, G>(
    f: &F,
    g: G,
    dim: usize,
    spec: &QuadratureSpec,
    frequency: f64,
) -> Result<VecIntegrationResult<f64>, QuadError>
where
    F: TestFunction + ?Sized,
    G: Fn(f64, &mut [f64]) + Sync,
{
    let radius = f.core_radius();
    let mut cuts = vec![-radius];
    let mut inner: Vec<f64> = f
        .breakpoints()
        .into_iter()
        .filter(|b| b.abs() < radius)
        .collect();
    inner.sort_by(f64::total_cmp);
    cuts.extend(inner);
    cuts.push(radius);
    let mut total = VecIntegrationResult {
        values: vec![0.0; dim],
        error_estimate: 0.0,
        subdivisions_used: 0,
    };
    let mut add = |r: VecIntegrationResult<f64>| {
        for (t, v) in total.values.iter_mut().zip(&r.values) {
            *t += v;
        }
        total.error_estimate += r.error_estimate;
        total.subdivisions_used += r.subdivisions_used;
    };
    for w in cuts.windows(2) {
        let integ = Integrator::new(spec.with_frequency_hint(w[0], w[1], frequency))?;
        add(integ.integrate_vec_par(&g, dim, w[0], w[1])?);
    }
    add(Integrator::new(*spec)?.integrate_tail_vec_par(&g, dim, radius)?);
    Ok(total)
}

/// Scalar form of [`line_integral_vec`].
pub fn line_integral<F, G>(f: &F, g: G, spec: &QuadratureSpec, frequency: f64) -> Result<f64, QuadError>
where
    F: TestFunction + ?Sized,
    G: Fn(f64) -> f64 + Sync,
{
    Ok(line_integral_vec(f, |t, out: &mut [f64]| out[0] = g(t), 1, spec, frequency)?.values[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn trimodal_components_and_mass() {
        let f = GaussianMixture::trimodal();
        assert_eq!(f.components().len(), 3);
        assert_abs_diff_eq!(f.integral(), 1.0, epsilon = 1e-15);
        let direct = 0.5 * std_normal_pdf(0.8) + 3.0 * std_normal_pdf(0.0) + 2.0 * std_normal_pdf(4.0);
        assert_abs_diff_eq!(f.value(0.8), direct, epsilon = 1e-15);
        assert_abs_diff_eq!(f.value(0.8), 1.341_940_278_036_569_2, epsilon = 1e-13);
    }

    #[test]
    fn trimodal_is_essentially_supported_on_three() {
        let f = GaussianMixture::trimodal();
        let tail = f.l2_tail(3.0).unwrap();
        assert!(tail < 1e-5);
        // only the wide bump reaches past 3: 0.25·erfc(3)/(2√π)
        assert_relative_eq!(tail, 0.25 * 6.231_614_150_997_44e-6, max_relative = 1e-9);
    }

    #[test]
    fn fourier_at_zero_is_mass_over_root_two_pi() {
        let f = GaussianMixture::trimodal();
        let v = mixture_fourier(&f, 0.0);
        assert_abs_diff_eq!(v.re, INV_SQRT_2PI, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn standard_normal_is_its_own_transform() {
        let f = GaussianMixture::standard_normal();
        for w in [0.0, 0.5, 2.0, 7.0] {
            let v = mixture_fourier(&f, w);
            assert_abs_diff_eq!(v.re, std_normal_pdf(w), epsilon = 1e-16);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-16);
        }
    }

    #[test]
    fn center_shift_is_a_phase() {
        let a = GaussianMixture::from_triples(&[[1.3, 2.0, 0.0]]).unwrap();
        let b = GaussianMixture::from_triples(&[[1.3, 2.0, 0.9]]).unwrap();
        for w in [0.3, 1.7, 5.0] {
            assert_relative_eq!(mixture_fourier(&a, w).norm(), mixture_fourier(&b, w).norm(), max_relative = 1e-14);
        }
    }

    #[test]
    fn normal_tails() {
        let f = GaussianMixture::standard_normal();
        let (t0, w0) = mixture_tails(&f, 0.0, 0.0).unwrap();
        let half_root_pi = 1.0 / (2.0 * PI.sqrt());
        assert_relative_eq!(t0, half_root_pi, max_relative = 1e-14);
        assert_relative_eq!(w0, half_root_pi, max_relative = 1e-14);
        assert_relative_eq!(f.l2_norm_squared(), half_root_pi, max_relative = 1e-14);
    }

    #[test]
    fn json_triples_round_trip() {
        let f = GaussianMixture::from_json("[[0.5,1,0],[3,10,0.8],[2,10,1.2]]").unwrap();
        assert_eq!(f, GaussianMixture::trimodal());
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, "[[0.5,1.0,0.0],[3.0,10.0,0.8],[2.0,10.0,1.2]]");
        let back: GaussianMixture = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(f.to_string(), s);
    }

    #[test]
    fn bad_mixtures_are_rejected() {
        assert!(matches!(
            GaussianMixture::from_triples(&[[1.0, 0.0, 0.0]]),
            Err(MixtureError::BadScale { index: 0, .. })
        ));
        assert!(matches!(
            GaussianMixture::from_triples(&[[1.0, 1.0, 0.0], [f64::NAN, 1.0, 0.0]]),
            Err(MixtureError::NonFinite { index: 1 })
        ));
        assert!(GaussianMixture::from_json("[[1,2]]").is_err());
        assert!(serde_json::from_str::<GaussianMixture>("[[1,-2,0]]").is_err());
    }

    #[test]
    fn core_radius_covers_the_widest_bump() {
        assert_abs_diff_eq!(GaussianMixture::trimodal().core_radius(), 1.2 + 12.0, epsilon = 1e-12);
        assert_abs_diff_eq!(GaussianMixture::standard_normal().core_radius(), 12.0);
    }

    #[test]
    fn windowed_function_vanishes_outside() {
        let w = Windowed {
            inner: GaussianMixture::standard_normal(),
            half_width: 1.0,
        };
        assert_eq!(w.value(1.5), 0.0);
        assert_eq!(w.value(0.5), std_normal_pdf(0.5));
        assert_eq!(w.l2_tail(1.0), Some(0.0));
        assert_eq!(w.breakpoints(), vec![-1.0, 1.0]);
    }

    #[test]
    fn line_integral_respects_windows() {
        let spec = QuadratureSpec::default();
        let f = GaussianMixture::trimodal();
        let mass = line_integral(&f, |t| f.value(t), &spec, 0.0).unwrap();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
        let w = Windowed { inner: GaussianMixture::standard_normal(), half_width: 3.0 };
        let mass = line_integral(&w, |t| w.value(t), &spec, 0.0).unwrap();
        assert_abs_diff_eq!(mass, 0.997_300_203_936_739_8, epsilon = 1e-13);
    }

    #[test]
    fn hermite_function_values() {
        let h = HermiteFunction { k: 2 };
        assert_abs_diff_eq!(h.value(0.0), -0.531_125_966_013_598_5, epsilon = 1e-15);
        assert!(h.has_derivative());
        assert!(!h.has_fourier());
    }
}
