//! Asymptotic splitting of the Hermite reproducing kernel.
//!
//! With `k₁ = √(4n+1)`, `k₃ = √(4n+3)` and `N = (k₁ + k₃)/2`,
//!
//! ```text
//! Σ_{k≤2n} h_k(x)h_k(α)·(x − α) ≈ (1/π)(sin N(x−α) + M₁ + … + M₅)(x, α)
//! ```
//!
//! up to a factor `1 + O(1/n)`. `M₁ … M₄` are explicit trigonometric corrections and `M₅`
//! collects the remainders `T(2n, y)`, `T(2n+1, y)` of the cosine/sine approximations
//!
//! ```text
//! h_{2n}(y)   = h_{2n}(0)(cos k₁y + y³/6 · sin k₁y / k₁) + T(2n, y)/(4n+1)
//! h_{2n+1}(y) = h'_{2n+1}(0)(sin k₃y / k₃ − y³/6 · cos k₃y / (4n+3)) + T(2n+1, y)/(4n+3)
//! ```
//!
//! [`direct_sansone`] evaluates the five operator norms
//! `[(1/2T) ∫_{−T}^{T} |∫_{−T}^{T} M_k(x,α)/(x−α) f(α) dα|² dx]^{1/2}` by nested quadrature;
//! [`crate::bound`] estimates the same quantities in closed form.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bandlimit::{band_edge, NESTED_PANEL_ORDER};
use crate::hermite::{cd_scale, values_at_zero, HermiteBasis};
use crate::quadrature::{ErrorSlot, Integrator, QuadError, QuadratureSpec};
use crate::test_functions::TestFunction;

/// Largest `n` [`direct_sansone`] accepts without `force`.
pub const DIRECT_SANSONE_MAX_N: usize = 50;

/// Step of the symmetric difference used for `M_k(x,α)/(x−α)` at `α = x`.
pub const DIAGONAL_STEP: f64 = 1e-5;

/// Below this `|x − α|` the diagonal limit replaces the quotient.
pub const DIAGONAL_RADIUS: f64 = 1e-6;

/// Ratio samples with `|sin N(x−α) + ΣM| ≤` this are skipped.
pub const RATIO_DENOMINATOR_FLOOR: f64 = 0.1;

/// Slack added to the `1/(2K)` half-width of the ratio test.
pub const RATIO_SLACK: f64 = 5e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SansoneError {
    #[error("M-term index must be in 1..=5, got {0}")]
    BadIndex(usize),
    #[error("n must be at least 1 and T positive (n = {n}, T = {half_width})")]
    BadParams { n: usize, half_width: f64 },
    #[error("direct evaluation at n = {n} exceeds the budget n <= {limit}; force it to proceed")]
    Expensive { n: usize, limit: usize },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Sign of the `b_n` bracket of `M₅`.
///
/// `LeadingPlus` takes the bracket with a leading `+`. Expanding `A(x)B(α) − A(α)B(x)` with the
/// remainder definitions above gives the opposite sign, and only that choice makes the
/// decomposition ratio constant; it is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum M5Convention {
    #[default]
    Consistent,
    LeadingPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SansoneParams {
    pub n: usize,
    #[serde(rename = "N")]
    pub band: f64,
    #[serde(rename = "T")]
    pub half_width: f64,
}

impl SansoneParams {
    pub fn new(n: usize, half_width: f64) -> Result<Self, SansoneError> {
        if n == 0 || !(half_width > 0.0 && half_width.is_finite()) {
            return Err(SansoneError::BadParams { n, half_width });
        }
        Ok(Self {
            n,
            band: band_edge(2 * n).expect("2n is even"),
            half_width,
        })
    }

    pub fn order(&self) -> usize {
        2 * self.n
    }
}

/// `T(2n, y)` and `T(2n+1, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderPair {
    pub y: f64,
    pub t_even: f64,
    pub t_odd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MTermValue {
    pub k: usize,
    pub x: f64,
    pub alpha: f64,
    pub value: f64,
}

/// Everything about one abscissa that the M-terms need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointData {
    pub y: f64,
    cube6: f64,
    sin1: f64,
    cos1: f64,
    sin3: f64,
    cos3: f64,
    pub t_even: f64,
    pub t_odd: f64,
}

/// Constants of the splitting for one `n`.
#[derive(Debug, Clone)]
pub struct SansoneKernel {
    params: SansoneParams,
    convention: M5Convention,
    k1: f64,
    k3: f64,
    h0: f64,
    d0: f64,
    a_n: f64,
    b_n: f64,
    basis: HermiteBasis<f64>,
}

impl SansoneKernel {
    pub fn new(params: SansoneParams, convention: M5Convention) -> Self {
        let n = params.n;
        let k1 = ((4 * n + 1) as f64).sqrt();
        let k3 = ((4 * n + 3) as f64).sqrt();
        let (h0, d0) = values_at_zero::<f64>(n);
        Self {
            params,
            convention,
            k1,
            k3,
            h0,
            d0,
            a_n: 1.0 / (d0 * k3),
            b_n: 1.0 / (h0 * (4 * n + 1) as f64),
            basis: HermiteBasis::new(2 * n + 1),
        }
    }

    pub fn params(&self) -> &SansoneParams {
        &self.params
    }

    pub fn convention(&self) -> M5Convention {
        self.convention
    }

    /// `(a_n, b_n) = (1/(h'_{2n+1}(0)√(4n+3)), 1/(h_{2n}(0)(4n+1)))`.
    pub fn coefficients(&self) -> (f64, f64) {
        (self.a_n, self.b_n)
    }

    pub fn remainders(&self, y: f64) -> RemainderPair {
        let p = self.point(y);
        RemainderPair {
            y,
            t_even: p.t_even,
            t_odd: p.t_odd,
        }
    }

    pub fn point(&self, y: f64) -> PointData {
        let n = self.params.n;
        let mut h = vec![0.0; 2 * n + 2];
        self.basis.eval_into(y, &mut h);
        let (h_even, h_odd) = (h[2 * n], h[2 * n + 1]);
        let (sin1, cos1) = (self.k1 * y).sin_cos();
        let (sin3, cos3) = (self.k3 * y).sin_cos();
        let cube6 = y * y * y / 6.0;
        let p1 = (4 * n + 1) as f64;
        let p3 = (4 * n + 3) as f64;
        let t_even = p1 * (h_even - self.h0 * cos1 - self.h0 / self.k1 * cube6 * sin1);
        let t_odd = p3 * (h_odd - self.d0 * sin3 / self.k3 + self.d0 / p3 * cube6 * cos3);
        PointData {
            y,
            cube6,
            sin1,
            cos1,
            sin3,
            cos3,
            t_even,
            t_odd,
        }
    }

    /// `[M₁, …, M₅](x, α)`.
    pub fn m_terms(&self, px: &PointData, pa: &PointData) -> [f64; 5] {
        let (x, a) = (px.y, pa.y);
        let nb = self.params.band;
        let (k1, k3) = (self.k1, self.k3);
        let sum = x + a;
        let diff = x - a;
        let m1 = (nb * sum).cos() * (diff / (2.0 * nb)).sin()
            - 2.0 * (sum / (4.0 * nb)).sin().powi(2) * (nb * diff).sin();
        let m2 = (-px.cube6 * px.sin1 * pa.sin3 + pa.cube6 * pa.sin1 * px.sin3) / k1;
        let m3 = (pa.cube6 * px.cos1 * pa.cos3 - px.cube6 * pa.cos1 * px.cos3) / k3;
        let m4 = pa.cube6 * px.cube6 * (-px.cos3 * pa.sin1 + pa.cos3 * px.sin1) / (k1 * k3);
        let a_part = self.a_n
            * (px.t_odd * pa.cos1 - pa.t_odd * px.cos1 + px.t_odd * pa.cube6 * pa.sin1 / k1
                - pa.t_odd * px.cube6 * px.sin1 / k1);
        let b_part = self.b_n
            * (px.t_even * pa.sin3 - pa.t_even * px.sin3 + pa.t_even * px.cube6 * px.cos3 / k3
                - px.t_even * pa.cube6 * pa.cos3 / k3);
        let b_part = match self.convention {
            M5Convention::Consistent => -b_part,
            M5Convention::LeadingPlus => b_part,
        };
        let ab_part = self.a_n * self.b_n * (px.t_odd * pa.t_even - pa.t_odd * px.t_even);
        [m1, m2, m3, m4, a_part + b_part + ab_part]
    }

    /// `M_k(x, α)` for `k ∈ 1..=5`.
    pub fn m_term(&self, k: usize, x: f64, alpha: f64) -> Result<MTermValue, SansoneError> {
        if !(1..=5).contains(&k) {
            return Err(SansoneError::BadIndex(k));
        }
        let value = self.m_terms(&self.point(x), &self.point(alpha))[k - 1];
        Ok(MTermValue { k, x, alpha, value })
    }

    /// `M_k(x, α)/(x − α)` for all five `k`, with the diagonal limit
    /// `−∂_α M_k(x, α)|_{α=x}` taken by symmetric difference.
    pub fn m_quotients(&self, px: &PointData, alpha: f64) -> [f64; 5] {
        let d = px.y - alpha;
        if d.abs() < DIAGONAL_RADIUS {
            let up = self.m_terms(px, &self.point(px.y + DIAGONAL_STEP));
            let down = self.m_terms(px, &self.point(px.y - DIAGONAL_STEP));
            let mut out = [0.0; 5];
            for k in 0..5 {
                out[k] = -(up[k] - down[k]) / (2.0 * DIAGONAL_STEP);
            }
            out
        } else {
            self.m_terms(px, &self.point(alpha)).map(|m| m / d)
        }
    }

    /// `π·Σ_{k≤2n} h_k(x)h_k(α)·(x−α) / (sin N(x−α) + ΣM_k)`, or `None` when the denominator
    /// is at most [`RATIO_DENOMINATOR_FLOOR`] in size.
    pub fn decomposition_ratio(&self, x: f64, alpha: f64) -> Option<f64> {
        let m = 2 * self.params.n;
        let hx = self.basis.eval_all(x);
        let ha = self.basis.eval_all(alpha);
        let numerator = PI * cd_scale::<f64>(self.params.n) * (hx[m + 1] * ha[m] - ha[m + 1] * hx[m]);
        let den = (self.params.band * (x - alpha)).sin()
            + self.m_terms(&self.point(x), &self.point(alpha)).iter().sum::<f64>();
        (den.abs() > RATIO_DENOMINATOR_FLOOR).then(|| numerator / den)
    }

    /// Limit of the ratio: `π(2n+1)h_{2n}(0)² / √(4n+3)`.
    pub fn ratio_constant(&self) -> f64 {
        PI * (2 * self.params.n + 1) as f64 * self.h0 * self.h0 / self.k3
    }
}

/// Half-width `1/(2K) + 5·10⁻³` of the acceptance band of the ratio test.
pub fn ratio_tolerance(n: usize) -> f64 {
    1.0 / (4.0 * n as f64) + RATIO_SLACK
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTestReport {
    pub n: usize,
    pub convention: M5Convention,
    pub sampled: usize,
    /// Samples whose denominator cleared the floor.
    pub eligible: usize,
    pub passed: usize,
    pub tolerance: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl RatioTestReport {
    pub fn pass_fraction(&self) -> f64 {
        if self.eligible == 0 {
            0.0
        } else {
            self.passed as f64 / self.eligible as f64
        }
    }
}

/// Samples `(x, α)` uniformly from `[−r, r]²` and counts ratios inside `1 ± ratio_tolerance(n)`.
pub fn ratio_test(n: usize, convention: M5Convention, samples: usize, radius: f64, seed: u64) -> RatioTestReport {
    let params = SansoneParams::new(n, radius).expect("n >= 1 and radius > 0");
    let kernel = SansoneKernel::new(params, convention);
    let tolerance = ratio_tolerance(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = RatioTestReport {
        n,
        convention,
        sampled: samples,
        eligible: 0,
        passed: 0,
        tolerance,
        min_ratio: f64::INFINITY,
        max_ratio: f64::NEG_INFINITY,
    };
    for _ in 0..samples {
        let x = rng.gen_range(-radius..=radius);
        let a = rng.gen_range(-radius..=radius);
        if let Some(r) = kernel.decomposition_ratio(x, a) {
            report.eligible += 1;
            report.min_ratio = report.min_ratio.min(r);
            report.max_ratio = report.max_ratio.max(r);
            if (r - 1.0).abs() <= tolerance {
                report.passed += 1;
            }
        }
    }
    report
}

/// `|T(2n+1, y)|` majorant `y²/(π^{1/2}n^{1/4})(y⁴/18 + 1) + (4/187)y^{17/2}/√(4n+1)`.
pub fn odd_remainder_majorant(n: usize, y: f64) -> f64 {
    remainder_majorant(n, y, (4 * n + 1) as f64)
}

/// `|T(2n, y)|` majorant, as the odd one with `√(4n+3)`.
pub fn even_remainder_majorant(n: usize, y: f64) -> f64 {
    remainder_majorant(n, y, (4 * n + 3) as f64)
}

fn remainder_majorant(n: usize, y: f64, p: f64) -> f64 {
    let y = y.abs();
    let y2 = y * y;
    y2 / (PI.sqrt() * (n as f64).powf(0.25)) * (y2 * y2 / 18.0 + 1.0) + 4.0 / 187.0 * y.powf(8.5) / p.sqrt()
}

/// Options of [`direct_sansone`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DirectOptions {
    pub convention: M5Convention,
    /// Run even when `n` exceeds [`DIRECT_SANSONE_MAX_N`].
    pub force: bool,
}

/// The five norms `[(1/2T) ∫_{−T}^{T} |∫_{−T}^{T} M_k(x,α)/(x−α) f(α) dα|² dx]^{1/2}`.
///
/// Cost is quadratic in the number of quadrature nodes, which grows like `√n·T`; the outer
/// integral runs on the rayon pool.
pub fn direct_sansone<F: TestFunction + ?Sized>(
    f: &F,
    p: &SansoneParams,
    spec: &QuadratureSpec,
    options: DirectOptions,
) -> Result<[f64; 5], SansoneError> {
    if p.n > DIRECT_SANSONE_MAX_N && !options.force {
        return Err(SansoneError::Expensive {
            n: p.n,
            limit: DIRECT_SANSONE_MAX_N,
        });
    }
    let kernel = SansoneKernel::new(*p, options.convention);
    let t = p.half_width;
    // M_k oscillates in each variable at up to √(4n+3) ≈ N.
    let nested = spec
        .with_panel_order(spec.panel_order.min(NESTED_PANEL_ORDER))
        .with_frequency_hint(-t, t, p.band);
    let inner = Integrator::new(nested)?;
    let outer = Integrator::new(nested)?;
    let slot = ErrorSlot::default();
    let r = outer.integrate_vec_par(
        |x, out: &mut [f64]| {
            let px = kernel.point(x);
            let g = |a: f64, o: &mut [f64]| {
                let fa = f.value(a);
                if fa == 0.0 {
                    o.fill(0.0);
                    return;
                }
                let q = kernel.m_quotients(&px, a);
                for k in 0..5 {
                    o[k] = q[k] * fa;
                }
            };
            match slot.guard(inner.integrate_vec(g, 5, -t, t).map(Some)) {
                Some(v) => {
                    for (o, x) in out.iter_mut().zip(&v.values) {
                        *o = x * x;
                    }
                }
                None => out.fill(0.0),
            }
        },
        5,
        -t,
        t,
    )?;
    slot.finish(())?;
    Ok(std::array::from_fn(|k| (r.values[k].max(0.0) / (2.0 * t)).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_functions::GaussianMixture;
    use approx::assert_abs_diff_eq;

    fn kernel(n: usize) -> SansoneKernel {
        SansoneKernel::new(SansoneParams::new(n, 3.0).unwrap(), M5Convention::Consistent)
    }

    #[test]
    fn frequency_identities() {
        for n in [1usize, 10, 250, 1_000_000] {
            let p = SansoneParams::new(n, 1.0).unwrap();
            let k1 = ((4 * n + 1) as f64).sqrt();
            let k3 = ((4 * n + 3) as f64).sqrt();
            assert!((k3 - k1 - 1.0 / p.band).abs() < 1e-12);
            assert!(((k1 + k3) / 2.0 - p.band).abs() < 1e-12);
        }
    }

    #[test]
    fn remainders_vanish_at_origin() {
        let r = kernel(5).remainders(0.0);
        assert_abs_diff_eq!(r.t_even, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.t_odd, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn remainders_obey_their_majorants() {
        let k = kernel(5);
        let r = k.remainders(1.0);
        assert!(r.t_odd.abs() < odd_remainder_majorant(5, 1.0));
        let r = k.remainders(2.0);
        assert!(r.t_even.abs() < even_remainder_majorant(5, 2.0));
    }

    #[test]
    fn m_terms_vanish_on_the_diagonal() {
        let k = kernel(4);
        for x in [-1.3, 0.0, 0.7, 2.9] {
            for i in 1..=5 {
                assert_abs_diff_eq!(k.m_term(i, x, x).unwrap().value, 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn bad_m_index() {
        assert!(matches!(kernel(2).m_term(6, 0.1, 0.2), Err(SansoneError::BadIndex(6))));
        assert!(matches!(kernel(2).m_term(0, 0.1, 0.2), Err(SansoneError::BadIndex(0))));
    }

    #[test]
    fn m4_is_antisymmetric() {
        let k = kernel(7);
        for (x, a) in [(0.3, -1.2), (2.5, 1.0), (-2.0, 0.4)] {
            let m = k.m_term(4, x, a).unwrap().value;
            let n = k.m_term(4, a, x).unwrap().value;
            assert_abs_diff_eq!(m, -n, epsilon = 1e-14);
        }
    }

    #[test]
    fn ratio_is_constant_with_the_consistent_sign() {
        let k = kernel(5);
        let c = k.ratio_constant();
        assert!((c - 1.000_47).abs() < 1e-4);
        for (x, a) in [(0.3, -1.2), (2.5, 1.0), (-2.0, 0.4), (1.1, 1.3)] {
            if let Some(r) = k.decomposition_ratio(x, a) {
                assert!((r - c).abs() < 1e-9, "({x}, {a}): {r} vs {c}");
            }
        }
    }

    #[test]
    fn leading_plus_sign_spoils_the_ratio() {
        let report = ratio_test(10, M5Convention::LeadingPlus, 400, 3.0, 7);
        assert!(report.pass_fraction() < 0.9);
        let report = ratio_test(10, M5Convention::Consistent, 400, 3.0, 7);
        assert_eq!(report.passed, report.eligible);
    }

    #[test]
    fn direct_sansone_budget_and_zero_function() {
        let spec = QuadratureSpec::default();
        let zero = GaussianMixture::new(vec![]).unwrap();
        let p = SansoneParams::new(3, 2.0).unwrap();
        assert_eq!(direct_sansone(&zero, &p, &spec, DirectOptions::default()).unwrap(), [0.0; 5]);
        let big = SansoneParams::new(51, 2.0).unwrap();
        assert!(matches!(
            direct_sansone(&zero, &big, &spec, DirectOptions::default()),
            Err(SansoneError::Expensive { n: 51, .. })
        ));
    }

    #[test]
    fn diagonal_limit_matches_nearby_quotients() {
        let k = kernel(5);
        let px = k.point(0.7);
        let on = k.m_quotients(&px, 0.7);
        let near = k.m_quotients(&px, 0.7 + 1e-4);
        for i in 0..5 {
            assert!((on[i] - near[i]).abs() < 1e-2 * (1.0 + on[i].abs()), "M{}: {} vs {}", i + 1, on[i], near[i]);
        }
    }
}
