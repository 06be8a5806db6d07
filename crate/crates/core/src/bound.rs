//! Closed-form side of the error bound.
//!
//! For `K = 2n`, `N = (√(2K+1) + √(2K+3))/2` and a window `[−T, T]`,
//!
//! ```text
//! rms(f − S_K f) ≤ (1 + 1/K)([(1/2T)∫_{|t|>T} f²]^{1/2} + [(1/2T)∫_{|ω|>N} |f̂|²]^{1/2})
//!                + (1/K)[(1/2T)∫_{|t|≤T} f_N²]^{1/2}
//!                + (1/π)(1 + 1/(2K)) S_a(K, T)
//! ```
//!
//! where `S_a` is bounded by a fixed linear combination of 22 functionals of `f`
//! ([`MomentLedger`]) with coefficients depending only on `(n, N, T)` ([`CoefficientTable`]).
//! The coefficients live in [`TABLE`] as data, one record per summand.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bandlimit::{band_edge, f_n_eval, fourier_l2_tail, l2_tail, BandLimitError, NESTED_PANEL_ORDER};
use crate::quadrature::{ErrorSlot, Integrator, QuadError, QuadratureSpec};
use crate::test_functions::TestFunction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("truncation order K = {0} is odd; K must be even")]
    OddTruncation(usize),
    #[error("truncation order K = {0} is too small; need K >= 2")]
    OrderTooSmall(usize),
    #[error("T and N must be positive and finite (T = {half_width}, N = {band})")]
    BadParams { half_width: f64, band: f64 },
    #[error("derivative moments need f' but the function has no derivative")]
    MissingDerivative,
    #[error("ledger built for (n, N, T) = {ledger:?}, coefficients for {table:?}")]
    MismatchedParams {
        ledger: (usize, f64, f64),
        table: (usize, f64, f64),
    },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    BandLimit(#[from] BandLimitError),
}

/// The functionals of `f` the coefficient table multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `∫_{−T}^{T} |f(α)α^j| dα`.
    AbsMoment(u8),
    /// `∫_{−T}^{T} |f'(α)α^j| dα`.
    DerivAbsMoment(u8),
    /// `[∫_{−T}^{T} |f(α)α^j|² dα]^{1/2}`, `j = 1, 2, 3`.
    L2Alpha(u8),
    /// `[∫_{−T}^{T} f_N²]^{1/2}`.
    L2FN,
    /// `[∫_{−T}^{T} |f_N(α)α⁴|²]^{1/2}`.
    L2FNAlpha4,
    /// `[∫_{−T}^{T} |f(α)ω(α)|²]^{1/2}`.
    L2FOmega,
    /// `[∫_{−T}^{T} |f_N(α)ω(α)|²]^{1/2}`.
    L2FNOmega,
    /// `|f(−T)| + |f(T)|`.
    Boundary,
    /// `[∫_{|α|>T} f²]^{1/2}`.
    TailT,
    /// `[∫_{|ω|>N} |f̂|²]^{1/2}`.
    TailOmega,
}

impl Functional {
    /// All 22 functionals in table order.
    pub fn all() -> Vec<Functional> {
        let mut v: Vec<Functional> = (0..8).map(Functional::AbsMoment).collect();
        v.extend((0..4).map(Functional::DerivAbsMoment));
        v.extend((1..4).map(Functional::L2Alpha));
        v.extend([
            Functional::L2FN,
            Functional::L2FNAlpha4,
            Functional::L2FOmega,
            Functional::L2FNOmega,
            Functional::Boundary,
            Functional::TailT,
            Functional::TailOmega,
        ]);
        v
    }

    /// Stable identifier used in JSON and CSV output.
    pub fn id(&self) -> String {
        match self {
            Functional::AbsMoment(j) => format!("abs_moment_{j}"),
            Functional::DerivAbsMoment(j) => format!("deriv_abs_moment_{j}"),
            Functional::L2Alpha(j) => format!("l2_alpha{j}"),
            Functional::L2FN => "l2_fN".into(),
            Functional::L2FNAlpha4 => "l2_fN_alpha4".into(),
            Functional::L2FOmega => "l2_f_omega".into(),
            Functional::L2FNOmega => "l2_fN_omega".into(),
            Functional::Boundary => "boundary".into(),
            Functional::TailT => "tail_t".into(),
            Functional::TailOmega => "tail_omega".into(),
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// `ω(α) = α²(α⁴/18 + 1)/π^{1/2} + (2/187)|α|^{17/2}/n^{1/4}`.
pub fn omega_weight(n: usize, alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    a2 * (a2 * a2 / 18.0 + 1.0) / PI.sqrt() + 2.0 / 187.0 * alpha.abs().powf(8.5) / (n as f64).powf(0.25)
}

/// Values of every [`Functional`] for one `f` and one `(n, N, T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentLedger {
    pub n: usize,
    #[serde(rename = "N")]
    pub band: f64,
    #[serde(rename = "T")]
    pub half_width: f64,
    pub abs_moment: [f64; 8],
    pub deriv_abs_moment: [f64; 4],
    pub l2_alpha1: f64,
    pub l2_alpha2: f64,
    pub l2_alpha3: f64,
    #[serde(rename = "l2_fN")]
    pub l2_f_n: f64,
    #[serde(rename = "l2_fN_alpha4")]
    pub l2_f_n_alpha4: f64,
    pub l2_f_omega: f64,
    #[serde(rename = "l2_fN_omega")]
    pub l2_f_n_omega: f64,
    pub boundary: f64,
    pub tail_t: f64,
    pub tail_omega: f64,
    /// `[∫_{−T}^{T} f²]^{1/2}`; not in the table, feeds the `f` variant of the `f_N` term.
    pub l2_f: f64,
}

impl MomentLedger {
    pub fn get(&self, functional: Functional) -> f64 {
        match functional {
            Functional::AbsMoment(j) => self.abs_moment[j as usize],
            Functional::DerivAbsMoment(j) => self.deriv_abs_moment[j as usize],
            Functional::L2Alpha(1) => self.l2_alpha1,
            Functional::L2Alpha(2) => self.l2_alpha2,
            Functional::L2Alpha(3) => self.l2_alpha3,
            Functional::L2Alpha(j) => panic!("no l2_alpha{j} functional"),
            Functional::L2FN => self.l2_f_n,
            Functional::L2FNAlpha4 => self.l2_f_n_alpha4,
            Functional::L2FOmega => self.l2_f_omega,
            Functional::L2FNOmega => self.l2_f_n_omega,
            Functional::Boundary => self.boundary,
            Functional::TailT => self.tail_t,
            Functional::TailOmega => self.tail_omega,
        }
    }

    fn params(&self) -> (usize, f64, f64) {
        (self.n, self.band, self.half_width)
    }
}

fn check_params(half_width: f64, band: f64) -> Result<(), BoundError> {
    if half_width > 0.0 && half_width.is_finite() && band > 0.0 && band.is_finite() {
        Ok(())
    } else {
        Err(BoundError::BadParams { half_width, band })
    }
}

/// Computes every ledger entry. Tails use the closed forms of `f` when it has them; the
/// `f_N` entries integrate [`f_n_eval`] over the window.
pub fn moment_ledger<F: TestFunction + ?Sized>(
    f: &F,
    n: usize,
    half_width: f64,
    band: f64,
    spec: &QuadratureSpec,
) -> Result<MomentLedger, BoundError> {
    check_params(half_width, band)?;
    if !f.has_derivative() {
        return Err(BoundError::MissingDerivative);
    }
    let t = half_width;
    let integ = Integrator::new(*spec)?;
    let window = |g: &dyn Fn(f64) -> f64| -> Result<f64, QuadError> { Ok(integ.integrate(g, -t, t)?.value) };

    let mut abs_moment = [0.0; 8];
    for (j, m) in abs_moment.iter_mut().enumerate() {
        *m = window(&|a| (f.value(a) * a.powi(j as i32)).abs())?;
    }
    let mut deriv_abs_moment = [0.0; 4];
    for (j, m) in deriv_abs_moment.iter_mut().enumerate() {
        *m = window(&|a| (f.derivative(a).unwrap_or(0.0) * a.powi(j as i32)).abs())?;
    }
    let l2 = |j: i32| window(&|a| (f.value(a) * a.powi(j)).powi(2)).map(f64::sqrt);
    let l2_f_omega = window(&|a| (f.value(a) * omega_weight(n, a)).powi(2))?.sqrt();

    // One panel per period of the band edge; f_N carries little energy near N.
    let nested = spec.with_panel_order(spec.panel_order.min(NESTED_PANEL_ORDER));
    let periods = (band * t / PI).ceil() as usize;
    let outer = Integrator::new(nested.with_initial_panels(periods.max(8)))?;
    let slot = ErrorSlot::default();
    let fn_parts = outer.integrate_vec_par(
        |a, out: &mut [f64]| {
            let v = slot.guard(f_n_eval(f, band, a, &nested)).powi(2);
            out[0] = v;
            out[1] = v * a.powi(8);
            out[2] = v * omega_weight(n, a).powi(2);
        },
        3,
        -t,
        t,
    )?;
    slot.finish(())?;

    Ok(MomentLedger {
        n,
        band,
        half_width,
        abs_moment,
        deriv_abs_moment,
        l2_alpha1: l2(1)?,
        l2_alpha2: l2(2)?,
        l2_alpha3: l2(3)?,
        l2_f_n: fn_parts.values[0].max(0.0).sqrt(),
        l2_f_n_alpha4: fn_parts.values[1].max(0.0).sqrt(),
        l2_f_omega,
        l2_f_n_omega: fn_parts.values[2].max(0.0).sqrt(),
        boundary: f.value(-t).abs() + f.value(t).abs(),
        tail_t: l2_tail(f, t, spec)?.max(0.0).sqrt(),
        tail_omega: fourier_l2_tail(f, band, spec)?.max(0.0).sqrt(),
        l2_f: l2(0)?,
    })
}

/// Base of one factor of a summand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Base {
    Lit(f64),
    /// Window half-width `T`.
    T,
    /// Band edge `N`.
    N,
    /// `n = K/2`.
    SmallN,
    /// `4n + 1`.
    P1,
    /// `4n + 3`.
    P3,
    Pi,
    /// `ω(T)`.
    OmegaT,
}

/// One summand: `prefactor · Π base^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summand {
    pub text: &'static str,
    pub prefactor: f64,
    pub factors: &'static [(Base, f64)],
    /// Why this summand, taken literally, looks wrong.
    pub suspect: Option<&'static str>,
}

impl Summand {
    pub fn eval(&self, n: usize, band: f64, half_width: f64) -> f64 {
        let nf = n as f64;
        self.factors.iter().fold(self.prefactor, |acc, &(base, e)| {
            let b = match base {
                Base::Lit(c) => c,
                Base::T => half_width,
                Base::N => band,
                Base::SmallN => nf,
                Base::P1 => 4.0 * nf + 1.0,
                Base::P3 => 4.0 * nf + 3.0,
                Base::Pi => PI,
                Base::OmegaT => omega_weight(n, half_width),
            };
            acc * b.powf(e)
        })
    }
}

/// Coefficient of one functional: the sum of its summands.
#[derive(Debug, Clone, Copy)]
pub struct TableBlock {
    pub functional: Functional,
    pub summands: &'static [Summand],
}

use Base::{Lit, OmegaT, Pi, SmallN, N, P1, P3, T};

const fn s(text: &'static str, prefactor: f64, factors: &'static [(Base, f64)]) -> Summand {
    Summand {
        text,
        prefactor,
        factors,
        suspect: None,
    }
}

const fn sus(text: &'static str, prefactor: f64, factors: &'static [(Base, f64)], why: &'static str) -> Summand {
    Summand {
        text,
        prefactor,
        factors,
        suspect: Some(why),
    }
}

const ROOT9: &str = "√9 = 3 written as a radical; every sibling radical is of a non-square";
const OMEGA_FN_POWER: &str = "T^{5/2} here, while the corresponding running estimate carries T^{-1/2}";

/// `(3/2)^{1/4}`.
const R: (Base, f64) = (Lit(1.5), 0.25);

/// The coefficient table, summand by summand.
pub const TABLE: &[TableBlock] = &[
    TableBlock {
        functional: Functional::AbsMoment(0),
        summands: &[
            s("T²/(48√5 N³)", 1.0 / 48.0, &[(T, 2.0), (Lit(5.0), -0.5), (N, -3.0)]),
            sus("T³/(384√9 N⁴)", 1.0 / 384.0, &[(T, 3.0), (Lit(9.0), -0.5), (N, -4.0)], ROOT9),
            s("1/(8N³)", 1.0 / 8.0, &[(N, -3.0)]),
            s("T/(6√3 √((4n+1)(4n+3)))", 1.0 / 6.0, &[(T, 1.0), (Lit(3.0), -0.5), (P1, -0.5), (P3, -0.5)]),
            s("T/(6√3 (4n+3))", 1.0 / 6.0, &[(T, 1.0), (Lit(3.0), -0.5), (P3, -1.0)]),
            s("T⁵/(288√11 N³ √(4n+3))", 1.0 / 288.0, &[(T, 5.0), (Lit(11.0), -0.5), (N, -3.0), (P3, -0.5)]),
            s("T¹⁰/(3870720√21 √(4n+3) N⁶)", 1.0 / 3_870_720.0, &[(T, 10.0), (Lit(21.0), -0.5), (P3, -0.5), (N, -6.0)]),
            s("T⁶/(36√13 N² √(4n+3))", 1.0 / 36.0, &[(T, 6.0), (Lit(13.0), -0.5), (N, -2.0), (P3, -0.5)]),
            s("T⁸/(720√17 N⁴ √(4n+3))", 1.0 / 720.0, &[(T, 8.0), (Lit(17.0), -0.5), (N, -4.0), (P3, -0.5)]),
        ],
    },
    TableBlock {
        functional: Functional::AbsMoment(1),
        summands: &[
            s("T/(48√3 N³)", 1.0 / 48.0, &[(T, 1.0), (Lit(3.0), -0.5), (N, -3.0)]),
            s("3T²/(128√5 N⁴)", 3.0 / 128.0, &[(T, 2.0), (Lit(5.0), -0.5), (N, -4.0)]),
            s("1/(3(4n+3))", 1.0 / 3.0, &[(P3, -1.0)]),
            s("1/(3√((4n+1)(4n+3)))", 1.0 / 3.0, &[(P1, -0.5), (P3, -0.5)]),
            sus("T⁴/(144√9 N³ √(4n+3))", 1.0 / 144.0, &[(T, 4.0), (Lit(9.0), -0.5), (N, -3.0), (P3, -0.5)], ROOT9),
            s("7T⁹/(3870720√19 √(4n+3) N⁶)", 7.0 / 3_870_720.0, &[(T, 9.0), (Lit(19.0), -0.5), (P3, -0.5), (N, -6.0)]),
        ],
    },
    TableBlock {
        functional: Functional::AbsMoment(2),
        summands: &[
            s("1/(48N³)", 1.0 / 48.0, &[(N, -3.0)]),
            s("T/(128√3 N⁴)", 1.0 / 128.0, &[(T, 1.0), (Lit(3.0), -0.5), (N, -4.0)]),
            s("1/(2N² √(4n+1))", 0.5, &[(N, -2.0), (P1, -0.5)]),
            s("T³/(288√(7(4n+1)) N³)", 1.0 / 288.0, &[(T, 3.0), (Lit(7.0), -0.5), (P1, -0.5), (N, -3.0)]),
            s("21T⁸/(3870720√17 √(4n+3) N⁶)", 21.0 / 3_870_720.0, &[(T, 8.0), (Lit(17.0), -0.5), (P3, -0.5), (N, -6.0)]),
        ],
    },
    TableBlock {
        functional: Functional::AbsMoment(3),
        summands: &[
            s("1/(384N⁴)", 1.0 / 384.0, &[(N, -4.0)]),
            s("T³/(48√7 N² √(4n+1))", 1.0 / 48.0, &[(T, 3.0), (Lit(7.0), -0.5), (N, -2.0), (P1, -0.5)]),
            s("1/(2N² √(4n+3))", 0.5, &[(N, -2.0), (P3, -0.5)]),
            s("T²/(288√(5(4n+1)) N³)", 1.0 / 288.0, &[(T, 2.0), (Lit(5.0), -0.5), (P1, -0.5), (N, -3.0)]),
            s("35T⁷/(3870720√15 √(4n+3) N⁶)", 35.0 / 3_870_720.0, &[(T, 7.0), (Lit(15.0), -0.5), (P3, -0.5), (N, -6.0)]),
            s("T³/(36√7 N² √(4n+3))", 1.0 / 36.0, &[(T, 3.0), (Lit(7.0), -0.5), (N, -2.0), (P3, -0.5)]),
        ],
    },
    TableBlock {
        functional: Functional::AbsMoment(4),
        summands: &[
            s("T/(144√5 N³ √(4n+1))", 1.0 / 144.0, &[(T, 1.0), (Lit(5.0), -0.5), (N, -3.0), (P1, -0.5)]),
            s("T²/(16√5 N² √(4n+1))", 1.0 / 16.0, &[(T, 2.0), (Lit(5.0), -0.5), (N, -2.0), (P1, -0.5)]),
            s("35T⁶/(3870720√13 N⁶ √(4n+3))", 35.0 / 3_870_720.0, &[(T, 6.0), (Lit(13.0), -0.5), (N, -6.0), (P3, -0.5)]),
        ],
    },
    TableBlock {
        functional: Functional::AbsMoment(5),
        summands: &[
            s("1/(288N³ √(4n+1))", 1.0 / 288.0, &[(N, -3.0), (P1, -0.5)]),
            s("T/(16√3 N² √(4n+1))", 1.0 / 16.0, &[(T, 1.0), (Lit(3.0), -0.5), (N, -2.0), (P1, -0.5)]),
            s("21T⁵/(3870720√11 N⁶ √(4n+3))", 21.0 / 3_870_720.0, &[(T, 5.0), (Lit(11.0), -0.5), (N, -6.0), (P3, -0.5)]),
            s("T³/(720√(7(4n+3)) N⁴)", 1.0 / 720.0, &[(T, 3.0), (Lit(7.0), -0.5), (P3, -0.5), (N, -4.0)]),
        ],
    },
    TableBlock {
        functional: Functional::AbsMoment(6),
        summands: &[
            s("1/(48N² √(4n+1))", 1.0 / 48.0, &[(N, -2.0), (P1, -0.5)]),
            sus("7T⁴/(3870720√9 √(4n+3) N⁶)", 7.0 / 3_870_720.0, &[(T, 4.0), (Lit(9.0), -0.5), (P3, -0.5), (N, -6.0)], ROOT9),
        ],
    },
    TableBlock {
        functional: Functional::AbsMoment(7),
        summands: &[s("T³/(3870720√7 √(4n+3) N⁶)", 1.0 / 3_870_720.0, &[(T, 3.0), (Lit(7.0), -0.5), (P3, -0.5), (N, -6.0)])],
    },
    TableBlock {
        functional: Functional::DerivAbsMoment(0),
        summands: &[
            s("1/(2N²)", 0.5, &[(N, -2.0)]),
            s("1/(4N³)", 0.25, &[(N, -3.0)]),
            s("T²/(6√5 √((4n+1)(4n+3)))", 1.0 / 6.0, &[(T, 2.0), (Lit(5.0), -0.5), (P1, -0.5), (P3, -0.5)]),
            s("T²/(6√5 (4n+3))", 1.0 / 6.0, &[(T, 2.0), (Lit(5.0), -0.5), (P3, -1.0)]),
        ],
    },
    TableBlock {
        functional: Functional::DerivAbsMoment(1),
        summands: &[
            s("T/(6√3 √((4n+1)(4n+3)))", 1.0 / 6.0, &[(T, 1.0), (Lit(3.0), -0.5), (P1, -0.5), (P3, -0.5)]),
            s("T/(6√3 (4n+3))", 1.0 / 6.0, &[(T, 1.0), (Lit(3.0), -0.5), (P3, -1.0)]),
            s("T³/(6√7 N² √(4n+3))", 1.0 / 6.0, &[(T, 3.0), (Lit(7.0), -0.5), (N, -2.0), (P3, -0.5)]),
        ],
    },
    TableBlock {
        functional: Functional::DerivAbsMoment(2),
        summands: &[
            s("1/(6√((4n+1)(4n+3)))", 1.0 / 6.0, &[(P1, -0.5), (P3, -0.5)]),
            s("1/(6(4n+3))", 1.0 / 6.0, &[(P3, -1.0)]),
        ],
    },
    TableBlock {
        functional: Functional::DerivAbsMoment(3),
        summands: &[s("1/(6√(4n+1) N²)", 1.0 / 6.0, &[(P1, -0.5), (N, -2.0)])],
    },
    TableBlock {
        functional: Functional::L2Alpha(1),
        summands: &[
            s("πT^{5/2}/(6√2 N √(4n+3))", 1.0 / 6.0, &[(Pi, 1.0), (T, 2.5), (Lit(2.0), -0.5), (N, -1.0), (P3, -0.5)]),
            s("πT^{1/2}/(4N²)", 0.25, &[(Pi, 1.0), (T, 0.5), (N, -2.0)]),
        ],
    },
    TableBlock {
        functional: Functional::L2Alpha(2),
        summands: &[s("√2π T^{-1/2}/(8N²)", 1.0 / 8.0, &[(Lit(2.0), 0.5), (Pi, 1.0), (T, -0.5), (N, -2.0)])],
    },
    TableBlock {
        functional: Functional::L2Alpha(3),
        summands: &[
            s("πT^{1/2}/(6√(2(4n+1)) N)", 1.0 / 6.0, &[(Pi, 1.0), (T, 0.5), (Lit(2.0), -0.5), (P1, -0.5), (N, -1.0)]),
            s("√2πT^{5/2}/(9√((4n+1)(4n+3)))", 1.0 / 9.0, &[(Lit(2.0), 0.5), (Pi, 1.0), (T, 2.5), (P1, -0.5), (P3, -0.5)]),
            s(
                "(2/3)√(π/2)(3/2)^{1/4} T^{-1/2}ω(T)/(n√(4n+1))",
                2.0 / 3.0,
                &[(Pi, 0.5), (Lit(2.0), -0.5), R, (T, -0.5), (OmegaT, 1.0), (SmallN, -1.0), (P1, -0.5)],
            ),
            s(
                "(1/24)√(π³/2)(3/2)^{1/4} T^{-1/2}ω(T)/(n√(4n+3))",
                1.0 / 24.0,
                &[(Pi, 1.5), (Lit(2.0), -0.5), R, (T, -0.5), (OmegaT, 1.0), (SmallN, -1.0), (P3, -0.5)],
            ),
        ],
    },
    TableBlock {
        functional: Functional::L2FN,
        summands: &[s("√2π T^{3/2}/(8N²)", 1.0 / 8.0, &[(Lit(2.0), 0.5), (Pi, 1.0), (T, 1.5), (N, -2.0)])],
    },
    TableBlock {
        functional: Functional::L2FNAlpha4,
        summands: &[s("√2π T^{-1/2}/(12N√(4n+3))", 1.0 / 12.0, &[(Lit(2.0), 0.5), (Pi, 1.0), (T, -0.5), (N, -1.0), (P3, -0.5)])],
    },
    TableBlock {
        functional: Functional::L2FOmega,
        summands: &[
            s(
                "(√2/3)π^{1/2}T^{5/2}(3/2)^{1/4}/(n√(4n+1))",
                1.0 / 3.0,
                &[(Lit(2.0), 0.5), (Pi, 0.5), (T, 2.5), R, (SmallN, -1.0), (P1, -0.5)],
            ),
            s(
                "π^{3/2}T^{5/2}(3/2)^{1/4}/(24√2 n√(4n+3))",
                1.0 / 24.0,
                &[(Lit(2.0), -0.5), (Pi, 1.5), (T, 2.5), R, (SmallN, -1.0), (P3, -0.5)],
            ),
            s("√2π T^{-1/2}ω(T)/n²", 1.0, &[(Lit(2.0), 0.5), (Pi, 1.0), (T, -0.5), (SmallN, -2.0), (OmegaT, 1.0)]),
        ],
    },
    TableBlock {
        functional: Functional::L2FNOmega,
        summands: &[
            s("4√2π^{1/2}T^{-1/2}(3/2)^{1/4}/n", 4.0, &[(Lit(2.0), 0.5), (Pi, 0.5), (T, -0.5), R, (SmallN, -1.0)]),
            sus(
                "π^{3/2}T^{5/2}(3/2)^{1/4}/(12√2 n)",
                1.0 / 12.0,
                &[(Lit(2.0), -0.5), (Pi, 1.5), (T, 2.5), R, (SmallN, -1.0)],
                OMEGA_FN_POWER,
            ),
        ],
    },
    TableBlock {
        functional: Functional::Boundary,
        summands: &[
            s("1/(2N²)", 0.5, &[(N, -2.0)]),
            s("T(1 + 1/√3)/(8N³)", 1.0 / 8.0, &[(T, 1.0), (Lit(1.0 + 0.577_350_269_189_625_8), 1.0), (N, -3.0)]),
            s(
                "T²(1 + 1/√3 + 1/√5)/(6√((4n+1)(4n+3)))",
                1.0 / 6.0,
                &[(T, 2.0), (Lit(1.0 + 0.577_350_269_189_625_8 + 0.447_213_595_499_958), 1.0), (P1, -0.5), (P3, -0.5)],
            ),
            s("T³/(6N²√(4n+1))", 1.0 / 6.0, &[(T, 3.0), (N, -2.0), (P1, -0.5)]),
            s(
                "T²(1 + 1/√3 + 1/√5)/(6(4n+3))",
                1.0 / 6.0,
                &[(T, 2.0), (Lit(1.0 + 0.577_350_269_189_625_8 + 0.447_213_595_499_958), 1.0), (P3, -1.0)],
            ),
            s("T³/(6√7 N²√(4n+3))", 1.0 / 6.0, &[(T, 3.0), (Lit(7.0), -0.5), (N, -2.0), (P3, -0.5)]),
        ],
    },
    TableBlock {
        functional: Functional::TailT,
        summands: TAIL_SUMMANDS,
    },
    TableBlock {
        functional: Functional::TailOmega,
        summands: TAIL_SUMMANDS,
    },
];

const TAIL_SUMMANDS: &[Summand] = &[
    s(
        "2√2π^{1/2}T^{-1/2}(3/2)^{1/4}ω(T)/n",
        2.0,
        &[(Lit(2.0), 0.5), (Pi, 0.5), (T, -0.5), R, (OmegaT, 1.0), (SmallN, -1.0)],
    ),
    s("√2πT^{7/2}/(12N√(4n+3))", 1.0 / 12.0, &[(Lit(2.0), 0.5), (Pi, 1.0), (T, 3.5), (N, -1.0), (P3, -0.5)]),
    s(
        "π^{3/2}T^{-1/2}(3/2)^{1/4}ω(T)/(24√2 n)",
        1.0 / 24.0,
        &[(Lit(2.0), -0.5), (Pi, 1.5), (T, -0.5), R, (OmegaT, 1.0), (SmallN, -1.0)],
    ),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummandValue {
    pub text: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suspect: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub functional: String,
    pub coefficient: f64,
    pub summands: Vec<SummandValue>,
}

/// [`TABLE`] evaluated at one `(n, N, T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub n: usize,
    #[serde(rename = "N")]
    pub band: f64,
    #[serde(rename = "T")]
    pub half_width: f64,
    pub entries: Vec<CoefficientEntry>,
}

impl CoefficientTable {
    pub fn coefficient(&self, functional: Functional) -> f64 {
        let id = functional.id();
        self.entries
            .iter()
            .find(|e| e.functional == id)
            .map(|e| e.coefficient)
            .unwrap_or(0.0)
    }

    /// Text of every summand flagged suspect, with its reason.
    pub fn suspects(&self) -> Vec<(String, String, String)> {
        self.entries
            .iter()
            .flat_map(|e| {
                e.summands.iter().filter_map(move |s| {
                    s.suspect
                        .as_ref()
                        .map(|why| (e.functional.clone(), s.text.clone(), why.clone()))
                })
            })
            .collect()
    }

    fn params(&self) -> (usize, f64, f64) {
        (self.n, self.band, self.half_width)
    }
}

pub fn coefficient_table(n: usize, band: f64, half_width: f64) -> CoefficientTable {
    let entries = TABLE
        .iter()
        .map(|block| {
            let summands: Vec<SummandValue> = block
                .summands
                .iter()
                .map(|s| SummandValue {
                    text: s.text.to_string(),
                    value: s.eval(n, band, half_width),
                    suspect: s.suspect.map(str::to_string),
                })
                .collect();
            CoefficientEntry {
                functional: block.functional.id(),
                coefficient: summands.iter().map(|s| s.value).sum(),
                summands,
            }
        })
        .collect();
    CoefficientTable {
        n,
        band,
        half_width,
        entries,
    }
}

/// `Σ coefficient × functional`, the closed-form upper estimate of `S_a(K, T)`.
pub fn sansone_upper(ledger: &MomentLedger, table: &CoefficientTable) -> Result<f64, BoundError> {
    if ledger.params() != table.params() {
        return Err(BoundError::MismatchedParams {
            ledger: ledger.params(),
            table: table.params(),
        });
    }
    Ok(Functional::all()
        .into_iter()
        .map(|f| table.coefficient(f) * ledger.get(f))
        .sum())
}

/// The four terms of the bound and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    #[serde(rename = "K")]
    pub order: usize,
    pub n: usize,
    #[serde(rename = "N")]
    pub band: f64,
    #[serde(rename = "T")]
    pub half_width: f64,
    pub term_tail_t: f64,
    pub term_tail_omega: f64,
    #[serde(rename = "term_fN")]
    pub term_f_n: f64,
    /// `term_fN` with `f` in place of `f_N`.
    #[serde(rename = "term_fN_f_variant")]
    pub term_f_n_f_variant: f64,
    pub term_sansone: f64,
    /// Closed-form estimate of `S_a(K, T)`.
    pub sansone_upper: f64,
    pub total: f64,
}

/// Everything the bound was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub breakdown: BoundBreakdown,
    pub ledger: MomentLedger,
    pub coefficients: CoefficientTable,
}

/// Bound for even `K ≥ 2` with `N` from [`band_edge`].
pub fn theorem1_bound<F: TestFunction + ?Sized>(
    f: &F,
    order: usize,
    half_width: f64,
    spec: &QuadratureSpec,
) -> Result<BoundBreakdown, BoundError> {
    Ok(bound_report(f, order, half_width, None, spec)?.breakdown)
}

/// As [`theorem1_bound`], optionally with `N` overridden, keeping the ledger and table.
pub fn bound_report<F: TestFunction + ?Sized>(
    f: &F,
    order: usize,
    half_width: f64,
    band: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<BoundReport, BoundError> {
    if order % 2 == 1 {
        return Err(BoundError::OddTruncation(order));
    }
    if order < 2 {
        return Err(BoundError::OrderTooSmall(order));
    }
    let n = order / 2;
    let band = match band {
        Some(b) => b,
        None => band_edge(order)?,
    };
    check_params(half_width, band)?;
    let ledger = moment_ledger(f, n, half_width, band, spec)?;
    let coefficients = coefficient_table(n, band, half_width);
    let breakdown = assemble(&ledger, &coefficients, order)?;
    Ok(BoundReport {
        breakdown,
        ledger,
        coefficients,
    })
}

/// Combines a ledger and a table into the four terms.
pub fn assemble(ledger: &MomentLedger, table: &CoefficientTable, order: usize) -> Result<BoundBreakdown, BoundError> {
    let k = order as f64;
    let t2 = 2.0 * ledger.half_width;
    let upper = sansone_upper(ledger, table)?;
    let term_tail_t = (1.0 + 1.0 / k) * (ledger.tail_t.powi(2) / t2).sqrt();
    let term_tail_omega = (1.0 + 1.0 / k) * (ledger.tail_omega.powi(2) / t2).sqrt();
    let term_f_n = ledger.l2_f_n / t2.sqrt() / k;
    let term_sansone = (1.0 + 1.0 / (2.0 * k)) * upper / PI;
    Ok(BoundBreakdown {
        order,
        n: ledger.n,
        band: ledger.band,
        half_width: ledger.half_width,
        term_tail_t,
        term_tail_omega,
        term_f_n,
        term_f_n_f_variant: ledger.l2_f / t2.sqrt() / k,
        term_sansone,
        sansone_upper: upper,
        total: term_tail_t + term_tail_omega + term_f_n + term_sansone,
    })
}
