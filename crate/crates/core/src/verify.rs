//! Property suites that exercise every module against independent references.
//!
//! Each suite returns a list of [`Check`]s, one per measured inequality, so a
//! failure names the exact configuration that broke.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bandlimit::{band_edge, fourier_by_quadrature, lemma2_residual, BandLimitParams};
use crate::bound::{bound_report, coefficient_table, moment_ledger, sansone_upper};
use crate::hermite::{cd_kernel, cd_scale, kernel_sum, HermiteBasis};
use crate::quadrature::{Integrator, QuadratureSpec};
use crate::sansone::{direct_sansone, ratio_test, DirectOptions, M5Convention, SansoneParams};
use crate::series::{coefficients, measure_error, oscillation_frequency};
use crate::test_functions::{GaussianMixture, HermiteFunction, TestFunction};

/// Fraction of eligible samples the decomposition ratio test must pass.
pub const RATIO_PASS_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Depth {
    #[default]
    Quick,
    Full,
}

impl FromStr for Depth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quick" => Ok(Depth::Quick),
            "full" => Ok(Depth::Full),
            other => Err(format!("unknown depth '{other}' (expected quick or full)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Orthonormality,
    FourierEigen,
    CdKernel,
    BandLimit,
    Decomposition,
    Dominance,
    BoundValidity,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Orthonormality,
        Suite::FourierEigen,
        Suite::CdKernel,
        Suite::BandLimit,
        Suite::Decomposition,
        Suite::Dominance,
        Suite::BoundValidity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Orthonormality => "orthonormality",
            Suite::FourierEigen => "fourier-eigen",
            Suite::CdKernel => "cd-kernel",
            Suite::BandLimit => "band-limit",
            Suite::Decomposition => "decomposition",
            Suite::Dominance => "dominance",
            Suite::BoundValidity => "bound-validity",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(Suite::name).collect();
                format!("unknown suite '{s}' (expected one of {})", names.join(", "))
            })
    }
}

/// `value ≤ limit`, or `value ≥ limit` when `at_least` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub limit: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub at_least: bool,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn at_most(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            label: label.into(),
            value,
            limit,
            at_least: false,
            pass: value <= limit,
            note: None,
        }
    }

    pub fn at_least(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            label: label.into(),
            value,
            limit,
            at_least: true,
            pass: value >= limit,
            note: None,
        }
    }

    pub fn failed(label: impl Into<String>, error: impl fmt::Display) -> Self {
        Self {
            label: label.into(),
            value: f64::NAN,
            limit: f64::NAN,
            at_least: false,
            pass: false,
            note: Some(error.to_string()),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub depth: Depth,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub fn run_suite(suite: Suite, depth: Depth, spec: &QuadratureSpec) -> SuiteReport {
    let checks = match suite {
        Suite::Orthonormality => orthonormality(depth, spec),
        Suite::FourierEigen => fourier_eigen(spec),
        Suite::CdKernel => cd_identity(depth),
        Suite::BandLimit => lemma2(depth, spec),
        Suite::Decomposition => decomposition(depth),
        Suite::Dominance => dominance(depth, spec),
        Suite::BoundValidity => theorem1_matrix(depth, spec),
    };
    SuiteReport { suite, depth, checks }
}

pub fn run_suites(suites: &[Suite], depth: Depth, spec: &QuadratureSpec) -> Vec<SuiteReport> {
    suites.iter().map(|&s| run_suite(s, depth, spec)).collect()
}

/// The two-bump mixture `[[1, 2, −0.5], [0.5, 4, 1]]` used alongside φ and the trimodal preset.
pub fn two_bump() -> GaussianMixture {
    GaussianMixture::from_triples(&[[1.0, 2.0, -0.5], [0.5, 4.0, 1.0]]).expect("valid mixture")
}

fn named_functions(with_two_bump: bool) -> Vec<(&'static str, GaussianMixture)> {
    let mut v = vec![
        ("phi", GaussianMixture::standard_normal()),
        ("trimodal", GaussianMixture::trimodal()),
    ];
    if with_two_bump {
        v.push(("two-bump", two_bump()));
    }
    v
}

/// Largest `|⟨h_j, h_k⟩ − δ_jk|` over `j, k ≤ max_index`.
pub fn gram_deviation(max_index: usize, spec: &QuadratureSpec) -> Result<f64, crate::quadrature::QuadError> {
    let basis = HermiteBasis::<f64>::new(max_index);
    let m = max_index + 1;
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|j| (j..m).map(move |k| (j, k))).collect();
    let radius = (2.0 * max_index as f64 + 1.0).sqrt() + 10.0;
    let freq = 2.0 * oscillation_frequency(max_index);
    let integ = Integrator::new(spec.with_frequency_hint(-radius, radius, freq))?;
    let r = integ.integrate_line_vec_par(
        |t, out: &mut [f64]| {
            let h = basis.eval_all(t);
            for (o, &(j, k)) in out.iter_mut().zip(&pairs) {
                *o = h[j] * h[k];
            }
        },
        pairs.len(),
        radius,
    )?;
    Ok(pairs
        .iter()
        .zip(&r.values)
        .map(|(&(j, k), v)| (v - if j == k { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max))
}

fn orthonormality(depth: Depth, spec: &QuadratureSpec) -> Vec<Check> {
    let max_index = match depth {
        Depth::Quick => 20,
        Depth::Full => 40,
    };
    let label = format!("max |<h_j,h_k> - delta_jk|, j,k <= {max_index}");
    vec![match gram_deviation(max_index, spec) {
        Ok(d) => Check::at_most(label, d, 1e-9),
        Err(e) => Check::failed(label, e),
    }]
}

fn fourier_eigen(spec: &QuadratureSpec) -> Vec<Check> {
    const OMEGAS: [f64; 6] = [-3.0, -1.2, 0.0, 0.7, 2.5, 4.0];
    (0..=8)
        .map(|k| {
            let f = HermiteFunction { k };
            let label = format!("k = {k}: max |F[h_k] - (-i)^k h_k|");
            let eigen = Complex64::new(0.0, -1.0).powu(k as u32);
            let mut worst = 0.0f64;
            for w in OMEGAS {
                match fourier_by_quadrature(&f, w, spec) {
                    Ok(v) => worst = worst.max((v - eigen * f.value(w)).norm()),
                    Err(e) => return Check::failed(label, e),
                }
            }
            Check::at_most(label, worst, 1e-8)
        })
        .collect()
}

fn cd_identity(depth: Depth) -> Vec<Check> {
    let samples = match depth {
        Depth::Quick => 100,
        Depth::Full => 1000,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..=10)
        .map(|n| {
            let mut worst = 0.0f64;
            for _ in 0..samples {
                let x: f64 = rng.gen_range(-5.0..=5.0);
                let a: f64 = rng.gen_range(-5.0..=5.0);
                let k = cd_scale::<f64>(n) * cd_kernel(n, x, a).value;
                worst = worst.max((k - kernel_sum(2 * n, x, a)).abs());
            }
            Check::at_most(format!("n = {n}: max |kernel - sum|, {samples} pairs"), worst, 1e-10)
        })
        .collect()
}

/// `(function, T, N)` combinations for the band-limiting inequality.
pub fn lemma2_cases(depth: Depth) -> Vec<(&'static str, GaussianMixture, f64, f64)> {
    let phi = GaussianMixture::standard_normal();
    let tri = GaussianMixture::trimodal();
    let two = two_bump();
    let mut v = vec![
        ("phi", phi.clone(), 2.0, band_edge(4).expect("even")),
        ("phi", phi.clone(), 3.0, 1.0),
        ("phi", phi.clone(), 1.0, 2.0),
        ("phi", phi, 0.5, 0.5),
        ("trimodal", tri.clone(), 3.0, band_edge(100).expect("even")),
        ("trimodal", tri.clone(), 2.0, 3.0),
        ("trimodal", tri.clone(), 1.0, 1.0),
        ("two-bump", two.clone(), 2.0, 5.0),
        ("two-bump", two.clone(), 3.0, 2.0),
        ("two-bump", two.clone(), 1.5, 0.75),
    ];
    if depth == Depth::Full {
        v.push(("trimodal", tri, 3.0, band_edge(500).expect("even")));
        v.push(("two-bump", two, 4.0, 10.0));
    }
    v
}

fn lemma2(depth: Depth, spec: &QuadratureSpec) -> Vec<Check> {
    lemma2_cases(depth)
        .into_iter()
        .map(|(name, f, t, n)| {
            let label = format!("{name}, T = {t}, N = {n:.4}: lhs - rhs");
            let p = match BandLimitParams::new(n, t) {
                Ok(p) => p,
                Err(e) => return Check::failed(label, e),
            };
            match lemma2_residual(&f, &p, spec) {
                Ok(r) => Check::at_most(label, r.lhs - r.rhs, 1e-8),
                Err(e) => Check::failed(label, e),
            }
        })
        .collect()
}

fn decomposition(depth: Depth) -> Vec<Check> {
    let samples = match depth {
        Depth::Quick => 500,
        Depth::Full => 4000,
    };
    [5usize, 10, 25]
        .into_iter()
        .map(|n| {
            let r = ratio_test(n, M5Convention::Consistent, samples, 3.0, 17 + n as u64);
            let label = format!(
                "n = {n}: pass fraction of {} eligible pairs within 1 +- {:.4}",
                r.eligible, r.tolerance
            );
            let check = Check::at_least(label, r.pass_fraction(), RATIO_PASS_FRACTION);
            let plus = ratio_test(n, M5Convention::LeadingPlus, samples, 3.0, 17 + n as u64);
            let diagnostic = format!(
                "with the leading-plus M5 bracket: pass fraction {:.3}, ratio range [{:.4}, {:.4}]",
                plus.pass_fraction(),
                plus.min_ratio,
                plus.max_ratio
            );
            check.with_note(diagnostic)
        })
        .collect()
}

fn dominance(depth: Depth, spec: &QuadratureSpec) -> Vec<Check> {
    let orders: &[usize] = match depth {
        Depth::Quick => &[2, 5],
        Depth::Full => &[2, 5, 10, 25],
    };
    let mut checks = Vec::new();
    for (name, f) in named_functions(false) {
        for &n in orders {
            for t in [2.0, 3.0] {
                let label = format!("{name}, n = {n}, T = {t}: sum of direct norms vs table estimate");
                match dominance_pair(&f, n, t, spec) {
                    Ok((direct, upper)) => checks.push(Check::at_most(label, direct, upper)),
                    Err(e) => checks.push(Check::failed(label, e)),
                }
            }
        }
    }
    checks
}

/// `(Σ direct_sansone, sansone_upper)` for one configuration.
pub fn dominance_pair<F: TestFunction + ?Sized>(
    f: &F,
    n: usize,
    half_width: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64), String> {
    let p = SansoneParams::new(n, half_width).map_err(|e| e.to_string())?;
    let direct: f64 = direct_sansone(f, &p, spec, DirectOptions::default())
        .map_err(|e| e.to_string())?
        .iter()
        .sum();
    let ledger = moment_ledger(f, n, half_width, p.band, spec).map_err(|e| e.to_string())?;
    let upper = sansone_upper(&ledger, &coefficient_table(n, p.band, half_width)).map_err(|e| e.to_string())?;
    Ok((direct, upper))
}

fn theorem1_matrix(depth: Depth, spec: &QuadratureSpec) -> Vec<Check> {
    let (orders, widths): (&[usize], &[f64]) = match depth {
        Depth::Quick => (&[4, 20, 100], &[2.0, 3.0]),
        Depth::Full => (&[4, 20, 100, 500], &[2.0, 3.0, 4.0]),
    };
    let mut checks = Vec::new();
    for (name, f) in named_functions(true) {
        for &k in orders {
            let s = match coefficients(&f, k, spec) {
                Ok(s) => s,
                Err(e) => {
                    checks.push(Check::failed(format!("{name}, K = {k}: coefficients"), e));
                    continue;
                }
            };
            for &t in widths {
                let label = format!("{name}, K = {k}, T = {t}: rms - bound");
                let measured = measure_error(&f, &s, t, 401, spec).map_err(|e| e.to_string());
                let report = bound_report(&f, k, t, None, spec).map_err(|e| e.to_string());
                match (measured, report) {
                    (Ok(m), Ok(b)) => {
                        let mut c = Check::at_most(label, m.rms - b.breakdown.total, 1e-8);
                        if !c.pass {
                            let suspects: Vec<String> =
                                b.coefficients.suspects().into_iter().map(|(id, text, _)| format!("{id}: {text}")).collect();
                            c = c.with_note(format!("suspect summands in use: {}", suspects.join("; ")));
                        }
                        checks.push(c);
                    }
                    (Err(e), _) | (_, Err(e)) => checks.push(Check::failed(label, e)),
                }
            }
        }
    }
    checks
}
