//! Globally adaptive Gauss–Legendre quadrature on finite intervals and on the two
//! semi-infinite rays `|t| > T`.
//!
//! Every integral in the crate goes through this module. Panels carry a fixed-order
//! Gauss–Legendre rule; the error of a panel is estimated as the difference between the
//! whole-panel value and the sum of its two halves, and the panel with the largest
//! estimate is bisected until the total estimate falls below
//! `max(abs_tol, rel_tol·|value|)`.
//!
//! Oscillatory integrands should be started from a partition fine enough to resolve the
//! oscillation, see [`QuadratureSpec::with_frequency_hint`]. Blind bisection will get there
//! too but wastes evaluations on the early, badly aliased levels.
//!
//! Integrals are vector valued internally ([`Integrator::integrate_vec`]); the scalar entry
//! points are thin wrappers. The `*_par` variants evaluate the nodes of each panel on the
//! rayon pool, which pays off when a single integrand evaluation is itself an integral.
//! Node evaluation order never affects the result.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Mutex;

use rayon::prelude::*;
use thiserror::Error;

use crate::scalar::Real;

/// Panels per oscillation period requested by [`QuadratureSpec::with_frequency_hint`].
pub const PANELS_PER_PERIOD: f64 = 8.0;

/// Tolerances and discretisation parameters for one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Gauss–Legendre nodes per panel.
    pub panel_order: usize,
    /// Maximum number of bisections after the initial partition.
    pub max_subdivisions: usize,
    /// Number of equal panels the interval is cut into before adaptive refinement.
    pub initial_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            panel_order: 32,
            max_subdivisions: 1 << 16,
            initial_panels: 1,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_panel_order(mut self, order: usize) -> Self {
        self.panel_order = order;
        self
    }

    pub fn with_initial_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }

    /// Starts from at least [`PANELS_PER_PERIOD`] panels per period of an oscillation with
    /// angular frequency `frequency` over `[a, b]`. Never lowers an existing partition.
    pub fn with_frequency_hint(mut self, a: f64, b: f64, frequency: f64) -> Self {
        self.initial_panels = self.initial_panels.max(min_panels_for_frequency(a, b, frequency));
        self
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(QuadError::InvalidSpec("rel_tol must be positive"));
        }
        if self.abs_tol.is_nan() || self.abs_tol <= 0.0 {
            return Err(QuadError::InvalidSpec("abs_tol must be positive"));
        }
        if self.panel_order < 2 {
            return Err(QuadError::InvalidSpec("panel_order must be at least 2"));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadError::InvalidSpec("max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

/// Number of panels giving [`PANELS_PER_PERIOD`] panels per period of `sin(frequency·t)`
/// on `[a, b]`.
pub fn min_panels_for_frequency(a: f64, b: f64, frequency: f64) -> usize {
    let periods = frequency.abs() * (b - a).abs() / std::f64::consts::TAU;
    let panels = (PANELS_PER_PERIOD * periods).ceil();
    if panels.is_finite() && panels >= 1.0 {
        panels as usize
    } else {
        1
    }
}

/// Bisection depth needed to reach the panel count of [`min_panels_for_frequency`] from a
/// single panel.
pub fn subdivision_depth_for_frequency(a: f64, b: f64, frequency: f64) -> u32 {
    let panels = min_panels_for_frequency(a, b, frequency);
    usize::BITS - (panels - 1).leading_zeros()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationResult<R> {
    pub value: R,
    pub error_estimate: R,
    pub subdivisions_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VecIntegrationResult<R> {
    pub values: Vec<R>,
    /// Maximum over components of the estimated absolute error.
    pub error_estimate: R,
    pub subdivisions_used: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error(
        "quadrature did not converge: error estimate {error_estimate:e} > tolerance {tolerance:e} \
         after {subdivisions} subdivisions"
    )]
    NonConvergence {
        values: Vec<f64>,
        error_estimate: f64,
        tolerance: f64,
        subdivisions: usize,
    },
    #[error("integrand is not finite at t = {at}")]
    NonFinite { at: f64 },
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(&'static str),
}

impl QuadError {
    /// Best available value of a non-converged scalar integral.
    pub fn partial_value(&self) -> Option<f64> {
        match self {
            QuadError::NonConvergence { values, .. } => values.first().copied(),
            _ => None,
        }
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<R> {
    pub nodes: Vec<R>,
    pub weights: Vec<R>,
}

impl<R: Real> GaussLegendre<R> {
    /// Nodes and weights by Newton iteration on `P_n`, computed in `f64`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss–Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self {
            nodes: nodes.into_iter().map(R::lit).collect(),
            weights: weights.into_iter().map(R::lit).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Reusable integrator: a spec plus its precomputed Gauss–Legendre rule.
#[derive(Debug, Clone)]
pub struct Integrator<R> {
    spec: QuadratureSpec,
    rule: GaussLegendre<R>,
}

trait NodeEval<R> {
    fn dim(&self) -> usize;
    /// Fills `out[i*dim .. (i+1)*dim]` with the integrand at `xs[i]`.
    fn eval(&self, xs: &[R], out: &mut [R]);
}

struct Serial<F> {
    f: F,
    dim: usize,
}

impl<R: Real, F: Fn(R, &mut [R])> NodeEval<R> for Serial<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, xs: &[R], out: &mut [R]) {
        for (x, chunk) in xs.iter().zip(out.chunks_mut(self.dim)) {
            (self.f)(*x, chunk);
        }
    }
}

struct Parallel<F> {
    f: F,
    dim: usize,
}

impl<R: Real, F: Fn(R, &mut [R]) + Sync> NodeEval<R> for Parallel<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, xs: &[R], out: &mut [R]) {
        out.par_chunks_mut(self.dim)
            .zip(xs.par_iter())
            .for_each(|(chunk, x)| (self.f)(*x, chunk));
    }
}

struct Panel<R> {
    a: R,
    b: R,
    left: Vec<R>,
    right: Vec<R>,
    error: R,
    abs_mass: R,
    seq: usize,
}

impl<R: Real> Panel<R> {
    fn value(&self, k: usize) -> R {
        self.left[k] + self.right[k]
    }
}

struct ByError<R>(Panel<R>);

impl<R: Real> PartialEq for ByError<R> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<R: Real> Eq for ByError<R> {}
impl<R: Real> PartialOrd for ByError<R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<R: Real> Ord for ByError<R> {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties go to the earliest panel.
        self.0
            .error
            .partial_cmp(&other.0.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.0.seq.cmp(&self.0.seq))
    }
}

impl<R: Real> Integrator<R> {
    pub fn new(spec: QuadratureSpec) -> Result<Self, QuadError> {
        spec.validate()?;
        Ok(Self {
            rule: GaussLegendre::new(spec.panel_order),
            spec,
        })
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    /// Same rule, different initial partition or tolerances (the panel order is kept).
    pub fn respec(&self, f: impl FnOnce(QuadratureSpec) -> QuadratureSpec) -> Result<Self, QuadError> {
        let spec = f(self.spec);
        spec.validate()?;
        if spec.panel_order == self.spec.panel_order {
            Ok(Self {
                spec,
                rule: self.rule.clone(),
            })
        } else {
            Self::new(spec)
        }
    }

    pub fn integrate<F>(&self, f: F, a: R, b: R) -> Result<IntegrationResult<R>, QuadError>
    where
        F: Fn(R) -> R,
    {
        let r = self.run(&Serial { f: |x: R, out: &mut [R]| out[0] = f(x), dim: 1 }, a, b)?;
        Ok(scalar_result(r))
    }

    /// As [`Integrator::integrate`], evaluating panel nodes in parallel.
    pub fn integrate_par<F>(&self, f: F, a: R, b: R) -> Result<IntegrationResult<R>, QuadError>
    where
        F: Fn(R) -> R + Sync,
    {
        let r = self.run(&Parallel { f: |x: R, out: &mut [R]| out[0] = f(x), dim: 1 }, a, b)?;
        Ok(scalar_result(r))
    }

    /// Integrates a vector-valued integrand `f(t, out)` with `out.len() == dim`.
    pub fn integrate_vec<F>(&self, f: F, dim: usize, a: R, b: R) -> Result<VecIntegrationResult<R>, QuadError>
    where
        F: Fn(R, &mut [R]),
    {
        self.run(&Serial { f, dim }, a, b)
    }

    pub fn integrate_vec_par<F>(
        &self,
        f: F,
        dim: usize,
        a: R,
        b: R,
    ) -> Result<VecIntegrationResult<R>, QuadError>
    where
        F: Fn(R, &mut [R]) + Sync,
    {
        self.run(&Parallel { f, dim }, a, b)
    }

    /// `∫_{|t|>T} f(t) dt` via `t = ±(T + u/(1-u))`, `u ∈ [0, 1)`.
    pub fn integrate_tail<F>(&self, f: F, threshold: R) -> Result<IntegrationResult<R>, QuadError>
    where
        F: Fn(R) -> R,
    {
        check_threshold(threshold)?;
        let g = tail_map(threshold, move |t: R, out: &mut [R]| out[0] = f(t), 1);
        let tail = self.tail_integrator()?;
        let r = tail.run(&Serial { f: g, dim: 1 }, R::zero(), R::one())?;
        Ok(scalar_result(r))
    }

    pub fn integrate_tail_vec<F>(&self, f: F, dim: usize, threshold: R) -> Result<VecIntegrationResult<R>, QuadError>
    where
        F: Fn(R, &mut [R]),
    {
        check_threshold(threshold)?;
        let g = tail_map(threshold, f, dim);
        let tail = self.tail_integrator()?;
        tail.run(&Serial { f: g, dim }, R::zero(), R::one())
    }

    pub fn integrate_tail_vec_par<F>(
        &self,
        f: F,
        dim: usize,
        threshold: R,
    ) -> Result<VecIntegrationResult<R>, QuadError>
    where
        F: Fn(R, &mut [R]) + Sync,
    {
        check_threshold(threshold)?;
        let g = tail_map(threshold, f, dim);
        let tail = self.tail_integrator()?;
        tail.run(&Parallel { f: g, dim }, R::zero(), R::one())
    }

    /// `∫_ℝ f` as a core integral over `[-radius, radius]` plus the two tails.
    pub fn integrate_line<F>(&self, f: F, radius: R) -> Result<IntegrationResult<R>, QuadError>
    where
        F: Fn(R) -> R,
    {
        let core = self.integrate(&f, -radius, radius)?;
        let tail = self.integrate_tail(&f, radius)?;
        Ok(IntegrationResult {
            value: core.value + tail.value,
            error_estimate: core.error_estimate + tail.error_estimate,
            subdivisions_used: core.subdivisions_used + tail.subdivisions_used,
        })
    }

    pub fn integrate_line_vec<F>(&self, f: F, dim: usize, radius: R) -> Result<VecIntegrationResult<R>, QuadError>
    where
        F: Fn(R, &mut [R]),
    {
        let core = self.integrate_vec(&f, dim, -radius, radius)?;
        let tail = self.integrate_tail_vec(&f, dim, radius)?;
        Ok(merge_vec(core, tail))
    }

    pub fn integrate_line_vec_par<F>(
        &self,
        f: F,
        dim: usize,
        radius: R,
    ) -> Result<VecIntegrationResult<R>, QuadError>
    where
        F: Fn(R, &mut [R]) + Sync,
    {
        let core = self.integrate_vec_par(&f, dim, -radius, radius)?;
        let tail = self.integrate_tail_vec_par(&f, dim, radius)?;
        Ok(merge_vec(core, tail))
    }

    // The mapped tail integrand has no oscillation structure tied to the caller's hint.
    fn tail_integrator(&self) -> Result<Self, QuadError> {
        self.respec(|s| s.with_initial_panels(4))
    }

    #[allow(clippy::too_many_arguments)]
    fn eval_panel<E: NodeEval<R>>(
        &self,
        e: &E,
        a: R,
        b: R,
        whole: Option<Vec<R>>,
        seq: usize,
        scratch: &mut Vec<R>,
        values: &mut Vec<R>,
    ) -> Result<Panel<R>, QuadError> {
        let dim = e.dim();
        let two = R::lit(2.0);
        let m = (a + b) / two;
        let n = self.rule.order();
        let with_whole = whole.is_none();
        let segments: &[(R, R)] = if with_whole {
            &[(a, m), (m, b), (a, b)]
        } else {
            &[(a, m), (m, b)]
        };
        scratch.clear();
        for &(lo, hi) in segments {
            let c = (lo + hi) / two;
            let h = (hi - lo) / two;
            scratch.extend(self.rule.nodes.iter().map(|&x| c + h * x));
        }
        values.clear();
        values.resize(scratch.len() * dim, R::zero());
        e.eval(scratch, values);
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(QuadError::NonFinite {
                at: scratch[pos / dim].as_f64(),
            });
        }
        let mut sums = vec![R::zero(); segments.len() * dim];
        let mut abs_mass = R::zero();
        for (s, &(lo, hi)) in segments.iter().enumerate() {
            let h = (hi - lo) / two;
            for (j, &w) in self.rule.weights.iter().enumerate() {
                let row = &values[(s * n + j) * dim..(s * n + j + 1) * dim];
                for k in 0..dim {
                    sums[s * dim + k] = sums[s * dim + k] + h * w * row[k];
                    if s < 2 {
                        abs_mass = abs_mass + (h * w * row[k]).abs();
                    }
                }
            }
        }
        let left = sums[..dim].to_vec();
        let right = sums[dim..2 * dim].to_vec();
        let whole = match whole {
            Some(w) => w,
            None => sums[2 * dim..3 * dim].to_vec(),
        };
        let mut error = R::zero();
        for k in 0..dim {
            error = error.max((whole[k] - (left[k] + right[k])).abs());
        }
        Ok(Panel {
            a,
            b,
            left,
            right,
            error,
            abs_mass,
            seq,
        })
    }

    fn run<E: NodeEval<R>>(&self, e: &E, a: R, b: R) -> Result<VecIntegrationResult<R>, QuadError> {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(QuadError::InvalidInterval {
                a: a.as_f64(),
                b: b.as_f64(),
            });
        }
        let dim = e.dim();
        if a == b || dim == 0 {
            return Ok(VecIntegrationResult {
                values: vec![R::zero(); dim],
                error_estimate: R::zero(),
                subdivisions_used: 0,
            });
        }
        let mut scratch = Vec::new();
        let mut values = Vec::new();
        let mut heap = BinaryHeap::new();
        let mut done: Vec<Panel<R>> = Vec::new();
        let mut seq = 0usize;

        let count = self.spec.initial_panels.max(1);
        let width = (b - a) / R::from_usize(count).unwrap();
        for i in 0..count {
            let lo = a + width * R::from_usize(i).unwrap();
            let hi = if i + 1 == count { b } else { lo + width };
            let p = self.eval_panel(e, lo, hi, None, seq, &mut scratch, &mut values)?;
            seq += 1;
            heap.push(ByError(p));
        }

        let eps = R::epsilon();
        let floor_factor = R::lit(50.0) * eps;
        let mut splits = 0usize;
        loop {
            let (total, err, mass) = totals(heap.iter().map(|p| &p.0).chain(done.iter()), dim);
            let scale = total.iter().fold(R::zero(), |m, v| m.max(v.abs()));
            let tol = R::lit(self.spec.abs_tol)
                .max(R::lit(self.spec.rel_tol) * scale)
                .max(floor_factor * mass);
            if err <= tol {
                break;
            }
            if splits >= self.spec.max_subdivisions || heap.is_empty() {
                return Err(QuadError::NonConvergence {
                    values: total.iter().map(|v| v.as_f64()).collect(),
                    error_estimate: err.as_f64(),
                    tolerance: tol.as_f64(),
                    subdivisions: splits,
                });
            }
            let ByError(worst) = heap.pop().unwrap();
            let m = (worst.a + worst.b) / R::lit(2.0);
            if m <= worst.a || m >= worst.b || worst.error <= floor_factor * worst.abs_mass {
                done.push(worst);
                continue;
            }
            let l = self.eval_panel(e, worst.a, m, Some(worst.left), seq, &mut scratch, &mut values)?;
            let r = self.eval_panel(e, m, worst.b, Some(worst.right), seq + 1, &mut scratch, &mut values)?;
            seq += 2;
            splits += 1;
            heap.push(ByError(l));
            heap.push(ByError(r));
        }

        // Sum in interval order so the result does not depend on heap layout.
        let mut panels: Vec<Panel<R>> = heap.into_iter().map(|p| p.0).chain(done).collect();
        panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
        let (total, err, _) = totals(panels.iter(), dim);
        Ok(VecIntegrationResult {
            values: total,
            error_estimate: err,
            subdivisions_used: splits,
        })
    }
}

fn totals<'a, R: Real>(panels: impl Iterator<Item = &'a Panel<R>>, dim: usize) -> (Vec<R>, R, R) {
    let mut total = vec![R::zero(); dim];
    let mut err = R::zero();
    let mut mass = R::zero();
    for p in panels {
        for (k, t) in total.iter_mut().enumerate() {
            *t = *t + p.value(k);
        }
        err = err + p.error;
        mass = mass + p.abs_mass;
    }
    (total, err, mass)
}

fn scalar_result<R: Real>(r: VecIntegrationResult<R>) -> IntegrationResult<R> {
    IntegrationResult {
        value: r.values[0],
        error_estimate: r.error_estimate,
        subdivisions_used: r.subdivisions_used,
    }
}

fn merge_vec<R: Real>(a: VecIntegrationResult<R>, b: VecIntegrationResult<R>) -> VecIntegrationResult<R> {
    VecIntegrationResult {
        values: a.values.iter().zip(&b.values).map(|(x, y)| *x + *y).collect(),
        error_estimate: a.error_estimate + b.error_estimate,
        subdivisions_used: a.subdivisions_used + b.subdivisions_used,
    }
}

fn check_threshold<R: Real>(threshold: R) -> Result<(), QuadError> {
    if threshold.is_finite() && threshold >= R::zero() {
        Ok(())
    } else {
        Err(QuadError::InvalidInterval {
            a: threshold.as_f64(),
            b: f64::INFINITY,
        })
    }
}

fn tail_map<R: Real, F: Fn(R, &mut [R])>(threshold: R, f: F, dim: usize) -> impl Fn(R, &mut [R]) {
    move |u: R, out: &mut [R]| {
        let one = R::one();
        let rest = one - u;
        if rest <= R::zero() {
            out.iter_mut().for_each(|v| *v = R::zero());
            return;
        }
        let s = u / rest;
        let jac = one / (rest * rest);
        let mut tmp = [R::zero(); 8];
        let mut heap_tmp;
        let other: &mut [R] = if dim <= tmp.len() {
            &mut tmp[..dim]
        } else {
            heap_tmp = vec![R::zero(); dim];
            &mut heap_tmp[..]
        };
        f(threshold + s, out);
        f(-threshold - s, other);
        for (o, v) in out.iter_mut().zip(other.iter()) {
            let sum = *o + *v;
            // exp(-t²) style integrands underflow to 0 long before the Jacobian overflows;
            // keep 0·∞ from poisoning the sum.
            *o = if sum == R::zero() { R::zero() } else { sum * jac };
        }
    }
}

/// First error raised inside an integrand that has to return a plain value. Integrands that
/// run nested integrals record failures here and return a dummy value.
#[derive(Debug)]
pub struct ErrorSlot<E>(Mutex<Option<E>>);

impl<E> Default for ErrorSlot<E> {
    fn default() -> Self {
        Self(Mutex::new(None))
    }
}

impl<E> ErrorSlot<E> {
    pub fn guard<T: Default>(&self, r: Result<T, E>) -> T {
        r.unwrap_or_else(|e| {
            self.0.lock().unwrap_or_else(|p| p.into_inner()).get_or_insert(e);
            T::default()
        })
    }

    pub fn finish<T>(self, value: T) -> Result<T, E> {
        match self.0.into_inner().unwrap_or_else(|p| p.into_inner()) {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }
}

/// `∫_a^b f` with a one-off integrator.
pub fn integrate<R: Real, F: Fn(R) -> R>(
    f: F,
    a: R,
    b: R,
    spec: &QuadratureSpec,
) -> Result<IntegrationResult<R>, QuadError> {
    Integrator::new(*spec)?.integrate(f, a, b)
}

/// `∫_{|t|>T} f` with a one-off integrator.
pub fn integrate_tail<R: Real, F: Fn(R) -> R>(
    f: F,
    threshold: R,
    spec: &QuadratureSpec,
) -> Result<IntegrationResult<R>, QuadError> {
    Integrator::new(*spec)?.integrate_tail(f, threshold)
}
