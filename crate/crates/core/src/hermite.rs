//! Orthonormal Hermite functions
//! `h_k(t) = (-1)^k π^{-1/4} 2^{-k/2} (k!)^{-1/2} e^{t²/2} d^k/dt^k e^{-t²}`.
//!
//! Values come from the normalised three-term recurrence
//! `h_{k+1} = t·√(2/(k+1))·h_k − √(k/(k+1))·h_{k−1}`. The recurrence runs on mantissas
//! with a separately tracked log scale, so `e^{-t²/2}` never underflows before the
//! polynomial factor has grown; indices where the true value is below the smallest
//! normal number come out as 0.

use crate::scalar::Real;

/// `ln π^{-1/4}`.
const LN_H0_AT_ZERO: f64 = -0.286_182_471_462_350_05;

/// Hermite functions `h_0 … h_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermiteBasis<R> {
    max_index: usize,
    _scalar: std::marker::PhantomData<R>,
}

/// Value of the Christoffel–Darboux kernel
/// `k_{2n}(x, α) = (h_{2n+1}(x)h_{2n}(α) − h_{2n+1}(α)h_{2n}(x)) / (x − α)`,
/// normalised so that `√((2n+1)/2)·value = Σ_{k≤2n} h_k(x)h_k(α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue<R> {
    pub x: R,
    pub alpha: R,
    pub value: R,
}

/// Below this separation the kernel is evaluated from its defining sum.
pub const DIAGONAL_GUARD: f64 = 1e-8;

impl<R: Real> HermiteBasis<R> {
    pub fn new(max_index: usize) -> Self {
        Self {
            max_index,
            _scalar: std::marker::PhantomData,
        }
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// `(h_0(t), …, h_K(t))`.
    pub fn eval_all(&self, t: R) -> Vec<R> {
        let mut out = vec![R::zero(); self.max_index + 1];
        self.eval_into(t, &mut out);
        out
    }

    /// Writes `h_0(t) … h_{out.len()-1}(t)` into `out`.
    pub fn eval_into(&self, t: R, out: &mut [R]) {
        eval_hermite(t, out);
    }

    /// `(h'_0(t), …, h'_K(t))` from `h'_k = √(k/2)h_{k−1} − √((k+1)/2)h_{k+1}`.
    pub fn derivatives(&self, t: R) -> Vec<R> {
        let k_max = self.max_index;
        let mut h = vec![R::zero(); k_max + 2];
        eval_hermite(t, &mut h);
        let half = R::lit(0.5);
        (0..=k_max)
            .map(|k| {
                let up = (R::from_usize(k + 1).unwrap() * half).sqrt() * h[k + 1];
                if k == 0 {
                    -up
                } else {
                    (R::from_usize(k).unwrap() * half).sqrt() * h[k - 1] - up
                }
            })
            .collect()
    }

    /// `Σ_{k≤K} c_k h_k(t)`.
    pub fn combine(&self, coeffs: &[R], t: R) -> R {
        let mut h = vec![R::zero(); coeffs.len()];
        eval_hermite(t, &mut h);
        coeffs.iter().zip(&h).fold(R::zero(), |s, (c, v)| s + *c * *v)
    }
}

fn eval_hermite<R: Real>(t: R, out: &mut [R]) {
    if out.is_empty() {
        return;
    }
    let tf = t.as_f64();
    // Rescale mantissas whenever they exceed BIG.
    let big = R::max_value().sqrt().sqrt();
    let ln_big = big.ln();
    let ln_tiny = R::min_positive_value().ln();
    let mut log_scale = R::lit(LN_H0_AT_ZERO - 0.5 * tf * tf);
    let mut factor = scale_factor(log_scale, ln_tiny);
    let mut prev = R::zero();
    let mut cur = R::one();
    out[0] = emit(cur, log_scale, factor, ln_tiny);
    for k in 0..out.len() - 1 {
        let kf = R::from_usize(k).unwrap();
        let k1 = R::from_usize(k + 1).unwrap();
        let next = t * (R::lit(2.0) / k1).sqrt() * cur - (kf / k1).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > big {
            cur = cur / big;
            prev = prev / big;
            log_scale = log_scale + ln_big;
            factor = scale_factor(log_scale, ln_tiny);
        }
        out[k + 1] = emit(cur, log_scale, factor, ln_tiny);
    }
}

/// `e^{log_scale}` when that is comfortably a normal number, else `None`.
fn scale_factor<R: Real>(log_scale: R, ln_tiny: R) -> Option<R> {
    let margin = R::lit(0.5) * ln_tiny.abs();
    (log_scale > ln_tiny + margin).then(|| log_scale.exp())
}

#[inline]
fn emit<R: Real>(mantissa: R, log_scale: R, factor: Option<R>, ln_tiny: R) -> R {
    if let Some(f) = factor {
        return mantissa * f;
    }
    if mantissa == R::zero() {
        return R::zero();
    }
    let l = mantissa.abs().ln() + log_scale;
    if l < ln_tiny {
        R::zero()
    } else {
        mantissa.signum() * l.exp()
    }
}

/// `(h_{2n}(0), h'_{2n+1}(0))` with signs, from
/// `h_{2n}(0) = (−1)^n π^{-1/4} √((2n)!) / (2^n n!)` and
/// `h'_{2n+1}(0) = √(2(2n+1))·h_{2n}(0)`, evaluated in log space.
pub fn values_at_zero<R: Real>(n: usize) -> (R, R) {
    let nf = n as f64;
    let log_abs = LN_H0_AT_ZERO + 0.5 * libm::lgamma(2.0 * nf + 1.0)
        - nf * std::f64::consts::LN_2
        - libm::lgamma(nf + 1.0);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let h = sign * log_abs.exp();
    let d = (2.0 * (2.0 * nf + 1.0)).sqrt() * h;
    (R::lit(h), R::lit(d))
}

/// Christoffel–Darboux kernel `k_{2n}(x, α)`; see [`KernelValue`].
pub fn cd_kernel<R: Real>(n: usize, x: R, alpha: R) -> KernelValue<R> {
    let m = 2 * n;
    let mut hx = vec![R::zero(); m + 2];
    let mut ha = vec![R::zero(); m + 2];
    eval_hermite(x, &mut hx);
    eval_hermite(alpha, &mut ha);
    let value = if (x - alpha).abs() < R::lit(DIAGONAL_GUARD) {
        let sum = hx[..=m]
            .iter()
            .zip(&ha[..=m])
            .fold(R::zero(), |s, (a, b)| s + *a * *b);
        sum / cd_scale::<R>(n)
    } else {
        (hx[m + 1] * ha[m] - ha[m + 1] * hx[m]) / (x - alpha)
    };
    KernelValue { x, alpha, value }
}

/// `√((2n+1)/2)`, the factor relating [`cd_kernel`] to the reproducing-kernel sum.
pub fn cd_scale<R: Real>(n: usize) -> R {
    R::lit(((2 * n + 1) as f64 / 2.0).sqrt())
}

/// `Σ_{k≤m} h_k(x)h_k(α)` by direct summation.
pub fn kernel_sum<R: Real>(m: usize, x: R, alpha: R) -> R {
    let mut hx = vec![R::zero(); m + 1];
    let mut ha = vec![R::zero(); m + 1];
    eval_hermite(x, &mut hx);
    eval_hermite(alpha, &mut ha);
    hx.iter().zip(&ha).fold(R::zero(), |s, (a, b)| s + *a * *b)
}
