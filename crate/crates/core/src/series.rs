//! Fourier–Hermite coefficients `c_k = ∫_ℝ f h_k`, partial sums `S_K f = Σ c_k h_k`, and the
//! error of `S_K f` on a window `[-T, T]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hermite::HermiteBasis;
use crate::quadrature::{Integrator, QuadError, QuadratureSpec};
use crate::test_functions::{line_integral, line_integral_vec, TestFunction};

/// Default number of grid points for the sup-norm estimate.
pub const DEFAULT_GRID_POINTS: usize = 4001;

/// `(c_0, …, c_K)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesApprox {
    pub coeffs: Vec<f64>,
}

impl SeriesApprox {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a partial sum needs at least c_0");
        Self { coeffs }
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `Σ c_k²`, the squared L²(ℝ) norm of `S_K f`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// First `K' + 1` coefficients, i.e. `S_{K'} f` for `K' ≤ K`.
    pub fn truncated(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec())
    }

    pub fn partial_sum(&self, t: f64) -> f64 {
        partial_sum(self, t)
    }
}

/// Oscillation frequency of `h_K` inside its turning points, `√(2K+3)`.
pub fn oscillation_frequency(order: usize) -> f64 {
    (2.0 * order as f64 + 3.0).sqrt()
}

/// All `K + 1` coefficients as one vector-valued integral over ℝ.
pub fn coefficients<F: TestFunction + ?Sized>(
    f: &F,
    order: usize,
    spec: &QuadratureSpec,
) -> Result<SeriesApprox, QuadError> {
    let basis = HermiteBasis::<f64>::new(order);
    let integrand = |t: f64, out: &mut [f64]| {
        basis.eval_into(t, out);
        let v = f.value(t);
        out.iter_mut().for_each(|h| *h *= v);
    };
    let r = line_integral_vec(f, integrand, order + 1, spec, oscillation_frequency(order))?;
    Ok(SeriesApprox::new(r.values))
}

/// `(S_K f)(t)`.
pub fn partial_sum(s: &SeriesApprox, t: f64) -> f64 {
    HermiteBasis::<f64>::new(s.order()).combine(&s.coeffs, t)
}

/// Error of `S_K f` on `[-T, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// `[(1/2T) ∫_{-T}^{T} (f − S_K f)²]^{1/2}`.
    pub rms: f64,
    /// `max |f − S_K f|` over the grid; a lower bound on the true sup.
    pub sup: f64,
    pub grid_points: usize,
    #[serde(rename = "T")]
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("window half-width must be positive, got {0}")]
    BadWindow(f64),
    #[error("need at least 2 grid points, got {0}")]
    BadGrid(usize),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

pub fn measure_error<F: TestFunction + ?Sized>(
    f: &F,
    s: &SeriesApprox,
    half_width: f64,
    grid_points: usize,
    spec: &QuadratureSpec,
) -> Result<ErrorReport, SeriesError> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(SeriesError::BadWindow(half_width));
    }
    if grid_points < 2 {
        return Err(SeriesError::BadGrid(grid_points));
    }
    let basis = HermiteBasis::<f64>::new(s.order());
    let residual = |t: f64| f.value(t) - basis.combine(&s.coeffs, t);
    let freq = 2.0 * oscillation_frequency(s.order());
    let integ = Integrator::new(spec.with_frequency_hint(-half_width, half_width, freq))?;
    let sq = integ.integrate_par(|t| residual(t).powi(2), -half_width, half_width)?;
    let rms = (sq.value.max(0.0) / (2.0 * half_width)).sqrt();
    let step = 2.0 * half_width / (grid_points - 1) as f64;
    let sup = (0..grid_points)
        .into_par_iter()
        .map(|i| {
            let t = if i + 1 == grid_points {
                half_width
            } else {
                -half_width + step * i as f64
            };
            residual(t).abs()
        })
        .reduce(|| 0.0, f64::max);
    Ok(ErrorReport {
        rms,
        sup,
        grid_points,
        half_width,
    })
}

/// `∫_ℝ (f − S_K f)²` by quadrature.
pub fn full_line_squared_error<F: TestFunction + ?Sized>(
    f: &F,
    s: &SeriesApprox,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    let basis = HermiteBasis::<f64>::new(s.order());
    let freq = 2.0 * oscillation_frequency(s.order());
    line_integral(f, |t| (f.value(t) - basis.combine(&s.coeffs, t)).powi(2), spec, freq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_functions::{GaussianMixture, HermiteFunction};
    use approx::assert_abs_diff_eq;

    #[test]
    fn hermite_function_has_a_unit_coefficient() {
        let s = coefficients(&HermiteFunction { k: 3 }, 8, &QuadratureSpec::default()).unwrap();
        for (k, c) in s.coeffs.iter().enumerate() {
            assert_abs_diff_eq!(*c, if k == 3 { 1.0 } else { 0.0 }, epsilon = 1e-9);
        }
    }

    #[test]
    fn normal_density_coefficients() {
        let s = coefficients(&GaussianMixture::standard_normal(), 6, &QuadratureSpec::default()).unwrap();
        // c_0 = π^{-1/4}/√2
        assert_abs_diff_eq!(s.coeffs[0], 0.531_125_966_013_598_5, epsilon = 1e-12);
        for k in [1, 3, 5] {
            assert_abs_diff_eq!(s.coeffs[k], 0.0, epsilon = 1e-14);
        }
        let s0 = s.truncated(0);
        assert_abs_diff_eq!(s0.partial_sum(0.0), 0.398_942_280_401_432_7, epsilon = 1e-12);
    }

    #[test]
    fn unit_first_coefficient_gives_h0() {
        let s = SeriesApprox::new(vec![1.0]);
        assert_abs_diff_eq!(partial_sum(&s, 0.0), 0.751_125_544_464_942_5, epsilon = 1e-15);
    }

    #[test]
    fn exact_reproduction_has_zero_error() {
        let f = HermiteFunction { k: 2 };
        let spec = QuadratureSpec::default();
        let s = coefficients(&f, 4, &spec).unwrap();
        let r = measure_error(&f, &s, 3.0, 201, &spec).unwrap();
        assert!(r.rms < 1e-9 && r.sup < 1e-9);
    }

    #[test]
    fn partial_sum_reproduces_h5() {
        let f = HermiteFunction { k: 5 };
        let s = coefficients(&f, 10, &QuadratureSpec::default()).unwrap();
        for t in [-2.5, -0.3, 0.0, 1.1, 4.0] {
            assert_abs_diff_eq!(s.partial_sum(t), f.value(t), epsilon = 1e-8);
        }
    }

    #[test]
    fn bad_arguments() {
        let f = GaussianMixture::standard_normal();
        let s = SeriesApprox::new(vec![0.5]);
        let spec = QuadratureSpec::default();
        assert!(matches!(measure_error(&f, &s, 0.0, 10, &spec), Err(SeriesError::BadWindow(_))));
        assert!(matches!(measure_error(&f, &s, 1.0, 1, &spec), Err(SeriesError::BadGrid(1))));
    }
}
