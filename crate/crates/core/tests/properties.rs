use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use hermite_rms::bandlimit::{band_edge, fourier_by_quadrature};
use hermite_rms::bound::{coefficient_table, moment_ledger, theorem1_bound};
use hermite_rms::hermite::{cd_kernel, cd_scale, kernel_sum, HermiteBasis};
use hermite_rms::quadrature::{integrate, integrate_tail, Integrator, QuadratureSpec};
use hermite_rms::series::{coefficients, full_line_squared_error, measure_error};
use hermite_rms::test_functions::{GaussianMixture, TestFunction};
use proptest::prelude::*;

fn mixture(max_components: usize) -> impl Strategy<Value = GaussianMixture> {
    prop::collection::vec((-2.0..2.0f64, 0.5..3.0f64, -1.5..1.5f64), 1..=max_components).prop_map(|v| {
        let triples: Vec<[f64; 3]> = v.into_iter().map(|(w, a, c)| [w, a, c]).collect();
        GaussianMixture::from_triples(&triples).unwrap()
    })
}

proptest! {
    #[test]
    fn quadrature_is_linear(a in -5.0..0.0f64, len in 0.1..8.0f64, alpha in -3.0..3.0f64, beta in -3.0..3.0f64, k in 0.5..6.0f64) {
        let b = a + len;
        let spec = QuadratureSpec::default();
        let f = |t: f64| (k * t).sin();
        let g = |t: f64| t * t * t - t;
        let both = integrate(|t| alpha * f(t) + beta * g(t), a, b, &spec).unwrap().value;
        let split = alpha * integrate(f, a, b, &spec).unwrap().value + beta * integrate(g, a, b, &spec).unwrap().value;
        prop_assert!((both - split).abs() <= 1e-9 * (1.0 + split.abs()));
    }

    #[test]
    fn quadrature_is_additive(a in -4.0..0.0f64, m in 0.0..1.0f64, len in 0.5..6.0f64) {
        let spec = QuadratureSpec::default();
        let f = |t: f64| (-t * t).exp() * (3.0 * t).cos();
        let (b, c) = (a + m * len, a + len);
        let whole = integrate(f, a, c, &spec).unwrap().value;
        let parts = integrate(f, a, b, &spec).unwrap().value + integrate(f, b, c, &spec).unwrap().value;
        prop_assert!((whole - parts).abs() <= 1e-12);
    }

    #[test]
    fn window_plus_tail_is_the_line(t in 0.0..5.0f64, s in 0.5..2.0f64) {
        let spec = QuadratureSpec::default();
        let g = |x: f64| (-0.5 * (x / s).powi(2)).exp();
        let inside = integrate(g, -t, t, &spec).unwrap().value;
        let outside = integrate_tail(g, t, &spec).unwrap().value;
        prop_assert!((inside + outside - s * (2.0 * PI).sqrt()).abs() <= 1e-10);
    }

    #[test]
    fn single_precision_tracks_double(a in -3.0..0.0f64, len in 0.5..4.0f64) {
        let spec = QuadratureSpec::default().with_tolerances(1e-5, 1e-6);
        let wide = integrate(|t: f64| t.cos() * (-0.1 * t * t).exp(), a, a + len, &spec).unwrap().value;
        let narrow = Integrator::<f32>::new(spec).unwrap()
            .integrate(|t: f32| t.cos() * (-0.1 * t * t).exp(), a as f32, (a + len) as f32)
            .unwrap()
            .value;
        prop_assert!((wide - narrow as f64).abs() <= 1e-5);
    }

    #[test]
    fn hermite_parity(t in -8.0..8.0f64) {
        let basis = HermiteBasis::<f64>::new(30);
        let (p, m) = (basis.eval_all(t), basis.eval_all(-t));
        for k in 0..=30 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((p[k] - sign * m[k]).abs() <= 1e-14);
        }
    }

    #[test]
    fn single_precision_basis_tracks_double(t in -5.0..5.0f32) {
        let lo = HermiteBasis::<f32>::new(20).eval_all(t);
        let hi = HermiteBasis::<f64>::new(20).eval_all(t as f64);
        for (a, b) in lo.iter().zip(&hi) {
            prop_assert!((*a as f64 - b).abs() <= 2e-5);
        }
    }

    #[test]
    fn kernel_identity(n in 0usize..=10, x in -5.0..5.0f64, a in -5.0..5.0f64) {
        let k = cd_scale::<f64>(n) * cd_kernel(n, x, a).value;
        prop_assert!((k - kernel_sum(2 * n, x, a)).abs() <= 1e-10);
    }

    #[test]
    fn kernel_is_symmetric(n in 0usize..=25, x in -6.0..6.0f64, a in -6.0..6.0f64) {
        let (u, v) = (cd_kernel(n, x, a).value, cd_kernel(n, a, x).value);
        prop_assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mixture_transform_matches_quadrature(f in mixture(3), w in -6.0..6.0f64) {
        let exact = f.fourier(w).unwrap();
        let quad = fourier_by_quadrature(&f, w, &QuadratureSpec::default()).unwrap();
        prop_assert!((exact - quad).norm() <= 1e-10);
    }

    #[test]
    fn bessel_and_parseval(f in mixture(3), k in 2usize..40) {
        let spec = QuadratureSpec::default();
        let s = coefficients(&f, k, &spec).unwrap();
        let norm = f.l2_norm_squared();
        prop_assert!(s.energy() <= norm * (1.0 + 1e-10) + 1e-12);
        let residual = full_line_squared_error(&f, &s, &spec).unwrap();
        prop_assert!((residual - (norm - s.energy())).abs() <= 1e-9 * (1.0 + norm));
    }

    #[test]
    fn coefficients_shrink_as_n_doubles(n in 1usize..300, t in 0.5..5.0f64) {
        let a = coefficient_table(n, band_edge(2 * n).unwrap(), t);
        let b = coefficient_table(2 * n, band_edge(4 * n).unwrap(), t);
        for (x, y) in a.entries.iter().zip(&b.entries) {
            prop_assert!(x.coefficient >= 0.0);
            prop_assert!(y.coefficient < x.coefficient, "{}: {} -> {}", x.functional, x.coefficient, y.coefficient);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ledger_entries_are_ordered(f in mixture(2), n in 1usize..12, t in 0.5..4.0f64) {
        let l = moment_ledger(&f, n, t, band_edge(2 * n).unwrap(), &QuadratureSpec::default()).unwrap();
        let all = hermite_rms::bound::Functional::all();
        prop_assert!(all.iter().all(|&x| l.get(x) >= 0.0));
        for j in 1..8 {
            prop_assert!(l.abs_moment[j] <= t.powi(j as i32) * l.abs_moment[0] * (1.0 + 1e-12));
        }
        for j in 1..4 {
            prop_assert!(l.deriv_abs_moment[j] <= t.powi(j as i32) * l.deriv_abs_moment[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn bound_dominates_measured_error(f in mixture(2), half in 1usize..=10, t in 1.0..4.0f64) {
        let spec = QuadratureSpec::default();
        let k = 2 * half;
        let s = coefficients(&f, k, &spec).unwrap();
        let m = measure_error(&f, &s, t, 201, &spec).unwrap();
        let b = theorem1_bound(&f, k, t, &spec).unwrap();
        prop_assert!(m.rms <= b.total + 1e-8, "rms {} bound {}", m.rms, b.total);
        let sum = b.term_tail_t + b.term_tail_omega + b.term_f_n + b.term_sansone;
        assert_abs_diff_eq!(b.total, sum, epsilon = 1e-15 * sum.max(1.0));
    }
}
