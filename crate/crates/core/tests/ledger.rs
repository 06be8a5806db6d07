use approx::assert_relative_eq;
use hermite_rms::bandlimit::band_edge;
use hermite_rms::bound::{bound_report, moment_ledger, Functional, MomentLedger};
use hermite_rms::quadrature::QuadratureSpec;
use hermite_rms::test_functions::{std_normal_pdf, BlackBox, GaussianMixture, TestFunction};
use hermite_rms::verify::dominance_pair;

/// The mixture seen only through its values and derivative.
fn opaque(m: &GaussianMixture) -> BlackBox {
    let (v, d) = (m.clone(), m.clone());
    BlackBox::new(move |t| v.value(t))
        .with_derivative(move |t| d.derivative(t).unwrap())
        .with_core_radius(m.core_radius())
}

fn assert_ledgers_agree(a: &MomentLedger, b: &MomentLedger, tol: f64) {
    for f in Functional::all() {
        let (x, y) = (a.get(f), b.get(f));
        assert!((x - y).abs() <= tol * x.abs().max(1.0), "{f}: {x} vs {y}");
    }
}

#[test]
fn closed_forms_agree_with_brute_force() {
    let spec = QuadratureSpec::default();
    let tight = spec.with_tolerances(spec.rel_tol / 10.0, spec.abs_tol / 10.0);
    for (m, n, t) in [
        (GaussianMixture::standard_normal(), 3usize, 2.0),
        (GaussianMixture::trimodal(), 5, 3.0),
        (GaussianMixture::from_triples(&[[1.0, 2.0, -0.5], [0.5, 4.0, 1.0]]).unwrap(), 5, 1.5),
    ] {
        let band = band_edge(2 * n).unwrap();
        let fast = moment_ledger(&m, n, t, band, &spec).unwrap();
        let slow = moment_ledger(&opaque(&m), n, t, band, &tight).unwrap();
        assert_ledgers_agree(&fast, &slow, 1e-9);
    }
}

#[test]
fn normal_density_examples() {
    let phi = GaussianMixture::standard_normal();
    let l = moment_ledger(&phi, 250, 3.0, band_edge(500).unwrap(), &QuadratureSpec::default()).unwrap();
    assert_relative_eq!(l.abs_moment[0], libm::erf(3.0 / 2f64.sqrt()), max_relative = 1e-12);
    assert_relative_eq!(l.abs_moment[1], 2.0 * (std_normal_pdf(0.0) - std_normal_pdf(3.0)), max_relative = 1e-12);
    // ∫|φ'| = 2φ(0) − 2φ(3)
    assert_relative_eq!(l.deriv_abs_moment[0], l.abs_moment[1], max_relative = 1e-12);
    // ∫_{|t|>3} φ² = erfc(3)/(2√π)
    let tail = libm::erfc(3.0) / (2.0 * std::f64::consts::PI.sqrt());
    assert_relative_eq!(l.tail_t, tail.sqrt(), max_relative = 1e-12);
}

#[test]
fn trimodal_boundary_is_direct_evaluation() {
    let f = GaussianMixture::trimodal();
    let l = moment_ledger(&f, 10, 3.0, band_edge(20).unwrap(), &QuadratureSpec::default()).unwrap();
    assert_eq!(l.boundary, f.value(-3.0) + f.value(3.0));
    assert!(f.value(-3.0) > 0.0 && f.value(3.0) > 0.0);
    assert_relative_eq!(l.boundary, 0.004_431_848_411_938, max_relative = 1e-9);
}

/// Reference values from an independent SciPy implementation of the same functionals.
#[test]
fn worked_example_ledger() {
    let f = GaussianMixture::trimodal();
    let r = bound_report(&f, 500, 3.0, None, &QuadratureSpec::default()).unwrap();
    let l = &r.ledger;
    let abs = [0.99865, 0.87451, 0.97035, 1.26273, 1.90295, 3.28417, 6.36373, 13.5045];
    for (j, (&got, want)) in l.abs_moment.iter().zip(abs).enumerate() {
        assert_relative_eq!(got, want, max_relative = 1e-4, epsilon = 0.0);
        assert!(got > 0.0, "abs_moment_{j}");
    }
    for (&got, want) in l.deriv_abs_moment.iter().zip([3.73984, 3.69083, 4.04000, 4.92706]) {
        assert_relative_eq!(got, want, max_relative = 1e-5);
    }
    for (got, want) in [
        (l.l2_alpha1, 0.69202),
        (l.l2_alpha2, 0.72464),
        (l.l2_alpha3, 0.84528),
        (l.l2_f_n, 0.754395),
        (l.l2_f_n_alpha4, 1.11636),
        (l.l2_f_omega, 0.506325),
        (l.l2_f_n_omega, 0.506166),
        (l.boundary, 0.0044318),
        (l.tail_t, 0.00124816),
        (l.tail_omega, 0.00214145),
    ] {
        assert_relative_eq!(got, want, max_relative = 2e-5);
    }
    let b = &r.breakdown;
    assert_relative_eq!(b.sansone_upper, 0.0600746, max_relative = 1e-5);
    assert_relative_eq!(b.term_tail_t, 0.000510578, max_relative = 1e-5);
    assert_relative_eq!(b.term_tail_omega, 0.000875992, max_relative = 1e-5);
    assert_relative_eq!(b.term_f_n, 0.000615961, max_relative = 1e-5);
    assert_relative_eq!(b.term_sansone, 0.0191414, max_relative = 1e-5);
}

#[test]
fn scaling_is_exact() {
    let spec = QuadratureSpec::default();
    let f = GaussianMixture::from_triples(&[[1.0, 2.0, -0.5], [0.5, 4.0, 1.0]]).unwrap();
    let base = bound_report(&f, 10, 2.0, None, &spec).unwrap();
    for lambda in [2.0, 0.5] {
        let s = bound_report(&f.scaled(lambda), 10, 2.0, None, &spec).unwrap();
        for x in Functional::all() {
            assert_relative_eq!(s.ledger.get(x), lambda * base.ledger.get(x), max_relative = 1e-12);
        }
        assert_relative_eq!(s.breakdown.total, lambda * base.breakdown.total, max_relative = 1e-12);
        assert_relative_eq!(s.breakdown.sansone_upper, lambda * base.breakdown.sansone_upper, max_relative = 1e-12);
    }
}

#[test]
fn table_dominates_direct_norms_for_small_n() {
    let spec = QuadratureSpec::default();
    let (direct, upper) = dominance_pair(&GaussianMixture::standard_normal(), 5, 2.0, &spec).unwrap();
    assert_relative_eq!(direct, 0.050373, max_relative = 1e-4);
    assert!(direct <= upper);
}
