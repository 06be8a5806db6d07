//! Acceptance run: one PASS/FAIL line per criterion, detail lines indented below it.
//! Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hermite_rms::bandlimit::band_edge;
use hermite_rms::bound::{bound_report, Functional};
use hermite_rms::quadrature::QuadratureSpec;
use hermite_rms::reproduce::{reproduce, DEFAULT_TOLERANCE, REFERENCE_BAND};
use hermite_rms::test_functions::GaussianMixture;
use hermite_rms::verify::{run_suite, Depth, Suite, SuiteReport};

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

fn suite_details(r: &SuiteReport) -> Vec<String> {
    r.checks
        .iter()
        .map(|c| {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            let cmp = if c.at_least { ">=" } else { "<=" };
            let note = c.note.as_deref().map(|n| format!(" [{n}]")).unwrap_or_default();
            format!("{mark} {}: {:.6e} {cmp} {:.3e}{note}", c.label, c.value, c.limit)
        })
        .collect()
}

fn from_suites(reports: &[SuiteReport], summary: String) -> Outcome {
    Outcome {
        pass: reports.iter().all(SuiteReport::passed),
        summary,
        details: reports.iter().flat_map(suite_details).collect(),
    }
}

type Criterion = fn(&QuadratureSpec) -> Outcome;

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn criterion_1(spec: &QuadratureSpec) -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    let band = band_edge(500).unwrap();
    let band_ok = (band - REFERENCE_BAND).abs() < 1e-4;
    details.push(format!(
        "{} N = {band:.4} (reference {REFERENCE_BAND})",
        if band_ok { "ok  " } else { "FAIL" }
    ));
    let r = match reproduce(DEFAULT_TOLERANCE, spec) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                pass: false,
                summary: format!("worked example did not compute: {e}"),
                details,
            }
        }
    };
    for row in &r.rows {
        let rule = if row.quantity == "sup_error" {
            "below 1.5x reference".to_string()
        } else {
            format!("within {:.0}%", 100.0 * DEFAULT_TOLERANCE)
        };
        details.push(format!(
            "{} {}: computed {:.6e}, reference {}, rel. diff {:+.2}% ({rule})",
            if row.pass { "ok  " } else { "FAIL" },
            row.quantity,
            row.computed_value,
            row.paper_value,
            100.0 * row.rel_diff
        ));
    }
    details.push(format!(
        "info term_fN with f in place of f_N: {:.6e}; measured rms {:.6e}",
        r.report.breakdown.term_f_n_f_variant, r.measured.rms
    ));
    let elapsed = start.elapsed();
    let time_ok = elapsed < Duration::from_secs(300);
    Outcome {
        pass: band_ok && r.passed() && time_ok,
        summary: format!(
            "worked example K = 500, T = 3: {}/6 rows within tolerance, {}",
            r.rows.iter().filter(|x| x.pass).count(),
            secs(elapsed)
        ),
        details,
    }
}

fn criterion_2(spec: &QuadratureSpec) -> Outcome {
    let r = run_suite(Suite::BoundValidity, Depth::Full, spec);
    let n = r.checks.len();
    from_suites(
        &[r],
        format!("measured rms <= bound + 1e-8 on the {n}-cell matrix (T in 2, 3, 4)"),
    )
}

fn criterion_3(spec: &QuadratureSpec) -> Outcome {
    let start = Instant::now();
    let r = run_suite(Suite::CdKernel, Depth::Quick, spec);
    let elapsed = start.elapsed();
    let mut o = from_suites(&[r], format!("kernel identity for n <= 10, 100 pairs each, {}", secs(elapsed)));
    o.pass &= elapsed < Duration::from_secs(5);
    o
}

fn criterion_4(spec: &QuadratureSpec) -> Outcome {
    let reports = [
        run_suite(Suite::Orthonormality, Depth::Full, spec),
        run_suite(Suite::FourierEigen, Depth::Full, spec),
    ];
    from_suites(&reports, "orthonormality j,k <= 40 and transform eigenvalues k <= 8".into())
}

fn criterion_5(spec: &QuadratureSpec) -> Outcome {
    let r = run_suite(Suite::BandLimit, Depth::Full, spec);
    let n = r.checks.len();
    let mut o = from_suites(&[r], format!("band-limiting inequality on {n} (f, T, N) cases"));
    o.pass &= n >= 10;
    o
}

fn criterion_6(spec: &QuadratureSpec) -> Outcome {
    let start = Instant::now();
    let r = run_suite(Suite::Dominance, Depth::Full, spec);
    let elapsed = start.elapsed();
    let mut o = from_suites(
        &[r],
        format!("direct correction norms below the table estimate, n in 2, 5, 10, 25, {}", secs(elapsed)),
    );
    o.pass &= elapsed < Duration::from_secs(900);
    o
}

fn criterion_7(spec: &QuadratureSpec) -> Outcome {
    let r = run_suite(Suite::Decomposition, Depth::Full, spec);
    from_suites(&[r], "decomposition ratio within tolerance on >= 95% of eligible pairs".into())
}

fn criterion_8(spec: &QuadratureSpec) -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let f = GaussianMixture::trimodal();
    let base = bound_report(&f, 20, 3.0, None, spec).unwrap();
    for lambda in [2.0, 0.5] {
        let scaled = bound_report(&f.scaled(lambda), 20, 3.0, None, spec).unwrap();
        let mut worst = 0.0f64;
        let mut rel = |a: f64, b: f64| {
            let e = if a == 0.0 { b.abs() } else { (b / (lambda * a) - 1.0).abs() };
            worst = worst.max(e);
        };
        for func in Functional::all() {
            rel(base.ledger.get(func), scaled.ledger.get(func));
        }
        let (b, s) = (&base.breakdown, &scaled.breakdown);
        rel(b.sansone_upper, s.sansone_upper);
        rel(b.term_tail_t, s.term_tail_t);
        rel(b.term_tail_omega, s.term_tail_omega);
        rel(b.term_f_n, s.term_f_n);
        rel(b.term_sansone, s.term_sansone);
        rel(b.total, s.total);
        let ok = worst <= 1e-12;
        pass &= ok;
        details.push(format!(
            "{} lambda = {lambda}: worst relative deviation {worst:.2e} <= 1e-12",
            if ok { "ok  " } else { "FAIL" }
        ));
    }
    let first = serde_json::to_string(&bound_report(&f, 20, 3.0, None, spec).unwrap()).unwrap();
    let second = serde_json::to_string(&bound_report(&f, 20, 3.0, None, spec).unwrap()).unwrap();
    let same = first == second;
    pass &= same;
    details.push(format!(
        "{} repeated bound reports serialize byte-identically ({} bytes)",
        if same { "ok  " } else { "FAIL" },
        first.len()
    ));
    Outcome {
        pass,
        summary: "homogeneity under scaling and determinism".into(),
        details,
    }
}

fn main() -> ExitCode {
    let spec = QuadratureSpec::default();
    let criteria: [(usize, Criterion); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut failed = Vec::new();
    for (id, run) in criteria {
        let o = run(&spec);
        println!("{} criterion {id}: {}", if o.pass { "PASS" } else { "FAIL" }, o.summary);
        for d in &o.details {
            println!("    {d}");
        }
        if !o.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
