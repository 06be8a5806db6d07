//! Command-line front end for `hermite-rms`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad configuration, 3 numerical failure.

pub mod format;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hermite_rms::bound::{bound_report, BoundBreakdown, CoefficientTable, Functional, MomentLedger};
use hermite_rms::reproduce::{self, ReproRow, ReproduceError};
use hermite_rms::sansone::{direct_sansone, DirectOptions, SansoneError, SansoneParams};
use hermite_rms::series::{coefficients, measure_error, ErrorReport, DEFAULT_GRID_POINTS};
use hermite_rms::verify::{self, Depth, Suite, SuiteReport};
use hermite_rms::{band_edge, BoundError, GaussianMixture, QuadError, QuadratureSpec, SeriesError};
use serde::{Deserialize, Serialize};

use crate::format::{num, to_csv, to_json};

#[derive(Debug, Parser)]
#[command(name = "hermite-rms", version, about = "RMS error bounds for Hermite partial sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the closed-form error bound.
    Bound(BoundArgs),
    /// Measure the error of the partial sum S_K f on [-T, T].
    Approx(ApproxArgs),
    /// Recompute the worked example (trimodal, K = 500, T = 3).
    Reproduce(ReproduceArgs),
    /// Measured error and bound for a list of K.
    Sweep(SweepArgs),
    /// Run the validation suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Trimodal,
    Normal,
    TwoBump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct FunctionArgs {
    /// Named test function.
    #[arg(long, value_enum, conflicts_with = "mixture")]
    pub preset: Option<Preset>,
    /// Gaussian mixture as JSON triples [[w, a, c], ...] for sum of w*phi(a(t - c)).
    #[arg(long)]
    pub mixture: Option<String>,
}

impl FunctionArgs {
    fn resolve(&self) -> Result<GaussianMixture, CliError> {
        if let Some(m) = &self.mixture {
            return GaussianMixture::from_json(m).map_err(|e| CliError::Config(format!("--mixture: {e}")));
        }
        Ok(match self.preset.unwrap_or(Preset::Trimodal) {
            Preset::Trimodal => GaussianMixture::trimodal(),
            Preset::Normal => GaussianMixture::standard_normal(),
            Preset::TwoBump => verify::two_bump(),
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format; sweep defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Truncation order (even, at least 2).
    #[arg(long = "K")]
    pub order: usize,
    /// Window half-width.
    #[arg(long = "T", default_value_t = 3.0)]
    pub half_width: f64,
    /// Override the band edge N.
    #[arg(long = "N")]
    pub band: Option<f64>,
    /// Also compute the five correction norms by direct double quadrature.
    #[arg(long)]
    pub direct: bool,
    /// Allow --direct above n = 50.
    #[arg(long)]
    pub force_large_n: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Truncation order (even, at least 2).
    #[arg(long = "K")]
    pub order: usize,
    /// Window half-width.
    #[arg(long = "T", default_value_t = 3.0)]
    pub half_width: f64,
    /// Points in the grid used for the sup error.
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    /// Relative tolerance for each reference figure.
    #[arg(long, default_value_t = reproduce::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Comma-separated truncation orders.
    #[arg(long = "K", value_delimiter = ',', num_args = 0..)]
    pub orders: Vec<usize>,
    /// Window half-width.
    #[arg(long = "T", default_value_t = 3.0)]
    pub half_width: f64,
    /// Points in the grid used for the sup error.
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Two-column plot data; defaults to the output path with extension plot.txt.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// quick or full.
    #[arg(long, default_value = "quick", value_parser = parse_depth)]
    pub depth: Depth,
    /// Run only these suites (repeatable).
    #[arg(long = "suite", value_parser = parse_suite)]
    pub suites: Vec<Suite>,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_depth(s: &str) -> Result<Depth, String> {
    s.parse()
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::InvalidInterval { .. } | QuadError::InvalidSpec(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        match e {
            BoundError::Quadrature(q) => q.into(),
            BoundError::BandLimit(hermite_rms::BandLimitError::Quadrature(q)) => q.into(),
            BoundError::BandLimit(hermite_rms::BandLimitError::NotReal { .. }) => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Quadrature(q) => q.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<SansoneError> for CliError {
    fn from(e: SansoneError) -> Self {
        match e {
            SansoneError::Quadrature(q) => q.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ReproduceError> for CliError {
    fn from(e: ReproduceError) -> Self {
        match e {
            ReproduceError::Bound(b) => b.into(),
            ReproduceError::Series(s) => s.into(),
            ReproduceError::Quadrature(q) => q.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// What a command produced; `main` writes it out.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub body: String,
    pub output: Option<PathBuf>,
    /// Additional files to write.
    pub files: Vec<(PathBuf, String)>,
    /// Lines for stderr.
    pub notes: Vec<String>,
    pub exit_code: i32,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Bound(a) => cmd_bound(a),
        Command::Approx(a) => cmd_approx(a),
        Command::Reproduce(a) => cmd_reproduce(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn check_order(order: usize) -> Result<(), CliError> {
    if order % 2 == 1 {
        return Err(CliError::Config(format!("K must be even, got {order}")));
    }
    if order < 2 {
        return Err(CliError::Config(format!("K must be at least 2, got {order}")));
    }
    Ok(())
}

fn check_half_width(t: f64) -> Result<(), CliError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("T must be positive, got {t}")))
    }
}

fn key_value_csv(pairs: &[(String, String)]) -> String {
    let rows: Vec<Vec<String>> = pairs.iter().map(|(k, v)| vec![k.clone(), v.clone()]).collect();
    to_csv(&["quantity", "value"], &rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suspect {
    pub functional: String,
    pub summand: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundOutput {
    pub function: GaussianMixture,
    pub breakdown: BoundBreakdown,
    pub ledger: MomentLedger,
    pub coefficients: CoefficientTable,
    pub suspects: Vec<Suspect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_sansone: Option<[f64; 5]>,
}

fn breakdown_pairs(b: &BoundBreakdown) -> Vec<(String, String)> {
    let mut v = vec![("K".to_string(), b.order.to_string()), ("n".to_string(), b.n.to_string())];
    v.extend(
        [
            ("N", b.band),
            ("T", b.half_width),
            ("term_tail_t", b.term_tail_t),
            ("term_tail_omega", b.term_tail_omega),
            ("term_fN", b.term_f_n),
            ("term_fN_f_variant", b.term_f_n_f_variant),
            ("term_sansone", b.term_sansone),
            ("sansone_upper", b.sansone_upper),
            ("total", b.total),
        ]
        .map(|(k, x)| (k.to_string(), num(x))),
    );
    v
}

fn cmd_bound(a: BoundArgs) -> Result<Outcome, CliError> {
    check_order(a.order)?;
    check_half_width(a.half_width)?;
    if let Some(n) = a.band {
        if !(n > 0.0 && n.is_finite()) {
            return Err(CliError::Config(format!("N must be positive, got {n}")));
        }
    }
    let f = a.function.resolve()?;
    let spec = QuadratureSpec::default();
    let report = bound_report(&f, a.order, a.half_width, a.band, &spec)?;
    let direct_sansone = if a.direct {
        let mut p = SansoneParams::new(a.order / 2, a.half_width)?;
        p.band = report.breakdown.band;
        let options = DirectOptions {
            force: a.force_large_n,
            ..DirectOptions::default()
        };
        Some(direct_sansone(&f, &p, &spec, options)?)
    } else {
        None
    };
    let suspects: Vec<Suspect> = report
        .coefficients
        .suspects()
        .into_iter()
        .map(|(functional, summand, reason)| Suspect {
            functional,
            summand,
            reason,
        })
        .collect();
    let notes = suspects
        .iter()
        .map(|s| format!("note: {} summand {} evaluated as written ({})", s.functional, s.summand, s.reason))
        .collect();
    let out = BoundOutput {
        function: f,
        breakdown: report.breakdown,
        ledger: report.ledger,
        coefficients: report.coefficients,
        suspects,
        direct_sansone,
    };
    let body = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut pairs = breakdown_pairs(&out.breakdown);
            for f in Functional::all() {
                pairs.push((format!("ledger.{f}"), num(out.ledger.get(f))));
            }
            for f in Functional::all() {
                pairs.push((format!("coefficient.{f}"), num(out.coefficients.coefficient(f))));
            }
            if let Some(d) = out.direct_sansone {
                for (k, v) in d.iter().enumerate() {
                    pairs.push((format!("direct_sansone.M{}", k + 1), num(*v)));
                }
            }
            key_value_csv(&pairs)
        }
    };
    Ok(Outcome {
        body,
        output: a.out.output,
        notes,
        ..Outcome::default()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxOutput {
    pub function: GaussianMixture,
    #[serde(rename = "K")]
    pub order: usize,
    #[serde(flatten)]
    pub error: ErrorReport,
    /// `Σ c_k²`.
    pub energy: f64,
}

fn cmd_approx(a: ApproxArgs) -> Result<Outcome, CliError> {
    check_order(a.order)?;
    check_half_width(a.half_width)?;
    let f = a.function.resolve()?;
    let spec = QuadratureSpec::default();
    let s = coefficients(&f, a.order, &spec)?;
    let error = measure_error(&f, &s, a.half_width, a.grid_points, &spec)?;
    let out = ApproxOutput {
        function: f,
        order: a.order,
        energy: s.energy(),
        error,
    };
    let body = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => key_value_csv(&[
            ("K".into(), out.order.to_string()),
            ("T".into(), num(out.error.half_width)),
            ("grid_points".into(), out.error.grid_points.to_string()),
            ("rms".into(), num(out.error.rms)),
            ("sup".into(), num(out.error.sup)),
            ("energy".into(), num(out.energy)),
        ]),
    };
    Ok(Outcome {
        body,
        output: a.out.output,
        ..Outcome::default()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceOutput {
    #[serde(rename = "K")]
    pub order: usize,
    #[serde(rename = "N")]
    pub band: f64,
    #[serde(rename = "T")]
    pub half_width: f64,
    pub tolerance: f64,
    pub rows: Vec<ReproRow>,
    #[serde(rename = "term_fN_f_variant")]
    pub term_f_n_f_variant: f64,
    pub measured_rms: f64,
    pub passed: bool,
}

pub const REPRODUCE_COLUMNS: [&str; 5] = ["quantity", "paper_value", "computed_value", "rel_diff", "pass"];

fn cmd_reproduce(a: ReproduceArgs) -> Result<Outcome, CliError> {
    let r = reproduce::reproduce(a.tolerance, &QuadratureSpec::default())?;
    let passed = r.passed();
    let notes: Vec<String> = r
        .failures()
        .map(|row| {
            format!(
                "FAIL {}: computed {} vs reference {} (rel. diff {})",
                row.quantity,
                num(row.computed_value),
                num(row.paper_value),
                num(row.rel_diff)
            )
        })
        .collect();
    let out = ReproduceOutput {
        order: reproduce::ORDER,
        band: r.report.breakdown.band,
        half_width: reproduce::HALF_WIDTH,
        tolerance: r.tolerance,
        term_f_n_f_variant: r.report.breakdown.term_f_n_f_variant,
        measured_rms: r.measured.rms,
        rows: r.rows,
        passed,
    };
    let body = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => {
            let rows: Vec<Vec<String>> = out
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.quantity.clone(),
                        num(r.paper_value),
                        num(r.computed_value),
                        num(r.rel_diff),
                        r.pass.to_string(),
                    ]
                })
                .collect();
            to_csv(&REPRODUCE_COLUMNS, &rows)
        }
    };
    Ok(Outcome {
        body,
        output: a.out.output,
        notes,
        exit_code: if passed { 0 } else { 1 },
        ..Outcome::default()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "K")]
    pub order: usize,
    #[serde(rename = "N")]
    pub band: f64,
    pub measured_rms: f64,
    pub measured_sup: f64,
    pub term_tail_t: f64,
    pub term_tail_omega: f64,
    #[serde(rename = "term_fN")]
    pub term_f_n: f64,
    pub term_sansone: f64,
    pub bound_total: f64,
}

pub const SWEEP_COLUMNS: [&str; 9] = [
    "K",
    "N",
    "measured_rms",
    "measured_sup",
    "term_tail_t",
    "term_tail_omega",
    "term_fN",
    "term_sansone",
    "bound_total",
];

impl SweepRow {
    fn cells(&self) -> Vec<f64> {
        vec![
            self.band,
            self.measured_rms,
            self.measured_sup,
            self.term_tail_t,
            self.term_tail_omega,
            self.term_f_n,
            self.term_sansone,
            self.bound_total,
        ]
    }
}

/// Gnuplot-style blocks, one per curve, each `K value` per line.
pub fn plot_data(rows: &[SweepRow]) -> String {
    let mut s = String::new();
    for (i, name) in SWEEP_COLUMNS.iter().enumerate().skip(2) {
        if i > 2 {
            s.push_str("\n\n");
        }
        s.push_str(&format!("# {name} vs K\n"));
        for r in rows {
            s.push_str(&format!("{} {}\n", r.order, num(r.cells()[i - 1])));
        }
    }
    s
}

fn cmd_sweep(a: SweepArgs) -> Result<Outcome, CliError> {
    if a.orders.is_empty() {
        return Err(CliError::Config("no K values given".into()));
    }
    for &k in &a.orders {
        check_order(k)?;
    }
    check_half_width(a.half_width)?;
    let f = a.function.resolve()?;
    let spec = QuadratureSpec::default();
    let max_order = *a.orders.iter().max().expect("non-empty");
    let all = coefficients(&f, max_order, &spec)?;
    let mut rows = Vec::with_capacity(a.orders.len());
    let mut notes = Vec::new();
    for &k in &a.orders {
        let m = measure_error(&f, &all.truncated(k), a.half_width, a.grid_points, &spec)?;
        let b = bound_report(&f, k, a.half_width, None, &spec)?.breakdown;
        if m.rms > b.total {
            notes.push(format!("K = {k}: measured rms exceeds the bound"));
        }
        rows.push(SweepRow {
            order: k,
            band: band_edge(k).map_err(|e| CliError::Config(e.to_string()))?,
            measured_rms: m.rms,
            measured_sup: m.sup,
            term_tail_t: b.term_tail_t,
            term_tail_omega: b.term_tail_omega,
            term_f_n: b.term_f_n,
            term_sansone: b.term_sansone,
            bound_total: b.total,
        });
    }
    let body = match a.out.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut c = vec![r.order.to_string()];
                    c.extend(r.cells().into_iter().map(num));
                    c
                })
                .collect();
            to_csv(&SWEEP_COLUMNS, &cells)
        }
    };
    let plot_path = a
        .plot_data
        .or_else(|| a.out.output.as_ref().map(|p| p.with_extension("plot.txt")));
    let files = plot_path.map(|p| (p, plot_data(&rows))).into_iter().collect();
    Ok(Outcome {
        body,
        output: a.out.output,
        files,
        notes,
        exit_code: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub depth: Depth,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

fn cmd_verify(a: VerifyArgs) -> Result<Outcome, CliError> {
    let suites = if a.suites.is_empty() { Suite::ALL.to_vec() } else { a.suites };
    let reports = verify::run_suites(&suites, a.depth, &QuadratureSpec::default());
    let mut notes = Vec::new();
    for r in &reports {
        let passed = r.checks.iter().filter(|c| c.pass).count();
        notes.push(format!("{}: {}/{} checks passed", r.suite, passed, r.checks.len()));
        for c in r.failures() {
            let detail = c.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default();
            notes.push(format!("  FAIL {}: {} vs limit {}{}", c.label, num(c.value), num(c.limit), detail));
        }
    }
    let passed = reports.iter().all(SuiteReport::passed);
    let out = VerifyOutput {
        depth: a.depth,
        passed,
        suites: reports,
    };
    let body = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => {
            let rows: Vec<Vec<String>> = out
                .suites
                .iter()
                .flat_map(|r| {
                    r.checks.iter().map(move |c| {
                        vec![
                            r.suite.to_string(),
                            c.label.clone(),
                            num(c.value),
                            num(c.limit),
                            c.pass.to_string(),
                            c.note.clone().unwrap_or_default(),
                        ]
                    })
                })
                .collect();
            to_csv(&["suite", "check", "value", "limit", "pass", "note"], &rows)
        }
    };
    Ok(Outcome {
        body,
        output: a.out.output,
        notes,
        exit_code: if passed { 0 } else { 1 },
        ..Outcome::default()
    })
}
