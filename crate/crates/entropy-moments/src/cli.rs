//! Command-line front end: `moments`, `verify`, and `sweep`.
//!
//! Output contracts:
//! * exit codes — 0 success, 1 verification failure, 2 usage/domain error;
//! * CSV — UTF-8, LF line endings, header row exactly
//!   `m,n,q,mean,second_moment,variance,method,flags`, floats with 17
//!   significant digits so they round-trip;
//! * JSON — one flat object per result with keys
//!   `m,n,q,mean,second_moment,variance,method,flags` (plus `*_exact`
//!   strings in exact mode), numbers as JSON numbers.

use crate::error::{Error, Result};
use crate::laguerre::Dims;
use crate::moments::{self, Mode};
use crate::montecarlo;
use crate::quadrature;
use crate::specfun::rational;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Environment variable consulted for the default worker count.
pub const WORKERS_ENV: &str = "ENTROPY_MOMENTS_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "entropy-moments",
    about = "Exact Tsallis / von Neumann entanglement entropy moments for random pure states",
    version
)]
pub struct CliArgs {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Compute E[T], E[T^2], and V[T] for one (m, n, q) cell
    Moments(MomentsArgs),
    /// Run oracle cross-check suites and report per-check errors
    Verify(VerifyArgs),
    /// Evaluate a (m, n, q) grid and emit one row per cell
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct MomentsArgs {
    /// Smaller subsystem dimension (1 <= m <= n)
    #[arg(long)]
    m: u32,
    /// Larger subsystem dimension
    #[arg(long)]
    n: u32,
    /// Entropy order q > -1/2, q != 0; q = 1 selects the von Neumann branch
    #[arg(long, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[arg(long, value_enum, default_value_t = CliMode::Auto)]
    mode: CliMode,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Which suite to run
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Dimensions and order for the Monte Carlo suite
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads (default: $ENTROPY_MOMENTS_WORKERS, else 1)
    #[arg(long)]
    workers: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// m values: single (`2`) or inclusive range (`2..4`)
    #[arg(long)]
    m: String,
    /// n values: single or inclusive range
    #[arg(long)]
    n: String,
    /// Comma-separated q list, e.g. `0.5,1,2`
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[arg(long, value_enum, default_value_t = CliMode::Auto)]
    mode: CliMode,
    /// Worker threads for grid evaluation
    #[arg(long)]
    workers: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliMode {
    Auto,
    Float,
    Exact,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Mode {
        match m {
            CliMode::Auto => Mode::Auto,
            CliMode::Float => Mode::Float,
            CliMode::Exact => Mode::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Special-case formulas against the general path
    ClosedForms,
    /// Closed forms against Gauss-Laguerre integration
    Quadrature,
    /// von Neumann variance against the moment-chain identity
    Appendix,
    /// q -> 1 extrapolation against the von Neumann formula
    Limit,
    /// Monte Carlo concordance for one cell
    Mc,
    /// Everything above
    All,
}

/// What a run will do, after parse-time validation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub m: Vec<u32>,
    pub n: Vec<u32>,
    pub q: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub workers: u64,
    pub format: OutputFormat,
    pub mode: Mode,
    pub suite: Option<Suite>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Moments,
    Verify,
    Sweep,
}

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Entry point used by the binary: parse, validate, dispatch.
pub fn run<I, T>(args: I, out: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match CliArgs::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version as "errors" with zero exit
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    let config = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match config.command {
        CommandKind::Moments => cmd_moments(&config, out),
        CommandKind::Verify => cmd_verify(&config, out),
        CommandKind::Sweep => cmd_sweep(&config, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            EXIT_USAGE
        }
    }
}

impl RunConfig {
    fn from_cli(cli: CliArgs) -> Result<Self> {
        let workers_default = || -> u64 {
            std::env::var(WORKERS_ENV)
                .ok()
                .and_then(|v| v.parse().ok())
                .filter(|&w| w >= 1)
                .unwrap_or(1)
        };
        match cli.command {
            CommandArgs::Moments(a) => {
                Dims::new(a.m, a.n)?;
                validate_order(a.q)?;
                Ok(RunConfig {
                    command: CommandKind::Moments,
                    m: vec![a.m],
                    n: vec![a.n],
                    q: vec![a.q],
                    samples: 0,
                    seed: 0,
                    workers: 1,
                    format: a.format,
                    mode: a.mode.into(),
                    suite: None,
                })
            }
            CommandArgs::Verify(a) => {
                Dims::new(a.m, a.n)?;
                validate_order(a.q)?;
                if a.samples < montecarlo::MIN_SAMPLES {
                    return Err(Error::Config(format!(
                        "--samples {} below the minimum {}",
                        a.samples,
                        montecarlo::MIN_SAMPLES
                    )));
                }
                Ok(RunConfig {
                    command: CommandKind::Verify,
                    m: vec![a.m],
                    n: vec![a.n],
                    q: vec![a.q],
                    samples: a.samples,
                    seed: a.seed,
                    workers: a.workers.unwrap_or_else(workers_default),
                    format: a.format,
                    mode: Mode::Auto,
                    suite: Some(a.suite),
                })
            }
            CommandArgs::Sweep(a) => {
                let m = parse_range(&a.m, "--m")?;
                let n = parse_range(&a.n, "--n")?;
                let q = parse_q_list(&a.q)?;
                Ok(RunConfig {
                    command: CommandKind::Sweep,
                    m,
                    n,
                    q,
                    samples: 0,
                    seed: 0,
                    workers: a.workers.unwrap_or_else(workers_default),
                    format: a.format,
                    mode: a.mode.into(),
                    suite: None,
                })
            }
        }
    }
}

/// Order validation with the actionable message the CLI contract wants.
fn validate_order(q: f64) -> Result<()> {
    if q == 1.0 {
        return Ok(()); // von Neumann branch
    }
    if !q.is_finite() || q <= -0.5 {
        return Err(Error::Config(format!(
            "q = {q} violates `q > -1/2` (the second moment needs 2q > -1)"
        )));
    }
    if q == 0.0 {
        return Err(Error::Config(
            "q = 0 violates `q != 0` (Tsallis entropy undefined)".into(),
        ));
    }
    if (q - 1.0).abs() < moments::VON_NEUMANN_GUARD {
        return Err(Error::Config(format!(
            "q = {q} is inside the guard band |q - 1| < {} where the \
             conversion is ill-conditioned; use --q 1 for the von Neumann \
             branch",
            moments::VON_NEUMANN_GUARD
        )));
    }
    Ok(())
}

fn parse_range(text: &str, flag: &str) -> Result<Vec<u32>> {
    let bad = |why: &str| Error::Config(format!("{flag} {text}: {why}"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u32 = lo
            .trim()
            .parse()
            .map_err(|_| bad("range start is not an integer"))?;
        let hi: u32 = hi
            .trim()
            .parse()
            .map_err(|_| bad("range end is not an integer"))?;
        if lo == 0 || hi < lo {
            return Err(bad("need 1 <= start <= end"));
        }
        Ok((lo..=hi).collect())
    } else {
        let v: u32 = text.trim().parse().map_err(|_| bad("not an integer"))?;
        if v == 0 {
            return Err(bad("dimension must be >= 1"));
        }
        Ok(vec![v])
    }
}

fn parse_q_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("--q entry `{piece}` is not a number")))
        })
        .collect()
}

/// One output row, shared by `moments` and `sweep`. Field order is the wire
/// order for both JSON and CSV.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ResultRow {
    pub m: u32,
    pub n: u32,
    pub q: f64,
    pub mean: Option<f64>,
    pub second_moment: Option<f64>,
    pub variance: Option<f64>,
    pub method: String,
    pub flags: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_moment_exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_exact: Option<String>,
}

/// Exactly the pinned sweep header.
pub const CSV_HEADER: &str = "m,n,q,mean,second_moment,variance,method,flags";

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

impl ResultRow {
    fn from_report(r: &moments::MomentReport) -> Self {
        ResultRow {
            m: r.dims.m(),
            n: r.dims.n(),
            q: r.q,
            mean: Some(r.e_t),
            second_moment: Some(r.e_t2),
            variance: Some(r.var_t),
            method: r.method.to_string(),
            // flags are joined with ';' so the CSV cell needs no quoting
            flags: r.cancellation_flags.join("; ").replace(',', ";"),
            mean_exact: r.exact.as_ref().map(|e| rational::render(&e.mean)),
            second_moment_exact: r.exact.as_ref().map(|e| rational::render(&e.second_moment)),
            variance_exact: r.exact.as_ref().map(|e| rational::render(&e.variance)),
        }
    }

    fn from_error(m: u32, n: u32, q: f64, e: &Error) -> Self {
        ResultRow {
            m,
            n,
            q,
            mean: None,
            second_moment: None,
            variance: None,
            method: "error".into(),
            flags: e.to_string().replace(',', ";"),
            mean_exact: None,
            second_moment_exact: None,
            variance_exact: None,
        }
    }

    fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.m,
            self.n,
            fmt17(self.q),
            fmt_opt(self.mean),
            fmt_opt(self.second_moment),
            fmt_opt(self.variance),
            self.method,
            self.flags
        )
    }

    fn to_text(&self) -> String {
        let mut s = format!(
            "dims = ({}, {})  q = {}\n  mean            E[T]  = {}\n  second moment   E[T2] = {}\n  variance        V[T]  = {}\n  method: {}",
            self.m,
            self.n,
            self.q,
            fmt_opt(self.mean),
            fmt_opt(self.second_moment),
            fmt_opt(self.variance),
            self.method,
        );
        if let (Some(me), Some(se), Some(ve)) = (
            self.mean_exact.as_ref(),
            self.second_moment_exact.as_ref(),
            self.variance_exact.as_ref(),
        ) {
            s.push_str(&format!(
                "\n  exact: mean = {me}, second = {se}, variance = {ve}"
            ));
        }
        if !self.flags.is_empty() {
            s.push_str(&format!("\n  flags: {}", self.flags));
        }
        s
    }
}

/// `moments` subcommand: one report, rendered per `--format`.
pub fn cmd_moments(config: &RunConfig, out: &mut impl Write) -> Result<i32> {
    let dims = Dims::new(config.m[0], config.n[0])?;
    let report = moments::report(dims, config.q[0], config.mode)?;
    let row = ResultRow::from_report(&report);
    match config.format {
        OutputFormat::Text => writeln!(out, "{}", row.to_text()),
        OutputFormat::Json => writeln!(out, "{}", serde_json::to_string(&row).expect("serialize")),
        OutputFormat::Csv => {
            writeln!(out, "{CSV_HEADER}").and_then(|()| writeln!(out, "{}", row.to_csv()))
        }
    }
    .map_err(|e| Error::Config(e.to_string()))?;
    Ok(EXIT_OK)
}

/// One verification check: a named relative error against a tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: impl Into<String>, err: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        error: err,
        tolerance: tol,
        pass: err.is_finite() && err <= tol,
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

fn closed_form_checks(checks: &mut Vec<Check>) -> Result<()> {
    // quadratic entropy across m <= n <= 10, float vs the rational values
    let mut worst_q2 = 0.0f64;
    let mut exact_mismatch = false;
    for m in 1..=10u32 {
        for n in m..=10 {
            let dims = Dims::new(m, n)?;
            let general = moments::tsallis_variance(dims, 2.0)?;
            let closed = moments::exact::quadratic_exact(dims);
            worst_q2 = worst_q2.max(rel_err(general.var_t, rational::to_f64(&closed.variance)));
            if let Some(exact) = &general.exact {
                exact_mismatch |= exact.variance != closed.variance;
            }
        }
    }
    checks.push(check(
        "q=2 variance vs closed form (float)",
        worst_q2,
        1e-12,
    ));
    checks.push(check(
        "q=2 variance vs closed form (rational)",
        if exact_mismatch { 1.0 } else { 0.0 },
        0.0,
    ));

    // small-m closed forms vs the general path
    let mut worst_sm = 0.0f64;
    for m in [2u32, 3] {
        for n in m..=8 {
            let dims = Dims::new(m, n)?;
            for q in [0.5, 1.5, 2.0, 2.5, 3.0] {
                let (sm_l, sm_l2) = moments::small_m_induced(dims, q)?;
                worst_sm = worst_sm.max(rel_err(
                    sm_l.to_f64(),
                    moments::induced_mean(dims, q)?.to_f64(),
                ));
                worst_sm = worst_sm.max(rel_err(
                    sm_l2.to_f64(),
                    moments::induced_second(dims, q)?.to_f64(),
                ));
            }
        }
    }
    checks.push(check("small-m closed forms vs general", worst_sm, 1e-10));

    // q = 1 degeneracy of the induced moments
    let mut worst_q1 = 0.0f64;
    for m in 1..=8u32 {
        for n in m..=8 {
            let dims = Dims::new(m, n)?;
            if dims.mn() > 64 {
                continue;
            }
            let mn = dims.mn() as f64;
            worst_q1 = worst_q1.max(rel_err(moments::induced_mean(dims, 1.0)?.to_f64(), mn));
            worst_q1 = worst_q1.max(rel_err(
                moments::induced_second(dims, 1.0)?.to_f64(),
                mn * (mn + 1.0),
            ));
        }
    }
    checks.push(check(
        "q=1 induced moments vs trace moments",
        worst_q1,
        1e-12,
    ));

    // m = 1 gives identically zero fixed-trace moments
    let mut worst_m1 = 0.0f64;
    for q in [0.5, 1.5, 2.0, 3.0] {
        let r = moments::tsallis_variance(Dims::new(1, 6)?, q)?;
        worst_m1 = worst_m1.max(r.e_t.abs()).max(r.var_t.abs());
    }
    checks.push(check("m=1 zero mean and variance", worst_m1, 0.0));

    // Schrödinger integral reduces to orthogonality, exactly, in rationals
    let mut ortho_fail = false;
    for alpha in 0..=2i64 {
        for s in 0..=5u32 {
            for t in 0..=5u32 {
                let v = crate::laguerre::schrodinger_integral_rational(s, t, alpha, alpha, alpha)?;
                let want = if s == t {
                    rational::rat_factorial(alpha as u32 + s) / rational::rat_factorial(s)
                } else {
                    rational::rat_int(0)
                };
                ortho_fail |= v != want;
            }
        }
    }
    checks.push(check(
        "orthogonality via Schrödinger integral (rational)",
        if ortho_fail { 1.0 } else { 0.0 },
        0.0,
    ));
    Ok(())
}

fn quadrature_checks(checks: &mut Vec<Check>) -> Result<()> {
    let mut worst_mean = 0.0f64;
    let mut worst_second = 0.0f64;
    for m in [2u32, 3] {
        for n in m..=8 {
            let dims = Dims::new(m, n)?;
            for q in [0.5, 1.5, 2.0, 2.5, 3.0] {
                let closed_mean = moments::induced_mean(dims, q)?.to_f64();
                let quad_mean = quadrature::induced_moment_oracle(dims, q)?;
                worst_mean = worst_mean.max(rel_err(closed_mean, quad_mean));

                let closed_second = moments::induced_second(dims, q)?.to_f64();
                let quad_second = quadrature::induced_second_moment_oracle(dims, q)?;
                worst_second = worst_second.max(rel_err(closed_second, quad_second));
            }
        }
    }
    checks.push(check("E_g[L] closed form vs quadrature", worst_mean, 1e-7));
    checks.push(check(
        "E_g[L^2] closed form vs I1 - I2 + E^2 assembly",
        worst_second,
        1e-7,
    ));
    Ok(())
}

fn appendix_checks(checks: &mut Vec<Check>) -> Result<()> {
    let mut worst = 0.0f64;
    for m in 1..=8u32 {
        for n in m..=12 {
            let dims = Dims::new(m, n)?;
            let direct = moments::von_neumann_variance(dims);
            let chain = moments::von_neumann_variance_via_moment_chain(dims);
            if m == 1 {
                worst = worst.max(chain.abs());
            } else {
                worst = worst.max(rel_err(chain, direct));
            }
        }
    }
    checks.push(check(
        "von Neumann variance: moment-chain identity",
        worst,
        1e-10,
    ));
    let spot = moments::von_neumann_variance(Dims::new(2, 2)?);
    checks.push(check(
        "von Neumann variance (2,2) spot value",
        (spot - 0.032_124_297_741_465_94).abs(),
        1e-12,
    ));
    Ok(())
}

fn limit_checks(checks: &mut Vec<Check>) -> Result<()> {
    let mut worst = 0.0f64;
    for m in 1..=6u32 {
        for n in m..=6 {
            let dims = Dims::new(m, n)?;
            let lim = moments::tsallis_variance_q1_limit(dims, 1e-3)?;
            worst = worst.max((lim - moments::von_neumann_variance(dims)).abs());
        }
    }
    checks.push(check(
        "q->1 Richardson limit vs von Neumann (abs)",
        worst,
        1e-6,
    ));
    Ok(())
}

fn mc_checks(config: &RunConfig, checks: &mut Vec<Check>) -> Result<()> {
    let dims = Dims::new(config.m[0], config.n[0])?;
    let q = config.q[0];
    let analytic = moments::report(dims, q, Mode::Auto)?;
    let est = montecarlo::run_mc(dims, q, config.samples, config.seed, config.workers)?;
    let mean_err = (est.mean - analytic.e_t).abs();
    let var_err = (est.variance - analytic.var_t).abs();
    checks.push(check(
        format!("MC mean within 4 se (dims {dims}, q {q})"),
        if est.se_mean > 0.0 {
            mean_err / est.se_mean
        } else {
            mean_err
        },
        4.0,
    ));
    checks.push(check(
        format!("MC variance within 4 se (dims {dims}, q {q})"),
        if est.se_variance > 0.0 {
            var_err / est.se_variance
        } else {
            var_err
        },
        4.0,
    ));
    let rerun = montecarlo::run_mc(dims, q, config.samples, config.seed, config.workers)?;
    checks.push(check(
        "MC determinism under fixed seed and workers",
        if rerun == est { 0.0 } else { 1.0 },
        0.0,
    ));
    Ok(())
}

/// `verify` subcommand.
pub fn cmd_verify(config: &RunConfig, out: &mut impl Write) -> Result<i32> {
    let suite = config.suite.unwrap_or(Suite::All);
    let mut checks = Vec::new();
    match suite {
        Suite::ClosedForms => closed_form_checks(&mut checks)?,
        Suite::Quadrature => quadrature_checks(&mut checks)?,
        Suite::Appendix => appendix_checks(&mut checks)?,
        Suite::Limit => limit_checks(&mut checks)?,
        Suite::Mc => mc_checks(config, &mut checks)?,
        Suite::All => {
            closed_form_checks(&mut checks)?;
            quadrature_checks(&mut checks)?;
            appendix_checks(&mut checks)?;
            limit_checks(&mut checks)?;
            mc_checks(config, &mut checks)?;
        }
    }

    let all_pass = checks.iter().all(|c| c.pass);
    let io = |e: std::io::Error| Error::Config(e.to_string());
    match config.format {
        OutputFormat::Json => {
            for c in &checks {
                writeln!(out, "{}", serde_json::to_string(c).expect("serialize")).map_err(io)?;
            }
        }
        OutputFormat::Csv => {
            writeln!(out, "name,error,tolerance,pass").map_err(io)?;
            for c in &checks {
                writeln!(
                    out,
                    "{},{},{},{}",
                    c.name.replace(',', ";"),
                    fmt17(c.error),
                    fmt17(c.tolerance),
                    c.pass
                )
                .map_err(io)?;
            }
        }
        OutputFormat::Text => {
            for c in &checks {
                writeln!(
                    out,
                    "{} {:<55} error {:9.2e}  tolerance {:9.2e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.error,
                    c.tolerance
                )
                .map_err(io)?;
            }
            writeln!(
                out,
                "{} ({} checks)",
                if all_pass {
                    "all passed"
                } else {
                    "FAILURES present"
                },
                checks.len()
            )
            .map_err(io)?;
        }
    }
    Ok(if all_pass {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

/// `sweep` subcommand: every (m, n, q) combination in lexicographic order,
/// one row each; domain errors become `error` rows and the sweep continues.
pub fn cmd_sweep(config: &RunConfig, out: &mut impl Write) -> Result<i32> {
    let mut cells: Vec<(u32, u32, f64)> = Vec::new();
    for &m in &config.m {
        for &n in &config.n {
            for &q in &config.q {
                cells.push((m, n, q));
            }
        }
    }
    cells.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.total_cmp(&b.2)));

    let evaluate = |&(m, n, q): &(u32, u32, f64)| -> ResultRow {
        let attempt = Dims::new(m, n).and_then(|dims| moments::report(dims, q, config.mode));
        match attempt {
            Ok(report) => ResultRow::from_report(&report),
            Err(e) => ResultRow::from_error(m, n, q, &e),
        }
    };

    // worker pool over contiguous chunks; chunk order preserves row order
    let workers = (config.workers.max(1) as usize).min(cells.len().max(1));
    let chunk_size = cells.len().div_ceil(workers);
    let rows: Vec<ResultRow> = if workers <= 1 || cells.len() < 2 {
        cells.iter().map(evaluate).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = cells
                .chunks(chunk_size)
                .map(|chunk| scope.spawn(move || chunk.iter().map(evaluate).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        })
    };

    let io = |e: std::io::Error| Error::Config(e.to_string());
    match config.format {
        OutputFormat::Csv => {
            writeln!(out, "{CSV_HEADER}").map_err(io)?;
            for row in &rows {
                writeln!(out, "{}", row.to_csv()).map_err(io)?;
            }
        }
        OutputFormat::Json => {
            for row in &rows {
                writeln!(out, "{}", serde_json::to_string(row).expect("serialize")).map_err(io)?;
            }
        }
        OutputFormat::Text => {
            for row in &rows {
                writeln!(out, "{}", row.to_text()).map_err(io)?;
            }
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_to_string(args: &[&str]) -> (String, i32) {
        let mut buf = Vec::new();
        let code = run(args.iter().map(|s| s.to_string()), &mut buf);
        (String::from_utf8(buf).unwrap(), code)
    }

    #[test]
    fn moments_json_has_schema_keys_and_values() {
        let (out, code) = run_to_string(&[
            "entropy-moments",
            "moments",
            "--m",
            "2",
            "--n",
            "2",
            "--q",
            "2",
            "--format",
            "json",
        ]);
        assert_eq!(code, EXIT_OK, "{out}");
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["m"], 2);
        assert_eq!(v["n"], 2);
        assert!((v["mean"].as_f64().unwrap() - 0.2).abs() < 1e-14);
        assert!((v["variance"].as_f64().unwrap() - 3.0 / 175.0).abs() < 1e-14);
        assert_eq!(v["variance_exact"], "3/175");
        assert_eq!(v["method"], "quadratic");
    }

    #[test]
    fn moments_json_round_trips_bytes() {
        let (out, _) = run_to_string(&[
            "entropy-moments",
            "moments",
            "--m",
            "3",
            "--n",
            "5",
            "--q",
            "1.5",
            "--format",
            "json",
        ]);
        let row: ResultRow = serde_json::from_str(out.trim()).unwrap();
        let re_rendered = serde_json::to_string(&row).unwrap();
        assert_eq!(out.trim(), re_rendered);
    }

    #[test]
    fn moments_m1_variance_zero() {
        let (out, code) = run_to_string(&[
            "entropy-moments",
            "moments",
            "--m",
            "1",
            "--n",
            "9",
            "--q",
            "3",
            "--format",
            "json",
        ]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["variance"].as_f64().unwrap(), 0.0);
    }

    #[test]
    fn moments_von_neumann_branch() {
        let (out, code) = run_to_string(&[
            "entropy-moments",
            "moments",
            "--m",
            "2",
            "--n",
            "2",
            "--q",
            "1",
            "--format",
            "json",
        ]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["method"], "von_neumann");
        assert!((v["mean"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((v["variance"].as_f64().unwrap() - 0.0321242977).abs() < 1e-9);
    }

    #[test]
    fn domain_errors_exit_2_and_name_the_constraint() {
        for bad in [
            vec![
                "entropy-moments",
                "moments",
                "--m",
                "3",
                "--n",
                "2",
                "--q",
                "2",
            ],
            vec![
                "entropy-moments",
                "moments",
                "--m",
                "2",
                "--n",
                "2",
                "--q",
                "0",
            ],
            vec![
                "entropy-moments",
                "moments",
                "--m",
                "2",
                "--n",
                "2",
                "--q",
                "-0.75",
            ],
        ] {
            let (out, code) = run_to_string(&bad);
            assert_eq!(code, EXIT_USAGE, "args {bad:?} -> {out}");
            assert!(out.contains("error"), "{out}");
        }
        let (out, _) = run_to_string(&[
            "entropy-moments",
            "moments",
            "--m",
            "3",
            "--n",
            "2",
            "--q",
            "2",
        ]);
        assert!(out.contains("1 <= m <= n"), "constraint named: {out}");
    }

    #[test]
    fn sweep_csv_header_and_quadratic_rows() {
        let (out, code) = run_to_string(&[
            "entropy-moments",
            "sweep",
            "--m",
            "2..3",
            "--n",
            "2..4",
            "--q",
            "2",
        ]);
        assert_eq!(code, EXIT_OK);
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 6);
        // (3, 2) is a domain-error row; the rest match the closed form
        let error_rows: Vec<&&str> = rows.iter().filter(|r| r.contains(",error,")).collect();
        assert_eq!(error_rows.len(), 1);
        assert!(error_rows[0].starts_with("3,2,"));
        // spot check (2,3): variance 2/147
        let row_23 = rows.iter().find(|r| r.starts_with("2,3,")).unwrap();
        let fields: Vec<&str> = row_23.split(',').collect();
        let var: f64 = fields[5].parse().unwrap();
        assert!((var - 2.0 / 147.0).abs() < 1e-15);
        // 17-significant-digit float formatting round-trips
        assert!(fields[5].contains('e'));
    }

    #[test]
    fn sweep_continues_past_bad_q_with_exit_zero() {
        let (out, code) = run_to_string(&[
            "entropy-moments",
            "sweep",
            "--m",
            "2",
            "--n",
            "2",
            "--q",
            "0,2",
        ]);
        assert_eq!(code, EXIT_OK);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 3); // header + 2 rows
        assert!(lines[1].contains("error"), "{}", lines[1]);
        assert!(lines[2].contains("quadratic"));
    }

    #[test]
    fn sweep_von_neumann_row() {
        let (out, code) = run_to_string(&[
            "entropy-moments",
            "sweep",
            "--m",
            "2",
            "--n",
            "2",
            "--q",
            "1",
            "--format",
            "json",
        ]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["method"], "von_neumann");
    }

    #[test]
    fn sweep_rows_in_lexicographic_order() {
        let (out, _) = run_to_string(&[
            "entropy-moments",
            "sweep",
            "--m",
            "2..3",
            "--n",
            "3..4",
            "--q",
            "2,0.5",
            "--workers",
            "3",
        ]);
        let keys: Vec<(u32, u32, f64)> = out
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (
                    f[0].parse().unwrap(),
                    f[1].parse().unwrap(),
                    f[2].parse().unwrap(),
                )
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.total_cmp(&b.2)));
        assert_eq!(keys, sorted);
        assert_eq!(keys.len(), 8);
    }

    #[test]
    fn exact_mode_emits_rationals() {
        let (out, code) = run_to_string(&[
            "entropy-moments",
            "moments",
            "--m",
            "2",
            "--n",
            "3",
            "--q",
            "3",
            "--mode",
            "exact",
            "--format",
            "json",
        ]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert!(v["variance_exact"].is_string());
        // exact mode on a non-integer q is a usage error
        let (_, code) = run_to_string(&[
            "entropy-moments",
            "moments",
            "--m",
            "2",
            "--n",
            "3",
            "--q",
            "2.5",
            "--mode",
            "exact",
        ]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn verify_fast_suites_pass() {
        for suite in ["closed-forms", "appendix", "limit"] {
            let (out, code) = run_to_string(&["entropy-moments", "verify", "--suite", suite]);
            assert_eq!(code, EXIT_OK, "suite {suite}: {out}");
            assert!(out.contains("PASS"));
            assert!(!out.contains("FAIL "), "{out}");
        }
    }

    #[test]
    fn verify_mc_small_run() {
        let (out, code) = run_to_string(&[
            "entropy-moments",
            "verify",
            "--suite",
            "mc",
            "--m",
            "2",
            "--n",
            "3",
            "--q",
            "2",
            "--samples",
            "20000",
            "--seed",
            "42",
        ]);
        assert_eq!(code, EXIT_OK, "{out}");
    }

    #[test]
    fn verify_rejects_bad_config() {
        let (_, code) = run_to_string(&[
            "entropy-moments",
            "verify",
            "--suite",
            "mc",
            "--samples",
            "10",
        ]);
        assert_eq!(code, EXIT_USAGE);
    }
}
