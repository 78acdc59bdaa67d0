//! Command dispatch for the `hhbounds` binary.
//!
//! Exit codes: 0 success, 1 for invocation or domain errors (one-line
//! diagnostic on stderr), 2 when a verification ran and failed (a fail
//! row in a sweep, a failed identity or bound check, a reversed
//! sandwich). `check-class` reports its verdict with exit 0 either
//! way: a violated membership is an answer, not a failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use hhbounds::bounds::{
    hh_check, kms1_bound, kms1_bound_holder, kms1_bound_holder_sharp, kms1_bound_power_mean,
    quasi_bound_basic, quasi_bound_holder, quasi_bound_power_mean, HolderExponent,
    PowerMeanExponent,
};
use hhbounds::convexity::{check_convex, check_membership, check_quasi_convex, Sense};
use hhbounds::expr::parse;
use hhbounds::harness::{
    bound_holds, emit_report, load_config, run_sweep, tightest_theorem, write_csv, write_json,
    ReportFormat, ReportRow, SweepConfig,
};
use hhbounds::quadrature::{integrate, verify_lemma1, weighted_integral};
use hhbounds::specfun::beta;
use hhbounds::{Class, Expr, Problem, Sampling};

#[derive(Parser)]
#[command(
    name = "hhbounds",
    version,
    about = "Weighted integral bounds for quasi-convex and s-(alpha, m)-convex functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Euler beta function, printed at full precision
    #[command(allow_negative_numbers = true)]
    Beta { x: f64, y: f64 },
    /// Adaptive integral of an expression, optionally with the
    /// (x-a)^p (b-x)^q weight
    Integrate(IntegrateArgs),
    /// Sample an expression for membership in a convexity class
    CheckClass(CheckClassArgs),
    /// Cross-check the weighted integral against its substituted form
    VerifyLemma(VerifyLemmaArgs),
    /// Evaluate one theorem bound against the weighted integral
    Bound(BoundArgs),
    /// Midpoint / mean / endpoint-average sandwich check
    Hh(HhArgs),
    /// Run a verification sweep and report per-row results
    Sweep(SweepArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct IntegrateArgs {
    /// integrand, e.g. "exp(x) * x^2"
    #[arg(long, value_name = "EXPR")]
    f: String,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    /// absolute error target
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// left weight exponent (x-a)^p; needs --q
    #[arg(long, requires = "q")]
    p: Option<f64>,
    /// right weight exponent (b-x)^q; needs --p
    #[arg(long, requires = "p")]
    q: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    /// s-(alpha, m) class membership on [0, x-max]
    Class,
    /// quasi-convexity on [a, b]
    Quasi,
    /// plain convexity on [a, b]
    Convex,
}

#[derive(Clone, Copy, ValueEnum)]
enum SenseArg {
    First,
    Second,
}

impl From<SenseArg> for Sense {
    fn from(arg: SenseArg) -> Sense {
        match arg {
            SenseArg::First => Sense::First,
            SenseArg::Second => Sense::Second,
        }
    }
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct CheckClassArgs {
    /// function to classify
    #[arg(long, value_name = "EXPR")]
    f: String,
    #[arg(long, value_enum, default_value_t = CheckKind::Class)]
    kind: CheckKind,
    /// class sense (kind=class)
    #[arg(long, value_enum, default_value_t = SenseArg::First)]
    sense: SenseArg,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// right end of the class domain [0, x-max] (kind=class)
    #[arg(long)]
    x_max: Option<f64>,
    /// interval ends (kind=quasi or convex)
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// lattice points per sampling axis
    #[arg(long, default_value_t = 9)]
    grid: usize,
    /// extra random sample triples
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// violation tolerance
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct VerifyLemmaArgs {
    #[arg(long, value_name = "EXPR")]
    f: String,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremArg {
    T1,
    T2,
    T3,
    T4,
    T5,
    #[value(name = "t5_sharp", alias = "t5sharp")]
    T5Sharp,
    T6,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct BoundArgs {
    #[arg(long, value_enum)]
    theorem: TheoremArg,
    #[arg(long, value_name = "EXPR")]
    f: String,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    /// class parameters (t4, t5, t5_sharp, t6; first sense)
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    /// Holder exponent (t2, t5, t5_sharp)
    #[arg(long)]
    k: Option<f64>,
    /// power-mean exponent (t3, t6)
    #[arg(long)]
    l: Option<f64>,
    /// integration tolerance for the left-hand side
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct HhArgs {
    #[arg(long, value_name = "EXPR")]
    f: String,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    /// sweep configuration file
    #[arg(long, value_name = "PATH", conflicts_with = "standard")]
    config: Option<PathBuf>,
    /// use the built-in standard catalog
    #[arg(long)]
    standard: bool,
    /// add a function, "name: expr" or a bare expression
    #[arg(long = "function", value_name = "NAME: EXPR")]
    functions: Vec<String>,
    /// add an interval, "a b" or "a,b"
    #[arg(long = "interval", value_name = "A B")]
    intervals: Vec<String>,
    #[arg(long = "p", value_name = "P", num_args = 1..)]
    p_values: Vec<f64>,
    #[arg(long = "q", value_name = "Q", num_args = 1..)]
    q_values: Vec<f64>,
    #[arg(long = "k", value_name = "K", num_args = 1..)]
    k_values: Vec<f64>,
    #[arg(long = "l", value_name = "L", num_args = 1..)]
    l_values: Vec<f64>,
    /// add a class spec, "first|second s alpha m"
    #[arg(long = "spec", value_name = "SENSE S ALPHA M")]
    specs: Vec<String>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    violation_tolerance: Option<f64>,
    #[arg(long)]
    quad_tol: Option<f64>,
    /// machine output format; omit for a human-readable summary
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// write machine output to a file instead of stdout
    #[arg(long, value_name = "PATH", requires = "format")]
    out: Option<PathBuf>,
}

/// Render with 12 significant digits, positional where the magnitude
/// allows and scientific otherwise.
fn fmt12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.11e}")
    }
}

fn parse_expr(src: &str) -> Result<Expr, String> {
    parse(src).map_err(|e| e.to_string())
}

fn require_interval(a: f64, b: f64) -> Result<(), String> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(format!("invalid interval [{a}, {b}]: need finite a < b"))
    }
}

fn require_tol(tol: f64) -> Result<(), String> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(format!("tolerance must be positive, got {tol}"))
    }
}

fn run_beta(x: f64, y: f64) -> Result<u8, String> {
    let value = beta(x, y).map_err(|e| e.to_string())?;
    println!("{value}");
    Ok(0)
}

fn run_integrate(args: &IntegrateArgs) -> Result<u8, String> {
    require_tol(args.tol)?;
    let f = parse_expr(&args.f)?;
    let result = match (args.p, args.q) {
        (Some(p), Some(q)) => {
            let prob = Problem::new(f, args.a, args.b, p, q).map_err(|e| e.to_string())?;
            weighted_integral(&prob, args.tol)
        }
        _ => {
            require_interval(args.a, args.b)?;
            integrate(|x| hhbounds::expr::eval(&f, x), args.a, args.b, args.tol)
        }
    }
    .map_err(|e| e.to_string())?;
    println!("value = {}", fmt12(result.value));
    println!("error_estimate = {}", fmt12(result.err_estimate));
    println!("evals = {}", result.evals);
    Ok(0)
}

fn run_check_class(args: &CheckClassArgs) -> Result<u8, String> {
    if args.grid < 3 {
        return Err(format!("grid must be at least 3, got {}", args.grid));
    }
    if !(args.tolerance.is_finite() && args.tolerance >= 0.0) {
        return Err(format!(
            "tolerance must be nonnegative, got {}",
            args.tolerance
        ));
    }
    let f = parse_expr(&args.f)?;
    let sampling = Sampling {
        grid_points_per_axis: args.grid,
        random_trials: args.trials,
        rng_seed: args.seed,
        violation_tolerance: args.tolerance,
    };
    let verdict = match args.kind {
        CheckKind::Class => {
            let x_max = args
                .x_max
                .ok_or("kind=class needs --x-max for the domain [0, x-max]")?;
            if !(x_max.is_finite() && x_max > 0.0) {
                return Err(format!("x-max must be positive, got {x_max}"));
            }
            let spec = Class::new(args.sense.into(), args.s, args.alpha, args.m)
                .map_err(|e| e.to_string())?;
            check_membership(&f, &spec, x_max, &sampling)
        }
        CheckKind::Quasi | CheckKind::Convex => {
            let (a, b) = match (args.a, args.b) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(format!("kind={} needs --a and --b", kind_word(args.kind))),
            };
            require_interval(a, b)?;
            if args.kind == CheckKind::Quasi {
                check_quasi_convex(&f, a, b, &sampling)
            } else {
                check_convex(&f, a, b, &sampling)
            }
        }
    }
    .map_err(|e| e.to_string())?;

    println!("samples_checked = {}", verdict.samples_checked());
    match verdict.witness() {
        None => println!("verdict = satisfied_on_samples"),
        Some(w) => {
            println!("verdict = violated");
            println!("witness: x = {}, y = {}, mu = {}", w.x, w.y, w.mu);
            println!("lhs = {}", fmt12(w.lhs));
            println!("rhs = {}", fmt12(w.rhs));
        }
    }
    Ok(0)
}

fn kind_word(kind: CheckKind) -> &'static str {
    match kind {
        CheckKind::Class => "class",
        CheckKind::Quasi => "quasi",
        CheckKind::Convex => "convex",
    }
}

fn run_verify_lemma(args: &VerifyLemmaArgs) -> Result<u8, String> {
    require_tol(args.tol)?;
    let f = parse_expr(&args.f)?;
    let prob = Problem::new(f, args.a, args.b, args.p, args.q).map_err(|e| e.to_string())?;
    let report = verify_lemma1(&prob, args.tol).map_err(|e| e.to_string())?;
    println!("lhs = {}", fmt12(report.lhs.value));
    println!("rhs = {}", fmt12(report.rhs.value));
    println!("discrepancy = {}", fmt12(report.discrepancy));
    if report.pass {
        println!("pass");
        Ok(0)
    } else {
        println!("FAIL");
        Ok(2)
    }
}

fn run_bound(args: &BoundArgs) -> Result<u8, String> {
    require_tol(args.tol)?;
    let f = parse_expr(&args.f)?;
    let prob = Problem::new(f, args.a, args.b, args.p, args.q).map_err(|e| e.to_string())?;

    let class = |name: &str| -> Result<Class, String> {
        match (args.s, args.alpha, args.m) {
            (Some(s), Some(alpha), Some(m)) => {
                Class::new(Sense::First, s, alpha, m).map_err(|e| e.to_string())
            }
            _ => Err(format!("theorem {name} needs --s, --alpha and --m")),
        }
    };
    let holder = |name: &str| -> Result<HolderExponent<f64>, String> {
        let k = args.k.ok_or(format!("theorem {name} needs --k"))?;
        HolderExponent::new(k).map_err(|e| e.to_string())
    };
    let pmean = |name: &str| -> Result<PowerMeanExponent<f64>, String> {
        let l = args.l.ok_or(format!("theorem {name} needs --l"))?;
        PowerMeanExponent::new(l).map_err(|e| e.to_string())
    };

    let bound = match args.theorem {
        TheoremArg::T1 => quasi_bound_basic(&prob),
        TheoremArg::T2 => quasi_bound_holder(&prob, holder("t2")?),
        TheoremArg::T3 => quasi_bound_power_mean(&prob, pmean("t3")?),
        TheoremArg::T4 => kms1_bound(&prob, &class("t4")?),
        TheoremArg::T5 => kms1_bound_holder(&prob, &class("t5")?, holder("t5")?),
        TheoremArg::T5Sharp => {
            kms1_bound_holder_sharp(&prob, &class("t5_sharp")?, holder("t5_sharp")?)
        }
        TheoremArg::T6 => kms1_bound_power_mean(&prob, &class("t6")?, pmean("t6")?),
    }
    .map_err(|e| e.to_string())?;

    let lhs = weighted_integral(&prob, args.tol).map_err(|e| e.to_string())?;
    println!("bound = {}", fmt12(bound.value));
    println!("lhs = {}", fmt12(lhs.value));
    if bound_holds(lhs.value, lhs.err_estimate, bound.value) {
        println!("pass");
        Ok(0)
    } else {
        println!("FAIL");
        Ok(2)
    }
}

fn run_hh(args: &HhArgs) -> Result<u8, String> {
    require_interval(args.a, args.b)?;
    require_tol(args.tol)?;
    let f = parse_expr(&args.f)?;
    let report = hh_check(&f, args.a, args.b, args.tol).map_err(|e| e.to_string())?;
    println!("midpoint = {}", fmt12(report.midpoint));
    println!("mean_integral = {}", fmt12(report.mean_integral));
    println!("endpoint_avg = {}", fmt12(report.endpoint_avg));
    println!("left: {}", if report.left_pass { "pass" } else { "FAIL" });
    println!("right: {}", if report.right_pass { "pass" } else { "FAIL" });
    Ok(if report.left_pass && report.right_pass {
        0
    } else {
        2
    })
}

fn split_config_floats(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

fn build_sweep_config(args: &SweepArgs) -> Result<SweepConfig, String> {
    let mut config = if let Some(path) = &args.config {
        load_config(path).map_err(|e| e.to_string())?
    } else if args.standard {
        SweepConfig::standard()
    } else {
        SweepConfig {
            functions: Vec::new(),
            intervals: Vec::new(),
            p_values: Vec::new(),
            q_values: Vec::new(),
            class_specs: Vec::new(),
            k_values: Vec::new(),
            l_values: Vec::new(),
            sampling: Sampling::default(),
            quad_tol: 1e-10,
        }
    };

    for src in &args.functions {
        let (name, body) = match src.split_once(':') {
            Some((name, body)) => (name.trim(), body.trim()),
            None => (src.trim(), src.trim()),
        };
        if name.is_empty() || body.is_empty() {
            return Err(format!("--function `{src}`: empty name or expression"));
        }
        let ast = parse_expr(body).map_err(|e| format!("--function `{name}`: {e}"))?;
        config.functions.push((name.to_string(), ast));
    }
    for src in &args.intervals {
        let ends = split_config_floats(src).map_err(|e| format!("--interval: {e}"))?;
        let [a, b] = ends[..] else {
            return Err(format!(
                "--interval `{src}`: expected two values, got {}",
                ends.len()
            ));
        };
        config.intervals.push((a, b));
    }
    config.p_values.extend(&args.p_values);
    config.q_values.extend(&args.q_values);
    config.k_values.extend(&args.k_values);
    config.l_values.extend(&args.l_values);
    for src in &args.specs {
        let mut toks = src
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty());
        let sense = match toks.next() {
            Some("first") => Sense::First,
            Some("second") => Sense::Second,
            other => {
                return Err(format!(
                    "--spec `{src}`: sense must be `first` or `second`, got `{}`",
                    other.unwrap_or("")
                ))
            }
        };
        let nums: Vec<f64> = toks
            .map(|t| t.parse().map_err(|e| format!("--spec `{src}`: {e}")))
            .collect::<Result<_, _>>()?;
        let [s, alpha, m] = nums[..] else {
            return Err(format!("--spec `{src}`: expected `sense s alpha m`"));
        };
        let spec = Class::new(sense, s, alpha, m).map_err(|e| format!("--spec `{src}`: {e}"))?;
        config.class_specs.push(spec);
    }
    if let Some(grid) = args.grid {
        config.sampling.grid_points_per_axis = grid;
    }
    if let Some(trials) = args.trials {
        config.sampling.random_trials = trials;
    }
    if let Some(seed) = args.seed {
        config.sampling.rng_seed = seed;
    }
    if let Some(tol) = args.violation_tolerance {
        config.sampling.violation_tolerance = tol;
    }
    if let Some(tol) = args.quad_tol {
        config.quad_tol = tol;
    }
    Ok(config)
}

fn sense_word(sense: Sense) -> &'static str {
    match sense {
        Sense::First => "first",
        Sense::Second => "second",
    }
}

fn row_location(row: &ReportRow) -> String {
    let mut loc = format!(
        "{} on [{}, {}] p={} q={}",
        row.function, row.a, row.b, row.p, row.q
    );
    if let (Some(sense), Some(s), Some(alpha), Some(m)) = (row.sense, row.s, row.alpha, row.m) {
        loc.push_str(&format!(
            " spec={} s={s} alpha={alpha} m={m}",
            sense_word(sense)
        ));
    }
    loc
}

fn run_sweep_cmd(args: &SweepArgs) -> Result<u8, String> {
    let config = build_sweep_config(args)?;
    let report = run_sweep(&config).map_err(|e| e.to_string())?;

    match args.format {
        Some(format) => {
            let format = match format {
                FormatArg::Csv => ReportFormat::Csv,
                FormatArg::Json => ReportFormat::Json,
            };
            match &args.out {
                Some(path) => emit_report(&report, format, path).map_err(|e| e.to_string())?,
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    match format {
                        ReportFormat::Csv => write_csv(&report, &mut lock),
                        ReportFormat::Json => write_json(&report, &mut lock),
                    }
                    .and_then(|()| lock.flush())
                    .map_err(|e| e.to_string())?;
                }
            }
        }
        None => {
            println!("rows = {}", report.rows.len());
            println!("pass = {}", report.pass_count());
            println!("fail = {}", report.fail_count());
            println!("skipped = {}", report.skipped_count());
            let summary = tightest_theorem(&report);
            if !summary.entries.is_empty() {
                println!("tightest per group:");
                for entry in &summary.entries {
                    let spec_part = match entry.spec {
                        Some(spec) => format!(
                            " spec={} s={} alpha={} m={}",
                            sense_word(spec.sense()),
                            spec.s(),
                            spec.alpha(),
                            spec.m()
                        ),
                        None => String::new(),
                    };
                    println!(
                        "  {} on [{}, {}] p={} q={}{}: {} (slack {})",
                        entry.function,
                        entry.a,
                        entry.b,
                        entry.p,
                        entry.q,
                        spec_part,
                        entry.theorem.label(),
                        fmt12(entry.slack_ratio)
                    );
                }
            }
            if summary.omitted_groups > 0 {
                println!("groups without passing rows = {}", summary.omitted_groups);
            }
            if report.fail_count() > 0 {
                println!("fail rows:");
                for row in report.fail_rows() {
                    let exp = row
                        .exponent
                        .map(|e| format!(" exponent={e}"))
                        .unwrap_or_default();
                    println!(
                        "  {} theorem={}{}: lhs={} bound={}",
                        row_location(row),
                        row.theorem.label(),
                        exp,
                        fmt12(row.lhs.unwrap_or(f64::NAN)),
                        fmt12(row.bound.unwrap_or(f64::NAN))
                    );
                }
            }
        }
    }
    Ok(if report.fail_count() > 0 { 2 } else { 0 })
}

fn dispatch(cli: Cli) -> Result<u8, String> {
    match &cli.command {
        Command::Beta { x, y } => run_beta(*x, *y),
        Command::Integrate(args) => run_integrate(args),
        Command::CheckClass(args) => run_check_class(args),
        Command::VerifyLemma(args) => run_verify_lemma(args),
        Command::Bound(args) => run_bound(args),
        Command::Hh(args) => run_hh(args),
        Command::Sweep(args) => run_sweep_cmd(args),
    }
}

/// Parse and run, mapping every failure mode onto the exit-code
/// contract. Never panics on bad input.
pub fn run<I, A>(argv: I) -> u8
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => match dispatch(cli) {
            Ok(code) => code,
            Err(message) => {
                eprintln!("error: {message}");
                1
            }
        },
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            0
        }
        Err(e) => {
            // collapse clap's multi-line report to one stderr line,
            // keeping the argument list that follows a trailing colon
            let rendered = e.to_string();
            let mut parts = Vec::new();
            for l in rendered.lines().map(str::trim) {
                let done = !l.is_empty() && !l.ends_with(':');
                if !l.is_empty() {
                    parts.push(l);
                }
                if done {
                    break;
                }
            }
            if parts.is_empty() {
                parts.push("error: invalid arguments");
            }
            eprintln!("{}", parts.join(" "));
            1
        }
    }
}
