//! End-to-end checks of the binary: exact stdout for the documented
//! examples, exit codes, and sweep determinism across processes.

use std::fs;
use std::process::{Command, Output};

fn hhbounds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hhbounds"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

/// Value printed after `name = ` on its own line.
fn field(text: &str, name: &str) -> f64 {
    let prefix = format!("{name} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{name}` line in:\n{text}"))
        .parse()
        .unwrap()
}

#[test]
fn beta_prints_nearest_float() {
    let out = hhbounds(&["beta", "2", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0.08333333333333333\n");
}

#[test]
fn beta_rejects_nonpositive_arguments() {
    let out = hhbounds(&["beta", "0", "1"]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert_eq!(err.trim_end().lines().count(), 1, "one-line error: {err}");
    assert!(err.starts_with("error:"), "got: {err}");
}

#[test]
fn parse_errors_carry_byte_offsets() {
    let out = hhbounds(&["integrate", "--f", "x^", "--a", "0", "--b", "1"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("byte 2"), "got: {}", stderr(&out));
}

#[test]
fn verify_lemma_example_passes() {
    let out = hhbounds(&[
        "verify-lemma",
        "--f",
        "exp(x)",
        "--a",
        "0",
        "--b",
        "1",
        "--p",
        "1.5",
        "--q",
        "0.5",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.ends_with("pass\n"), "got: {text}");
    let lhs = field(&text, "lhs");
    let rhs = field(&text, "rhs");
    assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs());
}

#[test]
fn bound_t4_saturates_for_affine_function() {
    let out = hhbounds(&[
        "bound",
        "--theorem",
        "t4",
        "--f",
        "x",
        "--a",
        "0",
        "--b",
        "1",
        "--p",
        "1",
        "--q",
        "1",
        "--s",
        "1",
        "--alpha",
        "1",
        "--m",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(
        text,
        "bound = 0.0833333333333\nlhs = 0.0833333333333\npass\n"
    );
}

#[test]
fn sharp_holder_bound_undercuts_stated_one() {
    let base = [
        "--f", "1", "--a", "0", "--b", "1", "--p", "1", "--q", "1", "--s", "0.5", "--alpha", "1",
        "--m", "1", "--k", "2",
    ];
    let mut stated_args = vec!["bound", "--theorem", "t5"];
    stated_args.extend_from_slice(&base);
    let mut sharp_args = vec!["bound", "--theorem", "t5_sharp"];
    sharp_args.extend_from_slice(&base);

    let stated_out = hhbounds(&stated_args);
    let sharp_out = hhbounds(&sharp_args);
    assert_eq!(code(&stated_out), 0);
    assert_eq!(code(&sharp_out), 0);
    let stated = field(&stdout(&stated_out), "bound");
    let sharp = field(&stdout(&sharp_out), "bound");
    // alpha s = 1/2 makes the gap a full factor sqrt(1.5), not ulps
    assert!(sharp < stated * 0.9, "sharp {sharp} vs stated {stated}");
}

#[test]
fn membership_queries_exit_zero_either_way() {
    let violated = hhbounds(&[
        "check-class",
        "--f",
        "sin(x)",
        "--kind",
        "quasi",
        "--a",
        "0",
        "--b",
        "6",
    ]);
    assert_eq!(code(&violated), 0);
    let text = stdout(&violated);
    assert!(text.contains("verdict = violated"), "got: {text}");
    assert!(text.contains("witness: x = "), "got: {text}");

    let satisfied = hhbounds(&[
        "check-class",
        "--f",
        "x^2",
        "--kind",
        "convex",
        "--a=-1",
        "--b",
        "1",
    ]);
    assert_eq!(code(&satisfied), 0);
    assert!(
        stdout(&satisfied).contains("verdict = satisfied_on_samples"),
        "got: {}",
        stdout(&satisfied)
    );
}

#[test]
fn hh_direction_failures_exit_two() {
    let convex = hhbounds(&["hh", "--f", "x^2", "--a", "0", "--b", "1"]);
    assert_eq!(code(&convex), 0);
    let text = stdout(&convex);
    assert!(text.contains("left: pass") && text.contains("right: pass"));

    let concave = hhbounds(&["hh", "--f", "0 - x^2", "--a", "0", "--b", "1"]);
    assert_eq!(code(&concave), 2);
    let text = stdout(&concave);
    assert!(text.contains("left: FAIL") && text.contains("right: FAIL"));
}

const SMALL_SWEEP: &[&str] = &[
    "sweep",
    "--function",
    "sq: x^2",
    "--interval",
    "0 1",
    "--p",
    "1",
    "--q",
    "1",
    "--spec",
    "first 1 1 1",
    "--k",
    "2",
    "--l",
    "2",
];

#[test]
fn sweep_csv_is_identical_across_processes() {
    let mut args = SMALL_SWEEP.to_vec();
    args.extend_from_slice(&["--format", "csv"]);
    let first = hhbounds(&args);
    let second = hhbounds(&args);
    assert_eq!(code(&first), 0, "stderr: {}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);

    let text = stdout(&first);
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "function,a,b,p,q,sense,s,alpha,m,theorem,exponent,membership,\
         lhs,lhs_err,bound,slack_ratio,pass,skip_reason"
    );
    // one row per applicable bound: t1, t2, t3, t4, t5, t5_sharp, t6
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn sweep_reads_config_files_and_writes_out() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("sweep.conf");
    fs::write(
        &config_path,
        "# tiny catalog\n\
         function = sq: x^2\n\
         interval = 0 1\n\
         p = 1\n\
         q = 1\n\
         spec = first 1 1 1\n\
         k = 2\n\
         l = 2\n\
         quad_tol = 1e-10\n",
    )
    .unwrap();
    let out_path = dir.path().join("rows.json");
    let out = hhbounds(&[
        "sweep",
        "--config",
        config_path.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let rows = fs::read_to_string(&out_path).unwrap();
    assert!(rows.trim_start().starts_with('['), "got: {rows}");
    assert!(rows.contains("\"theorem\""));
    assert!(rows.contains("\"t5_sharp\""));
}

#[test]
fn sweep_human_summary_reports_tightest() {
    let out = hhbounds(SMALL_SWEEP);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("rows = 7"), "got: {text}");
    assert!(text.contains("fail = 0"), "got: {text}");
    assert!(text.contains("tightest per group:"), "got: {text}");
}

#[test]
fn unknown_flags_exit_one() {
    let out = hhbounds(&["sweep", "--definitely-not-a-flag"]);
    assert_eq!(code(&out), 1);
    assert!(!stderr(&out).is_empty());

    let missing_format = hhbounds(&["sweep", "--standard", "--out", "/tmp/ignored.csv"]);
    assert_eq!(code(&missing_format), 1);
}
