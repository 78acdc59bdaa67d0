//! Sweep engine: cross every configured function, interval, (p, q)
//! pair, class spec, and exponent with every applicable bound, check
//! the hypothesis by sampling first, and record one row per check.
//!
//! Row errors (a function leaving its domain, quadrature giving up, a
//! degenerate bracket) become skip reasons, never aborts: the point of
//! a sweep is the full picture.

mod config;
mod report;

pub use config::{load_config, parse_config, ConfigError};
pub use report::{
    emit_report, write_csv, write_json, BoundReport, EmitError, MembershipLabel, ReportFormat,
    ReportRow, CSV_COLUMNS,
};

use std::collections::HashMap;

use crate::bounds::{
    kms1_bound, kms1_bound_holder, kms1_bound_holder_sharp, kms1_bound_power_mean,
    quasi_bound_basic, quasi_bound_holder, quasi_bound_power_mean, HolderExponent,
    PowerMeanExponent, TheoremTag,
};
use crate::convexity::{
    check_membership, check_quasi_convex, ClassSpec, MembershipVerdict, SamplingSpec, Sense,
};
use crate::expr::ExprAst;
use crate::quadrature::{weighted_integral, WeightedProblem};

type Expr = ExprAst<f64>;

/// Everything a sweep iterates over. Quasi-convexity rows come from the
/// (k, l) lists alone; class rows additionally cross with `class_specs`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub functions: Vec<(String, Expr)>,
    pub intervals: Vec<(f64, f64)>,
    pub p_values: Vec<f64>,
    pub q_values: Vec<f64>,
    pub class_specs: Vec<ClassSpec<f64>>,
    pub k_values: Vec<f64>,
    pub l_values: Vec<f64>,
    pub sampling: SamplingSpec<f64>,
    pub quad_tol: f64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Invalid(msg));
        if self.functions.is_empty() {
            return fail("no functions configured".into());
        }
        if self.intervals.is_empty() {
            return fail("no intervals configured".into());
        }
        for &(a, b) in &self.intervals {
            if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b) {
                return fail(format!("invalid interval [{a}, {b}]: need 0 <= a < b"));
            }
        }
        for (name, values, check, req) in [
            (
                "p",
                &self.p_values,
                (|v: f64| v > 0.0) as fn(f64) -> bool,
                "> 0",
            ),
            ("q", &self.q_values, |v: f64| v > 0.0, "> 0"),
            ("k", &self.k_values, |v: f64| v > 1.0, "> 1"),
            ("l", &self.l_values, |v: f64| v >= 1.0, ">= 1"),
        ] {
            if values.is_empty() {
                return fail(format!("no {name} values configured"));
            }
            for &v in values.iter() {
                if !(v.is_finite() && check(v)) {
                    return fail(format!("{name} values must be {req}, got {v}"));
                }
            }
        }
        if self.class_specs.is_empty() {
            return fail("no class specs configured".into());
        }
        if self.sampling.grid_points_per_axis < 3 {
            return fail("grid must have at least 3 points per axis".into());
        }
        if !(self.sampling.violation_tolerance.is_finite()
            && self.sampling.violation_tolerance >= 0.0)
        {
            return fail("violation tolerance must be nonnegative".into());
        }
        if !(self.quad_tol.is_finite() && self.quad_tol > 0.0) {
            return fail(format!("quad_tol must be positive, got {}", self.quad_tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum MembKey {
    Quasi {
        fi: usize,
        ii: usize,
        /// bits of the power applied to |f|; None tests f itself
        power: Option<u64>,
    },
    Class {
        fi: usize,
        ii: usize,
        spec_idx: usize,
        power: u64,
    },
}

type MembOutcome = Result<MembershipVerdict<f64>, String>;

fn abs_power(f: &Expr, e: f64) -> Expr {
    ExprAst::pow(ExprAst::abs(f.clone()), ExprAst::lit(e))
}

/// Evaluate the bound named by `tag` for an already-validated problem.
/// `spec` must be a first-sense spec for the class tags (conjectural
/// second-sense rows pass a first-sense twin).
fn eval_bound(
    prob: &WeightedProblem<f64>,
    tag: TheoremTag,
    spec: Option<&ClassSpec<f64>>,
    exponent: Option<f64>,
) -> Result<f64, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let holder = || HolderExponent::new(exponent.expect("k present")).map_err(|e| err(&e));
    let pmean = || PowerMeanExponent::new(exponent.expect("l present")).map_err(|e| err(&e));
    let sp = || spec.expect("class spec present");
    let value = match tag {
        TheoremTag::T1 => quasi_bound_basic(prob).map_err(|e| err(&e))?.value,
        TheoremTag::T2 => {
            quasi_bound_holder(prob, holder()?)
                .map_err(|e| err(&e))?
                .value
        }
        TheoremTag::T3 => {
            quasi_bound_power_mean(prob, pmean()?)
                .map_err(|e| err(&e))?
                .value
        }
        TheoremTag::T4 => kms1_bound(prob, sp()).map_err(|e| err(&e))?.value,
        TheoremTag::T5 => {
            kms1_bound_holder(prob, sp(), holder()?)
                .map_err(|e| err(&e))?
                .value
        }
        TheoremTag::T5Sharp => {
            kms1_bound_holder_sharp(prob, sp(), holder()?)
                .map_err(|e| err(&e))?
                .value
        }
        TheoremTag::T6 => {
            kms1_bound_power_mean(prob, sp(), pmean()?)
                .map_err(|e| err(&e))?
                .value
        }
        TheoremTag::HhLeft | TheoremTag::HhRight => {
            unreachable!("sandwich checks are not sweep rows")
        }
    };
    Ok(value)
}

/// The report pass rule: lhs <= bound within the integration error
/// estimate plus 1e-9 relative slack.
pub fn bound_holds(lhs: f64, lhs_err: f64, bound: f64) -> bool {
    lhs <= bound + lhs_err + 1e-9 * lhs.abs().max(bound.abs()).max(1.0)
}

struct SweepCtx<'a> {
    config: &'a SweepConfig,
    memb: HashMap<MembKey, MembOutcome>,
}

impl SweepCtx<'_> {
    fn membership(
        &mut self,
        fi: usize,
        ii: usize,
        tag: TheoremTag,
        spec_idx: Option<usize>,
        exponent: Option<f64>,
    ) -> MembOutcome {
        let config = self.config;
        let (_, f) = &config.functions[fi];
        let (a, b) = config.intervals[ii];
        let power = match tag {
            TheoremTag::T1 => None,
            TheoremTag::T2 | TheoremTag::T5 | TheoremTag::T5Sharp => {
                let k = exponent.expect("k present");
                Some(k / (k - 1.0))
            }
            TheoremTag::T3 | TheoremTag::T6 => Some(exponent.expect("l present")),
            TheoremTag::T4 => Some(1.0),
            TheoremTag::HhLeft | TheoremTag::HhRight => unreachable!(),
        };
        let key = match tag {
            TheoremTag::T1 | TheoremTag::T2 | TheoremTag::T3 => MembKey::Quasi {
                fi,
                ii,
                power: power.map(f64::to_bits),
            },
            _ => MembKey::Class {
                fi,
                ii,
                spec_idx: spec_idx.expect("class rows carry a spec"),
                power: power.expect("class rows test a power").to_bits(),
            },
        };
        if let Some(cached) = self.memb.get(&key) {
            return cached.clone();
        }
        let outcome: MembOutcome = match key {
            MembKey::Quasi { .. } => {
                let probe = match power {
                    None => f.clone(),
                    Some(e) => abs_power(f, e),
                };
                check_quasi_convex(&probe, a, b, &config.sampling).map_err(|e| e.to_string())
            }
            MembKey::Class { spec_idx, .. } => {
                let probe = abs_power(f, power.expect("class power"));
                let spec = &config.class_specs[spec_idx];
                check_membership(&probe, spec, b, &config.sampling).map_err(|e| e.to_string())
            }
        };
        self.memb.insert(key, outcome.clone());
        outcome
    }

    #[allow(clippy::too_many_arguments)]
    fn build_row(
        &mut self,
        fi: usize,
        ii: usize,
        p: f64,
        q: f64,
        prob: &WeightedProblem<f64>,
        lhs: &Result<(f64, f64), String>,
        tag: TheoremTag,
        spec_idx: Option<usize>,
        exponent: Option<f64>,
    ) -> ReportRow {
        let config = self.config;
        let (fname, _) = &config.functions[fi];
        let (a, b) = config.intervals[ii];
        let spec = spec_idx.map(|i| config.class_specs[i]);
        let conjectural = spec.is_some_and(|s| s.sense() == Sense::Second);

        let mut row = ReportRow {
            function: fname.clone(),
            a,
            b,
            p,
            q,
            sense: spec.map(|s| s.sense()),
            s: spec.map(|s| s.s()),
            alpha: spec.map(|s| s.alpha()),
            m: spec.map(|s| s.m()),
            theorem: tag,
            exponent,
            membership: MembershipLabel::Error,
            lhs: None,
            lhs_err: None,
            bound: None,
            slack_ratio: None,
            pass: None,
            skip_reason: None,
            witness: None,
        };

        match self.membership(fi, ii, tag, spec_idx, exponent) {
            Err(msg) => {
                row.skip_reason = Some(format!("membership check failed: {msg}"));
                return row;
            }
            Ok(verdict) => {
                if let Some(w) = verdict.witness() {
                    row.membership = MembershipLabel::Violated;
                    row.witness = Some(*w);
                    row.skip_reason = Some(format!(
                        "membership violated at (x={}, y={}, mu={}): lhs {} > rhs {}",
                        w.x, w.y, w.mu, w.lhs, w.rhs
                    ));
                    return row;
                }
                row.membership = MembershipLabel::Satisfied;
            }
        }

        let (lhs_value, lhs_err) = match lhs {
            Err(msg) => {
                row.skip_reason = Some(format!("integration failed: {msg}"));
                return row;
            }
            Ok(pair) => *pair,
        };
        row.lhs = Some(lhs_value);
        row.lhs_err = Some(lhs_err);

        // second-sense specs have no stated theorem; evaluate the
        // first-sense formula for reference but keep the row out of the
        // pass/fail totals
        let bound_spec = spec.map(|s| {
            if conjectural {
                ClassSpec::new(Sense::First, s.s(), s.alpha(), s.m())
                    .expect("parameters already validated")
            } else {
                s
            }
        });

        let bound = match eval_bound(prob, tag, bound_spec.as_ref(), exponent) {
            Err(msg) => {
                row.skip_reason = Some(format!("bound evaluation failed: {msg}"));
                return row;
            }
            Ok(v) => v,
        };
        row.bound = Some(bound);
        if bound > 0.0 {
            row.slack_ratio = Some(lhs_value / bound);
        }

        let holds = bound_holds(lhs_value, lhs_err, bound);
        if conjectural {
            row.skip_reason = Some(format!(
                "conjectural: no stated second-sense bound; first-sense formula gives {bound} (lhs within slack: {holds})"
            ));
        } else {
            row.pass = Some(holds);
        }
        row
    }
}

/// Run every configured combination and collect one row per bound
/// check. Row order is the configuration order: function, interval, p,
/// q, then theorem (T1, T2, T3, T4, T5, T5_sharp, T6) with spec outer
/// and exponent inner.
pub fn run_sweep(config: &SweepConfig) -> Result<BoundReport, ConfigError> {
    config.validate()?;
    let mut ctx = SweepCtx {
        config,
        memb: HashMap::new(),
    };
    let mut rows = Vec::new();

    for fi in 0..config.functions.len() {
        for ii in 0..config.intervals.len() {
            let (a, b) = config.intervals[ii];
            for &p in &config.p_values {
                for &q in &config.q_values {
                    let f = config.functions[fi].1.clone();
                    let prob =
                        WeightedProblem::new(f, a, b, p, q).expect("config already validated");
                    let lhs = weighted_integral(&prob, config.quad_tol)
                        .map(|r| (r.value, r.err_estimate))
                        .map_err(|e| e.to_string());

                    let push = |ctx: &mut SweepCtx,
                                rows: &mut Vec<ReportRow>,
                                tag: TheoremTag,
                                spec_idx: Option<usize>,
                                exponent: Option<f64>| {
                        rows.push(
                            ctx.build_row(fi, ii, p, q, &prob, &lhs, tag, spec_idx, exponent),
                        );
                    };

                    push(&mut ctx, &mut rows, TheoremTag::T1, None, None);
                    for &k in &config.k_values {
                        push(&mut ctx, &mut rows, TheoremTag::T2, None, Some(k));
                    }
                    for &l in &config.l_values {
                        push(&mut ctx, &mut rows, TheoremTag::T3, None, Some(l));
                    }
                    for si in 0..config.class_specs.len() {
                        push(&mut ctx, &mut rows, TheoremTag::T4, Some(si), None);
                    }
                    for si in 0..config.class_specs.len() {
                        for &k in &config.k_values {
                            push(&mut ctx, &mut rows, TheoremTag::T5, Some(si), Some(k));
                        }
                    }
                    for si in 0..config.class_specs.len() {
                        for &k in &config.k_values {
                            push(&mut ctx, &mut rows, TheoremTag::T5Sharp, Some(si), Some(k));
                        }
                    }
                    for si in 0..config.class_specs.len() {
                        for &l in &config.l_values {
                            push(&mut ctx, &mut rows, TheoremTag::T6, Some(si), Some(l));
                        }
                    }
                }
            }
        }
    }
    Ok(BoundReport { rows })
}

/// Re-evaluate one judged row standalone at a tighter integration
/// tolerance. Returns None when the row was skipped, the function name
/// is unknown, or the tighter integration does not converge.
pub fn recheck_row(config: &SweepConfig, row: &ReportRow, tol_factor: f64) -> Option<bool> {
    row.pass?;
    let f = config
        .functions
        .iter()
        .find(|(name, _)| *name == row.function)
        .map(|(_, f)| f.clone())?;
    let prob = WeightedProblem::new(f, row.a, row.b, row.p, row.q).ok()?;
    let lhs = weighted_integral(&prob, config.quad_tol / tol_factor).ok()?;
    let spec = match (row.sense, row.s, row.alpha, row.m) {
        (Some(sense), Some(s), Some(alpha), Some(m)) => {
            Some(ClassSpec::new(sense, s, alpha, m).ok()?)
        }
        _ => None,
    };
    let bound = eval_bound(&prob, row.theorem, spec.as_ref(), row.exponent).ok()?;
    Some(bound_holds(lhs.value, lhs.err_estimate, bound))
}

/// Per group, the theorem whose bound sits closest to the integral.
#[derive(Debug, Clone, PartialEq)]
pub struct TightestEntry {
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub q: f64,
    pub spec: Option<ClassSpec<f64>>,
    pub theorem: TheoremTag,
    pub slack_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightestSummary {
    pub entries: Vec<TightestEntry>,
    /// groups that had rows but no passing row with a usable ratio
    pub omitted_groups: usize,
}

fn tie_rank(tag: TheoremTag) -> u8 {
    match tag {
        TheoremTag::T4 => 0,
        TheoremTag::T5Sharp => 1,
        TheoremTag::T5 => 2,
        TheoremTag::T6 => 3,
        TheoremTag::T1 => 4,
        TheoremTag::T2 => 5,
        TheoremTag::T3 => 6,
        TheoremTag::HhLeft | TheoremTag::HhRight => u8::MAX,
    }
}

/// Group rows by (function, interval, p, q, spec) and pick the passing
/// row with the largest slack ratio; equal ratios resolve by the fixed
/// tag order T4, T5_sharp, T5, T6, T1, T2, T3. Groups whose rows all
/// failed or were skipped are counted, not listed.
pub fn tightest_theorem(report: &BoundReport) -> TightestSummary {
    type Key = (String, u64, u64, u64, u64, Option<(Sense, u64, u64, u64)>);
    let key_of = |row: &ReportRow| -> Key {
        let spec = match (row.sense, row.s, row.alpha, row.m) {
            (Some(sense), Some(s), Some(alpha), Some(m)) => {
                Some((sense, s.to_bits(), alpha.to_bits(), m.to_bits()))
            }
            _ => None,
        };
        (
            row.function.clone(),
            row.a.to_bits(),
            row.b.to_bits(),
            row.p.to_bits(),
            row.q.to_bits(),
            spec,
        )
    };

    // group in first-appearance order so the summary is deterministic
    let mut order: Vec<Key> = Vec::new();
    let mut best: HashMap<Key, Option<(f64, u8, TightestEntry)>> = HashMap::new();
    for row in &report.rows {
        let key = key_of(row);
        let slot = best.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            None
        });
        let (Some(true), Some(ratio)) = (row.pass, row.slack_ratio) else {
            continue;
        };
        let rank = tie_rank(row.theorem);
        let better = match slot {
            None => true,
            Some((best_ratio, best_rank, _)) => {
                ratio > *best_ratio || (ratio == *best_ratio && rank < *best_rank)
            }
        };
        if better {
            let spec = match (row.sense, row.s, row.alpha, row.m) {
                (Some(sense), Some(s), Some(alpha), Some(m)) => {
                    ClassSpec::new(sense, s, alpha, m).ok()
                }
                _ => None,
            };
            *slot = Some((
                ratio,
                rank,
                TightestEntry {
                    function: row.function.clone(),
                    a: row.a,
                    b: row.b,
                    p: row.p,
                    q: row.q,
                    spec,
                    theorem: row.theorem,
                    slack_ratio: ratio,
                },
            ));
        }
    }

    let mut entries = Vec::new();
    let mut omitted_groups = 0;
    for key in order {
        match best.remove(&key).flatten() {
            Some((_, _, entry)) => entries.push(entry),
            None => omitted_groups += 1,
        }
    }
    TightestSummary {
        entries,
        omitted_groups,
    }
}
