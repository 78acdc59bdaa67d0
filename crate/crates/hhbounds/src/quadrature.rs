//! Adaptive Gauss-Kronrod quadrature and the weighted integrals the
//! bound checks are built on.
//!
//! The kernel is the classic QUADPACK 7/15 pair: the 15-point Kronrod
//! value is the result, |K15 - G7| feeds the per-panel error estimate.
//! Refinement is globally greedy (always split the worst panel), which
//! keeps the evaluation sequence independent of the tolerance; the
//! stopping point is the only thing `tol` controls. That is what makes
//! the reported error estimate monotone in the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use crate::expr::{eval, EvalError, ExprAst};
use crate::real::Real;

/// Hard cap on integrand evaluations per `integrate` call.
const MAX_EVALS: u32 = 1_000_000;

/// Abscissae of the 15-point Kronrod rule on [-1, 1]; odd indices are
/// the embedded 7-point Gauss nodes, index 7 is the center. Tables
/// keep the full published digits.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Outcome of one integration: the value, the summed per-panel error
/// estimate, and how many integrand evaluations were spent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub err_estimate: T,
    pub evals: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadError<T> {
    /// The integrand failed at some abscissa.
    Eval(EvalError),
    /// The evaluation cap was hit; carries the best result so far so the
    /// caller can decide whether it is still usable.
    ToleranceNotReached { best: QuadResult<T> },
}

impl<T: fmt::Display> fmt::Display for QuadError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::Eval(e) => write!(f, "integrand evaluation failed: {e}"),
            QuadError::ToleranceNotReached { best } => write!(
                f,
                "tolerance not reached after {} evaluations (best {} with error estimate {})",
                best.evals, best.value, best.err_estimate
            ),
        }
    }
}

impl<T: fmt::Display + fmt::Debug> std::error::Error for QuadError<T> {}

impl<T> From<EvalError> for QuadError<T> {
    fn from(e: EvalError) -> Self {
        QuadError::Eval(e)
    }
}

/// QUADPACK's abserr post-processing: take the raw |K15 - G7|
/// difference, sharpen it against the scale of the integrand's
/// variation (resasc), and floor it at the roundoff level of the
/// absolute integral (resabs).
fn rescale_error<T: Real>(err: T, resabs: T, resasc: T) -> T {
    let mut scaled = err.abs();
    if resasc != T::zero() && scaled != T::zero() {
        let scale = (T::of(200.0) * scaled / resasc).powf(T::of(1.5));
        scaled = if scale < T::one() {
            resasc * scale
        } else {
            resasc
        };
    }
    let fifty_eps = T::of(50.0) * T::epsilon();
    if resabs > T::min_positive_value() / fifty_eps {
        scaled = scaled.max(fifty_eps * resabs);
    }
    scaled
}

struct Panel<T> {
    lo: T,
    hi: T,
    value: T,
    err: T,
}

impl<T: Real> Panel<T> {
    /// Worst error first; ties broken toward the leftmost panel so the
    /// refinement order is fully deterministic.
    fn key_cmp(&self, other: &Self) -> Ordering {
        let by_err = self
            .err
            .partial_cmp(&other.err)
            .expect("panel errors are finite");
        by_err.then_with(|| {
            other
                .lo
                .partial_cmp(&self.lo)
                .expect("panel bounds are finite")
        })
    }
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_cmp(other)
    }
}

/// One 15-point Kronrod application on [lo, hi]. Indexed loops kept in
/// the reference routine's shape (strided Gauss/Kronrod interleaving).
#[allow(clippy::needless_range_loop)]
fn qk15<T: Real, F>(f: &F, lo: T, hi: T) -> Result<Panel<T>, QuadError<T>>
where
    F: Fn(T) -> Result<T, EvalError>,
{
    let half = T::of(0.5);
    let center = half * (lo + hi);
    let half_len = half * (hi - lo);

    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];

    let fc = f(center)?;
    let mut resg = fc * T::of(WG[3]);
    let mut resk = fc * T::of(WGK[7]);
    let mut resabs = resk.abs();

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let absc = half_len * T::of(XGK[jtw]);
        let fval1 = f(center - absc)?;
        let fval2 = f(center + absc)?;
        fv1[jtw] = fval1;
        fv2[jtw] = fval2;
        let fsum = fval1 + fval2;
        resg = resg + T::of(WG[j]) * fsum;
        resk = resk + T::of(WGK[jtw]) * fsum;
        resabs = resabs + T::of(WGK[jtw]) * (fval1.abs() + fval2.abs());
    }

    for j in 0..4 {
        let jtwm1 = 2 * j;
        let absc = half_len * T::of(XGK[jtwm1]);
        let fval1 = f(center - absc)?;
        let fval2 = f(center + absc)?;
        fv1[jtwm1] = fval1;
        fv2[jtwm1] = fval2;
        let fsum = fval1 + fval2;
        resk = resk + T::of(WGK[jtwm1]) * fsum;
        resabs = resabs + T::of(WGK[jtwm1]) * (fval1.abs() + fval2.abs());
    }

    let reskh = resk * half;
    let mut resasc = T::of(WGK[7]) * (fc - reskh).abs();
    for j in 0..7 {
        resasc = resasc + T::of(WGK[j]) * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let value = resk * half_len;
    let raw_err = ((resk - resg) * half_len).abs();
    let err = rescale_error(raw_err, resabs * half_len.abs(), resasc * half_len.abs());

    if !(value.is_finite() && err.is_finite()) {
        return Err(QuadError::Eval(EvalError::NonFinite { op: "integral" }));
    }
    Ok(Panel { lo, hi, value, err })
}

/// Running sum with Neumaier compensation; the totals the adaptive loop
/// reports are these, not naive accumulations, so panel bookkeeping does
/// not drift over thousands of updates.
struct Compensated<T> {
    sum: T,
    c: T,
}

impl<T: Real> Compensated<T> {
    fn new() -> Self {
        Compensated {
            sum: T::zero(),
            c: T::zero(),
        }
    }

    fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c = self.c + ((self.sum - t) + v);
        } else {
            self.c = self.c + ((v - t) + self.sum);
        }
        self.sum = t;
    }

    fn value(&self) -> T {
        self.sum + self.c
    }
}

/// Adaptive integration of `f` over [lo, hi] to absolute tolerance `tol`.
///
/// Splits the panel with the largest error estimate until the estimates
/// sum below `tol` or the evaluation cap is hit.
pub fn integrate<T: Real, F>(f: F, lo: T, hi: T, tol: T) -> Result<QuadResult<T>, QuadError<T>>
where
    F: Fn(T) -> Result<T, EvalError>,
{
    assert!(lo < hi, "integrate: need lo < hi");
    assert!(tol > T::zero(), "integrate: need tol > 0");

    let mut heap = BinaryHeap::new();
    let mut value = Compensated::new();
    let mut err = Compensated::new();
    let mut evals: u32 = 15;

    let first = qk15(&f, lo, hi)?;
    value.add(first.value);
    err.add(first.err);
    heap.push(first);

    let current = |value: &Compensated<T>, err: &Compensated<T>, evals: u32| QuadResult {
        value: value.value(),
        err_estimate: err.value().max(T::zero()),
        evals,
    };

    while current(&value, &err, evals).err_estimate > tol {
        if evals + 30 > MAX_EVALS {
            return Err(QuadError::ToleranceNotReached {
                best: current(&value, &err, evals),
            });
        }
        let worst = heap.pop().expect("error positive implies panels exist");
        let mid = T::of(0.5) * (worst.lo + worst.hi);
        if !(worst.lo < mid && mid < worst.hi) {
            // interval exhausted at floating-point resolution
            return Err(QuadError::ToleranceNotReached {
                best: current(&value, &err, evals),
            });
        }
        let left = qk15(&f, worst.lo, mid)?;
        let right = qk15(&f, mid, worst.hi)?;
        evals += 30;
        value.add(left.value);
        value.add(right.value);
        value.add(-worst.value);
        err.add(left.err);
        err.add(right.err);
        err.add(-worst.err);
        heap.push(left);
        heap.push(right);
    }

    Ok(current(&value, &err, evals))
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProblemError {
    #[error("invalid interval: need 0 <= a < b (finite), got a = {a}, b = {b}")]
    BadInterval { a: f64, b: f64 },
    #[error("weight exponent {name} must be positive and finite, got {value}")]
    BadExponent { name: &'static str, value: f64 },
}

fn lossy<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// The integrand family shared by every theorem under test: a function
/// f on [a, b] with the two-sided power weight (x-a)^p (b-x)^q.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedProblem<T> {
    f: ExprAst<T>,
    a: T,
    b: T,
    p: T,
    q: T,
}

impl<T: Real> WeightedProblem<T> {
    pub fn new(f: ExprAst<T>, a: T, b: T, p: T, q: T) -> Result<Self, ProblemError> {
        if !(a.is_finite() && b.is_finite() && T::zero() <= a && a < b) {
            return Err(ProblemError::BadInterval {
                a: lossy(a),
                b: lossy(b),
            });
        }
        for (name, v) in [("p", p), ("q", q)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(ProblemError::BadExponent {
                    name,
                    value: lossy(v),
                });
            }
        }
        Ok(WeightedProblem { f, a, b, p, q })
    }

    pub fn f(&self) -> &ExprAst<T> {
        &self.f
    }
    pub fn a(&self) -> T {
        self.a
    }
    pub fn b(&self) -> T {
        self.b
    }
    pub fn p(&self) -> T {
        self.p
    }
    pub fn q(&self) -> T {
        self.q
    }
}

/// ∫_a^b (x-a)^p (b-x)^q f(x) dx.
///
/// The weight vanishes at both endpoints (p, q > 0), so the integrand is
/// bounded; the only subtlety is that subpanel edges can round a hair
/// outside [a, b], which the clamp below absorbs before the weight or f
/// sees the point.
pub fn weighted_integral<T: Real>(
    prob: &WeightedProblem<T>,
    tol: T,
) -> Result<QuadResult<T>, QuadError<T>> {
    let (a, b, p, q) = (prob.a, prob.b, prob.p, prob.q);
    let f = &prob.f;
    integrate(
        move |x: T| {
            let x = x.max(a).min(b);
            let w = (x - a).powf(p) * (b - x).powf(q);
            Ok(w * eval(f, x)?)
        },
        a,
        b,
        tol,
    )
}

/// (b-a)^{p+q+1} ∫_0^1 (1-t)^p t^q f(ta + (1-t)b) dt, the substituted
/// form of the same integral (x = ta + (1-t)b maps it onto [0, 1]).
pub fn lemma1_rhs<T: Real>(
    prob: &WeightedProblem<T>,
    tol: T,
) -> Result<QuadResult<T>, QuadError<T>> {
    let (a, b, p, q) = (prob.a, prob.b, prob.p, prob.q);
    let f = &prob.f;
    let scale = (b - a).powf(p + q + T::one());
    let inner = integrate(
        move |t: T| {
            let t = t.max(T::zero()).min(T::one());
            let w = (T::one() - t).powf(p) * t.powf(q);
            let x = (t * a + (T::one() - t) * b).max(a).min(b);
            Ok(w * eval(f, x)?)
        },
        T::zero(),
        T::one(),
        tol,
    )?;
    Ok(QuadResult {
        value: scale * inner.value,
        err_estimate: scale * inner.err_estimate,
        evals: inner.evals,
    })
}

/// Both sides of the substitution identity, integrated independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport<T> {
    pub lhs: QuadResult<T>,
    pub rhs: QuadResult<T>,
    pub discrepancy: T,
    pub pass: bool,
}

/// Integrate the weighted form over [a, b] and the substituted form
/// over [0, 1] and check they agree within their combined error
/// estimates plus a small relative slack.
pub fn verify_lemma1<T: Real>(
    prob: &WeightedProblem<T>,
    tol: T,
) -> Result<IdentityReport<T>, QuadError<T>> {
    let lhs = weighted_integral(prob, tol)?;
    let rhs = lemma1_rhs(prob, tol)?;
    let discrepancy = (lhs.value - rhs.value).abs();
    let slack = lhs.err_estimate
        + rhs.err_estimate
        + T::of(1e-12) * lhs.value.abs().max(rhs.value.abs()).max(T::one());
    Ok(IdentityReport {
        lhs,
        rhs,
        discrepancy,
        pass: discrepancy <= slack,
    })
}
