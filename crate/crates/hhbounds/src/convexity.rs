//! Sampling-based membership checks for convex, quasi-convex, and the
//! two generalized (s, m)-convexity classes.
//!
//! A "satisfied" verdict only says no violation was found on the sample
//! design; a "violated" verdict is conclusive and carries a recheckable
//! witness triple.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{eval, EvalError, ExprAst};
use crate::real::Real;

/// Which of the two generalized convexity definitions applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConvexityError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("function must be nonnegative on the class domain: f({x}) = {value}")]
    NegativeFunction { x: f64, value: f64 },
    #[error("{name} must lie in {range}, got {value}")]
    BadParameter {
        name: &'static str,
        range: &'static str,
        value: f64,
    },
}

fn lossy<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Parameters (sense, s, alpha, m) of a generalized convexity class.
///
/// m = 0 is rejected even though the source definitions nominally allow
/// it: the right-hand side evaluates f(y/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassSpec<T> {
    sense: Sense,
    s: T,
    alpha: T,
    m: T,
}

impl<T: Real> ClassSpec<T> {
    pub fn new(sense: Sense, s: T, alpha: T, m: T) -> Result<Self, ConvexityError> {
        let bad = |name, range, value: T| ConvexityError::BadParameter {
            name,
            range,
            value: lossy(value),
        };
        if !(s.is_finite() && T::zero() < s && s <= T::one()) {
            return Err(bad("s", "(0, 1]", s));
        }
        if !(alpha.is_finite() && T::zero() <= alpha && alpha <= T::one()) {
            return Err(bad("alpha", "[0, 1]", alpha));
        }
        if !(m.is_finite() && T::zero() < m && m <= T::one()) {
            return Err(bad("m", "(0, 1]", m));
        }
        Ok(ClassSpec { sense, s, alpha, m })
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }
    pub fn s(&self) -> T {
        self.s
    }
    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn m(&self) -> T {
        self.m
    }

    /// Coefficient pair (cx, cy) with rhs = cx*f(x) + m*cy*f(y/m).
    ///
    /// For s = 1 the two senses produce bit-identical coefficients:
    /// alpha*1 == alpha and powf(v, 1) == v exactly, so both paths reduce
    /// to (mu^alpha, 1 - mu^alpha).
    pub fn combination_coeffs(&self, mu: T) -> (T, T) {
        match self.sense {
            Sense::First => {
                // powf(0, 0) == 1, which is exactly the 0^0 := 1 we need
                // at the mu = 0, alpha*s = 0 corner
                let cx = mu.powf(self.alpha * self.s);
                (cx, T::one() - cx)
            }
            Sense::Second => {
                let inner = mu.powf(self.alpha);
                (inner.powf(self.s), (T::one() - inner).powf(self.s))
            }
        }
    }
}

/// Right-hand side of the class inequality for precomputed f values.
pub fn class_rhs<T: Real>(spec: &ClassSpec<T>, fx: T, fy_over_m: T, mu: T) -> T {
    let (cx, cy) = spec.combination_coeffs(mu);
    cx * fx + spec.m * cy * fy_over_m
}

/// Sample design: a grid per axis plus seeded random triples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingSpec<T> {
    pub grid_points_per_axis: usize,
    pub random_trials: usize,
    pub rng_seed: u64,
    pub violation_tolerance: T,
}

impl<T: Real> Default for SamplingSpec<T> {
    fn default() -> Self {
        SamplingSpec {
            grid_points_per_axis: 9,
            random_trials: 200,
            rng_seed: 42,
            violation_tolerance: T::of(1e-9),
        }
    }
}

/// A violating sample: lhs > rhs + violation_tolerance at (x, y, mu).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness<T> {
    pub x: T,
    pub y: T,
    pub mu: T,
    pub lhs: T,
    pub rhs: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MembershipVerdict<T> {
    SatisfiedOnSamples {
        samples_checked: u64,
    },
    Violated {
        witness: Witness<T>,
        samples_checked: u64,
    },
}

impl<T> MembershipVerdict<T> {
    pub fn is_violated(&self) -> bool {
        matches!(self, MembershipVerdict::Violated { .. })
    }

    pub fn witness(&self) -> Option<&Witness<T>> {
        match self {
            MembershipVerdict::Violated { witness, .. } => Some(witness),
            MembershipVerdict::SatisfiedOnSamples { .. } => None,
        }
    }

    pub fn samples_checked(&self) -> u64 {
        match self {
            MembershipVerdict::SatisfiedOnSamples { samples_checked }
            | MembershipVerdict::Violated {
                samples_checked, ..
            } => *samples_checked,
        }
    }
}

fn lattice<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap()
            }
        })
        .collect()
}

/// Deterministic scan over the sample design. `test` maps a triple
/// (x, y, mu) to the (lhs, rhs) pair of the inequality under test; the
/// first violation becomes the witness. Grid first (x outer, y middle,
/// mu inner), then the random trials, so a fixed seed fixes the verdict.
fn scan<T: Real>(
    lo: T,
    hi: T,
    sampling: &SamplingSpec<T>,
    mut test: impl FnMut(T, T, T) -> Result<(T, T), ConvexityError>,
) -> Result<MembershipVerdict<T>, ConvexityError> {
    assert!(
        sampling.grid_points_per_axis >= 3,
        "need at least 3 grid points per axis"
    );
    assert!(
        sampling.violation_tolerance >= T::zero(),
        "violation tolerance must be nonnegative"
    );
    let tol = sampling.violation_tolerance;
    let axis = lattice(lo, hi, sampling.grid_points_per_axis);
    let unit = lattice(T::zero(), T::one(), sampling.grid_points_per_axis);

    let mut samples_checked = 0u64;
    let run = |x: T,
               y: T,
               mu: T,
               samples_checked: u64,
               test: &mut dyn FnMut(T, T, T) -> Result<(T, T), ConvexityError>|
     -> Result<Option<MembershipVerdict<T>>, ConvexityError> {
        let (lhs, rhs) = test(x, y, mu)?;
        if lhs > rhs + tol {
            return Ok(Some(MembershipVerdict::Violated {
                witness: Witness { x, y, mu, lhs, rhs },
                samples_checked,
            }));
        }
        Ok(None)
    };

    for &x in &axis {
        for &y in &axis {
            for &mu in &unit {
                samples_checked += 1;
                if let Some(v) = run(x, y, mu, samples_checked, &mut test)? {
                    return Ok(v);
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(sampling.rng_seed);
    for _ in 0..sampling.random_trials {
        let x = lo + (hi - lo) * T::of(rng.gen::<f64>());
        let y = lo + (hi - lo) * T::of(rng.gen::<f64>());
        let mu = T::of(rng.gen::<f64>());
        samples_checked += 1;
        if let Some(v) = run(x, y, mu, samples_checked, &mut test)? {
            return Ok(v);
        }
    }

    Ok(MembershipVerdict::SatisfiedOnSamples { samples_checked })
}

/// Membership test for the generalized class over x, y in [0, x_max].
///
/// The class definitions require f nonnegative on its domain, which here
/// extends to x_max/m through the f(y/m) term; every sampled evaluation
/// point doubles as a nonnegativity check.
pub fn check_membership<T: Real>(
    f: &ExprAst<T>,
    spec: &ClassSpec<T>,
    x_max: T,
    sampling: &SamplingSpec<T>,
) -> Result<MembershipVerdict<T>, ConvexityError> {
    assert!(x_max > T::zero(), "x_max must be positive");
    let tol = sampling.violation_tolerance;
    let nonneg = |x: T| -> Result<T, ConvexityError> {
        let v = eval(f, x)?;
        if v < -tol {
            return Err(ConvexityError::NegativeFunction {
                x: lossy(x),
                value: lossy(v),
            });
        }
        Ok(v)
    };
    scan(T::zero(), x_max, sampling, |x, y, mu| {
        let fx = nonneg(x)?;
        let fy_over_m = nonneg(y / spec.m)?;
        let lhs = nonneg(mu * x + (T::one() - mu) * y)?;
        Ok((lhs, class_rhs(spec, fx, fy_over_m, mu)))
    })
}

/// f(tx + (1-t)y) <= max(f(x), f(y)) over the sample design on [a, b].
pub fn check_quasi_convex<T: Real>(
    f: &ExprAst<T>,
    a: T,
    b: T,
    sampling: &SamplingSpec<T>,
) -> Result<MembershipVerdict<T>, ConvexityError> {
    assert!(a < b, "need a < b");
    scan(a, b, sampling, |x, y, t| {
        let fx = eval(f, x)?;
        let fy = eval(f, y)?;
        let lhs = eval(f, t * x + (T::one() - t) * y)?;
        Ok((lhs, fx.max(fy)))
    })
}

/// f(tx + (1-t)y) <= t f(x) + (1-t) f(y) over the sample design on [a, b].
pub fn check_convex<T: Real>(
    f: &ExprAst<T>,
    a: T,
    b: T,
    sampling: &SamplingSpec<T>,
) -> Result<MembershipVerdict<T>, ConvexityError> {
    assert!(a < b, "need a < b");
    scan(a, b, sampling, |x, y, t| {
        let fx = eval(f, x)?;
        let fy = eval(f, y)?;
        let lhs = eval(f, t * x + (T::one() - t) * y)?;
        Ok((lhs, t * fx + (T::one() - t) * fy))
    })
}
