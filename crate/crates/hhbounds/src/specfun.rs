//! Log-gamma and the Euler Beta function.
//!
//! Every Beta evaluation in the crate routes through here so accuracy is
//! centralized. Beta is computed in log space to survive large arguments
//! (Hölder steps produce things like `beta(qk+1, pk+1)` with k up to 50).

use crate::real::Real;

/// Lanczos approximation, Pugh's variant with r = 10.900511 and eleven
/// coefficients. Chosen over the classic g=7/n=9 table for the extra
/// headroom: it keeps log_gamma near 1 ulp across [0.5, 200], which the
/// log-space Beta needs for its 1e-12 relative target at arguments
/// around 100.
const LANCZOS_R: f64 = 10.900511;

#[allow(clippy::excessive_precision)]
const LANCZOS_DK: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

/// ln(2 * sqrt(e / pi))
#[allow(clippy::excessive_precision)]
const LN_2_SQRT_E_OVER_PI: f64 = 0.6207822376352452223455184457816472122518527279025978;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecFunError {
    #[error("{func} is defined for positive arguments only, got {value}")]
    NonPositive { func: &'static str, value: f64 },
}

fn require_positive<T: Real>(func: &'static str, x: T) -> Result<(), SpecFunError> {
    if x > T::zero() {
        Ok(())
    } else {
        Err(SpecFunError::NonPositive {
            func,
            value: x.to_f64().unwrap_or(f64::NAN),
        })
    }
}

fn lanczos_series<T: Real>(shifted: impl Fn(usize) -> T) -> T {
    let mut s = T::of(LANCZOS_DK[0]);
    for (i, &dk) in LANCZOS_DK.iter().enumerate().skip(1) {
        s = s + T::of(dk) / shifted(i);
    }
    s
}

/// Natural log of the gamma function for x > 0.
pub fn log_gamma<T: Real>(x: T) -> Result<T, SpecFunError> {
    require_positive("log_gamma", x)?;
    let half = T::of(0.5);
    if x < half {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x); on (0, 1/2)
        // both gamma values and sin(pi x) are positive.
        let s = lanczos_series(|i| T::from_usize(i).unwrap() - x);
        let reflected = s.ln()
            + T::of(LN_2_SQRT_E_OVER_PI)
            + (half - x) * ((half - x + T::of(LANCZOS_R)) / T::E()).ln();
        Ok(T::PI().ln() - (T::PI() * x).sin().ln() - reflected)
    } else {
        let s = lanczos_series(|i| x + T::from_usize(i).unwrap() - T::one());
        Ok(s.ln()
            + T::of(LN_2_SQRT_E_OVER_PI)
            + (x - half) * ((x - half + T::of(LANCZOS_R)) / T::E()).ln())
    }
}

/// Validated argument pair for the Beta function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaArgs<T> {
    x: T,
    y: T,
}

impl<T: Real> BetaArgs<T> {
    pub fn new(x: T, y: T) -> Result<Self, SpecFunError> {
        require_positive("beta", x)?;
        require_positive("beta", y)?;
        Ok(BetaArgs { x, y })
    }

    pub fn x(&self) -> T {
        self.x
    }

    pub fn y(&self) -> T {
        self.y
    }
}

/// ln B(x, y) for x, y > 0.
pub fn ln_beta<T: Real>(x: T, y: T) -> Result<T, SpecFunError> {
    let args = BetaArgs::new(x, y)?;
    // log_gamma cannot fail here: x, y, x+y are all positive
    Ok(log_gamma(args.x)? + log_gamma(args.y)? - log_gamma(args.x + args.y)?)
}

fn factorial_u128(n: u32) -> u128 {
    (2..=n as u128).product()
}

/// (x-1)! (y-1)! / (x+y-1)! when both arguments are integers small
/// enough for the factorials to stay exact in u128. One rounding per
/// factorial-to-float cast plus one division keeps these cases within
/// 1.5 ulp, and small ones (everything through 18!) exactly rounded;
/// the log-space route is about a half order of magnitude worse.
fn small_integer_beta<T: Real>(x: T, y: T) -> Option<T> {
    let (xi, yi) = (x.to_f64()?, y.to_f64()?);
    if xi.fract() != 0.0
        || yi.fract() != 0.0
        || !(1.0..=34.0).contains(&xi)
        || !(1.0..=34.0).contains(&yi)
    {
        return None;
    }
    let (m, n) = (xi as u32, yi as u32);
    let total = m + n - 1;
    if total > 34 {
        // 35! overflows u128
        return None;
    }
    let num = factorial_u128(m - 1) * factorial_u128(n - 1);
    Some(T::of(num as f64 / factorial_u128(total) as f64))
}

/// Euler Beta function B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y).
pub fn beta<T: Real>(x: T, y: T) -> Result<T, SpecFunError> {
    let args = BetaArgs::new(x, y)?;
    if let Some(exact) = small_integer_beta(args.x, args.y) {
        return Ok(exact);
    }
    Ok(ln_beta(x, y)?.exp())
}
