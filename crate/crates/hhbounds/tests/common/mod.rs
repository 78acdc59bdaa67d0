//! Seeded generators shared by the integration suites.
//!
//! Expressions are built from polynomial / exp / abs pieces with
//! coefficients bounded so that every generated function stays finite
//! (and its powers up to exponent 5 stay finite) on arguments up to
//! b / m <= 20 for the intervals and class parameters produced here.

use hhbounds::convexity::Sense;
use hhbounds::expr::{ExprAst, Func};
use hhbounds::{Class, Expr, Problem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn lit(v: f64) -> Expr {
    ExprAst::lit(v)
}

fn x() -> Expr {
    ExprAst::var()
}

/// a + b x + c x^2 with coefficients in [-2, 2].
pub fn random_poly(rng: &mut ChaCha8Rng) -> Expr {
    let a = rng.gen_range(-2.0..=2.0);
    let b = rng.gen_range(-2.0..=2.0);
    let c = rng.gen_range(-2.0..=2.0);
    ExprAst::add(
        ExprAst::add(lit(a), ExprAst::mul(lit(b), x())),
        ExprAst::mul(lit(c), ExprAst::pow(x(), lit(2.0))),
    )
}

/// exp(s x + t) with |s| <= 0.8, |t| <= 1.
pub fn random_exp_affine(rng: &mut ChaCha8Rng) -> Expr {
    let s = rng.gen_range(-0.8..=0.8);
    let t = rng.gen_range(-1.0..=1.0);
    ExprAst::fun(Func::Exp, ExprAst::add(ExprAst::mul(lit(s), x()), lit(t)))
}

/// A polynomial / exp / abs composition, total evaluation everywhere.
pub fn random_expr(rng: &mut ChaCha8Rng) -> Expr {
    match rng.gen_range(0..6) {
        0 => random_poly(rng),
        1 => ExprAst::abs(random_poly(rng)),
        2 => random_exp_affine(rng),
        3 => ExprAst::add(random_poly(rng), ExprAst::abs(random_poly(rng))),
        4 => ExprAst::add(random_poly(rng), random_exp_affine(rng)),
        _ => ExprAst::mul(ExprAst::abs(random_poly(rng)), random_exp_affine(rng)),
    }
}

/// 0 <= a < b <= 5 with at least 0.2 of separation.
pub fn random_interval(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let a = rng.gen_range(0.0..4.5);
    let b = rng.gen_range(a + 0.2..=5.0);
    (a, b)
}

/// p, q in (0, 4]; the half-open flip keeps zero out.
pub fn random_pq(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let p = 4.0 - rng.gen_range(0.0..4.0);
    let q = 4.0 - rng.gen_range(0.0..4.0);
    (p, q)
}

pub fn random_problem(rng: &mut ChaCha8Rng) -> Problem {
    let f = random_expr(rng);
    let (a, b) = random_interval(rng);
    let (p, q) = random_pq(rng);
    Problem::new(f, a, b, p, q).expect("generator keeps parameters in range")
}

/// First-sense class parameters with m >= 1/4, so b / m stays within
/// the magnitude budget of [`random_expr`].
pub fn random_first_spec(rng: &mut ChaCha8Rng) -> Class {
    let s = 1.0 - rng.gen_range(0.0..1.0);
    let alpha = rng.gen_range(0.0..=1.0);
    let m = rng.gen_range(0.25..=1.0);
    Class::new(Sense::First, s, alpha, m).expect("generator keeps parameters in range")
}

/// Twenty strictly convex functions on [0, 1]. Strictness matters: the
/// sandwich direction tests need the reversed checks on the negations
/// to fail outright, which an affine function would not do.
pub fn strictly_convex_catalog() -> Vec<(&'static str, Expr)> {
    let sources = [
        "x^2",
        "x^2 + x",
        "2*x^2 - x",
        "exp(x)",
        "exp(2*x)",
        "x^4",
        "x^4 + x^2",
        "(x - 0.5)^2",
        "x^2 + exp(x)",
        "exp(x) - x",
        "3*x^2 + 2",
        "x^2 - 3*x + 1",
        "0.5*x^4 + x",
        "exp(0.5*x)",
        "x^6",
        "x^2 + abs(x - 0.3)",
        "exp(x) + abs(x - 0.7)",
        "5*x^2 - 2*x + 0.1",
        "x^8",
        "x^4 + exp(x) - 2*x",
    ];
    sources
        .iter()
        .map(|src| {
            (
                *src,
                hhbounds::expr::parse(src).expect("catalog entries parse"),
            )
        })
        .collect()
}
