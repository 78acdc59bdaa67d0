//! Numerical verification of weighted Hermite-Hadamard-type integral
//! inequalities for quasi-convex and generalized (s, m)-convex functions.
//!
//! The library is generic over the scalar type through [`real::Real`];
//! the aliases below pin everything to `f64`, which is what the CLI and
//! the sweep harness use.

pub mod bounds;
pub mod convexity;
pub mod expr;
pub mod harness;
pub mod quadrature;
pub mod real;
pub mod specfun;

pub use real::Real;

/// Expression tree over `f64`.
pub type Expr = expr::ExprAst<f64>;

/// Weighted integration problem over `f64`.
pub type Problem = quadrature::WeightedProblem<f64>;

/// Convexity class parameters over `f64`.
pub type Class = convexity::ClassSpec<f64>;

/// Membership sampling parameters over `f64`.
pub type Sampling = convexity::SamplingSpec<f64>;

/// Membership check outcome over `f64`.
pub type Verdict = convexity::MembershipVerdict<f64>;

/// Evaluated bound over `f64`.
pub type Bound = bounds::BoundValue<f64>;
