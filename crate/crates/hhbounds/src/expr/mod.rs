//! A small expression language for univariate real functions f(x).
//!
//! The grammar (normative, also documented in the README):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := ('-')? power
//! power  := atom ('^' factor)?
//! atom   := number | 'x' | 'pi' | 'e' | ident '(' expr (',' expr)? ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)`. Functions: `exp`, `ln`, `abs`, `sqrt`, `sin`, `cos` (unary)
//! and `max2` (binary).

mod parse;

pub use parse::{parse, ParseError};

use std::fmt;

use crate::real::Real;

/// Unary function names accepted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Abs,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Immutable parse tree of a univariate function of `x`.
///
/// Arity is fixed by the variant shape, so an ill-formed application is
/// unrepresentable. Trees are plain data: cloning is deep, sharing across
/// threads is safe, evaluation never mutates.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst<T> {
    Lit(T),
    Var,
    Pi,
    E,
    Neg(Box<ExprAst<T>>),
    Bin(BinOp, Box<ExprAst<T>>, Box<ExprAst<T>>),
    Fun(Func, Box<ExprAst<T>>),
    Max2(Box<ExprAst<T>>, Box<ExprAst<T>>),
}

// tree constructors, not arithmetic: `add` builds a node, it does not
// reduce anything, so the operator traits would be misleading here
#[allow(clippy::should_implement_trait)]
impl<T> ExprAst<T> {
    pub fn lit(v: T) -> Self {
        ExprAst::Lit(v)
    }
    pub fn var() -> Self {
        ExprAst::Var
    }
    pub fn neg(a: Self) -> Self {
        ExprAst::Neg(Box::new(a))
    }
    pub fn bin(op: BinOp, l: Self, r: Self) -> Self {
        ExprAst::Bin(op, Box::new(l), Box::new(r))
    }
    pub fn add(l: Self, r: Self) -> Self {
        Self::bin(BinOp::Add, l, r)
    }
    pub fn sub(l: Self, r: Self) -> Self {
        Self::bin(BinOp::Sub, l, r)
    }
    pub fn mul(l: Self, r: Self) -> Self {
        Self::bin(BinOp::Mul, l, r)
    }
    pub fn div(l: Self, r: Self) -> Self {
        Self::bin(BinOp::Div, l, r)
    }
    pub fn pow(l: Self, r: Self) -> Self {
        Self::bin(BinOp::Pow, l, r)
    }
    pub fn fun(f: Func, a: Self) -> Self {
        ExprAst::Fun(f, Box::new(a))
    }
    pub fn abs(a: Self) -> Self {
        Self::fun(Func::Abs, a)
    }
    pub fn max2(l: Self, r: Self) -> Self {
        ExprAst::Max2(Box::new(l), Box::new(r))
    }

    /// Substitute every occurrence of `x` with `replacement`.
    pub fn substitute(&self, replacement: &Self) -> Self
    where
        T: Clone,
    {
        match self {
            ExprAst::Var => replacement.clone(),
            ExprAst::Lit(v) => ExprAst::Lit(v.clone()),
            ExprAst::Pi => ExprAst::Pi,
            ExprAst::E => ExprAst::E,
            ExprAst::Neg(a) => Self::neg(a.substitute(replacement)),
            ExprAst::Bin(op, l, r) => {
                Self::bin(*op, l.substitute(replacement), r.substitute(replacement))
            }
            ExprAst::Fun(f, a) => Self::fun(*f, a.substitute(replacement)),
            ExprAst::Max2(l, r) => Self::max2(l.substitute(replacement), r.substitute(replacement)),
        }
    }
}

/// Fully parenthesized rendering; reparsing yields a structurally
/// identical tree as long as literals are nonnegative (the grammar has no
/// negative literals; negative constants print through a `Neg` node).
impl<T: fmt::Display> fmt::Display for ExprAst<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Lit(v) => write!(f, "{v}"),
            ExprAst::Var => write!(f, "x"),
            ExprAst::Pi => write!(f, "pi"),
            ExprAst::E => write!(f, "e"),
            ExprAst::Neg(a) => write!(f, "(-{a})"),
            ExprAst::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            ExprAst::Fun(func, a) => write!(f, "{}({a})", func.name()),
            ExprAst::Max2(l, r) => write!(f, "max2({l}, {r})"),
        }
    }
}

/// Evaluation failure at a specific operation.
///
/// Non-finite intermediate results are errors by construction so that
/// downstream quadrature never integrates garbage.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("{func}({arg}) is outside the function domain")]
    Domain { func: &'static str, arg: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid power: negative base {base} with non-integer exponent {exponent}")]
    InvalidPow { base: f64, exponent: f64 },
    #[error("non-finite result from `{op}`")]
    NonFinite { op: &'static str },
}

fn lossy<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn finite<T: Real>(v: T, op: &'static str) -> Result<T, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite { op })
    }
}

/// Recursive evaluation of `ast` at the point `x`.
///
/// Pure and deterministic: the same `(ast, x)` always produces the same
/// bits. Instantiated at `f64` this is plain IEEE double-precision
/// arithmetic with no reassociation.
pub fn eval<T: Real>(ast: &ExprAst<T>, x: T) -> Result<T, EvalError> {
    match ast {
        ExprAst::Lit(v) => Ok(*v),
        ExprAst::Var => Ok(x),
        ExprAst::Pi => Ok(T::PI()),
        ExprAst::E => Ok(T::E()),
        ExprAst::Neg(a) => Ok(-eval(a, x)?),
        ExprAst::Bin(op, l, r) => {
            let a = eval(l, x)?;
            let b = eval(r, x)?;
            match op {
                BinOp::Add => finite(a + b, "+"),
                BinOp::Sub => finite(a - b, "-"),
                BinOp::Mul => finite(a * b, "*"),
                BinOp::Div => {
                    if b == T::zero() {
                        Err(EvalError::DivisionByZero)
                    } else {
                        finite(a / b, "/")
                    }
                }
                BinOp::Pow => {
                    if a < T::zero() && b.fract() != T::zero() {
                        Err(EvalError::InvalidPow {
                            base: lossy(a),
                            exponent: lossy(b),
                        })
                    } else {
                        finite(a.powf(b), "^")
                    }
                }
            }
        }
        ExprAst::Fun(func, arg) => {
            let a = eval(arg, x)?;
            let v = match func {
                Func::Exp => a.exp(),
                Func::Ln => {
                    if a <= T::zero() {
                        return Err(EvalError::Domain {
                            func: "ln",
                            arg: lossy(a),
                        });
                    }
                    a.ln()
                }
                Func::Abs => a.abs(),
                Func::Sqrt => {
                    if a < T::zero() {
                        return Err(EvalError::Domain {
                            func: "sqrt",
                            arg: lossy(a),
                        });
                    }
                    a.sqrt()
                }
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
            };
            finite(v, func.name())
        }
        ExprAst::Max2(l, r) => {
            let a = eval(l, x)?;
            let b = eval(r, x)?;
            Ok(a.max(b))
        }
    }
}
