//! Recursive-descent parser for the expression grammar.

use std::fmt;

use super::{BinOp, ExprAst, Func};
use crate::real::Real;

/// Syntax error with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source where the problem starts.
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        offset,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Num(f64),
    Ident(&'a str),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number `{v}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
    }

    /// Next token and its starting byte offset.
    fn next(&mut self) -> Result<(Tok<'a>, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::Eof, start));
        };
        let single = |t| (t, start);
        match c {
            '+' => {
                self.pos += 1;
                Ok(single(Tok::Plus))
            }
            '-' => {
                self.pos += 1;
                Ok(single(Tok::Minus))
            }
            '*' => {
                self.pos += 1;
                Ok(single(Tok::Star))
            }
            '/' => {
                self.pos += 1;
                Ok(single(Tok::Slash))
            }
            '^' => {
                self.pos += 1;
                Ok(single(Tok::Caret))
            }
            '(' => {
                self.pos += 1;
                Ok(single(Tok::LParen))
            }
            ')' => {
                self.pos += 1;
                Ok(single(Tok::RParen))
            }
            ',' => {
                self.pos += 1;
                Ok(single(Tok::Comma))
            }
            '0'..='9' | '.' => {
                let len = scan_number(rest);
                if len == 0 {
                    return err(start, "malformed numeric literal");
                }
                let text = &rest[..len];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    message: format!("malformed numeric literal `{text}`"),
                })?;
                if !value.is_finite() {
                    return err(start, format!("numeric literal `{text}` overflows"));
                }
                self.pos = start + len;
                Ok((Tok::Num(value), start))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = rest
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                    .unwrap_or(rest.len());
                self.pos = start + len;
                Ok((Tok::Ident(&rest[..len]), start))
            }
            other => err(start, format!("unexpected character `{other}`")),
        }
    }
}

/// Length in bytes of the numeric literal at the start of `s`, or 0.
///
/// Accepts `123`, `1.5`, `.5`, `2.`, with an optional exponent part. The
/// exponent marker is consumed only when followed by a valid exponent, so
/// `2e` lexes as the number `2` followed by the identifier `e`.
fn scan_number(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    if i < b.len() && b[i] == b'.' {
        i += 1;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i == 0 || (i == 1 && b[0] == b'.') {
        return 0;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let digits = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j > digits {
            i = j;
        }
    }
    i
}

struct Parser<'a, T> {
    lexer: Lexer<'a>,
    peeked: (Tok<'a>, usize),
    _marker: std::marker::PhantomData<T>,
}

impl<'a, T: Real> Parser<'a, T> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let peeked = lexer.next()?;
        Ok(Parser {
            lexer,
            peeked,
            _marker: std::marker::PhantomData,
        })
    }

    fn peek(&self) -> &Tok<'a> {
        &self.peeked.0
    }

    fn offset(&self) -> usize {
        self.peeked.1
    }

    fn bump(&mut self) -> Result<(Tok<'a>, usize), ParseError> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.peeked, next))
    }

    fn expect(&mut self, want: Tok<'static>) -> Result<usize, ParseError> {
        if *self.peek() == want {
            let (_, off) = self.bump()?;
            Ok(off)
        } else {
            err(
                self.offset(),
                format!(
                    "expected {}, found {}",
                    want.describe(),
                    self.peek().describe()
                ),
            )
        }
    }

    fn expr(&mut self) -> Result<ExprAst<T>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = ExprAst::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<ExprAst<T>, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.factor()?;
            lhs = ExprAst::bin(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<ExprAst<T>, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump()?;
            Ok(ExprAst::neg(self.power()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<ExprAst<T>, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump()?;
            // right-associative: exponent is a full factor
            let exponent = self.factor()?;
            Ok(ExprAst::pow(base, exponent))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<ExprAst<T>, ParseError> {
        let (tok, off) = self.bump()?;
        match tok {
            Tok::Num(v) => {
                let lit = T::from_f64(v).ok_or_else(|| ParseError {
                    offset: off,
                    message: format!("numeric literal `{v}` is not representable"),
                })?;
                Ok(ExprAst::Lit(lit))
            }
            Tok::Ident("x") => Ok(ExprAst::Var),
            Tok::Ident("pi") => Ok(ExprAst::Pi),
            Tok::Ident("e") => Ok(ExprAst::E),
            Tok::Ident(name) => self.call(name, off),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => err(
                off,
                format!("expected an expression, found {}", other.describe()),
            ),
        }
    }

    fn call(&mut self, name: &str, off: usize) -> Result<ExprAst<T>, ParseError> {
        let func = match name {
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "abs" => Some(Func::Abs),
            "sqrt" => Some(Func::Sqrt),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        };
        if func.is_none() && name != "max2" {
            return err(off, format!("unknown identifier `{name}`"));
        }
        self.expect(Tok::LParen)?;
        let first = self.expr()?;
        let second = if *self.peek() == Tok::Comma {
            let comma_off = self.offset();
            if let Some(f) = func {
                return err(comma_off, format!("{} takes one argument", f.name()));
            }
            self.bump()?;
            Some(self.expr()?)
        } else {
            None
        };
        let close = self.offset();
        self.expect(Tok::RParen)?;
        match (func, second) {
            (Some(f), None) => Ok(ExprAst::fun(f, first)),
            (None, Some(s)) => Ok(ExprAst::max2(first, s)),
            (None, None) => err(close, "max2 takes two arguments"),
            (Some(_), Some(_)) => unreachable!("rejected at the comma"),
        }
    }
}

/// Parse `src` into an expression tree.
pub fn parse<T: Real>(src: &str) -> Result<ExprAst<T>, ParseError> {
    let mut p = Parser::<T>::new(src)?;
    let ast = p.expr()?;
    if *p.peek() != Tok::Eof {
        return err(
            p.offset(),
            format!("unexpected {} after expression", p.peek().describe()),
        );
    }
    Ok(ast)
}
