//! Closed-form expressions in the surface variables.
//!
//! Grammar, lowest to highest precedence: `+ -`, `* /`, unary `-`, `^`
//! (right associative). Functions need parentheses; there is no implicit
//! multiplication.

use std::fmt;

use thiserror::Error;

use crate::jet::{Analytic, Coord, Jet2, JetError, DEFAULT_ZERO_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    U,
    V,
    W,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::U => "u",
            Var::V => "v",
            Var::W => "w",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConst {
    Pi,
    E,
}

impl NamedConst {
    pub fn value(self) -> f64 {
        match self {
            NamedConst::Pi => std::f64::consts::PI,
            NamedConst::E => std::f64::consts::E,
        }
    }

    fn name(self) -> &'static str {
        match self {
            NamedConst::Pi => "pi",
            NamedConst::E => "e",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Const(NamedConst),
    Var(Var),
    Neg(Box<Expr>),
    Func(Analytic, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with an integer-literal exponent.
    IntPow(Box<Expr>, i32),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable {0} is not bound")]
    Unbound(&'static str),
    #[error("{source} in `{node}`")]
    Domain {
        node: String,
        #[source]
        source: JetError,
    },
}

/// A value type expressions can be evaluated over.
pub trait Scalar: Clone {
    /// Whatever a constant needs to match the other operands (jet base/order).
    type Shape: Clone;

    fn shape(&self) -> Self::Shape;
    fn constant(c: f64, shape: &Self::Shape) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, o: &Self) -> Result<Self, JetError>;
    fn powi(&self, n: i32) -> Result<Self, JetError>;
    fn apply(&self, f: Analytic) -> Result<Self, JetError>;
}

impl Scalar for f64 {
    type Shape = ();

    fn shape(&self) {}
    fn constant(c: f64, _: &()) -> f64 {
        c
    }
    fn add(&self, o: &f64) -> f64 {
        self + o
    }
    fn sub(&self, o: &f64) -> f64 {
        self - o
    }
    fn mul(&self, o: &f64) -> f64 {
        self * o
    }
    fn neg(&self) -> f64 {
        -self
    }
    fn div(&self, o: &f64) -> Result<f64, JetError> {
        // Same rule as an order-0 jet: scale is max(1, |o|).
        if o.abs() <= DEFAULT_ZERO_THRESHOLD * o.abs().max(1.0) {
            return Err(JetError::DivisionByZero { magnitude: o.abs() });
        }
        // Reciprocal then product, exactly as the jet quotient rounds.
        Ok(self * (1.0 / o))
    }
    fn powi(&self, n: i32) -> Result<f64, JetError> {
        if n < 0 {
            return Scalar::powi(&Scalar::div(&1.0, self)?, -n);
        }
        // Square-and-multiply in the same order as `Jet2::powi`.
        let mut result = 1.0;
        let mut base = *self;
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result *= base;
            }
            e >>= 1;
            if e > 0 {
                base *= base;
            }
        }
        Ok(result)
    }
    fn apply(&self, f: Analytic) -> Result<f64, JetError> {
        f.eval_f64(*self, DEFAULT_ZERO_THRESHOLD * self.abs().max(1.0))
    }
}

impl Scalar for Jet2 {
    type Shape = ((f64, f64), usize);

    fn shape(&self) -> Self::Shape {
        (self.base(), self.order())
    }
    fn constant(c: f64, shape: &Self::Shape) -> Jet2 {
        Jet2::constant(c, shape.0, shape.1)
    }
    fn add(&self, o: &Jet2) -> Jet2 {
        self + o
    }
    fn sub(&self, o: &Jet2) -> Jet2 {
        self - o
    }
    fn mul(&self, o: &Jet2) -> Jet2 {
        self * o
    }
    fn neg(&self) -> Jet2 {
        -self
    }
    fn div(&self, o: &Jet2) -> Result<Jet2, JetError> {
        Jet2::div(self, o)
    }
    fn powi(&self, n: i32) -> Result<Jet2, JetError> {
        Jet2::powi(self, n)
    }
    fn apply(&self, f: Analytic) -> Result<Jet2, JetError> {
        Jet2::apply(self, f)
    }
}

/// Variable values plus the shape used for literal constants.
#[derive(Debug, Clone)]
pub struct Bindings<T: Scalar> {
    shape: T::Shape,
    values: [Option<T>; 3],
}

impl<T: Scalar> Bindings<T> {
    pub fn new(shape: T::Shape) -> Self {
        Self {
            shape,
            values: [None, None, None],
        }
    }

    pub fn with(mut self, var: Var, value: T) -> Self {
        self.values[var.index()] = Some(value);
        self
    }

    pub fn get(&self, var: Var) -> Option<&T> {
        self.values[var.index()].as_ref()
    }
}

impl Bindings<f64> {
    pub fn uv(u: f64, v: f64) -> Self {
        Self::new(()).with(Var::U, u).with(Var::V, v)
    }
}

impl Bindings<Jet2> {
    /// `u` and `v` lifted at `base`.
    pub fn jets(base: (f64, f64), order: usize) -> Self {
        Self::new((base, order))
            .with(Var::U, Jet2::lift(Coord::U, base, order))
            .with(Var::V, Jet2::lift(Coord::V, base, order))
    }
}

impl Expr {
    pub fn eval<T: Scalar>(&self, b: &Bindings<T>) -> Result<T, EvalError> {
        let domain = |e: JetError| EvalError::Domain {
            node: self.to_string(),
            source: e,
        };
        Ok(match self {
            Expr::Num(x) => T::constant(*x, &b.shape),
            Expr::Const(c) => T::constant(c.value(), &b.shape),
            Expr::Var(v) => b.get(*v).cloned().ok_or(EvalError::Unbound(v.name()))?,
            Expr::Neg(a) => a.eval(b)?.neg(),
            Expr::Func(f, a) => a.eval(b)?.apply(*f).map_err(domain)?,
            Expr::Add(l, r) => l.eval(b)?.add(&r.eval(b)?),
            Expr::Sub(l, r) => l.eval(b)?.sub(&r.eval(b)?),
            Expr::Mul(l, r) => l.eval(b)?.mul(&r.eval(b)?),
            Expr::Div(l, r) => l.eval(b)?.div(&r.eval(b)?).map_err(domain)?,
            Expr::IntPow(a, n) => a.eval(b)?.powi(*n).map_err(domain)?,
        })
    }

    /// Plain floating point evaluation at `(u, v)`.
    pub fn eval_f64(&self, u: f64, v: f64) -> Result<f64, EvalError> {
        self.eval(&Bindings::uv(u, v))
    }

    /// Jet of the expression at `base`.
    pub fn eval_jet(&self, base: (f64, f64), order: usize) -> Result<Jet2, EvalError> {
        self.eval(&Bindings::jets(base, order))
    }

    /// Variables referenced anywhere in the tree.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Var(v) = e {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
        });
        out.sort();
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Num(_) | Expr::Const(_) | Expr::Var(_) => {}
            Expr::Neg(a) | Expr::Func(_, a) | Expr::IntPow(a, _) => a.visit(f),
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::IntPow(..) => 4,
            Expr::Num(x) if *x < 0.0 || x.is_sign_negative() => 3,
            _ => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Const(c) => f.write_str(c.name()),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 3)
            }
            Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Add(l, r) => {
                write_operand(f, l, 1)?;
                f.write_str(" + ")?;
                write_operand(f, r, 2)
            }
            Expr::Sub(l, r) => {
                write_operand(f, l, 1)?;
                f.write_str(" - ")?;
                write_operand(f, r, 2)
            }
            Expr::Mul(l, r) => {
                write_operand(f, l, 2)?;
                f.write_str("*")?;
                write_operand(f, r, 3)
            }
            Expr::Div(l, r) => {
                write_operand(f, l, 2)?;
                f.write_str("/")?;
                write_operand(f, r, 3)
            }
            Expr::IntPow(a, n) => {
                write_operand(f, a, 5)?;
                write!(f, "^{n}")
            }
        }
    }
}

/// Parses `text`, accepting only the surface variables `u` and `v`.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    parse_with_vars(text, &[Var::U, Var::V])
}

/// Parses `text` with an explicit variable whitelist.
pub fn parse_with_vars(text: &str, vars: &[Var]) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        vars,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error(format!("unexpected `{}`", p.peek_char().unwrap_or(' '))));
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expression(s)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    vars: &'a [Var],
}

impl Parser<'_> {
    fn error(&self, message: String) -> ParseError {
        ParseError {
            offset: self.pos,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_char()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(match self.peek_char() {
                Some(found) => format!("expected `{c}`, found `{found}`"),
                None => format!("expected `{c}`, found end of input"),
            }))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        // The exponent may carry its own unary minus: u^-2.
        let exponent = if self.eat('-') {
            Expr::Neg(Box::new(self.power()?))
        } else {
            self.power()?
        };
        Ok(match integer_literal(&exponent) {
            Some(n) => Expr::IntPow(Box::new(base), n),
            None => Expr::Func(
                Analytic::Exp,
                Box::new(Expr::Mul(
                    Box::new(exponent),
                    Box::new(Expr::Func(Analytic::Log, Box::new(base))),
                )),
            ),
        })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.identifier(),
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &self.src[start..end];
        let value: f64 = text
            .parse()
            .map_err(|_| self.error(format!("malformed number `{text}`")))?;
        self.pos = end;
        Ok(Expr::Num(value))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        let name = &rest[..len];
        if let Some(func) = Analytic::from_name(name) {
            self.pos += len;
            if self.peek() != Some('(') {
                return Err(self.error(format!("function {name} needs parenthesized argument")));
            }
            self.pos += 1;
            let arg = self.expr()?;
            self.expect(')')?;
            return Ok(Expr::Func(func, Box::new(arg)));
        }
        let known = match name {
            "pi" => Some(Expr::Const(NamedConst::Pi)),
            "e" => Some(Expr::Const(NamedConst::E)),
            "u" | "v" | "w" => {
                let var = match name {
                    "u" => Var::U,
                    "v" => Var::V,
                    _ => Var::W,
                };
                self.vars.contains(&var).then_some(Expr::Var(var))
            }
            _ => None,
        };
        match known {
            Some(e) => {
                self.pos += len;
                Ok(e)
            }
            None => Err(self.error(format!("unknown identifier {name}"))),
        }
    }
}

fn integer_literal(e: &Expr) -> Option<i32> {
    let as_int = |x: f64| (x.fract() == 0.0 && x.abs() <= 1e6).then_some(x as i32);
    match e {
        Expr::Num(x) => as_int(*x),
        Expr::Neg(inner) => match inner.as_ref() {
            Expr::Num(x) => as_int(*x).map(|n| -n),
            _ => None,
        },
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn grammar_examples() {
        use Expr::{Add, Div, IntPow, Neg, Num};
        let var = |x| Box::new(Expr::Var(x));
        assert_eq!(
            p("u^2 + v^2/2"),
            Add(
                Box::new(IntPow(var(Var::U), 2)),
                Box::new(Div(Box::new(IntPow(var(Var::V), 2)), Box::new(Num(2.0))))
            )
        );
        assert_eq!(p("-u^2"), Neg(Box::new(IntPow(var(Var::U), 2))));
        assert_eq!(p("u^-2"), IntPow(var(Var::U), -2));
        assert!((p("2^3^2").eval_f64(0.0, 0.0).unwrap() - 512.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_identifier_is_rejected() {
        let err = parse_expression("-cosh(w)*sin(v)").unwrap_err();
        assert_eq!(err.message, "unknown identifier w");
        assert_eq!(err.offset, 6);
        assert!(parse_with_vars("cosh(w)", &[Var::W]).is_ok());
        assert!(parse_expression("uv").is_err());
        assert!(parse_expression("sin u").is_err());
        assert!(parse_expression("u +").is_err());
        assert!(parse_expression("(u").is_err());
    }

    #[test]
    fn evaluation() {
        assert_eq!(p("u^2 + v^2/2").eval_f64(1.0, 2.0).unwrap(), 3.0);
        let err = p("sqrt(u)").eval_f64(-1.0, 0.0).unwrap_err();
        assert!(matches!(err, EvalError::Domain { ref node, .. } if node == "sqrt(u)"));
        let z = p("u*v^2 + v^5/5").eval_f64(0.3, 0.2).unwrap();
        assert!((z - (0.3 * 0.04 + 0.00032 / 5.0)).abs() < 1e-16);
        assert!((z - 0.012064).abs() < 1e-15);
        assert!((p("(-2)^3").eval_f64(0.0, 0.0).unwrap() + 8.0).abs() < 1e-15);
        assert!((p("u^0.5").eval_f64(4.0, 0.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn printing_respects_precedence() {
        for s in [
            "u^2 + v^2/2",
            "-u^2",
            "-(u*v)",
            "(u + v)^3",
            "u - (v - 1)",
            "u/(v*2)",
            "-cosh(log(u))*sin(v)",
            "u^-2",
            "(-u)^2",
            "exp(0.5*log(u))",
        ] {
            let e = p(s);
            assert_eq!(e.to_string(), s);
            assert_eq!(p(&e.to_string()), e);
        }
    }

    #[test]
    fn jets_and_floats_agree_at_order_zero() {
        let e = p("cosh(log(u))*sin(v) - atan(u*v)/(1 + v^2)");
        let x = e.eval_f64(1.3, 0.4).unwrap();
        let j = e.eval_jet((1.3, 0.4), 0).unwrap();
        assert_eq!(x, j.value());
    }
}
