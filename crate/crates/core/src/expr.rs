//! Closed-form scalar fields over `x1..xn, y1..yn`.
//!
//! Grammar (version 1), lowest to highest precedence:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" unary)?            right associative
//! atom   := number | "pi" | "x"<k> | "y"<k> | func "(" expr ")" | "(" expr ")"
//! func   := sqrt | exp | log | ln | sin | cos | tan
//! ```
//!
//! Coordinates are 1-based: `x1` is the first chart coordinate. A power with a
//! constant integer exponent is expanded by repeated multiplication, so
//! `x1^2` is valid for negative `x1`.

use std::fmt;

use crate::ad::{scalar, BasePoint, Scalar, ScalarField};
use crate::error::{Error, Result};

pub const GRAMMAR_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Chart coordinate, 0-based.
    X(usize),
    /// Fiber coordinate, 0-based.
    Y(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser::new(src);
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn c(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn sqrt(self) -> Expr {
        Expr::Call(Func::Sqrt, Box::new(self))
    }

    pub fn powf(self, p: f64) -> Expr {
        Expr::Pow(Box::new(self), Box::new(Expr::Const(p)))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// Sum of terms; an empty sum is zero.
    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        terms
            .into_iter()
            .reduce(|a, b| a + b)
            .unwrap_or(Expr::Const(0.0))
    }

    /// Largest 0-based coordinate index used, if any.
    pub fn max_coordinate(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::X(i) | Expr::Y(i) => Some(*i),
            Expr::Neg(a) | Expr::Call(_, a) => a.max_coordinate(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => match (a.max_coordinate(), b.max_coordinate()) {
                (Some(p), Some(q)) => Some(p.max(q)),
                (p, q) => p.or(q),
            },
        }
    }

    /// Whether any chart coordinate appears.
    pub fn depends_on_x(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Y(_) => false,
            Expr::X(_) => true,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on_x(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.depends_on_x() || b.depends_on_x(),
        }
    }

    /// If this expression is `sqrt(q)` (or `q^0.5`), return `q`.
    pub fn sqrt_radicand(&self) -> Option<&Expr> {
        match self {
            Expr::Call(Func::Sqrt, q) => Some(q),
            Expr::Pow(q, e) if **e == Expr::Const(0.5) => Some(q),
            _ => None,
        }
    }

    pub fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        Ok(match self {
            Expr::Const(c) => x[0].constant_like(*c),
            Expr::X(i) => x
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::Config(format!("coordinate x{} out of range", i + 1)))?,
            Expr::Y(i) => y
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::Config(format!("coordinate y{} out of range", i + 1)))?,
            Expr::Add(a, b) => a.eval(x, y)?.add(&b.eval(x, y)?),
            Expr::Sub(a, b) => a.eval(x, y)?.sub(&b.eval(x, y)?),
            Expr::Mul(a, b) => match (&**a, &**b) {
                (Expr::Const(c), e) | (e, Expr::Const(c)) => e.eval(x, y)?.scale(*c),
                _ => a.eval(x, y)?.mul(&b.eval(x, y)?),
            },
            Expr::Div(a, b) => match &**b {
                Expr::Const(c) if *c != 0.0 => a.eval(x, y)?.scale(1.0 / c),
                _ => scalar::div(&a.eval(x, y)?, &b.eval(x, y)?)?,
            },
            Expr::Neg(a) => a.eval(x, y)?.neg(),
            Expr::Pow(a, e) => match &**e {
                Expr::Const(p) => scalar::powf(&a.eval(x, y)?, *p)?,
                _ if e.max_coordinate().is_none() => scalar::powf(&a.eval(x, y)?, e.eval_f64(&[0.0], &[0.0])?)?,
                _ => {
                    let base = a.eval(x, y)?;
                    let log = scalar::ln(&base)?;
                    scalar::exp(&log.mul(&e.eval(x, y)?))?
                }
            },
            Expr::Call(f, a) => {
                let v = a.eval(x, y)?;
                match f {
                    Func::Sqrt => scalar::sqrt(&v)?,
                    Func::Exp => scalar::exp(&v)?,
                    Func::Log => scalar::ln(&v)?,
                    Func::Sin => scalar::sin(&v)?,
                    Func::Cos => scalar::cos(&v)?,
                    Func::Tan => scalar::tan(&v)?,
                }
            }
        })
    }

    pub fn eval_f64(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.eval(x, y)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $var:ident) => {
        impl std::ops::$tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$var(Box::new(self), Box::new(rhs))
            }
        }
    };
}
binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "({c:?})"),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::X(i) => write!(f, "x{}", i + 1),
            Expr::Y(i) => write!(f, "y{}", i + 1),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/({b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Pow(a, b) => write!(f, "({a})^({b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// An expression viewed as a scalar field of fixed dimension.
#[derive(Debug, Clone)]
pub struct ExprField {
    pub n: usize,
    pub expr: Expr,
}

impl ScalarField for ExprField {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        self.expr.eval(x, y)
    }

    fn in_domain(&self, p: &BasePoint) -> bool {
        self.expr.eval_f64(&p.x, &p.y).map(f64::is_finite).unwrap_or(false)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Parser<'a> {
        Parser {
            src: s.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            column: self.pos + 1,
            message: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = lhs + self.term()?;
            } else if self.eat(b'-') {
                lhs = lhs - self.term()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = lhs * self.unary()?;
            } else if self.eat(b'/') {
                lhs = lhs / self.unary()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.word(),
            Some(c) => Err(self.error(&format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if digits == self.pos {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Expr::Const).map_err(|_| Error::Parse {
            column: start + 1,
            message: format!("invalid number '{text}'"),
        })
    }

    fn word(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if word == "pi" {
            return Ok(Expr::Const(std::f64::consts::PI));
        }
        if let Some(func) = Func::from_name(word) {
            if !self.eat(b'(') {
                return Err(self.error(&format!("expected '(' after {word}")));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(Expr::call(func, arg));
        }
        let (head, digits) = word.split_at(1);
        if (head == "x" || head == "y") && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            let k: usize = digits.parse().map_err(|_| Error::Parse {
                column: start + 1,
                message: format!("bad coordinate '{word}'"),
            })?;
            if k == 0 {
                return Err(Error::Parse {
                    column: start + 1,
                    message: "coordinates are 1-based".into(),
                });
            }
            return Ok(if head == "x" { Expr::X(k - 1) } else { Expr::Y(k - 1) });
        }
        Err(Error::Parse {
            column: start + 1,
            message: format!("unknown identifier '{word}'"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: &[f64], y: &[f64]) -> f64 {
        Expr::parse(s).unwrap().eval_f64(x, y).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2*3", &[0.0], &[0.0]), 7.0);
        assert_eq!(ev("2^3^2", &[0.0], &[0.0]), 512.0);
        assert_eq!(ev("-2^2", &[0.0], &[0.0]), -4.0);
        assert_eq!(ev("(1+2)*3 - 4/2", &[0.0], &[0.0]), 7.0);
        assert_eq!(ev("1.5e1 + 2E-1", &[0.0], &[0.0]), 15.2);
    }

    #[test]
    fn coordinates_and_functions() {
        let v = ev("sqrt(y1^2 + y2^2) + 0.5*x2*y1", &[0.0, 2.0], &[3.0, 4.0]);
        assert_eq!(v, 5.0 + 3.0);
        let v = ev("exp(log(x1)) + sin(0)*cos(0) + tan(0)", &[2.5, 0.0], &[0.0, 0.0]);
        assert!((v - 2.5).abs() < 1e-15);
        assert_eq!(ev("x1^2", &[-3.0], &[0.0]), 9.0);
    }

    #[test]
    fn parse_errors_report_columns() {
        match Expr::parse("1 + foo(2)") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Expr::parse("x0").is_err());
        assert!(Expr::parse("(1 + 2").is_err());
        assert!(Expr::parse("1 2").is_err());
        assert!(Expr::parse("sqrt 2").is_err());
    }

    #[test]
    fn display_reparses_to_same_values() {
        let e = Expr::parse("(y1^4 + 0.1*y2^4)^(0.25) - x1/(2+y2) + -3").unwrap();
        let back = Expr::parse(&e.to_string()).unwrap();
        let (x, y) = ([0.3, -0.7], [1.2, 0.4]);
        assert_eq!(e.eval_f64(&x, &y).unwrap(), back.eval_f64(&x, &y).unwrap());
    }

    #[test]
    fn introspection() {
        let e = Expr::parse("sqrt(y1^2 + x3*y2^2)").unwrap();
        assert_eq!(e.max_coordinate(), Some(2));
        assert!(e.depends_on_x());
        assert!(e.sqrt_radicand().is_some());
        assert!(!Expr::parse("y1 + y2").unwrap().depends_on_x());
    }
}
