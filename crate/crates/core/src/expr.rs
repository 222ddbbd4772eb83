//! Arithmetic expressions in one variable `x`, used for the coefficient
//! functions `k`, `b`, `c` and `f`.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          // right-associative
//! primary := number | 'x' | ident '(' args ')' | '(' expr ')'
//! ```
//!
//! Unary minus binds looser than `^`, so `-x^2` is `-(x^2)`. Functions are
//! `sin cos exp log sqrt abs` (one argument) and `piecewise(x0; left; right)`,
//! which is `left` for `x < x0` and `right` for `x >= x0`. The breakpoint `x0`
//! must be a constant expression and is folded at parse time.

use std::fmt;

use thiserror::Error;

use crate::scalar::Real;

const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Piecewise {
        at: f64,
        left: Box<Expr>,
        right: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    Arity,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("cannot evaluate `{expr}` at x = {x}: {reason}")]
pub struct EvalError {
    pub expr: String,
    pub x: f64,
    pub reason: String,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let mut parser = Parser { src: src.as_bytes(), pos: 0, depth: 0 };
        let expr = parser.expr()?;
        parser.skip_ws();
        if parser.pos < parser.src.len() {
            return Err(parser.syntax("expected operator or end of input"));
        }
        Ok(expr)
    }

    pub fn constant(value: f64) -> Expr {
        Expr::Num(value)
    }

    pub fn depends_on_x(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::X => true,
            Expr::Neg(e) | Expr::Call(_, e) => e.depends_on_x(),
            Expr::Binary(_, l, r) => l.depends_on_x() || r.depends_on_x(),
            Expr::Piecewise { left, right, .. } => left.depends_on_x() || right.depends_on_x(),
        }
    }

    /// Evaluates the expression at `x`. Any non-finite intermediate value is an error.
    pub fn eval<T: Real>(&self, x: T) -> Result<T, EvalError> {
        let fail = |reason: &str| EvalError {
            expr: self.to_string(),
            x: x.to_f64().unwrap_or(f64::NAN),
            reason: reason.to_string(),
        };
        let value = match self {
            Expr::Num(v) => T::lit(*v),
            Expr::X => x,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Binary(op, l, r) => {
                let (l, r) = (l.eval(x)?, r.eval(x)?);
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == T::zero() {
                            return Err(fail("division by zero"));
                        }
                        l / r
                    }
                    BinOp::Pow => l.powf(r),
                }
            }
            Expr::Call(func, arg) => {
                let v = arg.eval(x)?;
                match func {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Log => {
                        if v <= T::zero() {
                            return Err(fail("log of a non-positive value"));
                        }
                        v.ln()
                    }
                    Func::Sqrt => {
                        if v < T::zero() {
                            return Err(fail("sqrt of a negative value"));
                        }
                        v.sqrt()
                    }
                    Func::Abs => v.abs(),
                }
            }
            Expr::Piecewise { at, left, right } => {
                if x < T::lit(*at) {
                    left.eval(x)?
                } else {
                    right.eval(x)?
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(fail("result is not finite"))
        }
    }

    /// Sorted, distinct piecewise breakpoints lying strictly inside (0, 1).
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breaks(&mut out);
        out.retain(|&b| b > 0.0 && b < 1.0);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breaks(&self, out: &mut Vec<f64>) {
        match self {
            Expr::Num(_) | Expr::X => {}
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_breaks(out),
            Expr::Binary(_, l, r) => {
                l.collect_breaks(out);
                r.collect_breaks(out);
            }
            Expr::Piecewise { at, left, right } => {
                out.push(*at);
                left.collect_breaks(out);
                right.collect_breaks(out);
            }
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::X => f.write_str("x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
            Expr::Piecewise { at, left, right } => write!(f, "piecewise({at}; {left}; {right})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn syntax(&self, message: impl Into<String>) -> ParseError {
        ParseError { kind: ParseErrorKind::Syntax, offset: self.pos, message: message.into() }
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

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        if self.eat(byte) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{}'", byte as char)))
        }
    }

    fn descend(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.syntax("expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.descend()?;
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        self.descend()?;
        let out = if self.eat(b'-') {
            Expr::Neg(Box::new(self.unary()?))
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(out)
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(_) => Err(self.syntax("expected number, 'x', function call or '('")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut mantissa = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            mantissa += digits(self);
        }
        if mantissa == 0 {
            self.pos = start;
            return Err(self.syntax("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
                return Err(self.syntax("malformed exponent"));
            }
        }
        // The slice is ASCII by construction.
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Num(v)),
            _ => {
                self.pos = start;
                Err(self.syntax(format!("number '{text}' is out of range")))
            }
        }
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if name == "x" {
            return Ok(Expr::X);
        }
        let func = Func::from_name(name);
        if func.is_none() && name != "piecewise" {
            return Err(ParseError {
                kind: ParseErrorKind::UnknownIdentifier,
                offset: start,
                message: format!("unknown identifier '{name}'"),
            });
        }
        self.expect(b'(')?;
        let mut args = vec![self.expr()?];
        let mut separators = Vec::new();
        loop {
            match self.peek() {
                Some(b';') | Some(b',') => {
                    separators.push(self.src[self.pos]);
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                _ => break,
            }
        }
        let close = self.pos;
        self.expect(b')')?;
        let arity_error = |expected: usize| ParseError {
            kind: ParseErrorKind::Arity,
            offset: start,
            message: format!("'{name}' takes {expected} argument(s), got {}", args.len()),
        };
        match func {
            Some(func) => {
                if args.len() != 1 {
                    return Err(arity_error(1));
                }
                Ok(Expr::Call(func, Box::new(args.pop().expect("one arg"))))
            }
            None => {
                if args.len() != 3 {
                    return Err(arity_error(3));
                }
                if separators.iter().any(|&s| s != b';') {
                    return Err(ParseError {
                        kind: ParseErrorKind::Syntax,
                        offset: close,
                        message: "piecewise arguments are separated by ';'".into(),
                    });
                }
                let right = args.pop().expect("three args");
                let left = args.pop().expect("three args");
                let at_expr = args.pop().expect("three args");
                let not_constant = || ParseError {
                    kind: ParseErrorKind::Syntax,
                    offset: start,
                    message: "piecewise breakpoint must be a finite constant expression".into(),
                };
                if at_expr.depends_on_x() {
                    return Err(not_constant());
                }
                let at = at_expr.eval(0.0f64).map_err(|_| not_constant())?;
                Ok(Expr::Piecewise { at, left: Box::new(left), right: Box::new(right) })
            }
        }
    }
}
