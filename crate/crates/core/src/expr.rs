//! A tiny closed-form expression language for framing entries.
//!
//! Grammar (whitespace-insensitive, ASCII):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          // right-associative
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x1^2` is `-(x1^2)`; a signed
//! exponent like `2^-3` parses because the exponent position accepts a
//! unary. Identifiers are coordinates `x1`, `x2`, ... up to the declared
//! chart dimension, or one of the registered function names.
//!
//! Integer exponents with magnitude at most 15 are compiled to repeated
//! multiplication; anything else goes through exp/log and needs a positive
//! base.

use crate::error::{Error, Result};
use crate::jet::{ElemFunc, Scalar};

const MAX_INT_EXPONENT: i32 = 15;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// 0-based coordinate index.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer power, |exponent| <= 15, evaluated by repeated multiplication.
    PowInt(Box<Expr>, i32),
    /// General power, evaluated via exp/log.
    Pow(Box<Expr>, Box<Expr>),
    Call(ElemFunc, Box<Expr>),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax_error(&format!("`{}`", c as char)))
        }
    }

    fn syntax_error(&self, expected: &str) -> Error {
        Error::SyntaxError { position: self.pos, expected: expected.to_string() }
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.parse_unary()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.parse_unary()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.parse_unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let expo = self.parse_unary()?;
            return Ok(make_pow(base, expo));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.parse_expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.parse_number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.parse_ident(),
            _ => Err(self.syntax_error("a number, identifier, or `(`")),
        }
    }

    fn parse_number(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // Not an exponent after all (e.g. "2e" starting an identifier
                // would be malformed anyway); back off.
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| Error::SyntaxError { position: start, expected: "a number".to_string() })
    }

    fn parse_ident(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");

        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|c| c.is_ascii_digit()) {
                let index: usize = rest
                    .parse()
                    .map_err(|_| Error::VariableOutOfRange { name: name.to_string(), dim: self.dim })?;
                if index == 0 || index > self.dim {
                    return Err(Error::VariableOutOfRange { name: name.to_string(), dim: self.dim });
                }
                return Ok(Expr::Var(index - 1));
            }
        }

        if let Some(func) = ElemFunc::from_name(name) {
            self.expect(b'(')?;
            let arg = self.parse_expr()?;
            if self.peek() == Some(b',') {
                return Err(Error::ArityError(name.to_string()));
            }
            self.expect(b')')?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }

        Err(Error::UnknownIdentifier(name.to_string()))
    }
}

/// Fold variable-free integer exponents into the repeated-multiplication
/// form, so powers like `x1^2` or `2^3^2` evaluate exactly.
fn make_pow(base: Expr, expo: Expr) -> Expr {
    let mut vars = Vec::new();
    variables(&expo, &mut vars);
    if vars.is_empty() {
        if let Ok(v) = evaluate(&expo, &[0.0f64]) {
            if v.fract() == 0.0 && v.abs() <= MAX_INT_EXPONENT as f64 {
                return Expr::PowInt(Box::new(base), v as i32);
            }
        }
    }
    Expr::Pow(Box::new(base), Box::new(expo))
}

/// Parse `source` against a chart of dimension `dim`.
pub fn parse(source: &str, dim: usize) -> Result<Expr> {
    if dim == 0 {
        return Err(Error::InvalidInput("chart dimension must be at least 1".into()));
    }
    if !source.is_ascii() {
        return Err(Error::SyntaxError { position: 0, expected: "ASCII input".to_string() });
    }
    let mut p = Parser { src: source.as_bytes(), pos: 0, dim };
    let e = p.parse_expr()?;
    if p.peek().is_some() {
        return Err(p.syntax_error("end of input"));
    }
    Ok(e)
}

/// Evaluate over any scalar; the single code path guarantees the jet value
/// part agrees bit-for-bit with plain real evaluation.
pub fn evaluate<S: Scalar>(e: &Expr, point: &[S]) -> Result<S> {
    if point.is_empty() {
        return Err(Error::InvalidInput("evaluation point must not be empty".into()));
    }
    eval_inner(e, point)
}

fn eval_inner<S: Scalar>(e: &Expr, point: &[S]) -> Result<S> {
    match e {
        Expr::Num(v) => Ok(point[0].constant_like(*v)),
        Expr::Var(k) => Ok(point[*k].clone()),
        Expr::Neg(a) => Ok(eval_inner(a, point)?.neg()),
        Expr::Add(a, b) => Ok(eval_inner(a, point)?.add(&eval_inner(b, point)?)),
        Expr::Sub(a, b) => Ok(eval_inner(a, point)?.sub(&eval_inner(b, point)?)),
        Expr::Mul(a, b) => Ok(eval_inner(a, point)?.mul(&eval_inner(b, point)?)),
        Expr::Div(a, b) => eval_inner(a, point)?.div(&eval_inner(b, point)?),
        Expr::PowInt(a, n) => eval_inner(a, point)?.powi(*n),
        Expr::Pow(a, b) => eval_inner(a, point)?.pow(&eval_inner(b, point)?),
        Expr::Call(f, a) => eval_inner(a, point)?.apply(*f),
    }
}

/// The set of 0-based variable indices referenced by an expression.
pub fn variables(e: &Expr, out: &mut Vec<usize>) {
    match e {
        Expr::Num(_) => {}
        Expr::Var(k) => {
            if !out.contains(k) {
                out.push(*k);
            }
        }
        Expr::Neg(a) | Expr::PowInt(a, _) | Expr::Call(_, a) => variables(a, out),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
            variables(a, out);
            variables(b, out);
        }
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::PowInt(..) | Expr::Pow(..) => 4,
        Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
    }
}

/// Render an expression in the surface syntax with minimal parentheses.
pub fn pretty(e: &Expr) -> String {
    fn wrap(e: &Expr, min_prec: u8, out: &mut String) {
        if precedence(e) < min_prec {
            out.push('(');
            emit(e, out);
            out.push(')');
        } else {
            emit(e, out);
        }
    }

    fn emit(e: &Expr, out: &mut String) {
        match e {
            Expr::Num(v) => out.push_str(&format!("{v}")),
            Expr::Var(k) => out.push_str(&format!("x{}", k + 1)),
            Expr::Neg(a) => {
                out.push('-');
                wrap(a, 3, out);
            }
            Expr::Add(a, b) => {
                wrap(a, 1, out);
                out.push('+');
                wrap(b, 2, out);
            }
            Expr::Sub(a, b) => {
                wrap(a, 1, out);
                out.push('-');
                wrap(b, 2, out);
            }
            Expr::Mul(a, b) => {
                wrap(a, 2, out);
                out.push('*');
                wrap(b, 3, out);
            }
            Expr::Div(a, b) => {
                wrap(a, 2, out);
                out.push('/');
                wrap(b, 3, out);
            }
            Expr::PowInt(a, n) => {
                wrap(a, 5, out);
                out.push('^');
                out.push_str(&format!("{n}"));
            }
            Expr::Pow(a, b) => {
                wrap(a, 5, out);
                out.push('^');
                wrap(b, 3, out);
            }
            Expr::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                emit(a, out);
                out.push(')');
            }
        }
    }

    let mut s = String::new();
    emit(e, &mut s);
    s
}
