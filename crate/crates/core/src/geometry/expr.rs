//! Expression language for metric and vector-field components.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := number | 'x' digits | func '(' expr ')' | '(' expr ')'
//! func    := 'sin' | 'cos' | 'exp'
//! number  := digits ('.' digits)?
//! ```

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Signed;

use crate::error::ParseError;
use crate::jet::{format_rational, parse_rational, Coeff, Jet, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    /// Zero-based coordinate index (`x1` is 0).
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Parse a single expression over `x1..xn`. Offsets in errors are
    /// relative to `src`.
    pub fn parse(src: &str, n: usize) -> Result<Expr, ParseError> {
        let mut p = Parser { src, pos: 0, n };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Taylor expansion at the origin, as a jet in `space` (whose variables
    /// are `x1..xn`).
    pub fn taylor<C: Coeff>(&self, space: &Arc<Space>) -> Result<Jet<C>, ParseError> {
        Ok(match self {
            Expr::Num(r) => Jet::constant(space, C::from_rational(r)),
            Expr::Var(i) => Jet::var(space, *i),
            Expr::Neg(a) => -a.taylor::<C>(space)?,
            Expr::Add(a, b) => a.taylor::<C>(space)?.checked_add(&b.taylor(space)?)?,
            Expr::Sub(a, b) => a.taylor::<C>(space)?.checked_sub(&b.taylor(space)?)?,
            Expr::Mul(a, b) => a.taylor::<C>(space)?.checked_mul(&b.taylor(space)?)?,
            Expr::Div(a, b) => {
                let den = b.taylor::<C>(space)?.reciprocal()?;
                a.taylor::<C>(space)?.checked_mul(&den)?
            }
            Expr::Call(f, a) => {
                let arg = a.taylor::<C>(space)?;
                match f {
                    Func::Sin => arg.sin()?,
                    Func::Cos => arg.cos()?,
                    Func::Exp => arg.exp()?,
                }
            }
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) if r.is_negative() => write!(f, "(-{})", format_rational(&-r)),
            Expr::Num(r) if !r.is_integer() => write!(f, "({})", format_rational(r)),
            Expr::Num(r) => write!(f, "{}", format_rational(r)),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    n: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
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
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let rest = &self.src[self.pos..];
                let mut len = rest.bytes().take_while(u8::is_ascii_digit).count();
                if rest[len..].starts_with('.') {
                    let frac = rest[len + 1..]
                        .bytes()
                        .take_while(u8::is_ascii_digit)
                        .count();
                    if frac == 0 {
                        self.pos += len + 1;
                        return Err(self.error("expected digits after `.`"));
                    }
                    len += 1 + frac;
                }
                let lit = &rest[..len];
                self.pos += len;
                parse_rational(lit)
                    .map(Expr::Num)
                    .ok_or(ParseError::Syntax {
                        offset: start,
                        message: format!("bad number `{lit}`"),
                    })
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let rest = &self.src[self.pos..];
                let len = rest.bytes().take_while(u8::is_ascii_alphanumeric).count();
                let word = &rest[..len];
                self.pos += len;
                if let Some(digits) = word.strip_prefix('x') {
                    let idx: usize = digits.parse().map_err(|_| ParseError::Syntax {
                        offset: start,
                        message: format!("unknown identifier `{word}`"),
                    })?;
                    if idx == 0 || idx > self.n {
                        return Err(ParseError::Syntax {
                            offset: start,
                            message: format!("variable `{word}` outside x1..x{}", self.n),
                        });
                    }
                    return Ok(Expr::Var(idx - 1));
                }
                let func = match word {
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    _ => {
                        return Err(ParseError::Syntax {
                            offset: start,
                            message: format!("unknown identifier `{word}`"),
                        })
                    }
                };
                if !self.eat('(') {
                    return Err(self.error(&format!("expected `(` after `{word}`")));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(c) => Err(self.error(&format!("unexpected character `{c}`"))),
        }
    }
}

/// One `name = expr` statement of a definition block.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub name: String,
    pub expr: Expr,
    /// Byte offset of the name in the source.
    pub offset: usize,
}

/// Parse statements `name = expr` separated by `;` or newlines.
pub fn parse_assignments(src: &str, n: usize) -> Result<Vec<Assignment>, ParseError> {
    let mut out = Vec::new();
    let mut start = 0;
    for piece in src.split([';', '\n']) {
        let offset = start;
        start += piece.len() + 1;
        if piece.trim().is_empty() {
            continue;
        }
        let lead = piece.len() - piece.trim_start().len();
        let (name, rhs) = piece.split_once('=').ok_or(ParseError::Syntax {
            offset: offset + lead,
            message: "expected `name = expression`".into(),
        })?;
        let name = name.trim();
        if name.is_empty() || !name.bytes().all(|b| b.is_ascii_alphanumeric()) {
            return Err(ParseError::Syntax {
                offset: offset + lead,
                message: format!("bad name `{name}`"),
            });
        }
        let rhs_offset = offset + piece.find('=').unwrap_or(0) + 1;
        let expr = Expr::parse(rhs, n).map_err(|e| match e {
            ParseError::Syntax { offset, message } => ParseError::Syntax {
                offset: rhs_offset + offset,
                message,
            },
            other => other,
        })?;
        out.push(Assignment {
            name: name.to_string(),
            expr,
            offset: offset + lead,
        });
    }
    Ok(out)
}
