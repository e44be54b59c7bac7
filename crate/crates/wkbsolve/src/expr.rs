//! Coefficient-function expressions: parsing, printing, and evaluation.
//!
//! The grammar is deliberately small — decimal constants, the variable `x`,
//! `+ - * /`, `^` with a literal integer exponent, parentheses, and the
//! functions `sqrt exp ln sin cos`. Everything expressible in it is analytic
//! wherever it is defined, which is exactly the class of coefficients the
//! solver supports. Precedence: `^` binds tightest, then unary minus, then
//! `* /`, then `+ -`; equal precedence associates left.
//!
//! Pretty-printing inserts the minimal parentheses needed so that re-parsing
//! reproduces the tree structurally (round-trip identity).

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::{fmt_real, Precision, Scalar};
use rug::{Assign, Float};
use std::fmt;

/// Built-in analytic functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

/// Expression AST. Constants keep their source text so evaluation can parse
/// them at full context precision instead of a fixed intermediate one.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Decimal literal, stored verbatim.
    Number(String),
    /// The independent variable `x`.
    Var,
    /// Unary negation.
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer power (exponent may be negative).
    Pow(Box<Expr>, i64),
    /// Function application.
    Call(Func, Box<Expr>),
}

// ---------------------------------------------------------------------------
// Lexing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token plus its starting byte position.
    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::End, start));
        }
        let b = self.src[self.pos];
        let single = match b {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            return Ok((tok, start));
        }
        if b.is_ascii_digit() {
            return Ok((self.lex_number()?, start));
        }
        if b.is_ascii_alphabetic() {
            let mut end = self.pos;
            while end < self.src.len() && self.src[end].is_ascii_alphabetic() {
                end += 1;
            }
            let word = std::str::from_utf8(&self.src[self.pos..end])
                .expect("ascii-alphabetic bytes are valid UTF-8")
                .to_owned();
            self.pos = end;
            return Ok((Tok::Ident(word), start));
        }
        Err(Error::Parse {
            pos: start,
            msg: format!("unexpected character `{}`", char::from(b)),
        })
    }

    /// digits [ '.' digits ] [ ('e'|'E') ['+'|'-'] digits ]
    fn lex_number(&mut self) -> Result<Tok> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let frac_start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == frac_start {
                return Err(Error::Parse {
                    pos: self.pos,
                    msg: "expected digits after decimal point".to_owned(),
                });
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            let exp_start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == exp_start {
                return Err(Error::Parse {
                    pos: self.pos,
                    msg: "expected digits in exponent".to_owned(),
                });
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos])
            .expect("numeric bytes are valid UTF-8")
            .to_owned();
        Ok(Tok::Num(text))
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self> {
        let mut lexer = Lexer::new(src);
        let (tok, tok_pos) = lexer.next()?;
        Ok(Parser {
            lexer,
            tok,
            tok_pos,
        })
    }

    fn advance(&mut self) -> Result<()> {
        let (tok, pos) = self.lexer.next()?;
        self.tok = tok;
        self.tok_pos = pos;
        Ok(())
    }

    /// expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => break,
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = if op {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    /// term := factor (('*'|'/') factor)*
    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.tok {
                Tok::Star => true,
                Tok::Slash => false,
                _ => break,
            };
            self.advance()?;
            let rhs = self.factor()?;
            lhs = if op {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    /// factor := '-' factor | power
    fn factor(&mut self) -> Result<Expr> {
        if self.tok == Tok::Minus {
            self.advance()?;
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    /// power := atom ('^' int_literal)*
    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.tok == Tok::Caret {
            self.advance()?;
            let exponent = self.int_exponent()?;
            base = Expr::Pow(Box::new(base), exponent);
        }
        Ok(base)
    }

    /// ['-'|'+'] digits — the exponent of '^' must be an integer literal.
    fn int_exponent(&mut self) -> Result<i64> {
        let mut negative = false;
        match self.tok {
            Tok::Minus => {
                negative = true;
                self.advance()?;
            }
            Tok::Plus => {
                self.advance()?;
            }
            _ => {}
        }
        let pos = self.tok_pos;
        let text = match &self.tok {
            Tok::Num(text) => text.clone(),
            _ => {
                return Err(Error::Parse {
                    pos,
                    msg: "exponent of ^ must be an integer literal".to_owned(),
                })
            }
        };
        if !text.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse {
                pos,
                msg: format!("exponent of ^ must be an integer literal (got `{text}`)"),
            });
        }
        let magnitude: i64 = text.parse().map_err(|_| Error::Parse {
            pos,
            msg: format!("integer exponent `{text}` out of range"),
        })?;
        self.advance()?;
        Ok(if negative { -magnitude } else { magnitude })
    }

    /// atom := number | 'x' | func '(' expr ')' | '(' expr ')'
    fn atom(&mut self) -> Result<Expr> {
        let pos = self.tok_pos;
        match self.tok.clone() {
            Tok::Num(text) => {
                self.advance()?;
                Ok(Expr::Number(text))
            }
            Tok::Ident(word) => {
                self.advance()?;
                if word == "x" {
                    return Ok(Expr::Var);
                }
                let func = match word.as_str() {
                    "sqrt" => Func::Sqrt,
                    "exp" => Func::Exp,
                    "ln" => Func::Ln,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    _ => {
                        return Err(Error::Parse {
                            pos,
                            msg: format!("unknown identifier `{word}`"),
                        })
                    }
                };
                self.expect(Tok::LParen, "(")?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, ")")?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, ")")?;
                Ok(inner)
            }
            Tok::End => Err(Error::Parse {
                pos,
                msg: "unexpected end of input".to_owned(),
            }),
            other => Err(Error::Parse {
                pos,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn expect(&mut self, tok: Tok, display: &str) -> Result<()> {
        if self.tok == tok {
            self.advance()
        } else {
            Err(Error::Parse {
                pos: self.tok_pos,
                msg: format!("expected `{display}`"),
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

/// Binding strength used by the printer; larger binds tighter.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Number(..) | Expr::Var | Expr::Call(..) => 5,
    }
}

impl Expr {
    fn fmt_child(f: &mut fmt::Formatter<'_>, child: &Expr, min_level: u8) -> fmt::Result {
        if level(child) < min_level {
            write!(f, "(")?;
            fmt::Display::fmt(child, f)?;
            write!(f, ")")
        } else {
            fmt::Display::fmt(child, f)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(text) => write!(f, "{text}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(inner) => {
                write!(f, "-")?;
                Expr::fmt_child(f, inner, 3)
            }
            Expr::Add(a, b) => {
                Expr::fmt_child(f, a, 1)?;
                write!(f, "+")?;
                // Right operand needs parens at equal level to keep
                // left associativity on re-parse.
                Expr::fmt_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                Expr::fmt_child(f, a, 1)?;
                write!(f, "-")?;
                Expr::fmt_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                Expr::fmt_child(f, a, 2)?;
                write!(f, "*")?;
                Expr::fmt_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                Expr::fmt_child(f, a, 2)?;
                write!(f, "/")?;
                Expr::fmt_child(f, b, 3)
            }
            Expr::Pow(base, exponent) => {
                Expr::fmt_child(f, base, 5)?;
                write!(f, "^{exponent}")
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

impl Expr {
    /// Parses source text into an AST.
    pub fn parse(source: &str) -> Result<Expr> {
        let mut parser = Parser::new(source)?;
        let expr = parser.expr()?;
        if parser.tok != Tok::End {
            return Err(Error::Parse {
                pos: parser.tok_pos,
                msg: format!("unexpected trailing token {:?}", parser.tok),
            });
        }
        Ok(expr)
    }

    fn domain_error(&self, x: &Float, prec: Precision, detail: impl Into<String>) -> Error {
        Error::ExprDomain {
            subexpr: self.to_string(),
            x: fmt_real(x, prec.digits()),
            detail: detail.into(),
        }
    }

    /// Plain scalar evaluation at a real point. Domain rules match the jet
    /// path exactly (shared underflow threshold), so order-0 jets and scalar
    /// evaluation agree on both values and errors.
    pub fn eval_scalar(&self, x: &Float, prec: Precision) -> Result<Scalar> {
        let tiny = prec.underflow_threshold();
        match self {
            Expr::Number(text) => Scalar::from_decimal(text, "0", prec),
            Expr::Var => Ok(Scalar::from_real(Float::with_val(prec.bits(), x))),
            Expr::Neg(inner) => Ok(-&inner.eval_scalar(x, prec)?),
            Expr::Add(a, b) => Ok(&a.eval_scalar(x, prec)? + &b.eval_scalar(x, prec)?),
            Expr::Sub(a, b) => Ok(&a.eval_scalar(x, prec)? - &b.eval_scalar(x, prec)?),
            Expr::Mul(a, b) => Ok(&a.eval_scalar(x, prec)? * &b.eval_scalar(x, prec)?),
            Expr::Div(a, b) => {
                let num = a.eval_scalar(x, prec)?;
                let den = b.eval_scalar(x, prec)?;
                if den.abs() < tiny {
                    return Err(self.domain_error(x, prec, "division by (near-)zero"));
                }
                Ok(&num / &den)
            }
            Expr::Pow(base, exponent) => {
                let v = base.eval_scalar(x, prec)?;
                if *exponent < 0 && v.abs() < tiny {
                    return Err(self.domain_error(x, prec, "negative power of (near-)zero"));
                }
                Ok(v.powi(*exponent))
            }
            Expr::Call(func, arg) => {
                let v = arg.eval_scalar(x, prec)?;
                match func {
                    Func::Sqrt | Func::Ln => {
                        let on_cut =
                            v.im().is_zero() && v.re().is_sign_negative() && !v.re().is_zero();
                        if on_cut || v.abs() < tiny {
                            return Err(self.domain_error(
                                x,
                                prec,
                                "argument on the principal branch cut",
                            ));
                        }
                        Ok(if *func == Func::Sqrt { v.sqrt() } else { v.ln() })
                    }
                    Func::Exp => Ok(v.exp()),
                    Func::Sin => Ok(v.sin()),
                    Func::Cos => Ok(v.cos()),
                }
            }
        }
    }

    /// Jet evaluation: the Taylor expansion of the expression at x0 to the
    /// given order, computed by structural recursion over jet arithmetic.
    pub fn eval_jet(&self, x0: &Float, order: usize, prec: Precision) -> Result<Jet> {
        let x0p = Float::with_val(prec.bits(), x0);
        self.eval_jet_at(&x0p, order, prec)
    }

    fn eval_jet_at(&self, x0: &Float, order: usize, prec: Precision) -> Result<Jet> {
        let lift = |e: &Error| -> Option<Error> {
            match e {
                Error::JetDivisionByZero { magnitude } => Some(self.domain_error(
                    x0,
                    prec,
                    format!("division by (near-)zero (|c0| = {magnitude})"),
                )),
                Error::JetBranchCut { value } => {
                    Some(self.domain_error(x0, prec, format!("{value} on the principal branch cut")))
                }
                _ => None,
            }
        };
        let wrap = |r: Result<Jet>| -> Result<Jet> {
            r.map_err(|e| lift(&e).unwrap_or(e))
        };
        match self {
            Expr::Number(text) => Ok(Jet::constant(
                Scalar::from_decimal(text, "0", prec)?,
                x0,
                order,
            )),
            Expr::Var => Ok(Jet::identity(x0, order)),
            Expr::Neg(inner) => Ok(inner.eval_jet_at(x0, order, prec)?.neg()),
            Expr::Add(a, b) => a
                .eval_jet_at(x0, order, prec)?
                .add(&b.eval_jet_at(x0, order, prec)?),
            Expr::Sub(a, b) => a
                .eval_jet_at(x0, order, prec)?
                .sub(&b.eval_jet_at(x0, order, prec)?),
            Expr::Mul(a, b) => a
                .eval_jet_at(x0, order, prec)?
                .mul(&b.eval_jet_at(x0, order, prec)?),
            Expr::Div(a, b) => wrap(
                a.eval_jet_at(x0, order, prec)?
                    .div(&b.eval_jet_at(x0, order, prec)?),
            ),
            Expr::Pow(base, exponent) => wrap(base.eval_jet_at(x0, order, prec)?.powi(*exponent)),
            Expr::Call(func, arg) => {
                let u = arg.eval_jet_at(x0, order, prec)?;
                match func {
                    Func::Sqrt => wrap(u.sqrt()),
                    Func::Ln => wrap(u.ln()),
                    Func::Exp => Ok(u.exp()),
                    Func::Sin => Ok(u.sin_cos().0),
                    Func::Cos => Ok(u.sin_cos().1),
                }
            }
        }
    }

    /// Samples the expression on a dense Chebyshev-distributed grid and
    /// returns the minimum value, rejecting nonpositive samples.
    ///
    /// This is a heuristic guard, not a proof of positivity: it certifies
    /// only the sampled nodes.
    pub fn validate_positivity(
        &self,
        lo: &Float,
        hi: &Float,
        grid_size: usize,
        prec: Precision,
    ) -> Result<Float> {
        if !(hi > lo) {
            return Err(Error::BadInterval {
                lo: fmt_real(lo, prec.digits()),
                hi: fmt_real(hi, prec.digits()),
            });
        }
        if grid_size < 2 {
            return Err(Error::Unsupported {
                detail: "positivity grid needs at least 2 nodes".to_owned(),
            });
        }
        let bits = prec.bits();
        let mid = Float::with_val(bits, lo + hi) / 2u32;
        let half = Float::with_val(bits, hi - lo) / 2u32;
        let pi = prec.pi();
        let degree = grid_size - 1;
        let mut min: Option<Float> = None;
        for k in 0..=degree {
            let theta = Float::with_val(bits, &pi * (k as u32)) / (degree as u32);
            let mut x = theta.cos();
            x *= &half;
            x += &mid;
            let v = self.eval_scalar(&x, prec)?;
            if !v.im().is_zero() {
                return Err(self.domain_error(&x, prec, "coefficient function must be real-valued"));
            }
            if !(*v.re() > 0) {
                return Err(Error::NonpositiveCoefficient {
                    x: fmt_real(&x, prec.digits()),
                    value: fmt_real(v.re(), prec.digits()),
                });
            }
            match &mut min {
                None => min = Some(v.re().clone()),
                Some(m) => {
                    if v.re() < &*m {
                        m.assign(v.re());
                    }
                }
            }
        }
        Ok(min.expect("grid has at least two nodes"))
    }
}
