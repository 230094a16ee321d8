//! Recursive-descent parser for polynomial input.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := power (['*'] power)*          juxtaposition multiplies: 2i, (1/2)i, 3q1
//! power  := atom ['^' integer]
//! atom   := integer ['/' integer] | 'i' | 'q'<j> | 'hbar' | '(' expr ')'
//! ```
//!
//! Variables are `q1 … q{2n}`. `hbar` is accepted only where an observable is
//! expected.

use num_bigint::BigInt;
use crate::rational::Rational;
use num_traits::Zero;
use thiserror::Error;

use crate::coeff::GaussianRational;
use crate::poly::Poly;

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("exponent overflow (maximum is {MAX_EXPONENT})")]
    ExponentOverflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at column {}: {kind}", .pos + 1)]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
    End,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = src[start..i].parse().expect("digits");
            out.push((start, Tok::Num(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*^/()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError {
                pos: i,
                kind: ParseErrorKind::Syntax(format!("unexpected character '{c}'")),
            });
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    two_n: usize,
    allow_hbar: bool,
}

impl Parser {
    fn nvars(&self) -> usize {
        self.two_n + 1
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), kind: ParseErrorKind::Syntax(msg.into()) })
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut neg = false;
        match self.peek() {
            Tok::Sym('-') => {
                neg = true;
                self.bump();
            }
            Tok::Sym('+') => {
                self.bump();
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if neg {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Tok::Sym('-') => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Num(_) | Tok::Ident(_) | Tok::Sym('('))
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.power()?;
        loop {
            if let Tok::Sym('*') = self.peek() {
                self.bump();
                let p = self.power()?;
                acc = &acc * &p;
            } else if self.starts_atom() {
                let p = self.power()?;
                acc = &acc * &p;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if let Tok::Sym('^') = self.peek() {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Tok::Num(n) => {
                    let e: u32 = n
                        .try_into()
                        .ok()
                        .filter(|&e| e <= MAX_EXPONENT)
                        .ok_or(ParseError { pos, kind: ParseErrorKind::ExponentOverflow })?;
                    let max_existing = base.terms().flat_map(|(m, _)| m.0.iter().copied()).max().unwrap_or(0);
                    if (max_existing as u32) * e > u16::MAX as u32 {
                        return Err(ParseError { pos, kind: ParseErrorKind::ExponentOverflow });
                    }
                    Ok(base.pow(e))
                }
                _ => Err(ParseError {
                    pos,
                    kind: ParseErrorKind::Syntax("expected a nonnegative integer exponent".into()),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => {
                let mut value = Rational::from_integer(n);
                if let Tok::Sym('/') = self.peek() {
                    self.bump();
                    let dpos = self.pos();
                    match self.bump() {
                        Tok::Num(d) if !d.is_zero() => value /= Rational::from_integer(d),
                        Tok::Num(_) => {
                            return Err(ParseError {
                                pos: dpos,
                                kind: ParseErrorKind::Syntax("zero denominator".into()),
                            })
                        }
                        _ => {
                            return Err(ParseError {
                                pos: dpos,
                                kind: ParseErrorKind::Syntax("expected an integer denominator".into()),
                            })
                        }
                    }
                }
                Ok(Poly::constant(self.nvars(), GaussianRational::from_real(value)))
            }
            Tok::Ident(name) => self.variable(pos, &name),
            Tok::Sym('(') => {
                let inner = self.expr()?;
                match self.bump() {
                    Tok::Sym(')') => Ok(inner),
                    _ => Err(ParseError {
                        pos: self.toks[self.at.saturating_sub(1)].0,
                        kind: ParseErrorKind::Syntax("expected ')'".into()),
                    }),
                }
            }
            Tok::End => Err(ParseError { pos, kind: ParseErrorKind::Syntax("unexpected end of input".into()) }),
            Tok::Sym(c) => Err(ParseError { pos, kind: ParseErrorKind::Syntax(format!("unexpected '{c}'")) }),
        }
    }

    fn variable(&self, pos: usize, name: &str) -> Result<Poly, ParseError> {
        if name == "i" {
            return Ok(Poly::constant(self.nvars(), GaussianRational::i()));
        }
        if name == "hbar" {
            if !self.allow_hbar {
                return Err(ParseError {
                    pos,
                    kind: ParseErrorKind::Syntax("hbar is not allowed in a plain polynomial".into()),
                });
            }
            return Ok(Poly::var(self.nvars(), self.two_n));
        }
        let unknown = || ParseError { pos, kind: ParseErrorKind::UnknownVariable(name.to_string()) };
        let digits = name.strip_prefix('q').ok_or_else(unknown)?;
        if digits.starts_with('0') {
            return Err(unknown());
        }
        let j: usize = digits.parse().map_err(|_| unknown())?;
        if j == 0 || j > self.two_n {
            return Err(unknown());
        }
        Ok(Poly::var(self.nvars(), j - 1))
    }
}

fn parse_full(text: &str, two_n: usize, allow_hbar: bool) -> Result<Poly, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, two_n, allow_hbar };
    let out = p.expr()?;
    if p.peek() != &Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(out)
}

/// Parses a polynomial in `q1 … q{two_n}`.
pub fn parse_poly(text: &str, two_n: usize) -> Result<Poly, ParseError> {
    let p = parse_full(text, two_n, false)?;
    Ok(drop_last_variable(&p))
}

/// Parses a polynomial in `q1 … q{two_n}` and `hbar`; returns it split by the power of `hbar`.
pub fn parse_hbar_poly(text: &str, two_n: usize) -> Result<std::collections::BTreeMap<u32, Poly>, ParseError> {
    let p = parse_full(text, two_n, true)?;
    Ok(p.split_variable(two_n).into_iter().map(|(k, q)| (k as u32, q)).collect())
}

fn drop_last_variable(p: &Poly) -> Poly {
    let split = p.split_variable(p.nvars() - 1);
    debug_assert!(split.keys().all(|&k| k == 0));
    split.into_iter().next().map(|(_, q)| q).unwrap_or_else(|| Poly::zero(p.nvars() - 1))
}
