//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Division is only allowed by nonzero constants. Positions in errors are
//! byte offsets into the input.

use num_bigint::BigInt;

use super::{Coeff, PolyError, Polynomial, Rational, Vars};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
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

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                out.push((Tok::Int(digits.parse().expect("ascii digits")), start));
                continue;
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(PolyError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a, C: Coeff> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a Vars,
    _mode: std::marker::PhantomData<C>,
}

impl<C: Coeff> Parser<'_, C> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, msg: impl Into<String>) -> PolyError {
        PolyError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<Polynomial<C>, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial<C>, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    let (_, at) = self.bump();
                    let rhs = self.unary()?;
                    let inv = if rhs.is_constant() { rhs.constant_term().checked_inv() } else { None };
                    match inv {
                        Some(inv) => acc = acc.scale(&inv),
                        None => return Err(PolyError::BadDivision { pos: at }),
                    }
                }
                Tok::Int(_) | Tok::Ident(_) | Tok::LParen => {
                    return Err(self.syntax("implicit multiplication is not allowed; use `*`"))
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial<C>, PolyError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial<C>, PolyError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        match self.bump().0 {
            Tok::Int(n) => {
                let k: u32 = n.try_into().map_err(|_| PolyError::BadExponent { pos: at })?;
                if *self.peek() == Tok::Caret {
                    return Err(self.syntax("chained exponents are ambiguous; add parentheses"));
                }
                Ok(base.pow(k))
            }
            _ => Err(PolyError::BadExponent { pos: at }),
        }
    }

    fn atom(&mut self) -> Result<Polynomial<C>, PolyError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Int(n) => Ok(Polynomial::constant(
                self.vars,
                C::from_rational(Rational::from_integer(n)),
            )),
            Tok::Ident(name) => {
                if let Some(i) = self.vars.position(&name) {
                    return Ok(Polynomial::var(self.vars, i));
                }
                match C::imaginary_unit() {
                    Some(unit) if name == "i" => Ok(Polynomial::constant(self.vars, unit)),
                    _ => Err(PolyError::UnknownVariable { name, pos: at }),
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.syntax("expected `)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(PolyError::Syntax {
                pos: at,
                msg: "unexpected end of input".into(),
            }),
            other => Err(PolyError::Syntax {
                pos: at,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }
}

impl<C: Coeff> Polynomial<C> {
    /// Parses an expression over the given variable table.
    pub fn parse(text: &str, vars: &Vars) -> Result<Self, PolyError> {
        let toks = lex(text)?;
        let mut parser = Parser::<C> {
            toks,
            pos: 0,
            vars,
            _mode: std::marker::PhantomData,
        };
        let out = parser.expr()?;
        match parser.peek() {
            Tok::End => Ok(out),
            Tok::RParen => Err(parser.syntax("unbalanced `)`")),
            _ => Err(parser.syntax("unexpected trailing input")),
        }
    }
}
