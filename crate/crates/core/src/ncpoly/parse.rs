//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary ("*" unary)*
//! unary := ("-" | "+") unary | power
//! power := atom ("^" INT)?
//! atom  := RATIONAL | IDENT | "sym" "(" IDENT "," IDENT "," INT "," INT ")" | "(" expr ")"
//! ```
//!
//! Rational literals are `p` or `p/q`; identifiers match `[A-Za-z][A-Za-z0-9_]*`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{sym_product, NcPoly, Symbol};
use crate::error::{Error, Result};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Rat(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b',' => out.push((Tok::Comma, start)),
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let num: BigInt = text[start..i].parse().expect("digits");
                if i < bytes.len() && bytes[i] == b'/' {
                    let slash = i;
                    i += 1;
                    let dstart = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if dstart == i {
                        return Err(syntax(slash, "expected denominator after `/`"));
                    }
                    let den: BigInt = text[dstart..i].parse().expect("digits");
                    if den.is_zero() {
                        return Err(syntax(dstart, "zero denominator"));
                    }
                    out.push((Tok::Rat(Rational::new(num, den)), start));
                } else {
                    out.push((Tok::Int(num), start));
                }
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        }
        i += 1;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> Error {
        match self.peek() {
            Tok::Eof => syntax(self.offset(), "unexpected end of input"),
            t => syntax(self.offset(), format!("unexpected token {t:?}")),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expr(&mut self) -> Result<NcPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc += &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc -= &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<NcPoly> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<NcPoly> {
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

    fn small_int(&mut self) -> Result<usize> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => n.try_into().map_err(|_| syntax(at, "integer too large")),
            _ => Err(syntax(at, "expected a nonnegative integer")),
        }
    }

    fn power(&mut self) -> Result<NcPoly> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let e = self.small_int()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn ident(&mut self) -> Result<Symbol> {
        let at = self.offset();
        match self.bump() {
            Tok::Ident(name) => Ok(Symbol::new(name)),
            _ => Err(syntax(at, "expected an identifier")),
        }
    }

    fn atom(&mut self) -> Result<NcPoly> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(NcPoly::constant(Rational::from_integer(n)))
            }
            Tok::Rat(r) => {
                self.bump();
                Ok(NcPoly::constant(r))
            }
            Tok::Ident(name) if name == "sym" && self.toks[self.pos + 1].0 == Tok::LParen => {
                self.bump();
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::Comma)?;
                let y = self.ident()?;
                self.expect(Tok::Comma)?;
                let m = self.small_int()?;
                self.expect(Tok::Comma)?;
                let n = self.small_int()?;
                self.expect(Tok::RParen)?;
                Ok(sym_product(&x, &y, m, n))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(NcPoly::symbol(Symbol::new(name)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses an expression into canonical form.
pub fn parse(text: &str) -> Result<NcPoly> {
    let mut parser = Parser { toks: lex(text)?, pos: 0 };
    let out = parser.expr()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.unexpected());
    }
    Ok(out)
}
