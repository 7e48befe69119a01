//! Group words with brackets: `a^2*[a,b]^-1*b`, `[a,[b,c]]`, `[a,c,b]`.
//!
//! Brackets are commutators `[x,y] = x^-1 y^-1 x y`, left-normed for three or
//! more entries: `[x,y,z] = [[x,y],z]`.

use std::sync::Arc;

use num_bigint::BigInt;

use super::{GroupElement, PcPresentation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Identity,
    Gen(usize),
    Product(Vec<Expr>),
    Pow(Box<Expr>, BigInt),
    Commutator(Vec<Expr>),
}

impl Expr {
    pub fn gen(i: usize) -> Expr {
        Expr::Gen(i)
    }

    pub fn comm(a: Expr, b: Expr) -> Expr {
        Expr::Commutator(vec![a, b])
    }

    pub fn pow(self, e: impl Into<BigInt>) -> Expr {
        Expr::Pow(Box::new(self), e.into())
    }

    pub fn max_generator(&self) -> Option<usize> {
        match self {
            Expr::Identity => None,
            Expr::Gen(i) => Some(*i),
            Expr::Pow(e, _) => e.max_generator(),
            Expr::Product(v) | Expr::Commutator(v) => v.iter().filter_map(Expr::max_generator).max(),
        }
    }

    /// Evaluates with `Gen(i)` bound to `images[i]`.
    pub fn eval_with(&self, identity: &GroupElement, images: &[GroupElement]) -> Result<GroupElement> {
        Ok(match self {
            Expr::Identity => identity.clone(),
            Expr::Gen(i) => images.get(*i).cloned().ok_or_else(|| Error::UnknownGenerator(format!("#{i}")))?,
            Expr::Pow(e, n) => e.eval_with(identity, images)?.pow(n),
            Expr::Product(v) => {
                let mut acc = identity.clone();
                for e in v {
                    acc = acc.multiply(&e.eval_with(identity, images)?)?;
                }
                acc
            }
            Expr::Commutator(v) => {
                let mut it = v.iter();
                let mut acc = it.next().expect("bracket has entries").eval_with(identity, images)?;
                for e in it {
                    acc = acc.commutator(&e.eval_with(identity, images)?)?;
                }
                acc
            }
        })
    }

    pub fn eval(&self, pres: &Arc<PcPresentation>) -> Result<GroupElement> {
        let gens: Vec<GroupElement> = (0..pres.len()).map(|i| GroupElement::generator(pres, i)).collect();
        self.eval_with(&GroupElement::identity(pres), &gens)
    }
}

/// Parses a word, resolving identifiers against the presentation's
/// generator names.
pub fn parse_expr(input: &str, pres: &PcPresentation) -> Result<Expr> {
    let mut p = Parser { src: input.as_bytes(), pos: 0, pres };
    let e = p.product()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    pres: &'a PcPresentation,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn product(&mut self) -> Result<Expr> {
        let mut terms = vec![self.power()?];
        while self.eat(b'*') {
            terms.push(self.power()?);
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Product(terms) })
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.eat(b'^') {
            base = Expr::Pow(Box::new(base), self.integer()?);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && (self.src[self.pos] == b'-' || self.src[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<BigInt>().map_err(|_| Error::Parse { pos: start, msg: "expected integer exponent".into() })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut entries = vec![self.product()?];
                while self.eat(b',') {
                    entries.push(self.product()?);
                }
                if !self.eat(b']') {
                    return Err(self.err("expected `]`"));
                }
                if entries.len() < 2 {
                    return Err(self.err("a bracket needs at least two entries"));
                }
                Ok(Expr::Commutator(entries))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.product()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Expr::Identity)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                self.pres.index_of(name).map(Expr::Gen).ok_or_else(|| Error::UnknownGenerator(name.to_string()))
            }
            _ => Err(self.err("expected generator, `[`, `(` or `1`")),
        }
    }
}
