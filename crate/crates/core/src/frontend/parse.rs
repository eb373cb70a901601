//! Expression grammar for elements and derivations.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer ('/' integer)? | name | 'd/d' name | '(' expr ')'
//! ```
//!
//! `d/d<name>` is only accepted when parsing a derivation; a derivation is an
//! expression whose value is a sum of `coefficient * d/d<name>` terms.

use crate::derivation::{Derivation, DerivationError};
use crate::field::Field;
use crate::poly::MultiPoly;
use crate::ring::{Ring, RingElement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable `{name}` at offset {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error(transparent)]
    Derivation(#[from] DerivationError),
}

impl ParseError {
    fn syntax(offset: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax { offset, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Name(String),
    DerivOp(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(s) | Tok::Name(s) => format!("`{s}`"),
        Tok::DerivOp(v) => format!("`d/d{v}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn tokenize(src: &str, derivations: bool) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    let take_name = |start: usize| -> (String, usize) {
        let mut end = start;
        while end < chars.len() && is_name_char(chars[end].1) {
            end += 1;
        }
        (chars[start..end].iter().map(|(_, c)| c).collect(), end)
    };
    while k < chars.len() {
        let (off, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, off));
            k += 1;
        } else if c.is_ascii_digit() {
            let mut end = k;
            while end < chars.len() && chars[end].1.is_ascii_digit() {
                end += 1;
            }
            out.push((Tok::Int(chars[k..end].iter().map(|(_, c)| c).collect()), off));
            k = end;
        } else if is_name_start(c) {
            let (name, end) = take_name(k);
            let is_op = derivations
                && name == "d"
                && chars.get(end).map(|p| p.1) == Some('/')
                && chars.get(end + 1).map(|p| p.1) == Some('d')
                && chars.get(end + 2).is_some_and(|p| is_name_start(p.1));
            if is_op {
                let (var, end2) = take_name(end + 2);
                out.push((Tok::DerivOp(var), off));
                k = end2;
            } else {
                out.push((Tok::Name(name), off));
                k = end;
            }
        } else {
            return Err(ParseError::syntax(off, format!("unexpected character `{c}`")));
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

/// A scalar polynomial or a derivation (one coefficient per variable).
#[derive(Clone, Debug)]
enum Val<F> {
    Scalar(MultiPoly<F>),
    Deriv(Vec<MultiPoly<F>>),
}

struct Parser<'a, F> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    names: &'a [String],
    _field: std::marker::PhantomData<F>,
}

impl<F: Field> Parser<'_, F> {
    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn at(&self) -> &(Tok, usize) {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek(&self) -> &Tok {
        &self.at().0
    }

    fn offset(&self) -> usize {
        self.at().1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.at().clone();
        self.pos += 1;
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::syntax(self.offset(), format!("expected {wanted}, found {}", describe(self.peek())))
    }

    fn var_index(&self, name: &str, offset: usize) -> Result<usize, ParseError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ParseError::UnknownVariable { name: name.to_string(), offset })
    }

    fn add(&self, a: Val<F>, b: Val<F>, negate: bool, offset: usize) -> Result<Val<F>, ParseError> {
        let neg = |p: &MultiPoly<F>| if negate { -p } else { p.clone() };
        match (a, b) {
            (Val::Scalar(x), Val::Scalar(y)) => Ok(Val::Scalar(&x + &neg(&y))),
            (Val::Deriv(x), Val::Deriv(y)) => Ok(Val::Deriv(x.iter().zip(&y).map(|(p, q)| p + &neg(q)).collect())),
            (Val::Scalar(s), d @ Val::Deriv(_)) | (d @ Val::Deriv(_), Val::Scalar(s)) if s.is_zero() => Ok(d),
            _ => Err(ParseError::syntax(offset, "cannot add a derivation and a scalar")),
        }
    }

    fn mul(&self, a: Val<F>, b: Val<F>, offset: usize) -> Result<Val<F>, ParseError> {
        match (a, b) {
            (Val::Scalar(x), Val::Scalar(y)) => Ok(Val::Scalar(&x * &y)),
            (Val::Scalar(s), Val::Deriv(d)) | (Val::Deriv(d), Val::Scalar(s)) => {
                Ok(Val::Deriv(d.iter().map(|p| &s * p).collect()))
            }
            (Val::Deriv(_), Val::Deriv(_)) => Err(ParseError::syntax(offset, "cannot multiply two derivations")),
        }
    }

    fn expr(&mut self) -> Result<Val<F>, ParseError> {
        let mut acc = self.term()?;
        loop {
            let negate = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => return Ok(acc),
            };
            let (_, off) = self.bump();
            let rhs = self.term()?;
            acc = self.add(acc, rhs, negate, off)?;
        }
    }

    fn term(&mut self) -> Result<Val<F>, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            let (_, off) = self.bump();
            let rhs = self.unary()?;
            acc = self.mul(acc, rhs, off)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Val<F>, ParseError> {
        if *self.peek() == Tok::Minus {
            let (_, off) = self.bump();
            let v = self.unary()?;
            return self.mul(Val::Scalar(MultiPoly::constant(self.nvars(), -F::one())), v, off);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Val<F>, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let (_, off) = self.bump();
        let exp_off = self.offset();
        let e = match self.bump().0 {
            Tok::Int(s) => {
                s.parse::<u32>().map_err(|_| ParseError::syntax(exp_off, format!("exponent `{s}` is too large")))?
            }
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("a non-negative integer exponent"));
            }
        };
        match base {
            Val::Scalar(p) => Ok(Val::Scalar(p.pow(e))),
            Val::Deriv(_) => Err(ParseError::syntax(off, "cannot raise a derivation to a power")),
        }
    }

    fn integer(&self, s: &str, offset: usize) -> Result<F, ParseError> {
        let big: num_bigint::BigInt =
            s.parse().map_err(|_| ParseError::syntax(offset, format!("bad integer `{s}`")))?;
        F::from_big(&num_rational::BigRational::from_integer(big))
            .ok_or_else(|| ParseError::syntax(offset, format!("`{s}` does not fit the coefficient field")))
    }

    fn atom(&mut self) -> Result<Val<F>, ParseError> {
        let (tok, off) = self.bump();
        match tok {
            Tok::Int(s) => {
                let mut value = self.integer(&s, off)?;
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let den_off = self.offset();
                    let Tok::Int(d) = self.bump().0 else {
                        self.pos -= 1;
                        return Err(self.unexpected("an integer denominator"));
                    };
                    let den = self.integer(&d, den_off)?;
                    if den.is_zero() {
                        return Err(ParseError::syntax(den_off, "zero denominator"));
                    }
                    value = value / den;
                }
                Ok(Val::Scalar(MultiPoly::constant(self.nvars(), value)))
            }
            Tok::Name(name) => Ok(Val::Scalar(MultiPoly::var(self.nvars(), self.var_index(&name, off)?))),
            Tok::DerivOp(name) => {
                let j = self.var_index(&name, off + 3)?;
                let mut images = vec![MultiPoly::zero(self.nvars()); self.nvars()];
                images[j] = MultiPoly::one(self.nvars());
                Ok(Val::Deriv(images))
            }
            Tok::LParen => {
                let v = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(v)
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("a number, variable or `(`"))
            }
        }
    }
}

fn parse_val<F: Field>(src: &str, names: &[String], derivations: bool) -> Result<Val<F>, ParseError> {
    let toks = tokenize(src, derivations)?;
    let mut p = Parser { toks, pos: 0, names, _field: std::marker::PhantomData };
    let v = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(v)
}

/// Parses a polynomial over the given variable names.
pub fn parse_poly<F: Field>(src: &str, names: &[String]) -> Result<MultiPoly<F>, ParseError> {
    match parse_val(src, names, false)? {
        Val::Scalar(p) => Ok(p),
        Val::Deriv(_) => unreachable!("derivation operators are not tokenized here"),
    }
}

/// Parses and normalizes an element of `ring`.
pub fn parse_element<F: Field>(src: &str, ring: &Ring<F>) -> Result<RingElement<F>, ParseError> {
    let p = parse_poly(src, ring.names())?;
    Ok(ring.normalize(&p).expect("parsed over the ring's variables"))
}

/// Parses a derivation such as `2*z*d/dy - x^2*d/dz` and checks it is well defined.
pub fn parse_derivation<F: Field>(src: &str, ring: &Ring<F>) -> Result<Derivation<F>, ParseError> {
    let images = match parse_val(src, ring.names(), true)? {
        Val::Deriv(images) => images,
        Val::Scalar(p) if p.is_zero() => vec![MultiPoly::zero(ring.nvars()); ring.nvars()],
        Val::Scalar(_) => return Err(ParseError::syntax(0, "expected a sum of `coefficient*d/d<var>` terms")),
    };
    let images = images.into_iter().map(|p| ring.normalize(&p).expect("same arity")).collect();
    Ok(Derivation::new(ring, images)?)
}
