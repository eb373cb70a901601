use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Monomial, PolyError};
use crate::field::Field;

/// Sparse multivariate polynomial over `F` with terms keyed by grevlex order.
///
/// Zero coefficients are never stored, so structural equality is polynomial
/// equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiPoly<F> {
    nvars: usize,
    terms: BTreeMap<Monomial, F>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, F::one())
    }

    pub fn constant(nvars: usize, c: F) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        Self::term(Monomial::var(nvars, index), F::one())
    }

    pub fn term(m: Monomial, c: F) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, F)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending grevlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> F {
        self.terms.get(m).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<F> {
        if self.is_constant() {
            Some(self.coeff(&Monomial::one(self.nvars)))
        } else {
            None
        }
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &F)> {
        self.terms.iter().next_back()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub fn leading_coeff(&self) -> Option<&F> {
        self.terms.values().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exponents()[var]).max().unwrap_or(0)
    }

    /// Variables that occur in some term.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.degree_in(v) > 0).collect()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_arity(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::ArityMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    /// Checked arithmetic; the operator impls panic on arity mismatch instead.
    pub fn arith(&self, other: &Self, kind: ArithKind) -> Result<Self, PolyError> {
        self.check_arity(other)?;
        Ok(match kind {
            ArithKind::Add => self + other,
            ArithKind::Sub => self - other,
            ArithKind::Mul => self * other,
        })
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.clone() * c.clone())).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a.clone() * c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Divides by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            Some(c) => self.scale(&c.inv()),
            None => self.clone(),
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponents()[var];
            if e == 0 {
                continue;
            }
            let mut ex = m.exponents().to_vec();
            ex[var] -= 1;
            out.add_term(Monomial::new(ex), c.clone() * F::from_i64(e as i64));
        }
        out
    }

    pub fn eval(&self, point: &[F]) -> F {
        assert_eq!(point.len(), self.nvars, "point arity");
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Replaces variable `j` by `images[j]`; the result lives in the images' ring.
    pub fn substitute(&self, images: &[MultiPoly<F>]) -> MultiPoly<F> {
        assert_eq!(images.len(), self.nvars, "substitution arity");
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut powers: Vec<Vec<MultiPoly<F>>> =
            images.iter().map(|p| vec![MultiPoly::one(p.nvars), p.clone()]).collect();
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (j, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[j].len() <= e as usize {
                    let next = &powers[j][powers[j].len() - 1] * &images[j];
                    powers[j].push(next);
                }
                t = &t * &powers[j][e as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Appends `extra` variables that do not occur.
    pub fn extend_vars(&self, extra: usize) -> Self {
        MultiPoly {
            nvars: self.nvars + extra,
            terms: self.terms.iter().map(|(m, c)| (m.extend(extra), c.clone())).collect(),
        }
    }

    /// Drops trailing variables; `None` if any of them occurs.
    pub fn truncate_vars(&self, nvars: usize) -> Option<Self> {
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            if m.exponents()[nvars..].iter().any(|&e| e > 0) {
                return None;
            }
            out.add_term(Monomial::new(m.exponents()[..nvars].to_vec()), c.clone());
        }
        Some(out)
    }

    /// Multivariate division by a single divisor. Returns `(quotient, remainder)`
    /// with no term of the remainder divisible by the divisor's leading monomial.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self), PolyError> {
        self.check_arity(d)?;
        let (lm, lc) = d.leading_term().ok_or(PolyError::DivisionByZero)?;
        let (lm, lc_inv) = (lm.clone(), lc.inv());
        let mut q = Self::zero(self.nvars);
        let mut rem = Self::zero(self.nvars);
        let mut p = self.clone();
        while let Some((m, c)) = p.leading_term() {
            let (m, c) = (m.clone(), c.clone());
            if lm.divides(&m) {
                let qm = lm.quotient_of(&m);
                let qc = c * lc_inv.clone();
                p = &p - &d.mul_term(&qm, &qc);
                q.add_term(qm, qc);
            } else {
                p.terms.remove(&m);
                rem.add_term(m, c);
            }
        }
        Ok((q, rem))
    }

    /// `Some(c)` with `self = d * c` when `d` divides `self`, else `None`.
    pub fn exact_divide(&self, d: &Self) -> Result<Option<Self>, PolyError> {
        let (q, r) = self.div_rem(d)?;
        Ok(if r.is_zero() { Some(q) } else { None })
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a, F> {
        PolyDisplay { poly: self, names }
    }
}

pub struct PolyDisplay<'a, F> {
    poly: &'a MultiPoly<F>,
    names: &'a [String],
}

impl<F: Field> fmt::Display for PolyDisplay<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(self.poly, self.names, f)
    }
}

pub(crate) fn write_poly<F: Field>(p: &MultiPoly<F>, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    for (k, (m, c)) in p.terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let abs = if neg { -c.clone() } else { c.clone() };
        match (k, neg) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        if m.is_one() {
            write!(f, "{abs}")?;
        } else {
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            m.fmt_with(names, f)?;
        }
    }
    Ok(())
}

impl<F: Field> fmt::Display for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        write_poly(self, &names, f)
    }
}

impl<F: Field> Add for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn add(self, rhs: &MultiPoly<F>) -> MultiPoly<F> {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<F: Field> Sub for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn sub(self, rhs: &MultiPoly<F>) -> MultiPoly<F> {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<F: Field> Mul for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn mul(self, rhs: &MultiPoly<F>) -> MultiPoly<F> {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.mul(b), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<F: Field> Neg for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn neg(self) -> MultiPoly<F> {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<F: Field> $tr for MultiPoly<F> {
            type Output = MultiPoly<F>;
            fn $m(self, rhs: MultiPoly<F>) -> MultiPoly<F> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<F: Field> Neg for MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn neg(self) -> MultiPoly<F> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn x() -> MultiPoly<Rational> {
        MultiPoly::var(2, 0)
    }
    fn y() -> MultiPoly<Rational> {
        MultiPoly::var(2, 1)
    }

    #[test]
    fn expansion_identity_cancellation() {
        let p = &(&x() + &y()) * &(&x() - &y());
        assert_eq!(p, &x().pow(2) - &y().pow(2));
        assert_eq!(&p + &MultiPoly::zero(2), p);
        let a = &(&x().pow(2) * &y()) + &x();
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let a = MultiPoly::<Rational>::var(2, 0);
        let b = MultiPoly::<Rational>::var(3, 0);
        assert_eq!(a.arith(&b, ArithKind::Add), Err(PolyError::ArityMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn exact_division() {
        let a = &(&x().pow(2) * &y()) + &x();
        assert_eq!(a.exact_divide(&x()).unwrap(), Some(&(&x() * &y()) + &MultiPoly::one(2)));
        assert_eq!(x().pow(4).exact_divide(&x().pow(2)).unwrap(), Some(x().pow(2)));
        let b = &x() + &MultiPoly::one(2);
        assert_eq!(b.exact_divide(&x()).unwrap(), None);
        assert_eq!(b.exact_divide(&MultiPoly::zero(2)), Err(PolyError::DivisionByZero));
    }

    #[test]
    fn rendering() {
        let names: Vec<String> = ["x", "y", "z", "t"].iter().map(|s| s.to_string()).collect();
        let v = |i| MultiPoly::<Rational>::var(4, i);
        let r = &(&(&(&v(0).pow(2) * &v(1)) + &v(0)) + &v(2).pow(2)) + &v(3).pow(3);
        assert_eq!(r.display(&names).to_string(), "x^2*y + t^3 + z^2 + x");
        let s = &v(0).scale(&(q(3) / q(2))) - &MultiPoly::one(4);
        assert_eq!(s.display(&names).to_string(), "3/2*x - 1");
        assert_eq!((-&v(2)).display(&names).to_string(), "-z");
    }

    #[test]
    fn substitution_and_derivative() {
        let p = &x().pow(2) * &y();
        assert_eq!(p.derivative(0), (&x() * &y()).scale(&q(2)));
        // x -> x + y, y -> y
        let s = p.substitute(&[&x() + &y(), y()]);
        assert_eq!(s, &(&x() + &y()).pow(2) * &y());
        assert_eq!(p.eval(&[q(2), q(3)]), q(12));
    }
}
