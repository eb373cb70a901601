use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::PolyError;
use crate::field::Field;

/// Dense univariate polynomial, coefficients lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UniPoly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> UniPoly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate `T`.
    pub fn t() -> Self {
        Self::new(vec![F::zero(), F::one()])
    }

    /// `T - a`.
    pub fn linear_root(a: F) -> Self {
        Self::new(vec![-a, F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            Some(c) => self.scale(&c.inv()),
            None => self.clone(),
        }
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_some_and(One::is_one)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.clone() * F::from_i64(k as i64)).collect())
    }

    /// Euclidean division.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self), PolyError> {
        let dd = d.degree().ok_or(PolyError::DivisionByZero)?;
        let lc_inv = d.coeffs[dd].inv();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![F::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1;
            let c = rem[k].clone() * lc_inv.clone();
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k - dd + j] = rem[k - dd + j].clone() - c.clone() * dc.clone();
                }
                quot[k - dd] = c;
            }
            rem.pop();
        }
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn exact_divide(&self, d: &Self) -> Result<Option<Self>, PolyError> {
        let (q, r) = self.div_rem(d)?;
        Ok(r.is_zero().then_some(q))
    }

    pub fn divides(&self, other: &Self) -> bool {
        !self.is_zero() && other.div_rem(self).map(|(_, r)| r.is_zero()).unwrap_or(false)
    }

    pub fn display_in<'a>(&'a self, var: &'a str) -> UniDisplay<'a, F> {
        UniDisplay { poly: self, var }
    }
}

/// Monic gcd of `a` and `b`.
pub fn univ_gcd<F: Field>(a: &UniPoly<F>, b: &UniPoly<F>) -> Result<UniPoly<F>, PolyError> {
    if a.is_zero() && b.is_zero() {
        return Err(PolyError::BothZero);
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b)?;
        a = b;
        b = r;
    }
    Ok(a.monic())
}

pub struct UniDisplay<'a, F> {
    poly: &'a UniPoly<F>,
    var: &'a str,
}

impl<F: Field> fmt::Display for UniDisplay<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.poly;
        if p.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in p.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            if k == 0 {
                write!(f, "{abs}")?;
                continue;
            }
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            write!(f, "{}", self.var)?;
            if k > 1 {
                write!(f, "^{k}")?;
            }
        }
        Ok(())
    }
}

impl<F: Field> fmt::Display for UniPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_in("T").fmt(f)
    }
}

impl<F: Field> Add for &UniPoly<F> {
    type Output = UniPoly<F>;
    fn add(self, rhs: &UniPoly<F>) -> UniPoly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<F: Field> Sub for &UniPoly<F> {
    type Output = UniPoly<F>;
    fn sub(self, rhs: &UniPoly<F>) -> UniPoly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<F: Field> Mul for &UniPoly<F> {
    type Output = UniPoly<F>;
    fn mul(self, rhs: &UniPoly<F>) -> UniPoly<F> {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        UniPoly::new(out)
    }
}

impl<F: Field> Neg for &UniPoly<F> {
    type Output = UniPoly<F>;
    fn neg(self) -> UniPoly<F> {
        UniPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn p(c: &[i64]) -> UniPoly<Rational> {
        UniPoly::new(c.iter().map(|&k| Rational::from_i64(k)).collect())
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(univ_gcd(&p(&[-1, 0, 1]), &p(&[-1, 1])).unwrap(), p(&[-1, 1]));
        assert_eq!(univ_gcd(&p(&[0, 0, 0, 1]), &p(&[0, 0, 1])).unwrap(), p(&[0, 0, 1]));
        // T^2 + 1 = (T + 1)(T - 1) + 2, then (T - 1) = (T - 1)/2 * 2 + 0
        assert_eq!(univ_gcd(&p(&[1, 0, 1]), &p(&[-1, 1])).unwrap(), p(&[1]));
        assert_eq!(univ_gcd(&UniPoly::zero(), &UniPoly::<Rational>::zero()), Err(PolyError::BothZero));
        assert_eq!(univ_gcd(&UniPoly::zero(), &p(&[4, 2])).unwrap(), p(&[2, 1]));
    }

    #[test]
    fn division() {
        let (q, r) = p(&[1, 0, 1]).div_rem(&p(&[-1, 1])).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert_eq!(r, p(&[2]));
        assert!(p(&[0, 1]).divides(&p(&[0, 0, 3])));
        assert!(!p(&[0, 1]).divides(&p(&[1, 1])));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[0, 0, -1]).to_string(), "-T^2");
        assert_eq!(p(&[1, 1, 1]).to_string(), "T^2 + T + 1");
        assert_eq!(p(&[-1, 0, 2]).to_string(), "2*T^2 - 1");
    }
}
