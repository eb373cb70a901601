use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{PolyError, UniPoly};
use crate::field::{common_denominator, Field};

/// Rational roots of a univariate polynomial together with what is left over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootReport<F> {
    /// Distinct roots in ascending order with their multiplicities.
    pub roots: Vec<(F, u32)>,
    /// `q` divided by every `(T - root)^multiplicity`.
    pub residual: UniPoly<F>,
}

impl<F: Field> RootReport<F> {
    /// The residual has positive degree and therefore no rational roots, but
    /// may vanish somewhere over an extension of the field.
    pub fn may_have_irrational_roots(&self) -> bool {
        self.residual.degree().unwrap_or(0) > 0
    }

    pub fn contains(&self, a: &F) -> bool {
        self.roots.iter().any(|(r, _)| r == a)
    }
}

/// All rational roots of `q` with multiplicities, via the rational root theorem.
pub fn rational_roots<F: Field>(q: &UniPoly<F>) -> Result<RootReport<F>, PolyError> {
    if q.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut roots: Vec<(F, u32)> = Vec::new();
    let mut rest = q.clone();

    let zeros = rest.coeffs().iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        rest = UniPoly::new(rest.coeffs()[zeros..].to_vec());
        roots.push((F::zero(), zeros as u32));
    }

    loop {
        let Some(deg) = rest.degree() else { break };
        if deg == 0 {
            break;
        }
        let ints = integer_coefficients(&rest);
        let Some(root) = find_root(&ints) else { break };
        let root_f = F::from_big(&root).expect("rational root fits the field");
        let lin = UniPoly::linear_root(root_f.clone());
        let mut mult = 0;
        while let Some(qq) = rest.exact_divide(&lin)? {
            rest = qq;
            mult += 1;
        }
        roots.push((root_f, mult));
    }

    roots.sort_by_key(|a| a.0.to_big());
    Ok(RootReport { roots, residual: rest })
}

fn integer_coefficients<F: Field>(q: &UniPoly<F>) -> Vec<BigInt> {
    let den = common_denominator(q.coeffs());
    q.coeffs().iter().map(|c| (c.to_big() * BigRational::from_integer(den.clone())).to_integer()).collect()
}

fn eval_int(coeffs: &[BigInt], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
}

/// One rational root of the integer polynomial, if any. Constant term is nonzero.
fn find_root(coeffs: &[BigInt]) -> Option<BigRational> {
    let a0 = coeffs.first()?.abs();
    let an = coeffs.last()?.abs();
    if a0.is_zero() {
        return Some(BigRational::zero());
    }
    let nums = divisors(&a0);
    let dens = divisors(&an);
    let mut candidates: Vec<BigRational> = Vec::new();
    for p in &nums {
        for d in &dens {
            if p.gcd(d).is_one() {
                let r = BigRational::new(p.clone(), d.clone());
                candidates.push(-r.clone());
                candidates.push(r);
            }
        }
    }
    candidates.sort();
    candidates.into_iter().find(|c| eval_int(coeffs, c).is_zero())
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            let other = n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn p(c: &[i64]) -> UniPoly<Rational> {
        UniPoly::new(c.iter().map(|&k| Rational::from_i64(k)).collect())
    }

    #[test]
    fn minus_t_squared() {
        let r = rational_roots(&p(&[0, 0, -1])).unwrap();
        assert_eq!(r.roots, vec![(Rational::zero(), 2)]);
        assert!(r.residual.is_constant());
        assert!(!r.may_have_irrational_roots());
    }

    #[test]
    fn simple_and_irrational() {
        let r = rational_roots(&p(&[-1, 0, 1])).unwrap();
        assert_eq!(r.roots, vec![(Rational::from_i64(-1), 1), (Rational::one(), 1)]);
        let r = rational_roots(&p(&[1, 0, 1])).unwrap();
        assert!(r.roots.is_empty());
        assert_eq!(r.residual, p(&[1, 0, 1]));
        assert!(r.may_have_irrational_roots());
        assert_eq!(rational_roots(&UniPoly::<Rational>::zero()), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn fractional_roots() {
        // (2T - 3)^2 (T + 1) (T^2 - 2)
        let a = &(&p(&[-3, 2]) * &p(&[-3, 2])) * &(&p(&[1, 1]) * &p(&[-2, 0, 1]));
        let r = rational_roots(&a).unwrap();
        assert_eq!(r.roots, vec![(Rational::from_i64(-1), 1), (Rational::new(3.into(), 2.into()), 2)]);
        assert_eq!(r.residual.monic(), p(&[-2, 0, 1]));
    }
}
