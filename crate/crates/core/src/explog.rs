//! Exponentials of locally nilpotent derivations and logarithms of unipotent
//! automorphisms.
//!
//! Formal parameters such as `t` are adjoined to `A` as extra polynomial
//! variables that every derivation kills, so `exp(tD)` is an automorphism of
//! `A[t]` and flow laws become polynomial identities.

use std::fmt;

use crate::derivation::{Derivation, DerivationError};
use crate::field::Field;
use crate::poly::MultiPoly;
use crate::ring::{Ring, RingElement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpLogError {
    #[error("exp needs a locally nilpotent derivation: {0}")]
    NotLocallyNilpotent(DerivationError),
    #[error("(sigma - id)^k({generator}) is still nonzero after {cap} steps")]
    CapExceeded { generator: String, cap: u32 },
    #[error("log(sigma) is not a derivation: {reason}")]
    NotDerivation { reason: String },
    #[error("automorphisms or derivations live on different rings")]
    PresentationMismatch,
    #[error("coefficient {0} involves non-parameter variables")]
    CoefficientNotParameter(String),
    #[error("images do not preserve the relation: r maps to {0}")]
    RelationNotPreserved(String),
}

/// An endomorphism of `A[params]` fixing the parameters, given by the images
/// of the generators of `A`.
#[derive(Clone, Debug)]
pub struct RingAutomorphism<F> {
    base: Ring<F>,
    ring: Ring<F>,
    images: Vec<RingElement<F>>,
}

impl<F: PartialEq> PartialEq for RingAutomorphism<F> {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.images == other.images
    }
}
impl<F: Eq> Eq for RingAutomorphism<F> {}

/// `a` viewed in `ring`, which extends `a`'s ring by trailing parameters.
fn lift<F: Field>(ring: &Ring<F>, a: &RingElement<F>) -> RingElement<F> {
    let extra = ring.nvars() - a.ring().nvars();
    ring.element_unchecked(a.value().extend_vars(extra))
}

fn fresh_names<F: Field>(ring: &Ring<F>, wanted: &[&str]) -> Vec<String> {
    let mut taken: Vec<String> = ring.names().to_vec();
    let mut out = Vec::new();
    for w in wanted {
        let mut name = w.to_string();
        let mut k = 1;
        while taken.contains(&name) {
            name = format!("{w}{k}");
            k += 1;
        }
        taken.push(name.clone());
        out.push(name);
    }
    out
}

impl<F: Field> RingAutomorphism<F> {
    pub fn identity(ring: &Ring<F>) -> Self {
        RingAutomorphism { base: ring.clone(), ring: ring.clone(), images: ring.vars() }
    }

    /// Builds an automorphism from generator images, checking that the relation is preserved.
    pub fn new(base: &Ring<F>, ring: &Ring<F>, images: Vec<RingElement<F>>) -> Result<Self, ExpLogError> {
        if images.len() != base.nvars() || images.iter().any(|e| e.ring() != ring) || ring.nvars() < base.nvars() {
            return Err(ExpLogError::PresentationMismatch);
        }
        let sigma = RingAutomorphism { base: base.clone(), ring: ring.clone(), images };
        if let Some(r) = base.relation() {
            let image = sigma.apply_poly(&r.extend_vars(ring.nvars() - base.nvars()));
            if !image.is_zero() {
                return Err(ExpLogError::RelationNotPreserved(image.to_string()));
            }
        }
        Ok(sigma)
    }

    /// The ring `A`.
    pub fn base(&self) -> &Ring<F> {
        &self.base
    }

    /// The ring the images live in: `A` or `A[params]`.
    pub fn ring(&self) -> &Ring<F> {
        &self.ring
    }

    pub fn images(&self) -> &[RingElement<F>] {
        &self.images
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.ring.names()[self.base.nvars()..]
    }

    fn all_images(&self) -> Vec<MultiPoly<F>> {
        let n = self.ring.nvars();
        let mut out: Vec<MultiPoly<F>> = self.images.iter().map(|e| e.value().clone()).collect();
        out.extend((self.base.nvars()..n).map(|j| MultiPoly::var(n, j)));
        out
    }

    fn apply_poly(&self, p: &MultiPoly<F>) -> RingElement<F> {
        self.ring.element_unchecked(p.substitute(&self.all_images()))
    }

    /// `sigma(a)` for `a` in `A` or in `A[params]`.
    pub fn apply(&self, a: &RingElement<F>) -> RingElement<F> {
        self.apply_poly(lift(&self.ring, a).value())
    }

    /// `r(sigma(x))` reduced; zero exactly when the relation is preserved.
    pub fn relation_image(&self) -> RingElement<F> {
        match self.base.relation() {
            Some(r) => self.apply_poly(&r.extend_vars(self.ring.nvars() - self.base.nvars())),
            None => self.ring.zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(j, e)| *e == self.ring.var(j))
    }

    /// `self ∘ other`: `x_j -> self(other(x_j))`.
    pub fn compose(&self, other: &Self) -> Result<Self, ExpLogError> {
        if self.ring != other.ring || self.base != other.base {
            return Err(ExpLogError::PresentationMismatch);
        }
        let images = other.images.iter().map(|e| self.apply(e)).collect();
        Ok(RingAutomorphism { base: self.base.clone(), ring: self.ring.clone(), images })
    }

    /// The same map viewed on a ring with more trailing parameters.
    pub fn extend_to(&self, ring: &Ring<F>) -> Self {
        RingAutomorphism {
            base: self.base.clone(),
            ring: ring.clone(),
            images: self.images.iter().map(|e| lift(ring, e)).collect(),
        }
    }
}

impl<F: Field> fmt::Display for RingAutomorphism<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, e) in self.images.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} -> {}", self.base.names()[j], e)?;
        }
        Ok(())
    }
}

/// `sum_k c^k D^k(x_j) / k!` in `ring`, for `c` a polynomial in the parameters.
pub fn exp_scaled<F: Field>(
    d: &Derivation<F>,
    ring: &Ring<F>,
    c: &RingElement<F>,
    cap: u32,
) -> Result<RingAutomorphism<F>, ExpLogError> {
    let base = d.ring();
    if c.ring() != ring || ring.nvars() < base.nvars() {
        return Err(ExpLogError::PresentationMismatch);
    }
    if c.value().support().iter().any(|&v| v < base.nvars()) {
        return Err(ExpLogError::CoefficientNotParameter(c.to_string()));
    }
    d.is_locally_nilpotent(cap).map_err(ExpLogError::NotLocallyNilpotent)?;
    let images = (0..base.nvars())
        .map(|j| {
            let mut out = ring.zero();
            let mut cur = base.var(j);
            let mut c_pow = ring.one();
            let mut fact = F::one();
            let mut k = 0i64;
            while !cur.is_zero() {
                if k > 0 {
                    fact = fact * F::from_i64(k);
                    c_pow = &c_pow * c;
                }
                out = &out + &(&c_pow * &lift(ring, &cur)).scale(&fact.inv());
                cur = d.apply(&cur);
                k += 1;
            }
            out
        })
        .collect();
    Ok(RingAutomorphism { base: base.clone(), ring: ring.clone(), images })
}

/// `exp(D)`, or `exp(tD)` on `A[t]` when `with_parameter` is set.
pub fn exp_derivation<F: Field>(
    d: &Derivation<F>,
    with_parameter: bool,
    cap: u32,
) -> Result<RingAutomorphism<F>, ExpLogError> {
    let base = d.ring();
    if with_parameter {
        let names = fresh_names(base, &["t"]);
        let ring = base.with_parameters(&names).map_err(|_| ExpLogError::PresentationMismatch)?;
        let t = ring.var(base.nvars());
        exp_scaled(d, &ring, &t, cap)
    } else {
        exp_scaled(d, base, &base.one(), cap)
    }
}

/// `A[names]` with the names made distinct from the generators of `A`.
pub fn parameter_ring<F: Field>(base: &Ring<F>, names: &[&str]) -> Ring<F> {
    base.with_parameters(&fresh_names(base, names)).expect("fresh names are distinct")
}

/// Iterates of `N = sigma - id` on `a` until zero: `[a, N a, N^2 a, ...]`.
fn n_iterates<F: Field>(
    sigma: &RingAutomorphism<F>,
    a: &RingElement<F>,
    cap: u32,
    label: &str,
) -> Result<Vec<RingElement<F>>, ExpLogError> {
    let mut out = Vec::new();
    let mut cur = a.clone();
    while !cur.is_zero() {
        if out.len() as u32 > cap {
            return Err(ExpLogError::CapExceeded { generator: label.to_string(), cap });
        }
        let next = &sigma.apply(&cur) - &cur;
        out.push(cur);
        cur = next;
    }
    Ok(out)
}

/// `sum_{k>=1} (-1)^{k+1} N^k(a) / k`.
fn log_series<F: Field>(
    sigma: &RingAutomorphism<F>,
    a: &RingElement<F>,
    cap: u32,
    label: &str,
) -> Result<RingElement<F>, ExpLogError> {
    let its = n_iterates(sigma, a, cap, label)?;
    let mut out = sigma.ring.zero();
    for (k, v) in its.iter().enumerate().skip(1) {
        let mut c = F::from_i64(k as i64).inv();
        if k % 2 == 0 {
            c = -c;
        }
        out = &out + &v.scale(&c);
    }
    Ok(out)
}

/// `log(sigma)` as a derivation of the ring `sigma` acts on; verified to obey
/// Leibniz on all generator pairs and to exponentiate back to `sigma`.
pub fn log_automorphism<F: Field>(sigma: &RingAutomorphism<F>, cap: u32) -> Result<Derivation<F>, ExpLogError> {
    let ring = &sigma.ring;
    let nbase = sigma.base.nvars();
    let mut images = Vec::with_capacity(ring.nvars());
    for j in 0..ring.nvars() {
        if j < nbase {
            images.push(log_series(sigma, &ring.var(j), cap, &ring.names()[j])?);
        } else {
            images.push(ring.zero());
        }
    }
    let l = Derivation::unchecked(ring, images).map_err(|e| ExpLogError::NotDerivation { reason: e.to_string() })?;
    l.check_well_defined()
        .map_err(|w| ExpLogError::NotDerivation { reason: format!("does not preserve the relation: {w}") })?;
    for a in 0..nbase {
        for b in a..nbase {
            let (xa, xb) = (ring.var(a), ring.var(b));
            let lhs = log_series(sigma, &(&xa * &xb), cap, "product")?;
            let rhs = &(&xa * &l.apply(&xb)) + &(&xb * &l.apply(&xa));
            if lhs != rhs {
                return Err(ExpLogError::NotDerivation {
                    reason: format!("Leibniz fails on {}*{}: {} vs {}", ring.names()[a], ring.names()[b], lhs, rhs),
                });
            }
        }
    }
    let back = exp_scaled(&l, ring, &ring.one(), cap)
        .map_err(|e| ExpLogError::NotDerivation { reason: format!("round trip failed: {e}") })?;
    let back = RingAutomorphism { base: sigma.base.clone(), ring: ring.clone(), images: back.images[..nbase].to_vec() };
    if back != *sigma {
        return Err(ExpLogError::NotDerivation { reason: format!("exp(log(sigma)) = {back}") });
    }
    Ok(l)
}

/// Restricts a derivation of `A[params]` that kills the parameters to `A`.
pub fn restrict_to_base<F: Field>(d: &Derivation<F>, base: &Ring<F>) -> Option<Derivation<F>> {
    let n = base.nvars();
    if d.images()[n..].iter().any(|e| !e.is_zero()) {
        return None;
    }
    let images = d.images()[..n]
        .iter()
        .map(|e| e.value().truncate_vars(n).map(|p| base.element_unchecked(p)))
        .collect::<Option<Vec<_>>>()?;
    Derivation::unchecked(base, images).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::DEFAULT_CAP;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn ml() -> (Ring<Rational>, Derivation<Rational>) {
        let v = |i| MultiPoly::<Rational>::var(4, i);
        let r = &(&(&v(0).pow(2) * &v(1)) + &v(0)) + &(&v(2).pow(2) + &v(3).pow(3));
        let ring = Ring::new(&["x", "y", "z", "t"], Some(r), true, true).unwrap();
        let x2 = ring.var(0).pow(2);
        let d1 = Derivation::new(&ring, vec![ring.zero(), ring.var(2).scale(&q(2)), -&x2, ring.zero()]).unwrap();
        (ring, d1)
    }

    #[test]
    fn translation() {
        let plane = Ring::<Rational>::polynomial(&["X", "Y"]).unwrap();
        let e = exp_derivation(&Derivation::partial(&plane, 0), true, DEFAULT_CAP).unwrap();
        assert_eq!(e.to_string(), "X -> X + t, Y -> Y");
        assert_eq!(e.parameter_names(), ["t".to_string()]);
        let zero = exp_derivation(&Derivation::zero(&plane), false, DEFAULT_CAP).unwrap();
        assert!(zero.is_identity());
    }

    #[test]
    fn makar_limanov_exp() {
        let (ring, d1) = ml();
        let e = exp_derivation(&d1, false, DEFAULT_CAP).unwrap();
        let (x, y, z, t) = (ring.var(0), ring.var(1), ring.var(2), ring.var(3));
        assert_eq!(e.images()[1], &(&y + &z.scale(&q(2))) - &x.pow(2));
        assert_eq!(e.images()[2], &z - &x.pow(2));
        assert_eq!(e.images()[0], x);
        assert_eq!(e.images()[3], t);
        assert!(e.relation_image().is_zero());

        let inv = exp_derivation(&d1.scale(&q(-1)), false, DEFAULT_CAP).unwrap();
        assert!(e.compose(&inv).unwrap().is_identity());
        assert_eq!(log_automorphism(&e, DEFAULT_CAP).unwrap(), d1);
    }

    #[test]
    fn logs() {
        let line = Ring::<Rational>::polynomial(&["X"]).unwrap();
        let shift = RingAutomorphism::new(&line, &line, vec![&line.var(0) + &line.one()]).unwrap();
        assert_eq!(log_automorphism(&shift, DEFAULT_CAP).unwrap(), Derivation::partial(&line, 0));
        assert!(log_automorphism(&RingAutomorphism::identity(&line), DEFAULT_CAP).unwrap().is_zero());
        let scaling = RingAutomorphism::new(&line, &line, vec![line.var(0).scale(&q(2))]).unwrap();
        assert!(matches!(log_automorphism(&scaling, 10), Err(ExpLogError::CapExceeded { .. })));
    }

    #[test]
    fn flow_law() {
        let plane = Ring::<Rational>::polynomial(&["X", "Y"]).unwrap();
        let d = Derivation::new(&plane, vec![plane.zero(), plane.var(0).pow(2)]).unwrap();
        let st = parameter_ring(&plane, &["s", "t"]);
        let (s, t) = (st.var(2), st.var(3));
        let es = exp_scaled(&d, &st, &s, DEFAULT_CAP).unwrap();
        let et = exp_scaled(&d, &st, &t, DEFAULT_CAP).unwrap();
        let est = exp_scaled(&d, &st, &(&s + &t), DEFAULT_CAP).unwrap();
        assert_eq!(es.compose(&et).unwrap(), est);
        assert!(matches!(exp_scaled(&d, &st, &st.var(0), DEFAULT_CAP), Err(ExpLogError::CoefficientNotParameter(_))));
    }

    #[test]
    fn parameter_name_avoids_ring_variables() {
        let (_, d1) = ml();
        let e = exp_derivation(&d1, true, DEFAULT_CAP).unwrap();
        assert_eq!(e.parameter_names(), ["t1".to_string()]);
        let l = log_automorphism(&e, DEFAULT_CAP).unwrap();
        let ring = e.ring();
        let t1 = ring.var(4);
        assert_eq!(l.images()[2], &t1 * &lift(ring, &d1.images()[2]));
        assert!(restrict_to_base(&l, d1.ring()).is_none());
        let plain = log_automorphism(&exp_derivation(&d1, false, DEFAULT_CAP).unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!(restrict_to_base(&plain, d1.ring()).unwrap(), d1);
    }
}
