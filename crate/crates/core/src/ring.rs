//! Presented rings `A = k[X_1..X_m]/(r)` with at most one relation.
//!
//! Elements are stored as normal forms modulo `{r}`, which is already a
//! Gröbner basis of `(r)`; equality of elements is equality of normal forms.
//! Factoriality of `A` and triviality of its units are declared by the user
//! and trusted.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use crate::field::Field;
use crate::groebner::{GroebnerBasis, NormalForm};
use crate::poly::{Monomial, MultiPoly, PolyError, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("relation must be a non-constant polynomial")]
    ConstantRelation,
    #[error("element has {got} variables, ring has {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("division by zero in the ring")]
    DivisionByZero,
    #[error("elements belong to different rings")]
    PresentationMismatch,
    #[error("expected a non-constant element")]
    ConstantElement,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingPresentation<F> {
    names: Vec<String>,
    relation: Option<MultiPoly<F>>,
    declared_ufd: bool,
    declared_units_trivial: bool,
}

/// Shared handle to a presentation. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Ring<F>(Arc<RingPresentation<F>>);

impl<F: PartialEq> PartialEq for Ring<F> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl<F: Eq> Eq for Ring<F> {}

impl<F: Field> Ring<F> {
    /// A polynomial ring (no relation), declared factorial with trivial units.
    pub fn polynomial<S: AsRef<str>>(names: &[S]) -> Result<Self, RingError> {
        Self::new(names, None, true, true)
    }

    pub fn new<S: AsRef<str>>(
        names: &[S],
        relation: Option<MultiPoly<F>>,
        declared_ufd: bool,
        declared_units_trivial: bool,
    ) -> Result<Self, RingError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.clone()) {
                return Err(RingError::DuplicateVariable(n.clone()));
            }
        }
        if let Some(r) = &relation {
            if r.nvars() != names.len() {
                return Err(RingError::ArityMismatch { expected: names.len(), got: r.nvars() });
            }
            if r.is_constant() {
                return Err(RingError::ConstantRelation);
            }
        }
        Ok(Ring(Arc::new(RingPresentation {
            names,
            relation: relation.map(|r| r.monic()),
            declared_ufd,
            declared_units_trivial,
        })))
    }

    pub fn nvars(&self) -> usize {
        self.0.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.names.iter().position(|n| n == name)
    }

    /// The defining relation, made monic.
    pub fn relation(&self) -> Option<&MultiPoly<F>> {
        self.0.relation.as_ref()
    }

    pub fn declared_ufd(&self) -> bool {
        self.0.declared_ufd
    }

    pub fn declared_units_trivial(&self) -> bool {
        self.0.declared_units_trivial
    }

    /// Cheap irreducibility heuristic: a relation of degree one in some
    /// variable is reported as plausible, anything else gets a warning.
    pub fn irreducibility_warning(&self) -> Option<String> {
        let r = self.relation()?;
        if (0..self.nvars()).any(|v| r.degree_in(v) == 1) {
            None
        } else {
            Some("relation has degree != 1 in every variable; irreducibility is trusted, not checked".into())
        }
    }

    /// Normal form of `p` modulo the relation.
    pub fn normalize(&self, p: &MultiPoly<F>) -> Result<RingElement<F>, RingError> {
        if p.nvars() != self.nvars() {
            return Err(RingError::ArityMismatch { expected: self.nvars(), got: p.nvars() });
        }
        Ok(RingElement { ring: self.clone(), value: self.0.reduce(p) })
    }

    pub(crate) fn element_unchecked(&self, p: MultiPoly<F>) -> RingElement<F> {
        RingElement { ring: self.clone(), value: self.0.reduce(&p) }
    }

    pub fn var(&self, i: usize) -> RingElement<F> {
        self.element_unchecked(MultiPoly::var(self.nvars(), i))
    }

    pub fn vars(&self) -> Vec<RingElement<F>> {
        (0..self.nvars()).map(|i| self.var(i)).collect()
    }

    pub fn constant(&self, c: F) -> RingElement<F> {
        self.element_unchecked(MultiPoly::constant(self.nvars(), c))
    }

    pub fn zero(&self) -> RingElement<F> {
        self.constant(F::zero())
    }

    pub fn one(&self) -> RingElement<F> {
        self.constant(F::one())
    }

    pub fn presentation(&self) -> &RingPresentation<F> {
        &self.0
    }

    /// Standard monomials of degree at most `d`: a basis of the elements of
    /// degree at most `d` in normal form.
    pub fn standard_monomials(&self, max_degree: u32) -> Vec<Monomial> {
        self.0.standard_monomials(self.nvars(), max_degree)
    }

    /// `A[params]`: the same presentation with extra variables appended.
    pub fn with_parameters<S: AsRef<str>>(&self, params: &[S]) -> Result<Self, RingError> {
        let mut names = self.0.names.clone();
        names.extend(params.iter().map(|s| s.as_ref().to_string()));
        let relation = self.0.relation.as_ref().map(|r| r.extend_vars(params.len()));
        Ring::new(&names, relation, self.0.declared_ufd, self.0.declared_units_trivial)
    }

    /// Ideal `(f - alpha, r)` describing the fiber of `f` over `alpha`.
    pub fn fiber_ring(&self, f: &RingElement<F>, alpha: &F) -> Result<IdealHandle<F>, RingError> {
        if f.ring != *self {
            return Err(RingError::PresentationMismatch);
        }
        if f.value.is_constant() {
            return Err(RingError::ConstantElement);
        }
        let shifted = &f.value - &MultiPoly::constant(self.nvars(), alpha.clone());
        let mut gens = vec![shifted];
        gens.extend(self.relation().cloned());
        Ok(IdealHandle::new(self.nvars(), gens))
    }

    /// `Some(c)` with `a = d * c` in `A`, or `None` when `d` does not divide `a`.
    pub fn divides(&self, a: &RingElement<F>, d: &RingElement<F>) -> Result<Option<RingElement<F>>, RingError> {
        if a.ring != *self || d.ring != *self {
            return Err(RingError::PresentationMismatch);
        }
        if d.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        match self.relation() {
            None => Ok(a.value.exact_divide(&d.value)?.map(|c| self.element_unchecked(c))),
            Some(r) => {
                let ideal = IdealHandle::new(self.nvars(), vec![d.value.clone(), r.clone()]);
                Ok(ideal.membership(&a.value).map(|cof| self.element_unchecked(cof[0].clone())))
            }
        }
    }
}

impl<F: Field> NormalForm<F> for RingPresentation<F> {
    fn reduce(&self, p: &MultiPoly<F>) -> MultiPoly<F> {
        match &self.relation {
            None => p.clone(),
            Some(r) => p.div_rem(r).expect("relation is nonzero").1,
        }
    }

    fn leading_monomials(&self) -> Vec<Monomial> {
        self.relation.iter().filter_map(|r| r.leading_monomial().cloned()).collect()
    }
}

impl<F: Field> NormalForm<F> for Ring<F> {
    fn reduce(&self, p: &MultiPoly<F>) -> MultiPoly<F> {
        self.0.reduce(p)
    }

    fn leading_monomials(&self) -> Vec<Monomial> {
        self.0.leading_monomials()
    }
}

/// An element of a presented ring, held in normal form.
#[derive(Clone, Debug)]
pub struct RingElement<F> {
    ring: Ring<F>,
    value: MultiPoly<F>,
}

impl<F: PartialEq> PartialEq for RingElement<F> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.ring == other.ring
    }
}
impl<F: Eq> Eq for RingElement<F> {}

impl<F: Field> RingElement<F> {
    pub fn ring(&self) -> &Ring<F> {
        &self.ring
    }

    /// The normal-form representative.
    pub fn value(&self) -> &MultiPoly<F> {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.value.is_constant()
    }

    pub fn constant_value(&self) -> Option<F> {
        self.value.constant_value()
    }

    pub fn scale(&self, c: &F) -> Self {
        RingElement { ring: self.ring.clone(), value: self.value.scale(c) }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(self.ring.one(), |acc, _| &acc * self)
    }

    /// `q(self)` by Horner's rule.
    pub fn eval_uni(&self, q: &UniPoly<F>) -> Self {
        q.coeffs().iter().rev().fold(self.ring.zero(), |acc, c| &(&acc * self) + &self.ring.constant(c.clone()))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.value.total_degree()
    }
}

impl<F: Field> fmt::Display for RingElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.display(self.ring.names()).fmt(f)
    }
}

impl<F: Field> Add for &RingElement<F> {
    type Output = RingElement<F>;
    fn add(self, rhs: &RingElement<F>) -> RingElement<F> {
        debug_assert!(self.ring == rhs.ring);
        RingElement { ring: self.ring.clone(), value: &self.value + &rhs.value }
    }
}

impl<F: Field> Sub for &RingElement<F> {
    type Output = RingElement<F>;
    fn sub(self, rhs: &RingElement<F>) -> RingElement<F> {
        debug_assert!(self.ring == rhs.ring);
        RingElement { ring: self.ring.clone(), value: &self.value - &rhs.value }
    }
}

impl<F: Field> Mul for &RingElement<F> {
    type Output = RingElement<F>;
    fn mul(self, rhs: &RingElement<F>) -> RingElement<F> {
        debug_assert!(self.ring == rhs.ring);
        self.ring.element_unchecked(&self.value * &rhs.value)
    }
}

impl<F: Field> Neg for &RingElement<F> {
    type Output = RingElement<F>;
    fn neg(self) -> RingElement<F> {
        RingElement { ring: self.ring.clone(), value: -&self.value }
    }
}

/// `Some(g)` with `g(f) = b` modulo `nf`, searching `deg g <= max_degree`.
///
/// Compares normal forms of `1, f, f^2, ...`; when those are linearly
/// dependent (which cannot happen for non-constant `f` in a domain over a
/// field that is algebraically closed in it) an arbitrary solution is returned.
pub fn express_in_powers<F: Field>(
    b: &MultiPoly<F>,
    f: &MultiPoly<F>,
    max_degree: u32,
    nf: &impl NormalForm<F>,
) -> Option<UniPoly<F>> {
    let b = nf.reduce(b);
    if let Some(c) = b.constant_value() {
        return Some(UniPoly::constant(c));
    }
    let mut powers = vec![nf.reduce(&MultiPoly::one(f.nvars()))];
    let fr = nf.reduce(f);
    for _ in 0..max_degree {
        let next = nf.reduce(&(&powers[powers.len() - 1] * &fr));
        powers.push(next);
    }
    let mut columns = powers.clone();
    columns.push(b);
    let (mat, _) = crate::poly::linalg::coefficient_matrix(&columns);
    let ncols = powers.len();
    let a: Vec<Vec<F>> = mat.iter().map(|row| row[..ncols].to_vec()).collect();
    let rhs: Vec<F> = mat.iter().map(|row| row[ncols].clone()).collect();
    crate::poly::linalg::solve(&a, &rhs, ncols).map(UniPoly::new)
}

/// `Some(g)` with `g(gens) = b` modulo `nf`, where `g` has `gens.len()`
/// variables and total degree at most `max_degree`.
pub fn express_in<F: Field>(
    b: &MultiPoly<F>,
    gens: &[MultiPoly<F>],
    max_degree: u32,
    nf: &impl NormalForm<F>,
) -> Option<MultiPoly<F>> {
    let k = gens.len();
    let monomials = Monomial::up_to_degree(k, max_degree);
    let mut columns: Vec<MultiPoly<F>> = monomials
        .iter()
        .map(|m| {
            let p = m.exponents().iter().zip(gens).fold(MultiPoly::one(b.nvars()), |acc, (&e, g)| &acc * &g.pow(e));
            nf.reduce(&p)
        })
        .collect();
    columns.push(nf.reduce(b));
    let (mat, _) = crate::poly::linalg::coefficient_matrix(&columns);
    let ncols = monomials.len();
    let a: Vec<Vec<F>> = mat.iter().map(|row| row[..ncols].to_vec()).collect();
    let rhs: Vec<F> = mat.iter().map(|row| row[ncols].clone()).collect();
    let sol = crate::poly::linalg::solve(&a, &rhs, ncols)?;
    Some(MultiPoly::from_terms(k, monomials.into_iter().zip(sol)))
}

/// An ideal of the ambient polynomial ring with a lazily computed Gröbner basis.
#[derive(Debug)]
pub struct IdealHandle<F> {
    nvars: usize,
    generators: Vec<MultiPoly<F>>,
    groebner: OnceLock<GroebnerBasis<F>>,
}

impl<F: Field> Clone for IdealHandle<F> {
    fn clone(&self) -> Self {
        IdealHandle { nvars: self.nvars, generators: self.generators.clone(), groebner: self.groebner.clone() }
    }
}

impl<F: Field> IdealHandle<F> {
    pub fn new(nvars: usize, generators: Vec<MultiPoly<F>>) -> Self {
        IdealHandle { nvars, generators, groebner: OnceLock::new() }
    }

    pub fn generators(&self) -> &[MultiPoly<F>] {
        &self.generators
    }

    pub fn groebner(&self) -> &GroebnerBasis<F> {
        self.groebner.get_or_init(|| GroebnerBasis::compute(self.nvars, &self.generators))
    }

    /// Cofactors `c` with `a = sum c_j * generators[j]` when `a` is in the ideal.
    pub fn membership(&self, a: &MultiPoly<F>) -> Option<Vec<MultiPoly<F>>> {
        if let Some(j) = self.generators.iter().position(|g| g == a) {
            let mut cof = vec![MultiPoly::zero(self.nvars); self.generators.len()];
            cof[j] = MultiPoly::one(self.nvars);
            return Some(cof);
        }
        self.groebner().membership(a)
    }

    pub fn contains(&self, a: &MultiPoly<F>) -> bool {
        self.groebner().is_zero_mod(a)
    }
}

impl<F: Field> NormalForm<F> for IdealHandle<F> {
    fn reduce(&self, p: &MultiPoly<F>) -> MultiPoly<F> {
        self.groebner().reduce(p)
    }

    fn leading_monomials(&self) -> Vec<Monomial> {
        self.groebner().leading_monomials()
    }
}
