//! k-derivations of a presented ring.
//!
//! A derivation is stored by its images on the ambient generators; it acts on
//! a representative by `D(a) = sum_j D(x_j) * da/dX_j`. This is well defined on
//! `A = k[X]/(r)` exactly when `D(r)` lies in `(r)`, which construction checks.
//!
//! Local nilpotency is tested on generators only. That is enough: if
//! `D^{m_j}(x_j) = 0` for every generator, the Leibniz rule gives
//! `D^{m_1 + ... + m_k - k + 1}(x_1 ... x_k) = 0` for any monomial, so every
//! element is killed by a finite power of `D`.

use std::fmt;

use crate::field::Field;
use crate::groebner::NormalForm;
use crate::poly::linalg::{canonical_polys, nullspace, stacked_coefficient_matrix};
use crate::poly::{MultiPoly, UniPoly};
use crate::ring::{express_in_powers, Ring, RingElement};
use crate::slice::PreSlice;

/// Default iteration cap for nilpotency checks.
pub const DEFAULT_CAP: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DerivationError {
    #[error("derivation is not well defined on the quotient: D(r) reduces to {witness}")]
    NotWellDefined { witness: String },
    #[error("expected {expected} generator images, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("derivations live on different rings")]
    PresentationMismatch,
    #[error("D^{cap}({generator}) is still nonzero (last iterate {last_iterate}); not certified locally nilpotent within cap {cap}")]
    CapExceeded { generator: String, last_iterate: String, cap: u32 },
    #[error("D{index}(f) = {image} is nonzero")]
    NotInKernel { index: usize, image: String },
    #[error("a derivation system needs at least one derivation")]
    EmptySystem,
    #[error("ring is declared non-UFD (ufd = false); commuting-derivation results require a factorial ring")]
    NotFactorial,
    #[error("ring is not declared to have trivial units (units_trivial = false)")]
    NontrivialUnits,
    #[error("D{i} and D{j} do not commute: [D{i}, D{j}] = {commutator}")]
    NotCommuting { i: usize, j: usize, commutator: String },
    #[error("derivations are dependent over A: rank {rank} < {n}")]
    Dependent { rank: usize, n: usize },
    #[error("kernel generator must be non-constant")]
    ConstantKernel,
    #[error("pre-slice {index} is invalid: {reason}")]
    InvalidPreSlice { index: usize, reason: String },
}

#[derive(Clone, Debug)]
pub struct Derivation<F> {
    ring: Ring<F>,
    images: Vec<RingElement<F>>,
}

impl<F: PartialEq> PartialEq for Derivation<F> {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
    }
}
impl<F: Eq> Eq for Derivation<F> {}

impl<F: Field> Derivation<F> {
    /// Builds a derivation and checks that it descends to the quotient.
    pub fn new(ring: &Ring<F>, images: Vec<RingElement<F>>) -> Result<Self, DerivationError> {
        let d = Self::unchecked(ring, images)?;
        d.check_well_defined().map_err(|w| DerivationError::NotWellDefined { witness: w.to_string() })?;
        Ok(d)
    }

    /// Builds a derivation of the ambient polynomial ring without checking the relation.
    pub fn unchecked(ring: &Ring<F>, images: Vec<RingElement<F>>) -> Result<Self, DerivationError> {
        if images.len() != ring.nvars() {
            return Err(DerivationError::ArityMismatch { expected: ring.nvars(), got: images.len() });
        }
        if images.iter().any(|e| e.ring() != ring) {
            return Err(DerivationError::PresentationMismatch);
        }
        Ok(Derivation { ring: ring.clone(), images })
    }

    pub fn zero(ring: &Ring<F>) -> Self {
        Derivation { ring: ring.clone(), images: vec![ring.zero(); ring.nvars()] }
    }

    /// `d/dX_var`; only well defined when the relation does not involve that variable.
    pub fn partial(ring: &Ring<F>, var: usize) -> Self {
        let mut images = vec![ring.zero(); ring.nvars()];
        images[var] = ring.one();
        Derivation { ring: ring.clone(), images }
    }

    pub fn ring(&self) -> &Ring<F> {
        &self.ring
    }

    pub fn images(&self) -> &[RingElement<F>] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(RingElement::is_zero)
    }

    /// `sum_j D(x_j) * dp/dX_j` on a representative, without reduction.
    pub fn apply_poly(&self, p: &MultiPoly<F>) -> MultiPoly<F> {
        let mut out = MultiPoly::zero(p.nvars());
        for (j, img) in self.images.iter().enumerate() {
            if img.is_zero() {
                continue;
            }
            let dp = p.derivative(j);
            if !dp.is_zero() {
                out = &out + &(&dp * img.value());
            }
        }
        out
    }

    /// Applies the derivation and reduces with `nf` (a ring or a fiber ideal).
    pub fn apply_mod(&self, p: &MultiPoly<F>, nf: &impl NormalForm<F>) -> MultiPoly<F> {
        nf.reduce(&self.apply_poly(p))
    }

    pub fn apply(&self, a: &RingElement<F>) -> RingElement<F> {
        self.ring.element_unchecked(self.apply_poly(a.value()))
    }

    /// `D^k(a)`.
    pub fn iterate(&self, a: &RingElement<F>, k: u32) -> RingElement<F> {
        (0..k).fold(a.clone(), |acc, _| self.apply(&acc))
    }

    /// `Err(witness)` with the normal form of `D(r)` when it is nonzero.
    pub fn check_well_defined(&self) -> Result<(), RingElement<F>> {
        let Some(r) = self.ring.relation() else { return Ok(()) };
        let image = self.ring.element_unchecked(self.apply_poly(r));
        if image.is_zero() {
            Ok(())
        } else {
            Err(image)
        }
    }

    fn same_ring(&self, other: &Self) -> Result<(), DerivationError> {
        if self.ring != other.ring {
            return Err(DerivationError::PresentationMismatch);
        }
        Ok(())
    }

    /// `[D, E] = D E - E D`.
    pub fn commutator(&self, other: &Self) -> Result<Self, DerivationError> {
        self.same_ring(other)?;
        let images = self.images.iter().zip(&other.images).map(|(d, e)| &self.apply(e) - &other.apply(d)).collect();
        Ok(Derivation { ring: self.ring.clone(), images })
    }

    pub fn add(&self, other: &Self) -> Result<Self, DerivationError> {
        self.same_ring(other)?;
        let images = self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect();
        Ok(Derivation { ring: self.ring.clone(), images })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, DerivationError> {
        self.same_ring(other)?;
        let images = self.images.iter().zip(&other.images).map(|(a, b)| a - b).collect();
        Ok(Derivation { ring: self.ring.clone(), images })
    }

    pub fn scale(&self, c: &F) -> Self {
        Derivation { ring: self.ring.clone(), images: self.images.iter().map(|e| e.scale(c)).collect() }
    }

    /// `a * D`.
    pub fn mul_element(&self, a: &RingElement<F>) -> Self {
        Derivation { ring: self.ring.clone(), images: self.images.iter().map(|e| a * e).collect() }
    }

    /// `sum_i coeffs[i] * ds[i]`.
    pub fn combination(ring: &Ring<F>, coeffs: &[RingElement<F>], ds: &[Derivation<F>]) -> Self {
        let mut images = vec![ring.zero(); ring.nvars()];
        for (c, d) in coeffs.iter().zip(ds) {
            if c.is_zero() {
                continue;
            }
            for (img, di) in images.iter_mut().zip(&d.images) {
                *img = &*img + &(c * di);
            }
        }
        Derivation { ring: ring.clone(), images }
    }

    /// Nilpotency indices on the generators, or `CapExceeded`.
    pub fn is_locally_nilpotent(&self, cap: u32) -> Result<NilpotencyCertificate, DerivationError> {
        let mut indices = Vec::with_capacity(self.ring.nvars());
        for j in 0..self.ring.nvars() {
            let mut cur = self.ring.var(j);
            let mut m = 0;
            while !cur.is_zero() {
                if m == cap {
                    return Err(DerivationError::CapExceeded {
                        generator: self.ring.names()[j].clone(),
                        last_iterate: cur.to_string(),
                        cap,
                    });
                }
                cur = self.apply(&cur);
                m += 1;
            }
            indices.push(m);
        }
        Ok(NilpotencyCertificate { names: self.ring.names().to_vec(), indices, cap })
    }

    /// Smallest `m` with `D^m(a) = 0`, if at most `cap`.
    pub fn nilpotency_index(&self, a: &RingElement<F>, cap: u32) -> Option<u32> {
        let mut cur = a.clone();
        for m in 0..=cap {
            if cur.is_zero() {
                return Some(m);
            }
            cur = self.apply(&cur);
        }
        None
    }
}

impl<F: Field> fmt::Display for Derivation<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, img) in self.images.iter().enumerate() {
            if img.is_zero() {
                continue;
            }
            let var = &self.ring.names()[j];
            let v = img.value();
            let (neg, body) = if v.len() == 1 {
                let (m, c) = v.leading_term().expect("single term");
                let neg = c.is_negative();
                let abs = MultiPoly::term(m.clone(), if neg { -c.clone() } else { c.clone() });
                if abs.is_constant() && abs.constant_value().is_some_and(|c| c == F::one()) {
                    (neg, format!("d/d{var}"))
                } else {
                    (neg, format!("{}*d/d{var}", abs.display(self.ring.names())))
                }
            } else {
                (false, format!("({})*d/d{var}", v.display(self.ring.names())))
            };
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Per-generator nilpotency indices: `D^{m_j}(x_j) = 0` and `D^{m_j - 1}(x_j) != 0`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct NilpotencyCertificate {
    pub names: Vec<String>,
    pub indices: Vec<u32>,
    pub cap: u32,
}

impl NilpotencyCertificate {
    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|k| self.indices[k])
    }

    /// An upper bound for the nilpotency index on any element of total degree `d`.
    pub fn bound_for_degree(&self, d: u32) -> u32 {
        let worst = self.indices.iter().copied().max().unwrap_or(1).max(1);
        d * (worst - 1) + 1
    }
}

impl fmt::Display for NilpotencyCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (n, m)) in self.names.iter().zip(&self.indices).enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}:{m}")?;
        }
        write!(f, "}}")
    }
}

/// A nonzero maximal minor of the matrix `(D_i(x_j))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minor<F> {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: RingElement<F>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceRank<F> {
    pub rank: usize,
    pub witness: Option<Minor<F>>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn det<F: Field>(ring: &Ring<F>, m: &[Vec<RingElement<F>>]) -> RingElement<F> {
    match m.len() {
        0 => ring.one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = ring.zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<RingElement<F>>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
                    .collect();
                let term = &m[0][j] * &det(ring, &sub);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// Rank over the fraction field of `A` of `(D_i(x_j))`, with the simplest
/// nonzero maximal minor as witness (fewest variables, then fewest terms,
/// then lowest degree, then first rows/columns).
pub fn independence_rank<F: Field>(ds: &[Derivation<F>]) -> Result<IndependenceRank<F>, DerivationError> {
    let Some(first) = ds.first() else { return Err(DerivationError::EmptySystem) };
    let ring = first.ring.clone();
    for d in ds {
        first.same_ring(d)?;
    }
    let n = ds.len();
    let m = ring.nvars();
    for k in (1..=n.min(m)).rev() {
        let mut best: Option<Minor<F>> = None;
        for rows in combinations(n, k) {
            for cols in combinations(m, k) {
                let sub: Vec<Vec<RingElement<F>>> =
                    rows.iter().map(|&i| cols.iter().map(|&j| ds[i].images[j].clone()).collect()).collect();
                let value = det(&ring, &sub);
                if value.is_zero() {
                    continue;
                }
                let key = |mi: &Minor<F>| {
                    let v = mi.value.value();
                    (v.support().len(), v.len(), v.total_degree().unwrap_or(0))
                };
                let cand = Minor { rows: rows.clone(), cols: cols.clone(), value };
                if best.as_ref().is_none_or(|b| key(&cand) < key(b)) {
                    best = Some(cand);
                }
            }
        }
        if let Some(w) = best {
            return Ok(IndependenceRank { rank: k, witness: Some(w) });
        }
    }
    Ok(IndependenceRank { rank: 0, witness: None })
}

/// Basis of `{a : deg a <= max_degree, D(a) = 0 for all D in ds}` as elements of
/// `A`, canonical (distinct leading monomials) and ascending.
pub fn joint_kernel_up_to<F: Field>(ring: &Ring<F>, ds: &[&Derivation<F>], max_degree: u32) -> Vec<RingElement<F>> {
    joint_kernel_mod(ds, ring, ring.nvars(), max_degree).into_iter().map(|p| ring.element_unchecked(p)).collect()
}

/// [`joint_kernel_up_to`] modulo an arbitrary ideal the derivations preserve,
/// such as a fiber ideal `(f - alpha, r)`.
pub fn joint_kernel_mod<F: Field>(
    ds: &[&Derivation<F>],
    nf: &impl NormalForm<F>,
    nvars: usize,
    max_degree: u32,
) -> Vec<MultiPoly<F>> {
    let monomials = nf.standard_monomials(nvars, max_degree);
    let columns: Vec<Vec<MultiPoly<F>>> = monomials
        .iter()
        .map(|m| {
            let p = MultiPoly::term(m.clone(), F::one());
            ds.iter().map(|d| d.apply_mod(&p, nf)).collect()
        })
        .collect();
    let mat = stacked_coefficient_matrix(&columns);
    let ns = nullspace(&mat, monomials.len());
    canonical_polys(&ns, &monomials)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelVerdict<F> {
    /// `D_i(f) = 0` for all `i`; no search was requested.
    CertifiedNecessary,
    /// Every joint-kernel element of degree at most `bound` is a polynomial in `f`.
    BoundedEvidence { bound: u32, kernel_dimension: usize },
    /// A joint-kernel element outside `k[f]` was found.
    Refuted { bound: u32, witness: RingElement<F> },
}

/// Checks `D_i(f) = 0` exactly, then searches the joint kernel up to
/// `degree_bound` for elements outside `k[f]`.
pub fn verify_kernel_generator<F: Field>(
    ds: &[Derivation<F>],
    f: &RingElement<F>,
    degree_bound: u32,
) -> Result<KernelVerdict<F>, DerivationError> {
    let Some(first) = ds.first() else { return Err(DerivationError::EmptySystem) };
    if f.is_constant() {
        return Err(DerivationError::ConstantKernel);
    }
    for (i, d) in ds.iter().enumerate() {
        let img = d.apply(f);
        if !img.is_zero() {
            return Err(DerivationError::NotInKernel { index: i + 1, image: img.to_string() });
        }
    }
    if degree_bound == 0 {
        return Ok(KernelVerdict::CertifiedNecessary);
    }
    let ring = first.ring.clone();
    let refs: Vec<&Derivation<F>> = ds.iter().collect();
    let kernel = joint_kernel_up_to(&ring, &refs, degree_bound);
    let solve_bound = degree_bound.max(1) * 2 + 2;
    for a in &kernel {
        if express_in_powers(a.value(), f.value(), solve_bound, &ring).is_none() {
            return Ok(KernelVerdict::Refuted { bound: degree_bound, witness: a.clone() });
        }
    }
    Ok(KernelVerdict::BoundedEvidence { bound: degree_bound, kernel_dimension: kernel.len() })
}

/// Lowest-degree non-constant joint-kernel element up to `max_degree`.
pub fn find_kernel_generator<F: Field>(ds: &[Derivation<F>], max_degree: u32) -> Option<RingElement<F>> {
    let ring = ds.first()?.ring.clone();
    let refs: Vec<&Derivation<F>> = ds.iter().collect();
    joint_kernel_up_to(&ring, &refs, max_degree).into_iter().find(|a| !a.is_constant())
}

/// Validated commuting, locally nilpotent, independent derivations with a
/// kernel generator `f`, optionally carrying pre-slices.
#[derive(Clone, Debug)]
pub struct DerivationSystem<F> {
    ring: Ring<F>,
    derivations: Vec<Derivation<F>>,
    kernel: RingElement<F>,
    certificates: Vec<NilpotencyCertificate>,
    independence: IndependenceRank<F>,
    preslices: Option<Vec<PreSlice<F>>>,
}

impl<F: Field> DerivationSystem<F> {
    pub fn new(derivations: Vec<Derivation<F>>, kernel: RingElement<F>, cap: u32) -> Result<Self, DerivationError> {
        let Some(first) = derivations.first() else { return Err(DerivationError::EmptySystem) };
        let ring = first.ring.clone();
        if !ring.declared_ufd() {
            return Err(DerivationError::NotFactorial);
        }
        if !ring.declared_units_trivial() {
            return Err(DerivationError::NontrivialUnits);
        }
        if kernel.ring() != &ring {
            return Err(DerivationError::PresentationMismatch);
        }
        for d in &derivations {
            first.same_ring(d)?;
            d.check_well_defined().map_err(|w| DerivationError::NotWellDefined { witness: w.to_string() })?;
        }
        for i in 0..derivations.len() {
            for j in i + 1..derivations.len() {
                let c = derivations[i].commutator(&derivations[j])?;
                if !c.is_zero() {
                    return Err(DerivationError::NotCommuting { i: i + 1, j: j + 1, commutator: c.to_string() });
                }
            }
        }
        let certificates = derivations.iter().map(|d| d.is_locally_nilpotent(cap)).collect::<Result<Vec<_>, _>>()?;
        let independence = independence_rank(&derivations)?;
        if independence.rank < derivations.len() {
            return Err(DerivationError::Dependent { rank: independence.rank, n: derivations.len() });
        }
        verify_kernel_generator(&derivations, &kernel, 0)?;
        Ok(DerivationSystem { ring, derivations, kernel, certificates, independence, preslices: None })
    }

    /// Attaches pre-slices after checking `D_j(p_i) = 0` for `j != i` and `D_i(p_i) = q_i(f) != 0`.
    pub fn with_preslices(mut self, preslices: Vec<PreSlice<F>>) -> Result<Self, DerivationError> {
        if preslices.len() != self.derivations.len() {
            return Err(DerivationError::InvalidPreSlice {
                index: preslices.len(),
                reason: format!("expected {} pre-slices", self.derivations.len()),
            });
        }
        for (k, ps) in preslices.iter().enumerate() {
            if ps.index != k {
                return Err(DerivationError::InvalidPreSlice { index: k + 1, reason: "out of order".into() });
            }
            if let Err(reason) = ps.check(&self) {
                return Err(DerivationError::InvalidPreSlice { index: k + 1, reason });
            }
        }
        self.preslices = Some(preslices);
        Ok(self)
    }

    pub fn ring(&self) -> &Ring<F> {
        &self.ring
    }

    pub fn derivations(&self) -> &[Derivation<F>] {
        &self.derivations
    }

    pub fn derivation(&self, i: usize) -> &Derivation<F> {
        &self.derivations[i]
    }

    pub fn len(&self) -> usize {
        self.derivations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.derivations.is_empty()
    }

    pub fn kernel(&self) -> &RingElement<F> {
        &self.kernel
    }

    pub fn certificates(&self) -> &[NilpotencyCertificate] {
        &self.certificates
    }

    pub fn independence(&self) -> &IndependenceRank<F> {
        &self.independence
    }

    pub fn preslices(&self) -> Option<&[PreSlice<F>]> {
        self.preslices.as_deref()
    }

    /// The `q_i`, when pre-slices are attached.
    pub fn qs(&self) -> Option<Vec<UniPoly<F>>> {
        self.preslices.as_ref().map(|ps| ps.iter().map(|p| p.q.clone()).collect())
    }

    /// Largest nilpotency index over all generators and derivations.
    pub fn max_index(&self) -> u32 {
        self.certificates.iter().flat_map(|c| c.indices.iter().copied()).max().unwrap_or(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    pub(crate) fn ml_ring() -> Ring<Rational> {
        let v = |i| MultiPoly::<Rational>::var(4, i);
        let r = &(&(&v(0).pow(2) * &v(1)) + &v(0)) + &(&v(2).pow(2) + &v(3).pow(3));
        Ring::new(&["x", "y", "z", "t"], Some(r), true, true).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    /// D1 = 2z d/dy - x^2 d/dz, D2 = 3t^2 d/dy - x^2 d/dt
    pub(crate) fn ml_pair(ring: &Ring<Rational>) -> (Derivation<Rational>, Derivation<Rational>) {
        let (x, z, t) = (ring.var(0), ring.var(2), ring.var(3));
        let x2 = x.pow(2);
        let d1 = Derivation::new(ring, vec![ring.zero(), z.scale(&q(2)), -&x2, ring.zero()]).unwrap();
        let d2 = Derivation::new(ring, vec![ring.zero(), t.pow(2).scale(&q(3)), ring.zero(), -&x2]).unwrap();
        (d1, d2)
    }

    #[test]
    fn apply_examples() {
        let ring = ml_ring();
        let (d1, _) = ml_pair(&ring);
        assert_eq!(d1.apply(&ring.var(2)), -&ring.var(0).pow(2));
        assert!(d1.apply(&ring.constant(q(7))).is_zero());
        let r = ring.relation().unwrap();
        assert!(d1.apply_poly(r).is_zero());
    }

    #[test]
    fn well_definedness() {
        let ring = ml_ring();
        let (d1, d2) = ml_pair(&ring);
        assert!(d1.check_well_defined().is_ok());
        assert!(d2.check_well_defined().is_ok());
        let dx = Derivation::partial(&ring, 0);
        let w = dx.check_well_defined().unwrap_err();
        assert_eq!(w.to_string(), "2*x*y + 1");
        assert!(matches!(Derivation::new(&ring, dx.images().to_vec()), Err(DerivationError::NotWellDefined { .. })));
    }

    #[test]
    fn commutators() {
        let ring = ml_ring();
        let (d1, d2) = ml_pair(&ring);
        assert!(d1.commutator(&d2).unwrap().is_zero());

        let plane = Ring::<Rational>::polynomial(&["X", "Y", "Z"]).unwrap();
        let e1 = Derivation::new(&plane, vec![plane.var(2), plane.one(), plane.zero()]).unwrap();
        let e2 = Derivation::partial(&plane, 1);
        assert!(e1.commutator(&e2).unwrap().is_zero());

        let line = Ring::<Rational>::polynomial(&["X"]).unwrap();
        let dx = Derivation::partial(&line, 0);
        let euler = dx.mul_element(&line.var(0));
        assert_eq!(dx.commutator(&euler).unwrap(), dx);
    }

    #[test]
    fn nilpotency() {
        let ring = ml_ring();
        let (d1, _) = ml_pair(&ring);
        let cert = d1.is_locally_nilpotent(DEFAULT_CAP).unwrap();
        assert_eq!(cert.indices, vec![1, 3, 2, 1]);
        assert_eq!(cert.to_string(), "{x:1, y:3, z:2, t:1}");

        let plane = Ring::<Rational>::polynomial(&["X", "Y"]).unwrap();
        assert_eq!(Derivation::partial(&plane, 1).is_locally_nilpotent(8).unwrap().indices, vec![1, 2]);

        let line = Ring::<Rational>::polynomial(&["X"]).unwrap();
        let euler = Derivation::partial(&line, 0).mul_element(&line.var(0));
        assert!(matches!(euler.is_locally_nilpotent(10), Err(DerivationError::CapExceeded { cap: 10, .. })));
    }

    #[test]
    fn independence() {
        let ring = ml_ring();
        let (d1, d2) = ml_pair(&ring);
        let ir = independence_rank(&[d1, d2]).unwrap();
        assert_eq!(ir.rank, 2);
        let w = ir.witness.unwrap();
        assert_eq!(w.cols, vec![2, 3]);
        assert_eq!(w.value, ring.var(0).pow(4));

        let plane = Ring::<Rational>::polynomial(&["X", "Y", "Z"]).unwrap();
        let dx = Derivation::partial(&plane, 0);
        assert_eq!(independence_rank(&[dx.clone(), dx]).unwrap().rank, 1);
        let e1 = Derivation::new(&plane, vec![plane.var(2), plane.one(), plane.zero()]).unwrap();
        let e2 = Derivation::partial(&plane, 1);
        let ir = independence_rank(&[e1, e2]).unwrap();
        assert_eq!(ir.rank, 2);
        assert_eq!(ir.witness.unwrap().value, plane.var(2));
    }

    #[test]
    fn kernel_generator() {
        let ring = ml_ring();
        let (d1, d2) = ml_pair(&ring);
        let ds = vec![d1, d2];
        assert!(matches!(
            verify_kernel_generator(&ds, &ring.var(0), 2).unwrap(),
            KernelVerdict::BoundedEvidence { bound: 2, .. }
        ));
        match verify_kernel_generator(&ds, &ring.var(1), 2) {
            Err(DerivationError::NotInKernel { index: 1, image }) => assert_eq!(image, "2*z"),
            other => panic!("unexpected {other:?}"),
        }

        let plane = Ring::<Rational>::polynomial(&["X", "Y", "Z"]).unwrap();
        let e1 = Derivation::new(&plane, vec![plane.var(2), plane.one(), plane.zero()]).unwrap();
        let e2 = Derivation::partial(&plane, 1);
        let v = verify_kernel_generator(&[e1.clone(), e2.clone()], &plane.var(2), 3).unwrap();
        // 1, Z, Z^2, Z^3
        assert_eq!(v, KernelVerdict::BoundedEvidence { bound: 3, kernel_dimension: 4 });
        assert_eq!(find_kernel_generator(&[e1, e2], 3), Some(plane.var(2)));
    }

    #[test]
    fn system_validation() {
        let ring = ml_ring();
        let (d1, d2) = ml_pair(&ring);
        let sys = DerivationSystem::new(vec![d1.clone(), d2.clone()], ring.var(0), DEFAULT_CAP).unwrap();
        assert_eq!(sys.len(), 2);
        assert!(matches!(
            DerivationSystem::new(vec![d1.clone(), d1.clone()], ring.var(0), DEFAULT_CAP),
            Err(DerivationError::Dependent { rank: 1, n: 2 })
        ));

        let v = |i| MultiPoly::<Rational>::var(3, i);
        let dan = Ring::new(&["x", "y", "z"], Some(&(&v(0).pow(2) * &v(1)) - &v(2).pow(2)), false, true).unwrap();
        let d = Derivation::new(&dan, vec![dan.zero(), dan.var(2).scale(&q(2)), dan.var(0).pow(2)]).unwrap();
        assert_eq!(DerivationSystem::new(vec![d], dan.var(0), 8).unwrap_err(), DerivationError::NotFactorial);
    }

    #[test]
    fn display_roundtrip_shape() {
        let ring = ml_ring();
        let (d1, d2) = ml_pair(&ring);
        assert_eq!(d1.to_string(), "2*z*d/dy - x^2*d/dz");
        assert_eq!(d2.to_string(), "3*t^2*d/dy - x^2*d/dt");
        let plane = Ring::<Rational>::polynomial(&["x", "y", "z"]).unwrap();
        let e1 = Derivation::new(&plane, vec![plane.var(2), plane.one(), plane.zero()]).unwrap();
        assert_eq!(e1.to_string(), "z*d/dx + d/dy");
        let e3 = Derivation::new(&plane, vec![&plane.var(2) + &plane.one(), plane.zero(), plane.zero()]).unwrap();
        assert_eq!(e3.to_string(), "(z + 1)*d/dx");
        assert_eq!(Derivation::zero(&plane).to_string(), "0");
    }
}
