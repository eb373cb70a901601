//! Pre-slices, minimal `q_i`, and polynomial coordinate charts.
//!
//! A pre-slice for `D_i` is an element `p` with `D_j(p) = 0` for `j != i` and
//! `D_i(p) = q(f)` for a nonzero univariate `q`. When `q` is a nonzero constant,
//! `s = p / q` is a slice and `A = k[s_1, ..., s_n, f]`; when only `q(alpha) != 0`,
//! the same holds on the fiber `A/(f - alpha)` with `s = p / q(alpha)`.
//!
//! Charts are produced by iterated Taylor expansion: for a slice `s` of `D`,
//! `pi(b) = sum_j (-1)^j D^j(b) s^j / j!` lies in `ker D` and
//! `b = sum_k pi(D^k b) s^k / k!`.

use std::fmt;

use rand::Rng;

use crate::derivation::{joint_kernel_up_to, Derivation, DerivationError, DerivationSystem};
use crate::field::Field;
use crate::groebner::NormalForm;
use crate::poly::{jacobian_rank, univ_gcd, Monomial, MultiPoly, UniPoly};
use crate::ring::{express_in_powers, Ring, RingElement};

/// Default total-degree bound for seed search.
pub const DEFAULT_SEED_BOUND: u32 = 4;
/// Default degree bound for expressing an element as a polynomial in `f`.
pub const DEFAULT_SOLVE_BOUND: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SliceError {
    #[error("derivation index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("seed is not killed by D{index}: D{index}(a) = {image}")]
    NotInJointKernel { index: usize, image: String },
    #[error("seed is already in the kernel of D{index} (nilpotency index {m} < 2)")]
    AlreadyInKernel { index: usize, m: u32 },
    #[error("D{index}(p) = {image} is not a polynomial in f of degree <= {bound}")]
    SolveInFFailed { index: usize, image: String, bound: u32 },
    #[error("{element} is not a polynomial in f of degree <= {bound}")]
    NotExpressible { element: String, bound: u32 },
    #[error("no pre-slice seed for D{index} within degree bound {bound}")]
    NoSeedFound { index: usize, bound: u32 },
    #[error("no candidate pre-slices for D{index}")]
    NoCandidates { index: usize },
    #[error("q{index} = {q} is not constant; global slices are unavailable")]
    NonConstantQ { index: usize, q: String },
    #[error("fiber over {alpha} is degenerate: q_i(alpha) = 0 for i in {indices:?}")]
    DegenerateFiber { alpha: String, indices: Vec<usize> },
    #[error("the system carries no pre-slices")]
    MissingPreSlices,
    #[error("iteration of D{index} on {element} did not terminate within {cap} steps")]
    CapExceeded { index: usize, element: String, cap: u32 },
    #[error("chart coefficient {coefficient} does not reduce to a constant on the fiber")]
    NonConstantCoefficient { coefficient: String },
    #[error("chart for {query} does not reproduce it: residue {residue}")]
    RoundTripFailed { query: String, residue: String },
    #[error("query belongs to a different ring")]
    PresentationMismatch,
    #[error("no variable of degree one in the relation; cannot sample points on the variety")]
    NoPointSampler,
    #[error(transparent)]
    Derivation(#[from] DerivationError),
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Provenance {
    /// `p = D_i^{steps}(seed)` where `D_i^{steps + 2}(seed) = 0`.
    Seed { seed: String, steps: u32 },
    /// Obtained from other pre-slices by Euclidean reduction.
    Reduced,
    /// Supplied by the user.
    Declared,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreSlice<F> {
    /// Zero-based derivation index.
    pub index: usize,
    pub p: RingElement<F>,
    pub q: UniPoly<F>,
    pub provenance: Provenance,
}

impl<F: Field> PreSlice<F> {
    /// Re-checks the defining equations against `sys`.
    pub fn check(&self, sys: &DerivationSystem<F>) -> Result<(), String> {
        if self.index >= sys.len() {
            return Err(format!("index {} out of range", self.index + 1));
        }
        for (j, d) in sys.derivations().iter().enumerate() {
            let img = d.apply(&self.p);
            if j == self.index {
                if self.q.is_zero() {
                    return Err("q is zero".into());
                }
                let expected = sys.kernel().eval_uni(&self.q);
                if img != expected {
                    return Err(format!("D{}(p) = {} but q(f) = {}", j + 1, img, expected));
                }
            } else if !img.is_zero() {
                return Err(format!("D{}(p) = {} is nonzero", j + 1, img));
            }
        }
        Ok(())
    }

    /// The pre-slice scaled so that `q` is monic.
    pub fn monic(&self) -> Self {
        let Some(lc) = self.q.leading_coeff() else { return self.clone() };
        let inv = lc.inv();
        PreSlice {
            index: self.index,
            p: self.p.scale(&inv),
            q: self.q.scale(&inv),
            provenance: self.provenance.clone(),
        }
    }
}

impl<F: Field> fmt::Display for PreSlice<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{} = {}, q{}(T) = {}", self.index + 1, self.p, self.index + 1, self.q)
    }
}

/// How far the minimality of a `q` is established.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Minimality {
    /// `q` is constant, hence minimal.
    Absolute,
    /// Minimal among pre-slices generated from seeds up to this degree.
    WithinBound(u32),
    /// Minimal among the given candidates only.
    WithinCandidates(usize),
}

impl fmt::Display for Minimality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Minimality::Absolute => write!(f, "minimal"),
            Minimality::WithinBound(b) => write!(f, "minimal within search bound {b}"),
            Minimality::WithinCandidates(n) => write!(f, "minimal among {n} candidates"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalPreSlice<F> {
    pub preslice: PreSlice<F>,
    pub minimality: Minimality,
    /// The `q` of every candidate that entered the reduction.
    pub candidate_qs: Vec<UniPoly<F>>,
}

/// `g` with `g(f) = b` in `A`, searching `deg g <= degree_bound`.
pub fn solve_in_f<F: Field>(
    b: &RingElement<F>,
    f: &RingElement<F>,
    degree_bound: u32,
) -> Result<UniPoly<F>, SliceError> {
    if b.ring() != f.ring() {
        return Err(SliceError::PresentationMismatch);
    }
    express_in_powers(b.value(), f.value(), degree_bound, b.ring())
        .ok_or_else(|| SliceError::NotExpressible { element: b.to_string(), bound: degree_bound })
}

fn check_index<F: Field>(sys: &DerivationSystem<F>, i: usize) -> Result<(), SliceError> {
    if i >= sys.len() {
        return Err(SliceError::IndexOutOfRange(i + 1));
    }
    Ok(())
}

/// `p = D_i^{m-2}(a)` where `m` is the nilpotency index of `a` under `D_i`.
pub fn preslice_from<F: Field>(
    sys: &DerivationSystem<F>,
    i: usize,
    a: &RingElement<F>,
    solve_bound: u32,
) -> Result<PreSlice<F>, SliceError> {
    check_index(sys, i)?;
    if a.ring() != sys.ring() {
        return Err(SliceError::PresentationMismatch);
    }
    for (j, d) in sys.derivations().iter().enumerate() {
        if j == i {
            continue;
        }
        let img = d.apply(a);
        if !img.is_zero() {
            return Err(SliceError::NotInJointKernel { index: j + 1, image: img.to_string() });
        }
    }
    let d = sys.derivation(i);
    let cap = sys.certificates()[i].bound_for_degree(a.total_degree().unwrap_or(0));
    let m = d.nilpotency_index(a, cap).ok_or_else(|| SliceError::CapExceeded {
        index: i + 1,
        element: a.to_string(),
        cap,
    })?;
    if m < 2 {
        return Err(SliceError::AlreadyInKernel { index: i + 1, m });
    }
    let p = d.iterate(a, m - 2);
    let image = d.apply(&p);
    let q = solve_in_f(&image, sys.kernel(), solve_bound).map_err(|_| SliceError::SolveInFFailed {
        index: i + 1,
        image: image.to_string(),
        bound: solve_bound,
    })?;
    Ok(PreSlice { index: i, p, q, provenance: Provenance::Seed { seed: a.to_string(), steps: m - 2 } })
}

/// Pre-slices from every canonical seed of degree at most `degree_bound`
/// killed by all `D_j`, `j != i`, grevlex-least seeds first.
pub fn search_preslices<F: Field>(
    sys: &DerivationSystem<F>,
    i: usize,
    degree_bound: u32,
    solve_bound: u32,
) -> Result<Vec<PreSlice<F>>, SliceError> {
    check_index(sys, i)?;
    let others: Vec<&Derivation<F>> =
        sys.derivations().iter().enumerate().filter(|(j, _)| *j != i).map(|(_, d)| d).collect();
    let seeds = joint_kernel_up_to(sys.ring(), &others, degree_bound);
    let di = sys.derivation(i);
    let mut out = Vec::new();
    for seed in seeds {
        if di.apply(&seed).is_zero() {
            continue;
        }
        out.push(preslice_from(sys, i, &seed, solve_bound)?);
    }
    if out.is_empty() {
        return Err(SliceError::NoSeedFound { index: i + 1, bound: degree_bound });
    }
    Ok(out)
}

/// `a - h(f) * b`, as pre-slices.
fn reduce_pair<F: Field>(f: &RingElement<F>, a: &PreSlice<F>, b: &PreSlice<F>) -> PreSlice<F> {
    let (h, r) = a.q.div_rem(&b.q).expect("nonzero q");
    let p = &a.p - &(&f.eval_uni(&h) * &b.p);
    PreSlice { index: a.index, p, q: r, provenance: Provenance::Reduced }
}

/// Euclidean reduction of the candidates' `q`; the result's `q` is the monic
/// gcd of all candidate `q`s and so divides each of them.
pub fn minimize_q<F: Field>(
    sys: &DerivationSystem<F>,
    i: usize,
    candidates: &[PreSlice<F>],
) -> Result<MinimalPreSlice<F>, SliceError> {
    check_index(sys, i)?;
    let Some(first) = candidates.first() else { return Err(SliceError::NoCandidates { index: i + 1 }) };
    let f = sys.kernel();
    let mut best = first.clone();
    for cand in &candidates[1..] {
        let (mut a, mut b) =
            if cand.q.degree() >= best.q.degree() { (cand.clone(), best) } else { (best, cand.clone()) };
        loop {
            let r = reduce_pair(f, &a, &b);
            if r.q.is_zero() {
                break;
            }
            a = b;
            b = r;
        }
        best = b;
    }
    let preslice = best.monic();
    debug_assert!(preslice.check(sys).is_ok());
    let minimality =
        if preslice.q.is_constant() { Minimality::Absolute } else { Minimality::WithinCandidates(candidates.len()) };
    Ok(MinimalPreSlice { preslice, minimality, candidate_qs: candidates.iter().map(|c| c.q.clone()).collect() })
}

/// Searches seeds up to `degree_bound` and minimizes `q_i` over the result.
pub fn minimal_preslice<F: Field>(
    sys: &DerivationSystem<F>,
    i: usize,
    degree_bound: u32,
    solve_bound: u32,
) -> Result<MinimalPreSlice<F>, SliceError> {
    let candidates = search_preslices(sys, i, degree_bound, solve_bound)?;
    let mut out = minimize_q(sys, i, &candidates)?;
    if out.minimality != Minimality::Absolute {
        out.minimality = Minimality::WithinBound(degree_bound);
    }
    Ok(out)
}

/// Attaches minimized pre-slices for every derivation to `sys`.
pub fn with_minimal_preslices<F: Field>(
    sys: DerivationSystem<F>,
    degree_bound: u32,
    solve_bound: u32,
) -> Result<(DerivationSystem<F>, Vec<MinimalPreSlice<F>>), SliceError> {
    let found =
        (0..sys.len()).map(|i| minimal_preslice(&sys, i, degree_bound, solve_bound)).collect::<Result<Vec<_>, _>>()?;
    let sys = sys.with_preslices(found.iter().map(|m| m.preslice.clone()).collect())?;
    Ok((sys, found))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scope<F> {
    Global,
    Fiber(F),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceSystem<F> {
    pub slices: Vec<RingElement<F>>,
    pub scope: Scope<F>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartEntry<F> {
    pub query: RingElement<F>,
    /// Polynomial in the chart variables.
    pub expression: MultiPoly<F>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateChart<F> {
    pub slices: SliceSystem<F>,
    /// `S1..Sn`, followed by `F` in global scope.
    pub variables: Vec<String>,
    pub entries: Vec<ChartEntry<F>>,
}

impl<F: Field> CoordinateChart<F> {
    pub fn render(&self, e: &ChartEntry<F>) -> String {
        e.expression.display(&self.variables).to_string()
    }
}

struct Expander<'a, F: Field, N: NormalForm<F>> {
    ds: &'a [Derivation<F>],
    slices: Vec<MultiPoly<F>>,
    order: Vec<usize>,
    nf: &'a N,
    cap: u32,
    chart_nvars: usize,
}

impl<F: Field, N: NormalForm<F>> Expander<'_, F, N> {
    fn iterate_until_zero(&self, i: usize, b: &MultiPoly<F>) -> Result<Vec<MultiPoly<F>>, SliceError> {
        let mut out = Vec::new();
        let mut cur = self.nf.reduce(b);
        while !cur.is_zero() {
            if out.len() as u32 > self.cap {
                return Err(SliceError::CapExceeded { index: i + 1, element: format!("{b}"), cap: self.cap });
            }
            let next = self.ds[i].apply_mod(&cur, self.nf);
            out.push(cur);
            cur = next;
        }
        Ok(out)
    }

    /// `sum_j (-1)^j D_i^j(b) s_i^j / j!`, in `ker D_i`.
    fn project(&self, i: usize, b: &MultiPoly<F>) -> Result<MultiPoly<F>, SliceError> {
        let iterates = self.iterate_until_zero(i, b)?;
        let mut out = MultiPoly::zero(b.nvars());
        let mut s_pow = MultiPoly::one(b.nvars());
        let mut fact = F::one();
        for (j, dj) in iterates.iter().enumerate() {
            if j > 0 {
                s_pow = self.nf.reduce(&(&s_pow * &self.slices[i]));
                fact = fact * F::from_i64(j as i64);
            }
            let mut c = fact.inv();
            if j % 2 == 1 {
                c = -c;
            }
            out = &out + (&(dj * &s_pow).scale(&c));
        }
        Ok(self.nf.reduce(&out))
    }

    fn expand(
        &self,
        level: usize,
        a: &MultiPoly<F>,
        leaf: &dyn Fn(&MultiPoly<F>) -> Result<MultiPoly<F>, SliceError>,
    ) -> Result<MultiPoly<F>, SliceError> {
        if level == self.order.len() {
            return leaf(&self.nf.reduce(a));
        }
        let i = self.order[level];
        let mut out = MultiPoly::zero(self.chart_nvars);
        let mut fact = F::one();
        for (k, b) in self.iterate_until_zero(i, a)?.iter().enumerate() {
            if k > 0 {
                fact = fact * F::from_i64(k as i64);
            }
            let c = self.expand(level + 1, &self.project(i, b)?, leaf)?;
            let sk = MultiPoly::term(Monomial::var(self.chart_nvars, i), F::one()).pow(k as u32);
            out = &out + &(&c * &sk).scale(&fact.inv());
        }
        Ok(out)
    }
}

fn chart_names(n: usize, with_f: bool) -> Vec<String> {
    let mut names: Vec<String> = (1..=n).map(|i| format!("S{i}")).collect();
    if with_f {
        names.push("F".into());
    }
    names
}

fn preslices_of<F: Field>(sys: &DerivationSystem<F>) -> Result<&[PreSlice<F>], SliceError> {
    sys.preslices().ok_or(SliceError::MissingPreSlices)
}

/// Expresses each query as a polynomial in the global slices `s_i = p_i / q_i`
/// and `f`, expanding along `D_1`, then `D_2`, and so on.
pub fn coordinatize_global<F: Field>(
    sys: &DerivationSystem<F>,
    queries: &[RingElement<F>],
) -> Result<CoordinateChart<F>, SliceError> {
    let order: Vec<usize> = (0..sys.len()).collect();
    coordinatize_global_ordered(sys, queries, &order, DEFAULT_SOLVE_BOUND)
}

/// As [`coordinatize_global`], expanding along the derivations in `order`.
pub fn coordinatize_global_ordered<F: Field>(
    sys: &DerivationSystem<F>,
    queries: &[RingElement<F>],
    order: &[usize],
    solve_bound: u32,
) -> Result<CoordinateChart<F>, SliceError> {
    let ps = preslices_of(sys)?;
    let mut slices = Vec::with_capacity(ps.len());
    for ps in ps {
        match ps.q.constant_value_opt() {
            Some(c) if !c.is_zero() => slices.push(ps.p.scale(&c.inv())),
            _ => return Err(SliceError::NonConstantQ { index: ps.index + 1, q: ps.q.to_string() }),
        }
    }
    let ring = sys.ring();
    let n = sys.len();
    let expander = Expander {
        ds: sys.derivations(),
        slices: slices.iter().map(|s| s.value().clone()).collect(),
        order: order.to_vec(),
        nf: ring,
        cap: sys.max_index().saturating_mul(64).max(64),
        chart_nvars: n + 1,
    };
    let f = sys.kernel().clone();
    let leaf = |c: &MultiPoly<F>| -> Result<MultiPoly<F>, SliceError> {
        let g = solve_in_f(&ring.element_unchecked(c.clone()), &f, solve_bound)?;
        Ok(uni_in_var(&g, n + 1, n))
    };
    let mut images: Vec<MultiPoly<F>> = slices.iter().map(|s| s.value().clone()).collect();
    images.push(f.value().clone());
    let mut entries = Vec::with_capacity(queries.len());
    for q in queries {
        if q.ring() != ring {
            return Err(SliceError::PresentationMismatch);
        }
        let expression = expander.expand(0, q.value(), &leaf)?;
        let back = ring.element_unchecked(expression.substitute(&images));
        if &back != q {
            return Err(SliceError::RoundTripFailed { query: q.to_string(), residue: (&back - q).to_string() });
        }
        entries.push(ChartEntry { query: q.clone(), expression });
    }
    Ok(CoordinateChart {
        slices: SliceSystem { slices, scope: Scope::Global },
        variables: chart_names(n, true),
        entries,
    })
}

/// `g(X_var)` as a polynomial in `nvars` variables.
fn uni_in_var<F: Field>(g: &UniPoly<F>, nvars: usize, var: usize) -> MultiPoly<F> {
    let x = MultiPoly::var(nvars, var);
    g.coeffs().iter().rev().fold(MultiPoly::zero(nvars), |acc, c| &(&acc * &x) + &MultiPoly::constant(nvars, c.clone()))
}

/// Indices `i` with `q_i(alpha) = 0`.
pub fn degenerate_indices<F: Field>(preslices: &[PreSlice<F>], alpha: &F) -> Vec<usize> {
    preslices.iter().filter(|p| p.q.eval(alpha).is_zero()).map(|p| p.index + 1).collect()
}

/// Chart of the fiber `A/(f - alpha)` in the fiber slices `p_i / q_i(alpha)`.
pub fn coordinatize_fiber<F: Field>(
    sys: &DerivationSystem<F>,
    alpha: &F,
    queries: &[RingElement<F>],
) -> Result<CoordinateChart<F>, SliceError> {
    let order: Vec<usize> = (0..sys.len()).collect();
    coordinatize_fiber_ordered(sys, alpha, queries, &order)
}

pub fn coordinatize_fiber_ordered<F: Field>(
    sys: &DerivationSystem<F>,
    alpha: &F,
    queries: &[RingElement<F>],
    order: &[usize],
) -> Result<CoordinateChart<F>, SliceError> {
    let ps = preslices_of(sys)?;
    let bad = degenerate_indices(ps, alpha);
    if !bad.is_empty() {
        return Err(SliceError::DegenerateFiber { alpha: alpha.to_string(), indices: bad });
    }
    let ring = sys.ring();
    let ideal = ring.fiber_ring(sys.kernel(), alpha).map_err(|_| SliceError::PresentationMismatch)?;
    let slices: Vec<RingElement<F>> = ps.iter().map(|p| p.p.scale(&p.q.eval(alpha).inv())).collect();
    let n = sys.len();
    let expander = Expander {
        ds: sys.derivations(),
        slices: slices.iter().map(|s| ideal.reduce(s.value())).collect(),
        order: order.to_vec(),
        nf: &ideal,
        cap: sys.max_index().saturating_mul(64).max(64),
        chart_nvars: n,
    };
    let leaf = |c: &MultiPoly<F>| -> Result<MultiPoly<F>, SliceError> {
        match c.constant_value() {
            Some(v) => Ok(MultiPoly::constant(n, v)),
            None => Err(SliceError::NonConstantCoefficient { coefficient: c.display(ring.names()).to_string() }),
        }
    };
    let images: Vec<MultiPoly<F>> = slices.iter().map(|s| s.value().clone()).collect();
    let mut entries = Vec::with_capacity(queries.len());
    for q in queries {
        if q.ring() != ring {
            return Err(SliceError::PresentationMismatch);
        }
        let expression = expander.expand(0, q.value(), &leaf)?;
        let residue = ideal.reduce(&(&expression.substitute(&images) - q.value()));
        if !residue.is_zero() {
            return Err(SliceError::RoundTripFailed {
                query: q.to_string(),
                residue: residue.display(ring.names()).to_string(),
            });
        }
        entries.push(ChartEntry { query: q.clone(), expression });
    }
    Ok(CoordinateChart {
        slices: SliceSystem { slices, scope: Scope::Fiber(alpha.clone()) },
        variables: chart_names(n, false),
        entries,
    })
}

/// Samples a rational point on the variety `r = 0` by choosing random values
/// for all variables but one in which `r` has degree one, then solving.
pub fn sample_variety_point<F: Field, R: Rng + ?Sized>(ring: &Ring<F>, rng: &mut R) -> Result<Vec<F>, SliceError> {
    let m = ring.nvars();
    let random = |rng: &mut R| -> F {
        let num = rng.gen_range(-9i64..=9);
        let den = rng.gen_range(1i64..=4);
        F::from_i64(num) / F::from_i64(den)
    };
    let Some(r) = ring.relation() else {
        return Ok((0..m).map(|_| random(rng)).collect());
    };
    let Some(v) = (0..m).find(|&v| r.degree_in(v) == 1) else { return Err(SliceError::NoPointSampler) };
    let coeff = r.derivative(v);
    let rest = {
        let mut images: Vec<MultiPoly<F>> = (0..m).map(|j| MultiPoly::var(m, j)).collect();
        images[v] = MultiPoly::zero(m);
        r.substitute(&images)
    };
    for _ in 0..1000 {
        let mut point: Vec<F> = (0..m).map(|_| random(rng)).collect();
        point[v] = F::zero();
        let a = coeff.eval(&point);
        if a.is_zero() {
            continue;
        }
        point[v] = -(rest.eval(&point) / a);
        debug_assert!(r.eval(&point).is_zero());
        return Ok(point);
    }
    Err(SliceError::NoPointSampler)
}

/// Jacobian ranks of `(p_1, ..., p_n, f)` at `points` random points on the variety.
pub fn independence_evidence<F: Field, R: Rng + ?Sized>(
    sys: &DerivationSystem<F>,
    points: usize,
    rng: &mut R,
) -> Result<Vec<usize>, SliceError> {
    let ps = preslices_of(sys)?;
    let mut elements: Vec<MultiPoly<F>> = ps.iter().map(|p| p.p.value().clone()).collect();
    elements.push(sys.kernel().value().clone());
    (0..points).map(|_| Ok(jacobian_rank(&elements, &sample_variety_point(sys.ring(), rng)?))).collect()
}

/// Monic gcd of a family of polynomials, `None` if all are zero.
pub fn gcd_all<F: Field>(qs: &[UniPoly<F>]) -> Option<UniPoly<F>> {
    qs.iter().try_fold(UniPoly::zero(), |acc, q| univ_gcd(&acc, q).ok())
}

trait ConstantValue<F> {
    fn constant_value_opt(&self) -> Option<F>;
}

impl<F: Field> ConstantValue<F> for UniPoly<F> {
    fn constant_value_opt(&self) -> Option<F> {
        match self.degree() {
            None => Some(F::zero()),
            Some(0) => Some(self.coeff(0)),
            _ => None,
        }
    }
}
