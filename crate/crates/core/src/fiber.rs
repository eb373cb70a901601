//! Degenerate fibers of `f`.
//!
//! The derivations become linearly dependent modulo `f - alpha` exactly when
//! some `q_i(alpha) = 0`. This module reads the degenerate set off the roots
//! of the `q_i`, searches independently for explicit dependencies modulo
//! `(f - alpha, r)`, and compares the two.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::derivation::{joint_kernel_mod, Derivation, DerivationSystem};
use crate::field::{common_denominator, content_after_scaling, Field};
use crate::groebner::NormalForm;
use crate::poly::linalg::{canonical_basis, nullspace, stacked_coefficient_matrix};
use crate::poly::{rational_roots, Monomial, MultiPoly, UniPoly};
use crate::ring::{express_in, IdealHandle};
use crate::slice::{coordinatize_fiber, degenerate_indices, PreSlice, SliceError};

/// Default coefficient degree bound for dependency certificates.
pub const DEFAULT_CERTIFICATE_BOUND: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FiberError {
    #[error("the system carries no pre-slices")]
    MissingPreSlices,
    #[error("invariant violation at alpha = {alpha}: {detail}")]
    InvariantViolation { alpha: String, detail: String },
    #[error(transparent)]
    Slice(#[from] SliceError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenerateValue<F> {
    pub alpha: F,
    /// One-based indices `i` with `q_i(alpha) = 0`.
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberReport<F> {
    /// Rational degenerate values, ascending.
    pub degenerate: Vec<DegenerateValue<F>>,
    /// `(i, residual)` for each `q_i` with a factor of positive degree and no
    /// rational roots; such `q_i` may vanish at irrational `alpha`.
    pub residuals: Vec<(usize, UniPoly<F>)>,
}

impl<F: Field> FiberReport<F> {
    pub fn alphas(&self) -> Vec<F> {
        self.degenerate.iter().map(|d| d.alpha.clone()).collect()
    }
}

fn preslices_of<F: Field>(sys: &DerivationSystem<F>) -> Result<&[PreSlice<F>], FiberError> {
    sys.preslices().ok_or(FiberError::MissingPreSlices)
}

/// Rational roots of the `q_i`, attributed to their indices.
pub fn degenerate_fibers<F: Field>(sys: &DerivationSystem<F>) -> Result<FiberReport<F>, FiberError> {
    let ps = preslices_of(sys)?;
    let mut degenerate: Vec<DegenerateValue<F>> = Vec::new();
    let mut residuals = Vec::new();
    for p in ps {
        let report = rational_roots(&p.q).expect("q is nonzero");
        for (alpha, _) in report.roots.iter() {
            match degenerate.iter_mut().find(|d| &d.alpha == alpha) {
                Some(d) => d.indices.push(p.index + 1),
                None => degenerate.push(DegenerateValue { alpha: alpha.clone(), indices: vec![p.index + 1] }),
            }
        }
        if report.may_have_irrational_roots() {
            residuals.push((p.index + 1, report.residual.clone()));
        }
    }
    degenerate.sort_by_key(|a| a.alpha.to_big());
    for d in &mut degenerate {
        d.indices.sort_unstable();
    }
    Ok(FiberReport { degenerate, residuals })
}

/// Coefficients `c_i` with `sum_i c_i D_i(x_j) = 0` modulo `(f - alpha, r)` for every generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyCertificate<F> {
    pub alpha: F,
    pub bound: u32,
    /// Normal forms in the fiber ring, scaled to primitive integer coefficients.
    pub coefficients: Vec<MultiPoly<F>>,
    /// `sum_i c_i D_i(x_j)` reduced modulo the fiber ideal, per generator.
    pub residue: Vec<MultiPoly<F>>,
}

impl<F: Field> DependencyCertificate<F> {
    pub fn verifies(&self) -> bool {
        self.residue.iter().all(MultiPoly::is_zero) && self.coefficients.iter().any(|c| !c.is_zero())
    }

    pub fn render(&self, names: &[String]) -> String {
        let parts: Vec<String> = self.coefficients.iter().map(|c| c.display(names).to_string()).collect();
        format!("({})", parts.join(", "))
    }
}

/// `(sum_i c_i D_i(x_j) mod ideal)_j`.
pub fn dependency_residue<F: Field>(
    ds: &[Derivation<F>],
    coefficients: &[MultiPoly<F>],
    ideal: &IdealHandle<F>,
    nvars: usize,
) -> Vec<MultiPoly<F>> {
    (0..nvars)
        .map(|j| {
            let sum = ds
                .iter()
                .zip(coefficients)
                .fold(MultiPoly::zero(nvars), |acc, (d, c)| &acc + &(c * d.images()[j].value()));
            ideal.reduce(&sum)
        })
        .collect()
}

fn primitive<F: Field>(values: &[F]) -> Vec<F> {
    let den = common_denominator(values.iter());
    let content = content_after_scaling(values.iter(), &den);
    if content == BigInt::from(0) {
        return values.to_vec();
    }
    let factor = F::from_big(&BigRational::new(den, content)).expect("scale factor fits the field");
    values.iter().map(|v| v.clone() * factor.clone()).collect()
}

/// The grevlex-least dependency with coefficients of degree at most
/// `degree_bound` in the fiber ring, if any.
///
/// Unknowns are ordered by monomial (descending grevlex), then by derivation
/// index; among the reduced echelon basis of all solutions, the one whose
/// pivot comes last is returned, with its pivot made positive and its
/// coefficients primitive integers.
pub fn dependency_certificate<F: Field>(
    sys: &DerivationSystem<F>,
    alpha: &F,
    degree_bound: u32,
) -> Result<Option<DependencyCertificate<F>>, FiberError> {
    let ring = sys.ring();
    let m = ring.nvars();
    let n = sys.len();
    let ideal = ring.fiber_ring(sys.kernel(), alpha).map_err(|_| SliceError::PresentationMismatch)?;
    let mut monomials = ideal.standard_monomials(m, degree_bound);
    monomials.sort_by(|a, b| b.cmp(a));
    let unknowns: Vec<(Monomial, usize)> =
        monomials.iter().flat_map(|mo| (0..n).map(move |i| (mo.clone(), i))).collect();
    let columns: Vec<Vec<MultiPoly<F>>> = unknowns
        .iter()
        .map(|(mo, i)| {
            let d = sys.derivation(*i);
            (0..m).map(|j| ideal.reduce(&d.images()[j].value().mul_term(mo, &F::one()))).collect()
        })
        .collect();
    let mat = stacked_coefficient_matrix(&columns);
    let ns = nullspace(&mat, unknowns.len());
    let basis = canonical_basis(&ns, unknowns.len());
    let Some(least) = basis.iter().max_by_key(|v| v.iter().position(|c| !c.is_zero())) else { return Ok(None) };
    let vector = primitive(least);
    let mut coefficients = vec![MultiPoly::zero(m); n];
    for ((mo, i), c) in unknowns.iter().zip(&vector) {
        if !c.is_zero() {
            coefficients[*i] = &coefficients[*i] + &MultiPoly::term(mo.clone(), c.clone());
        }
    }
    let residue = dependency_residue(sys.derivations(), &coefficients, &ideal, m);
    let cert = DependencyCertificate { alpha: alpha.clone(), bound: degree_bound, coefficients, residue };
    if !cert.verifies() {
        return Err(FiberError::InvariantViolation {
            alpha: alpha.to_string(),
            detail: "certificate residue is nonzero".into(),
        });
    }
    if let Some(ps) = sys.preslices() {
        if degenerate_indices(ps, alpha).is_empty() {
            return Err(FiberError::InvariantViolation {
                alpha: alpha.to_string(),
                detail: format!("dependency {} found but every q_i(alpha) is nonzero", cert.render(ring.names())),
            });
        }
    }
    Ok(Some(cert))
}

/// Checks a given coefficient tuple against the fiber at `alpha`.
pub fn verify_dependency<F: Field>(
    sys: &DerivationSystem<F>,
    alpha: &F,
    coefficients: &[MultiPoly<F>],
) -> Result<DependencyCertificate<F>, FiberError> {
    let ring = sys.ring();
    let ideal = ring.fiber_ring(sys.kernel(), alpha).map_err(|_| SliceError::PresentationMismatch)?;
    let reduced: Vec<MultiPoly<F>> = coefficients.iter().map(|c| ideal.reduce(c)).collect();
    let residue = dependency_residue(sys.derivations(), &reduced, &ideal, ring.nvars());
    let bound = reduced.iter().filter_map(MultiPoly::total_degree).max().unwrap_or(0);
    Ok(DependencyCertificate { alpha: alpha.clone(), bound, coefficients: reduced, residue })
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum CrossCheckStatus {
    Consistent,
    /// Some `q_i(alpha) = 0` but no certificate within the bound.
    BoundTooSmall,
}

impl fmt::Display for CrossCheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossCheckStatus::Consistent => write!(f, "consistent"),
            CrossCheckStatus::BoundTooSmall => write!(f, "bound too small"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckRow<F> {
    pub alpha: F,
    pub q_indices: Vec<usize>,
    pub certificate: Option<DependencyCertificate<F>>,
    pub status: CrossCheckStatus,
}

/// Compares `q_i(alpha) = 0` against the dependency search at each `alpha`.
/// A certificate where every `q_i(alpha) != 0` is an invariant violation.
pub fn bla_crosscheck<F: Field>(
    sys: &DerivationSystem<F>,
    alphas: &[F],
    degree_bound: u32,
) -> Result<Vec<CrossCheckRow<F>>, FiberError> {
    let ps = preslices_of(sys)?;
    alphas
        .iter()
        .map(|alpha| {
            let q_indices = degenerate_indices(ps, alpha);
            let certificate = dependency_certificate(sys, alpha, degree_bound)?;
            let status = match (q_indices.is_empty(), certificate.is_some()) {
                (false, false) => CrossCheckStatus::BoundTooSmall,
                (true, true) => {
                    return Err(FiberError::InvariantViolation {
                        alpha: alpha.to_string(),
                        detail: "certificate found where every q_i(alpha) is nonzero".into(),
                    })
                }
                _ => CrossCheckStatus::Consistent,
            };
            Ok(CrossCheckRow { alpha: alpha.clone(), q_indices, certificate, status })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// The fiber generators are polynomials in the listed coordinates.
    ChartFound {
        coordinates: Vec<(String, String)>,
        expressions: Vec<(String, String)>,
    },
    NoChart {
        reason: String,
    },
}

/// Output of the experimental fiber probe. Carries no claim either way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport<F> {
    pub alpha: F,
    pub degenerate: bool,
    pub bound: u32,
    pub outcome: ProbeOutcome,
}

/// `s` with `D(s) = 1` and `E(s) = 0` for `E` in `killers`, modulo the fiber ideal.
fn fiber_slice<F: Field>(
    d: &Derivation<F>,
    killers: &[&Derivation<F>],
    ideal: &IdealHandle<F>,
    nvars: usize,
    bound: u32,
) -> Option<MultiPoly<F>> {
    let monomials: Vec<Monomial> =
        ideal.standard_monomials(nvars, bound).into_iter().filter(|mo| !mo.is_one()).collect();
    let group = |p: &MultiPoly<F>| -> Vec<MultiPoly<F>> {
        std::iter::once(d).chain(killers.iter().copied()).map(|e| e.apply_mod(p, ideal)).collect()
    };
    let mut columns: Vec<Vec<MultiPoly<F>>> =
        monomials.iter().map(|mo| group(&MultiPoly::term(mo.clone(), F::one()))).collect();
    let mut target = vec![MultiPoly::zero(nvars); killers.len() + 1];
    target[0] = MultiPoly::one(nvars);
    columns.push(target);
    let mat = stacked_coefficient_matrix(&columns);
    let k = monomials.len();
    let a: Vec<Vec<F>> = mat.iter().map(|row| row[..k].to_vec()).collect();
    let rhs: Vec<F> = mat.iter().map(|row| row[k].clone()).collect();
    let sol = crate::poly::linalg::solve(&a, &rhs, k)?;
    Some(MultiPoly::from_terms(nvars, monomials.into_iter().zip(sol)))
}

/// Experimental: tries to write the fiber `A/(f - alpha)` as a polynomial
/// ring even where the derivations degenerate. Fiber slices are searched
/// greedily, the remaining coordinates are taken from the bounded joint
/// kernel of the derivations that received a slice, and success means every
/// generator is a polynomial of degree at most `2 * bound` in them.
pub fn question_probe<F: Field>(
    sys: &DerivationSystem<F>,
    alpha: &F,
    bound: u32,
) -> Result<ProbeReport<F>, FiberError> {
    let ps = preslices_of(sys)?;
    let ring = sys.ring();
    let names = ring.names();
    let m = ring.nvars();
    let n = sys.len();
    let degenerate = !degenerate_indices(ps, alpha).is_empty();
    if !degenerate {
        let chart = coordinatize_fiber(sys, alpha, &ring.vars())?;
        let coordinates =
            chart.variables.iter().cloned().zip(chart.slices.slices.iter().map(|s| s.to_string())).collect();
        let expressions = chart.entries.iter().map(|e| (e.query.to_string(), chart.render(e))).collect();
        return Ok(ProbeReport {
            alpha: alpha.clone(),
            degenerate,
            bound,
            outcome: ProbeOutcome::ChartFound { coordinates, expressions },
        });
    }
    let ideal = ring.fiber_ring(sys.kernel(), alpha).map_err(|_| SliceError::PresentationMismatch)?;
    let mut chosen: Vec<&Derivation<F>> = Vec::new();
    let mut slices: Vec<MultiPoly<F>> = Vec::new();
    for d in sys.derivations() {
        if let Some(s) = fiber_slice(d, &chosen, &ideal, m, bound) {
            // earlier slices must stay killed by the new derivation
            if slices.iter().all(|t| d.apply_mod(t, &ideal).is_zero()) {
                chosen.push(d);
                slices.push(s);
            }
        }
    }
    let missing = n - slices.len();
    let kernel: Vec<MultiPoly<F>> =
        joint_kernel_mod(&chosen, &ideal, m, bound).into_iter().filter(|p| !p.is_constant()).take(missing).collect();
    if kernel.len() < missing {
        return Ok(ProbeReport {
            alpha: alpha.clone(),
            degenerate,
            bound,
            outcome: ProbeOutcome::NoChart {
                reason: format!(
                    "{} fiber slice(s) and {} kernel element(s) found; {} coordinates needed",
                    slices.len(),
                    kernel.len(),
                    n
                ),
            },
        });
    }
    let mut coords = slices.clone();
    coords.extend(kernel);
    let labels: Vec<String> =
        (1..=slices.len()).map(|k| format!("S{k}")).chain((1..=missing).map(|k| format!("G{k}"))).collect();
    let mut expressions = Vec::with_capacity(m);
    for j in 0..m {
        match express_in(&MultiPoly::var(m, j), &coords, 2 * bound.max(1), &ideal) {
            Some(g) => expressions.push((names[j].clone(), g.display(&labels).to_string())),
            None => {
                return Ok(ProbeReport {
                    alpha: alpha.clone(),
                    degenerate,
                    bound,
                    outcome: ProbeOutcome::NoChart {
                        reason: format!("{} is not a polynomial in the candidate coordinates", names[j]),
                    },
                })
            }
        }
    }
    let coordinates = labels.into_iter().zip(coords.iter().map(|c| c.display(names).to_string())).collect();
    Ok(ProbeReport {
        alpha: alpha.clone(),
        degenerate,
        bound,
        outcome: ProbeOutcome::ChartFound { coordinates, expressions },
    })
}
