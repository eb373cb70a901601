//! Saturation of the derivation module.
//!
//! `M = (k(f)D_1 + ... + k(f)D_n) ∩ Der(A)` is a free `k[f]`-module; the map
//! `phi(D) = (D(p_1), ..., D(p_n))`, read in `k[f]^n`, embeds it. A basis is
//! improved one rational root `alpha` of `det phi` at a time: when a constant
//! combination `sum c_i E_i` vanishes modulo `(f - alpha)`, it is divisible by
//! `f - alpha` inside `Der(A)` and the quotient replaces one `E_i`, lowering
//! `deg det phi` by one.

use crate::derivation::{Derivation, DerivationError, DerivationSystem};
use crate::fiber::degenerate_fibers;
use crate::field::Field;
use crate::groebner::NormalForm;
use crate::poly::linalg::{canonical_basis, nullspace, stacked_coefficient_matrix};
use crate::poly::{adjugate, hermite_normal_form, mat_mul, poly_det, rational_roots, MultiPoly, PolyMatrix, UniPoly};
use crate::ring::RingElement;
use crate::slice::{solve_in_f, with_minimal_preslices, PreSlice, SliceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImproveError {
    #[error("the system carries no pre-slices")]
    MissingPreSlices,
    #[error("E{index}(p{slice}) = {image} is not a polynomial in f; the derivation is not in M")]
    SolveInFFailed { index: usize, slice: usize, image: String },
    #[error("division by f - {alpha} is not integral: {detail}")]
    DivisionNotIntegral { alpha: String, detail: String },
    #[error("change matrix is not polynomial: {0}")]
    ChangeNotPolynomial(String),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Slice(#[from] SliceError),
}

/// `(D(p_1), ..., D(p_n))` as polynomials in `f`.
pub fn phi_image<F: Field>(
    d: &Derivation<F>,
    preslices: &[PreSlice<F>],
    f: &RingElement<F>,
    solve_bound: u32,
) -> Result<Vec<UniPoly<F>>, ImproveError> {
    preslices
        .iter()
        .map(|p| {
            let image = d.apply(&p.p);
            solve_in_f(&image, f, solve_bound).map_err(|_| ImproveError::SolveInFFailed {
                index: 0,
                slice: p.index + 1,
                image: image.to_string(),
            })
        })
        .collect()
}

fn phi_matrix<F: Field>(
    basis: &[Derivation<F>],
    preslices: &[PreSlice<F>],
    f: &RingElement<F>,
    solve_bound: u32,
) -> Result<PolyMatrix<F>, ImproveError> {
    basis
        .iter()
        .enumerate()
        .map(|(i, e)| {
            phi_image(e, preslices, f, solve_bound).map_err(|err| match err {
                ImproveError::SolveInFFailed { slice, image, .. } => {
                    ImproveError::SolveInFFailed { index: i + 1, slice, image }
                }
                other => other,
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct DerivationModuleBasis<F> {
    pub basis: Vec<Derivation<F>>,
    /// Row `i` is `phi(E_i)` with respect to the system's pre-slices.
    pub phi: PolyMatrix<F>,
    /// `D_i = sum_k change[i][k](f) * E_k`.
    pub change: PolyMatrix<F>,
    /// Values `alpha` at which a saturation step was taken, in order.
    pub saturated: Vec<F>,
    /// Rational roots of the final `det phi` where no constant dependency exists.
    pub remaining_roots: Vec<F>,
    /// Factors of the final `det phi` without rational roots; improvement over
    /// an extension field may still be possible there.
    pub residual: Option<UniPoly<F>>,
}

/// `sum_k g_k(f) * E_k`.
fn combine<F: Field>(basis: &[Derivation<F>], coeffs: &[UniPoly<F>], f: &RingElement<F>) -> Derivation<F> {
    let ring = f.ring();
    let elems: Vec<RingElement<F>> = coeffs.iter().map(|g| f.eval_uni(g)).collect();
    Derivation::combination(ring, &elems, basis)
}

/// Constant vectors `c` with `sum c_i E_i = 0` modulo `(f - alpha, r)`.
fn constant_dependencies<F: Field>(basis: &[Derivation<F>], f: &RingElement<F>, alpha: &F) -> Vec<Vec<F>> {
    let ring = f.ring();
    let ideal = ring.fiber_ring(f, alpha).expect("f is non-constant");
    let columns: Vec<Vec<MultiPoly<F>>> =
        basis.iter().map(|e| e.images().iter().map(|img| ideal.reduce(img.value())).collect()).collect();
    let mat = stacked_coefficient_matrix(&columns);
    canonical_basis(&nullspace(&mat, basis.len()), basis.len())
}

/// Divides every generator image of `d` by `f - alpha` in `A`.
fn divide_derivation<F: Field>(
    d: &Derivation<F>,
    f: &RingElement<F>,
    alpha: &F,
) -> Result<Derivation<F>, ImproveError> {
    let ring = d.ring();
    let divisor = f - &ring.constant(alpha.clone());
    let images = d
        .images()
        .iter()
        .enumerate()
        .map(|(j, img)| {
            ring.divides(img, &divisor).ok().flatten().ok_or_else(|| ImproveError::DivisionNotIntegral {
                alpha: alpha.to_string(),
                detail: format!("image of {} is {}", ring.names()[j], img),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Derivation::new(ring, images)?)
}

/// `a / b` entrywise in `k[T]`, or an error naming the first non-integral entry.
fn exact_matrix_div<F: Field>(m: &PolyMatrix<F>, d: &UniPoly<F>) -> Result<PolyMatrix<F>, ImproveError> {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    e.exact_divide(d)
                        .ok()
                        .flatten()
                        .ok_or_else(|| ImproveError::ChangeNotPolynomial(format!("{e} / ({d})")))
                })
                .collect()
        })
        .collect()
}

/// Saturates the system's derivations to a basis of `M`, Hermite-normalized.
pub fn improve_basis<F: Field>(
    sys: &DerivationSystem<F>,
    solve_bound: u32,
) -> Result<DerivationModuleBasis<F>, ImproveError> {
    let ps = sys.preslices().ok_or(ImproveError::MissingPreSlices)?;
    let f = sys.kernel();
    let mut basis: Vec<Derivation<F>> = sys.derivations().to_vec();
    let phi_d = phi_matrix(&basis, ps, f, solve_bound)?;
    let mut saturated = Vec::new();
    'outer: loop {
        let phi = phi_matrix(&basis, ps, f, solve_bound)?;
        let det = poly_det(&phi);
        let roots = rational_roots(&det).expect("phi is injective").roots;
        for (alpha, _) in &roots {
            let deps = constant_dependencies(&basis, f, alpha);
            let Some(c) = deps.first() else { continue };
            let ring = sys.ring();
            let elems: Vec<RingElement<F>> = c.iter().map(|ci| ring.constant(ci.clone())).collect();
            let combo = Derivation::combination(ring, &elems, &basis);
            let new = divide_derivation(&combo, f, alpha)?;
            let k = c.iter().rposition(|ci| !ci.is_zero()).expect("nonzero dependency");
            basis[k] = new;
            saturated.push(alpha.clone());
            continue 'outer;
        }
        break;
    }
    let phi = phi_matrix(&basis, ps, f, solve_bound)?;
    let hf = hermite_normal_form(&phi);
    let basis: Vec<Derivation<F>> = hf.u.iter().map(|row| combine(&basis, row, f)).collect();
    let phi = phi_matrix(&basis, ps, f, solve_bound)?;
    debug_assert_eq!(phi, hf.h);
    let det_e = poly_det(&phi);
    let change = exact_matrix_div(&mat_mul(&phi_d, &adjugate(&phi)), &det_e)?;
    let report = rational_roots(&det_e).expect("phi is injective");
    let remaining_roots = report.roots.iter().map(|(a, _)| a.clone()).collect();
    let residual = report.may_have_irrational_roots().then(|| report.residual.clone());
    Ok(DerivationModuleBasis { basis, phi, change, saturated, remaining_roots, residual })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct ModuleVerdict<F> {
    pub checks: Vec<Check>,
    /// Rational degenerate values of the original and of the improved system.
    pub degenerate_before: Vec<F>,
    pub degenerate_after: Option<Vec<F>>,
}

impl<F> ModuleVerdict<F> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn check(name: &str, result: Result<String, String>) -> Check {
    match result {
        Ok(detail) => Check { name: name.into(), passed: true, detail },
        Err(detail) => Check { name: name.into(), passed: false, detail },
    }
}

/// Re-checks every property of an improved basis against `sys`, including
/// `degenerate(E) ⊆ degenerate(D)` with freshly searched pre-slices for `E`.
pub fn verify_module_basis<F: Field>(
    b: &DerivationModuleBasis<F>,
    sys: &DerivationSystem<F>,
    seed_bound: u32,
    solve_bound: u32,
    cap: u32,
) -> ModuleVerdict<F> {
    let f = sys.kernel();
    let mut checks = Vec::new();
    let before = sys.preslices().and_then(|_| degenerate_fibers(sys).ok()).map(|r| r.alphas()).unwrap_or_default();

    let e_sys = DerivationSystem::new(b.basis.clone(), f.clone(), cap);
    checks.push(check(
        "commuting, locally nilpotent, independent, kernel f",
        e_sys.as_ref().map(|s| format!("rank {}", s.independence().rank)).map_err(|e| e.to_string()),
    ));

    let span = (|| -> Result<String, String> {
        if b.change.len() != sys.len() {
            return Err("change matrix has the wrong size".into());
        }
        for (i, row) in b.change.iter().enumerate() {
            if row.len() != b.basis.len() {
                return Err("change matrix has the wrong size".into());
            }
            if combine(&b.basis, row, f) != *sys.derivation(i) {
                return Err(format!("D{} is not sum_k C[{}][k](f) E_k", i + 1, i + 1));
            }
        }
        let ps = sys.preslices().ok_or("no pre-slices")?;
        let phi_d = phi_matrix(sys.derivations(), ps, f, solve_bound).map_err(|e| e.to_string())?;
        let phi_e = phi_matrix(&b.basis, ps, f, solve_bound).map_err(|e| e.to_string())?;
        let det_e = poly_det(&phi_e);
        if det_e.is_zero() {
            return Err("det phi(E) = 0".into());
        }
        exact_matrix_div(&mat_mul(&phi_d, &adjugate(&phi_e)), &det_e).map_err(|e| e.to_string())?;
        Ok("every D_i is a k[f]-combination of the E_k".into())
    })();
    checks.push(check("D_i in the k[f]-span of E", span));

    let phi = (|| -> Result<String, String> {
        let ps = sys.preslices().ok_or("no pre-slices")?;
        let phi_e = phi_matrix(&b.basis, ps, f, solve_bound).map_err(|e| e.to_string())?;
        if phi_e != b.phi {
            return Err("stored phi matrix differs from recomputed".into());
        }
        Ok("phi entries match".into())
    })();
    checks.push(check("phi entries", phi));

    let det = (|| -> Result<String, String> {
        let ps = sys.preslices().ok_or("no pre-slices")?;
        let phi_d = phi_matrix(sys.derivations(), ps, f, solve_bound).map_err(|e| e.to_string())?;
        let (dd, de) = (poly_det(&phi_d), poly_det(&b.phi));
        match dd.exact_divide(&de) {
            Ok(Some(q)) => Ok(format!("det phi(D) / det phi(E) = {q}")),
            _ => Err(format!("det phi(E) = {de} does not divide det phi(D) = {dd}")),
        }
    })();
    checks.push(check("det divisibility", det));

    let mut after = None;
    let mono = match e_sys {
        Ok(e) => match with_minimal_preslices(e, seed_bound, solve_bound) {
            Ok((e, _)) => match degenerate_fibers(&e) {
                Ok(r) => {
                    let a = r.alphas();
                    let ok = a.iter().all(|x| before.contains(x));
                    let detail = format!("{} degenerate value(s) before, {} after", before.len(), a.len());
                    after = Some(a);
                    if ok {
                        Ok(detail)
                    } else {
                        Err(detail)
                    }
                }
                Err(e) => Err(e.to_string()),
            },
            Err(e) => Err(e.to_string()),
        },
        Err(e) => Err(e.to_string()),
    };
    checks.push(check("degenerate(E) within degenerate(D)", mono));
    ModuleVerdict { checks, degenerate_before: before, degenerate_after: after }
}
