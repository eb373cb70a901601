//! Exact polynomial arithmetic: multivariate and univariate polynomials over
//! a [`Field`](crate::field::Field), rational root isolation, and the dense
//! linear algebra the bounded searches are built on.

mod hermite;
pub mod linalg;
mod monomial;
mod multi;
mod roots;
mod uni;

pub use hermite::{adjugate, hermite_normal_form, identity, mat_mul, poly_det, HermiteForm, PolyMatrix};
pub use linalg::jacobian_rank;
pub use monomial::Monomial;
pub use multi::{ArithKind, MultiPoly, PolyDisplay};
pub use roots::{rational_roots, RootReport};
pub use uni::{univ_gcd, UniDisplay, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("variable arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("zero polynomial has no root set")]
    ZeroPolynomial,
    #[error("gcd of two zero polynomials")]
    BothZero,
}
