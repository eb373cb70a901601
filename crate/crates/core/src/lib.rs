//! Exact computations with commuting locally nilpotent derivations on
//! factorial rings presented as `k[X_1..X_m]/(r)`.
//!
//! The pipeline: validate a [`DerivationSystem`](derivation::DerivationSystem),
//! extract pre-slices and their minimal image polynomials ([`slice`]), locate
//! the fibers where the derivations degenerate ([`fiber`]), saturate the
//! derivation module to an improved basis ([`improve`]), and write elements in
//! explicit polynomial coordinates globally or on a fiber.
//!
//! All arithmetic is exact. The algebra is generic over a [`Field`]; the
//! aliases below fix it to arbitrary-precision rationals, which is what the
//! command line front end uses.

pub mod derivation;
pub mod explog;
pub mod fiber;
pub mod field;
pub mod frontend;
pub mod groebner;
pub mod improve;
pub mod poly;
pub mod ring;
pub mod slice;

pub use field::Field;

/// Arbitrary-precision rational numbers, the default scalar field.
pub type Rational = num_rational::BigRational;
pub type Poly = poly::MultiPoly<Rational>;
pub type UniPoly = poly::UniPoly<Rational>;
pub type Ring = ring::Ring<Rational>;
pub type Element = ring::RingElement<Rational>;
pub type Derivation = derivation::Derivation<Rational>;
pub type DerivationSystem = derivation::DerivationSystem<Rational>;
pub type Automorphism = explog::RingAutomorphism<Rational>;
pub type PreSlice = slice::PreSlice<Rational>;
