use lndkit::derivation::Derivation;
use lndkit::explog::exp_derivation;
use lndkit::frontend::{parse_derivation, parse_element, parse_poly};
use lndkit::poly::{rational_roots, univ_gcd, Monomial, MultiPoly, UniPoly};
use lndkit::ring::{Ring, RingElement};
use lndkit::Rational;
use proptest::prelude::*;

type P = MultiPoly<Rational>;
type R = Ring<Rational>;

fn rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn poly(nvars: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = P> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, nvars), rat()), 0..=max_terms)
        .prop_map(move |terms| MultiPoly::from_terms(nvars, terms.into_iter().map(|(e, c)| (Monomial::new(e), c))))
}

/// A polynomial in the first `k` of `nvars` variables.
fn poly_in_first(nvars: usize, k: usize) -> impl Strategy<Value = P> {
    prop::collection::vec((prop::collection::vec(0..=2u32, k), rat()), 0..=3).prop_map(move |terms| {
        MultiPoly::from_terms(
            nvars,
            terms.into_iter().map(|(mut e, c)| {
                e.resize(nvars, 0);
                (Monomial::new(e), c)
            }),
        )
    })
}

fn uni(max_deg: usize) -> impl Strategy<Value = UniPoly<Rational>> {
    prop::collection::vec(rat(), 0..=max_deg + 1).prop_map(UniPoly::new)
}

fn names(n: usize) -> Vec<String> {
    ["x", "y", "z", "t"][..n].iter().map(|s| s.to_string()).collect()
}

fn ml() -> R {
    let n = names(4);
    Ring::new(&n, Some(parse_poly("x^2*y + x + z^2 + t^3", &n).unwrap()), true, true).unwrap()
}

fn ml_d1(ring: &R) -> Derivation<Rational> {
    parse_derivation("2*z*d/dy - x^2*d/dz", ring).unwrap()
}

fn el(ring: &R, p: &P) -> RingElement<Rational> {
    ring.normalize(p).unwrap()
}

/// `D(x_j) = c_j + g_j(x_1..x_{j-1})`: locally nilpotent by construction.
fn triangular(n: usize) -> impl Strategy<Value = Vec<P>> {
    (0..n)
        .map(|j| (rat(), poly_in_first(n, j)).prop_map(move |(c, g)| &g + &MultiPoly::constant(n, c)))
        .collect::<Vec<_>>()
}

fn derivation(ring: &R, images: &[P]) -> Derivation<Rational> {
    Derivation::new(ring, images.iter().map(|p| el(ring, p)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly(3, 2, 4), b in poly(3, 2, 4), c in poly(3, 2, 4)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &MultiPoly::one(3), a.clone());
    }

    #[test]
    fn exact_divide_inverts_multiplication(a in poly(3, 2, 4), b in poly(3, 2, 3)) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).exact_divide(&b).unwrap(), Some(a));
    }

    #[test]
    fn rational_roots_with_multiplicity(
        roots in prop::collection::btree_map(-4i64..=4, 1u32..=3, 0..=3),
        irreducible in 0u32..=1,
        lead in rat(),
    ) {
        prop_assume!(lead != Rational::from_integer(0.into()));
        let mut q = UniPoly::constant(lead);
        for (&r, &m) in &roots {
            q = &q * &UniPoly::linear_root(Rational::from_integer(r.into())).pow(m);
        }
        let quad = UniPoly::new(vec![Rational::from_integer(2.into()), Rational::from_integer(0.into()), Rational::from_integer(1.into())]);
        q = &q * &quad.pow(irreducible);
        let report = rational_roots(&q).unwrap();
        let expected: Vec<(Rational, u32)> = roots.iter().map(|(&r, &m)| (Rational::from_integer(r.into()), m)).collect();
        prop_assert_eq!(report.roots, expected);
        prop_assert_eq!(report.residual.degree().unwrap_or(0), 2 * irreducible as usize);
    }

    #[test]
    fn gcd_divides_and_is_greatest(a in uni(3), b in uni(3), c in uni(2)) {
        prop_assume!(!c.is_zero() && !(a.is_zero() && b.is_zero()));
        let (ac, bc) = (&a * &c, &b * &c);
        let g = univ_gcd(&ac, &bc).unwrap();
        prop_assert!(g.divides(&ac) && g.divides(&bc));
        prop_assert!(c.divides(&g));
        prop_assert!(g.is_monic());
    }

    #[test]
    fn normalize_is_idempotent_homomorphism(a in poly(4, 3, 4), b in poly(4, 3, 4)) {
        let ring = ml();
        let (ea, eb) = (el(&ring, &a), el(&ring, &b));
        prop_assert_eq!(el(&ring, ea.value()), ea.clone());
        prop_assert_eq!(el(&ring, &(&a * &b)), &ea * &eb);
        prop_assert_eq!(el(&ring, &(&a + &b)), &ea + &eb);
    }

    #[test]
    fn leibniz_on_quotient(a in poly(4, 2, 3), b in poly(4, 2, 3)) {
        let ring = ml();
        let d = ml_d1(&ring);
        let (ea, eb) = (el(&ring, &a), el(&ring, &b));
        prop_assert_eq!(d.apply(&(&ea * &eb)), &(&ea * &d.apply(&eb)) + &(&eb * &d.apply(&ea)));
    }

    #[test]
    fn commutator_laws(
        d in prop::collection::vec(poly(3, 2, 2), 3),
        e in prop::collection::vec(poly(3, 2, 2), 3),
        g in prop::collection::vec(poly(3, 2, 2), 3),
        c in rat(),
    ) {
        let ring = Ring::polynomial(&names(3)).unwrap();
        let (d, e, g) = (derivation(&ring, &d), derivation(&ring, &e), derivation(&ring, &g));
        let de = d.commutator(&e).unwrap();
        prop_assert_eq!(de.clone(), e.commutator(&d).unwrap().scale(&Rational::from_integer((-1).into())));
        let lhs = d.add(&g.scale(&c)).unwrap().commutator(&e).unwrap();
        let rhs = de.add(&g.commutator(&e).unwrap().scale(&c)).unwrap();
        prop_assert_eq!(lhs, rhs);
        let jacobi = d
            .commutator(&e.commutator(&g).unwrap()).unwrap()
            .add(&e.commutator(&g.commutator(&d).unwrap()).unwrap()).unwrap()
            .add(&g.commutator(&d.commutator(&e).unwrap()).unwrap()).unwrap();
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn parse_print_round_trip(a in poly(4, 3, 5), d in prop::collection::vec(poly(3, 2, 3), 3)) {
        let ring = ml();
        let e = el(&ring, &a);
        prop_assert_eq!(parse_element(&e.to_string(), &ring).unwrap(), e);
        let plane = Ring::polynomial(&names(3)).unwrap();
        let der = derivation(&plane, &d);
        prop_assert_eq!(parse_derivation(&der.to_string(), &plane).unwrap(), der);
    }

    #[test]
    fn exp_is_a_homomorphism(images in triangular(3), a in poly(3, 1, 3), b in poly(3, 1, 3)) {
        let ring = Ring::polynomial(&names(3)).unwrap();
        let d = derivation(&ring, &images);
        let sigma = exp_derivation(&d, true, 64).unwrap();
        let (ea, eb) = (el(&ring, &a), el(&ring, &b));
        prop_assert_eq!(sigma.apply(&(&ea * &eb)), &sigma.apply(&ea) * &sigma.apply(&eb));
        prop_assert_eq!(sigma.apply(&(&ea + &eb)), &sigma.apply(&ea) + &sigma.apply(&eb));
    }
}
