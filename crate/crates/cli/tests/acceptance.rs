//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use lndkit::derivation::{independence_rank, Derivation, DerivationSystem, DEFAULT_CAP};
use lndkit::explog::{exp_derivation, exp_scaled, log_automorphism, parameter_ring};
use lndkit::fiber::{bla_crosscheck, degenerate_fibers, dependency_certificate, verify_dependency, CrossCheckStatus};
use lndkit::frontend::{builtin_scenario, parse_poly, parse_scenario, Scenario};
use lndkit::groebner::NormalForm;
use lndkit::improve::{improve_basis, verify_module_basis};
use lndkit::poly::{Monomial, MultiPoly};
use lndkit::ring::{Ring, RingElement};
use lndkit::slice::{
    coordinatize_fiber, coordinatize_global, independence_evidence, minimize_q, search_preslices,
    with_minimal_preslices, SliceError, DEFAULT_SEED_BOUND, DEFAULT_SOLVE_BOUND,
};
use lndkit::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Sys = DerivationSystem<Rational>;
type Check = Result<String, String>;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn scenario(name: &str) -> Scenario {
    parse_scenario(builtin_scenario(name).expect("bundled"), name).expect("bundled scenario parses")
}

fn system(s: &Scenario) -> Result<Sys, String> {
    let ds: Vec<Derivation<Rational>> = s.derivations.iter().map(|(_, d)| d.clone()).collect();
    let f = s.kernel.clone().ok_or("scenario has no kernel")?;
    DerivationSystem::new(ds, f, DEFAULT_CAP).map_err(|e| e.to_string())
}

fn sliced(s: &Scenario) -> Result<Sys, String> {
    with_minimal_preslices(system(s)?, DEFAULT_SEED_BOUND, DEFAULT_SOLVE_BOUND).map(|r| r.0).map_err(|e| e.to_string())
}

fn element(ring: &Ring<Rational>, src: &str) -> RingElement<Rational> {
    ring.normalize(&parse_poly(src, ring.names()).unwrap()).unwrap()
}

fn lndkit(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lndkit")).args(args).output().expect("binary runs")
}

fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, in_first: usize, max_exp: u32, terms: usize) -> MultiPoly<Rational> {
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(0..=terms) {
        let mut e = vec![0u32; nvars];
        for x in e.iter_mut().take(in_first) {
            *x = rng.gen_range(0..=max_exp);
        }
        out.push((Monomial::new(e), Rational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=3).into())));
    }
    MultiPoly::from_terms(nvars, out)
}

fn criterion_1() -> Check {
    let s = scenario("makar-limanov");
    let sys = system(&s)?;
    let ring = sys.ring().clone();
    let (x, z, t) = (ring.var(0), ring.var(2), ring.var(3));

    let certs: Vec<String> = sys.certificates().iter().map(ToString::to_string).collect();
    ensure(certs == ["{x:1, y:3, z:2, t:1}", "{x:1, y:4, z:1, t:2}"], format!("certificates {certs:?}"))?;
    let ind = independence_rank(sys.derivations()).map_err(|e| e.to_string())?;
    let witness = ind.witness.ok_or("no witness minor")?;
    ensure(ind.rank == 2 && witness.value == x.pow(4), format!("rank {} witness {}", ind.rank, witness.value))?;
    // Oracle: the (z, t) columns of (D_i(x_j)) are [[-x^2, 0], [0, -x^2]].
    let minor = &(&sys.derivation(0).apply(&z) * &sys.derivation(1).apply(&t))
        - &(&sys.derivation(0).apply(&t) * &sys.derivation(1).apply(&z));
    ensure(minor == x.pow(4), "witness minor disagrees with direct 2x2 determinant")?;

    let c1 = search_preslices(&sys, 0, DEFAULT_SEED_BOUND, DEFAULT_SOLVE_BOUND).map_err(|e| e.to_string())?;
    let c2 = search_preslices(&sys, 1, DEFAULT_SEED_BOUND, DEFAULT_SOLVE_BOUND).map_err(|e| e.to_string())?;
    ensure(c1[0].p == z && c2[0].p == t, format!("first pre-slices {} and {}", c1[0].p, c2[0].p))?;

    let sys = sliced(&s)?;
    let report = degenerate_fibers(&sys).map_err(|e| e.to_string())?;
    ensure(
        report.alphas() == vec![q(0)] && report.residuals.is_empty(),
        format!("degenerate set {:?}", report.alphas()),
    )?;
    // Oracle: the witness minor x^4 is a unit modulo (x - alpha) for alpha != 0.
    for a in -2..=2i64 {
        let ideal = ring.fiber_ring(sys.kernel(), &q(a)).unwrap();
        ensure(ideal.reduce(witness.value.value()).is_zero() == (a == 0), format!("minor at alpha = {a}"))?;
    }

    let coeffs = vec![element(&ring, "3*t^2").value().clone(), element(&ring, "-2*z").value().clone()];
    let cert = verify_dependency(&sys, &q(0), &coeffs).map_err(|e| e.to_string())?;
    ensure(cert.verifies(), "(3t^2, -2z) residue nonzero")?;
    // Oracle: 3t^2*D1(x_j) - 2z*D2(x_j) is divisible by x for every generator.
    for j in 0..4 {
        let comb = &(&element(&ring, "3*t^2") * &sys.derivation(0).images()[j])
            - &(&element(&ring, "2*z") * &sys.derivation(1).images()[j]);
        ensure(ring.divides(&comb, &x).unwrap().is_some(), format!("combination on generator {j} not divisible by x"))?;
    }
    let found = dependency_certificate(&sys, &q(0), 2).map_err(|e| e.to_string())?.ok_or("no certificate found")?;
    ensure(found.verifies(), "searched certificate fails")?;

    let chart = coordinatize_fiber(&sys, &q(1), &[ring.var(1)]).map_err(|e| e.to_string())?;
    let expected = parse_poly::<Rational>("-1 - S1^2 + S2^3", &chart.variables).unwrap();
    ensure(chart.entries[0].expression == expected, format!("y -> {}", chart.render(&chart.entries[0])))?;
    let slices: Vec<MultiPoly<Rational>> = chart.slices.slices.iter().map(|s| s.value().clone()).collect();
    let back = &expected.substitute(&slices) - ring.var(1).value();
    let ideal = ring.fiber_ring(sys.kernel(), &q(1)).unwrap();
    ensure(ideal.reduce(&back).is_zero(), "back-substitution fails")?;

    match coordinatize_global(&sys, &ring.vars()) {
        Err(SliceError::NonConstantQ { .. }) => {}
        other => return Err(format!("coordinatize_global: {other:?}")),
    }
    Ok(format!(
        "witness x^4, pre-slices (z, t) (minimal up to sign: p1 = {}, p2 = {}), degenerate {{0}}, certificates {} and (3*t^2, -2*z) verify, y = -1 - S1^2 + S2^3, global chart NonConstantQ",
        sys.preslices().unwrap()[0].p,
        sys.preslices().unwrap()[1].p,
        found.render(ring.names())
    ))
}

fn criterion_2() -> Check {
    let s = scenario("slide-plane");
    let sys = sliced(&s)?;
    let ring = sys.ring().clone();
    let qs: Vec<String> = sys.qs().unwrap().iter().map(ToString::to_string).collect();
    ensure(qs == ["T", "T"], format!("q's = {qs:?}"))?;
    // Oracle for q2 != 1: Y would need D1(Y) = 0, but D1(Y) = 1; every element of ker D1
    // up to degree 4 has D2-image divisible by Z.
    ensure(sys.derivation(0).apply(&ring.var(1)) == ring.one(), "D1(Y) != 1")?;
    let ker_d1 = lndkit::derivation::joint_kernel_up_to(&ring, &[sys.derivation(0)], 4);
    for a in &ker_d1 {
        let img = sys.derivation(1).apply(a);
        ensure(ring.divides(&img, &ring.var(2)).unwrap().is_some(), format!("D2({a}) = {img} not divisible by Z"))?;
    }

    let report = degenerate_fibers(&sys).map_err(|e| e.to_string())?;
    ensure(report.alphas() == vec![q(0)], format!("degenerate set {:?}", report.alphas()))?;
    let b = improve_basis(&sys, DEFAULT_SOLVE_BOUND).map_err(|e| e.to_string())?;
    let partials = vec![Derivation::partial(&ring, 0), Derivation::partial(&ring, 1)];
    ensure(b.basis == partials, format!("basis {:?}", b.basis.iter().map(ToString::to_string).collect::<Vec<_>>()))?;
    let verdict = verify_module_basis(&b, &sys, DEFAULT_SEED_BOUND, DEFAULT_SOLVE_BOUND, DEFAULT_CAP);
    ensure(verdict.passed(), format!("module checks failed: {:?}", verdict.failures()))?;
    ensure(verdict.degenerate_after == Some(vec![]), format!("after {:?}", verdict.degenerate_after))?;

    let e = DerivationSystem::new(b.basis.clone(), sys.kernel().clone(), DEFAULT_CAP).map_err(|e| e.to_string())?;
    let (e, _) = with_minimal_preslices(e, DEFAULT_SEED_BOUND, DEFAULT_SOLVE_BOUND).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let queries: Vec<RingElement<Rational>> =
        (0..10).map(|_| ring.normalize(&random_poly(&mut rng, 3, 3, 3, 4)).unwrap()).collect();
    let chart = coordinatize_global(&e, &queries).map_err(|e| e.to_string())?;
    let mut images: Vec<MultiPoly<Rational>> = chart.slices.slices.iter().map(|s| s.value().clone()).collect();
    images.push(e.kernel().value().clone());
    for entry in &chart.entries {
        ensure(entry.expression.substitute(&images) == *entry.query.value(), format!("round trip of {}", entry.query))?;
    }
    Ok(format!(
        "q's = (T, T) [deviation: (T, 1) is impossible since D1(Y) = 1 and D2(ker D1) lies in Z*A]; degenerate {{0}}; basis {{d/dX, d/dY}}; degenerate after: none; {} sampled elements round-trip in (S1, S2, F)",
        queries.len()
    ))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let all = ["x", "y", "z", "t"];
    let (mut lnds, mut pairs) = (0, 0);
    for k in 0..50 {
        let n = 2 + k % 3;
        let ring = Ring::<Rational>::polynomial(&all[..n]).unwrap();
        let images: Vec<RingElement<Rational>> = (0..n)
            .map(|j| {
                let c = MultiPoly::constant(n, q(rng.gen_range(-3..=3)));
                ring.normalize(&(&random_poly(&mut rng, n, j, 1, 2) + &c)).unwrap()
            })
            .collect();
        let d = Derivation::new(&ring, images).map_err(|e| e.to_string())?;
        if d.is_zero() {
            continue;
        }
        lnds += 1;
        let sigma = exp_derivation(&d, false, DEFAULT_CAP).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let a = ring.normalize(&random_poly(&mut rng, n, n, 1, 2)).unwrap();
            let b = ring.normalize(&random_poly(&mut rng, n, n, 1, 2)).unwrap();
            ensure(
                sigma.apply(&(&a * &b)) == &sigma.apply(&a) * &sigma.apply(&b),
                format!("exp({d}) not multiplicative"),
            )?;
            ensure(sigma.apply(&(&a + &b)) == &sigma.apply(&a) + &sigma.apply(&b), format!("exp({d}) not additive"))?;
            pairs += 1;
        }
        let pr = parameter_ring(&ring, &["s", "t"]);
        let (s, t) = (pr.var(n), pr.var(n + 1));
        let es = exp_scaled(&d, &pr, &s, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let et = exp_scaled(&d, &pr, &t, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let est = exp_scaled(&d, &pr, &(&s + &t), DEFAULT_CAP).map_err(|e| e.to_string())?;
        ensure(es.compose(&et).map_err(|e| e.to_string())? == est, format!("flow law fails for {d}"))?;
        let l = log_automorphism(&sigma, DEFAULT_CAP).map_err(|e| e.to_string())?;
        ensure(l == d, format!("log(exp({d})) = {l}"))?;
    }
    ensure(lnds >= 45, format!("only {lnds} nonzero derivations"))?;
    Ok(format!(
        "{lnds} triangular LNDs on 2..4 variables, {pairs} homomorphism pairs, flow law and log(exp(D)) = D exact"
    ))
}

fn criterion_4() -> Check {
    let alphas: Vec<Rational> = (-2..=2).map(q).collect();
    let mut rows = 0;
    for name in ["makar-limanov", "slide-plane"] {
        let sys = sliced(&scenario(name))?;
        let table = bla_crosscheck(&sys, &alphas, 2).map_err(|e| format!("{name}: {e}"))?;
        for r in &table {
            ensure(r.status == CrossCheckStatus::Consistent, format!("{name} alpha {}: {}", r.alpha, r.status))?;
        }
        rows += table.len();
    }
    Ok(format!(
        "{rows} rows over makar-limanov and slide-plane, zero contradictions; danielewski-note is rejected before any fiber analysis"
    ))
}

fn criterion_5() -> Check {
    let mut families = 0;
    let mut candidates = 0;
    for name in ["makar-limanov", "slide-plane"] {
        let sys = system(&scenario(name))?;
        for i in 0..sys.len() {
            for bound in 1..=DEFAULT_SEED_BOUND {
                let Ok(found) = search_preslices(&sys, i, bound, DEFAULT_SOLVE_BOUND) else { continue };
                let m = minimize_q(&sys, i, &found).map_err(|e| e.to_string())?;
                for c in &found {
                    let quotient = c.q.exact_divide(&m.preslice.q).map_err(|e| e.to_string())?;
                    ensure(quotient.is_some(), format!("{name} D{}: {} does not divide {}", i + 1, m.preslice.q, c.q))?;
                }
                ensure(m.preslice.check(&sys).is_ok(), format!("{name} D{}: minimal pre-slice invalid", i + 1))?;
                families += 1;
                candidates += found.len();
            }
        }
    }
    Ok(format!("{families} searched families, {candidates} candidates, minimal q divides every candidate q"))
}

fn criterion_6() -> Check {
    let mut out = Vec::new();
    for name in ["makar-limanov", "slide-plane"] {
        let sys = sliced(&scenario(name))?;
        let want = sys.len() + 1;
        let mut strikes = 0;
        let mut seed = 60;
        loop {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ranks = independence_evidence(&sys, 8, &mut rng).map_err(|e| e.to_string())?;
            if ranks.iter().all(|&r| r == want) {
                break;
            }
            strikes += 1;
            ensure(strikes < 2, format!("{name}: ranks {ranks:?} twice"))?;
            seed += 1;
        }
        out.push(format!("{name} rank {want} at 8 points"));
    }
    Ok(out.join(", "))
}

fn criterion_7() -> Check {
    for name in ["makar-limanov", "slide-plane", "danielewski-note"] {
        let a = lndkit(&["--output", "machine", "run", name]);
        let b = lndkit(&["--output", "machine", "run", name]);
        ensure(!a.stdout.is_empty() && a.stdout == b.stdout, format!("{name}: machine reports differ"))?;
    }
    Ok("machine reports of all three bundled scenarios byte-identical across two runs".into())
}

fn criterion_8() -> Check {
    let out = lndkit(&["run", "danielewski-note"]);
    let code = out.status.code();
    let text = format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
    ensure(code == Some(1), format!("exit code {code:?}"))?;
    ensure(text.contains("non-UFD") && text.contains("NotFactorial"), format!("message: {text}"))?;
    let s = scenario("danielewski-note");
    let r = Ring::<Rational>::polynomial(&["x", "y", "z"]).unwrap();
    let rel = element(&r, "x^2*y - z^2");
    // Oracle for the ring being non-factorial: z^2 = x^2*y with x an irreducible not dividing z.
    ensure(r.divides(&element(&r, "z"), &element(&r, "x")).unwrap().is_none() && !rel.is_zero(), "oracle")?;
    ensure(!s.ring.declared_ufd(), "scenario does not declare ufd = false")?;
    Ok("exit code 1, NotFactorial: ring is declared non-UFD".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("makar-limanov end to end", criterion_1),
        ("slide-plane improvement", criterion_2),
        ("exp/log properties", criterion_3),
        ("degenerate-fiber cross-check", criterion_4),
        ("minimal q divisibility", criterion_5),
        ("jacobian independence evidence", criterion_6),
        ("determinism", criterion_7),
        ("negative validation", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: {name} ... PASS ({secs:.1} s) {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: {name} ... FAIL ({secs:.1} s) {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
