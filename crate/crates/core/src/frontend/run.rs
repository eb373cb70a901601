//! Scenario execution.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use serde_json::{json, Value};

use crate::derivation::{find_kernel_generator, verify_kernel_generator, KernelVerdict, DEFAULT_CAP};
use crate::explog::{exp_derivation, log_automorphism, RingAutomorphism};
use crate::fiber::{
    bla_crosscheck, degenerate_fibers, dependency_certificate, question_probe, verify_dependency, ProbeOutcome,
    DEFAULT_CERTIFICATE_BOUND,
};
use crate::frontend::parse::{parse_element, parse_poly};
use crate::frontend::report::{Entry, Failure, Report, Severity, Status};
use crate::frontend::scenario::{Command, Scenario};
use crate::improve::{improve_basis, verify_module_basis, DerivationModuleBasis};
use crate::slice::{
    coordinatize_fiber, coordinatize_global, minimal_preslice, search_preslices, solve_in_f, CoordinateChart,
    MinimalPreSlice, PreSlice, Provenance, DEFAULT_SEED_BOUND, DEFAULT_SOLVE_BOUND,
};
use crate::{Derivation, DerivationSystem, Element, Rational};

/// Degree bound for the joint-kernel search in `validate`.
pub const DEFAULT_KERNEL_BOUND: u32 = 2;

/// Every command a scenario may run, in the order they are documented.
pub const COMMANDS: &[&str] = &[
    "validate",
    "exp",
    "log",
    "preslice",
    "minimize-q",
    "fibers",
    "certify-dependence",
    "crosscheck",
    "improve-basis",
    "coordinatize",
    "fiber-chart",
    "probe-question",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Overrides the default search bound of every command without a `bound` parameter.
    pub bound: Option<u32>,
    pub cap: u32,
    pub experimental: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { bound: None, cap: DEFAULT_CAP, experimental: false }
    }
}

struct Output {
    lines: Vec<String>,
    data: Value,
}

type Out = Result<Output, Failure>;

#[derive(Clone)]
struct Sliced {
    sys: DerivationSystem,
    /// `None` for declared pre-slices.
    minimal: Vec<Option<MinimalPreSlice<Rational>>>,
}

struct Session<'a> {
    scenario: &'a Scenario,
    opts: &'a RunOptions,
    sys: Option<DerivationSystem>,
    kernel_discovered: bool,
    sliced: BTreeMap<u32, Result<Sliced, Failure>>,
    improved: BTreeMap<u32, Result<DerivationModuleBasis<Rational>, Failure>>,
}

/// Validates the scenario's system, then runs its commands in order. Errors
/// become report entries; a system that fails validation yields a single
/// failed `validate` entry.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Report {
    run_commands(scenario, &scenario.commands, opts)
}

/// As [`run_scenario`] with an explicit command list.
pub fn run_commands(scenario: &Scenario, commands: &[Command], opts: &RunOptions) -> Report {
    let mut report = Report { scenario: scenario.name.clone(), entries: Vec::new() };
    if commands.is_empty() {
        return report;
    }
    let mut session = Session {
        scenario,
        opts,
        sys: None,
        kernel_discovered: false,
        sliced: BTreeMap::new(),
        improved: BTreeMap::new(),
    };
    if !scenario.derivations.is_empty() {
        let start = Instant::now();
        let built = catch_unwind(AssertUnwindSafe(|| session.build()))
            .unwrap_or_else(|_| Err(Failure::internal("Panic", "validation panicked")));
        if let Err(failure) = built {
            report.entries.push(Entry {
                command: "validate".into(),
                params: BTreeMap::new(),
                status: Status::Failed,
                non_authoritative: false,
                failure: Some(failure),
                lines: vec!["scenario rejected at input validation".into()],
                data: Value::Null,
                elapsed: start.elapsed(),
            });
            return report;
        }
    }
    for cmd in commands {
        report.entries.push(session.execute(cmd));
    }
    report
}

fn names_of(ds: &[Derivation]) -> Vec<String> {
    (1..=ds.len()).map(|i| format!("E{i}")).collect()
}

fn render_preslice(p: &PreSlice<Rational>) -> String {
    let origin = match &p.provenance {
        Provenance::Seed { seed, steps } => format!("seed {seed}, {steps} steps"),
        Provenance::Reduced => "reduced".into(),
        Provenance::Declared => "declared".into(),
    };
    format!("{p} ({origin})")
}

fn preslice_json(p: &PreSlice<Rational>) -> Value {
    let provenance = match &p.provenance {
        Provenance::Seed { seed, steps } => json!({"kind": "seed", "seed": seed, "steps": steps}),
        Provenance::Reduced => json!({"kind": "reduced"}),
        Provenance::Declared => json!({"kind": "declared"}),
    };
    json!({"index": p.index + 1, "p": p.p.to_string(), "q": p.q.to_string(), "provenance": provenance})
}

fn chart_output(chart: &CoordinateChart<Rational>, f: Option<&Element>) -> Output {
    let mut lines = Vec::new();
    let mut coords = Vec::new();
    for (v, s) in chart.variables.iter().zip(&chart.slices.slices) {
        lines.push(format!("{v} = {s}"));
        coords.push(json!({"name": v, "value": s.to_string()}));
    }
    if let Some(f) = f {
        lines.push(format!("F = {f}"));
        coords.push(json!({"name": "F", "value": f.to_string()}));
    }
    let mut entries = Vec::new();
    for e in &chart.entries {
        let rendered = chart.render(e);
        lines.push(format!("{} = {}   (exact round trip)", e.query, rendered));
        entries.push(json!({"query": e.query.to_string(), "expression": rendered}));
    }
    Output { lines, data: json!({"coordinates": coords, "entries": entries, "round_trip": true}) }
}

impl Session<'_> {
    fn build(&mut self) -> Result<(), Failure> {
        let ds: Vec<Derivation> = self.scenario.derivations.iter().map(|(_, d)| d.clone()).collect();
        let kernel = match &self.scenario.kernel {
            Some(k) => k.clone(),
            None => {
                let bound = self.opts.bound.unwrap_or(DEFAULT_KERNEL_BOUND);
                self.kernel_discovered = true;
                find_kernel_generator(&ds, bound).ok_or_else(|| {
                    Failure::new(
                        "NoKernelGenerator",
                        Severity::Verdict,
                        format!("no non-constant joint-kernel element of degree <= {bound}; declare `kernel`"),
                    )
                })?
            }
        };
        self.sys = Some(DerivationSystem::new(ds, kernel, self.opts.cap)?);
        Ok(())
    }

    fn sys(&self) -> Result<&DerivationSystem, Failure> {
        self.sys.as_ref().ok_or_else(|| Failure::usage("the scenario declares no derivations"))
    }

    fn dname(&self, i: usize) -> &str {
        &self.scenario.derivations[i].0
    }

    fn execute(&mut self, cmd: &Command) -> Entry {
        let start = Instant::now();
        let mut params = cmd.params.clone();
        let expect = params.remove("expect");
        let non_authoritative = cmd.name == "probe-question";
        let result = catch_unwind(AssertUnwindSafe(|| self.dispatch(&cmd.name, &params)))
            .unwrap_or_else(|_| Err(Failure::internal("Panic", format!("command `{}` panicked", cmd.name))));
        let (status, failure, output) = match (result, expect) {
            (Ok(out), None) => (Status::Ok, None, out),
            (Ok(out), Some(class)) => (
                Status::Failed,
                Some(Failure::new("UnexpectedSuccess", Severity::Verdict, format!("expected {class}, but succeeded"))),
                out,
            ),
            (Err(f), Some(class)) if f.class == class => {
                (Status::ExpectedFailure, Some(f), Output { lines: Vec::new(), data: Value::Null })
            }
            (Err(f), _) => (Status::Failed, Some(f), Output { lines: Vec::new(), data: Value::Null }),
        };
        Entry {
            command: cmd.name.clone(),
            params: cmd.params.clone(),
            status,
            non_authoritative,
            failure,
            lines: output.lines,
            data: output.data,
            elapsed: start.elapsed(),
        }
    }

    fn dispatch(&mut self, name: &str, p: &BTreeMap<String, String>) -> Out {
        let allowed: &[&str] = match name {
            "validate" => &["bound"],
            "exp" => &["derivation", "parameter"],
            "log" => &["derivation", "images"],
            "preslice" | "minimize-q" => &["derivation", "index", "bound"],
            "fibers" | "improve-basis" => &["bound"],
            "certify-dependence" => &["alpha", "bound", "coefficients"],
            "crosscheck" => &["alphas", "bound"],
            "coordinatize" => &["queries", "improved", "bound"],
            "fiber-chart" => &["alpha", "queries", "bound"],
            "probe-question" => &["alpha", "bound"],
            _ => return Err(Failure::usage(format!("unknown command `{name}`; known: {}", COMMANDS.join(", ")))),
        };
        if let Some(k) = p.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Failure::usage(format!("`{name}` takes no parameter `{k}`")));
        }
        match name {
            "validate" => self.validate(p),
            "exp" => self.exp(p),
            "log" => self.log(p),
            "preslice" => self.preslice(p),
            "minimize-q" => self.minimize_q(p),
            "fibers" => self.fibers(p),
            "certify-dependence" => self.certify(p),
            "crosscheck" => self.crosscheck(p),
            "improve-basis" => self.improve(p),
            "coordinatize" => self.coordinatize(p),
            "fiber-chart" => self.fiber_chart(p),
            "probe-question" => self.probe(p),
            _ => unreachable!("checked above"),
        }
    }

    fn bound(&self, p: &BTreeMap<String, String>, default: u32) -> Result<u32, Failure> {
        match p.get("bound") {
            Some(v) => {
                v.parse().map_err(|_| Failure::usage(format!("bound must be a non-negative integer, got `{v}`")))
            }
            None => Ok(self.opts.bound.unwrap_or(default)),
        }
    }

    fn flag(p: &BTreeMap<String, String>, key: &str, default: bool) -> Result<bool, Failure> {
        match p.get(key).map(String::as_str) {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => Err(Failure::usage(format!("{key} must be true or false, got `{v}`"))),
        }
    }

    fn scalar(src: &str) -> Result<Rational, Failure> {
        parse_poly::<Rational>(src.trim(), &[])
            .map_err(Failure::from)?
            .constant_value()
            .ok_or_else(|| Failure::usage(format!("`{src}` is not a number")))
    }

    fn alpha(p: &BTreeMap<String, String>) -> Result<Rational, Failure> {
        Self::scalar(p.get("alpha").ok_or_else(|| Failure::usage("missing parameter `alpha`"))?)
    }

    fn elements(&self, src: &str) -> Result<Vec<Element>, Failure> {
        src.split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_element(s, &self.scenario.ring).map_err(Failure::from))
            .collect()
    }

    fn queries(&self, p: &BTreeMap<String, String>) -> Result<Vec<Element>, Failure> {
        match p.get("queries") {
            Some(src) => self.elements(src),
            None => Ok(self.scenario.ring.vars()),
        }
    }

    /// Zero-based derivation indices selected by `derivation=` or `index=`, default all.
    fn indices(&self, p: &BTreeMap<String, String>) -> Result<Vec<usize>, Failure> {
        let n = self.scenario.derivations.len();
        if let Some(name) = p.get("derivation") {
            return self
                .scenario
                .derivation_index(name)
                .map(|i| vec![i])
                .ok_or_else(|| Failure::usage(format!("unknown derivation `{name}`")));
        }
        if let Some(v) = p.get("index") {
            return match v.parse::<usize>() {
                Ok(i) if (1..=n).contains(&i) => Ok(vec![i - 1]),
                _ => Err(Failure::usage(format!("index must be between 1 and {n}, got `{v}`"))),
            };
        }
        Ok((0..n).collect())
    }

    fn sliced(&mut self, seed_bound: u32) -> Result<Sliced, Failure> {
        if let Some(r) = self.sliced.get(&seed_bound) {
            return r.clone();
        }
        let r = self.compute_sliced(seed_bound);
        self.sliced.insert(seed_bound, r.clone());
        r
    }

    fn compute_sliced(&self, seed_bound: u32) -> Result<Sliced, Failure> {
        let sys = self.sys()?.clone();
        let f = sys.kernel().clone();
        let mut preslices = Vec::new();
        let mut minimal = Vec::new();
        for i in 0..sys.len() {
            let declared = self.scenario.preslices.iter().find(|(n, _)| n == self.dname(i)).map(|(_, e)| e);
            match declared {
                Some(p) => {
                    for (j, d) in sys.derivations().iter().enumerate() {
                        let img = d.apply(p);
                        if j != i && !img.is_zero() {
                            return Err(Failure::new(
                                "InvalidPreSlice",
                                Severity::Verdict,
                                format!("declared pre-slice {p} for {}: {}({p}) = {img}", self.dname(i), self.dname(j)),
                            ));
                        }
                    }
                    let image = sys.derivation(i).apply(p);
                    let q = solve_in_f(&image, &f, DEFAULT_SOLVE_BOUND).map_err(|_| {
                        Failure::new(
                            "InvalidPreSlice",
                            Severity::Verdict,
                            format!(
                                "declared pre-slice {p}: {}({p}) = {image} is not a polynomial in f",
                                self.dname(i)
                            ),
                        )
                    })?;
                    if q.is_zero() {
                        return Err(Failure::new(
                            "InvalidPreSlice",
                            Severity::Verdict,
                            format!("declared pre-slice {p} is killed by {}", self.dname(i)),
                        ));
                    }
                    preslices.push(PreSlice { index: i, p: p.clone(), q, provenance: Provenance::Declared });
                    minimal.push(None);
                }
                None => {
                    let m = minimal_preslice(&sys, i, seed_bound, DEFAULT_SOLVE_BOUND)?;
                    preslices.push(m.preslice.clone());
                    minimal.push(Some(m));
                }
            }
        }
        let sys = sys.with_preslices(preslices)?;
        Ok(Sliced { sys, minimal })
    }

    fn improved(&mut self, seed_bound: u32) -> Result<DerivationModuleBasis<Rational>, Failure> {
        if let Some(r) = self.improved.get(&seed_bound) {
            return r.clone();
        }
        let r = self.sliced(seed_bound).and_then(|s| improve_basis(&s.sys, DEFAULT_SOLVE_BOUND).map_err(Failure::from));
        self.improved.insert(seed_bound, r.clone());
        r
    }

    fn validate(&mut self, p: &BTreeMap<String, String>) -> Out {
        let bound = self.bound(p, DEFAULT_KERNEL_BOUND)?;
        let sys = self.sys()?.clone();
        let mut lines = Vec::new();
        let mut ders = Vec::new();
        for (i, (d, cert)) in sys.derivations().iter().zip(sys.certificates()).enumerate() {
            lines.push(format!(
                "{} = {}: well defined, locally nilpotent {} (cap {})",
                self.dname(i),
                d,
                cert,
                cert.cap
            ));
            ders.push(json!({
                "name": self.dname(i),
                "derivation": d.to_string(),
                "well_defined": true,
                "nilpotency": cert.names.iter().zip(&cert.indices).map(|(n, m)| json!([n, m])).collect::<Vec<_>>(),
                "cap": cert.cap,
            }));
        }
        let n = sys.len();
        lines.push(format!("commuting: all {} pairs", n * (n.saturating_sub(1)) / 2));
        let ind = sys.independence();
        let witness = ind.witness.as_ref().map(|m| {
            let rows: Vec<usize> = m.rows.iter().map(|r| r + 1).collect();
            let cols: Vec<String> = m.cols.iter().map(|&c| sys.ring().names()[c].clone()).collect();
            lines.push(format!(
                "independence rank {} of {}, witness minor rows {:?} columns {:?} = {}",
                ind.rank, n, rows, cols, m.value
            ));
            json!({"rows": rows, "columns": cols, "value": m.value.to_string()})
        });
        let f = sys.kernel();
        let origin = if self.kernel_discovered { "discovered" } else { "declared" };
        let verdict = verify_kernel_generator(sys.derivations(), f, bound)?;
        let kernel = match &verdict {
            KernelVerdict::CertifiedNecessary => {
                lines.push(format!("kernel f = {f} ({origin}): D_i(f) = 0 for all i"));
                json!({"f": f.to_string(), "origin": origin, "verdict": "certified-necessary"})
            }
            KernelVerdict::BoundedEvidence { bound, kernel_dimension } => {
                lines.push(format!(
                    "kernel f = {f} ({origin}): D_i(f) = 0; every joint-kernel element of degree <= {bound} lies in k[f] (dimension {kernel_dimension})"
                ));
                json!({"f": f.to_string(), "origin": origin, "verdict": "bounded-evidence", "bound": bound, "kernel_dimension": kernel_dimension})
            }
            KernelVerdict::Refuted { bound, witness } => {
                return Err(Failure::new(
                    "KernelRefuted",
                    Severity::Verdict,
                    format!("joint-kernel element {witness} (degree <= {bound}) is not a polynomial in f = {f}"),
                ))
            }
        };
        if let Some(w) = sys.ring().irreducibility_warning() {
            lines.push(format!("warning: {w}"));
        }
        Ok(Output {
            lines,
            data: json!({"derivations": ders, "commuting": true, "independence": {"rank": ind.rank, "witness": witness}, "kernel": kernel}),
        })
    }

    fn exp(&mut self, p: &BTreeMap<String, String>) -> Out {
        let with_parameter = Self::flag(p, "parameter", true)?;
        let idx = self.indices(p)?;
        let sys = self.sys()?.clone();
        let mut lines = Vec::new();
        let mut data = Vec::new();
        for i in idx {
            let sigma = exp_derivation(sys.derivation(i), with_parameter, self.opts.cap)?;
            let rel = sigma.relation_image();
            if !rel.is_zero() {
                return Err(Failure::internal("RelationNotPreserved", format!("exp maps the relation to {rel}")));
            }
            let scale = sigma.parameter_names().first().map(|t| format!("{t}*")).unwrap_or_default();
            lines.push(format!("exp({scale}{}): {sigma}", self.dname(i)));
            let images: Vec<Value> = sys
                .ring()
                .names()
                .iter()
                .zip(sigma.images())
                .map(|(n, e)| json!({"variable": n, "image": e.to_string()}))
                .collect();
            data.push(json!({"derivation": self.dname(i), "parameters": sigma.parameter_names(), "images": images, "relation_preserved": true}));
        }
        Ok(Output { lines, data: Value::Array(data) })
    }

    fn log(&mut self, p: &BTreeMap<String, String>) -> Out {
        let ring = self.scenario.ring.clone();
        if let Some(src) = p.get("images") {
            if p.contains_key("derivation") {
                return Err(Failure::usage("give either `images` or `derivation`"));
            }
            let images = self.elements(src)?;
            let sigma = RingAutomorphism::new(&ring, &ring, images)?;
            let l = log_automorphism(&sigma, self.opts.cap)?;
            return Ok(Output {
                lines: vec![format!("log({sigma}) = {l}"), "exp(log) reproduces the map exactly".into()],
                data: json!({"automorphism": sigma.to_string(), "log": l.to_string()}),
            });
        }
        let idx = self.indices(p)?;
        let sys = self.sys()?.clone();
        let mut lines = Vec::new();
        let mut data = Vec::new();
        for i in idx {
            let d = sys.derivation(i);
            let sigma = exp_derivation(d, false, self.opts.cap)?;
            let l = log_automorphism(&sigma, self.opts.cap)?;
            if &l != d {
                return Err(Failure::internal("RoundTripFailed", format!("log(exp({})) = {l}", self.dname(i))));
            }
            lines.push(format!("log(exp({0})) = {l} = {0}", self.dname(i)));
            data.push(json!({"derivation": self.dname(i), "exp": sigma.to_string(), "log": l.to_string(), "round_trip": true}));
        }
        Ok(Output { lines, data: Value::Array(data) })
    }

    fn preslice(&mut self, p: &BTreeMap<String, String>) -> Out {
        let bound = self.bound(p, DEFAULT_SEED_BOUND)?;
        let idx = self.indices(p)?;
        let sys = self.sys()?.clone();
        let mut lines = Vec::new();
        let mut data = Vec::new();
        for i in idx {
            let found = search_preslices(&sys, i, bound, DEFAULT_SOLVE_BOUND)?;
            lines.push(format!("{}: {} candidates from seeds of degree <= {bound}", self.dname(i), found.len()));
            lines.extend(found.iter().map(|c| format!("  {}", render_preslice(c))));
            data.push(json!({
                "derivation": self.dname(i),
                "bound": bound,
                "candidates": found.iter().map(preslice_json).collect::<Vec<_>>(),
            }));
        }
        Ok(Output { lines, data: Value::Array(data) })
    }

    fn minimize_q(&mut self, p: &BTreeMap<String, String>) -> Out {
        let bound = self.bound(p, DEFAULT_SEED_BOUND)?;
        let idx = self.indices(p)?;
        let sys = self.sys()?.clone();
        let mut lines = Vec::new();
        let mut data = Vec::new();
        for i in idx {
            let m = minimal_preslice(&sys, i, bound, DEFAULT_SOLVE_BOUND)?;
            if let Some(bad) = m.candidate_qs.iter().find(|q| !m.preslice.q.divides(q)) {
                return Err(Failure::internal(
                    "DivisibilityViolated",
                    format!("minimal q = {} does not divide candidate q = {bad}", m.preslice.q),
                ));
            }
            lines.push(format!("{}: {}", self.dname(i), m.preslice));
            lines.push(format!(
                "  {}; divides all {} candidate q: {}",
                m.minimality,
                m.candidate_qs.len(),
                m.candidate_qs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
            ));
            data.push(json!({
                "derivation": self.dname(i),
                "preslice": preslice_json(&m.preslice),
                "minimality": m.minimality.to_string(),
                "candidate_qs": m.candidate_qs.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "divides_all_candidates": true,
            }));
        }
        Ok(Output { lines, data: Value::Array(data) })
    }

    fn preslice_lines(&self, s: &Sliced, lines: &mut Vec<String>) -> Vec<Value> {
        let mut out = Vec::new();
        for (ps, m) in s.sys.preslices().unwrap_or_default().iter().zip(&s.minimal) {
            let how = m.as_ref().map(|m| m.minimality.to_string()).unwrap_or_else(|| "declared".into());
            lines.push(format!("{} ({how})", ps));
            let mut v = preslice_json(ps);
            v["minimality"] = json!(how);
            out.push(v);
        }
        out
    }

    fn fibers(&mut self, p: &BTreeMap<String, String>) -> Out {
        let bound = self.bound(p, DEFAULT_SEED_BOUND)?;
        let s = self.sliced(bound)?;
        let mut lines = Vec::new();
        let preslices = self.preslice_lines(&s, &mut lines);
        let report = degenerate_fibers(&s.sys)?;
        if report.degenerate.is_empty() {
            lines.push("degenerate fibers: none over the rationals".into());
        }
        for d in &report.degenerate {
            lines.push(format!("degenerate fiber f = {}: q_i(alpha) = 0 for i in {:?}", d.alpha, d.indices));
        }
        for (i, r) in &report.residuals {
            lines.push(format!("q{i} has factor {r} without rational roots; irrational fibers may also degenerate"));
        }
        let degenerate: Vec<Value> =
            report.degenerate.iter().map(|d| json!({"alpha": d.alpha.to_string(), "indices": d.indices})).collect();
        let residuals: Vec<Value> =
            report.residuals.iter().map(|(i, r)| json!({"index": i, "factor": r.to_string()})).collect();
        Ok(Output {
            lines,
            data: json!({"preslices": preslices, "degenerate": degenerate, "residuals": residuals, "seed_bound": bound}),
        })
    }

    fn certify(&mut self, p: &BTreeMap<String, String>) -> Out {
        let alpha = Self::alpha(p)?;
        let bound = self.bound(p, DEFAULT_CERTIFICATE_BOUND)?;
        let seed_bound = self.opts.bound.unwrap_or(DEFAULT_SEED_BOUND);
        let s = self.sliced(seed_bound)?;
        let names = s.sys.ring().names().to_vec();
        if let Some(src) = p.get("coefficients") {
            let coeffs: Vec<_> = self.elements(src)?.into_iter().map(|e| e.value().clone()).collect();
            if coeffs.len() != s.sys.len() {
                return Err(Failure::usage(format!("expected {} coefficients, got {}", s.sys.len(), coeffs.len())));
            }
            let cert = verify_dependency(&s.sys, &alpha, &coeffs)?;
            let residue: Vec<String> = cert.residue.iter().map(|r| r.display(&names).to_string()).collect();
            if !cert.verifies() {
                return Err(Failure::new(
                    "NotADependency",
                    Severity::Verdict,
                    format!("residue modulo (f - {alpha}, r) is ({})", residue.join(", ")),
                ));
            }
            return Ok(Output {
                lines: vec![format!(
                    "coefficients {} give a dependency modulo (f - {alpha}): residue zero",
                    cert.render(&names)
                )],
                data: json!({"alpha": alpha.to_string(), "coefficients": cert.render(&names), "residue": residue, "verifies": true}),
            });
        }
        match dependency_certificate(&s.sys, &alpha, bound)? {
            Some(cert) => Ok(Output {
                lines: vec![format!(
                    "dependency modulo (f - {alpha}) with coefficients {} (grevlex-least, degree <= {bound}): residue zero",
                    cert.render(&names)
                )],
                data: json!({"alpha": alpha.to_string(), "bound": bound, "coefficients": cert.render(&names), "verifies": true}),
            }),
            None => Ok(Output {
                lines: vec![format!("no dependency modulo (f - {alpha}) with coefficients of degree <= {bound}")],
                data: json!({"alpha": alpha.to_string(), "bound": bound, "coefficients": Value::Null}),
            }),
        }
    }

    fn crosscheck(&mut self, p: &BTreeMap<String, String>) -> Out {
        let alphas = match p.get("alphas") {
            Some(src) => src.split(',').map(Self::scalar).collect::<Result<Vec<_>, _>>()?,
            None => (-2..=2).map(|a| Rational::from_integer(a.into())).collect(),
        };
        let bound = self.bound(p, DEFAULT_CERTIFICATE_BOUND)?;
        let seed_bound = self.opts.bound.unwrap_or(DEFAULT_SEED_BOUND);
        let s = self.sliced(seed_bound)?;
        let names = s.sys.ring().names().to_vec();
        let rows = bla_crosscheck(&s.sys, &alphas, bound)?;
        let mut lines = vec![format!("{:>8}  {:<12}  {:<28}  status", "alpha", "q_i(alpha)=0", "certificate")];
        let mut data = Vec::new();
        for r in &rows {
            let cert = r.certificate.as_ref().map(|c| c.render(&names));
            lines.push(format!(
                "{:>8}  {:<12}  {:<28}  {}",
                r.alpha.to_string(),
                format!("{:?}", r.q_indices),
                cert.clone().unwrap_or_else(|| "-".into()),
                r.status
            ));
            data.push(json!({"alpha": r.alpha.to_string(), "q_indices": r.q_indices, "certificate": cert, "status": r.status.to_string()}));
        }
        lines.push(format!("contradictions: 0 (certificate degree bound {bound})"));
        Ok(Output { lines, data: json!({"bound": bound, "rows": data, "contradictions": 0}) })
    }

    fn improve(&mut self, p: &BTreeMap<String, String>) -> Out {
        let bound = self.bound(p, DEFAULT_SEED_BOUND)?;
        let s = self.sliced(bound)?;
        let b = self.improved(bound)?;
        let verdict = verify_module_basis(&b, &s.sys, bound, DEFAULT_SOLVE_BOUND, self.opts.cap);
        if !verdict.passed() {
            let msg: Vec<String> = verdict.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
            return Err(Failure::internal("ModuleCheckFailed", msg.join("; ")));
        }
        let names = names_of(&b.basis);
        let mut lines = Vec::new();
        for (n, e) in names.iter().zip(&b.basis) {
            lines.push(format!("{n} = {e}"));
        }
        for (i, row) in b.change.iter().enumerate() {
            let terms: Vec<String> = row.iter().zip(&names).map(|(c, n)| format!("({c})*{n}")).collect();
            lines.push(format!("{} = {}   (T = f)", self.dname(i), terms.join(" + ")));
        }
        let show = |v: &[Rational]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        lines.push(format!("saturated at alpha in {:?}", show(&b.saturated)));
        lines.push(format!(
            "rational roots of det phi(E) without a constant dependency: {:?}",
            show(&b.remaining_roots)
        ));
        if let Some(r) = &b.residual {
            lines.push(format!("det phi keeps factor {r} without rational roots; not saturated over extensions"));
        }
        for c in &verdict.checks {
            lines.push(format!("check {}: passed ({})", c.name, c.detail));
        }
        let after = verdict.degenerate_after.as_deref().map(show);
        lines.push(format!(
            "degenerate fibers before {:?}, after {:?}",
            show(&verdict.degenerate_before),
            after.clone().unwrap_or_default()
        ));
        Ok(Output {
            lines,
            data: json!({
                "basis": b.basis.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "phi": b.phi.iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "change": b.change.iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "saturated": show(&b.saturated),
                "remaining_roots": show(&b.remaining_roots),
                "residual": b.residual.as_ref().map(ToString::to_string),
                "checks": verdict.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed})).collect::<Vec<_>>(),
                "degenerate_before": show(&verdict.degenerate_before),
                "degenerate_after": after,
            }),
        })
    }

    fn coordinatize(&mut self, p: &BTreeMap<String, String>) -> Out {
        let bound = self.bound(p, DEFAULT_SEED_BOUND)?;
        let queries = self.queries(p)?;
        let sys = if Self::flag(p, "improved", false)? {
            let b = self.improved(bound)?;
            let f = self.sys()?.kernel().clone();
            let e = DerivationSystem::new(b.basis, f, self.opts.cap)?;
            crate::slice::with_minimal_preslices(e, bound, DEFAULT_SOLVE_BOUND)?.0
        } else {
            self.sliced(bound)?.sys
        };
        let chart = coordinatize_global(&sys, &queries)?;
        Ok(chart_output(&chart, Some(sys.kernel())))
    }

    fn fiber_chart(&mut self, p: &BTreeMap<String, String>) -> Out {
        let alpha = Self::alpha(p)?;
        let bound = self.bound(p, DEFAULT_SEED_BOUND)?;
        let queries = self.queries(p)?;
        let s = self.sliced(bound)?;
        let chart = coordinatize_fiber(&s.sys, &alpha, &queries)?;
        let mut out = chart_output(&chart, None);
        out.lines.insert(0, format!("fiber f = {alpha}"));
        out.data["alpha"] = json!(alpha.to_string());
        Ok(out)
    }

    fn probe(&mut self, p: &BTreeMap<String, String>) -> Out {
        if !self.opts.experimental {
            return Err(Failure::usage("probe-question is experimental; pass --experimental"));
        }
        let alpha = Self::alpha(p)?;
        let bound = self.bound(p, DEFAULT_CERTIFICATE_BOUND)?;
        let seed_bound = self.opts.bound.unwrap_or(DEFAULT_SEED_BOUND);
        let s = self.sliced(seed_bound)?;
        let r = question_probe(&s.sys, &alpha, bound)?;
        let mut lines = vec![format!(
            "fiber f = {alpha} ({}), search bound {bound}",
            if r.degenerate { "degenerate" } else { "nondegenerate" }
        )];
        let outcome = match &r.outcome {
            ProbeOutcome::ChartFound { coordinates, expressions } => {
                lines.extend(coordinates.iter().map(|(n, v)| format!("{n} = {v}")));
                lines.extend(expressions.iter().map(|(q, e)| format!("{q} = {e}")));
                json!({"kind": "chart-found", "coordinates": coordinates, "expressions": expressions})
            }
            ProbeOutcome::NoChart { reason } => {
                lines.push(format!("no chart: {reason}"));
                json!({"kind": "no-chart", "reason": reason})
            }
        };
        Ok(Output {
            lines,
            data: json!({"alpha": alpha.to_string(), "degenerate": r.degenerate, "bound": bound, "outcome": outcome}),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{builtin_scenario, parse_scenario};

    fn builtin(name: &str) -> Scenario {
        parse_scenario(builtin_scenario(name).unwrap(), name).unwrap()
    }

    fn entry<'a>(r: &'a Report, command: &str) -> &'a Entry {
        r.entries.iter().find(|e| e.command == command).unwrap()
    }

    #[test]
    fn empty_command_list_gives_empty_report() {
        let mut s = builtin("makar-limanov");
        s.commands.clear();
        let r = run_scenario(&s, &RunOptions::default());
        assert!(r.entries.is_empty());
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn makar_limanov_report() {
        let r = run_scenario(&builtin("makar-limanov"), &RunOptions::default());
        assert_eq!(r.exit_code(), 0, "{}", r.to_text());
        let v = &entry(&r, "validate").data;
        assert_eq!(v["independence"]["witness"]["value"], "x^4");
        assert_eq!(entry(&r, "fibers").data["degenerate"][0]["indices"], json!([1, 2]));
        let chart = &entry(&r, "fiber-chart").data["entries"][0];
        assert_eq!(chart["expression"], "S2^3 - S1^2 - 1");
        let c = entry(&r, "coordinatize");
        assert_eq!(
            (c.status.clone(), c.failure.as_ref().unwrap().class.as_str()),
            (Status::ExpectedFailure, "NonConstantQ")
        );
    }

    #[test]
    fn slide_plane_improves() {
        let r = run_scenario(&builtin("slide-plane"), &RunOptions::default());
        assert_eq!(r.exit_code(), 0, "{}", r.to_text());
        assert_eq!(entry(&r, "improve-basis").data["basis"], json!(["d/dX", "d/dY"]));
        assert_eq!(entry(&r, "improve-basis").data["degenerate_after"], json!([]));
    }

    #[test]
    fn danielewski_rejected_at_validation() {
        let r = run_scenario(&builtin("danielewski-note"), &RunOptions::default());
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.exit_code(), 1);
        let f = r.entries[0].failure.as_ref().unwrap();
        assert_eq!(f.class, "NotFactorial");
        assert!(f.message.contains("non-UFD"));
    }

    #[test]
    fn errors_become_entries() {
        let s = builtin("slide-plane");
        let opts = RunOptions::default();
        let cmds = [
            Command::new("nonsense"),
            Command::new("fibers").with("colour", "red"),
            Command::new("fiber-chart").with("alpha", "0"),
            Command::new("probe-question").with("alpha", "0"),
            Command::new("certify-dependence").with("alpha", "1").with("coefficients", "1; -1"),
            Command::new("fibers").with("expect", "NonConstantQ"),
        ];
        let r = run_commands(&s, &cmds, &opts);
        let classes: Vec<(&str, i32)> =
            r.entries.iter().map(|e| (e.failure.as_ref().unwrap().class.as_str(), e.exit_code())).collect();
        assert_eq!(
            classes,
            vec![
                ("Usage", 2),
                ("Usage", 2),
                ("DegenerateFiber", 1),
                ("Usage", 2),
                ("NotADependency", 1),
                ("UnexpectedSuccess", 1)
            ]
        );
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn declared_preslices_and_discovered_kernel() {
        let src = "ring { vars = [x, y, z] }\nderivation D1 = \"z*d/dx + d/dy\"\nderivation D2 = \"d/dy\"\npreslice D2 = \"y*z - x\"\nrun fibers\nrun validate\n";
        let s = parse_scenario(src, "t").unwrap();
        let r = run_scenario(&s, &RunOptions::default());
        assert_eq!(r.exit_code(), 0, "{}", r.to_text());
        let ps = &r.entries[0].data["preslices"];
        assert_eq!(ps[1]["provenance"]["kind"], "declared");
        assert_eq!(ps[1]["q"], "T");
        assert_eq!(r.entries[1].data["kernel"]["origin"], "discovered");
        assert_eq!(r.entries[1].data["kernel"]["f"], "z");

        let bad = src.replace("y*z - x", "y");
        let r = run_scenario(&parse_scenario(&bad, "t").unwrap(), &RunOptions::default());
        assert_eq!(r.entries[0].failure.as_ref().unwrap().class, "InvalidPreSlice");
    }

    #[test]
    fn probe_and_log_images() {
        let s = builtin("slide-plane");
        let opts = RunOptions { experimental: true, ..RunOptions::default() };
        let r = run_commands(
            &s,
            &[
                Command::new("probe-question").with("alpha", "0"),
                Command::new("log").with("images", "X + 2*Z; Y + 2; Z"),
            ],
            &opts,
        );
        assert_eq!(r.exit_code(), 0, "{}", r.to_text());
        assert!(r.entries[0].non_authoritative);
        assert_eq!(r.entries[0].data["outcome"]["kind"], "chart-found");
        assert_eq!(r.entries[1].data["log"], "2*Z*d/dX + 2*d/dY");
    }

    #[test]
    fn machine_output_is_deterministic() {
        for name in crate::frontend::BUILTIN_SCENARIOS {
            let s = builtin(name);
            let a = run_scenario(&s, &RunOptions::default()).to_machine();
            let b = run_scenario(&s, &RunOptions::default()).to_machine();
            assert_eq!(a, b);
        }
    }
}
