//! Scenario files.
//!
//! ```text
//! # comment
//! name = "makar-limanov"
//! ring { vars = [x, y, z, t]; relation = "x^2*y + x + z^2 + t^3"; ufd = true; units_trivial = true }
//! derivation D1 = "2*z*d/dy - x^2*d/dz"
//! kernel = "x"
//! preslice D1 = "z"
//! run fiber-chart alpha=1 queries="y"
//! ```
//!
//! The ring block may span several lines; every other statement is one line.
//! Without a relation `ufd` and `units_trivial` default to true, with one they
//! must be declared.

use std::collections::BTreeMap;

use crate::frontend::parse::{parse_derivation, parse_element, parse_poly};
use crate::frontend::report::{Failure, Severity};
use crate::{Derivation, Element, Rational, Ring};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {}", failure.message)]
pub struct ScenarioError {
    pub line: usize,
    pub failure: Failure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Command {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub line: usize,
}

impl Command {
    pub fn new(name: &str) -> Self {
        Command { name: name.into(), params: BTreeMap::new(), line: 0 }
    }

    pub fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub ring: Ring,
    pub derivations: Vec<(String, Derivation)>,
    pub kernel: Option<Element>,
    /// Declared pre-slice elements by derivation name.
    pub preslices: Vec<(String, Element)>,
    pub commands: Vec<Command>,
}

impl Scenario {
    pub fn derivation_index(&self, name: &str) -> Option<usize> {
        self.derivations.iter().position(|(n, _)| n == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Sym(char),
    Newline,
}

fn is_sym(c: char) -> bool {
    matches!(c, '=' | '{' | '}' | '[' | ']' | ';')
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ScenarioError> {
    let mut out = Vec::new();
    for (k, raw) in src.lines().enumerate() {
        let line = k + 1;
        let mut chars = raw.chars().peekable();
        while let Some(&c) = chars.peek() {
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                chars.next();
            } else if is_sym(c) {
                chars.next();
                out.push((Tok::Sym(c), line));
            } else if c == '"' {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(c) => s.push(c),
                        None => return Err(syntax(line, "unterminated string")),
                    }
                }
                out.push((Tok::Str(s), line));
            } else {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || is_sym(c) || c == '"' || c == '#' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                out.push((Tok::Word(s), line));
            }
        }
        out.push((Tok::Newline, line));
    }
    Ok(out)
}

fn syntax(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError { line, failure: Failure::new("Syntax", Severity::Usage, message) }
}

fn at(line: usize, failure: impl Into<Failure>) -> ScenarioError {
    ScenarioError { line, failure: failure.into() }
}

struct Cursor {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(1, |t| t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn skip_newlines(&mut self) {
        while self.peek() == Some(&Tok::Newline) {
            self.pos += 1;
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ScenarioError> {
        let line = self.line();
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            other => Err(syntax(line, format!("expected `{c}`, found {}", show(other.as_ref())))),
        }
    }

    fn word(&mut self) -> Result<String, ScenarioError> {
        let line = self.line();
        match self.next() {
            Some(Tok::Word(w)) => Ok(w),
            other => Err(syntax(line, format!("expected a name, found {}", show(other.as_ref())))),
        }
    }

    fn value(&mut self) -> Result<String, ScenarioError> {
        let line = self.line();
        match self.next() {
            Some(Tok::Word(w)) | Some(Tok::Str(w)) => Ok(w),
            other => Err(syntax(line, format!("expected a value, found {}", show(other.as_ref())))),
        }
    }

    fn end_of_line(&mut self) -> Result<(), ScenarioError> {
        let line = self.line();
        match self.next() {
            None | Some(Tok::Newline) => Ok(()),
            other => Err(syntax(line, format!("expected end of line, found {}", show(other.as_ref())))),
        }
    }
}

fn show(t: Option<&Tok>) -> String {
    match t {
        None | Some(Tok::Newline) => "end of line".into(),
        Some(Tok::Word(w)) => format!("`{w}`"),
        Some(Tok::Str(s)) => format!("\"{s}\""),
        Some(Tok::Sym(c)) => format!("`{c}`"),
    }
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool, ScenarioError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(syntax(line, format!("`{key}` must be true or false, found `{v}`"))),
    }
}

struct RingDecl {
    vars: Vec<String>,
    relation: Option<(String, usize)>,
    ufd: Option<bool>,
    units_trivial: Option<bool>,
}

fn ring_block(c: &mut Cursor) -> Result<RingDecl, ScenarioError> {
    c.expect_sym('{')?;
    let mut decl = RingDecl { vars: Vec::new(), relation: None, ufd: None, units_trivial: None };
    let mut have_vars = false;
    loop {
        while matches!(c.peek(), Some(Tok::Newline) | Some(Tok::Sym(';'))) {
            c.next();
        }
        if c.peek() == Some(&Tok::Sym('}')) {
            c.next();
            break;
        }
        if c.peek().is_none() {
            return Err(syntax(c.line(), "unterminated ring block"));
        }
        let line = c.line();
        let key = c.word()?;
        c.expect_sym('=')?;
        match key.as_str() {
            "vars" => {
                c.expect_sym('[')?;
                loop {
                    match c.next() {
                        Some(Tok::Sym(']')) => break,
                        Some(Tok::Word(w)) => {
                            decl.vars.extend(w.split(',').filter(|s| !s.is_empty()).map(str::to_string))
                        }
                        other => {
                            return Err(syntax(
                                line,
                                format!("expected a variable name, found {}", show(other.as_ref())),
                            ))
                        }
                    }
                }
                have_vars = true;
            }
            "relation" => decl.relation = Some((c.value()?, line)),
            "ufd" => decl.ufd = Some(parse_bool(line, &key, &c.value()?)?),
            "units_trivial" => decl.units_trivial = Some(parse_bool(line, &key, &c.value()?)?),
            _ => return Err(syntax(line, format!("unknown ring key `{key}`"))),
        }
    }
    if !have_vars || decl.vars.is_empty() {
        return Err(syntax(c.line(), "ring block needs a nonempty `vars` list"));
    }
    for v in &decl.vars {
        if !v.chars().next().is_some_and(|ch| ch.is_ascii_alphabetic() || ch == '_')
            || !v.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
        {
            return Err(syntax(c.line(), format!("invalid variable name `{v}`")));
        }
    }
    Ok(decl)
}

fn build_ring(decl: &RingDecl, line: usize) -> Result<Ring, ScenarioError> {
    let relation = match &decl.relation {
        Some((src, l)) => Some(parse_poly::<Rational>(src, &decl.vars).map_err(|e| at(*l, e))?),
        None => None,
    };
    let (ufd, units) = match (&relation, decl.ufd, decl.units_trivial) {
        (_, Some(u), Some(t)) => (u, t),
        (None, u, t) => (u.unwrap_or(true), t.unwrap_or(true)),
        (Some(_), _, _) => {
            return Err(syntax(line, "a ring with a relation must declare both `ufd` and `units_trivial`"))
        }
    };
    Ring::new(&decl.vars, relation, ufd, units).map_err(|e| at(line, e))
}

/// Parses a scenario; `default_name` is used when the file has no `name` line.
pub fn parse_scenario(src: &str, default_name: &str) -> Result<Scenario, ScenarioError> {
    let mut c = Cursor { toks: lex(src)?, pos: 0 };
    let mut name = default_name.to_string();
    let mut ring: Option<Ring> = None;
    let mut derivations: Vec<(String, Derivation)> = Vec::new();
    let mut kernel = None;
    let mut preslices: Vec<(String, Element)> = Vec::new();
    let mut commands = Vec::new();
    let need_ring = |ring: &Option<Ring>, line: usize| -> Result<Ring, ScenarioError> {
        ring.clone().ok_or_else(|| syntax(line, "the ring must be declared first"))
    };
    loop {
        c.skip_newlines();
        if c.peek().is_none() {
            break;
        }
        let line = c.line();
        let keyword = c.word()?;
        match keyword.as_str() {
            "name" => {
                c.expect_sym('=')?;
                name = c.value()?;
            }
            "ring" => {
                if ring.is_some() {
                    return Err(syntax(line, "ring declared twice"));
                }
                let decl = ring_block(&mut c)?;
                ring = Some(build_ring(&decl, line)?);
            }
            "derivation" => {
                let r = need_ring(&ring, line)?;
                let dname = c.word()?;
                c.expect_sym('=')?;
                let src = c.value()?;
                if derivations.iter().any(|(n, _)| n == &dname) {
                    return Err(syntax(line, format!("derivation `{dname}` declared twice")));
                }
                derivations.push((dname, parse_derivation(&src, &r).map_err(|e| at(line, e))?));
            }
            "kernel" => {
                let r = need_ring(&ring, line)?;
                c.expect_sym('=')?;
                let src = c.value()?;
                kernel = Some(parse_element(&src, &r).map_err(|e| at(line, e))?);
            }
            "preslice" => {
                let r = need_ring(&ring, line)?;
                let dname = c.word()?;
                c.expect_sym('=')?;
                let src = c.value()?;
                if !derivations.iter().any(|(n, _)| n == &dname) {
                    return Err(syntax(line, format!("unknown derivation `{dname}`")));
                }
                if preslices.iter().any(|(n, _)| n == &dname) {
                    return Err(syntax(line, format!("pre-slice for `{dname}` declared twice")));
                }
                preslices.push((dname, parse_element(&src, &r).map_err(|e| at(line, e))?));
            }
            "run" => {
                let mut cmd = Command::new(&c.word()?);
                cmd.line = line;
                while matches!(c.peek(), Some(Tok::Word(_))) {
                    let key = c.word()?;
                    c.expect_sym('=')?;
                    let value = c.value()?;
                    if cmd.params.insert(key.clone(), value).is_some() {
                        return Err(syntax(line, format!("parameter `{key}` given twice")));
                    }
                }
                commands.push(cmd);
            }
            other => return Err(syntax(line, format!("unknown statement `{other}`"))),
        }
        c.end_of_line()?;
    }
    let ring = ring.ok_or_else(|| syntax(1, "scenario declares no ring"))?;
    Ok(Scenario { name, ring, derivations, kernel, preslices, commands })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_multiline_ring_and_commands() {
        let src = "# demo\nring {\n  vars = [x, y]\n}\nderivation D = \"d/dy\"\nkernel = \"x\"\nrun fibers\nrun crosscheck alphas=-1,0,1 bound=2\n";
        let s = parse_scenario(src, "demo").unwrap();
        assert_eq!(s.name, "demo");
        assert_eq!(s.ring.names(), &["x".to_string(), "y".to_string()]);
        assert_eq!(s.commands.len(), 2);
        assert_eq!(s.commands[1].params["alphas"], "-1,0,1");
        assert_eq!(s.commands[1].line, 8);
    }

    #[test]
    fn errors_carry_lines_and_classes() {
        let e = parse_scenario("ring { vars = [x] }\nderivation D = \"d/dq\"\n", "t").unwrap_err();
        assert_eq!((e.line, e.failure.class.as_str()), (2, "UnknownVariable"));
        let e = parse_scenario("ring { vars = [x, y]; relation = \"x*y - 1\" }\n", "t").unwrap_err();
        assert_eq!(e.failure.severity, Severity::Usage);
        let src = "ring { vars = [x, y]; relation = \"x^2 - y\"; ufd = true; units_trivial = true }\nderivation D = \"d/dx\"\n";
        let e = parse_scenario(src, "t").unwrap_err();
        assert_eq!((e.line, e.failure.class.as_str(), e.failure.severity), (2, "NotWellDefined", Severity::Verdict));
        assert!(parse_scenario("run fibers\n", "t").is_err());
        assert!(parse_scenario("ring { vars = [x] }\nbogus\n", "t").is_err());
        assert!(parse_scenario("ring { vars = [x] }\nkernel = \"x\" extra\n", "t").is_err());
    }
}
