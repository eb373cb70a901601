//! Command results, error classes and report rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

use crate::derivation::DerivationError;
use crate::explog::ExpLogError;
use crate::fiber::FiberError;
use crate::frontend::parse::ParseError;
use crate::improve::ImproveError;
use crate::ring::RingError;
use crate::slice::SliceError;

/// How a failure maps onto the process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    /// A mathematical verdict: the input does not have the required property.
    Verdict,
    /// Malformed input or parameters.
    Usage,
    /// A computed result failed re-verification.
    Internal,
}

impl Severity {
    pub fn exit_code(self) -> i32 {
        match self {
            Severity::Verdict => 1,
            Severity::Usage => 2,
            Severity::Internal => 3,
        }
    }
}

/// A classified error: `class` is the error variant name, e.g. `NotWellDefined`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub class: String,
    pub severity: Severity,
    pub message: String,
}

impl Failure {
    pub fn new(class: &str, severity: Severity, message: impl Into<String>) -> Self {
        Failure { class: class.into(), severity, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure::new("Usage", Severity::Usage, message)
    }

    pub fn internal(class: &str, message: impl Into<String>) -> Self {
        Failure::new(class, Severity::Internal, message)
    }
}

impl From<DerivationError> for Failure {
    fn from(e: DerivationError) -> Self {
        use DerivationError::*;
        let (class, sev) = match &e {
            NotWellDefined { .. } => ("NotWellDefined", Severity::Verdict),
            ArityMismatch { .. } => ("ArityMismatch", Severity::Usage),
            PresentationMismatch => ("PresentationMismatch", Severity::Usage),
            CapExceeded { .. } => ("CapExceeded", Severity::Verdict),
            NotInKernel { .. } => ("NotInKernel", Severity::Verdict),
            EmptySystem => ("EmptySystem", Severity::Usage),
            NotFactorial => ("NotFactorial", Severity::Verdict),
            NontrivialUnits => ("NontrivialUnits", Severity::Verdict),
            NotCommuting { .. } => ("NotCommuting", Severity::Verdict),
            Dependent { .. } => ("Dependent", Severity::Verdict),
            ConstantKernel => ("ConstantKernel", Severity::Verdict),
            InvalidPreSlice { .. } => ("InvalidPreSlice", Severity::Verdict),
        };
        Failure::new(class, sev, e.to_string())
    }
}

impl From<SliceError> for Failure {
    fn from(e: SliceError) -> Self {
        use SliceError::*;
        let (class, sev) = match &e {
            Derivation(inner) => return inner.clone().into(),
            IndexOutOfRange(_) => ("IndexOutOfRange", Severity::Usage),
            NotInJointKernel { .. } => ("NotInJointKernel", Severity::Verdict),
            AlreadyInKernel { .. } => ("AlreadyInKernel", Severity::Verdict),
            SolveInFFailed { .. } => ("SolveInFFailed", Severity::Verdict),
            NotExpressible { .. } => ("NotExpressible", Severity::Verdict),
            NoSeedFound { .. } => ("NoSeedFound", Severity::Verdict),
            NoCandidates { .. } => ("NoCandidates", Severity::Verdict),
            NonConstantQ { .. } => ("NonConstantQ", Severity::Verdict),
            DegenerateFiber { .. } => ("DegenerateFiber", Severity::Verdict),
            CapExceeded { .. } => ("CapExceeded", Severity::Verdict),
            NoPointSampler => ("NoPointSampler", Severity::Verdict),
            MissingPreSlices => ("MissingPreSlices", Severity::Internal),
            NonConstantCoefficient { .. } => ("NonConstantCoefficient", Severity::Internal),
            RoundTripFailed { .. } => ("RoundTripFailed", Severity::Internal),
            PresentationMismatch => ("PresentationMismatch", Severity::Internal),
        };
        Failure::new(class, sev, e.to_string())
    }
}

impl From<ExpLogError> for Failure {
    fn from(e: ExpLogError) -> Self {
        use ExpLogError::*;
        let (class, sev) = match &e {
            NotLocallyNilpotent(_) => ("NotLocallyNilpotent", Severity::Verdict),
            CapExceeded { .. } => ("CapExceeded", Severity::Verdict),
            NotDerivation { .. } => ("NotDerivation", Severity::Verdict),
            RelationNotPreserved(_) => ("RelationNotPreserved", Severity::Verdict),
            PresentationMismatch => ("PresentationMismatch", Severity::Usage),
            CoefficientNotParameter(_) => ("CoefficientNotParameter", Severity::Usage),
        };
        Failure::new(class, sev, e.to_string())
    }
}

impl From<FiberError> for Failure {
    fn from(e: FiberError) -> Self {
        match e {
            FiberError::Slice(inner) => inner.into(),
            FiberError::MissingPreSlices => Failure::internal("MissingPreSlices", e.to_string()),
            FiberError::InvariantViolation { .. } => Failure::internal("InvariantViolation", e.to_string()),
        }
    }
}

impl From<ImproveError> for Failure {
    fn from(e: ImproveError) -> Self {
        use ImproveError::*;
        let (class, sev) = match &e {
            Derivation(inner) => return inner.clone().into(),
            Slice(inner) => return inner.clone().into(),
            SolveInFFailed { .. } => ("SolveInFFailed", Severity::Verdict),
            MissingPreSlices => ("MissingPreSlices", Severity::Internal),
            DivisionNotIntegral { .. } => ("DivisionNotIntegral", Severity::Internal),
            ChangeNotPolynomial(_) => ("ChangeNotPolynomial", Severity::Internal),
        };
        Failure::new(class, sev, e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Derivation(inner) => inner.into(),
            ParseError::Syntax { .. } => Failure::new("Syntax", Severity::Usage, e.to_string()),
            ParseError::UnknownVariable { .. } => Failure::new("UnknownVariable", Severity::Usage, e.to_string()),
        }
    }
}

impl From<RingError> for Failure {
    fn from(e: RingError) -> Self {
        Failure::usage(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// The command failed with the error class named in its `expect` parameter.
    ExpectedFailure,
    Failed,
}

/// The result of one scenario command.
#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    /// Set for experimental commands whose output is not a proof of anything.
    pub non_authoritative: bool,
    pub failure: Option<Failure>,
    /// Human-readable result lines.
    pub lines: Vec<String>,
    /// Structured result; object keys serialize in sorted order.
    pub data: serde_json::Value,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Entry {
    pub fn exit_code(&self) -> i32 {
        match (&self.status, &self.failure) {
            (Status::Failed, Some(f)) => f.severity.exit_code(),
            (Status::Failed, None) => Severity::Internal.exit_code(),
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub entries: Vec<Entry>,
}

impl Report {
    /// 0 when every entry succeeded, otherwise the most severe failure's code.
    pub fn exit_code(&self) -> i32 {
        self.entries.iter().map(Entry::exit_code).max().unwrap_or(0)
    }

    /// Stable JSON; timing is omitted so identical runs give identical bytes.
    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {}", self.scenario);
        for e in &self.entries {
            let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let head =
                if params.is_empty() { e.command.clone() } else { format!("{} {}", e.command, params.join(" ")) };
            let tag = match e.status {
                Status::Ok => "ok",
                Status::ExpectedFailure => "expected failure",
                Status::Failed => "FAILED",
            };
            let _ = writeln!(out, "\n[{tag}] {head} ({} ms)", e.elapsed.as_millis());
            if e.non_authoritative {
                let _ = writeln!(out, "  experimental: heuristic output, not authoritative");
            }
            if let Some(f) = &e.failure {
                let _ = writeln!(out, "  {}: {}", f.class, f.message);
            }
            for line in &e.lines {
                let _ = writeln!(out, "  {line}");
            }
        }
        out
    }
}
