//! Parsing, scenario files, execution and reports.

pub mod parse;
pub mod report;
pub mod run;
pub mod scenario;

pub use parse::{parse_derivation, parse_element, parse_poly, ParseError};
pub use report::{Entry, Failure, Report, Severity, Status};
pub use run::{run_commands, run_scenario, RunOptions};
pub use scenario::{parse_scenario, Command, Scenario, ScenarioError};

/// Names of the scenarios shipped with the crate.
pub const BUILTIN_SCENARIOS: &[&str] = &["makar-limanov", "slide-plane", "danielewski-note"];

/// Source text of a bundled scenario.
pub fn builtin_scenario(name: &str) -> Option<&'static str> {
    match name {
        "makar-limanov" => Some(include_str!("../../scenarios/makar-limanov.scn")),
        "slide-plane" => Some(include_str!("../../scenarios/slide-plane.scn")),
        "danielewski-note" => Some(include_str!("../../scenarios/danielewski-note.scn")),
        _ => None,
    }
}
