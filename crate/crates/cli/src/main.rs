use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lndkit::derivation::DEFAULT_CAP;
use lndkit::frontend::{
    builtin_scenario, parse_scenario, run_commands, run_scenario, Command, RunOptions, Scenario, BUILTIN_SCENARIOS,
};

#[derive(Parser)]
#[command(name = "lndkit", version, about = "Exact computations with commuting locally nilpotent derivations")]
struct Cli {
    /// Search bound for seeds, certificates and kernel checks.
    #[arg(long, global = true)]
    bound: Option<u32>,
    /// Iteration cap for nilpotency checks.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u32,
    /// Enable experimental, non-authoritative commands.
    #[arg(long, global = true)]
    experimental: bool,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Machine,
}

#[derive(Args)]
struct Source {
    /// Scenario file, or the name of a bundled scenario (makar-limanov, slide-plane, danielewski-note).
    scenario: String,
}

#[derive(Args)]
struct Pick {
    /// Restrict to one derivation by name.
    #[arg(long)]
    derivation: Option<String>,
}

#[derive(Args)]
struct Alpha {
    /// Fiber value, e.g. 0, -1 or 3/2.
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
}

#[derive(Subcommand)]
enum Sub {
    /// Check well-definedness, commutation, local nilpotency, independence and the kernel.
    Validate(Source),
    /// Exponential automorphisms exp(tD).
    Exp {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        pick: Pick,
        /// Compute exp(D) instead of exp(tD).
        #[arg(long)]
        no_parameter: bool,
    },
    /// Logarithm of exp(D), or of an automorphism given by generator images.
    Log {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        pick: Pick,
        /// Generator images separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        images: Option<String>,
    },
    /// Pre-slice candidates from bounded seed search.
    Preslice {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        pick: Pick,
    },
    /// Minimal q over the searched pre-slice family.
    MinimizeQ {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        pick: Pick,
    },
    /// Fibers of f where the derivations become dependent.
    Fibers(Source),
    /// Explicit dependency on the fiber f = alpha.
    CertifyDependence {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        alpha: Alpha,
        /// Verify these coefficients (separated by `;`) instead of searching.
        #[arg(long, allow_hyphen_values = true)]
        coefficients: Option<String>,
    },
    /// Compare root-based and certificate-based degeneracy over several fibers.
    Crosscheck {
        #[command(flatten)]
        source: Source,
        /// Comma-separated fiber values.
        #[arg(long, allow_hyphen_values = true)]
        alphas: Option<String>,
    },
    /// Saturate the derivation module.
    ImproveBasis(Source),
    /// Express elements in global slice coordinates.
    Coordinatize {
        #[command(flatten)]
        source: Source,
        /// Elements separated by `;` (default: the generators).
        #[arg(long, allow_hyphen_values = true)]
        queries: Option<String>,
        /// Use the improved basis.
        #[arg(long)]
        improved: bool,
    },
    /// Express elements in fiber slice coordinates.
    FiberChart {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        alpha: Alpha,
        #[arg(long, allow_hyphen_values = true)]
        queries: Option<String>,
    },
    /// Search a degenerate fiber for a polynomial chart (experimental).
    ProbeQuestion {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        alpha: Alpha,
    },
    /// Run every command listed in a scenario.
    Run(Source),
}

fn load(src: &str) -> Result<Scenario, (i32, String)> {
    let path = Path::new(src);
    let (text, default_name) = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| (2, format!("cannot read {src}: {e}")))?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| src.into());
        (text, stem)
    } else if let Some(text) = builtin_scenario(src) {
        (text.to_string(), src.to_string())
    } else {
        return Err((
            2,
            format!(
                "no scenario file `{src}` and no bundled scenario of that name (bundled: {})",
                BUILTIN_SCENARIOS.join(", ")
            ),
        ));
    };
    parse_scenario(&text, &default_name)
        .map_err(|e| (e.failure.severity.exit_code(), format!("{src}: {} ({})", e, e.failure.class)))
}

fn opt(cmd: Command, key: &str, value: Option<String>) -> Command {
    match value {
        Some(v) => cmd.with(key, v),
        None => cmd,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions { bound: cli.bound, cap: cli.cap, experimental: cli.experimental };
    let (source, command) = match cli.command {
        Sub::Run(s) => (s, None),
        Sub::Validate(s) => (s, Some(Command::new("validate"))),
        Sub::Exp { source, pick, no_parameter } => {
            let cmd = opt(Command::new("exp"), "derivation", pick.derivation);
            (source, Some(if no_parameter { cmd.with("parameter", "false") } else { cmd }))
        }
        Sub::Log { source, pick, images } => {
            (source, Some(opt(opt(Command::new("log"), "derivation", pick.derivation), "images", images)))
        }
        Sub::Preslice { source, pick } => (source, Some(opt(Command::new("preslice"), "derivation", pick.derivation))),
        Sub::MinimizeQ { source, pick } => {
            (source, Some(opt(Command::new("minimize-q"), "derivation", pick.derivation)))
        }
        Sub::Fibers(s) => (s, Some(Command::new("fibers"))),
        Sub::CertifyDependence { source, alpha, coefficients } => (
            source,
            Some(opt(Command::new("certify-dependence").with("alpha", alpha.alpha), "coefficients", coefficients)),
        ),
        Sub::Crosscheck { source, alphas } => (source, Some(opt(Command::new("crosscheck"), "alphas", alphas))),
        Sub::ImproveBasis(s) => (s, Some(Command::new("improve-basis"))),
        Sub::Coordinatize { source, queries, improved } => {
            let cmd = opt(Command::new("coordinatize"), "queries", queries);
            (source, Some(if improved { cmd.with("improved", "true") } else { cmd }))
        }
        Sub::FiberChart { source, alpha, queries } => {
            (source, Some(opt(Command::new("fiber-chart").with("alpha", alpha.alpha), "queries", queries)))
        }
        Sub::ProbeQuestion { source, alpha } => {
            if !cli.experimental {
                eprintln!(
                    "error: probe-question is experimental and its output is not authoritative; pass --experimental"
                );
                return ExitCode::from(2);
            }
            (source, Some(Command::new("probe-question").with("alpha", alpha.alpha)))
        }
    };
    let scenario = match load(&source.scenario) {
        Ok(s) => s,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(code as u8);
        }
    };
    let report = match command {
        None => run_scenario(&scenario, &opts),
        Some(cmd) => run_commands(&scenario, &[cmd], &opts),
    };
    match cli.output {
        OutputFormat::Text => print!("{}", report.to_text()),
        OutputFormat::Machine => print!("{}", report.to_machine()),
    }
    for e in &report.entries {
        if let Some(f) = e.failure.as_ref().filter(|_| e.exit_code() != 0) {
            eprintln!("error: {} failed: {} ({})", e.command, f.message, f.class);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
