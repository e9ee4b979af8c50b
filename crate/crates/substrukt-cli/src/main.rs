//! `substrukt`: command-line front end for proof search, countermodels,
//! translations, finite algebras, completions, filters and Hilbert systems.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use substrukt::algebra::MAX_ENUMERATION_SIZE;
use substrukt::calculus::{CalculusId, Sigma};
use substrukt::search::DEFAULT_BOUND;
use substrukt::syntax::Language;
use thiserror::Error;

/// Exit status for malformed invocations (`EX_USAGE`).
pub const EXIT_USAGE: u8 = 64;
/// Exit status for malformed input data (`EX_DATAERR`).
pub const EXIT_DATA: u8 = 65;
/// Exit status for unreadable input files (`EX_NOINPUT`).
pub const EXIT_NO_INPUT: u8 = 66;

#[derive(Parser, Debug)]
#[command(name = "substrukt", version, about = "Substructural logics over the full Lambek calculus")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug)]
struct Common {
    /// Structural rules: comma list of e, wl, wr, c (`w` means wl,wr).
    #[arg(long, global = true, default_value = "")]
    sigma: String,
    /// Language: core, core-meet, core-neg, core-meet-neg, full, or a connective list.
    #[arg(long, global = true, default_value = "full")]
    lang: String,
    /// Depth bound for bounded proof searches.
    #[arg(long, global = true, default_value_t = DEFAULT_BOUND)]
    bound: usize,
    /// Largest model size for countermodel searches and enumeration.
    #[arg(long = "max-size", global = true, default_value_t = 3)]
    max_size: usize,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// How results are written to standard output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable text.
    Text,
    /// One JSON document.
    Json,
    /// Proof S-expressions where a proof exists; text otherwise.
    Sexp,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a cut-free proof of a sequent.
    Prove {
        /// The sequent, e.g. "p * q => q * p".
        sequent: String,
        /// Hypothesis sequents (repeatable).
        #[arg(long = "hyp")]
        hyps: Vec<String>,
    },
    /// Run proof search and countermodel search side by side.
    Decide {
        /// The sequent.
        sequent: String,
        /// Hypothesis sequents (repeatable).
        #[arg(long = "hyp")]
        hyps: Vec<String>,
    },
    /// Translate a sequent into equations and back.
    Translate {
        /// A sequent, or a formula with --formula.
        input: String,
        /// Read the input as a formula and print its sequent translation.
        #[arg(long)]
        formula: bool,
    },
    /// Print the mirror image of a sequent or of a proof.
    Mirror {
        /// The sequent (omit when using --proof).
        sequent: Option<String>,
        /// A proof S-expression file to mirror instead.
        #[arg(long)]
        proof: Option<PathBuf>,
    },
    /// Check a finite algebra against a variety.
    Algebra {
        /// A JSON file, `-` for stdin, or `fixture:NAME`.
        source: String,
        /// Family: Msl, Ml, PMsl, PMl, FL, RL (inferred from the operations if omitted).
        #[arg(long)]
        family: Option<String>,
        /// Fill in missing operations before checking.
        #[arg(long, value_enum)]
        derive: Option<Derive>,
    },
    /// Build the ideal completion of a pointed sl-monoid.
    Complete {
        /// A JSON file, `-` for stdin, or `fixture:NAME`.
        source: String,
    },
    /// Compute the filters and relative congruences of a finite algebra.
    Filters {
        /// A JSON file, `-` for stdin, or `fixture:NAME`.
        source: String,
        /// Family (inferred from the operations if omitted).
        #[arg(long)]
        family: Option<String>,
    },
    /// Enumerate the algebras of a variety up to isomorphism.
    Enumerate {
        /// Family: Msl, Ml, PMsl, PMl, FL, RL.
        #[arg(long, default_value = "Msl")]
        family: String,
        /// Carrier size (defaults to --max-size).
        #[arg(long)]
        size: Option<usize>,
    },
    /// Check a Hilbert proof, or cross-check a Hilbert system against the sequent calculus.
    Hilbert {
        /// A proof file in the line format; omit to cross-check the system.
        proof: Option<PathBuf>,
        /// System: hfl, hfl-e or var. With --sigma, hfl is extended by the σ schemata.
        #[arg(long, default_value = "hfl")]
        system: String,
        /// Hypothesis formulas (repeatable).
        #[arg(long = "hyp")]
        hyps: Vec<String>,
    },
}

/// Operations to derive for an algebra that lacks them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Derive {
    /// Meet from the order.
    Meet,
    /// Both residuals.
    Residuals,
    /// Both pseudocomplements.
    Negations,
    /// Meet, residuals and negations.
    Fl,
}

/// Validated global settings.
#[derive(Clone, Copy, Debug)]
pub struct Config {
    /// Structural rules.
    pub sigma: Sigma,
    /// Language.
    pub lang: Language,
    /// Depth bound.
    pub bound: usize,
    /// Largest model size.
    pub max_size: usize,
    /// Output format.
    pub format: Format,
}

impl Config {
    /// The calculus selected by `--sigma` and `--lang`.
    pub fn calculus(&self) -> CalculusId {
        CalculusId::new(self.sigma, self.lang)
    }
}

impl TryFrom<&Common> for Config {
    type Error = CliError;

    fn try_from(c: &Common) -> Result<Config, CliError> {
        let sigma = Sigma::parse(&c.sigma).map_err(|e| CliError::Usage(format!("--sigma: {e}")))?;
        let lang = Language::parse(&c.lang).map_err(|e| CliError::Usage(format!("--lang: {e}")))?;
        if c.bound == 0 {
            return Err(CliError::Usage("--bound must be positive".into()));
        }
        if c.max_size == 0 || c.max_size > MAX_ENUMERATION_SIZE {
            return Err(CliError::Usage(format!("--max-size must be between 1 and {MAX_ENUMERATION_SIZE}")));
        }
        Ok(Config { sigma, lang, bound: c.bound, max_size: c.max_size, format: c.format })
    }
}

/// Failures that abort a command.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or arguments.
    #[error("usage: {0}")]
    Usage(String),
    /// Input that does not parse or validate.
    #[error("invalid input: {0}")]
    Data(String),
    /// A file that cannot be read.
    #[error("cannot read {path}: {source}")]
    NoInput {
        /// The path.
        path: String,
        /// The I/O error.
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::NoInput { .. } => EXIT_NO_INPUT,
        }
    }
}

fn run(cli: Cli) -> Result<output::Report, CliError> {
    let cfg = Config::try_from(&cli.common)?;
    match cli.command {
        Command::Prove { sequent, hyps } => commands::prove(&cfg, &sequent, &hyps),
        Command::Decide { sequent, hyps } => commands::decide(&cfg, &sequent, &hyps),
        Command::Translate { input, formula } => commands::translate(&cfg, &input, formula),
        Command::Mirror { sequent, proof } => commands::mirror(&cfg, sequent.as_deref(), proof.as_deref()),
        Command::Algebra { source, family, derive } => commands::algebra(&cfg, &source, family.as_deref(), derive),
        Command::Complete { source } => commands::complete(&source),
        Command::Filters { source, family } => commands::filters(&cfg, &source, family.as_deref()),
        Command::Enumerate { family, size } => commands::enumerate(&cfg, &family, size),
        Command::Hilbert { proof, system, hyps } => commands::hilbert(&cfg, proof.as_deref(), &system, &hyps),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.common.format;
    match run(cli) {
        Ok(report) => {
            report.emit(format);
            ExitCode::from(report.status.code())
        }
        Err(e) => {
            eprintln!("substrukt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
