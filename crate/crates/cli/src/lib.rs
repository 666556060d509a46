//! `tempograd` command-line front end.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;
pub mod trace_file;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use commands::Format;
use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "tempograd", version, about = "Differentiable LTL rewards")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `train.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; overrides `output`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Hoa,
    Dot,
    Csv,
    Svg,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Hoa => Format::Hoa,
            FormatArg::Dot => Format::Dot,
            FormatArg::Csv => Format::Csv,
            FormatArg::Svg => Format::Svg,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate a formula to an LDBA and print its statistics.
    Translate {
        /// Formula text; defaults to the config's formula.
        formula: Option<String>,
    },
    /// Check lasso traces against a formula with both the semantics and the automaton.
    Check {
        #[arg(long)]
        formula: Option<String>,
        /// Trace CSV files.
        traces: Vec<PathBuf>,
        /// Also check this many random lassos.
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
    /// Sweep a constant action and tabulate satisfaction, returns and gradients.
    Sweep,
    /// Train a policy.
    Train,
    /// Evaluate a policy snapshot.
    Eval {
        #[arg(long)]
        snapshot: PathBuf,
    },
}

fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => RunConfig::load(p),
        None => RunConfig::from_json("{}"),
    }
}

fn formula_text(arg: Option<String>, cfg: &RunConfig) -> Result<String, CliError> {
    arg.or_else(|| cfg.formula.clone()).ok_or_else(|| {
        CliError::Usage("no formula: pass one or set 'formula' in the config".into())
    })
}

/// Execute a parsed command line, returning what to print on stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    let cfg = load(cli.config.as_deref())?;
    let out = cli.out.as_deref();
    let format = cli.format.map(Format::from);
    match cli.command {
        Command::Translate { formula } => {
            commands::translate(&formula_text(formula, &cfg)?, out, format)
        }
        Command::Check {
            formula,
            traces,
            random,
        } => commands::check(
            &formula_text(formula, &cfg)?,
            &traces,
            random,
            cli.seed.unwrap_or(cfg.train.seed),
        ),
        Command::Sweep => commands::sweep(&cfg, cli.seed.unwrap_or(cfg.train.seed), out, format),
        Command::Train => commands::train_cmd(&cfg, cli.seed, out),
        Command::Eval { snapshot } => commands::eval_cmd(&cfg, cli.seed, &snapshot),
    }
}
