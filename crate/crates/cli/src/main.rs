mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use commands::Env;
use report::{Format, Record, Reporter};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Syntax {
        path: String,
        #[source]
        source: ptsdk::syntax::SyntaxError,
    },
    #[error(transparent)]
    Encode(#[from] ptsdk::encode::EncodeError),
    #[error(transparent)]
    Morphism(#[from] ptsdk::morphism::MorphismError),
    #[error("{0}")]
    Usage(String),
}

/// Encodings of pure type systems in the λΠ-calculus modulo rewriting.
#[derive(Debug, Parser)]
#[command(name = "ptsdk", version)]
struct Cli {
    /// Reduction fuel for every normalization and conversion check.
    #[arg(long, global = true, env = "PTSDK_FUEL", default_value_t = ptsdk::reduce::DEFAULT_FUEL)]
    fuel: u64,
    /// Show the rewrite labels behind each verdict.
    #[arg(long, global = true)]
    trace: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Type-check a theory file and its `assume`/`check`/`infer` items.
    CheckDk { file: PathBuf },
    /// Type-check a source file against a sort specification.
    CheckEpts { sorts: PathBuf, file: PathBuf },
    /// Generate the encoding theory, and translate a source file if given.
    Encode {
        sorts: PathBuf,
        file: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Recover source terms from the judgments of a file over the generated theory.
    Decode { sorts: PathBuf, file: PathBuf },
    /// Translate, decode and replay computation for every definition.
    Roundtrip { sorts: PathBuf, file: PathBuf },
    /// Classify constants and check rule shapes.
    Analyze {
        file: PathBuf,
        /// Also print the simply-typed erasure of the signature.
        #[arg(long)]
        erased: bool,
    },
    /// Theory morphisms: verify, apply, or build the finite-to-internalized map.
    #[command(subcommand)]
    Morphism(MorphismCommand),
}

#[derive(Debug, Subcommand)]
enum MorphismCommand {
    /// Check typing of every body and simulation of every rule.
    Verify { source: PathBuf, target: PathBuf, morphism: PathBuf },
    /// Map the judgments of a file over the source theory into the target.
    Apply { source: PathBuf, target: PathBuf, morphism: PathBuf, file: PathBuf },
    /// Build the map from a finite encoding into an internalized one.
    Phi {
        finite: PathBuf,
        internalized: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        no_verify: bool,
    },
}

fn run(cli: Cli, out: &mut Reporter) -> Result<(), CliError> {
    let env = Env { fuel: cli.fuel.max(1), trace: cli.trace };
    match &cli.command {
        Command::CheckDk { file } => commands::check_dk(&env, out, file),
        Command::CheckEpts { sorts, file } => commands::check_epts(&env, out, sorts, file),
        Command::Encode { sorts, file, output } => commands::encode(&env, out, sorts, file.as_deref(), output.as_deref()),
        Command::Decode { sorts, file } => commands::decode(&env, out, sorts, file),
        Command::Roundtrip { sorts, file } => commands::roundtrip(&env, out, sorts, file),
        Command::Analyze { file, erased } => commands::analyze(&env, out, file, *erased),
        Command::Morphism(MorphismCommand::Verify { source, target, morphism }) => {
            commands::morphism_verify(&env, out, source, target, morphism)
        }
        Command::Morphism(MorphismCommand::Apply { source, target, morphism, file }) => {
            commands::morphism_apply(&env, out, source, target, morphism, file)
        }
        Command::Morphism(MorphismCommand::Phi { finite, internalized, output, no_verify }) => {
            commands::morphism_phi(&env, out, finite, internalized, output.as_deref(), !no_verify)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let mut out = Reporter::new(cli.format);
    if let Err(e) = run(cli, &mut out) {
        out.to_stderr = true;
        out.emit(Record::error("fatal", e.to_string()));
    }
    ExitCode::from(out.exit_code() as u8)
}
