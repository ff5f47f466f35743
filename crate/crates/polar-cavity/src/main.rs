//! Command-line front end: five operations over a preset or a TOML
//! configuration, with table or JSON output.

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use polar_cavity::cli::{
    self, load_config, preset, render_outputs, OutputFormat, RunConfig, Verb,
};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "polar-cavity",
    version,
    about = "Dressed ladders, decay channels, Lamb shifts, and emission spectra \
             of a polar two-level emitter in a lossy cavity"
)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emission spectrum on a frequency grid
    Spectrum(RunArgs),
    /// Decay-channel table with rates and branching
    Rates(RunArgs),
    /// Channel rates against the coupling strength
    Sweep(RunArgs),
    /// Ladder-crossing couplings per manifold window
    Crossings(RunArgs),
    /// Perturbative results against exact diagonalization
    Validate(RunArgs),
}

impl Command {
    fn split(self) -> (Verb, RunArgs) {
        match self {
            Command::Spectrum(a) => (Verb::Spectrum, a),
            Command::Rates(a) => (Verb::Rates, a),
            Command::Sweep(a) => (Verb::Sweep, a),
            Command::Crossings(a) => (Verb::Crossings, a),
            Command::Validate(a) => (Verb::Validate, a),
        }
    }
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "config"])))]
struct RunArgs {
    /// Built-in configuration name
    #[arg(long)]
    preset: Option<String>,
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file stem; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    /// Fail (exit 3) when the validity monitor raises a warning
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Json,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let args = match CliArgs::try_parse() {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => cli::EXIT_OK,
                _ => cli::EXIT_CONFIG,
            };
            let _ = e.print();
            return code;
        }
    };
    let (verb, run_args) = args.command.split();
    match execute(verb, &run_args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(verb: Verb, args: &RunArgs) -> polar_cavity::Result<i32> {
    let config: RunConfig = match (&args.preset, &args.config) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => load_config(path)?,
        // clap's argument group guarantees exactly one source.
        _ => unreachable!(),
    };
    let result = cli::run(verb, &config)?;
    let format = match args.format {
        FormatArg::Table => OutputFormat::Table,
        FormatArg::Json => OutputFormat::Json,
    };
    for (path, content) in render_outputs(&result, args.out.as_deref(), format) {
        match path {
            Some(p) => {
                std::fs::write(&p, content)?;
                eprintln!("wrote {}", p.display());
            }
            None => print!("{content}"),
        }
    }
    if args.strict && !result.validity_warnings.is_empty() {
        for w in &result.validity_warnings {
            eprintln!("validity: {w}");
        }
        return Ok(cli::EXIT_VALIDITY);
    }
    Ok(cli::EXIT_OK)
}
