use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wellcheck::{run, Command, FamilyOverride, Format, RunConfig};

/// Well groups and shrinking-wellness checks for PL fields on graphs.
///
/// Exit codes: 0 ok, 1 violations found with --fail-on-violation,
/// 2 invalid input, 3 verification or internal failure.
#[derive(Parser, Debug)]
#[command(name = "wellcheck", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Full analysis report
    Analyze(Common),
    /// Shrinking-wellness check over pairs of radii
    SwlCheck(Common),
    /// Run the built-in interval counterexample against its ground truth
    Counterexample(Common),
    /// Component-count and well-rank step functions
    Diagram(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Instance JSON file
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Replace the instance's perturbation family
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Comma-separated radii to evaluate instead of the instance's own
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long)]
    fail_on_violation: bool,
    /// Compare verdicts and ranks against brute-force oracles
    #[arg(long)]
    oracle_crosscheck: bool,
    #[arg(long, default_value_t = 0.05)]
    lattice_resolution: f64,
    /// Check neighbouring radii only
    #[arg(long)]
    consecutive: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyArg {
    Full,
    Shift,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { wellcheck::EXIT_INPUT } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let (command, args) = match cli.command {
        Sub::Analyze(a) => (Command::Analyze, a),
        Sub::SwlCheck(a) => (Command::SwlCheck, a),
        Sub::Counterexample(a) => (Command::Counterexample, a),
        Sub::Diagram(a) => (Command::Diagram, a),
    };
    let config = RunConfig {
        command,
        input: args.input,
        output: args.output,
        format: match args.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        },
        family: args.family.map(|f| match f {
            FamilyArg::Full => FamilyOverride::Full,
            FamilyArg::Shift => FamilyOverride::Shift,
        }),
        radii: args.radii,
        fail_on_violation: args.fail_on_violation,
        oracle_crosscheck: args.oracle_crosscheck,
        lattice_resolution: args.lattice_resolution,
        consecutive: args.consecutive,
    };
    std::process::exit(run(&config));
}
