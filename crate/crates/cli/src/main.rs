use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mermin::abelian::GroupElement;
use mermin::contextuality::{avn_equations, build_lhv, classify, is_avn, lhv_predicted_model, Classification};
use mermin::io::{self, ArgumentFile};
use mermin::protocol::run_protocol;
use mermin::quantum::simulate_model;
use mermin::scenario::{expected_model, max_abs_deviation, MerminArgument};
use mermin::{Error, DEFAULT_AMPLITUDE_CAP, DEFAULT_SEARCH_CAP};

/// Mermin-type non-locality arguments over finite abelian groups.
#[derive(Debug, Parser)]
#[command(name = "mermin", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate an argument and classify it.
    Check(Common),
    /// Dump the exact empirical model.
    Model(Common),
    /// Simulate the model on the state-vector simulator and compare.
    Quantum(Common),
    /// Build the hidden-variable model of a local argument, or refuse.
    Lhv(Common),
    /// Extract the All-vs-Nothing equations and decide them.
    Avn(Common),
    /// Run the secret sharing protocol from a protocol config.
    Protocol(Common),
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Input JSON file, or `-` for standard input.
    input: String,
    /// Output path (standard output when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Overrides the protocol config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Size cap: amplitudes for `quantum` and `protocol`, enumerated hidden
    /// states for `lhv`.
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

fn load_argument(path: &str) -> Result<MerminArgument, Error> {
    io::parse_argument(&io::read_input(path)?)
}

fn solution_text(b: &[GroupElement]) -> String {
    if b.len() == 1 {
        return format!("y = {}", b[0]);
    }
    let parts: Vec<String> = b.iter().enumerate().map(|(r, g)| format!("y{} = {g}", r + 1)).collect();
    parts.join(", ")
}

#[derive(Serialize)]
struct CheckDoc {
    group: String,
    parties: usize,
    contextual: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    solution: Option<Vec<GroupElement>>,
    avn: bool,
    argument: ArgumentFile,
}

fn check(args: &Common) -> Result<String, Error> {
    let argument = load_argument(&args.input)?;
    let group = argument.group();
    let avn = if is_avn(&argument) { "yes" } else { "no" };
    let classification = classify(&argument);
    if args.format == Some(Format::Json) {
        let solution = match &classification {
            Classification::Local(b) => Some(b.clone()),
            Classification::Contextual => None,
        };
        return Ok(io::to_json(&CheckDoc {
            group: group.to_string(),
            parties: argument.parties(),
            contextual: solution.is_none(),
            solution,
            avn: avn == "yes",
            argument: ArgumentFile::from_argument(&argument),
        }));
    }
    let verdict = match classification {
        Classification::Local(b) => format!("Local ({} in {group})", solution_text(&b)),
        Classification::Contextual => format!("Contextual (no solution in {group})"),
    };
    Ok(format!("{verdict}; AvN over ℤ: {avn}\n"))
}

fn model(args: &Common) -> Result<String, Error> {
    let model = expected_model(&load_argument(&args.input)?);
    match args.format {
        Some(Format::Csv) => io::model_to_csv(&model),
        _ => Ok(io::model_to_json(&model)),
    }
}

fn quantum(args: &Common) -> Result<String, Error> {
    let argument = load_argument(&args.input)?;
    let simulated = simulate_model(&argument, args.cap.unwrap_or(DEFAULT_AMPLITUDE_CAP))?;
    let deviation = max_abs_deviation(&expected_model(&argument), &simulated);
    match args.format {
        Some(Format::Csv) => {
            eprintln!("max abs deviation from the exact model: {deviation:e}");
            io::model_to_csv(&simulated)
        }
        _ => Ok(io::quantum_to_json(&simulated, deviation)),
    }
}

#[derive(Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
enum LhvDoc {
    Local {
        /// `b_0 = 0, b_1, ..., b_M`.
        translations: Vec<GroupElement>,
        hidden_states: usize,
        weight: String,
        matches_expected_model: bool,
    },
    Contextual {
        refused: String,
    },
}

fn lhv(args: &Common) -> Result<String, Error> {
    let argument = load_argument(&args.input)?;
    let doc = match classify(&argument) {
        Classification::Contextual => LhvDoc::Contextual {
            refused: format!("no solution in {}, so no hidden-variable model exists", argument.group()),
        },
        Classification::Local(b) => {
            let lhv = build_lhv(&argument, &b)?;
            let cap = args.cap.unwrap_or(DEFAULT_SEARCH_CAP);
            let size = lhv.hidden_state_count() as u64;
            if size > cap {
                return Err(mermin::contextuality::ContextualityError::SearchSpaceTooLarge { size, cap }.into());
            }
            let matches = lhv_predicted_model(&lhv, &argument.contexts()) == expected_model(&argument);
            let weight = lhv.weight();
            LhvDoc::Local {
                translations: lhv.translations(),
                hidden_states: lhv.hidden_state_count(),
                weight: format!("{}/{}", weight.numer(), weight.denom()),
                matches_expected_model: matches,
            }
        }
    };
    Ok(io::to_json(&doc))
}

fn avn(args: &Common) -> Result<String, Error> {
    let argument = load_argument(&args.input)?;
    Ok(io::avn_to_json(&avn_equations(&argument), is_avn(&argument)))
}

fn protocol(args: &Common) -> Result<String, Error> {
    let text = io::read_input(&args.input)?;
    let base = match args.input.as_str() {
        "-" => PathBuf::from("."),
        p => Path::new(p).parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let (mut config, plaintext) = io::parse_protocol_config(&text, &base)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(cap) = args.cap {
        config.amplitude_cap = cap;
    }
    let report = run_protocol(&config, &plaintext)?;
    if args.format == Some(Format::Text) {
        return Ok(io::report_summary(&report));
    }
    if args.output.is_some() {
        print!("{}", io::report_summary(&report));
    }
    Ok(io::report_to_json(&report))
}

fn run(cli: Cli) -> Result<(), Error> {
    let (args, output) = match &cli.command {
        Command::Check(a) => (a, check(a)?),
        Command::Model(a) => (a, model(a)?),
        Command::Quantum(a) => (a, quantum(a)?),
        Command::Lhv(a) => (a, lhv(a)?),
        Command::Avn(a) => (a, avn(a)?),
        Command::Protocol(a) => (a, protocol(a)?),
    };
    io::write_output(args.output.as_deref(), &output)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
