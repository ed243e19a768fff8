mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "weilspace", version, about = "Heights, places and the L1 space of the Weil height")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 128, value_parser = clap::value_parser!(u32).range(53..=4096))]
    precision: u32,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Height of an element by the place sum and by its minimal polynomial.
    Height(HeightArgs),
    /// Places of a field over chosen rational places.
    Places(PlacesArgs),
    /// The step function f_a of an element at a tower level.
    Fa(FaArgs),
    /// Measured partition of one fiber, with the map to the level below.
    Partition(PartitionArgs),
    /// Automorphisms acting on one fiber.
    Galois(GaloisArgs),
    /// Run the invariant checks over a corpus.
    Check(CheckArgs),
    /// Approximate a step function by rational combinations of f_a.
    Approx(ApproxArgs),
}

#[derive(Args, Debug)]
struct HeightArgs {
    #[arg(long)]
    field: PathBuf,
    /// Element expression in the generator `t`, e.g. "(1+t)/2".
    #[arg(long)]
    elem: String,
}

#[derive(Args, Debug)]
struct PlacesArgs {
    #[arg(long)]
    field: PathBuf,
    /// Rational places to list ("inf" or a prime); repeatable.
    #[arg(long = "place", default_values_t = vec!["inf".to_string()])]
    places: Vec<String>,
    /// Also report the local values of this element.
    #[arg(long)]
    elem: Option<String>,
}

#[derive(Args, Debug)]
struct FaArgs {
    /// Tower file; without it, the field is placed over Q.
    #[arg(long, conflicts_with = "field")]
    tower: Option<PathBuf>,
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    elem: String,
}

#[derive(Args, Debug)]
struct PartitionArgs {
    #[arg(long)]
    tower: PathBuf,
    #[arg(long)]
    level: usize,
    #[arg(long)]
    place: String,
}

#[derive(Args, Debug)]
struct GaloisArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    place: String,
    /// Element whose local values are used as an invariance test function.
    #[arg(long)]
    elem: Option<String>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Comma-separated check names; all checks by default.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
}

#[derive(Args, Debug)]
struct ApproxArgs {
    /// Function table file.
    #[arg(long)]
    target: PathBuf,
    /// Tower file; the rational tower is used when omitted.
    #[arg(long)]
    tower: Option<PathBuf>,
    /// Comma-separated basis element expressions.
    #[arg(long, value_delimiter = ',', required = true)]
    basis: Vec<String>,
    /// Largest denominator of the rounded coefficients.
    #[arg(long = "den", default_value_t = 100)]
    denominator_bound: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let prec = cli.precision;
    let result = match &cli.command {
        Command::Height(a) => commands::height(&a.field, &a.elem, prec),
        Command::Places(a) => commands::places(&a.field, &a.places, a.elem.as_deref(), prec),
        Command::Fa(a) => commands::fa(a.tower.as_deref(), a.field.as_deref(), a.level, &a.elem, prec),
        Command::Partition(a) => commands::partition(&a.tower, a.level, &a.place, prec),
        Command::Galois(a) => commands::galois(&a.field, &a.place, a.elem.as_deref(), prec),
        Command::Check(a) => commands::check(&a.corpus, &a.only, prec),
        Command::Approx(a) => commands::approx(&a.target, a.tower.as_deref(), &a.basis, a.denominator_bound, prec),
    };
    let (report, code) = match result {
        Ok((v, ok)) => (v, if ok { 0 } else { 1 }),
        Err(e) => (serde_json::json!({ "error": e.code(), "message": e.to_string() }), 1),
    };
    let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    match &cli.output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("cannot write {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}
