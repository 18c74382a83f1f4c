//! respell command-line interface.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "respell", version)]
#[command(about = "Post-editing transcript correction through did-you-mean suggestions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an n-gram index from a text corpus
    Train(TrainArgs),
    /// Correct a transcript with a suggestion provider
    Correct(CorrectArgs),
    /// Report error rates and improvement ratios
    Evaluate(EvaluateArgs),
    /// Record provider answers into a replay cassette
    Record(RecordArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Training corpus (UTF-8 plain text)
    #[arg(long)]
    corpus: PathBuf,
    /// Output index path
    #[arg(long)]
    index: PathBuf,
    /// Maximum n-gram order
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=8))]
    order: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ProviderKind {
    Ngram,
    Replay,
    Web,
}

#[derive(Args)]
struct ProviderArgs {
    /// Suggestion backend
    #[arg(long, value_enum)]
    provider: ProviderKind,
    /// Trained index path (provider "ngram")
    #[arg(long)]
    index: Option<PathBuf>,
    /// Cassette path (provider "replay")
    #[arg(long)]
    cassette: Option<PathBuf>,
    /// Per-word edit-distance bound for candidates
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    max_edit_distance: u64,
    /// Backoff discount per dropped order
    #[arg(long, default_value_t = 0.4)]
    alpha: f64,
    /// Phrase frequency at which a query is accepted verbatim
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    min_exact_count: u64,
    /// Required score advantage of a rewrite over the query
    #[arg(long, default_value_t = 1.5)]
    margin: f64,
    /// Compare suggestions to queries case-sensitively
    #[arg(long)]
    no_case_fold: bool,
    /// Endpoint URL template with one {} placeholder (provider "web";
    /// the RESPELL_WEB_ENDPOINT environment variable overrides this)
    #[arg(long)]
    endpoint: Option<String>,
    /// Marker phrase preceding the suggestion in result pages
    #[arg(long, default_value = respell::web::DEFAULT_MARKER)]
    marker: String,
    /// Minimum gap between web requests, in milliseconds
    #[arg(long, default_value_t = 1000)]
    delay_ms: u64,
    /// Web request timeout, in milliseconds
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    timeout_ms: u64,
    /// Opt in to live network access (provider "web" refuses without it)
    #[arg(long)]
    allow_network: bool,
}

#[derive(Args)]
struct CorrectArgs {
    /// Input transcript (UTF-8 plain text)
    #[arg(long)]
    input: PathBuf,
    /// Output path for the corrected transcript
    #[arg(long)]
    output: PathBuf,
    /// Audit trail path (JSON Lines; defaults to `<output>.audit.jsonl`)
    #[arg(long)]
    audit: Option<PathBuf>,
    /// Words per token window
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    window: u64,
    /// Worker threads
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Abort on the first provider failure (the default)
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    /// Keep going when the provider fails on a token
    #[arg(long)]
    lenient: bool,
    /// Also record every provider answer into this cassette
    #[arg(long)]
    record_cassette: Option<PathBuf>,
    #[command(flatten)]
    provider: ProviderArgs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Rounding {
    Paper,
    Full,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Multi-transcript manifest (JSON); paths resolve relative to it
    #[arg(long, conflicts_with_all = ["before", "after"])]
    manifest: Option<PathBuf>,
    /// Transcript before correction
    #[arg(long)]
    before: Option<PathBuf>,
    /// Transcript after correction
    #[arg(long)]
    after: Option<PathBuf>,
    /// Annotation file for the "before" transcript
    #[arg(long)]
    before_annotations: Option<PathBuf>,
    /// Annotation file for the "after" transcript
    #[arg(long)]
    after_annotations: Option<PathBuf>,
    /// Reference transcript for alignment-based counting
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Row label in the report
    #[arg(long, default_value = "transcript")]
    label: String,
    /// Rounding behavior for rates and ratios
    #[arg(long, value_enum, default_value_t = Rounding::Paper)]
    rounding: Rounding,
    /// Also write the report as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RecordArgs {
    /// Cassette output path
    #[arg(long)]
    cassette_out: PathBuf,
    /// Queries file, one query per line
    #[arg(long, conflicts_with = "input")]
    queries: Option<PathBuf>,
    /// Transcript whose token windows become the queries
    #[arg(long)]
    input: Option<PathBuf>,
    /// Words per token window (with --input)
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    window: u64,
    #[command(flatten)]
    provider: ProviderArgs,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => commands::train(args),
        Command::Correct(args) => commands::correct(args),
        Command::Evaluate(args) => commands::evaluate(args),
        Command::Record(args) => commands::record(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
