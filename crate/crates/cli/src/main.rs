//! `tdd`: ingest, label, classify, cluster, generate and score text corpora.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{
    ClassifyArgs, ClusterArgs, IngestArgs, KlTdcArgs, MarkovArgs, ReportArgs, SentimentArgs,
};

#[derive(Parser)]
#[command(name = "tdd", version, about = "Textual data distribution tooling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read csv/jsonl/plain text, clean it and write document JSONL.
    Ingest(IngestArgs),
    /// Score documents with the lexicon and assign pos/neg classes.
    SentimentLabel(SentimentArgs),
    /// Train and evaluate topic or sentiment classifiers.
    Classify(ClassifyArgs),
    /// K-Means or agglomerative clustering over TF-IDF features.
    Cluster(ClusterArgs),
    /// Sample text from a Markov chain fit on a corpus.
    MarkovGen(MarkovArgs),
    /// Score a candidate corpus against an original with KL-TDC.
    Kltdc(KlTdcArgs),
    /// Merge KL-TDC report JSONs into one table.
    Report(ReportArgs),
}

fn error_kind(err: &anyhow::Error) -> &'static str {
    if let Some(e) = err.downcast_ref::<tdd_core::Error>() {
        return e.kind();
    }
    if err.downcast_ref::<serde_json::Error>().is_some() {
        return "parse";
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return "io";
    }
    "invalid"
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::SentimentLabel(a) => commands::sentiment_label(a),
        Command::Classify(a) => commands::classify(a),
        Command::Cluster(a) => commands::cluster(a),
        Command::MarkovGen(a) => commands::markov_gen(a),
        Command::Kltdc(a) => commands::kltdc(a),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let body = serde_json::json!({
                "error": {
                    "kind": error_kind(&err),
                    "message": format!("{err:#}"),
                }
            });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
