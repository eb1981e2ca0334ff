use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use tdd_core::classify::{run_experiment, ExperimentConfig, LinearHyperparams, ModelKind};
use tdd_core::cluster::{
    fast_ica, hac, hac_with_distances, kmeans, overlap_report, write_assignments_csv,
    ClusterAssignment, DistanceMatrix, HacConfig, IcaConfig, KMeansConfig, Linkage,
    DEFAULT_HAC_CAP,
};
use tdd_core::corpus::{
    balance_by_label, ingest_with, load_token_list, Cleaner, IngestFormat, IngestOptions,
    LabelKind, LabeledDataset, DEFAULT_MASK,
};
use tdd_core::distributions::{
    self, write_reports_csv, KlTdcOptions, KlTdcReport, LogBase, NormalizationMode,
};
use tdd_core::features::{fit_tfidf, fit_vocabulary, transform_tfidf, FeatureMatrix};
use tdd_core::generate::{fit_markov, GenerationMetadata};
use tdd_core::seed::derive_seed;
use tdd_core::sentiment::{score_corpus, Lexicon, Thresholds, NEGATIVE, POSITIVE};

use crate::output::{load_corpus, resolve, sidecar, write_atomic, write_corpus, write_json};

fn required<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    value
        .as_deref()
        .ok_or_else(|| anyhow!("missing required --{flag}"))
}

/// Resolved arguments go next to the primary output.
fn emit_config<T: Serialize>(output: &Path, args: &T) -> Result<()> {
    write_json(&sidecar(output, "config.json"), args)
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct IngestArgs {
    #[arg(long, required_unless_present = "config")]
    pub input: Option<PathBuf>,
    /// Document JSONL destination.
    #[arg(long, required_unless_present = "config")]
    pub output: Option<PathBuf>,
    /// csv, jsonl or plain-lines; guessed from the extension when omitted.
    #[arg(long)]
    pub format: Option<IngestFormat>,
    #[arg(long, default_value = "text")]
    pub text_field: String,
    /// Field holding a topic label, for csv/jsonl inputs.
    #[arg(long)]
    pub topic_field: Option<String>,
    /// Newline-separated list of tokens to mask.
    #[arg(long)]
    pub abusive_words: Option<PathBuf>,
    #[arg(long, default_value = DEFAULT_MASK)]
    pub mask: String,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn ingest(args: IngestArgs) -> Result<()> {
    let config = args.config.clone();
    let mut args = resolve(args, config.as_deref())?;
    let input = required(&args.input, "input")?.to_path_buf();
    let output = required(&args.output, "output")?.to_path_buf();
    let format = *args.format.get_or_insert(IngestFormat::from_path(&input));

    let abusive = match &args.abusive_words {
        Some(p) => load_token_list(p)?,
        None => Default::default(),
    };
    let cleaner = Cleaner::new(abusive, args.mask.clone())?;
    let opts = IngestOptions {
        format,
        text_field: args.text_field.clone(),
        topic_field: args.topic_field.clone(),
    };
    let raw = ingest_with(&input, &opts)?;
    let cleaned = cleaner.clean_corpus(&raw);
    if cleaned.is_empty() {
        bail!(tdd_core::Error::EmptyCorpus(format!(
            "{}: nothing left after cleaning",
            input.display()
        )));
    }
    write_corpus(&output, &cleaned)?;
    emit_config(&output, &args)?;
    println!(
        "{}",
        serde_json::json!({ "read": raw.len(), "kept": cleaned.len(), "output": output })
    );
    Ok(())
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct SentimentArgs {
    #[arg(long, required_unless_present = "config")]
    pub input: Option<PathBuf>,
    /// Every document with its score and class.
    #[arg(long, required_unless_present = "config")]
    pub output: Option<PathBuf>,
    /// Lexicon TSV; the bundled lexicon is used when unset.
    #[arg(long, env = "TDD_LEXICON")]
    pub lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lower: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub upper: f64,
    /// Positive documents only.
    #[arg(long)]
    pub pos_output: Option<PathBuf>,
    /// Negative documents only.
    #[arg(long)]
    pub neg_output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn sentiment_label(args: SentimentArgs) -> Result<()> {
    let config = args.config.clone();
    let args = resolve(args, config.as_deref())?;
    let input = required(&args.input, "input")?;
    let output = required(&args.output, "output")?;
    let lexicon = match &args.lexicon {
        Some(p) => Lexicon::load(p)?,
        None => Lexicon::bundled(),
    };
    let thresholds = Thresholds::new(args.lower, args.upper)?;
    let scored = score_corpus(&load_corpus(input)?, &lexicon, thresholds);
    let subset = |class: &str| {
        scored.filter(format!("{}-{class}", scored.name), |d| {
            d.sentiment_class.as_deref() == Some(class)
        })
    };
    let (pos, neg) = (subset(POSITIVE), subset(NEGATIVE));
    write_corpus(output, &scored)?;
    if let Some(p) = &args.pos_output {
        write_corpus(p, &pos)?;
    }
    if let Some(p) = &args.neg_output {
        write_corpus(p, &neg)?;
    }
    emit_config(output, &args)?;
    println!(
        "{}",
        serde_json::json!({
            "documents": scored.len(),
            "pos": pos.len(),
            "neg": neg.len(),
            "neutral": scored.len() - pos.len() - neg.len(),
        })
    );
    Ok(())
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Topic,
    Sentiment,
}

impl From<Task> for LabelKind {
    fn from(t: Task) -> Self {
        match t {
            Task::Topic => LabelKind::Topic,
            Task::Sentiment => LabelKind::Sentiment,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Nb,
    Logreg,
    Svm,
    All,
}

impl ModelChoice {
    fn models(self) -> Vec<ModelKind> {
        match self {
            ModelChoice::Nb => vec![ModelKind::Nb],
            ModelChoice::Logreg => vec![ModelKind::Logreg],
            ModelChoice::Svm => vec![ModelKind::Svm],
            ModelChoice::All => ModelKind::ALL.to_vec(),
        }
    }
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct ClassifyArgs {
    #[arg(long, required_unless_present = "config")]
    pub input: Option<PathBuf>,
    /// Results JSON.
    #[arg(long, required_unless_present = "config")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "topic")]
    pub task: Task,
    #[arg(long, value_enum, default_value = "all")]
    pub model: ModelChoice,
    /// `keyword:LABEL` pairs; the keyword is removed from documents with that label.
    #[arg(long, num_args = 1..)]
    pub drop_keywords: Vec<String>,
    /// Downsample every label to the minority count before splitting.
    #[arg(long)]
    pub balance: bool,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 1)]
    pub min_count: usize,
    #[arg(long, default_value_t = 1.0)]
    pub nb_alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-class metrics as CSV.
    #[arg(long)]
    pub csv_output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn parse_drop(pair: &str) -> Result<(String, String)> {
    let (keyword, label) = pair
        .split_once(':')
        .ok_or_else(|| anyhow!("--drop-keywords expects keyword:LABEL, got `{pair}`"))?;
    if keyword.is_empty() || label.is_empty() {
        bail!("--drop-keywords expects keyword:LABEL, got `{pair}`");
    }
    Ok((label.to_string(), keyword.to_lowercase()))
}

pub fn classify(args: ClassifyArgs) -> Result<()> {
    let config = args.config.clone();
    let args = resolve(args, config.as_deref())?;
    let input = required(&args.input, "input")?;
    let output = required(&args.output, "output")?;
    let drop_keywords = args
        .drop_keywords
        .iter()
        .map(|s| parse_drop(s))
        .collect::<Result<Vec<_>>>()?;

    let mut ds = LabeledDataset::from_corpus(&load_corpus(input)?, args.task.into());
    if ds.is_empty() {
        bail!(tdd_core::Error::EmptyCorpus(format!(
            "{}: no labeled documents",
            input.display()
        )));
    }
    if args.balance {
        ds = balance_by_label(&ds, derive_seed(args.seed, "balance"))?;
    }
    let hyperparams = LinearHyperparams {
        learning_rate: args.learning_rate,
        l2: args.l2,
        epochs: args.epochs,
        batch_size: args.batch_size,
        seed: args.seed,
    };
    let mut results = Vec::new();
    for model in args.model.models() {
        let cfg = ExperimentConfig {
            model,
            drop_keywords: drop_keywords.clone(),
            train_fraction: args.train_fraction,
            min_count: args.min_count,
            nb_alpha: args.nb_alpha,
            hyperparams,
            seed: args.seed,
        };
        let result =
            run_experiment(&ds, &cfg).with_context(|| format!("model {}", model.name()))?;
        println!("{}\n{}", model.name(), result.report.to_text());
        results.push(result);
    }

    write_json(
        output,
        &serde_json::json!({
            "task": args.task,
            "documents": ds.len(),
            "label_counts": ds.label_counts(),
            "results": results,
        }),
    )?;
    if let Some(path) = &args.csv_output {
        let mut rows = String::from("model,class,precision,recall,f1,support\n");
        for r in &results {
            for c in &r.report.classes {
                rows += &format!(
                    "{},{},{:.2},{:.2},{:.2},{}\n",
                    r.model.name(),
                    c.class,
                    c.precision,
                    c.recall,
                    c.f1,
                    c.support
                );
            }
            rows += &format!(
                "{},accuracy,,,{:.2},{}\n",
                r.model.name(),
                r.report.accuracy,
                r.report.total
            );
        }
        write_atomic(path, rows.as_bytes())?;
    }
    emit_config(output, &args)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Kmeans,
    Hac,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LabelSource {
    Topic,
    Sentiment,
    None,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct ClusterArgs {
    #[arg(long, required_unless_present = "config")]
    pub input: Option<PathBuf>,
    /// `id,cluster` CSV.
    #[arg(long, required_unless_present = "config")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "kmeans")]
    pub method: Method,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value = "average")]
    pub linkage: Linkage,
    /// Project TF-IDF features onto this many independent components first.
    #[arg(long)]
    pub ica_components: Option<usize>,
    /// Labels the clusters are compared against.
    #[arg(long, value_enum, default_value = "topic")]
    pub labels: LabelSource,
    #[arg(long, default_value_t = 1)]
    pub min_count: usize,
    #[arg(long, default_value_t = 300)]
    pub max_iter: usize,
    #[arg(long, default_value_t = DEFAULT_HAC_CAP)]
    pub hac_cap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Summary JSON; defaults to `<output>.summary.json`.
    #[arg(long)]
    pub summary_output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn cluster(args: ClusterArgs) -> Result<()> {
    let config = args.config.clone();
    let mut args = resolve(args, config.as_deref())?;
    let input = required(&args.input, "input")?.to_path_buf();
    let output = required(&args.output, "output")?.to_path_buf();
    let summary_path = args
        .summary_output
        .get_or_insert_with(|| sidecar(&output, "summary.json"))
        .clone();

    let corpus = load_corpus(&input)?;
    let vocab = Arc::new(fit_vocabulary(&corpus, args.min_count)?);
    let counts = FeatureMatrix::counts(corpus.texts(), vocab);
    let tfidf = transform_tfidf(&counts, &fit_tfidf(&counts)?);

    let mut ica = None;
    let points = match args.ica_components {
        Some(c) => {
            let (model, sources) = fast_ica(
                &tfidf.to_dense(),
                &IcaConfig::new(c, derive_seed(args.seed, "ica")),
            )?;
            let ica_path = sidecar(&output, "ica.json");
            write_json(&ica_path, &model)?;
            ica = Some(serde_json::json!({
                "components": c,
                "iterations": model.iterations,
                "converged": model.converged,
                "matrices": ica_path,
            }));
            Some(sources)
        }
        None => None,
    };

    let mut inertia_trace = None;
    let assignment: ClusterAssignment = match args.method {
        Method::Kmeans => {
            let cfg = KMeansConfig {
                max_iter: args.max_iter,
                ..KMeansConfig::new(args.k, derive_seed(args.seed, "kmeans"))
            };
            let dense = points.unwrap_or_else(|| tfidf.to_dense());
            let r = kmeans(&dense, &cfg)?;
            inertia_trace = Some(r.inertia_trace);
            r.assignment
        }
        Method::Hac => {
            let cfg = HacConfig {
                cap: args.hac_cap,
                ..HacConfig::new(args.k, args.linkage)
            };
            match points {
                Some(p) => hac(&p, &cfg)?.assignment,
                None => {
                    if corpus.len() > cfg.cap {
                        bail!(tdd_core::Error::TooLarge {
                            n: corpus.len(),
                            cap: cfg.cap
                        });
                    }
                    hac_with_distances(DistanceMatrix::from_unit_sparse(&tfidf.rows), &cfg)?
                        .assignment
                }
            }
        }
    };

    let label_kind = match args.labels {
        LabelSource::Topic => Some(LabelKind::Topic),
        LabelSource::Sentiment => Some(LabelKind::Sentiment),
        LabelSource::None => None,
    };
    let overlap = match label_kind {
        Some(kind) => {
            let labels: Option<Vec<&str>> =
                corpus.docs().iter().map(|d| kind.label_of(d)).collect();
            match labels {
                Some(l) => serde_json::to_value(overlap_report(&assignment, &l)?)?,
                None => serde_json::Value::String(format!("some documents have no {kind:?} label")),
            }
        }
        None => serde_json::Value::Null,
    };

    let ids: Vec<&str> = corpus.docs().iter().map(|d| d.id.as_str()).collect();
    let mut buf = Vec::new();
    write_assignments_csv(&ids, &assignment, &mut buf)?;
    write_atomic(&output, &buf)?;
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &assignment.labels {
        *sizes.entry(c).or_insert(0) += 1;
    }
    write_json(
        &summary_path,
        &serde_json::json!({
            "method": args.method,
            "k": assignment.k,
            "documents": corpus.len(),
            "cluster_sizes": sizes,
            "inertia": assignment.inertia,
            "inertia_trace": inertia_trace,
            "ica": ica,
            "overlap": overlap,
        }),
    )?;
    emit_config(&output, &args)
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct MarkovArgs {
    #[arg(long, required_unless_present = "config")]
    pub input: Option<PathBuf>,
    /// Generated text, one sequence per line.
    #[arg(long, required_unless_present = "config")]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub order: usize,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = tdd_core::generate::DEFAULT_MAX_TOKENS)]
    pub max_tokens: usize,
    /// Space-separated starting words; a document-initial context is sampled when empty.
    #[arg(long, default_value = "")]
    pub seed_words: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn markov_gen(args: MarkovArgs) -> Result<()> {
    let config = args.config.clone();
    let args = resolve(args, config.as_deref())?;
    let input = required(&args.input, "input")?;
    let output = required(&args.output, "output")?;
    let model = fit_markov(&load_corpus(input)?, args.order)?;
    let seed_tokens: Vec<&str> = args.seed_words.split_whitespace().collect();
    let rng_seed = derive_seed(args.seed, "markov");
    let lines = model.generate_many(&seed_tokens, args.count, args.max_tokens, rng_seed)?;
    let mut text = lines.join("\n");
    text.push('\n');
    write_atomic(output, text.as_bytes())?;
    write_json(
        &sidecar(output, "meta.json"),
        &GenerationMetadata {
            order: args.order,
            seed_tokens: seed_tokens.iter().map(|s| s.to_string()).collect(),
            count: args.count,
            max_tokens: args.max_tokens,
            rng_seed,
            vocab_size: model.vocab.len(),
            contexts: model.transitions.len(),
        },
    )?;
    emit_config(output, &args)
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct KlTdcArgs {
    /// Reference corpus (document JSONL, or plain text with one document per line).
    #[arg(long, required_unless_present = "config")]
    pub original: Option<PathBuf>,
    /// Candidate corpus, same formats as --original.
    #[arg(long, required_unless_present = "config")]
    pub candidate: Option<PathBuf>,
    /// Report JSON.
    #[arg(long, required_unless_present = "config")]
    pub output: Option<PathBuf>,
    /// Table row CSV; defaults to the output path with a `.csv` extension.
    #[arg(long)]
    pub csv_output: Option<PathBuf>,
    /// Row label; defaults to the candidate file stem.
    #[arg(long)]
    pub name: Option<String>,
    /// Most frequent original tokens compared.
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    /// Compare over the whole original vocabulary instead of the top k.
    #[arg(long)]
    pub full_vocab: bool,
    #[arg(long, default_value_t = 0.1)]
    pub baseline_frac: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "softmax")]
    pub mode: NormalizationMode,
    /// Additive smoothing for relative mode.
    #[arg(long, default_value_t = 1.0)]
    pub smoothing: f64,
    #[arg(long, default_value = "e")]
    pub log_base: LogBase,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn kltdc(args: KlTdcArgs) -> Result<()> {
    let config = args.config.clone();
    let mut args = resolve(args, config.as_deref())?;
    let original = required(&args.original, "original")?.to_path_buf();
    let candidate = required(&args.candidate, "candidate")?.to_path_buf();
    let output = required(&args.output, "output")?.to_path_buf();
    let csv_path = args
        .csv_output
        .get_or_insert_with(|| output.with_extension("csv"))
        .clone();
    let name = args
        .name
        .get_or_insert_with(|| {
            candidate.file_stem().map_or_else(
                || "candidate".to_string(),
                |s| s.to_string_lossy().into_owned(),
            )
        })
        .clone();

    let opts = KlTdcOptions {
        k: (!args.full_vocab).then_some(args.k),
        mode: args.mode,
        smoothing: args.smoothing,
        log_base: args.log_base,
    };
    let report = distributions::report(
        &name,
        &load_corpus(&original)?,
        &load_corpus(&candidate)?,
        args.baseline_frac,
        &opts,
        args.seed,
    )?;
    write_json(&output, &report)?;
    let mut buf = Vec::new();
    write_reports_csv(std::slice::from_ref(&report), &mut buf)?;
    write_atomic(&csv_path, &buf)?;
    emit_config(&output, &args)?;
    print!("{}", String::from_utf8_lossy(&buf));
    Ok(())
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct ReportArgs {
    /// KL-TDC report JSONs, one table row each, in the given order.
    #[arg(long, num_args = 1.., required_unless_present = "config")]
    pub inputs: Vec<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn report(args: ReportArgs) -> Result<()> {
    let config = args.config.clone();
    let args = resolve(args, config.as_deref())?;
    let output = required(&args.output, "output")?;
    if args.inputs.is_empty() {
        bail!("missing required --inputs");
    }
    let reports = args
        .inputs
        .iter()
        .map(|p| {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<KlTdcReport>(&text)
                .with_context(|| format!("parsing {}", p.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut buf = Vec::new();
    write_reports_csv(&reports, &mut buf)?;
    write_atomic(output, &buf)?;
    emit_config(output, &args)?;
    print!("{}", String::from_utf8_lossy(&buf));
    Ok(())
}
