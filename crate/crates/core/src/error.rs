use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path} at record {record}: {message}")]
    Parse {
        path: PathBuf,
        record: usize,
        message: String,
    },
    #[error("missing field `{field}` in {path} at record {record}")]
    MissingField {
        path: PathBuf,
        field: String,
        record: usize,
    },
    #[error("empty corpus: {0}")]
    EmptyCorpus(String),
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("label `{0}` has no members")]
    EmptyLabel(String),
    #[error("empty vocabulary: no token reaches min_count {0}")]
    EmptyVocabulary(usize),
    #[error("zero probability at index {0}; use softmax mode or a positive smoothing constant")]
    ZeroProbability(usize),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("degenerate baseline: a sample of {sample_docs} documents contains none of the top-{k} tokens")]
    DegenerateBaseline { sample_docs: usize, k: usize },
    #[error("training set contains a single class")]
    SingleClass,
    #[error("training diverged (non-finite loss at epoch {epoch}); lower the learning rate {learning_rate}")]
    Diverged { epoch: usize, learning_rate: f64 },
    #[error("vocabulary mismatch: model expects {expected} features ({expected_hash}), got {found} ({found_hash})")]
    VocabularyMismatch {
        expected: usize,
        found: usize,
        expected_hash: String,
        found_hash: String,
    },
    #[error(
        "{n} documents exceed the agglomerative clustering cap of {cap}; sample the corpus first"
    )]
    TooLarge { n: usize, cap: usize },
    #[error("cannot map {clusters} clusters onto {labels} labels")]
    ClusterLabelMismatch { clusters: usize, labels: usize },
    #[error("every document is shorter than order + 1 = {0} tokens")]
    CorpusTooShort(usize),
    #[error(
        "seed `{seed}` is not a known context; seed words needed to be any of the {vocab} tokens"
    )]
    UnknownSeed { seed: String, vocab: usize },
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
}

impl Error {
    /// Stable machine-readable kind, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::MissingField { .. } => "missing_field",
            Error::EmptyCorpus(_) => "empty_corpus",
            Error::DuplicateId(_) => "duplicate_id",
            Error::OutOfRange { .. } => "out_of_range",
            Error::Invalid(_) => "invalid",
            Error::EmptyLabel(_) => "empty_label",
            Error::EmptyVocabulary(_) => "empty_vocabulary",
            Error::ZeroProbability(_) => "zero_probability",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::DegenerateBaseline { .. } => "degenerate_baseline",
            Error::SingleClass => "single_class",
            Error::Diverged { .. } => "diverged",
            Error::VocabularyMismatch { .. } => "vocabulary_mismatch",
            Error::TooLarge { .. } => "too_large",
            Error::ClusterLabelMismatch { .. } => "cluster_label_mismatch",
            Error::CorpusTooShort(_) => "corpus_too_short",
            Error::UnknownSeed { .. } => "unknown_seed",
            Error::Lexicon { .. } => "lexicon",
        }
    }

    pub(crate) fn out_of_range(what: &'static str, detail: impl Into<String>) -> Self {
        Error::OutOfRange {
            what,
            detail: detail.into(),
        }
    }
}
