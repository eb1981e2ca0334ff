//! Corpus ingestion, cleaning, sampling and labeled-dataset preparation.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Replacement token for words found in the abusive lexicon.
pub const DEFAULT_MASK: &str = "abusv123987";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment_class: Option<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            topic: None,
            sentiment_score: None,
            sentiment_class: None,
        }
    }

    pub fn with_topic(mut self, topic: impl Into<String>) -> Self {
        self.topic = Some(topic.into());
        self
    }

    pub fn tokens(&self) -> Vec<&str> {
        crate::features::tokenize(&self.text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    docs: Vec<Document>,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate document ids.
    pub fn new(name: impl Into<String>, docs: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(docs.len());
        for doc in &docs {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
        }
        Ok(Self {
            name: name.into(),
            docs,
        })
    }

    /// Builds a corpus from plain texts with ids `<name>:<index>`.
    pub fn from_texts<S: AsRef<str>>(name: &str, texts: &[S]) -> Self {
        let docs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document::new(format!("{name}:{i}"), t.as_ref()))
            .collect();
        Self {
            name: name.to_string(),
            docs,
        }
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn into_docs(self) -> Vec<Document> {
        self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.docs.iter().map(|d| d.text.as_str())
    }

    /// Keeps the documents matching `pred`, preserving order.
    pub fn filter(&self, name: impl Into<String>, pred: impl Fn(&Document) -> bool) -> Corpus {
        Corpus {
            name: name.into(),
            docs: self.docs.iter().filter(|d| pred(d)).cloned().collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IngestFormat {
    Csv,
    Jsonl,
    PlainLines,
}

impl IngestFormat {
    /// Guesses the format from a file extension; anything unknown is plain lines.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => IngestFormat::Csv,
            Some("jsonl") | Some("ndjson") => IngestFormat::Jsonl,
            _ => IngestFormat::PlainLines,
        }
    }
}

impl std::str::FromStr for IngestFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(IngestFormat::Csv),
            "jsonl" => Ok(IngestFormat::Jsonl),
            "plain-lines" | "plain" | "txt" => Ok(IngestFormat::PlainLines),
            other => Err(Error::Invalid(format!("unknown format `{other}`"))),
        }
    }
}

/// Field mapping for structured inputs. `topic_field` is optional and only
/// read from csv/jsonl records.
#[derive(Clone, Debug)]
pub struct IngestOptions {
    pub format: IngestFormat,
    pub text_field: String,
    pub topic_field: Option<String>,
}

impl IngestOptions {
    pub fn new(format: IngestFormat, text_field: impl Into<String>) -> Self {
        Self {
            format,
            text_field: text_field.into(),
            topic_field: None,
        }
    }
}

/// Reads one document per record, in file order, with ids `<name>:<index>`
/// where the name is the file stem.
pub fn ingest(path: &Path, format: IngestFormat, text_field: &str) -> Result<Corpus> {
    ingest_with(path, &IngestOptions::new(format, text_field))
}

pub fn ingest_with(path: &Path, opts: &IngestOptions) -> Result<Corpus> {
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_string();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    let mut records: Vec<(String, Option<String>)> = Vec::new();

    match opts.format {
        IngestFormat::PlainLines => {
            for line in BufReader::new(file).lines() {
                let line = line.map_err(io_err)?;
                if !line.trim().is_empty() {
                    records.push((line, None));
                }
            }
        }
        IngestFormat::Jsonl => {
            for (lineno, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(io_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                let value: serde_json::Value =
                    serde_json::from_str(&line).map_err(|e| Error::Parse {
                        path: path.to_path_buf(),
                        record: lineno,
                        message: e.to_string(),
                    })?;
                let field = |name: &str| value.get(name).map(json_to_string);
                let text = field(&opts.text_field).ok_or_else(|| Error::MissingField {
                    path: path.to_path_buf(),
                    field: opts.text_field.clone(),
                    record: records.len(),
                })?;
                let topic = opts.topic_field.as_deref().and_then(field);
                records.push((text, topic));
            }
        }
        IngestFormat::Csv => {
            let mut reader = csv::Reader::from_reader(file);
            let headers = reader
                .headers()
                .map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    record: 0,
                    message: e.to_string(),
                })?
                .clone();
            let column = |name: &str| headers.iter().position(|h| h == name);
            let text_col = column(&opts.text_field).ok_or_else(|| Error::MissingField {
                path: path.to_path_buf(),
                field: opts.text_field.clone(),
                record: 0,
            })?;
            let topic_col = opts.topic_field.as_deref().and_then(column);
            for (i, row) in reader.records().enumerate() {
                let row = row.map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    record: i,
                    message: e.to_string(),
                })?;
                let text = row.get(text_col).ok_or_else(|| Error::MissingField {
                    path: path.to_path_buf(),
                    field: opts.text_field.clone(),
                    record: i,
                })?;
                let topic = topic_col.and_then(|c| row.get(c)).map(str::to_string);
                records.push((text.to_string(), topic));
            }
        }
    }

    if records.is_empty() {
        return Err(Error::EmptyCorpus(path.display().to_string()));
    }
    let docs = records
        .into_iter()
        .enumerate()
        .map(|(i, (text, topic))| Document {
            topic: topic.filter(|t| !t.is_empty()),
            ..Document::new(format!("{name}:{i}"), text)
        })
        .collect();
    Corpus::new(name, docs)
}

fn json_to_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Reads documents previously written by [`write_documents`].
pub fn read_documents(path: &Path) -> Result<Corpus> {
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_string();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            record: i,
            message: e.to_string(),
        })?;
        docs.push(doc);
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus(path.display().to_string()));
    }
    Corpus::new(name, docs)
}

/// Writes one JSON document per line.
pub fn write_documents<W: Write>(docs: &[Document], out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    for doc in docs {
        serde_json::to_writer(&mut out, doc)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Loads a token list, one token per line. Tokens are normalized the same
/// way document text is, so lexicon entries match cleaned tokens.
pub fn load_token_list(path: &Path) -> Result<HashSet<String>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut tokens = HashSet::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let token = normalize_token(line.trim(), &['@', '#']);
        if !token.is_empty() {
            tokens.insert(token);
        }
    }
    Ok(tokens)
}

fn normalize_token(raw: &str, keep: &[char]) -> String {
    raw.chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphanumeric() || keep.contains(c))
        .collect()
}

fn is_url_token(token: &str) -> bool {
    let t = token.trim_start_matches(|c: char| !c.is_alphanumeric());
    t.starts_with("www.")
}

/// Text normalization applied to every ingested document.
#[derive(Clone, Debug)]
pub struct Cleaner {
    abusive: HashSet<String>,
    mask: String,
    keep: Vec<char>,
}

impl Default for Cleaner {
    fn default() -> Self {
        Self {
            abusive: HashSet::new(),
            mask: DEFAULT_MASK.to_string(),
            keep: vec!['@', '#'],
        }
    }
}

impl Cleaner {
    pub fn new(abusive: HashSet<String>, mask: impl Into<String>) -> Result<Self> {
        let mask = mask.into();
        if mask.is_empty() || mask.chars().any(char::is_whitespace) {
            return Err(Error::Invalid(format!(
                "mask `{mask}` must be a single non-empty token"
            )));
        }
        Ok(Self {
            abusive,
            mask,
            ..Self::default()
        })
    }

    /// Replaces the set of non-alphanumeric characters that survive stripping.
    pub fn with_kept_chars(mut self, keep: &[char]) -> Self {
        self.keep = keep.to_vec();
        self
    }

    pub fn mask(&self) -> &str {
        &self.mask
    }

    /// Returns `None` for texts carrying a URL or nothing left after cleaning.
    pub fn clean_text(&self, raw: &str) -> Option<String> {
        let lower = raw.to_lowercase();
        if lower.contains("http://")
            || lower.contains("https://")
            || lower.split_whitespace().any(is_url_token)
        {
            return None;
        }
        let mut out = String::with_capacity(lower.len());
        for word in lower.split_whitespace() {
            let token = normalize_token(word, &self.keep);
            if token.is_empty() {
                continue;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            if self.abusive.contains(&token) {
                out.push_str(&self.mask);
            } else {
                out.push_str(&token);
            }
        }
        (!out.is_empty()).then_some(out)
    }

    pub fn clean(&self, doc: &Document) -> Option<Document> {
        let text = self.clean_text(&doc.text)?;
        Some(Document {
            text,
            ..doc.clone()
        })
    }

    pub fn clean_corpus(&self, corpus: &Corpus) -> Corpus {
        Corpus {
            name: corpus.name.clone(),
            docs: corpus.docs.iter().filter_map(|d| self.clean(d)).collect(),
        }
    }
}

/// Draws `n` distinct documents. The output order is the draw order.
pub fn sample_without_replacement(corpus: &Corpus, n: usize, seed: u64) -> Result<Corpus> {
    if n == 0 || n > corpus.len() {
        return Err(Error::out_of_range(
            "sample size",
            format!("{n} not in 1..={}", corpus.len()),
        ));
    }
    let mut rng = seed::rng(seed);
    let picked = index::sample(&mut rng, corpus.len(), n);
    Ok(Corpus {
        name: corpus.name.clone(),
        docs: picked.iter().map(|i| corpus.docs[i].clone()).collect(),
    })
}

/// Removes every whole-token occurrence of `keyword`; documents left empty are dropped.
pub fn remove_keyword(corpus: &Corpus, keyword: &str) -> Corpus {
    Corpus {
        name: corpus.name.clone(),
        docs: corpus
            .docs
            .iter()
            .filter_map(|d| strip_keyword(d, keyword))
            .collect(),
    }
}

fn strip_keyword(doc: &Document, keyword: &str) -> Option<Document> {
    let text = doc
        .text
        .split_whitespace()
        .filter(|t| *t != keyword)
        .collect::<Vec<_>>()
        .join(" ");
    (!text.is_empty()).then(|| Document {
        text,
        ..doc.clone()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Topic,
    Sentiment,
}

impl LabelKind {
    pub fn label_of<'a>(&self, doc: &'a Document) -> Option<&'a str> {
        match self {
            LabelKind::Topic => doc.topic.as_deref(),
            LabelKind::Sentiment => doc.sentiment_class.as_deref(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    docs: Vec<Document>,
    kind: LabelKind,
}

impl LabeledDataset {
    pub fn new(docs: Vec<Document>, kind: LabelKind) -> Result<Self> {
        if let Some(doc) = docs.iter().find(|d| kind.label_of(d).is_none()) {
            return Err(Error::Invalid(format!(
                "document `{}` has no {kind:?} label",
                doc.id
            )));
        }
        Ok(Self { docs, kind })
    }

    /// Keeps only the documents of `corpus` that carry a label of `kind`.
    pub fn from_corpus(corpus: &Corpus, kind: LabelKind) -> Self {
        let docs = corpus
            .docs
            .iter()
            .filter(|d| kind.label_of(d).is_some())
            .cloned()
            .collect();
        Self { docs, kind }
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        self.kind
            .label_of(&self.docs[i])
            .expect("labels checked on construction")
    }

    pub fn labels(&self) -> Vec<&str> {
        (0..self.docs.len()).map(|i| self.label(i)).collect()
    }

    /// Per-label document counts, ordered by label.
    pub fn label_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for label in self.labels() {
            *counts.entry(label.to_string()).or_insert(0) += 1;
        }
        counts
    }

    pub fn to_corpus(&self, name: &str) -> Corpus {
        Corpus {
            name: name.to_string(),
            docs: self.docs.clone(),
        }
    }

    /// Removes `keyword` from documents labeled `label` only.
    pub fn remove_keyword_for(&self, label: &str, keyword: &str) -> LabeledDataset {
        let docs = self
            .docs
            .iter()
            .filter_map(|d| {
                if self.kind.label_of(d) == Some(label) {
                    strip_keyword(d, keyword)
                } else {
                    Some(d.clone())
                }
            })
            .collect();
        LabeledDataset {
            docs,
            kind: self.kind,
        }
    }
}

/// Shuffles by `seed`, then puts the first `floor(fraction * N)` documents in train.
pub fn train_test_split(
    ds: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::out_of_range(
            "train fraction",
            format!("{train_fraction} not in (0, 1)"),
        ));
    }
    let mut docs = ds.docs.clone();
    docs.shuffle(&mut seed::rng(seed));
    // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
    let n_train = (train_fraction * docs.len() as f64 + 1e-9).floor() as usize;
    let test = docs.split_off(n_train);
    Ok((
        LabeledDataset {
            docs,
            kind: ds.kind,
        },
        LabeledDataset {
            docs: test,
            kind: ds.kind,
        },
    ))
}

/// Downsamples every label to the minority count, then reshuffles.
pub fn balance_by_label(ds: &LabeledDataset, seed: u64) -> Result<LabeledDataset> {
    let mut groups: BTreeMap<&str, Vec<&Document>> = BTreeMap::new();
    for (i, doc) in ds.docs.iter().enumerate() {
        groups.entry(ds.label(i)).or_default().push(doc);
    }
    if groups.len() < 2 {
        return Err(Error::Invalid(format!(
            "balancing needs at least two labels, found {}",
            groups.len()
        )));
    }
    if let Some((label, _)) = groups.iter().find(|(_, g)| g.is_empty()) {
        return Err(Error::EmptyLabel(label.to_string()));
    }
    let minority = groups.values().map(Vec::len).min().unwrap_or(0);
    let mut rng = seed::rng(seed);
    let mut docs = Vec::with_capacity(minority * groups.len());
    for group in groups.values() {
        let picked = index::sample(&mut rng, group.len(), minority);
        docs.extend(picked.iter().map(|i| group[i].clone()));
    }
    docs.shuffle(&mut rng);
    Ok(LabeledDataset {
        docs,
        kind: ds.kind,
    })
}
