//! Tokenization and bag-of-words feature extraction.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Splits cleaned text on whitespace.
pub fn tokenize(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    index_to_token: Vec<String>,
    #[serde(skip)]
    token_to_index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from distinct tokens in the given order.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Self {
            index_to_token: Vec::new(),
            token_to_index: HashMap::new(),
        };
        for t in tokens {
            let t = t.into();
            if !vocab.token_to_index.contains_key(&t) {
                vocab
                    .token_to_index
                    .insert(t.clone(), vocab.index_to_token.len());
                vocab.index_to_token.push(t);
            }
        }
        vocab
    }

    pub fn len(&self) -> usize {
        self.index_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_to_token.is_empty()
    }

    pub fn index(&self, token: &str) -> Option<usize> {
        self.token_to_index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.index_to_token.get(index).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.index_to_token
    }

    /// Content hash over the ordered token list; identifies the feature space.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        for t in &self.index_to_token {
            hasher.update(t.as_bytes());
            hasher.update(b"\n");
        }
        hex::encode(&hasher.finalize()[..8])
    }

    /// Rebuilds the reverse index after deserialization.
    pub fn reindex(mut self) -> Self {
        self.token_to_index = self
            .index_to_token
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        self
    }
}

/// Tokens with corpus frequency of at least `min_count`, in first-appearance order.
pub fn fit_vocabulary(corpus: &Corpus, min_count: usize) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus(corpus.name.clone()));
    }
    let mut order: Vec<&str> = Vec::new();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for text in corpus.texts() {
        for tok in tokenize(text) {
            let c = counts.entry(tok).or_insert_with(|| {
                order.push(tok);
                0
            });
            *c += 1;
        }
    }
    let vocab = Vocabulary::from_tokens(order.into_iter().filter(|t| counts[t] >= min_count));
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary(min_count));
    }
    Ok(vocab)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVector {
    /// Builds from unsorted (index, value) pairs, summing duplicates and dropping zeros.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut out = SparseVector::default();
        for (i, v) in pairs {
            if out.indices.last() == Some(&i) {
                *out.values.last_mut().unwrap() += v;
            } else {
                out.indices.push(i);
                out.values.push(v);
            }
        }
        let (indices, values) = out
            .indices
            .into_iter()
            .zip(out.values)
            .filter(|(_, v)| *v != 0.0)
            .unzip();
        SparseVector { indices, values }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }
}

pub fn count_vector(text: &str, vocab: &Vocabulary) -> SparseVector {
    let pairs = tokenize(text)
        .into_iter()
        .filter_map(|t| vocab.index(t).map(|i| (i, 1.0)))
        .collect();
    SparseVector::from_pairs(pairs)
}

pub fn binary_vector(text: &str, vocab: &Vocabulary) -> SparseVector {
    let mut v = count_vector(text, vocab);
    v.values.iter_mut().for_each(|x| *x = 1.0);
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Count,
    Binary,
    Tfidf,
}

impl FeatureKind {
    fn as_str(&self) -> &'static str {
        match self {
            FeatureKind::Count => "count",
            FeatureKind::Binary => "binary",
            FeatureKind::Tfidf => "tfidf",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub rows: Vec<SparseVector>,
    pub vocab: Arc<Vocabulary>,
    pub kind: FeatureKind,
}

impl FeatureMatrix {
    pub fn counts<'a>(texts: impl IntoIterator<Item = &'a str>, vocab: Arc<Vocabulary>) -> Self {
        let rows = texts.into_iter().map(|t| count_vector(t, &vocab)).collect();
        Self {
            rows,
            vocab,
            kind: FeatureKind::Count,
        }
    }

    pub fn binary<'a>(texts: impl IntoIterator<Item = &'a str>, vocab: Arc<Vocabulary>) -> Self {
        let rows = texts
            .into_iter()
            .map(|t| binary_vector(t, &vocab))
            .collect();
        Self {
            rows,
            vocab,
            kind: FeatureKind::Binary,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.vocab.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let dim = self.n_features();
        self.rows.iter().map(|r| r.to_dense(dim)).collect()
    }

    /// Serializes as `vocab_size=<n> kind=<kind> rows=<r>` followed by one
    /// line of space-separated `index:value` pairs per row.
    pub fn to_sparse_text(&self) -> String {
        let mut out = format!(
            "vocab_size={} kind={} rows={}\n",
            self.n_features(),
            self.kind.as_str(),
            self.rows.len()
        );
        for row in &self.rows {
            let mut first = true;
            for (i, v) in row.iter() {
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{i}:{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`FeatureMatrix::to_sparse_text`] output. Returns the rows,
    /// the declared vocabulary size and the kind.
    pub fn parse_sparse_text(text: &str) -> Result<(Vec<SparseVector>, usize, FeatureKind)> {
        let bad = |line: usize, msg: &str| Error::Parse {
            path: "<sparse>".into(),
            record: line,
            message: msg.to_string(),
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad(0, "missing header"))?;
        let mut vocab_size = None;
        let mut kind = None;
        let mut n_rows = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("vocab_size", v)) => vocab_size = v.parse().ok(),
                Some(("kind", "count")) => kind = Some(FeatureKind::Count),
                Some(("kind", "binary")) => kind = Some(FeatureKind::Binary),
                Some(("kind", "tfidf")) => kind = Some(FeatureKind::Tfidf),
                Some(("rows", v)) => n_rows = v.parse::<usize>().ok(),
                _ => return Err(bad(0, "malformed header")),
            }
        }
        let vocab_size = vocab_size.ok_or_else(|| bad(0, "missing vocab_size"))?;
        let kind = kind.ok_or_else(|| bad(0, "missing kind"))?;
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let mut row = SparseVector::default();
            for pair in line.split_whitespace() {
                let (i, v) = pair
                    .split_once(':')
                    .ok_or_else(|| bad(n + 1, "expected index:value"))?;
                let i: usize = i.parse().map_err(|_| bad(n + 1, "bad index"))?;
                let v: f64 = v.parse().map_err(|_| bad(n + 1, "bad value"))?;
                if i >= vocab_size || row.indices.last().is_some_and(|&last| last >= i) {
                    return Err(bad(
                        n + 1,
                        "indices must increase and stay below vocab_size",
                    ));
                }
                row.indices.push(i);
                row.values.push(v);
            }
            rows.push(row);
        }
        if n_rows.is_some_and(|r| r != rows.len()) {
            return Err(bad(0, "row count does not match header"));
        }
        Ok((rows, vocab_size, kind))
    }
}

/// Smoothed inverse document frequencies, one per vocabulary index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdfWeights(pub Vec<f64>);

/// `idf(t) = ln((1 + N) / (1 + df(t))) + 1`.
pub fn fit_tfidf(counts: &FeatureMatrix) -> Result<IdfWeights> {
    if counts.rows.is_empty() {
        return Err(Error::Invalid("cannot fit idf on an empty matrix".into()));
    }
    let n = counts.rows.len() as f64;
    let mut df = vec![0usize; counts.n_features()];
    for row in &counts.rows {
        for &i in &row.indices {
            df[i] += 1;
        }
    }
    Ok(IdfWeights(
        df.into_iter()
            .map(|d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0)
            .collect(),
    ))
}

/// Scales counts by idf and L2-normalizes every non-empty row.
pub fn transform_tfidf(counts: &FeatureMatrix, idf: &IdfWeights) -> FeatureMatrix {
    let rows = counts
        .rows
        .iter()
        .map(|row| {
            let mut values: Vec<f64> = row.iter().map(|(i, c)| c * idf.0[i]).collect();
            let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                values.iter_mut().for_each(|v| *v /= norm);
            }
            SparseVector {
                indices: row.indices.clone(),
                values,
            }
        })
        .collect();
    FeatureMatrix {
        rows,
        vocab: counts.vocab.clone(),
        kind: FeatureKind::Tfidf,
    }
}
