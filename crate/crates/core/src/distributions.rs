//! Unigram distributions of corpora and the KL-TDC alignment score.
//!
//! A score is computed in four steps:
//!
//! 1. each corpus becomes a [`UnigramTable`], sorted by descending frequency;
//! 2. [`align`] index-matches the candidate to the original: the original's
//!    `j` tokens come first, the candidate's `i` unseen tokens are appended,
//!    and each side carries zero counts for tokens it lacks;
//! 3. [`restrict_top_k`] keeps the original's `k` most frequent tokens;
//! 4. both count vectors are normalized ([`normalize`]) and compared with
//!    [`kl_divergence`], original first.
//!
//! A baseline score compares the original against a random sample of itself
//! and the report's B:G ratio is `baseline / generated`.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::{sample_without_replacement, Corpus};
use crate::error::{Error, Result};
use crate::features::tokenize;

/// Token frequencies of one corpus, sorted by descending count then token.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnigramTable {
    entries: Vec<(String, u64)>,
    total: u64,
}

impl UnigramTable {
    pub fn from_corpus(corpus: &Corpus) -> Result<Self> {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for text in corpus.texts() {
            for tok in tokenize(text) {
                *counts.entry(tok).or_insert(0) += 1;
            }
        }
        if counts.is_empty() {
            return Err(Error::EmptyCorpus(format!("{} has no tokens", corpus.name)));
        }
        Ok(Self::from_counts(counts))
    }

    /// Builds a table from (token, count) pairs; zero counts are dropped and
    /// repeated tokens are summed.
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut merged: HashMap<String, u64> = HashMap::new();
        for (t, c) in counts {
            if c > 0 {
                *merged.entry(t.into()).or_insert(0) += c;
            }
        }
        let mut entries: Vec<(String, u64)> = merged.into_iter().collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let total = entries.iter().map(|e| e.1).sum();
        Self { entries, total }
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Two index-matched count vectors over a shared vocabulary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedPair {
    vocab: Vec<String>,
    counts_original: Vec<u64>,
    counts_candidate: Vec<u64>,
    /// Number of leading vocabulary entries that come from the original (`j`).
    original_len: usize,
}

impl AlignedPair {
    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn counts_original(&self) -> &[u64] {
        &self.counts_original
    }

    pub fn counts_candidate(&self) -> &[u64] {
        &self.counts_candidate
    }

    /// `j`: tokens contributed by the original table.
    pub fn original_len(&self) -> usize {
        self.original_len
    }

    /// `i`: candidate-only tokens appended after the original's.
    pub fn candidate_only(&self) -> usize {
        self.vocab.len() - self.original_len
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }
}

pub fn align(original: &UnigramTable, candidate: &UnigramTable) -> AlignedPair {
    let cand: HashMap<&str, u64> = candidate
        .entries
        .iter()
        .map(|(t, c)| (t.as_str(), *c))
        .collect();
    let orig: HashMap<&str, u64> = original
        .entries
        .iter()
        .map(|(t, c)| (t.as_str(), *c))
        .collect();

    let mut vocab = Vec::with_capacity(original.len() + candidate.len());
    let mut counts_original = Vec::with_capacity(vocab.capacity());
    let mut counts_candidate = Vec::with_capacity(vocab.capacity());
    for (t, c) in &original.entries {
        vocab.push(t.clone());
        counts_original.push(*c);
        counts_candidate.push(cand.get(t.as_str()).copied().unwrap_or(0));
    }
    for (t, c) in &candidate.entries {
        if !orig.contains_key(t.as_str()) {
            vocab.push(t.clone());
            counts_original.push(0);
            counts_candidate.push(*c);
        }
    }
    AlignedPair {
        vocab,
        counts_original,
        counts_candidate,
        original_len: original.len(),
    }
}

/// Keeps the `k` most frequent original tokens (the aligned prefix).
pub fn restrict_top_k(pair: &AlignedPair, k: usize) -> Result<AlignedPair> {
    if k == 0 || k > pair.original_len {
        return Err(Error::out_of_range(
            "top-k",
            format!("{k} not in 1..={}", pair.original_len),
        ));
    }
    Ok(AlignedPair {
        vocab: pair.vocab[..k].to_vec(),
        counts_original: pair.counts_original[..k].to_vec(),
        counts_candidate: pair.counts_candidate[..k].to_vec(),
        original_len: k,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationMode {
    /// `e^α / Σ e^α` over raw counts.
    #[default]
    Softmax,
    /// `(α + s) / (Σα + s·L)`.
    Relative,
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormalizationMode::Softmax => "softmax",
            NormalizationMode::Relative => "relative",
        })
    }
}

impl std::str::FromStr for NormalizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "softmax" => Ok(Self::Softmax),
            "relative" => Ok(Self::Relative),
            other => Err(Error::Invalid(format!(
                "unknown normalization mode `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    E,
    #[serde(rename = "2")]
    Two,
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "ln" | "nat" => Ok(Self::E),
            "2" | "bits" => Ok(Self::Two),
            other => Err(Error::Invalid(format!("unknown log base `{other}`"))),
        }
    }
}

/// A discrete distribution with its log-probabilities kept alongside.
///
/// Softmax over large counts underflows `p` for most entries while the
/// log-probabilities stay finite, so divergences are computed from `log_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector {
    p: Vec<f64>,
    log_p: Vec<f64>,
}

impl ProbabilityVector {
    /// Wraps explicit probabilities; they must be non-negative and sum to 1.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Invalid("empty distribution".into()));
        }
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Invalid(
                "probabilities must be finite and >= 0".into(),
            ));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("probabilities sum to {sum}, not 1")));
        }
        let log_p = p.iter().map(|x| x.ln()).collect();
        Ok(Self { p, log_p })
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Max-subtracted softmax of arbitrary real scores.
pub fn softmax(scores: &[f64]) -> ProbabilityVector {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = scores.iter().map(|s| s - max).collect();
    let log_sum = shifted.iter().map(|s| s.exp()).sum::<f64>().ln();
    let log_p: Vec<f64> = shifted.iter().map(|s| s - log_sum).collect();
    let p = log_p.iter().map(|l| l.exp()).collect();
    ProbabilityVector { p, log_p }
}

pub fn normalize(
    counts: &[u64],
    mode: NormalizationMode,
    smoothing: f64,
) -> Result<ProbabilityVector> {
    if counts.is_empty() {
        return Err(Error::Invalid("cannot normalize an empty vector".into()));
    }
    match mode {
        NormalizationMode::Softmax => {
            let scores: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
            Ok(softmax(&scores))
        }
        NormalizationMode::Relative => {
            if !(smoothing >= 0.0 && smoothing.is_finite()) {
                return Err(Error::Invalid(format!(
                    "smoothing {smoothing} must be >= 0"
                )));
            }
            if smoothing == 0.0 {
                if let Some(i) = counts.iter().position(|&c| c == 0) {
                    return Err(Error::ZeroProbability(i));
                }
            }
            let denom = counts.iter().sum::<u64>() as f64 + smoothing * counts.len() as f64;
            let p: Vec<f64> = counts
                .iter()
                .map(|&c| (c as f64 + smoothing) / denom)
                .collect();
            let log_p = p.iter().map(|x| x.ln()).collect();
            Ok(ProbabilityVector { p, log_p })
        }
    }
}

/// `Σ p(x) log(p(x) / q(x))` in nats. Terms with `p(x) = 0` contribute nothing.
pub fn kl_divergence(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if let Some(i) = q.log_p.iter().position(|l| *l == f64::NEG_INFINITY) {
        return Err(Error::ZeroProbability(i));
    }
    let mut sum = 0.0;
    for i in 0..p.len() {
        if p.log_p[i] == f64::NEG_INFINITY {
            continue;
        }
        sum += p.p[i] * (p.log_p[i] - q.log_p[i]);
    }
    Ok(sum)
}

pub fn kl_divergence_base(
    p: &ProbabilityVector,
    q: &ProbabilityVector,
    base: LogBase,
) -> Result<f64> {
    let nats = kl_divergence(p, q)?;
    Ok(match base {
        LogBase::E => nats,
        LogBase::Two => nats / std::f64::consts::LN_2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KlTdcOptions {
    /// Original tokens kept; `None` keeps all of them.
    pub k: Option<usize>,
    pub mode: NormalizationMode,
    /// Additive smoothing for relative mode; ignored by softmax.
    pub smoothing: f64,
    pub log_base: LogBase,
}

impl Default for KlTdcOptions {
    fn default() -> Self {
        Self {
            k: Some(100),
            mode: NormalizationMode::Softmax,
            smoothing: 1.0,
            log_base: LogBase::E,
        }
    }
}

impl KlTdcOptions {
    pub fn full_vocab(mode: NormalizationMode, smoothing: f64) -> Self {
        Self {
            k: None,
            mode,
            smoothing,
            log_base: LogBase::E,
        }
    }
}

fn restricted_pair(
    original: &UnigramTable,
    candidate: &UnigramTable,
    k: Option<usize>,
) -> Result<AlignedPair> {
    let pair = align(original, candidate);
    restrict_top_k(&pair, k.unwrap_or(pair.original_len))
}

fn score_pair(pair: &AlignedPair, opts: &KlTdcOptions) -> Result<f64> {
    let p = normalize(&pair.counts_original, opts.mode, opts.smoothing)?;
    let q = normalize(&pair.counts_candidate, opts.mode, opts.smoothing)?;
    kl_divergence_base(&p, &q, opts.log_base)
}

pub fn kl_tdc_tables(
    original: &UnigramTable,
    candidate: &UnigramTable,
    opts: &KlTdcOptions,
) -> Result<f64> {
    score_pair(&restricted_pair(original, candidate, opts.k)?, opts)
}

/// KL-TDC of `candidate` against the reference `original`.
pub fn kl_tdc(original: &Corpus, candidate: &Corpus, opts: &KlTdcOptions) -> Result<f64> {
    kl_tdc_tables(
        &UnigramTable::from_corpus(original)?,
        &UnigramTable::from_corpus(candidate)?,
        opts,
    )
}

/// Documents drawn for a baseline sample: `round(fraction * N)`, halves up.
pub fn baseline_sample_size(fraction: f64, n_docs: usize) -> usize {
    (fraction * n_docs as f64 + 0.5).floor() as usize
}

/// KL-TDC of `original` against a random sample of its own documents.
pub fn baseline_kl_tdc(
    original: &Corpus,
    fraction: f64,
    opts: &KlTdcOptions,
    seed: u64,
) -> Result<f64> {
    baseline_with_table(
        original,
        &UnigramTable::from_corpus(original)?,
        fraction,
        opts,
        seed,
    )
}

fn baseline_with_table(
    original: &Corpus,
    table: &UnigramTable,
    fraction: f64,
    opts: &KlTdcOptions,
    seed: u64,
) -> Result<f64> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::out_of_range(
            "baseline fraction",
            format!("{fraction} not in (0, 1)"),
        ));
    }
    let n = baseline_sample_size(fraction, original.len());
    let sample = sample_without_replacement(original, n, seed)?;
    let pair = restricted_pair(table, &UnigramTable::from_corpus(&sample)?, opts.k)?;
    if pair.counts_candidate.iter().all(|&c| c == 0) {
        return Err(Error::DegenerateBaseline {
            sample_docs: n,
            k: pair.original_len,
        });
    }
    score_pair(&pair, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KlTdcReport {
    pub tdd: String,
    pub generated_score: f64,
    pub baseline_score: f64,
    /// `baseline / generated`; infinite (serialized as null) when the
    /// generated score is 0.
    #[serde(serialize_with = "ser_ratio", deserialize_with = "de_ratio")]
    pub bg_ratio: f64,
    pub bg_ratio_infinite: bool,
    pub k_top: usize,
    pub mode: NormalizationMode,
    pub smoothing: f64,
    pub log_base: LogBase,
    pub baseline_fraction: f64,
    pub baseline_docs: usize,
    pub seed: u64,
    /// Candidate-only tokens appended during alignment (`i`).
    pub candidate_only_tokens: usize,
}

fn ser_ratio<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn de_ratio<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

pub fn bg_ratio(baseline: f64, generated: f64) -> f64 {
    if generated > 0.0 {
        baseline / generated
    } else {
        f64::INFINITY
    }
}

/// Scores `candidate` and a self-sample baseline against `original`.
pub fn report(
    name: &str,
    original: &Corpus,
    candidate: &Corpus,
    fraction: f64,
    opts: &KlTdcOptions,
    seed: u64,
) -> Result<KlTdcReport> {
    let orig_table = UnigramTable::from_corpus(original)?;
    let cand_table = UnigramTable::from_corpus(candidate)?;
    let full = align(&orig_table, &cand_table);
    let k = opts.k.unwrap_or(full.original_len);
    let generated = score_pair(&restrict_top_k(&full, k)?, opts)?;
    let baseline = baseline_with_table(original, &orig_table, fraction, opts, seed)?;
    let ratio = bg_ratio(baseline, generated);
    Ok(KlTdcReport {
        tdd: name.to_string(),
        generated_score: generated,
        baseline_score: baseline,
        bg_ratio: ratio,
        bg_ratio_infinite: ratio.is_infinite(),
        k_top: k,
        mode: opts.mode,
        smoothing: opts.smoothing,
        log_base: opts.log_base,
        baseline_fraction: fraction,
        baseline_docs: baseline_sample_size(fraction, original.len()),
        seed,
        candidate_only_tokens: full.candidate_only(),
    })
}

pub const REPORT_CSV_HEADER: [&str; 4] = ["TDD", "Generated", "Baseline", "B:G"];

/// Writes reports as a `TDD,Generated,Baseline,B:G` table, three decimals.
pub fn write_reports_csv<W: Write>(reports: &[KlTdcReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::Invalid(format!("csv write failed: {e}"));
    w.write_record(REPORT_CSV_HEADER).map_err(to_err)?;
    for r in reports {
        let ratio = if r.bg_ratio.is_finite() {
            format!("{:.3}", r.bg_ratio)
        } else {
            "inf".to_string()
        };
        w.write_record([
            r.tdd.clone(),
            format!("{:.3}", r.generated_score),
            format!("{:.3}", r.baseline_score),
            ratio,
        ])
        .map_err(to_err)?;
    }
    w.flush()
        .map_err(|e| Error::Invalid(format!("csv write failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn table(pairs: &[(&str, u64)]) -> UnigramTable {
        UnigramTable::from_counts(pairs.iter().map(|(t, c)| (*t, *c)))
    }

    fn pv(p: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(p.to_vec()).unwrap()
    }

    #[test]
    fn unigram_table_examples() {
        let t = UnigramTable::from_corpus(&Corpus::from_texts("c", &["a b b"])).unwrap();
        assert_eq!(t.entries(), &[("b".to_string(), 2), ("a".to_string(), 1)]);
        assert_eq!(t.total(), 3);
        let t = UnigramTable::from_corpus(&Corpus::from_texts("c", &["b", "a"])).unwrap();
        assert_eq!(t.entries(), &[("a".to_string(), 1), ("b".to_string(), 1)]);
        let empty = Corpus::from_texts::<&str>("c", &[]);
        assert!(UnigramTable::from_corpus(&empty).is_err());
    }

    #[test]
    fn align_examples() {
        let pair = align(&table(&[("a", 3), ("b", 1)]), &table(&[("b", 2), ("c", 1)]));
        assert_eq!(pair.vocab(), &["a", "b", "c"]);
        assert_eq!(pair.counts_original(), &[3, 1, 0]);
        assert_eq!(pair.counts_candidate(), &[0, 2, 1]);
        assert_eq!((pair.original_len(), pair.candidate_only()), (2, 1));

        let orig = table(&[("a", 3), ("b", 1), ("c", 1)]);
        let pair = align(&orig, &table(&[("c", 4)]));
        assert_eq!(pair.candidate_only(), 0);
        assert_eq!(pair.vocab(), &["a", "b", "c"]);

        let pair = align(&orig, &orig);
        assert_eq!(pair.counts_original(), pair.counts_candidate());
    }

    #[test]
    fn restrict_examples() {
        let orig = table(&[("the", 50), ("a", 30), ("b", 10)]);
        let pair = align(&orig, &orig);
        assert_eq!(restrict_top_k(&pair, 3).unwrap(), pair);
        let top = restrict_top_k(&pair, 2).unwrap();
        assert_eq!(top.vocab(), &["the", "a"]);
        assert_eq!(top.counts_candidate(), &[50, 30]);
        assert!(restrict_top_k(&pair, 0).is_err());
        assert!(restrict_top_k(&pair, 4).is_err());
    }

    #[test]
    fn normalize_examples() {
        let p = normalize(&[0, 0], NormalizationMode::Softmax, 0.0).unwrap();
        assert_eq!(p.probs(), &[0.5, 0.5]);
        let p = normalize(&[1, 0], NormalizationMode::Softmax, 0.0).unwrap();
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(p.probs()[0], e / (e + 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(p.probs()[0], 0.73106, epsilon = 1e-5);
        assert_abs_diff_eq!(p.probs()[1], 0.26894, epsilon = 1e-5);
        let p = normalize(&[2, 1, 1], NormalizationMode::Relative, 0.0).unwrap();
        assert_eq!(p.probs(), &[0.5, 0.25, 0.25]);
        let p = normalize(&[1, 0], NormalizationMode::Relative, 1.0).unwrap();
        assert_eq!(p.probs(), &[2.0 / 3.0, 1.0 / 3.0]);
        assert!(matches!(
            normalize(&[1, 0], NormalizationMode::Relative, 0.0),
            Err(Error::ZeroProbability(1))
        ));
        assert!(normalize(&[], NormalizationMode::Softmax, 0.0).is_err());
    }

    #[test]
    fn softmax_of_large_counts_keeps_finite_logs() {
        let p = normalize(&[5000, 10, 0], NormalizationMode::Softmax, 0.0).unwrap();
        assert_eq!(p.probs()[0], 1.0);
        assert_eq!(p.probs()[2], 0.0);
        assert!(p.log_probs().iter().all(|l| l.is_finite()));
        let q = normalize(&[10, 5000, 0], NormalizationMode::Softmax, 0.0).unwrap();
        assert_abs_diff_eq!(kl_divergence(&p, &q).unwrap(), 4990.0, epsilon = 1e-9);
    }

    #[test]
    fn kl_examples() {
        let p = pv(&[0.5, 0.25, 0.25]);
        let q = pv(&[0.25, 0.25, 0.5]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let expected = 0.5 * (2.0f64).ln() + 0.25 * (0.5f64).ln();
        assert_abs_diff_eq!(kl_divergence(&p, &q).unwrap(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(
            kl_divergence(&p, &q).unwrap(),
            0.25 * 2f64.ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            kl_divergence_base(&p, &q, LogBase::Two).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        assert!(matches!(
            kl_divergence(&p, &pv(&[0.5, 0.5])),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            kl_divergence(&p, &pv(&[0.5, 0.5, 0.0])),
            Err(Error::ZeroProbability(2))
        ));
        // Zero mass in p is skipped.
        let sparse = pv(&[1.0, 0.0]);
        assert_abs_diff_eq!(
            kl_divergence(&sparse, &pv(&[0.5, 0.5])).unwrap(),
            2f64.ln(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn kl_is_asymmetric() {
        let p = pv(&[0.9, 0.1]);
        let q = pv(&[0.5, 0.5]);
        let pq = kl_divergence(&p, &q).unwrap();
        let qp = kl_divergence(&q, &p).unwrap();
        assert!((pq - qp).abs() > 1e-3, "{pq} vs {qp}");
    }

    #[test]
    fn kl_tdc_identity_and_limits() {
        let c = Corpus::from_texts("c", &["a b b c", "c c d"]);
        let opts = KlTdcOptions {
            k: Some(3),
            ..Default::default()
        };
        assert_eq!(kl_tdc(&c, &c, &opts).unwrap(), 0.0);
        assert!(kl_tdc(&c, &c, &KlTdcOptions::default()).is_err());
        // Sampling every document reproduces the corpus.
        let texts: Vec<String> = (0..20).map(|i| format!("w{} w{}", i % 3, i % 5)).collect();
        let c = Corpus::from_texts("c", &texts);
        let opts = KlTdcOptions::full_vocab(NormalizationMode::Relative, 1.0);
        assert_eq!(baseline_kl_tdc(&c, 0.999, &opts, 3).unwrap(), 0.0);
        assert_eq!(
            baseline_kl_tdc(&c, 0.3, &opts, 3).unwrap(),
            baseline_kl_tdc(&c, 0.3, &opts, 3).unwrap()
        );
        assert!(baseline_kl_tdc(&c, 1.0, &opts, 3).is_err());
    }

    #[test]
    fn degenerate_baseline() {
        let mut texts = vec!["top top top".to_string()];
        texts.extend((0..9).map(|i| format!("rare{i}")));
        let c = Corpus::from_texts("c", &texts);
        let opts = KlTdcOptions {
            k: Some(1),
            ..Default::default()
        };
        // Some seed draws a single document without the top token.
        let err = (0..20)
            .find_map(|s| baseline_kl_tdc(&c, 0.1, &opts, s).err())
            .expect("a sample missing the top token");
        assert!(matches!(err, Error::DegenerateBaseline { k: 1, .. }));
    }

    #[test]
    fn bg_ratio_examples() {
        assert_abs_diff_eq!(bg_ratio(0.089, 0.058), 1.5345, epsilon = 1e-4);
        assert_eq!(format!("{:.2}", bg_ratio(0.089, 0.058)), "1.53");
        assert_abs_diff_eq!(bg_ratio(0.047, 0.082), 0.573, epsilon = 1e-3);
        assert_eq!(bg_ratio(0.05, 0.05), 1.0);
        assert!(bg_ratio(0.05, 0.0).is_infinite());
    }

    #[test]
    fn report_serialization() {
        let c = Corpus::from_texts("c", &["a b", "a c", "a a b", "b c", "a"]);
        let opts = KlTdcOptions {
            k: Some(2),
            ..Default::default()
        };
        let r = report("Same", &c, &c, 0.5, &opts, 7).unwrap();
        assert_eq!(r.generated_score, 0.0);
        assert!(r.bg_ratio_infinite);
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["bg_ratio"].is_null());
        for field in [
            "generated_score",
            "baseline_score",
            "bg_ratio",
            "k_top",
            "mode",
            "seed",
        ] {
            assert!(json.get(field).is_some(), "{field}");
        }
        let back: KlTdcReport = serde_json::from_value(json).unwrap();
        assert!(back.bg_ratio.is_infinite());

        let mut buf = Vec::new();
        let finite = KlTdcReport {
            tdd: "Positive".into(),
            generated_score: 0.058,
            baseline_score: 0.089,
            bg_ratio: bg_ratio(0.089, 0.058),
            bg_ratio_infinite: false,
            ..r
        };
        write_reports_csv(&[finite], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "TDD,Generated,Baseline,B:G\nPositive,0.058,0.089,1.534\n"
        );
    }

    fn counts_strategy() -> impl Strategy<Value = Vec<(String, u64)>> {
        proptest::collection::vec(("[a-h]", 1u64..20), 1..10)
    }

    proptest! {
        #[test]
        fn align_laws(o in counts_strategy(), c in counts_strategy()) {
            let ot = UnigramTable::from_counts(o);
            let ct = UnigramTable::from_counts(c);
            let pair = align(&ot, &ct);
            let new_tokens = ct.entries().iter().filter(|(t, _)| !ot.entries().iter().any(|(u, _)| u == t)).count();
            prop_assert_eq!(pair.len(), ot.len() + new_tokens);
            prop_assert_eq!(pair.counts_original().iter().sum::<u64>(), ot.total());
            prop_assert_eq!(pair.counts_candidate().iter().sum::<u64>(), ct.total());
            let rebuilt = UnigramTable::from_counts(pair.vocab().iter().cloned().zip(pair.counts_candidate().iter().copied()));
            prop_assert_eq!(rebuilt, ct);
            let rebuilt = UnigramTable::from_counts(pair.vocab().iter().cloned().zip(pair.counts_original().iter().copied()));
            prop_assert_eq!(rebuilt, ot);
        }

        #[test]
        fn softmax_sums_to_one_and_is_shift_invariant(
            scores in proptest::collection::vec(-50.0f64..500.0, 1..60),
            shift in -1000.0f64..1000.0,
        ) {
            let p = softmax(&scores);
            prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let shifted: Vec<f64> = scores.iter().map(|s| s + shift).collect();
            let q = softmax(&shifted);
            for (a, b) in p.probs().iter().zip(q.probs()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn softmax_strictly_positive_for_moderate_counts(counts in proptest::collection::vec(0u64..300, 1..50)) {
            let p = normalize(&counts, NormalizationMode::Softmax, 0.0).unwrap();
            prop_assert!(p.probs().iter().all(|x| *x > 0.0));
            prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn relative_sums_to_one(counts in proptest::collection::vec(0u64..1000, 1..50), s in 0.01f64..5.0) {
            let p = normalize(&counts, NormalizationMode::Relative, s).unwrap();
            prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn kl_nonnegative(a in proptest::collection::vec(0.001f64..1.0, 2..30), b in proptest::collection::vec(0.001f64..1.0, 2..30)) {
            let n = a.len().min(b.len());
            let sa: f64 = a[..n].iter().sum();
            let sb: f64 = b[..n].iter().sum();
            let p = softmax(&a[..n].iter().map(|x| (x / sa).ln()).collect::<Vec<_>>());
            let q = softmax(&b[..n].iter().map(|x| (x / sb).ln()).collect::<Vec<_>>());
            prop_assert!(kl_divergence(&p, &q).unwrap() >= 0.0);
            prop_assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        }
    }
}
