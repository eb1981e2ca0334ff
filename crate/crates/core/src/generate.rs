//! Markov-chain text generation and ingestion of externally generated text.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{ingest, Cleaner, Corpus, IngestFormat};
use crate::error::{Error, Result};
use crate::features::tokenize;
use crate::seed;

/// Default cap on generated sequence length, in tokens.
pub const DEFAULT_MAX_TOKENS: usize = 40;

/// Successor distributions keyed by the space-joined context of `order` tokens.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovModel {
    pub order: usize,
    pub transitions: BTreeMap<String, Vec<(String, f64)>>,
    pub start_contexts: Vec<(String, f64)>,
    pub vocab: BTreeSet<String>,
}

fn to_distribution(counts: BTreeMap<String, u64>) -> Vec<(String, f64)> {
    let total = counts.values().sum::<u64>() as f64;
    counts
        .into_iter()
        .map(|(t, c)| (t, c as f64 / total))
        .collect()
}

/// Empirical successor frequencies within each document; no transitions
/// cross document boundaries.
pub fn fit_markov(corpus: &Corpus, order: usize) -> Result<MarkovModel> {
    if order == 0 {
        return Err(Error::out_of_range("order", "must be at least 1"));
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus(corpus.name.clone()));
    }
    let mut counts: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    let mut starts: BTreeMap<String, u64> = BTreeMap::new();
    let mut vocab = BTreeSet::new();
    for text in corpus.texts() {
        let tokens = tokenize(text);
        vocab.extend(tokens.iter().map(|t| t.to_string()));
        if tokens.len() <= order {
            continue;
        }
        *starts.entry(tokens[..order].join(" ")).or_insert(0) += 1;
        for window in tokens.windows(order + 1) {
            *counts
                .entry(window[..order].join(" "))
                .or_default()
                .entry(window[order].to_string())
                .or_insert(0) += 1;
        }
    }
    if counts.is_empty() {
        return Err(Error::CorpusTooShort(order + 1));
    }
    Ok(MarkovModel {
        order,
        transitions: counts
            .into_iter()
            .map(|(k, v)| (k, to_distribution(v)))
            .collect(),
        start_contexts: to_distribution(starts),
        vocab,
    })
}

fn sample<'a, R: Rng>(dist: &'a [(String, f64)], rng: &mut R) -> &'a str {
    let mut u = rng.random::<f64>();
    for (token, p) in dist {
        if u < *p {
            return token;
        }
        u -= p;
    }
    &dist[dist.len() - 1].0
}

impl MarkovModel {
    pub fn successors(&self, context: &[&str]) -> Option<&[(String, f64)]> {
        self.transitions.get(&context.join(" ")).map(Vec::as_slice)
    }

    /// Samples up to `max_tokens` tokens (seed included). An empty seed
    /// starts from a sampled document-initial context. Generation stops early
    /// at a context with no successors.
    pub fn generate(
        &self,
        seed_tokens: &[&str],
        max_tokens: usize,
        rng_seed: u64,
    ) -> Result<Vec<String>> {
        let mut rng = seed::rng(rng_seed);
        let mut out: Vec<String> = if seed_tokens.is_empty() {
            sample(&self.start_contexts, &mut rng)
                .split(' ')
                .map(str::to_string)
                .collect()
        } else {
            if let Some(bad) = seed_tokens.iter().find(|t| !self.vocab.contains(**t)) {
                return Err(Error::UnknownSeed {
                    seed: bad.to_string(),
                    vocab: self.vocab.len(),
                });
            }
            if seed_tokens.len() < self.order {
                let joined = seed_tokens.join(" ");
                return Err(Error::UnknownSeed {
                    seed: joined,
                    vocab: self.vocab.len(),
                });
            }
            seed_tokens.iter().map(|t| t.to_string()).collect()
        };
        out.truncate(max_tokens);
        while out.len() < max_tokens {
            let context: Vec<&str> = out[out.len() - self.order..]
                .iter()
                .map(String::as_str)
                .collect();
            let Some(next) = self.successors(&context) else {
                break;
            };
            let token = sample(next, &mut rng).to_string();
            out.push(token);
        }
        Ok(out)
    }

    /// `count` sequences, the i-th drawn with a seed derived from `rng_seed` and i.
    pub fn generate_many(
        &self,
        seed_tokens: &[&str],
        count: usize,
        max_tokens: usize,
        rng_seed: u64,
    ) -> Result<Vec<String>> {
        (0..count)
            .map(|i| {
                let s = seed::derive_seed(rng_seed, &format!("markov:{i}"));
                self.generate(seed_tokens, max_tokens, s)
                    .map(|t| t.join(" "))
            })
            .collect()
    }
}

/// Run parameters written next to generated text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationMetadata {
    pub order: usize,
    pub seed_tokens: Vec<String>,
    pub count: usize,
    pub max_tokens: usize,
    pub rng_seed: u64,
    pub vocab_size: usize,
    pub contexts: usize,
}

/// Reads externally generated text and applies the standard cleaning.
pub fn ingest_generated(
    path: &Path,
    format: IngestFormat,
    text_field: &str,
    cleaner: &Cleaner,
) -> Result<Corpus> {
    let raw = ingest(path, format, text_field)?;
    let cleaned = cleaner.clean_corpus(&raw);
    if cleaned.is_empty() {
        return Err(Error::EmptyCorpus(format!(
            "{}: nothing left after cleaning",
            path.display()
        )));
    }
    Ok(cleaned)
}
