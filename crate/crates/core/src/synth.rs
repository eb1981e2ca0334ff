//! Seeded synthetic corpora drawn from known categorical distributions.

use rand::Rng;

use crate::corpus::{Corpus, Document};
use crate::seed;

/// `w_r ∝ 1 / r^s` for ranks `r = 1..=n`, normalized.
pub fn zipf_weights(n: usize, s: f64) -> Vec<f64> {
    let raw: Vec<f64> = (1..=n).map(|r| 1.0 / (r as f64).powf(s)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Inverse-CDF sampler over a fixed token list.
#[derive(Clone, Debug)]
pub struct Categorical {
    tokens: Vec<String>,
    cumulative: Vec<f64>,
}

impl Categorical {
    pub fn new(tokens: Vec<String>, weights: &[f64]) -> Self {
        assert_eq!(tokens.len(), weights.len(), "one weight per token");
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Self { tokens, cumulative }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> &str {
        let u = rng.random::<f64>();
        let i = self.cumulative.partition_point(|c| *c <= u);
        &self.tokens[i.min(self.tokens.len() - 1)]
    }

    /// `n_docs` documents of `doc_len` tokens each.
    pub fn corpus(&self, name: &str, n_docs: usize, doc_len: usize, seed: u64) -> Corpus {
        let mut rng = seed::rng(seed);
        let texts: Vec<String> = (0..n_docs)
            .map(|_| {
                (0..doc_len)
                    .map(|_| self.sample(&mut rng))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        Corpus::from_texts(name, &texts)
    }
}

/// Tokens `w00`, `w01`, ... used by the synthetic generators.
pub fn token_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i:02}")).collect()
}

/// Two-topic corpus where each document carries its class keyword once plus
/// `noise_len` tokens drawn from a distribution shared by both classes.
pub fn keyword_topic_corpus(
    n_docs: usize,
    keywords: [(&str, &str); 2],
    noise_vocab: usize,
    noise_len: usize,
    seed: u64,
) -> Vec<Document> {
    let noise = Categorical::new(
        (0..noise_vocab).map(|i| format!("n{i:03}")).collect(),
        &zipf_weights(noise_vocab, 0.8),
    );
    let mut rng = seed::rng(seed);
    (0..n_docs)
        .map(|i| {
            let (label, keyword) = keywords[i % 2];
            let mut tokens: Vec<&str> = (0..noise_len).map(|_| noise.sample(&mut rng)).collect();
            let at = rng.random_range(0..=tokens.len());
            tokens.insert(at, keyword);
            Document::new(format!("synth:{i}"), tokens.join(" ")).with_topic(label)
        })
        .collect()
}
