//! Lexicon-based polarity scoring.
//!
//! A document's score is the sum of its tokens' valences divided by the
//! square root of its token count. A valence token with a negator among the
//! two tokens before it contributes the opposite sign.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::features::tokenize;

const DEFAULT_LEXICON: &str = include_str!("../data/default_lexicon.tsv");

/// Tokens looked back from a valence token when checking for negation.
pub const NEGATION_WINDOW: usize = 2;

pub const POSITIVE: &str = "pos";
pub const NEGATIVE: &str = "neg";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Lexicon {
    valence: HashMap<String, f64>,
    negators: HashSet<String>,
}

impl Lexicon {
    pub fn new(valence: HashMap<String, f64>, negators: HashSet<String>) -> Result<Self> {
        for (token, v) in &valence {
            if !v.is_finite() || v.abs() > 1.0 {
                return Err(Error::Lexicon {
                    line: 0,
                    message: format!("valence {v} of `{token}` outside [-1, 1]"),
                });
            }
            if negators.contains(token) {
                return Err(Error::Lexicon {
                    line: 0,
                    message: format!("`{token}` is both a negator and a valence entry"),
                });
            }
        }
        Ok(Self { valence, negators })
    }

    /// The bundled ~200-entry English lexicon.
    pub fn bundled() -> Self {
        Self::parse_tsv(DEFAULT_LEXICON).expect("bundled lexicon is well formed")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_tsv(&text)
    }

    /// Parses `token<TAB>valence[<TAB>negator]` rows. Blank lines and lines
    /// starting with `#` are skipped. A negator row's valence is ignored.
    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut valence = HashMap::new();
        let mut negators = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let token = cols.next().unwrap_or_default().trim().to_lowercase();
            let value = cols.next().ok_or_else(|| Error::Lexicon {
                line: line_no,
                message: "expected token<TAB>valence".into(),
            })?;
            let flag = cols.next().map(str::trim).unwrap_or("");
            if token.is_empty() {
                return Err(Error::Lexicon {
                    line: line_no,
                    message: "empty token".into(),
                });
            }
            if matches!(flag, "negator" | "1" | "true") {
                negators.insert(token);
                continue;
            }
            if !flag.is_empty() && !matches!(flag, "0" | "false") {
                return Err(Error::Lexicon {
                    line: line_no,
                    message: format!("unknown flag `{flag}`"),
                });
            }
            let v: f64 = value.trim().parse().map_err(|_| Error::Lexicon {
                line: line_no,
                message: format!("bad valence `{value}`"),
            })?;
            if v != 0.0 {
                valence.insert(token, v);
            }
        }
        Self::new(valence, negators).map_err(|e| match e {
            Error::Lexicon { message, .. } => Error::Lexicon { line: 0, message },
            other => other,
        })
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valence.get(token).copied()
    }

    pub fn is_negator(&self, token: &str) -> bool {
        self.negators.contains(token)
    }

    pub fn len(&self) -> usize {
        self.valence.len() + self.negators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same lexicon with every valence sign flipped.
    pub fn negated(&self) -> Self {
        Self {
            valence: self.valence.iter().map(|(t, v)| (t.clone(), -v)).collect(),
            negators: self.negators.clone(),
        }
    }

    pub fn with_valence(mut self, token: &str, v: f64) -> Self {
        self.valence.insert(token.to_string(), v);
        self
    }

    pub fn score_tokens(&self, tokens: &[&str]) -> f64 {
        if tokens.is_empty() {
            return 0.0;
        }
        let mut sum = 0.0;
        for (i, tok) in tokens.iter().enumerate() {
            let Some(v) = self.valence(tok) else { continue };
            let start = i.saturating_sub(NEGATION_WINDOW);
            let negated = tokens[start..i].iter().any(|t| self.is_negator(t));
            sum += if negated { -v } else { v };
        }
        sum / (tokens.len() as f64).sqrt()
    }

    pub fn score(&self, doc: &Document) -> f64 {
        self.score_tokens(&tokenize(&doc.text))
    }
}

/// Neutral band `[lower, upper]`; scores inside it get no class.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Thresholds {
    pub lower: f64,
    pub upper: f64,
}

impl Thresholds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(Error::Invalid(format!(
                "lower threshold {lower} exceeds upper {upper}"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn label(&self, score: f64) -> Option<&'static str> {
        label_by_threshold(score, self.lower, self.upper)
    }
}

pub fn label_by_threshold(score: f64, lower: f64, upper: f64) -> Option<&'static str> {
    if score > upper {
        Some(POSITIVE)
    } else if score < lower {
        Some(NEGATIVE)
    } else {
        None
    }
}

/// Scores every document and assigns classes. Documents inside the neutral
/// band keep their score but get no class.
pub fn score_corpus(corpus: &Corpus, lex: &Lexicon, thresholds: Thresholds) -> Corpus {
    let docs = corpus
        .docs()
        .iter()
        .map(|d| {
            let s = lex.score(d);
            Document {
                sentiment_score: Some(s),
                sentiment_class: thresholds.label(s).map(str::to_string),
                ..d.clone()
            }
        })
        .collect();
    Corpus::new(corpus.name.clone(), docs).expect("ids unchanged")
}
