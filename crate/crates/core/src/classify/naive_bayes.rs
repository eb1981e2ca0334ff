use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

use super::check_features;

/// Bernoulli naive Bayes over binary token-presence features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub log_prior: [f64; 2],
    pub log_theta: [Vec<f64>; 2],
    pub log_one_minus_theta: [Vec<f64>; 2],
    pub alpha: f64,
    pub n_features: usize,
    pub vocab_hash: String,
}

/// `theta(c, t) = (docs of c containing t + alpha) / (docs of c + 2 alpha)`.
/// Feature values are treated as presence indicators (`> 0`).
pub fn train_nb(x: &FeatureMatrix, y: &[usize], alpha: f64) -> Result<NbModel> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Invalid(format!("alpha {alpha} must be > 0")));
    }
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.n_rows(),
            right: y.len(),
        });
    }
    let n_features = x.n_features();
    let mut docs = [0usize; 2];
    let mut df = [vec![0usize; n_features], vec![0usize; n_features]];
    for (row, &label) in x.rows.iter().zip(y) {
        if label > 1 {
            return Err(Error::out_of_range("class index", label.to_string()));
        }
        docs[label] += 1;
        for (i, v) in row.iter() {
            if v > 0.0 {
                df[label][i] += 1;
            }
        }
    }
    if docs.contains(&0) {
        return Err(Error::SingleClass);
    }
    let n = y.len() as f64;
    let mut log_theta = [Vec::new(), Vec::new()];
    let mut log_one_minus_theta = [Vec::new(), Vec::new()];
    for c in 0..2 {
        let denom = docs[c] as f64 + 2.0 * alpha;
        let theta: Vec<f64> = df[c].iter().map(|&d| (d as f64 + alpha) / denom).collect();
        log_theta[c] = theta.iter().map(|t| t.ln()).collect();
        log_one_minus_theta[c] = theta.iter().map(|t| (1.0 - t).ln()).collect();
    }
    Ok(NbModel {
        log_prior: [(docs[0] as f64 / n).ln(), (docs[1] as f64 / n).ln()],
        log_theta,
        log_one_minus_theta,
        alpha,
        n_features,
        vocab_hash: x.vocab.hash(),
    })
}

impl NbModel {
    /// Joint log-likelihood of each class for every row.
    pub fn joint_log_likelihood(&self, x: &FeatureMatrix) -> Result<Vec<[f64; 2]>> {
        check_features(self.n_features, &self.vocab_hash, x)?;
        let base: [f64; 2] =
            [0, 1].map(|c| self.log_prior[c] + self.log_one_minus_theta[c].iter().sum::<f64>());
        Ok(x.rows
            .iter()
            .map(|row| {
                [0, 1].map(|c| {
                    base[c]
                        + row
                            .iter()
                            .filter(|(_, v)| *v > 0.0)
                            .map(|(i, _)| self.log_theta[c][i] - self.log_one_minus_theta[c][i])
                            .sum::<f64>()
                })
            })
            .collect())
    }

    /// Posterior argmax; exact ties go to class 0.
    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<usize>> {
        Ok(self
            .joint_log_likelihood(x)?
            .into_iter()
            .map(|[l0, l1]| usize::from(l1 > l0))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Vocabulary;
    use std::sync::Arc;

    fn matrix(texts: &[&str], tokens: &[&str]) -> FeatureMatrix {
        let vocab = Arc::new(Vocabulary::from_tokens(tokens.iter().copied()));
        FeatureMatrix::binary(texts.iter().copied(), vocab)
    }

    #[test]
    fn theta_by_hand() {
        let x = matrix(&["a", "b"], &["a", "b"]);
        let m = train_nb(&x, &[0, 1], 1.0).unwrap();
        assert!((m.log_theta[0][0].exp() - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.log_theta[0][1].exp() - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.log_one_minus_theta[0][0].exp() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.log_prior[0], m.log_prior[1]);
        assert_eq!(m.predict(&x).unwrap(), vec![0, 1]);
    }

    #[test]
    fn large_alpha_flattens_theta() {
        let x = matrix(&["a", "b", "a b"], &["a", "b"]);
        let m = train_nb(&x, &[0, 1, 1], 1e9).unwrap();
        for c in 0..2 {
            for t in &m.log_theta[c] {
                assert!((t.exp() - 0.5).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn theta_strictly_inside_unit_interval() {
        let x = matrix(&["a b", "a b", "b"], &["a", "b", "c"]);
        let m = train_nb(&x, &[0, 0, 1], 0.5).unwrap();
        for c in 0..2 {
            assert!(m.log_theta[c]
                .iter()
                .all(|t| t.exp() > 0.0 && t.exp() < 1.0));
        }
    }

    #[test]
    fn ties_go_to_class_zero() {
        let x = matrix(&["a", "b"], &["a", "b"]);
        let m = train_nb(&x, &[0, 1], 1.0).unwrap();
        // Contains both tokens: symmetric evidence.
        let both = FeatureMatrix::binary(["a b", ""], x.vocab.clone());
        assert_eq!(m.predict(&both).unwrap(), vec![0, 0]);
    }

    #[test]
    fn errors() {
        let x = matrix(&["a", "b"], &["a", "b"]);
        assert!(matches!(
            train_nb(&x, &[1, 1], 1.0),
            Err(Error::SingleClass)
        ));
        assert!(train_nb(&x, &[0, 1], 0.0).is_err());
        let m = train_nb(&x, &[0, 1], 1.0).unwrap();
        let other = matrix(&["a"], &["a", "b", "c"]);
        assert!(matches!(
            m.predict(&other),
            Err(Error::VocabularyMismatch { .. })
        ));
    }
}
