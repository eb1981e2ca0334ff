use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, SparseVector};
use crate::seed;

use super::check_features;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearKind {
    Logreg,
    Svm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearHyperparams {
    pub learning_rate: f64,
    pub l2: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for LinearHyperparams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            l2: 1e-4,
            epochs: 50,
            batch_size: 32,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub kind: LinearKind,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyperparams: LinearHyperparams,
    pub vocab_hash: String,
    /// Full regularized objective before training and after each epoch.
    pub loss_trace: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn margin(row: &SparseVector, weights: &[f64], bias: f64) -> f64 {
    row.dot(weights) + bias
}

/// Mean loss over rows plus `l2 / 2 * |w|^2`. Labels are 0/1; the hinge
/// loss uses them as -1/+1.
pub fn objective(
    kind: LinearKind,
    rows: &[SparseVector],
    y: &[usize],
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> f64 {
    let n = rows.len().max(1) as f64;
    let data: f64 = rows
        .iter()
        .zip(y)
        .map(|(row, &label)| {
            let z = margin(row, weights, bias);
            match kind {
                LinearKind::Logreg => softplus(z) - label as f64 * z,
                LinearKind::Svm => (1.0 - signed(label) * z).max(0.0),
            }
        })
        .sum::<f64>()
        / n;
    data + 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>()
}

fn signed(label: usize) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Gradient (logistic) or subgradient (hinge) of [`objective`] over `batch`.
pub fn gradient(
    kind: LinearKind,
    rows: &[SparseVector],
    y: &[usize],
    batch: &[usize],
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> (Vec<f64>, f64) {
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    let scale = 1.0 / batch.len().max(1) as f64;
    for &i in batch {
        let z = margin(&rows[i], weights, bias);
        let coef = match kind {
            LinearKind::Logreg => sigmoid(z) - y[i] as f64,
            LinearKind::Svm => {
                let s = signed(y[i]);
                if s * z < 1.0 {
                    -s
                } else {
                    0.0
                }
            }
        };
        if coef != 0.0 {
            for (j, v) in rows[i].iter() {
                grad_w[j] += scale * coef * v;
            }
            grad_b += scale * coef;
        }
    }
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g += l2 * w;
    }
    (grad_w, grad_b)
}

fn train(
    kind: LinearKind,
    x: &FeatureMatrix,
    y: &[usize],
    hp: &LinearHyperparams,
) -> Result<LinearModel> {
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.n_rows(),
            right: y.len(),
        });
    }
    if hp.batch_size == 0
        || hp.learning_rate.is_nan()
        || hp.learning_rate <= 0.0
        || hp.l2.is_nan()
        || hp.l2 < 0.0
    {
        return Err(Error::Invalid(format!("bad hyperparameters {hp:?}")));
    }
    let positives = y.iter().filter(|&&l| l == 1).count();
    if y.iter().any(|&l| l > 1) {
        return Err(Error::out_of_range("class index", "labels must be 0 or 1"));
    }
    if positives == 0 || positives == y.len() {
        return Err(Error::SingleClass);
    }

    let mut weights = vec![0.0; x.n_features()];
    // Log-odds of the class prior, so an untrained model predicts the majority.
    let mut bias = (positives as f64 / (y.len() - positives) as f64).ln();
    let mut loss_trace = vec![objective(kind, &x.rows, y, &weights, bias, hp.l2)];
    let mut order: Vec<usize> = (0..y.len()).collect();
    let mut rng = seed::rng(hp.seed);

    for epoch in 1..=hp.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(hp.batch_size) {
            let (gw, gb) = gradient(kind, &x.rows, y, batch, &weights, bias, hp.l2);
            for (w, g) in weights.iter_mut().zip(&gw) {
                *w -= hp.learning_rate * g;
            }
            bias -= hp.learning_rate * gb;
        }
        let loss = objective(kind, &x.rows, y, &weights, bias, hp.l2);
        if !loss.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Diverged {
                epoch,
                learning_rate: hp.learning_rate,
            });
        }
        loss_trace.push(loss);
    }

    Ok(LinearModel {
        kind,
        weights,
        bias,
        hyperparams: *hp,
        vocab_hash: x.vocab.hash(),
        loss_trace,
    })
}

/// L2-regularized logistic regression by mini-batch gradient descent.
pub fn train_logreg(x: &FeatureMatrix, y: &[usize], hp: &LinearHyperparams) -> Result<LinearModel> {
    train(LinearKind::Logreg, x, y, hp)
}

/// L2-regularized linear SVM (hinge loss) by mini-batch subgradient descent.
pub fn train_svm(x: &FeatureMatrix, y: &[usize], hp: &LinearHyperparams) -> Result<LinearModel> {
    train(LinearKind::Svm, x, y, hp)
}

impl LinearModel {
    pub fn decision_function(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        check_features(self.weights.len(), &self.vocab_hash, x)?;
        Ok(x.rows
            .iter()
            .map(|r| margin(r, &self.weights, self.bias))
            .collect())
    }

    /// Class 1 for a positive score; zero and below go to class 0.
    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<usize>> {
        Ok(self
            .decision_function(x)?
            .into_iter()
            .map(|s| usize::from(s > 0.0))
            .collect())
    }

    pub fn weight_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}
