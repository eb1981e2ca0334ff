use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts indexed `(true class, predicted class)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self> {
        let n = counts.len();
        if n == 0 || counts.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid("confusion matrix must be square".into()));
        }
        Ok(Self { counts })
    }

    pub fn from_predictions(n_classes: usize, y_true: &[usize], y_pred: &[usize]) -> Result<Self> {
        if y_true.len() != y_pred.len() {
            return Err(Error::LengthMismatch {
                left: y_true.len(),
                right: y_pred.len(),
            });
        }
        let mut counts = vec![vec![0u64; n_classes]; n_classes];
        for (&t, &p) in y_true.iter().zip(y_pred) {
            if t >= n_classes || p >= n_classes {
                return Err(Error::out_of_range(
                    "class index",
                    format!("{} with {n_classes} classes", t.max(p)),
                ));
            }
            counts[t][p] += 1;
        }
        Ok(Self { counts })
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub classes: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub macro_avg: AverageMetrics,
    pub weighted_avg: AverageMetrics,
    pub total: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ClassificationReport {
    /// Derives every metric from the confusion matrix; `0/0` is reported as 0.
    pub fn from_confusion(cm: &ConfusionMatrix, names: &[String]) -> Result<Self> {
        let n = cm.n_classes();
        if names.len() != n {
            return Err(Error::LengthMismatch {
                left: names.len(),
                right: n,
            });
        }
        let total = cm.total();
        let classes: Vec<ClassMetrics> = (0..n)
            .map(|c| {
                let tp = cm.counts[c][c];
                let support: u64 = cm.counts[c].iter().sum();
                let predicted: u64 = (0..n).map(|r| cm.counts[r][c]).sum();
                let precision = ratio(tp, predicted);
                let recall = ratio(tp, support);
                let f1 = if precision + recall > 0.0 {
                    2.0 * precision * recall / (precision + recall)
                } else {
                    0.0
                };
                ClassMetrics {
                    class: names[c].clone(),
                    precision,
                    recall,
                    f1,
                    support,
                }
            })
            .collect();
        let avg = |weight: &dyn Fn(&ClassMetrics) -> f64, norm: f64| {
            let norm = if norm > 0.0 { norm } else { 1.0 };
            AverageMetrics {
                precision: classes.iter().map(|m| weight(m) * m.precision).sum::<f64>() / norm,
                recall: classes.iter().map(|m| weight(m) * m.recall).sum::<f64>() / norm,
                f1: classes.iter().map(|m| weight(m) * m.f1).sum::<f64>() / norm,
            }
        };
        let macro_avg = avg(&|_| 1.0, n as f64);
        let weighted_avg = avg(&|m| m.support as f64, total as f64);
        Ok(Self {
            accuracy: ratio(cm.correct(), total),
            classes,
            macro_avg,
            weighted_avg,
            total,
        })
    }

    /// Plain-text table with precision/recall/f1-score/support columns.
    pub fn to_text(&self) -> String {
        let width = self
            .classes
            .iter()
            .map(|c| c.class.len())
            .chain(["weighted avg".len()])
            .max()
            .unwrap_or(12);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>width$} {:>9} {:>9} {:>9} {:>9}\n",
            "", "precision", "recall", "f1-score", "support"
        );
        for c in &self.classes {
            let _ = writeln!(
                out,
                "{:>width$} {:>9.2} {:>9.2} {:>9.2} {:>9}",
                c.class, c.precision, c.recall, c.f1, c.support
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:>width$} {:>9} {:>9} {:>9.2} {:>9}",
            "accuracy", "", "", self.accuracy, self.total
        );
        for (name, a) in [
            ("macro avg", &self.macro_avg),
            ("weighted avg", &self.weighted_avg),
        ] {
            let _ = writeln!(
                out,
                "{:>width$} {:>9.2} {:>9.2} {:>9.2} {:>9}",
                name, a.precision, a.recall, a.f1, self.total
            );
        }
        out
    }
}

pub fn evaluate(
    y_true: &[usize],
    y_pred: &[usize],
    names: &[String],
) -> Result<(ConfusionMatrix, ClassificationReport)> {
    let cm = ConfusionMatrix::from_predictions(names.len(), y_true, y_pred)?;
    let report = ClassificationReport::from_confusion(&cm, names)?;
    Ok((cm, report))
}
