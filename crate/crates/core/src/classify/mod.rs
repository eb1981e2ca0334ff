//! Binary text classifiers and their evaluation.
//!
//! Naive Bayes uses binary presence features; logistic regression and the
//! linear SVM use raw counts. All three are trained from scratch and are
//! deterministic for a given seed.

mod linear;
mod metrics;
mod naive_bayes;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use linear::{
    gradient, objective, train_logreg, train_svm, LinearHyperparams, LinearKind, LinearModel,
};
pub use metrics::{evaluate, AverageMetrics, ClassMetrics, ClassificationReport, ConfusionMatrix};
pub use naive_bayes::{train_nb, NbModel};

use crate::corpus::{train_test_split, LabeledDataset};
use crate::error::{Error, Result};
use crate::features::{fit_vocabulary, FeatureMatrix, Vocabulary};
use crate::seed::derive_seed;

pub(crate) fn check_features(n_features: usize, vocab_hash: &str, x: &FeatureMatrix) -> Result<()> {
    let found_hash = x.vocab.hash();
    if x.n_features() != n_features || found_hash != vocab_hash {
        return Err(Error::VocabularyMismatch {
            expected: n_features,
            found: x.n_features(),
            expected_hash: vocab_hash.to_string(),
            found_hash,
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Nb,
    Logreg,
    Svm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Svm, ModelKind::Nb, ModelKind::Logreg];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Nb => "nb",
            ModelKind::Logreg => "logreg",
            ModelKind::Svm => "svm",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" | "naive-bayes" => Ok(ModelKind::Nb),
            "logreg" | "logistic" => Ok(ModelKind::Logreg),
            "svm" => Ok(ModelKind::Svm),
            other => Err(Error::Invalid(format!("unknown model `{other}`"))),
        }
    }
}

/// A fitted classifier of any kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Model {
    Nb(NbModel),
    Linear(LinearModel),
}

impl Model {
    pub fn train(
        kind: ModelKind,
        texts: &[&str],
        y: &[usize],
        vocab: Arc<Vocabulary>,
        hp: &LinearHyperparams,
        nb_alpha: f64,
    ) -> Result<Model> {
        let x = Self::features(kind, texts, vocab);
        match kind {
            ModelKind::Nb => train_nb(&x, y, nb_alpha).map(Model::Nb),
            ModelKind::Logreg => train_logreg(&x, y, hp).map(Model::Linear),
            ModelKind::Svm => train_svm(&x, y, hp).map(Model::Linear),
        }
    }

    /// Binary features for naive Bayes, counts for the linear models.
    pub fn features(kind: ModelKind, texts: &[&str], vocab: Arc<Vocabulary>) -> FeatureMatrix {
        match kind {
            ModelKind::Nb => FeatureMatrix::binary(texts.iter().copied(), vocab),
            ModelKind::Logreg | ModelKind::Svm => {
                FeatureMatrix::counts(texts.iter().copied(), vocab)
            }
        }
    }

    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<usize>> {
        match self {
            Model::Nb(m) => m.predict(x),
            Model::Linear(m) => m.predict(x),
        }
    }
}

/// Settings for one train/evaluate run on a labeled dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    /// `(label, keyword)` pairs: the keyword is removed from documents of that label.
    pub drop_keywords: Vec<(String, String)>,
    pub train_fraction: f64,
    pub min_count: usize,
    pub nb_alpha: f64,
    pub hyperparams: LinearHyperparams,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Svm,
            drop_keywords: Vec::new(),
            train_fraction: 0.8,
            min_count: 1,
            nb_alpha: 1.0,
            hyperparams: LinearHyperparams::default(),
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// Topic protocol: with or without the "vaccine"/"market" keywords.
    pub fn topic(model: ModelKind, with_keyword: bool, seed: u64) -> Self {
        let drop_keywords = if with_keyword {
            Vec::new()
        } else {
            vec![
                ("V".to_string(), "vaccine".to_string()),
                ("M".to_string(), "market".to_string()),
            ]
        };
        Self {
            model,
            drop_keywords,
            seed,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub model: ModelKind,
    pub class_names: Vec<String>,
    pub train_size: usize,
    pub test_size: usize,
    pub confusion: ConfusionMatrix,
    pub report: ClassificationReport,
    pub config: ExperimentConfig,
}

/// Optional keyword removal, split, vocabulary fit on train, train, evaluate on test.
pub fn run_experiment(
    dataset: &LabeledDataset,
    config: &ExperimentConfig,
) -> Result<ExperimentResult> {
    let mut ds = dataset.clone();
    for (label, keyword) in &config.drop_keywords {
        ds = ds.remove_keyword_for(label, keyword);
    }
    let class_names: Vec<String> = ds
        .labels()
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_string)
        .collect();
    if class_names.len() != 2 {
        return Err(Error::Invalid(format!(
            "binary classification needs exactly two labels, found {class_names:?}"
        )));
    }
    let encode = |d: &LabeledDataset| -> Vec<usize> {
        d.labels()
            .into_iter()
            .map(|l| usize::from(l == class_names[1]))
            .collect()
    };

    let (train, test) = train_test_split(
        &ds,
        config.train_fraction,
        derive_seed(config.seed, "split"),
    )?;
    let vocab = Arc::new(fit_vocabulary(&train.to_corpus("train"), config.min_count)?);
    let train_texts: Vec<&str> = train.docs().iter().map(|d| d.text.as_str()).collect();
    let test_texts: Vec<&str> = test.docs().iter().map(|d| d.text.as_str()).collect();
    let hp = LinearHyperparams {
        seed: derive_seed(config.seed, "train"),
        ..config.hyperparams
    };
    let model = Model::train(
        config.model,
        &train_texts,
        &encode(&train),
        vocab.clone(),
        &hp,
        config.nb_alpha,
    )?;
    let predictions = model.predict(&Model::features(config.model, &test_texts, vocab))?;
    let (confusion, report) = evaluate(&encode(&test), &predictions, &class_names)?;
    Ok(ExperimentResult {
        model: config.model,
        class_names,
        train_size: train.len(),
        test_size: test.len(),
        confusion,
        report,
        config: config.clone(),
    })
}

/// Topic experiment on an M/V-labeled dataset.
pub fn run_topic_experiment(
    dataset: &LabeledDataset,
    with_keyword: bool,
    model: ModelKind,
    seed: u64,
) -> Result<ExperimentResult> {
    run_experiment(dataset, &ExperimentConfig::topic(model, with_keyword, seed))
}
