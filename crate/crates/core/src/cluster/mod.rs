//! Unsupervised grouping of documents and cluster-to-label evaluation.

mod hac;
mod ica;
mod kmeans;

use std::collections::BTreeSet;
use std::io::Write;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

pub use hac::{
    hac, hac_with_distances, DistanceMatrix, HacConfig, HacResult, Linkage, Merge, DEFAULT_HAC_CAP,
};
pub use ica::{fast_ica, IcaConfig, IcaTransform};
pub use kmeans::{kmeans, KMeansConfig, KMeansResult};

use crate::classify::{ClassificationReport, ConfusionMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub k: usize,
    pub inertia: Option<f64>,
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    /// `mapping[cluster]` is the label index the cluster stands for.
    pub mapping: Vec<usize>,
    pub class_names: Vec<String>,
    pub confusion: ConfusionMatrix,
    pub report: ClassificationReport,
}

/// Maps clusters to labels with the permutation that maximizes accuracy
/// (first such permutation in lexicographic order), then scores the mapping.
pub fn overlap_report<S: AsRef<str>>(
    assignment: &ClusterAssignment,
    true_labels: &[S],
) -> Result<OverlapReport> {
    if assignment.labels.len() != true_labels.len() {
        return Err(Error::LengthMismatch {
            left: assignment.labels.len(),
            right: true_labels.len(),
        });
    }
    let class_names: Vec<String> = true_labels
        .iter()
        .map(|s| s.as_ref())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_string)
        .collect();
    let k = assignment.k;
    if class_names.len() != k {
        return Err(Error::ClusterLabelMismatch {
            clusters: k,
            labels: class_names.len(),
        });
    }
    if k > 8 {
        return Err(Error::out_of_range(
            "clusters for permutation mapping",
            format!("{k} > 8"),
        ));
    }
    let truth: Vec<usize> = true_labels
        .iter()
        .map(|l| class_names.iter().position(|c| c == l.as_ref()).unwrap())
        .collect();
    let mut joint = vec![vec![0u64; k]; k];
    for (&c, &t) in assignment.labels.iter().zip(&truth) {
        if c >= k {
            return Err(Error::out_of_range("cluster index", c.to_string()));
        }
        joint[c][t] += 1;
    }
    let mut best: Option<(u64, Vec<usize>)> = None;
    for perm in (0..k).permutations(k) {
        let hits: u64 = perm.iter().enumerate().map(|(c, &t)| joint[c][t]).sum();
        if best.as_ref().is_none_or(|(b, _)| hits > *b) {
            best = Some((hits, perm));
        }
    }
    let mapping = best.map(|b| b.1).unwrap_or_default();
    let predicted: Vec<usize> = assignment.labels.iter().map(|&c| mapping[c]).collect();
    let confusion = ConfusionMatrix::from_predictions(k, &truth, &predicted)?;
    let report = ClassificationReport::from_confusion(&confusion, &class_names)?;
    Ok(OverlapReport {
        mapping,
        class_names,
        confusion,
        report,
    })
}

/// Writes `id,cluster` rows.
pub fn write_assignments_csv<W: Write, S: AsRef<str>>(
    ids: &[S],
    assignment: &ClusterAssignment,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::Invalid(format!("csv write failed: {e}"));
    w.write_record(["id", "cluster"]).map_err(to_err)?;
    for (id, c) in ids.iter().zip(&assignment.labels) {
        w.write_record([id.as_ref(), &c.to_string()])
            .map_err(to_err)?;
    }
    w.flush()
        .map_err(|e| Error::Invalid(format!("csv write failed: {e}")))
}
