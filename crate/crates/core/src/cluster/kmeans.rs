use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

use super::{squared_distance, ClusterAssignment};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once no centroid moves farther than this.
    pub tol: f64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            max_iter: 300,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub assignment: ClusterAssignment,
    pub centroids: Vec<Vec<f64>>,
    /// Inertia after every assignment step, the last entry being the final one.
    pub inertia_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Nearest centroid for every point (ties to the lower index) and the inertia.
fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    points
        .iter()
        .map(|p| {
            let mut best = (0, f64::INFINITY);
            for (c, centroid) in centroids.iter().enumerate() {
                let d = squared_distance(p, centroid);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

fn plus_plus_init<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.random_range(0..points.len())].clone()];
    let mut nearest: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = points.len() - 1;
            for (i, d) in nearest.iter().enumerate() {
                if target < *d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            // Every point coincides with a centroid already.
            rng.random_range(0..points.len())
        };
        centroids.push(points[next].clone());
        for (n, p) in nearest.iter_mut().zip(points) {
            *n = n.min(squared_distance(p, &centroids[centroids.len() - 1]));
        }
    }
    centroids
}

/// Lloyd iterations from k-means++ seeding. A centroid left without points
/// is moved onto the point farthest from its own centroid.
pub fn kmeans(points: &[Vec<f64>], config: &KMeansConfig) -> Result<KMeansResult> {
    let n = points.len();
    if config.k == 0 || config.k > n {
        return Err(Error::out_of_range(
            "k",
            format!("{} not in 1..={n}", config.k),
        ));
    }
    if config.max_iter == 0 {
        return Err(Error::out_of_range("max_iter", "must be at least 1"));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::Invalid("points have different dimensions".into()));
    }

    let mut rng = seed::rng(config.seed);
    let mut centroids = plus_plus_init(points, config.k, &mut rng);
    let mut inertia_trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iter {
        iterations += 1;
        let (labels, dists) = assign(points, &centroids);
        inertia_trace.push(dists.iter().sum());

        let mut sums = vec![vec![0.0; dim]; config.k];
        let mut sizes = vec![0usize; config.k];
        for (p, &c) in points.iter().zip(&labels) {
            sizes[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut taken: Vec<usize> = Vec::new();
        let mut next = Vec::with_capacity(config.k);
        for c in 0..config.k {
            if sizes[c] == 0 {
                let far = (0..n)
                    .filter(|i| !taken.contains(i))
                    .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
                    .unwrap_or(0);
                taken.push(far);
                next.push(points[far].clone());
            } else {
                next.push(sums[c].iter().map(|s| s / sizes[c] as f64).collect());
            }
        }
        let shift = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| squared_distance(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        if shift < config.tol {
            converged = true;
            break;
        }
    }

    let (labels, dists) = assign(points, &centroids);
    let inertia: f64 = dists.iter().sum();
    inertia_trace.push(inertia);
    Ok(KMeansResult {
        assignment: ClusterAssignment {
            labels,
            k: config.k,
            inertia: Some(inertia),
        },
        centroids,
        inertia_trace,
        iterations,
        converged,
    })
}
