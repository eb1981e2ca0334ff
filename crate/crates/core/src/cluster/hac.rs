use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;

use super::{squared_distance, ClusterAssignment};

pub const DEFAULT_HAC_CAP: usize = 12_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    #[default]
    Average,
    Complete,
    Ward,
}

impl std::str::FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            "ward" => Ok(Linkage::Ward),
            other => Err(Error::Invalid(format!("unknown linkage `{other}`"))),
        }
    }
}

/// Condensed upper-triangle matrix of pairwise Euclidean distances.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    pub fn from_fn(n: usize, mut dist: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                data.push(dist(i, j));
            }
        }
        Self { n, data }
    }

    pub fn euclidean(points: &[Vec<f64>]) -> Self {
        Self::from_fn(points.len(), |i, j| {
            squared_distance(&points[i], &points[j]).sqrt()
        })
    }

    /// Euclidean distances between L2-normalized sparse rows,
    /// `sqrt(2 - 2 cos)`; empty rows are treated as the zero vector.
    pub fn from_unit_sparse(rows: &[SparseVector]) -> Self {
        let norms: Vec<f64> = rows
            .iter()
            .map(|r| r.values.iter().map(|v| v * v).sum())
            .collect();
        Self::from_fn(rows.len(), |i, j| {
            let dot = sparse_dot(&rows[i], &rows[j]);
            (norms[i] + norms[j] - 2.0 * dot).max(0.0).sqrt()
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.data[self.offset(i, j)],
            std::cmp::Ordering::Greater => self.data[self.offset(j, i)],
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let o = if i < j {
            self.offset(i, j)
        } else {
            self.offset(j, i)
        };
        self.data[o] = v;
    }
}

fn sparse_dot(a: &SparseVector, b: &SparseVector) -> f64 {
    let (mut i, mut j, mut sum) = (0, 0, 0.0);
    while i < a.indices.len() && j < b.indices.len() {
        match a.indices[i].cmp(&b.indices[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                sum += a.values[i] * b.values[j];
                i += 1;
                j += 1;
            }
        }
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HacConfig {
    pub k: usize,
    pub linkage: Linkage,
    pub cap: usize,
}

impl HacConfig {
    pub fn new(k: usize, linkage: Linkage) -> Self {
        Self {
            k,
            linkage,
            cap: DEFAULT_HAC_CAP,
        }
    }
}

/// One agglomeration step. Clusters are named by the smallest original
/// point index they contain; `a < b` and `b` is absorbed into `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HacResult {
    pub assignment: ClusterAssignment,
    pub merges: Vec<Merge>,
}

pub fn hac(points: &[Vec<f64>], config: &HacConfig) -> Result<HacResult> {
    check_size(points.len(), config)?;
    hac_with_distances(DistanceMatrix::euclidean(points), config)
}

fn check_size(n: usize, config: &HacConfig) -> Result<()> {
    if n > config.cap {
        return Err(Error::TooLarge { n, cap: config.cap });
    }
    if config.k == 0 || config.k > n {
        return Err(Error::out_of_range(
            "k",
            format!("{} not in 1..={n}", config.k),
        ));
    }
    Ok(())
}

/// Greedy agglomeration with Lance-Williams updates. The closest pair is
/// merged first; ties go to the lexicographically smallest `(a, b)`.
pub fn hac_with_distances(mut dm: DistanceMatrix, config: &HacConfig) -> Result<HacResult> {
    let n = dm.len();
    check_size(n, config)?;

    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut parent: Vec<usize> = (0..n).collect();
    // Nearest active neighbor with a larger index, per active row.
    let scan = |dm: &DistanceMatrix, active: &[bool], i: usize| {
        let mut best = (usize::MAX, f64::INFINITY);
        for (j, _) in active.iter().enumerate().skip(i + 1).filter(|(_, a)| **a) {
            let d = dm.get(i, j);
            if d < best.1 {
                best = (j, d);
            }
        }
        best
    };
    let mut nn: Vec<(usize, f64)> = (0..n).map(|i| scan(&dm, &active, i)).collect();

    let mut merges = Vec::with_capacity(n - config.k);
    for _ in 0..n - config.k {
        let mut a = usize::MAX;
        let mut best = f64::INFINITY;
        for i in 0..n {
            if active[i] && nn[i].0 != usize::MAX && nn[i].1 < best {
                a = i;
                best = nn[i].1;
            }
        }
        let b = nn[a].0;
        let (na, nb) = (size[a], size[b]);
        let d_ab = dm.get(a, b);

        for m in 0..n {
            if !active[m] || m == a || m == b {
                continue;
            }
            let (d_am, d_bm) = (dm.get(a, m), dm.get(b, m));
            let nm = size[m] as f64;
            let updated = match config.linkage {
                Linkage::Average => (na as f64 * d_am + nb as f64 * d_bm) / (na + nb) as f64,
                Linkage::Complete => d_am.max(d_bm),
                Linkage::Ward => {
                    let t = nm + (na + nb) as f64;
                    (((nm + na as f64) * d_am * d_am + (nm + nb as f64) * d_bm * d_bm
                        - nm * d_ab * d_ab)
                        / t)
                        .max(0.0)
                        .sqrt()
                }
            };
            dm.set(a, m, updated);
        }
        active[b] = false;
        size[a] += nb;
        parent[b] = a;
        merges.push(Merge {
            a,
            b,
            distance: best,
            size: size[a],
        });

        // Refresh cached neighbors touched by the merge.
        nn[b] = (usize::MAX, f64::INFINITY);
        for i in 0..n {
            if !active[i] {
                continue;
            }
            if i == a || nn[i].0 == a || nn[i].0 == b {
                nn[i] = scan(&dm, &active, i);
            } else if i < a {
                let d = dm.get(i, a);
                if d < nn[i].1 || (d == nn[i].1 && a < nn[i].0) {
                    nn[i] = (a, d);
                }
            }
        }
    }

    let root = |mut i: usize| {
        while parent[i] != i {
            i = parent[i];
        }
        i
    };
    let mut cluster_of_root = vec![usize::MAX; n];
    let mut next = 0;
    let labels = (0..n)
        .map(|i| {
            let r = root(i);
            if cluster_of_root[r] == usize::MAX {
                cluster_of_root[r] = next;
                next += 1;
            }
            cluster_of_root[r]
        })
        .collect();
    Ok(HacResult {
        assignment: ClusterAssignment {
            labels,
            k: config.k,
            inertia: None,
        },
        merges,
    })
}
