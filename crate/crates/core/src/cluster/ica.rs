use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcaConfig {
    pub n_components: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
}

impl IcaConfig {
    pub fn new(n_components: usize, seed: u64) -> Self {
        Self {
            n_components,
            seed,
            max_iter: 200,
            tol: 1e-8,
        }
    }
}

/// Fitted FastICA model. Row-major matrices: `whitening` is
/// `n_components x n_features`, `unmixing` is `n_components x n_components`
/// with unit-norm rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcaTransform {
    pub mean: Vec<f64>,
    pub whitening: Vec<Vec<f64>>,
    pub unmixing: Vec<Vec<f64>>,
    pub n_components: usize,
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| m.row(r).iter().copied().collect())
        .collect()
}

fn from_rows(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let ncols = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c])
}

/// `(W W^T)^{-1/2} W`: makes the rows of `w` orthonormal.
fn symmetric_decorrelation(w: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(w * w.transpose());
    let inv_sqrt = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| 1.0 / l.max(f64::MIN_POSITIVE).sqrt()),
    );
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&inv_sqrt) * v.transpose() * w
}

impl IcaTransform {
    /// Projects rows onto the independent components.
    pub fn transform(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let dim = self.mean.len();
        if x.iter().any(|r| r.len() != dim) {
            return Err(Error::LengthMismatch {
                left: x.first().map_or(0, Vec::len),
                right: dim,
            });
        }
        let centered = DMatrix::from_fn(x.len(), dim, |r, c| x[r][c] - self.mean[c]);
        let k = from_rows(&self.whitening);
        let w = from_rows(&self.unmixing);
        Ok(to_rows(&(centered * k.transpose() * w.transpose())))
    }
}

/// FastICA: center, whiten with the covariance eigendecomposition, then run
/// the symmetric fixed-point iteration with the `tanh` contrast. Hitting
/// `max_iter` is not an error; the result carries `converged = false`.
pub fn fast_ica(x: &[Vec<f64>], config: &IcaConfig) -> Result<(IcaTransform, Vec<Vec<f64>>)> {
    let n = x.len();
    let dim = x.first().map_or(0, Vec::len);
    if n < 2 || dim == 0 || x.iter().any(|r| r.len() != dim) {
        return Err(Error::Invalid(
            "ICA needs at least two rows of equal, non-zero width".into(),
        ));
    }
    let c = config.n_components;
    if c == 0 || c > dim {
        return Err(Error::out_of_range(
            "n_components",
            format!("{c} not in 1..={dim}"),
        ));
    }

    let data = from_rows(x);
    let mean: Vec<f64> = (0..dim).map(|j| data.column(j).mean()).collect();
    let centered = DMatrix::from_fn(n, dim, |r, j| data[(r, j)] - mean[j]);
    let cov = centered.transpose() * &centered / n as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let largest = eig.eigenvalues[order[0]].max(0.0);
    let rank_floor = largest * 1e-10 + f64::MIN_POSITIVE;
    if eig.eigenvalues[order[c - 1]] <= rank_floor {
        return Err(Error::out_of_range(
            "n_components",
            format!("{c} exceeds the numerical rank of the data"),
        ));
    }
    let whitening = DMatrix::from_fn(c, dim, |r, j| {
        let idx = order[r];
        eig.eigenvectors[(j, idx)] / eig.eigenvalues[idx].sqrt()
    });
    let white = &centered * whitening.transpose();

    let mut rng = seed::rng(config.seed);
    let init = DMatrix::from_fn(c, c, |_, _| StandardNormal.sample(&mut rng));
    let mut w = symmetric_decorrelation(&init);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        iterations += 1;
        let proj = &white * w.transpose();
        let g = proj.map(f64::tanh);
        let g_prime_mean: Vec<f64> = (0..c)
            .map(|k| g.column(k).iter().map(|t| 1.0 - t * t).sum::<f64>() / n as f64)
            .collect();
        let mut next = g.transpose() * &white / n as f64;
        for k in 0..c {
            for j in 0..c {
                next[(k, j)] -= g_prime_mean[k] * w[(k, j)];
            }
        }
        let next = symmetric_decorrelation(&next);
        let change = (&next * w.transpose())
            .diagonal()
            .iter()
            .map(|d| (d.abs() - 1.0).abs())
            .fold(0.0, f64::max);
        w = next;
        if change < config.tol {
            converged = true;
            break;
        }
    }

    let sources = to_rows(&(&white * w.transpose()));
    Ok((
        IcaTransform {
            mean,
            whitening: to_rows(&whitening),
            unmixing: to_rows(&w),
            n_components: c,
            seed: config.seed,
            iterations,
            converged,
        },
        sources,
    ))
}
