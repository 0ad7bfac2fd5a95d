//! Ng–Jordan–Weiss spectral clustering of a distance matrix.
//!
//! Affinities are `exp(−d²/(2σ²))` with a zero diagonal, where `σ` is the
//! median off-diagonal distance (or the median positive one when that is
//! zero). The top-`k` eigenvectors of `D^{-1/2} A D^{-1/2}` are stacked,
//! their rows normalized to unit length, and the rows clustered with
//! k-means.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kmeans::kmeans;
use super::matrix::{DistanceMatrix, SquareMatrix};
use super::{ClusterAssignment, ClusterError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralOptions {
    pub restarts: usize,
    pub max_iter: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            restarts: 50,
            max_iter: 100,
        }
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    })
}

/// Affinity scale: median off-diagonal distance, falling back to the median
/// positive one. `None` when every off-diagonal distance is zero.
pub fn affinity_scale(m: &SquareMatrix) -> Option<f64> {
    let all: Vec<f64> = m.off_diagonal().collect();
    match median(all.clone()) {
        Some(s) if s > 0.0 => Some(s),
        _ => median(all.into_iter().filter(|&v| v > 0.0).collect()),
    }
}

/// Eigen-decomposition of the normalized affinity of one matrix, reusable
/// across every `k`.
pub struct SpectralEmbedding {
    n: usize,
    /// Eigenvectors as columns, by decreasing eigenvalue.
    vectors: Vec<Vec<f64>>,
    eigenvalues: Vec<f64>,
    degenerate: bool,
}

impl SpectralEmbedding {
    pub fn new(m: &SquareMatrix) -> Self {
        let n = m.n();
        let degenerate = match m.off_diagonal_range() {
            Some((lo, hi)) => lo == hi,
            None => true,
        };
        if degenerate {
            return SpectralEmbedding {
                n,
                vectors: Vec::new(),
                eigenvalues: Vec::new(),
                degenerate,
            };
        }
        let sigma = affinity_scale(m).expect("not all distances are equal");
        let denom = 2.0 * sigma * sigma;
        let affinity = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                let d = m.get(i, j);
                (-d * d / denom).exp()
            }
        });
        let inv_sqrt_degree: Vec<f64> = (0..n)
            .map(|i| {
                let deg: f64 = affinity.row(i).sum();
                if deg > 0.0 {
                    1.0 / deg.sqrt()
                } else {
                    0.0
                }
            })
            .collect();
        let laplacian = DMatrix::from_fn(n, n, |i, j| {
            inv_sqrt_degree[i] * affinity[(i, j)] * inv_sqrt_degree[j]
        });
        let eig = SymmetricEigen::new(laplacian);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .total_cmp(&eig.eigenvalues[a])
                .then(a.cmp(&b))
        });
        let vectors = order
            .iter()
            .map(|&c| eig.eigenvectors.column(c).iter().copied().collect())
            .collect();
        let eigenvalues = order.iter().map(|&c| eig.eigenvalues[c]).collect();
        SpectralEmbedding {
            n,
            vectors,
            eigenvalues,
            degenerate,
        }
    }

    /// All off-diagonal distances are equal; there is no structure to find.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Clusters into `k` groups using a k-means generator seeded with `seed`.
    ///
    /// Degenerate matrices get one cluster for `k = 1` and a contiguous
    /// uniform split otherwise, with the assignment flagged.
    pub fn cluster(
        &self,
        k: usize,
        seed: u64,
        opts: SpectralOptions,
    ) -> Result<ClusterAssignment, ClusterError> {
        let n = self.n;
        if k == 0 || k > n {
            return Err(ClusterError::InvalidK { k, n });
        }
        if k == 1 {
            return Ok(ClusterAssignment::from_zero_based(
                1,
                &vec![0; n],
                self.degenerate,
            ));
        }
        if self.degenerate {
            let labels: Vec<usize> = (0..n).map(|i| i * k / n).collect();
            return Ok(ClusterAssignment::from_zero_based(k, &labels, true));
        }
        if k == n {
            let labels: Vec<usize> = (0..n).collect();
            return Ok(ClusterAssignment::from_zero_based(k, &labels, false));
        }
        let points: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let row: Vec<f64> = self.vectors[..k].iter().map(|v| v[i]).collect();
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    row.into_iter().map(|v| v / norm).collect()
                } else {
                    row
                }
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let result = kmeans(&points, k, opts.restarts, opts.max_iter, &mut rng);
        Ok(ClusterAssignment::from_zero_based(k, &result.labels, false))
    }
}

/// Spectral clustering of `m` into `k` clusters, deterministic in `seed`.
pub fn spectral_cluster(
    m: &DistanceMatrix,
    k: usize,
    seed: u64,
) -> Result<ClusterAssignment, ClusterError> {
    SpectralEmbedding::new(m.values()).cluster(k, seed, SpectralOptions::default())
}
