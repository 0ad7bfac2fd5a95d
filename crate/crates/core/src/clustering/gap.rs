//! Intra-cluster dispersion and the gap statistic.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::{DistanceMatrix, SquareMatrix};
use super::spectral::{SpectralEmbedding, SpectralOptions};
use super::{ClusterAssignment, ClusterError};

/// Default number of reference matrices.
pub const DEFAULT_REFERENCES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dispersion {
    /// `W_k = Σ_r D_r / (2 n_r)`.
    pub w: f64,
    /// `D_r = Σ_{i,j ∈ C_r} d_ij` over ordered pairs, `i = j` included.
    pub d_r: Vec<f64>,
}

fn dispersion_of(m: &SquareMatrix, a: &ClusterAssignment) -> Dispersion {
    let n = m.n();
    let mut d_r = vec![0.0; a.k];
    for i in 0..n {
        for j in 0..n {
            if a.labels[i] == a.labels[j] {
                d_r[a.labels[i] - 1] += m.get(i, j);
            }
        }
    }
    let w = d_r
        .iter()
        .zip(&a.sizes)
        .map(|(d, &size)| d / (2.0 * size as f64))
        .sum();
    Dispersion { w, d_r }
}

pub fn intra_dispersion(
    m: &DistanceMatrix,
    a: &ClusterAssignment,
) -> Result<Dispersion, ClusterError> {
    if a.labels.len() != m.len() {
        return Err(ClusterError::Shape(format!(
            "assignment covers {} elements, matrix has {}",
            a.labels.len(),
            m.len()
        )));
    }
    Ok(dispersion_of(m.values(), a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub k: usize,
    pub w_k: f64,
    pub d_r: Vec<f64>,
    pub log_w_k: f64,
    /// Mean of `log W_kb` over the reference matrices.
    pub reference_log_w: f64,
    pub gap: f64,
    pub sigma: f64,
    /// `σ_k · sqrt(1 + 1/B)`.
    pub s: f64,
    pub assignment: ClusterAssignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
    pub references: usize,
    pub seed: u64,
    /// Smallest `k` with `Gap(k) ≥ Gap(k+1) − s_{k+1}`, or `k_max` if none.
    pub chosen_k: usize,
    /// `k` with the largest gap (first one on ties).
    pub global_max_k: usize,
}

impl GapReport {
    pub fn row(&self, k: usize) -> Option<&GapRow> {
        self.rows.get(k.checked_sub(1)?)
    }
}

/// The generator for stream `stream` of a master seed. Stream 0 drives the
/// observed matrix, stream `b + 1` reference matrix `b`.
fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Symmetric matrix with zero diagonal and off-diagonals i.i.d. uniform on
/// `[lo, hi]`; exact zeros are redrawn.
pub fn reference_matrix<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let v = loop {
                let v = rng.random_range(lo..=hi);
                if v != 0.0 {
                    break v;
                }
            };
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

fn log_dispersions(
    m: &SquareMatrix,
    k_max: usize,
    rng: &mut ChaCha8Rng,
    opts: SpectralOptions,
) -> Result<Vec<(f64, ClusterAssignment, Dispersion)>, ClusterError> {
    let seeds: Vec<u64> = (0..k_max).map(|_| rng.next_u64()).collect();
    let embedding = SpectralEmbedding::new(m);
    (1..=k_max)
        .map(|k| {
            let a = embedding.cluster(k, seeds[k - 1], opts)?;
            let d = dispersion_of(m, &a);
            Ok((d.w.log2(), a, d))
        })
        .collect()
}

/// Gap statistic for `k = 1..=k_max` against `references` uniform reference
/// matrices. Reference matrices are generated and clustered in parallel,
/// each from its own stream of `seed`, so the report depends only on the
/// inputs.
pub fn gap_statistic(
    m: &DistanceMatrix,
    k_max: usize,
    references: usize,
    seed: u64,
) -> Result<GapReport, ClusterError> {
    gap_statistic_with(m, k_max, references, seed, SpectralOptions::default())
}

pub fn gap_statistic_with(
    m: &DistanceMatrix,
    k_max: usize,
    references: usize,
    seed: u64,
    opts: SpectralOptions,
) -> Result<GapReport, ClusterError> {
    let n = m.len();
    if k_max == 0 || k_max >= n {
        return Err(ClusterError::InvalidK { k: k_max, n });
    }
    if references == 0 {
        return Err(ClusterError::NoReferences);
    }
    let (lo, hi) = m
        .values()
        .off_diagonal_range()
        .ok_or(ClusterError::EmptyMatrix)?;
    if lo == hi {
        return Err(ClusterError::AllEqualMatrix);
    }

    let observed = log_dispersions(m.values(), k_max, &mut stream_rng(seed, 0), opts)?;
    let reference: Vec<Vec<f64>> = (0..references)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64 + 1);
            let r = reference_matrix(n, lo, hi, &mut rng);
            let logs = log_dispersions(&r, k_max, &mut rng, opts)?;
            Ok(logs.into_iter().map(|(l, _, _)| l).collect())
        })
        .collect::<Result<_, ClusterError>>()?;

    let b = references as f64;
    let rows: Vec<GapRow> = observed
        .into_iter()
        .enumerate()
        .map(|(idx, (log_w_k, assignment, disp))| {
            let logs: Vec<f64> = reference.iter().map(|r| r[idx]).collect();
            let mean = logs.iter().sum::<f64>() / b;
            let sigma = (logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / b).sqrt();
            GapRow {
                k: idx + 1,
                w_k: disp.w,
                d_r: disp.d_r,
                log_w_k,
                reference_log_w: mean,
                gap: mean - log_w_k,
                sigma,
                s: sigma * (1.0 + 1.0 / b).sqrt(),
                assignment,
            }
        })
        .collect();

    let chosen_k = rows
        .windows(2)
        .find(|w| w[0].gap >= w[1].gap - w[1].s)
        .map(|w| w[0].k)
        .unwrap_or(k_max);
    let global_max_k = rows
        .iter()
        .fold(None::<&GapRow>, |best, r| match best {
            Some(b) if b.gap >= r.gap => Some(b),
            _ => Some(r),
        })
        .map(|r| r.k)
        .expect("k_max >= 1");
    Ok(GapReport {
        rows,
        references,
        seed,
        chosen_k,
        global_max_k,
    })
}
