//! Lloyd's k-means with k-means++ seeding and restarts.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster index per point in `0..k`, numbered by first appearance.
    pub labels: Vec<usize>,
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus<R: Rng + ?Sized>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut centers = vec![points[rng.random_range(0..points.len())].clone()];
    while centers.len() < k {
        let weights: Vec<f64> = points.iter().map(|p| nearest(p, &centers).1).collect();
        let next = match WeightedIndex::new(&weights) {
            Ok(w) => w.sample(rng),
            // Every point already coincides with a center.
            Err(_) => rng.random_range(0..points.len()),
        };
        centers.push(points[next].clone());
    }
    centers
}

fn centroids(points: &[Vec<f64>], labels: &[usize], k: usize) -> Vec<Option<Vec<f64>>> {
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, c)| (c > 0).then(|| s.into_iter().map(|v| v / c as f64).collect()))
        .collect()
}

/// Moves the farthest point of the largest cluster into each empty cluster.
fn fill_empty(points: &[Vec<f64>], labels: &mut [usize], k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let largest = (0..k)
            .max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)))
            .expect("k > 0");
        let cents = centroids(points, labels, k);
        let center = cents[largest]
            .as_ref()
            .expect("largest cluster is nonempty");
        let far = (0..points.len())
            .filter(|&i| labels[i] == largest)
            .max_by(|&a, &b| {
                sq_dist(&points[a], center)
                    .total_cmp(&sq_dist(&points[b], center))
                    .then(b.cmp(&a))
            })
            .expect("largest cluster is nonempty");
        labels[far] = empty;
    }
}

fn lloyd(points: &[Vec<f64>], mut centers: Vec<Vec<f64>>, max_iter: usize) -> (Vec<usize>, f64) {
    let k = centers.len();
    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
    for _ in 0..max_iter {
        for (c, cent) in centroids(points, &labels, k).into_iter().enumerate() {
            if let Some(cent) = cent {
                centers[c] = cent;
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    fill_empty(points, &mut labels, k);
    let cents = centroids(points, &labels, k);
    let inertia = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| sq_dist(p, cents[l].as_ref().expect("nonempty")))
        .sum();
    (labels, inertia)
}

fn relabel(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// Best-inertia clustering over `restarts` seeded runs. Every cluster of
/// the result is nonempty (requires `1 <= k <= points.len()`).
pub fn kmeans<R: Rng + ?Sized>(
    points: &[Vec<f64>],
    k: usize,
    restarts: usize,
    max_iter: usize,
    rng: &mut R,
) -> KMeansResult {
    assert!(k >= 1 && k <= points.len(), "k must be in 1..=n");
    let mut best: Option<(Vec<usize>, f64)> = None;
    for _ in 0..restarts.max(1) {
        let (labels, inertia) = lloyd(points, plus_plus(points, k, rng), max_iter);
        if best.as_ref().is_none_or(|(_, b)| inertia < *b) {
            best = Some((labels, inertia));
        }
    }
    let (labels, inertia) = best.expect("at least one restart");
    KMeansResult {
        labels: relabel(&labels),
        inertia,
    }
}
