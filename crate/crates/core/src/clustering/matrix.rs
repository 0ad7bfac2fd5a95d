use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ClusterError;
use crate::distance::{ngd, NgdOptions};
use crate::snapshot::FrequencySnapshot;
use crate::term::{Term, TermMultiset};

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Upper-triangle entries `d[i][j]`, `i < j`.
    pub fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| self.get(i, j)))
    }

    /// Smallest and largest off-diagonal entry; `None` below 2×2.
    pub fn off_diagonal_range(&self) -> Option<(f64, f64)> {
        self.off_diagonal().fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }
}

/// Symmetric matrix of pairwise distances with its row/column labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct DistanceMatrix {
    labels: Vec<Term>,
    values: SquareMatrix,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    labels: Vec<Term>,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<MatrixRepr> for DistanceMatrix {
    type Error = ClusterError;

    fn try_from(r: MatrixRepr) -> Result<Self, Self::Error> {
        DistanceMatrix::from_rows(r.labels, r.rows)
    }
}

impl From<DistanceMatrix> for MatrixRepr {
    fn from(m: DistanceMatrix) -> Self {
        let rows = (0..m.len()).map(|i| m.values.row(i).to_vec()).collect();
        MatrixRepr {
            labels: m.labels,
            rows,
        }
    }
}

impl DistanceMatrix {
    pub fn new(labels: Vec<Term>, values: SquareMatrix) -> Result<Self, ClusterError> {
        let n = values.n();
        if n == 0 {
            return Err(ClusterError::EmptyMatrix);
        }
        if labels.len() != n {
            return Err(ClusterError::Shape(format!(
                "{} labels for a {n}×{n} matrix",
                labels.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = values.get(i, j);
                if !(v.is_finite() && v >= 0.0) {
                    return Err(ClusterError::InvalidEntry { i, j, value: v });
                }
                if v != values.get(j, i) {
                    return Err(ClusterError::Asymmetric { i, j });
                }
            }
        }
        Ok(DistanceMatrix { labels, values })
    }

    pub fn from_rows(labels: Vec<Term>, rows: Vec<Vec<f64>>) -> Result<Self, ClusterError> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(ClusterError::Shape(format!(
                "row of length {} in a {n}-row matrix",
                bad.len()
            )));
        }
        let values = SquareMatrix::from_fn(n, |i, j| rows[i][j]);
        DistanceMatrix::new(labels, values)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Term] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn values(&self) -> &SquareMatrix {
        &self.values
    }

    /// TSV with a header row of labels (first cell empty) and one labelled
    /// row per term; values with 12 significant digits.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for l in &self.labels {
            out.push('\t');
            out.push_str(l.as_str());
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l.as_str());
            for j in 0..self.len() {
                out.push('\t');
                out.push_str(&format_significant(self.get(i, j), 12));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, ClusterError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(ClusterError::EmptyMatrix)?;
        let mut cells = header.split('\t');
        if cells.next().map(str::trim) != Some("") {
            return Err(ClusterError::Tsv {
                line: 1,
                reason: "header must start with an empty cell".into(),
            });
        }
        let labels = cells
            .map(Term::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ClusterError::Tsv {
                line: 1,
                reason: e.to_string(),
            })?;
        let mut rows = Vec::new();
        for (i, line) in lines {
            let mut cells = line.split('\t');
            let label = cells.next().unwrap_or_default();
            let expected = labels.get(rows.len());
            if expected.map(Term::as_str) != Some(label.trim())
                && Term::new(label).ok().as_ref() != expected
            {
                return Err(ClusterError::Tsv {
                    line: i + 1,
                    reason: format!("row label {label:?} does not match the header"),
                });
            }
            let row = cells
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ClusterError::Tsv {
                    line: i + 1,
                    reason: e.to_string(),
                })?;
            rows.push(row);
        }
        if rows.len() != labels.len() {
            return Err(ClusterError::Shape(format!(
                "{} labels but {} rows",
                labels.len(),
                rows.len()
            )));
        }
        DistanceMatrix::from_rows(labels, rows)
    }
}

/// Decimal rendering of `v` with `digits` significant digits.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 {
            "0".to_string()
        } else {
            v.to_string()
        };
    }
    // Round first so that e.g. 9.9999999999996 moves to the next decade.
    let sci = format!("{:.*e}", digits - 1, v);
    let exp: i32 = sci
        .split('e')
        .nth(1)
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let mut s = String::new();
    write!(s, "{:.*}", decimals, v).expect("write to string");
    s
}

/// Queries a pairwise matrix needs: every singleton and every unordered
/// pair, `(n² − n)/2 + n` in total.
pub fn pairwise_queries(terms: &[Term]) -> Vec<TermMultiset> {
    let mut out = Vec::new();
    for (i, a) in terms.iter().enumerate() {
        out.push(TermMultiset::singleton(a.clone()));
        for b in &terms[i + 1..] {
            out.push(TermMultiset::pair(a.clone(), b.clone()));
        }
    }
    out
}

/// Pairwise NGD matrix: `(n² − n)/2` pair evaluations filled symmetrically
/// plus `n` diagonal evaluations `NGD(x, x)`.
///
/// The diagonal uses the count of `{x, x}` when the snapshot has it (engines
/// may report something other than `f(x)`), and `f(x)` otherwise.
pub fn build_matrix(
    terms: &[Term],
    snap: &FrequencySnapshot,
    opts: NgdOptions,
) -> Result<DistanceMatrix, ClusterError> {
    let n = terms.len();
    if n == 0 {
        return Err(ClusterError::EmptyMatrix);
    }
    let pair_distance = |a: &Term, b: &Term| {
        ngd(&TermMultiset::pair(a.clone(), b.clone()), snap, opts)
            .map(|d| d.value)
            .map_err(|source| ClusterError::Distance {
                pair: (a.clone(), b.clone()),
                source,
            })
    };
    let mut values = SquareMatrix::zeros(n);
    for i in 0..n {
        let x = &terms[i];
        let doubled = TermMultiset::pair(x.clone(), x.clone());
        let diag = if snap.count(&doubled).is_some() {
            pair_distance(x, x)?
        } else {
            let single = TermMultiset::singleton(x.clone());
            let f = snap.count(&single).ok_or_else(|| ClusterError::Distance {
                pair: (x.clone(), x.clone()),
                source: crate::distance::DistanceError::MissingCount(single.clone()),
            })?;
            let local = FrequencySnapshot::builder(snap.source_id())
                .count(single, f)
                .count(doubled.clone(), f)
                .normalizer(snap.normalizer())
                .build()
                .expect("normalizer already validated");
            ngd(&doubled, &local, opts)
                .map(|d| d.value)
                .map_err(|source| ClusterError::Distance {
                    pair: (x.clone(), x.clone()),
                    source,
                })?
        };
        values.set(i, i, diag);
        for (j, y) in terms.iter().enumerate().skip(i + 1) {
            let d = pair_distance(x, y)?;
            values.set(i, j, d);
            values.set(j, i, d);
        }
    }
    DistanceMatrix::new(terms.to_vec(), values)
}
