//! Google probability, Google code and the normalized Google distance.
//!
//! All logarithms are binary. Every function here is a pure function of a
//! [`FrequencySnapshot`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::snapshot::FrequencySnapshot;
use crate::term::{Term, TermMultiset};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistanceError {
    #[error("no count for query \"{0}\"")]
    MissingCount(TermMultiset),
    #[error("normalizer N={normalizer} is smaller than count {count} of \"{query}\"")]
    InvalidNormalizer {
        normalizer: u64,
        query: TermMultiset,
        count: u64,
    },
    #[error("distance needs at least two terms, got {0}")]
    TooFewTerms(usize),
}

/// Which code length normalizes the distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorVariant {
    /// `max_{x∈X} G(x)`; range `[0, |X|-1]`.
    #[default]
    MaxSingleton,
    /// `max_{x∈X} G(X∖{x})`; range `[0, 1]`.
    MaxLeaveOneOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NgdOptions {
    pub denominator_variant: DenominatorVariant,
    /// Report 0 instead of a negative value when the conjunctive count
    /// exceeds the largest singleton count.
    pub clamp_negative_numerator: bool,
}

impl Default for NgdOptions {
    fn default() -> Self {
        NgdOptions {
            denominator_variant: DenominatorVariant::MaxSingleton,
            clamp_negative_numerator: true,
        }
    }
}

/// Special case that determined an [`Ngd`] value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NgdNote {
    /// `f(X) = 0` or some `f(x) = 0`: the value is the top of the range.
    ZeroCount,
    /// The numerator was negative and was clamped to 0.
    Clamped,
    /// The denominator was 0 (all mass on one term); the value is 0.
    DegenerateDenominator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ngd {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<NgdNote>,
}

impl Ngd {
    pub fn is_clamped(&self) -> bool {
        self.note == Some(NgdNote::Clamped)
    }
}

fn lookup(query: &TermMultiset, snap: &FrequencySnapshot) -> Result<u64, DistanceError> {
    let count = snap
        .count(query)
        .ok_or_else(|| DistanceError::MissingCount(query.clone()))?;
    if count > snap.normalizer() {
        return Err(DistanceError::InvalidNormalizer {
            normalizer: snap.normalizer(),
            query: query.clone(),
            count,
        });
    }
    Ok(count)
}

/// `g(X) = f(X) / N`.
pub fn google_probability(
    x: &TermMultiset,
    snap: &FrequencySnapshot,
) -> Result<f64, DistanceError> {
    let f = lookup(x, snap)?;
    Ok(f as f64 / snap.normalizer() as f64)
}

/// `G(X) = log N − log f(X)` in bits, or `+∞` when `f(X) = 0`.
pub fn google_code(x: &TermMultiset, snap: &FrequencySnapshot) -> Result<f64, DistanceError> {
    let f = lookup(x, snap)?;
    Ok(code_length(f, snap.normalizer()))
}

fn code_length(count: u64, n: u64) -> f64 {
    if count == 0 {
        f64::INFINITY
    } else {
        (n as f64).log2() - (count as f64).log2()
    }
}

/// Normalized Google distance of a multiset of at least two terms.
pub fn ngd(
    x: &TermMultiset,
    snap: &FrequencySnapshot,
    opts: NgdOptions,
) -> Result<Ngd, DistanceError> {
    if x.len() < 2 {
        return Err(DistanceError::TooFewTerms(x.len()));
    }
    let singles = x
        .distinct()
        .map(|t| lookup(&TermMultiset::singleton(t.clone()), snap))
        .collect::<Result<Vec<_>, _>>()?;
    let joint = lookup(x, snap)?;
    let leave_one_out = match opts.denominator_variant {
        DenominatorVariant::MaxSingleton => Vec::new(),
        DenominatorVariant::MaxLeaveOneOut => x
            .distinct()
            .filter_map(|t| x.without_one(t))
            .map(|rest| lookup(&rest, snap))
            .collect::<Result<Vec<_>, _>>()?,
    };

    let top_of_range = match opts.denominator_variant {
        DenominatorVariant::MaxSingleton => (x.len() - 1) as f64,
        DenominatorVariant::MaxLeaveOneOut => 1.0,
    };
    let min_single = *singles.iter().min().expect("nonempty multiset");
    let max_single = *singles.iter().max().expect("nonempty multiset");
    if joint == 0 || min_single == 0 {
        return Ok(Ngd {
            value: top_of_range,
            note: Some(NgdNote::ZeroCount),
        });
    }

    let n = snap.normalizer();
    let numerator = (max_single as f64).log2() - (joint as f64).log2();
    let denominator = match opts.denominator_variant {
        DenominatorVariant::MaxSingleton => code_length(min_single, n),
        DenominatorVariant::MaxLeaveOneOut => leave_one_out
            .iter()
            .map(|&c| code_length(c, n))
            .fold(f64::NEG_INFINITY, f64::max),
    };
    if denominator <= 0.0 {
        return Ok(Ngd {
            value: 0.0,
            note: Some(NgdNote::DegenerateDenominator),
        });
    }
    if numerator < 0.0 && opts.clamp_negative_numerator {
        return Ok(Ngd {
            value: 0.0,
            note: Some(NgdNote::Clamped),
        });
    }
    Ok(Ngd {
        value: numerator / denominator,
        note: None,
    })
}

/// Every count [`ngd`] reads for `x` under `opts`.
pub fn ngd_queries(x: &TermMultiset, opts: NgdOptions) -> Vec<TermMultiset> {
    let mut out: Vec<TermMultiset> = x
        .distinct()
        .map(|t| TermMultiset::singleton(t.clone()))
        .collect();
    out.push(x.clone());
    if opts.denominator_variant == DenominatorVariant::MaxLeaveOneOut {
        out.extend(x.distinct().filter_map(|t| x.without_one(t)));
    }
    out.sort();
    out.dedup();
    out
}

/// Pairwise NGD; identical to [`ngd`] on `{x, y}` with default options.
pub fn ngd_pairwise(x: &Term, y: &Term, snap: &FrequencySnapshot) -> Result<Ngd, DistanceError> {
    ngd(
        &TermMultiset::pair(x.clone(), y.clone()),
        snap,
        NgdOptions::default(),
    )
}
