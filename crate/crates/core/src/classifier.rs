//! Multiset-NGD classification.
//!
//! An element `x` is assigned to the class `A` minimizing
//! `NGD(A ∪ {x}) − NGD(A)`. Leave-one-out cross-validation holds out each
//! member in turn, scoring it against its own class minus itself and
//! against every other full class.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::{ngd, DistanceError, NgdOptions};
use crate::snapshot::FrequencySnapshot;
use crate::term::{Term, TermError, TermMultiset};

/// Smallest class size for which leave-one-out never needs a one-term NGD.
pub const MIN_CLASS_SIZE: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifierError {
    #[error("class \"{label}\" has {size} member(s); at least {MIN_CLASS_SIZE} are required")]
    ClassTooSmall { label: String, size: usize },
    #[error("element \"{element}\" appears more than once (classes {labels:?})")]
    DuplicateElement { element: Term, labels: Vec<String> },
    #[error("duplicate class label \"{0}\"")]
    DuplicateLabel(String),
    #[error("no classes given")]
    NoClasses,
    #[error("class file: {0}")]
    Format(String),
    #[error("scoring \"{element}\" against class \"{label}\": {source}")]
    Distance {
        element: Term,
        label: String,
        #[source]
        source: DistanceError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassProfile {
    label: String,
    members: TermMultiset,
}

impl ClassProfile {
    pub fn new(label: impl Into<String>, members: Vec<Term>) -> Result<Self, ClassifierError> {
        let label = label.into();
        if members.len() < MIN_CLASS_SIZE {
            return Err(ClassifierError::ClassTooSmall {
                label,
                size: members.len(),
            });
        }
        let members = TermMultiset::new(members).expect("nonempty");
        Ok(ClassProfile { label, members })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn members(&self) -> &TermMultiset {
        &self.members
    }
}

/// Validated list of classes: distinct labels, every element in exactly one
/// class exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ClassFile", into = "ClassFile")]
pub struct ClassSet {
    classes: Vec<ClassProfile>,
}

#[derive(Serialize, Deserialize)]
struct ClassFile {
    classes: Vec<ClassDef>,
}

#[derive(Serialize, Deserialize)]
struct ClassDef {
    label: String,
    terms: Vec<String>,
}

impl TryFrom<ClassFile> for ClassSet {
    type Error = ClassifierError;

    fn try_from(file: ClassFile) -> Result<Self, Self::Error> {
        let classes = file
            .classes
            .into_iter()
            .map(|c| {
                let terms = c
                    .terms
                    .iter()
                    .map(|t| Term::new(t))
                    .collect::<Result<Vec<_>, TermError>>()
                    .map_err(|e| ClassifierError::Format(format!("class \"{}\": {e}", c.label)))?;
                ClassProfile::new(c.label, terms)
            })
            .collect::<Result<Vec<_>, _>>()?;
        ClassSet::new(classes)
    }
}

impl From<ClassSet> for ClassFile {
    fn from(set: ClassSet) -> Self {
        ClassFile {
            classes: set
                .classes
                .into_iter()
                .map(|c| ClassDef {
                    label: c.label,
                    terms: c.members.items().iter().map(|t| t.to_string()).collect(),
                })
                .collect(),
        }
    }
}

impl ClassSet {
    pub fn new(classes: Vec<ClassProfile>) -> Result<Self, ClassifierError> {
        if classes.is_empty() {
            return Err(ClassifierError::NoClasses);
        }
        let mut labels = BTreeSet::new();
        let mut owners: BTreeMap<&Term, Vec<String>> = BTreeMap::new();
        for c in &classes {
            if !labels.insert(c.label.as_str()) {
                return Err(ClassifierError::DuplicateLabel(c.label.clone()));
            }
            for t in c.members.items() {
                owners.entry(t).or_default().push(c.label.clone());
            }
        }
        if let Some((t, ls)) = owners.into_iter().find(|(_, ls)| ls.len() > 1) {
            return Err(ClassifierError::DuplicateElement {
                element: t.clone(),
                labels: ls,
            });
        }
        Ok(ClassSet { classes })
    }

    /// Parses `{"classes": [{"label": ..., "terms": [...]}, ...]}`.
    pub fn from_json(text: &str) -> Result<Self, ClassifierError> {
        let file: ClassFile =
            serde_json::from_str(text).map_err(|e| ClassifierError::Format(e.to_string()))?;
        ClassSet::try_from(file)
    }

    pub fn classes(&self) -> &[ClassProfile] {
        &self.classes
    }

    /// Total number of elements `n`.
    pub fn element_count(&self) -> usize {
        self.classes.iter().map(|c| c.members.len()).sum()
    }
}

/// Outcome for one element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub element: Term,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_label: Option<String>,
    pub label: String,
    /// `NGD(A ∪ {x}) − NGD(A)` per class label.
    pub scores: BTreeMap<String, f64>,
    /// More than one class attained the minimum score.
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub assignments: Vec<Assignment>,
    /// `confusion[true_label][chosen_label]`.
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    pub queries_used: usize,
}

fn pick(element: &Term, scores: BTreeMap<String, f64>) -> Assignment {
    let min = scores.values().copied().fold(f64::INFINITY, f64::min);
    let mut winners = scores.iter().filter(|(_, &s)| s == min).map(|(l, _)| l);
    // BTreeMap order: the first winner is the lexicographically smallest label.
    let label = winners.next().cloned().unwrap_or_default();
    let tie = winners.next().is_some();
    Assignment {
        element: element.clone(),
        true_label: None,
        label,
        scores,
        tie,
    }
}

fn distance_of(
    set: &TermMultiset,
    element: &Term,
    label: &str,
    snap: &FrequencySnapshot,
    opts: NgdOptions,
) -> Result<f64, ClassifierError> {
    ngd(set, snap, opts)
        .map(|d| d.value)
        .map_err(|source| ClassifierError::Distance {
            element: element.clone(),
            label: label.to_string(),
            source,
        })
}

/// Scores `x` against every class and picks the minimum; equal minima go
/// to the lexicographically smallest label and are flagged.
pub fn classify_element(
    x: &Term,
    classes: &[ClassProfile],
    snap: &FrequencySnapshot,
    opts: NgdOptions,
) -> Result<Assignment, ClassifierError> {
    let mut scores = BTreeMap::new();
    for c in classes {
        let with_x = distance_of(&c.members.with(x.clone()), x, &c.label, snap, opts)?;
        let base = distance_of(&c.members, x, &c.label, snap, opts)?;
        scores.insert(c.label.clone(), with_x - base);
    }
    Ok(pick(x, scores))
}

fn summarize(assignments: Vec<Assignment>, queries_used: usize) -> ClassificationResult {
    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut correct = 0;
    for a in &assignments {
        if let Some(t) = &a.true_label {
            *confusion
                .entry(t.clone())
                .or_default()
                .entry(a.label.clone())
                .or_default() += 1;
            if *t == a.label {
                correct += 1;
            }
        }
    }
    let total = assignments
        .iter()
        .filter(|a| a.true_label.is_some())
        .count();
    let accuracy = if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    };
    ClassificationResult {
        assignments,
        confusion,
        correct,
        total,
        accuracy,
        queries_used,
    }
}

/// Leave-one-out cross-validation over every member of every class.
/// `NGD(A)` of each full class is computed once and reused.
pub fn loocv(
    classes: &ClassSet,
    snap: &FrequencySnapshot,
    opts: NgdOptions,
) -> Result<ClassificationResult, ClassifierError> {
    let mut base = HashMap::new();
    for c in &classes.classes {
        let first = &c.members.items()[0];
        base.insert(
            c.label.as_str(),
            distance_of(&c.members, first, &c.label, snap, opts)?,
        );
    }
    let held_out: Vec<(&ClassProfile, &Term)> = classes
        .classes
        .iter()
        .flat_map(|c| c.members.items().iter().map(move |x| (c, x)))
        .collect();
    let assignments = held_out
        .par_iter()
        .map(|&(own, x)| {
            let mut scores = BTreeMap::new();
            for c in &classes.classes {
                let score = if c.label == own.label {
                    let rest = c.members.without_one(x).expect("member of its class");
                    base[c.label.as_str()] - distance_of(&rest, x, &c.label, snap, opts)?
                } else {
                    distance_of(&c.members.with(x.clone()), x, &c.label, snap, opts)?
                        - base[c.label.as_str()]
                };
                scores.insert(c.label.clone(), score);
            }
            let mut a = pick(x, scores);
            a.true_label = Some(own.label.clone());
            Ok(a)
        })
        .collect::<Result<Vec<_>, ClassifierError>>()?;
    Ok(summarize(assignments, loocv_queries(classes).len()))
}

/// Classifies elements that are not class members against the full classes.
pub fn classify_all(
    elements: &[Term],
    classes: &ClassSet,
    snap: &FrequencySnapshot,
    opts: NgdOptions,
) -> Result<ClassificationResult, ClassifierError> {
    let assignments = elements
        .par_iter()
        .map(|x| classify_element(x, &classes.classes, snap, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(summarize(
        assignments,
        classify_queries(elements, classes).len(),
    ))
}

fn singletons(classes: &ClassSet) -> impl Iterator<Item = TermMultiset> + '_ {
    classes.classes.iter().flat_map(|c| {
        c.members
            .items()
            .iter()
            .cloned()
            .map(TermMultiset::singleton)
    })
}

/// Distinct count queries a leave-one-out run needs: every singleton, every
/// full class, every class minus one member, and every class plus each
/// foreign element. That is `n·c + c + n` queries.
pub fn loocv_queries(classes: &ClassSet) -> BTreeSet<TermMultiset> {
    let mut out: BTreeSet<TermMultiset> = singletons(classes).collect();
    for c in &classes.classes {
        out.insert(c.members.clone());
        for x in c.members.items() {
            out.insert(c.members.without_one(x).expect("member"));
        }
        for other in &classes.classes {
            if other.label != c.label {
                for x in other.members.items() {
                    out.insert(c.members.with(x.clone()));
                }
            }
        }
    }
    out
}

/// Distinct count queries needed to classify `elements` against `classes`.
pub fn classify_queries(elements: &[Term], classes: &ClassSet) -> BTreeSet<TermMultiset> {
    let mut out: BTreeSet<TermMultiset> = singletons(classes).collect();
    for x in elements {
        out.insert(TermMultiset::singleton(x.clone()));
        for c in &classes.classes {
            out.insert(c.members.clone());
            out.insert(c.members.with(x.clone()));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryMode {
    PairwiseMatrix,
    Multiset,
    MultisetLoocv,
}

/// Number of engine queries an analysis of `n` elements in `c` classes needs.
pub fn query_budget(n: u64, c: u64, mode: QueryMode) -> u64 {
    match mode {
        QueryMode::PairwiseMatrix => (n * n - n) / 2 + n,
        QueryMode::Multiset => 2 * n * c + n,
        QueryMode::MultisetLoocv => n * c + c + n,
    }
}
