//! Search terms and finite multisets of search terms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Separator used when a multiset is rendered as a conjunctive query.
pub const QUERY_SEPARATOR: &str = " AND ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("search term is empty")]
    EmptyTerm,
    #[error("term multiset is empty")]
    EmptyMultiset,
}

/// A single search term in canonical form: trimmed, case-folded, with
/// internal whitespace collapsed to single spaces.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Term(String);

impl Term {
    pub fn new(text: &str) -> Result<Self, TermError> {
        let canonical = text
            .split_whitespace()
            .map(str::to_lowercase)
            .collect::<Vec<_>>()
            .join(" ");
        if canonical.is_empty() {
            return Err(TermError::EmptyTerm);
        }
        Ok(Term(canonical))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Term {
    type Err = TermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Term::new(s)
    }
}

impl TryFrom<String> for Term {
    type Error = TermError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Term::new(&value)
    }
}

impl From<Term> for String {
    fn from(t: Term) -> String {
        t.0
    }
}

/// A finite, nonempty multiset of terms kept in canonical (sorted) order,
/// so equal multisets compare equal regardless of construction order.
///
/// Multiplicity is significant: `{red, red}` and `{red}` are distinct
/// queries because search engines report different counts for them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TermMultiset(Vec<Term>);

impl TermMultiset {
    pub fn new<I: IntoIterator<Item = Term>>(items: I) -> Result<Self, TermError> {
        let mut items: Vec<Term> = items.into_iter().collect();
        if items.is_empty() {
            return Err(TermError::EmptyMultiset);
        }
        items.sort();
        Ok(TermMultiset(items))
    }

    pub fn singleton(term: Term) -> Self {
        TermMultiset(vec![term])
    }

    pub fn pair(a: Term, b: Term) -> Self {
        let mut items = vec![a, b];
        items.sort();
        TermMultiset(items)
    }

    /// Parses whitespace-trimmed texts into terms and builds the multiset.
    pub fn from_texts<S: AsRef<str>>(texts: &[S]) -> Result<Self, TermError> {
        let terms = texts
            .iter()
            .map(|t| Term::new(t.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        TermMultiset::new(terms)
    }

    /// Cardinality counting multiplicity.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn items(&self) -> &[Term] {
        &self.0
    }

    /// Distinct terms in canonical order.
    pub fn distinct(&self) -> impl Iterator<Item = &Term> {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, t)| *i == 0 || self.0[i - 1] != **t)
            .map(|(_, t)| t)
    }

    pub fn contains(&self, term: &Term) -> bool {
        self.0.binary_search(term).is_ok()
    }

    /// Multiset sum `self ∪ {term}`.
    pub fn with(&self, term: Term) -> Self {
        let mut items = self.0.clone();
        let at = items.partition_point(|t| *t <= term);
        items.insert(at, term);
        TermMultiset(items)
    }

    /// Removes one occurrence of `term`. Returns `None` if the term is absent
    /// or the result would be empty.
    pub fn without_one(&self, term: &Term) -> Option<Self> {
        let at = self.0.binary_search(term).ok()?;
        if self.0.len() == 1 {
            return None;
        }
        let mut items = self.0.clone();
        items.remove(at);
        Some(TermMultiset(items))
    }

    /// Canonical query string: terms joined by ` AND ` in canonical order.
    pub fn query_string(&self) -> String {
        self.0
            .iter()
            .map(Term::as_str)
            .collect::<Vec<_>>()
            .join(QUERY_SEPARATOR)
    }

    pub fn parse_query(query: &str) -> Result<Self, TermError> {
        let terms = query
            .split(QUERY_SEPARATOR)
            .map(Term::new)
            .collect::<Result<Vec<_>, _>>()?;
        TermMultiset::new(terms)
    }
}

impl fmt::Display for TermMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.query_string())
    }
}

impl FromStr for TermMultiset {
    type Err = TermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TermMultiset::parse_query(s)
    }
}

impl TryFrom<String> for TermMultiset {
    type Error = TermError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        TermMultiset::parse_query(&value)
    }
}

impl From<TermMultiset> for String {
    fn from(m: TermMultiset) -> String {
        m.query_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(s: &str) -> Term {
        Term::new(s).unwrap()
    }

    #[test]
    fn canonical_form_folds_case_and_whitespace() {
        assert_eq!(t("  New\t York "), t("new york"));
        assert_eq!(t("Shakespeare").as_str(), "shakespeare");
        assert_eq!(Term::new("   \n"), Err(TermError::EmptyTerm));
    }

    #[test]
    fn multiset_order_is_canonical() {
        let a = TermMultiset::from_texts(&["Shakespeare", "Macbeth"]).unwrap();
        let b = TermMultiset::from_texts(&["macbeth", "SHAKESPEARE"]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.query_string(), "macbeth AND shakespeare");
        assert_eq!(TermMultiset::new(Vec::new()), Err(TermError::EmptyMultiset));
    }

    #[test]
    fn multiplicity_is_kept() {
        let red3 = TermMultiset::from_texts(&["red", "red", "red"]).unwrap();
        let red1 = TermMultiset::from_texts(&["red"]).unwrap();
        assert_ne!(red3, red1);
        assert_eq!(red3.len(), 3);
        assert_eq!(red3.distinct().count(), 1);
        assert_eq!(red3.without_one(&t("red")).unwrap().len(), 2);
        assert!(red1.without_one(&t("red")).is_none());
        assert!(red3.without_one(&t("blue")).is_none());
    }

    #[test]
    fn with_keeps_order() {
        let x = TermMultiset::from_texts(&["b", "d"]).unwrap();
        assert_eq!(x.with(t("c")).query_string(), "b AND c AND d");
        assert_eq!(x.with(t("b")).query_string(), "b AND b AND d");
    }

    proptest! {
        #[test]
        fn query_string_parses_back(words in prop::collection::vec("[a-z]{1,6}( [a-z]{1,4})?", 1..6)) {
            let m = TermMultiset::from_texts(&words).unwrap();
            prop_assert_eq!(TermMultiset::parse_query(&m.query_string()).unwrap(), m);
        }
    }
}
