//! Reports: a request, the counts it was computed from, and the result.
//!
//! [`execute`] is a pure function of the request and its provenance, so a
//! saved JSON report can be recomputed offline by [`replay`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ngd_core::classifier::{classify_all, loocv, query_budget, Assignment};
use ngd_core::clustering::gap::DEFAULT_REFERENCES;
use ngd_core::clustering::{build_matrix, gap_statistic};
use ngd_core::providers::ngram::MalformedLine;
use ngd_core::{
    ngd, ClassSet, ClassificationResult, DistanceMatrix, FrequencySnapshot, GapReport, Ngd,
    NgdOptions, QueryMode, Term, TermMultiset,
};
use serde::{Deserialize, Serialize};

use crate::config::OutputFormat;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifyMode {
    Loocv,
    Elements(Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterInput {
    Matrix(DistanceMatrix),
    Terms(Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramFile {
    pub path: String,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Request {
    Ngd {
        terms: TermMultiset,
    },
    Matrix {
        terms: Vec<Term>,
    },
    Classify {
        classes: ClassSet,
        mode: ClassifyMode,
    },
    Cluster {
        input: ClusterInput,
        k_max: usize,
        references: usize,
    },
    Ingest {
        paths: Vec<String>,
        documents: usize,
    },
    Ngram {
        terms: Vec<Term>,
        files: Vec<NgramFile>,
        lines_read: u64,
        skipped: Vec<MalformedLine>,
    },
    Budget {
        n: u64,
        c: u64,
    },
}

impl Request {
    pub fn command(&self) -> &'static str {
        match self {
            Request::Ngd { .. } => "ngd",
            Request::Matrix { .. } => "matrix",
            Request::Classify { .. } => "classify",
            Request::Cluster { .. } => "cluster",
            Request::Ingest { .. } => "ingest",
            Request::Ngram { .. } => "ngram",
            Request::Budget { .. } => "budget",
        }
    }
}

/// What a result was computed from. The snapshot carries the source id,
/// `N`, `M`, `α` and every count that was read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<FrequencySnapshot>,
    pub options: NgdOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub pairwise: u64,
    pub multiset: u64,
    pub loocv: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    pub labels: Vec<Term>,
    pub gap: GapReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub documents: usize,
    pub indexed_pages: Option<u64>,
    pub normalizer: u64,
    pub vocabulary: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ngd(Ngd),
    Matrix(DistanceMatrix),
    Classification(ClassificationResult),
    Cluster(ClusterResult),
    Ingest(IngestSummary),
    Budget(Budget),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub request: Request,
    pub provenance: Provenance,
    pub result: Outcome,
}

fn snapshot(p: &Provenance) -> Result<&FrequencySnapshot, CliError> {
    p.snapshot
        .as_ref()
        .ok_or_else(|| CliError::Data("report has no embedded counts".into()))
}

/// Computes the result of `request` from `provenance` alone.
pub fn execute(request: Request, provenance: Provenance) -> Result<Report, CliError> {
    let opts = provenance.options;
    let result = match &request {
        Request::Ngd { terms } => Outcome::Ngd(ngd(terms, snapshot(&provenance)?, opts)?),
        Request::Matrix { terms } | Request::Ngram { terms, .. } => {
            Outcome::Matrix(build_matrix(terms, snapshot(&provenance)?, opts)?)
        }
        Request::Classify { classes, mode } => {
            let snap = snapshot(&provenance)?;
            Outcome::Classification(match mode {
                ClassifyMode::Loocv => loocv(classes, snap, opts)?,
                ClassifyMode::Elements(elements) => classify_all(elements, classes, snap, opts)?,
            })
        }
        Request::Cluster {
            input,
            k_max,
            references,
        } => {
            let seed = provenance
                .seed
                .ok_or_else(|| CliError::Data("cluster report has no seed".into()))?;
            let matrix = match input {
                ClusterInput::Matrix(m) => m.clone(),
                ClusterInput::Terms(terms) => build_matrix(terms, snapshot(&provenance)?, opts)?,
            };
            let gap = gap_statistic(&matrix, *k_max, *references, seed)?;
            Outcome::Cluster(ClusterResult {
                labels: matrix.labels().to_vec(),
                gap,
            })
        }
        Request::Ingest { documents, .. } => {
            let snap = snapshot(&provenance)?;
            Outcome::Ingest(IngestSummary {
                documents: *documents,
                indexed_pages: snap.page_total(),
                normalizer: snap.normalizer(),
                vocabulary: snap.len(),
            })
        }
        Request::Budget { n, c } => Outcome::Budget(Budget {
            pairwise: query_budget(*n, *c, QueryMode::PairwiseMatrix),
            multiset: query_budget(*n, *c, QueryMode::Multiset),
            loocv: query_budget(*n, *c, QueryMode::MultisetLoocv),
        }),
    };
    Ok(Report {
        command: request.command().to_string(),
        request,
        provenance,
        result,
    })
}

/// Recomputes a saved JSON report and returns it in canonical JSON form.
pub fn replay(json: &str) -> Result<String, CliError> {
    let saved: Report =
        serde_json::from_str(json).map_err(|e| CliError::Data(format!("report: {e}")))?;
    let fresh = execute(saved.request, saved.provenance)?;
    Ok(to_json(&fresh))
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

pub const DEFAULT_K_MAX: usize = 5;
pub const DEFAULT_B: usize = DEFAULT_REFERENCES;

fn fmt_value(v: f64) -> String {
    format!("{v:.3}")
}

fn source_line(p: &Provenance) -> String {
    match &p.snapshot {
        Some(s) => {
            let mut line = format!("source {}  N {}", s.source_id(), s.normalizer());
            if let Some(m) = s.page_total() {
                let _ = write!(line, "  M {m}");
            }
            line
        }
        None => "source none".to_string(),
    }
}

fn assignment_rows(out: &mut String, assignments: &[Assignment], tsv: bool) {
    for a in assignments {
        let truth = a.true_label.as_deref().unwrap_or("-");
        if tsv {
            let scores: Vec<String> = a.scores.iter().map(|(l, s)| format!("{l}={s}")).collect();
            let _ = writeln!(
                out,
                "{}\t{truth}\t{}\t{}",
                a.element,
                a.label,
                scores.join(",")
            );
        } else {
            let mark = if a.true_label.as_deref().is_some_and(|t| t != a.label) {
                "  *"
            } else {
                ""
            };
            let tie = if a.tie { " (tie)" } else { "" };
            let _ = writeln!(
                out,
                "{:<24} {:<16} {}{tie}{mark}",
                a.element.as_str(),
                truth,
                a.label
            );
        }
    }
}

fn members<'a>(
    labels: &'a [Term],
    assignment: &ngd_core::ClusterAssignment,
) -> BTreeMap<usize, Vec<&'a str>> {
    let mut out: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for (t, &c) in labels.iter().zip(&assignment.labels) {
        out.entry(c).or_default().push(t.as_str());
    }
    out
}

/// Renders `report` in `format`.
pub fn render(report: &Report, format: OutputFormat) -> String {
    if format == OutputFormat::Json {
        return to_json(report);
    }
    let tsv = format == OutputFormat::Tsv;
    let mut out = String::new();
    match &report.result {
        Outcome::Ngd(d) => {
            let note = d.note.map(|n| format!("{n:?}")).unwrap_or_default();
            if tsv {
                let _ = writeln!(out, "{}\t{}\t{note}", query_of(&report.request), d.value);
            } else {
                let _ = writeln!(
                    out,
                    "{}{}",
                    fmt_value(d.value),
                    if note.is_empty() {
                        String::new()
                    } else {
                        format!(" ({note})")
                    }
                );
            }
        }
        Outcome::Matrix(m) => out.push_str(&m.to_tsv()),
        Outcome::Classification(r) => {
            assignment_rows(&mut out, &r.assignments, tsv);
            if !tsv {
                let _ = writeln!(
                    out,
                    "accuracy {}/{} = {:.3}",
                    r.correct, r.total, r.accuracy
                );
                let _ = writeln!(out, "queries {}", r.queries_used);
            }
        }
        Outcome::Cluster(c) => {
            if tsv {
                let _ = writeln!(out, "k\tW_k\tlog_W_k\tref_log_W\tgap\tsigma\ts");
            } else {
                let _ = writeln!(out, "{:>3} {:>12} {:>10} {:>10}", "k", "W_k", "Gap", "s_k");
            }
            for r in &c.gap.rows {
                if tsv {
                    let _ = writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        r.k, r.w_k, r.log_w_k, r.reference_log_w, r.gap, r.sigma, r.s
                    );
                } else {
                    let _ = writeln!(
                        out,
                        "{:>3} {:>12.6} {:>10.4} {:>10.4}",
                        r.k, r.w_k, r.gap, r.s
                    );
                }
            }
            if !tsv {
                let _ = writeln!(
                    out,
                    "chosen k {}  global maximum k {}",
                    c.gap.chosen_k, c.gap.global_max_k
                );
                if let Some(row) = c.gap.row(c.gap.chosen_k) {
                    for (id, terms) in members(&c.labels, &row.assignment) {
                        let _ = writeln!(out, "cluster {id}: {}", terms.join(" "));
                    }
                }
            }
        }
        Outcome::Ingest(s) => {
            let pages = s
                .indexed_pages
                .map(|m| m.to_string())
                .unwrap_or_else(|| "-".into());
            if tsv {
                let _ = writeln!(
                    out,
                    "documents\t{}\nindexed_pages\t{pages}\nnormalizer\t{}\nvocabulary\t{}",
                    s.documents, s.normalizer, s.vocabulary
                );
            } else {
                let _ = writeln!(
                    out,
                    "documents {}  indexed pages {pages}  N {}  vocabulary {}",
                    s.documents, s.normalizer, s.vocabulary
                );
            }
        }
        Outcome::Budget(b) => {
            if tsv {
                let _ = writeln!(
                    out,
                    "pairwise\t{}\nmultiset\t{}\nloocv\t{}",
                    b.pairwise, b.multiset, b.loocv
                );
            } else {
                let _ = writeln!(
                    out,
                    "pairwise={} multiset={} loocv={}",
                    b.pairwise, b.multiset, b.loocv
                );
            }
        }
    }
    if format == OutputFormat::Text && report.provenance.snapshot.is_some() {
        out.push_str(&source_line(&report.provenance));
        out.push('\n');
    }
    out
}

fn query_of(r: &Request) -> String {
    match r {
        Request::Ngd { terms } => terms.query_string(),
        _ => String::new(),
    }
}
