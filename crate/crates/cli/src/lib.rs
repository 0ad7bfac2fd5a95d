//! The `ngd` command line.
//!
//! Every subcommand gathers the counts it needs into a snapshot, computes a
//! [`report::Report`] from that snapshot alone, and renders it. Exit status
//! is 0 on success, 1 for usage errors, 2 for provider or transport
//! failures and 3 for inconsistent data; failures print one
//! `error kind=... code=... message="..."` line on stderr.

pub mod config;
pub mod error;
pub mod report;
pub mod sources;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ngd_core::classifier::{classify_queries, loocv_queries};
use ngd_core::clustering::pairwise_queries;
use ngd_core::providers::ProviderKind;
use ngd_core::{ClassSet, DenominatorVariant, FrequencySnapshot, Term, TermMultiset};

use config::{OutputFormat, RunConfig};
use error::CliError;
use report::{execute, render, ClassifyMode, ClusterInput, NgramFile, Provenance, Request};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProviderArg {
    /// Cached counts only; never touches the network.
    Cache,
    /// Search engine JSON API.
    Api,
    /// Search engine result pages.
    Scrape,
    /// Local document corpus.
    Corpus,
    /// Google Books 1-gram and 5-gram files.
    Ngram,
}

impl From<ProviderArg> for ProviderKind {
    fn from(p: ProviderArg) -> Self {
        match p {
            ProviderArg::Cache => ProviderKind::CacheOnly,
            ProviderArg::Api => ProviderKind::SearchApi,
            ProviderArg::Scrape => ProviderKind::SearchScrape,
            ProviderArg::Corpus => ProviderKind::LocalCorpus,
            ProviderArg::Ngram => ProviderKind::NgramFiles,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Normalize by the largest singleton code (range 0 to |X|-1).
    MaxSingleton,
    /// Normalize by the largest leave-one-out code (range 0 to 1).
    LeaveOneOut,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    provider: Option<ProviderArg>,
    /// Source id that counts are recorded under.
    #[arg(long, global = true)]
    source: Option<String>,
    /// Search URL template with `{query}` (and `{key}`) placeholders.
    #[arg(long, global = true)]
    endpoint: Option<String>,
    /// Environment variable holding the search API key.
    #[arg(long, global = true, value_name = "VAR")]
    api_key_env: Option<String>,
    /// Live queries allowed per UTC day, counted from the cache.
    #[arg(long, global = true, value_name = "N")]
    daily_budget: Option<u32>,
    /// Corpus directory or JSON-lines file (repeatable).
    #[arg(long, global = true, value_name = "PATH")]
    corpus: Vec<PathBuf>,
    /// Query cache file.
    #[arg(long, global = true, value_name = "FILE")]
    cache: Option<PathBuf>,
    /// Normalizer N.
    #[arg(long = "normalizer", short = 'N', global = true, value_name = "N")]
    normalizer: Option<u64>,
    /// Page total M (N = alpha * M when N is not given).
    #[arg(long, global = true, value_name = "M")]
    pages: Option<u64>,
    /// Terms per page alpha.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,
    /// Report negative numerators instead of clamping them to 0.
    #[arg(long, global = true)]
    no_clamp: bool,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Master seed for clustering and reference matrices.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Parser)]
#[command(
    name = "ngd",
    version,
    about = "Normalized Google distance between search terms"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    /// Terms of a multiset distance (same as the `ngd` subcommand).
    #[arg(value_name = "TERM")]
    terms: Vec<String>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distance of a multiset of two or more terms.
    Ngd {
        #[arg(required = true, num_args = 2.., value_name = "TERM")]
        terms: Vec<String>,
    },
    /// Pairwise distance matrix of the terms in a file.
    Matrix { termfile: PathBuf },
    /// Classify terms against the classes of a JSON class file.
    Classify {
        classfile: PathBuf,
        /// Leave-one-out cross-validation over the class members.
        #[arg(long)]
        loocv: bool,
        /// File of terms to classify.
        #[arg(long, value_name = "FILE")]
        terms: Option<PathBuf>,
        /// Terms to classify.
        #[arg(value_name = "TERM")]
        elements: Vec<String>,
    },
    /// Spectral clustering with the gap statistic over a matrix TSV or a term file.
    Cluster {
        input: PathBuf,
        /// Largest k considered (default: min(5, n-1)).
        #[arg(long)]
        kmax: Option<usize>,
        /// Number of reference matrices.
        #[arg(long = "references", short = 'B', default_value_t = report::DEFAULT_B)]
        references: usize,
    },
    /// Index a corpus and summarize it.
    Ingest {
        #[arg(required = true)]
        corpus: Vec<PathBuf>,
    },
    /// Pairwise matrix from n-gram files: `ngram FILE... TERMFILE`.
    Ngram {
        #[arg(required = true, num_args = 3.., value_name = "PATH")]
        paths: Vec<PathBuf>,
    },
    /// Query budgets for n elements in c classes.
    Budget { n: u64, c: u64 },
    /// Recompute a JSON report from its embedded counts and seed.
    Replay { report: PathBuf },
}

fn resolve_config(g: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = g.provider {
        cfg.provider.kind = p.into();
    } else if !g.corpus.is_empty() && cfg.provider.kind == ProviderKind::CacheOnly {
        cfg.provider.kind = ProviderKind::LocalCorpus;
    }
    if let Some(s) = &g.source {
        cfg.provider.source_id = Some(s.clone());
    }
    if let Some(e) = &g.endpoint {
        cfg.provider.endpoint = Some(e.clone());
    }
    if let Some(v) = &g.api_key_env {
        cfg.provider.api_key_env = Some(v.clone());
    }
    if let Some(b) = g.daily_budget {
        cfg.provider.daily_budget = Some(b);
    }
    if !g.corpus.is_empty() {
        cfg.provider.paths = g.corpus.clone();
    }
    if let Some(c) = &g.cache {
        cfg.cache = Some(c.clone());
    }
    if let Some(n) = g.normalizer {
        cfg.normalizer_n = Some(n);
    }
    if let Some(m) = g.pages {
        cfg.page_total_m = Some(m);
    }
    if let Some(a) = g.alpha {
        cfg.terms_per_page_alpha = Some(a);
    }
    if let Some(v) = g.variant {
        cfg.options.denominator_variant = match v {
            VariantArg::MaxSingleton => DenominatorVariant::MaxSingleton,
            VariantArg::LeaveOneOut => DenominatorVariant::MaxLeaveOneOut,
        };
    }
    if g.no_clamp {
        cfg.options.clamp_negative_numerator = false;
    }
    if let Some(f) = g.format {
        cfg.format = f;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => {
            CliError::Usage(format!("file not found: {}", path.display()))
        }
        _ => CliError::Data(format!("{}: {e}", path.display())),
    })
}

/// One term per line; blank lines are skipped.
pub fn parse_termfile(text: &str) -> Result<Vec<Term>, CliError> {
    let mut terms: Vec<Term> = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let t = Term::new(line)?;
        if terms.contains(&t) {
            return Err(CliError::Usage(format!("duplicate term \"{t}\"")));
        }
        terms.push(t);
    }
    Ok(terms)
}

fn read_terms(path: &Path) -> Result<Vec<Term>, CliError> {
    parse_termfile(&read_input(path)?)
}

fn provenance(cfg: &RunConfig, snapshot: Option<FrequencySnapshot>, seed: bool) -> Provenance {
    Provenance {
        snapshot,
        options: cfg.options,
        seed: seed.then_some(cfg.seed),
    }
}

fn multiset(terms: &[String]) -> Result<TermMultiset, CliError> {
    if terms.len() < 2 {
        return Err(CliError::Usage(
            "a distance needs at least two terms".into(),
        ));
    }
    Ok(TermMultiset::from_texts(terms)?)
}

fn ingest(cfg: &mut RunConfig, corpus: Vec<PathBuf>) -> Result<report::Report, CliError> {
    cfg.provider.paths = corpus;
    let index = sources::corpus_index(cfg)?;
    let snapshot =
        FrequencySnapshot::builder(ngd_core::providers::CountProvider::source_id(&index))
            .counts(
                index
                    .vocabulary()
                    .map(|(t, c)| (TermMultiset::singleton(t.clone()), c)),
            )
            .normalizer(cfg.normalizer_n.unwrap_or(index.normalizer()))
            .page_total(Some(index.doc_total()))
            .terms_per_page(cfg.terms_per_page_alpha)
            .build()?;
    let request = Request::Ingest {
        paths: cfg
            .provider
            .paths
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
        documents: index.documents(),
    };
    execute(request, provenance(cfg, Some(snapshot), false))
}

fn ngram(cfg: &RunConfig, mut paths: Vec<PathBuf>) -> Result<report::Report, CliError> {
    let termfile = paths.pop().expect("clap requires paths");
    let terms = read_terms(&termfile)?;
    let (snapshot, scan) = sources::ngram_snapshot(cfg, &paths, &terms)?;
    let request = Request::Ngram {
        terms,
        files: scan
            .files
            .iter()
            .map(|f| NgramFile {
                path: f.path.display().to_string(),
                order: f.order,
            })
            .collect(),
        lines_read: scan.counts.lines_read,
        skipped: scan.counts.malformed.clone(),
    };
    execute(request, provenance(cfg, Some(snapshot), false))
}

fn dispatch(command: Command, cfg: &mut RunConfig) -> Result<String, CliError> {
    let opts = cfg.options;
    let report = match command {
        Command::Ngd { terms } => {
            let x = multiset(&terms)?;
            let snap = sources::collect(cfg, &sources::expand([&x], opts))?;
            execute(
                Request::Ngd { terms: x },
                provenance(cfg, Some(snap), false),
            )?
        }
        Command::Matrix { termfile } => {
            let terms = read_terms(&termfile)?;
            let snap = sources::collect(cfg, &sources::expand(&pairwise_queries(&terms), opts))?;
            execute(
                Request::Matrix { terms },
                provenance(cfg, Some(snap), false),
            )?
        }
        Command::Classify {
            classfile,
            loocv,
            terms,
            elements,
        } => {
            let classes = ClassSet::from_json(&read_input(&classfile)?)?;
            let mut items = match &terms {
                Some(path) => read_terms(path)?,
                None => Vec::new(),
            };
            for e in &elements {
                items.push(Term::new(e)?);
            }
            let (mode, queries) = match (loocv, items.is_empty()) {
                (true, true) => (ClassifyMode::Loocv, loocv_queries(&classes)),
                (false, false) => {
                    let q = classify_queries(&items, &classes);
                    (ClassifyMode::Elements(items), q)
                }
                (true, false) => {
                    return Err(CliError::Usage("--loocv takes no terms to classify".into()))
                }
                (false, true) => {
                    return Err(CliError::Usage("give --loocv or terms to classify".into()))
                }
            };
            let snap = sources::collect(cfg, &sources::expand(&queries, opts))?;
            execute(
                Request::Classify { classes, mode },
                provenance(cfg, Some(snap), false),
            )?
        }
        Command::Cluster {
            input,
            kmax,
            references,
        } => {
            let text = read_input(&input)?;
            let (input, snap, n) = if text.starts_with('\t') {
                let m = ngd_core::DistanceMatrix::from_tsv(&text)?;
                let n = m.len();
                (ClusterInput::Matrix(m), None, n)
            } else {
                let terms = parse_termfile(&text)?;
                let snap =
                    sources::collect(cfg, &sources::expand(&pairwise_queries(&terms), opts))?;
                let n = terms.len();
                (ClusterInput::Terms(terms), Some(snap), n)
            };
            let k_max = kmax.unwrap_or(report::DEFAULT_K_MAX.min(n.saturating_sub(1)).max(1));
            let request = Request::Cluster {
                input,
                k_max,
                references,
            };
            execute(request, provenance(cfg, snap, true))?
        }
        Command::Ingest { corpus } => ingest(cfg, corpus)?,
        Command::Ngram { paths } => ngram(cfg, paths)?,
        Command::Budget { n, c } => {
            execute(Request::Budget { n, c }, provenance(cfg, None, false))?
        }
        Command::Replay { report } => return report::replay(&read_input(&report)?),
    };
    Ok(render(&report, cfg.format))
}

fn run_parsed(cli: Cli) -> Result<String, CliError> {
    let mut cfg = resolve_config(&cli.global)?;
    let command = match cli.command {
        Some(c) => c,
        None if cli.terms.is_empty() => {
            return Err(CliError::Usage("no command given; see --help".into()));
        }
        None => Command::Ngd { terms: cli.terms },
    };
    dispatch(command, &mut cfg)
}

/// Runs one invocation and returns its exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let message = e.to_string();
            let first = message
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            let first = first.trim_start_matches("error: ");
            let _ = writeln!(stderr, "{}", CliError::Usage(first.to_string()).line());
            return 1;
        }
    };
    match run_parsed(cli) {
        Ok(out) => {
            let _ = stdout.write_all(out.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.line());
            e.code()
        }
    }
}
