//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use ngd_core::classifier::{loocv, loocv_queries, query_budget};
use ngd_core::clustering::{
    gap_statistic, intra_dispersion, ClusterAssignment, DistanceMatrix, SquareMatrix,
};
use ngd_core::providers::{
    collect_snapshot, ingest_corpus, ngram_counts, read_corpus, CorpusIndex, NormalizerSettings,
    ProviderConfig, ProviderKind, QueryCache, RateLimit, SearchProvider, Tokenizer, Transport,
    TransportError,
};
use ngd_core::{
    ngd, ngd_pairwise, ClassSet, FrequencySnapshot, NgdNote, NgdOptions, QueryMode, Term,
    TermMultiset,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(rel: &str) -> PathBuf {
    root().join("fixtures").join(rel)
}

fn t(s: &str) -> Term {
    Term::new(s).unwrap()
}

fn ngd_bin(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ngd"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("spawn ngd");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn worked_example() -> Outcome {
    let cache = fixture("worked_example.cache");
    let start = Instant::now();
    let (code, out, err) = ngd_bin(&["--cache", cache.to_str().unwrap(), "shakespeare", "macbeth"]);
    let elapsed = start.elapsed();
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    let value: f64 = out
        .split_whitespace()
        .next()
        .unwrap_or("")
        .parse()
        .map_err(|_| format!("output {out:?}"))?;
    ensure(format!("{value:.2}") == "0.13", || format!("got {value}"))?;
    within(Duration::from_secs(1), elapsed)?;
    Ok(format!("{value:.3} in {elapsed:.0?}"))
}

fn triangle() -> Outcome {
    // x and y share one page; z covers both, f(z) just under 2√N.
    let n = 1u64 << 20;
    let root = 1u64 << 10;
    let fz = 2 * root - 1;
    let snap = FrequencySnapshot::builder("triangle")
        .count(TermMultiset::singleton(t("x")), root)
        .count(TermMultiset::singleton(t("y")), root)
        .count(TermMultiset::singleton(t("z")), fz)
        .count(TermMultiset::pair(t("x"), t("y")), 1)
        .count(TermMultiset::pair(t("x"), t("z")), root)
        .count(TermMultiset::pair(t("z"), t("y")), root)
        .normalizer(n)
        .build()
        .unwrap();
    let xy = ngd_pairwise(&t("x"), &t("y"), &snap).unwrap().value;
    let xz = ngd_pairwise(&t("x"), &t("z"), &snap).unwrap().value;
    let zy = ngd_pairwise(&t("z"), &t("y"), &snap).unwrap().value;
    ensure((xy - 1.0).abs() <= 1e-6, || format!("NGD(x,y) = {xy}"))?;
    ensure((xz - 0.0999).abs() <= 1e-3, || format!("NGD(x,z) = {xz}"))?;
    ensure((zy - 0.0999).abs() <= 1e-3, || format!("NGD(z,y) = {zy}"))?;
    ensure(xy > xz + zy, || "triangle inequality holds".into())?;
    Ok(format!("{xy:.3} > {xz:.4} + {zy:.4}"))
}

struct Case {
    items: Vec<usize>,
    singles: Vec<u64>,
    joint: u64,
    n: u64,
}

impl Case {
    fn texts(&self) -> Vec<String> {
        self.items.iter().map(|i| format!("w{i}")).collect()
    }

    fn snapshot(&self) -> FrequencySnapshot {
        let mut b = FrequencySnapshot::builder("fuzz").normalizer(self.n);
        for (i, &f) in self.singles.iter().enumerate() {
            b.insert(TermMultiset::singleton(t(&format!("w{i}"))), f);
        }
        b.insert(TermMultiset::from_texts(&self.texts()).unwrap(), self.joint);
        b.build().unwrap()
    }
}

/// Counts with `0 < f(x) ≤ N`, `f(X) ≤ min f(x)` and `g(X) ≥ Π g(x)`.
fn consistent_case(rng: &mut ChaCha8Rng) -> Case {
    let len = rng.random_range(2..=8usize);
    let vocab = rng.random_range(1..=5usize);
    let n = 1u64 << rng.random_range(1..=40u32);
    let items: Vec<usize> = (0..len).map(|_| rng.random_range(0..vocab)).collect();
    let singles: Vec<u64> = (0..vocab).map(|_| rng.random_range(1..=n)).collect();
    let min = items.iter().map(|&i| singles[i]).min().unwrap();
    let log_floor: f64 = items
        .iter()
        .map(|&i| (singles[i] as f64).log2())
        .sum::<f64>()
        - (len - 1) as f64 * (n as f64).log2();
    let floor = ((log_floor.exp2() * (1.0 + 1e-9)).ceil() as u64).min(min);
    let joint = rng.random_range(floor..=min);
    Case {
        items,
        singles,
        joint,
        n,
    }
}

fn range_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4e47_4400);
    let start = Instant::now();
    let opts = NgdOptions::default();
    let mut pairs = 0;
    for case_no in 0..10_000 {
        let c = consistent_case(&mut rng);
        let snap = c.snapshot();
        let mut texts = c.texts();
        let x = TermMultiset::from_texts(&texts).unwrap();
        let d = ngd(&x, &snap, opts).unwrap().value;
        let top = (x.len() - 1) as f64;
        ensure((0.0..=top).contains(&d), || {
            format!("case {case_no}: {d} outside [0, {top}]")
        })?;
        texts.shuffle(&mut rng);
        let p = ngd(&TermMultiset::from_texts(&texts).unwrap(), &snap, opts)
            .unwrap()
            .value;
        ensure(p.to_bits() == d.to_bits(), || {
            format!("case {case_no}: permutation gave {p} vs {d}")
        })?;
        if texts.len() == 2 && texts[0] != texts[1] {
            pairs += 1;
            let pw = ngd_pairwise(&t(&texts[0]), &t(&texts[1]), &snap)
                .unwrap()
                .value;
            ensure(pw.to_bits() == d.to_bits(), || {
                format!("case {case_no}: pairwise {pw} vs {d}")
            })?;
        }
    }
    // Dedicated two-term cases so the pairwise check is not left to chance.
    for case_no in 0..2_000 {
        let n = 1u64 << rng.random_range(1..=40u32);
        let fx = rng.random_range(1..=n);
        let fy = rng.random_range(1..=n);
        let fxy = rng.random_range(0..=fx.min(fy));
        let snap = FrequencySnapshot::builder("pair")
            .count(TermMultiset::singleton(t("a")), fx)
            .count(TermMultiset::singleton(t("b")), fy)
            .count(TermMultiset::pair(t("a"), t("b")), fxy)
            .normalizer(n)
            .build()
            .unwrap();
        let a = ngd_pairwise(&t("b"), &t("a"), &snap).unwrap();
        let b = ngd(&TermMultiset::pair(t("a"), t("b")), &snap, opts).unwrap();
        ensure(a == b, || format!("pair case {case_no}: {a:?} vs {b:?}"))?;
        pairs += 1;
    }
    let elapsed = start.elapsed();
    within(Duration::from_secs(10), elapsed)?;
    Ok(format!(
        "10000 snapshots, {pairs} pairwise checks in {elapsed:.0?}"
    ))
}

fn zero_convention() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c32);
    for case_no in 0..10_000 {
        let mut c = consistent_case(&mut rng);
        let i = c.items[rng.random_range(0..c.items.len())];
        c.singles[i] = 0;
        c.joint = 0;
        let x = TermMultiset::from_texts(&c.texts()).unwrap();
        let d = ngd(&x, &c.snapshot(), NgdOptions::default()).unwrap();
        let top = (x.len() - 1) as f64;
        ensure(d.value == top && d.note == Some(NgdNote::ZeroCount), || {
            format!("case {case_no}: {d:?}, expected {top}")
        })?;
    }
    Ok("10000 cases with f(x) = 0 give |X|-1".into())
}

struct CorpusEngine {
    index: CorpusIndex,
    calls: Arc<AtomicU64>,
}

impl Transport for CorpusEngine {
    fn get(&self, url: &str) -> Result<String, TransportError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let parsed = url::Url::parse(url).map_err(|e| TransportError(e.to_string()))?;
        let q = parsed
            .query_pairs()
            .find(|(k, _)| k == "q")
            .map(|(_, v)| v.into_owned())
            .ok_or_else(|| TransportError("no q parameter".into()))?;
        let x = TermMultiset::new(q.split(" AND ").map(|s| t(s.trim_matches('"')))).unwrap();
        Ok(format!(
            r#"{{"searchInformation":{{"totalResults":"{}"}}}}"#,
            self.index.corpus_count(&x)
        ))
    }
}

fn budgets() -> Outcome {
    for n in 1..=100u64 {
        for c in 1..=10u64 {
            let expect = [(n * n - n) / 2 + n, 2 * n * c + n, n * c + c + n];
            let got = [
                QueryMode::PairwiseMatrix,
                QueryMode::Multiset,
                QueryMode::MultisetLoocv,
            ]
            .map(|m| query_budget(n, c, m));
            ensure(got == expect, || {
                format!("n={n} c={c}: {got:?} vs {expect:?}")
            })?;
        }
    }

    let classes = load_classes("two_class");
    let n = classes.element_count() as u64;
    let c = classes.classes().len() as u64;
    let index = ingest_corpus(
        read_corpus(&fixture("synthetic/two_class/docs")).unwrap(),
        Tokenizer::default(),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cache = Arc::new(QueryCache::open(dir.path().join("cache.tsv")).unwrap());
    let calls = Arc::new(AtomicU64::new(0));
    let config = ProviderConfig {
        kind: ProviderKind::SearchApi,
        source_id: Some("mock".into()),
        endpoint: Some("https://engine.test/search?q={query}".into()),
        rate_limit: RateLimit {
            max_queries: 10_000,
            window_ms: 1,
        },
        retry_base_ms: 0,
        ..ProviderConfig::default()
    };
    let provider = SearchProvider::with_transport(
        config,
        cache,
        Box::new(CorpusEngine {
            index,
            calls: calls.clone(),
        }),
    )
    .unwrap();
    let settings = NormalizerSettings {
        normalizer_n: Some(1 << 20),
        ..NormalizerSettings::default()
    };
    let snap = collect_snapshot(&provider, &loocv_queries(&classes), settings)
        .map_err(|e| e.to_string())?;
    loocv(&classes, &snap, NgdOptions::default()).map_err(|e| e.to_string())?;
    let predicted = n * c + c + n;
    let wire = calls.load(Ordering::SeqCst);
    ensure(predicted == 38, || format!("prediction {predicted}"))?;
    ensure(
        wire == predicted && provider.queries_issued() == predicted,
        || {
            format!(
                "issued {} (transport {wire}), predicted {predicted}",
                provider.queries_issued()
            )
        },
    )?;
    Ok(format!(
        "1000 (n, c) combinations; live LOOCV issued {wire} = nc+c+n"
    ))
}

fn load_classes(name: &str) -> ClassSet {
    ClassSet::from_json(
        &std::fs::read_to_string(fixture(&format!("synthetic/{name}/classes.json"))).unwrap(),
    )
    .unwrap()
}

fn classification() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for name in ["two_class", "four_class"] {
        let classes = load_classes(name);
        let docs = read_corpus(&fixture(&format!("synthetic/{name}/docs"))).unwrap();
        ensure(docs.len() == 40, || {
            format!("{name}: {} documents", docs.len())
        })?;
        let index = ingest_corpus(docs.clone(), Tokenizer::default()).unwrap();
        let token_sets: Vec<BTreeSet<&str>> = docs
            .iter()
            .map(|(_, text)| text.split_whitespace().collect())
            .collect();
        for q in loocv_queries(&classes) {
            let want = token_sets
                .iter()
                .filter(|s| q.distinct().all(|x| s.contains(x.as_str())))
                .count() as u64;
            let got = index.corpus_count(&q);
            ensure(got == want, || {
                format!("{name}: count of {q} is {got}, brute force {want}")
            })?;
        }

        let docs_dir = fixture(&format!("synthetic/{name}/docs"));
        let class_file = fixture(&format!("synthetic/{name}/classes.json"));
        let (code, out, err) = ngd_bin(&[
            "--format",
            "json",
            "--corpus",
            docs_dir.to_str().unwrap(),
            "classify",
            class_file.to_str().unwrap(),
            "--loocv",
        ]);
        ensure(code == 0, || format!("{name}: exit {code}: {err}"))?;
        let report: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        let r = &report["result"]["classification"];
        let (correct, total) = (r["correct"].as_u64(), r["total"].as_u64());
        ensure(
            classes.element_count() == 12 && correct == Some(12) && total == Some(12),
            || format!("{name}: {correct:?}/{total:?}"),
        )?;
        parts.push(format!("{name} 12/12"));
    }
    let elapsed = start.elapsed();
    within(Duration::from_secs(5), elapsed)?;
    Ok(format!("{} in {elapsed:.0?}", parts.join(", ")))
}

fn labels(n: usize) -> Vec<Term> {
    (0..n).map(|i| t(&format!("t{i}"))).collect()
}

fn two_block(seed: u64) -> DistanceMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7b10c);
    let n = 10;
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let v = if (i < n / 2) == (j < n / 2) {
                rng.random_range(0.05..=0.10)
            } else {
                rng.random_range(0.90..=1.00)
            };
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    DistanceMatrix::new(labels(n), m).unwrap()
}

fn gap() -> Outcome {
    let mut hits = 0;
    for seed in 0..100 {
        if gap_statistic(&two_block(seed), 5, 100, seed)
            .unwrap()
            .chosen_k
            == 2
        {
            hits += 1;
        }
    }
    ensure(hits >= 95, || {
        format!("two-block chosen_k = 2 in {hits}/100 seeds")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(0xd15);
    let mut checked = 0;
    for n in 1..=20usize {
        for _ in 0..25 {
            let mut m = SquareMatrix::zeros(n);
            for i in 0..n {
                for j in i + 1..n {
                    let v = rng.random_range(0.0..2.0);
                    m.set(i, j, v);
                    m.set(j, i, v);
                }
            }
            let m = DistanceMatrix::new(labels(n), m).unwrap();
            let k = rng.random_range(1..=n);
            // Every cluster gets at least one member.
            let mut raw: Vec<usize> = (0..n)
                .map(|i| if i < k { i } else { rng.random_range(0..k) })
                .collect();
            raw.shuffle(&mut rng);
            let a = ClusterAssignment::from_zero_based(k, &raw, false);
            let got = intra_dispersion(&m, &a).unwrap();
            let mut w = 0.0;
            for r in 1..=k {
                let mut d = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        if a.labels[i] == r && a.labels[j] == r {
                            d += m.get(i, j);
                        }
                    }
                }
                let size = a.labels.iter().filter(|&&l| l == r).count();
                ensure(got.d_r[r - 1].to_bits() == d.to_bits(), || {
                    format!("n={n} D_{r}: {} vs {d}", got.d_r[r - 1])
                })?;
                w += d / (2.0 * size as f64);
            }
            ensure(got.w.to_bits() == w.to_bits(), || {
                format!("n={n} W: {} vs {w}", got.w)
            })?;
            checked += 1;
        }
    }

    let lm = DistanceMatrix::from_tsv(
        &std::fs::read_to_string(fixture("gap/local_maximum.tsv")).unwrap(),
    )
    .unwrap();
    let r = gap_statistic(&lm, 6, 100, 3).unwrap();
    ensure(r.chosen_k < r.global_max_k, || {
        format!(
            "local-maximum fixture: chosen {} global max {}",
            r.chosen_k, r.global_max_k
        )
    })?;
    Ok(format!(
        "two-block {hits}/100; dispersion exact on {checked} matrices; fixture chosen k={} < global max k={}",
        r.chosen_k, r.global_max_k
    ))
}

const NGRAM_TERMS: [&str; 8] = [
    "bank", "river", "water", "fish", "money", "loan", "credit", "rain",
];
const NGRAM_SINGLES: [u64; 8] = [145, 70, 167, 82, 83, 76, 81, 92];
/// Upper triangle by rows, in the order of `NGRAM_TERMS`.
const NGRAM_PAIRS: [u64; 28] = [
    17, 13, 20, 16, 16, 19, 0, 10, 17, 0, 0, 0, 0, 14, 0, 0, 0, 25, 0, 0, 0, 0, 16, 20, 0, 21, 0, 0,
];

fn hand_ngd(fx: u64, fy: u64, fxy: u64, n: u64) -> f64 {
    if fxy == 0 {
        return 1.0;
    }
    let (lx, ly, lxy, ln) = (
        (fx as f64).log2(),
        (fy as f64).log2(),
        (fxy as f64).log2(),
        (n as f64).log2(),
    );
    ((lx.max(ly) - lxy) / (ln - lx.min(ly))).max(0.0)
}

fn ngram() -> Outcome {
    let one = fixture("ngram/1gram.tsv");
    let five = fixture("ngram/5gram.tsv");
    let lines = std::fs::read_to_string(&one).unwrap().lines().count()
        + std::fs::read_to_string(&five).unwrap().lines().count();
    ensure(lines <= 1000, || format!("{lines} fixture lines"))?;

    let (code, out, err) = ngd_bin(&[
        "--format",
        "json",
        "ngram",
        one.to_str().unwrap(),
        five.to_str().unwrap(),
        fixture("ngram/terms.txt").to_str().unwrap(),
    ]);
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    let report: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let matrix = &report["result"]["matrix"];
    let got_labels: Vec<&str> = matrix["labels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    ensure(got_labels == NGRAM_TERMS, || {
        format!("labels {got_labels:?}")
    })?;
    let n = NGRAM_SINGLES.iter().max().unwrap() * 1000;
    let mut pair = NGRAM_PAIRS.iter();
    let mut oracle = [[0.0; 8]; 8];
    for i in 0..8 {
        oracle[i][i] = hand_ngd(NGRAM_SINGLES[i], NGRAM_SINGLES[i], NGRAM_SINGLES[i], n);
        for j in i + 1..8 {
            let v = hand_ngd(NGRAM_SINGLES[i], NGRAM_SINGLES[j], *pair.next().unwrap(), n);
            oracle[i][j] = v;
            oracle[j][i] = v;
        }
    }
    let mut worst = 0.0f64;
    for (i, row) in oracle.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            let got = matrix["rows"][i][j].as_f64().ok_or("non-numeric entry")?;
            worst = worst.max((got - want).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;

    let terms: Vec<Term> = NGRAM_TERMS.iter().map(|s| t(s)).collect();
    let counts = ngram_counts(&[one], &[five], &terms).unwrap();
    let index = ingest_corpus(
        read_corpus(&fixture("ngram/snippets.jsonl")).unwrap(),
        Tokenizer::default(),
    )
    .unwrap();
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i + 1..] {
            let window = counts.pair(a, b).unwrap_or(0);
            let doc = index.corpus_count(&TermMultiset::pair(a.clone(), b.clone()));
            ensure(window <= doc, || {
                format!("{a} {b}: n-gram {window} > documents {doc}")
            })?;
        }
    }
    Ok(format!(
        "oracle deviation {worst:.1e}; 28 pair counts within document counts"
    ))
}

fn replay_all(dir: &Path) -> Outcome {
    let syn = fixture("synthetic/two_class");
    let docs = syn.join("docs");
    let classes = syn.join("classes.json");
    let terms = dir.join("terms.txt");
    std::fs::write(&terms, "dog\ncat\nhorse\nred\nblue\ngreen\n").unwrap();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let runs: Vec<(&str, Vec<String>)> = vec![
        (
            "ngd",
            vec![
                "--cache".into(),
                s(&fixture("worked_example.cache")),
                "shakespeare".into(),
                "macbeth".into(),
            ],
        ),
        (
            "matrix",
            vec!["--corpus".into(), s(&docs), "matrix".into(), s(&terms)],
        ),
        (
            "classify",
            vec![
                "--corpus".into(),
                s(&docs),
                "classify".into(),
                s(&classes),
                "--loocv".into(),
            ],
        ),
        (
            "classify-elements",
            vec![
                "--corpus".into(),
                s(&docs),
                "classify".into(),
                s(&classes),
                "goat".into(),
                "purple".into(),
            ],
        ),
        (
            "cluster-matrix",
            vec![
                "--seed".into(),
                "11".into(),
                "cluster".into(),
                s(&fixture("gap/local_maximum.tsv")),
                "-B".into(),
                "20".into(),
            ],
        ),
        (
            "cluster-terms",
            vec![
                "--corpus".into(),
                s(&docs),
                "--seed".into(),
                "5".into(),
                "cluster".into(),
                s(&terms),
                "-B".into(),
                "20".into(),
            ],
        ),
        (
            "ngram",
            vec![
                "ngram".into(),
                s(&fixture("ngram/1gram.tsv")),
                s(&fixture("ngram/5gram.tsv")),
                s(&fixture("ngram/terms.txt")),
            ],
        ),
        ("ingest", vec!["ingest".into(), s(&docs)]),
        ("budget", vec!["budget".into(), "12".into(), "2".into()]),
    ];
    for (name, args) in &runs {
        let mut full: Vec<&str> = vec!["--format", "json"];
        full.extend(args.iter().map(String::as_str));
        let (code, report, err) = ngd_bin(&full);
        ensure(code == 0, || format!("{name}: exit {code}: {err}"))?;
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, &report).unwrap();
        let (code, again, err) = ngd_bin(&["replay", path.to_str().unwrap()]);
        ensure(code == 0, || format!("{name} replay: exit {code}: {err}"))?;
        ensure(again == report, || {
            format!("{name}: replayed report differs")
        })?;
        let in_process = ngd_cli::report::replay(&report).map_err(|e| e.to_string())?;
        ensure(in_process == report, || {
            format!("{name}: in-process replay differs")
        })?;
    }
    Ok(format!("{} reports byte-identical on replay", runs.len()))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let criteria: Vec<Criterion> = vec![
        ("worked example", Box::new(worked_example)),
        ("non-metricity", Box::new(triangle)),
        ("range property suite", Box::new(range_suite)),
        ("zero-count convention", Box::new(zero_convention)),
        ("query budgets", Box::new(budgets)),
        ("synthetic classification", Box::new(classification)),
        ("gap statistic", Box::new(gap)),
        ("n-gram pipeline", Box::new(ngram)),
        ("reproducibility", Box::new(move || replay_all(dir.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
