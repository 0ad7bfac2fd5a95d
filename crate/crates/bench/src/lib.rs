//! Inputs shared by the benchmarks.

use ngd_core::clustering::{DistanceMatrix, SquareMatrix};
use ngd_core::providers::{ingest_corpus, CorpusIndex, Tokenizer};
use ngd_core::{FrequencySnapshot, Term, TermMultiset};

pub fn term(i: usize) -> Term {
    Term::new(&format!("w{i}")).unwrap()
}

/// A snapshot holding singleton counts for `w0..wn` and the joint count of
/// all of them together.
pub fn multiset_snapshot(n: usize) -> (TermMultiset, FrequencySnapshot) {
    let x = TermMultiset::new((0..n).map(term)).unwrap();
    let mut b = FrequencySnapshot::builder("bench").normalizer(1 << 40);
    for i in 0..n {
        b.insert(
            TermMultiset::singleton(term(i)),
            1_000_000 + 7919 * i as u64,
        );
    }
    b.insert(x.clone(), 1000);
    (x, b.build().unwrap())
}

/// `docs` documents over a vocabulary of `vocab` words; deterministic.
pub fn corpus(docs: usize, vocab: usize) -> CorpusIndex {
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let texts: Vec<(String, String)> = (0..docs)
        .map(|d| {
            let words: Vec<String> = (0..40)
                .map(|_| format!("w{}", next() as usize % vocab))
                .collect();
            (format!("d{d}"), words.join(" "))
        })
        .collect();
    ingest_corpus(texts, Tokenizer::default()).unwrap()
}

/// Two noisy blocks of sizes `n / 2` and `n - n / 2`.
pub fn block_matrix(n: usize) -> DistanceMatrix {
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let jitter = ((i * 31 + j * 17) % 11) as f64 / 200.0;
            let v = if (i < n / 2) == (j < n / 2) {
                0.1 + jitter
            } else {
                0.9 + jitter
            };
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    DistanceMatrix::new((0..n).map(term).collect(), m).unwrap()
}
