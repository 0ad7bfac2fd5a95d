"""Regenerates the n-gram fixture files from a seeded synthetic text.

Each snippet has three to five tokens. Five-token snippets become 5-gram
lines whose match count is the number of identical snippets; every token
feeds the 1-gram counts. Counts are split across two years so readers have
to sum them.
"""

import collections
import json
import pathlib
import random

TOPICS = [
    ["river", "water", "fish", "bank"],
    ["money", "loan", "bank", "credit"],
    ["water", "rain", "cloud"],
]
FILLER = ["the", "a", "on", "by"]
TERMS = ["bank", "river", "water", "fish", "money", "loan", "credit", "rain"]


def snippets(rng, count):
    for i in range(count):
        topic = rng.choice(TOPICS)
        length = rng.choice([3, 4, 5, 5])
        words = [rng.choice(topic if rng.random() < 0.7 else FILLER) for _ in range(length)]
        yield f"s{i:03}", " ".join(words)


def split(count):
    first = count // 2
    return [(2001, count - first), (2002, first)] if first else [(2001, count)]


def main():
    root = pathlib.Path(__file__).parent
    rng = random.Random(20130)
    docs = list(snippets(rng, 300))
    with open(root / "snippets.jsonl", "w") as f:
        for doc_id, text in docs:
            f.write(json.dumps({"id": doc_id, "text": text}) + "\n")

    unigrams = collections.Counter(w for _, text in docs for w in text.split())
    fivegrams = collections.Counter(text for _, text in docs if len(text.split()) == 5)
    with open(root / "1gram.tsv", "w") as f:
        for word in sorted(unigrams):
            for year, c in split(unigrams[word]):
                f.write(f"{word}\t{year}\t{c}\t{c}\n")
        f.write("malformed line without tabs\n")
    with open(root / "5gram.tsv", "w") as f:
        for text in sorted(fivegrams):
            for year, c in split(fivegrams[text]):
                f.write(f"{text}\t{year}\t{c}\t1\n")
        f.write("too few tokens\t2001\t4\t1\n")
    (root / "terms.txt").write_text("\n".join(TERMS) + "\n")

    singles = {t: unigrams[t] for t in TERMS}
    pairs = {}
    for i, a in enumerate(TERMS):
        for b in TERMS[i + 1:]:
            pairs[(a, b)] = sum(c for text, c in fivegrams.items() if a in text.split() and b in text.split())
    print("singles", singles)
    print("pairs", pairs)


if __name__ == "__main__":
    main()
