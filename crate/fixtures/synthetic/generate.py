"""Regenerates the synthetic classification corpora in this directory.

Document j of a class holds every class term except the one at index
j mod (m+1), so one document in m+1 holds all of them. Every fifth document
also mentions one term of the next class, and every document carries two
filler words.
"""

import json
import pathlib
import shutil

FILLER = ["the", "and", "of", "with"]

SETS = {
    "two_class": (
        {
            "animals": ["dog", "cat", "horse", "cow", "sheep", "goat"],
            "colors": ["red", "blue", "green", "yellow", "orange", "purple"],
        },
        20,
    ),
    "four_class": (
        {
            "birds": ["sparrow", "eagle", "falcon"],
            "fish": ["salmon", "trout", "carp"],
            "mammals": ["wolf", "bear", "fox"],
            "reptiles": ["lizard", "snake", "turtle"],
        },
        10,
    ),
}


def documents(classes, per_class):
    labels = list(classes)
    for ci, label in enumerate(labels):
        terms = classes[label]
        other = classes[labels[(ci + 1) % len(labels)]]
        m = len(terms)
        for j in range(per_class):
            words = [t for i, t in enumerate(terms) if i != j % (m + 1)]
            if j % 5 == 0:
                words.append(other[j % len(other)])
            words += [FILLER[(j + k) % 4] for k in range(2)]
            yield f"{label}-{j:02}", " ".join(words)


def main():
    root = pathlib.Path(__file__).parent
    for name, (classes, per_class) in SETS.items():
        out = root / name
        shutil.rmtree(out, ignore_errors=True)
        (out / "docs").mkdir(parents=True)
        for doc_id, text in documents(classes, per_class):
            (out / "docs" / f"{doc_id}.txt").write_text(text + "\n")
        spec = {"classes": [{"label": k, "terms": v} for k, v in classes.items()]}
        (out / "classes.json").write_text(json.dumps(spec, indent=2) + "\n")


if __name__ == "__main__":
    main()
