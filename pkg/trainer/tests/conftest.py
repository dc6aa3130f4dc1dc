import json
import random

import pytest

CLASS_WORDS = {
    "Storage": ["database", "index", "query", "shard", "replica", "transaction", "rollback"],
    "Frontend": ["button", "layout", "render", "pixel", "font", "scroll", "widget"],
    "Network": ["socket", "packet", "timeout", "handshake", "retry", "proxy", "gateway"],
}
FILLER = ["issue", "report", "problem", "observed", "version", "steps", "expected", "actual"]


def synthetic_pair_text(rng, label):
    tokens = [rng.choice(CLASS_WORDS[label]) for _ in range(6)]
    tokens += [rng.choice(FILLER) for _ in range(6)]
    rng.shuffle(tokens)
    return " ".join(tokens[:4]), " ".join(tokens[4:])


def split_sizes(n):
    n_test = (n * 20 + 50) // 100
    n_val = (n * 16 + 50) // 100
    return n - n_val - n_test, n_val, n_test


def write_synthetic_dataset(path, n_pairs=500, seed=11):
    """dataset.jsonl with a strong lexical class signal and 64/16/20 splits."""
    rng = random.Random(seed)
    labels = sorted(CLASS_WORDS)
    per_class = n_pairs // len(labels)
    counts = {lab: per_class for lab in labels}
    counts[labels[0]] += n_pairs - per_class * len(labels)
    records = []
    counter = 0
    for label, count in counts.items():
        n_train, n_val, n_test = split_sizes(count)
        splits = ["TRAIN"] * n_train + ["VAL"] * n_val + ["TEST"] * n_test
        rng.shuffle(splits)
        for split in splits:
            counter += 1
            title_a, description_a = synthetic_pair_text(rng, label)
            title_b, description_b = synthetic_pair_text(rng, label)
            records.append(
                {
                    "example_id": f"ex{counter:05d}",
                    "repo_id": "synthetic",
                    "key_a": f"SYN-{2 * counter - 1}",
                    "key_b": f"SYN-{2 * counter}",
                    "title_a": title_a,
                    "description_a": description_a,
                    "title_b": title_b,
                    "description_b": description_b,
                    "label": label,
                    "split": split,
                }
            )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"_meta": {"labels": labels, "seed": seed}}) + "\n")
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return path


@pytest.fixture(scope="session")
def synthetic_dataset(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "synthetic.dataset.jsonl"
    return write_synthetic_dataset(path)
