"""dataset.jsonl reader: the file contract with the dataset builder.

First line may be {"_meta": {"labels": [...], ...}}; every other line is one
example with embedded issue texts and a TRAIN/VAL/TEST split tag.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

TRAIN, VAL, TEST = "TRAIN", "VAL", "TEST"

REQUIRED_FIELDS = (
    "example_id",
    "label",
    "split",
    "title_a",
    "description_a",
    "title_b",
    "description_b",
)


@dataclass(frozen=True)
class PairExample:
    example_id: str
    text_a: str
    text_b: str
    label: str
    split: str


@dataclass
class DatasetFile:
    examples: list[PairExample]
    labels: list[str]
    meta: dict

    def split(self, name: str) -> list[PairExample]:
        return [ex for ex in self.examples if ex.split == name]

    def label_index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}


def _join(title: str, description: str) -> str:
    # Title and description are concatenated with a single space.
    title = title or ""
    description = description or ""
    return f"{title} {description}".strip()


def read_dataset(path) -> DatasetFile:
    examples: list[PairExample] = []
    meta: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            if "_meta" in rec:
                meta = rec["_meta"]
                continue
            missing = [name for name in REQUIRED_FIELDS if name not in rec]
            if missing:
                raise ValueError(f"{path}:{lineno}: example misses fields {missing}")
            examples.append(
                PairExample(
                    example_id=rec["example_id"],
                    text_a=_join(rec["title_a"], rec["description_a"]),
                    text_b=_join(rec["title_b"], rec["description_b"]),
                    label=rec["label"],
                    split=rec["split"],
                )
            )
    labels = meta.get("labels")
    if not labels:
        labels = sorted({ex.label for ex in examples})
    observed = {ex.label for ex in examples}
    stray = observed - set(labels)
    if stray:
        raise ValueError(f"examples carry labels outside the declared universe: {sorted(stray)}")
    return DatasetFile(examples=examples, labels=list(labels), meta=meta)
