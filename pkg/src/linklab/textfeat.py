"""Tokenization, TF-IDF vectors, cosine similarity, and text-length measures.

The TF-IDF scheme is the smoothed variant: idf(t) = ln((1 + N) / (1 + df(t))) + 1,
tf = raw in-document count, output vectors L2-normalized. Vocabulary order is
alphabetical so indices do not depend on corpus order.
"""

from __future__ import annotations

import json
import math
import re
import unicodedata
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyCorpus

# Unicode alphanumeric runs; underscore is a separator.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str, min_token_len: int = 2) -> list[str]:
    """Lowercased NFC tokens split on runs of non-alphanumeric characters.

    Tokens shorter than ``min_token_len`` are dropped.
    """
    if not text:
        return []
    text = unicodedata.normalize("NFC", text).lower()
    return [t for t in _TOKEN_RE.findall(text) if len(t) >= min_token_len]


@dataclass(frozen=True)
class TfidfParams:
    """Tokenizer and pruning knobs for a TF-IDF model.

    min_df=2 prunes hapax tokens at fit time, which keeps vocabularies
    manageable on large corpora; worked numeric examples use min_df=1.
    """

    min_token_len: int = 2
    min_df: int = 2


@dataclass(frozen=True)
class SparseVector:
    """Sorted sparse vector; no explicit zeros, all weights finite."""

    indices: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.indices) != len(self.weights):
            raise ValueError("indices and weights differ in length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if any(w == 0.0 or not math.isfinite(w) for w in self.weights):
            raise ValueError("weights must be nonzero and finite")

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights))

    def dot(self, other: "SparseVector") -> float:
        if self.nnz == 0 or other.nnz == 0:
            return 0.0
        lookup = dict(zip(other.indices, other.weights))
        return sum(w * lookup[i] for i, w in zip(self.indices, self.weights) if i in lookup)

    def to_dense(self, dim: int) -> np.ndarray:
        out = np.zeros(dim)
        if self.nnz:
            out[list(self.indices)] = self.weights
        return out


EMPTY_VECTOR = SparseVector((), ())


def sparse_from_counts(counts: dict[int, float]) -> SparseVector:
    items = sorted((i, w) for i, w in counts.items() if w != 0.0)
    if not items:
        return EMPTY_VECTOR
    idx, wts = zip(*items)
    return SparseVector(idx, wts)


@dataclass
class TfidfModel:
    """Fitted TF-IDF vocabulary with per-token idf weights."""

    vocabulary: dict[str, int]
    idf: np.ndarray
    n_docs: int
    params: TfidfParams = field(default_factory=TfidfParams)

    def token_index(self, token: str) -> int | None:
        return self.vocabulary.get(token)

    @property
    def dim(self) -> int:
        return len(self.vocabulary)

    def to_json(self) -> str:
        """Audit dump: vocabulary + idf as a JSON document."""
        inv = sorted(self.vocabulary, key=self.vocabulary.get)
        return json.dumps(
            {
                "n_docs": self.n_docs,
                "params": {"min_token_len": self.params.min_token_len, "min_df": self.params.min_df},
                "vocabulary": inv,
                "idf": [float(v) for v in self.idf],
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, payload: str) -> "TfidfModel":
        data = json.loads(payload)
        vocab = {tok: i for i, tok in enumerate(data["vocabulary"])}
        params = TfidfParams(**data["params"])
        return cls(vocab, np.asarray(data["idf"], dtype=float), int(data["n_docs"]), params)


def tfidf_fit(documents: list[str], params: TfidfParams = TfidfParams()) -> TfidfModel:
    """Fit vocabulary and smoothed idf weights over raw-text documents."""
    if not documents:
        raise EmptyCorpus("cannot fit TF-IDF on zero documents")
    df: dict[str, int] = {}
    for doc in documents:
        for tok in set(tokenize(doc, params.min_token_len)):
            df[tok] = df.get(tok, 0) + 1
    kept = sorted(t for t, c in df.items() if c >= params.min_df)
    vocab = {t: i for i, t in enumerate(kept)}
    n = len(documents)
    idf = np.array([math.log((1 + n) / (1 + df[t])) + 1.0 for t in kept], dtype=float)
    return TfidfModel(vocab, idf, n, params)


def tfidf_transform(model: TfidfModel, document: str) -> SparseVector:
    """L2-normalized TF-IDF vector; out-of-vocabulary tokens are ignored."""
    counts: dict[int, float] = {}
    for tok in tokenize(document, model.params.min_token_len):
        idx = model.vocabulary.get(tok)
        if idx is not None:
            counts[idx] = counts.get(idx, 0.0) + 1.0
    if not counts:
        return EMPTY_VECTOR
    items = sorted(counts.items())
    idx = [i for i, _ in items]
    wts = np.array([c for _, c in items]) * model.idf[idx]
    norm = float(np.linalg.norm(wts))
    if norm > 0:
        wts = wts / norm
    return SparseVector(tuple(idx), tuple(float(w) for w in wts))


def cosine_similarity(u: SparseVector, v: SparseVector) -> float:
    """dot(u, v) / (|u| |v|); 0 when either vector is zero."""
    nu, nv = u.norm(), v.norm()
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return u.dot(v) / (nu * nv)


def issue_token_length(title: str, description: str, min_token_len: int = 2) -> int:
    return len(tokenize(title, min_token_len)) + len(tokenize(description, min_token_len))


def pair_length(example, min_token_len: int = 2) -> int:
    """Combined token count of both issues' title + description."""
    a = issue_token_length(example.issue_a.title, example.issue_a.description, min_token_len)
    b = issue_token_length(example.issue_b.title, example.issue_b.description, min_token_len)
    return a + b


def pair_length_difference(example, min_token_len: int = 2) -> int:
    """Absolute token-count difference between the two issues."""
    a = issue_token_length(example.issue_a.title, example.issue_a.description, min_token_len)
    b = issue_token_length(example.issue_b.title, example.issue_b.description, min_token_len)
    return abs(a - b)
