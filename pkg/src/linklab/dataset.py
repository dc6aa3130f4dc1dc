"""Labeled dataset construction: label selection, non-link sampling, 64/16/20 split.

The split arithmetic is integer-only: per label, test = nearest(20% of n),
val = nearest(16% of n), train = remainder. Neither 20% nor 16% of an integer
can land exactly on .5, so "nearest" is unambiguous.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace

from .errors import InsufficientCandidates, RepoTooSmall, StratificationImpossible
from .ingest import Issue, RepositorySnapshot, derive_project_key
from .util import example_id

NON_LINK = "NON_LINK"

TRAIN, VAL, TEST, UNASSIGNED = "TRAIN", "VAL", "TEST", "UNASSIGNED"

DEFAULT_CLOSED_STATUSES = frozenset({"Closed", "Resolved", "Done"})


@dataclass(frozen=True)
class LinkExample:
    """One labeled classification instance: an issue pair plus link-type label."""

    example_id: str
    repo_id: str
    issue_a: Issue
    issue_b: Issue
    label: str
    split: str = UNASSIGNED


@dataclass(frozen=True)
class DatasetSpec:
    """Dataset construction knobs; the seed is recorded in every output."""

    min_repo_share: float = 0.01
    global_common_share: float = 0.02
    min_repo_links: int = 50
    seed: int = 0
    closed_statuses: frozenset[str] = DEFAULT_CLOSED_STATUSES
    # Open question: non-link sampling is repo-wide by default; this flag
    # restricts sampled pairs to issues of one project.
    non_links_within_project: bool = False

    def __post_init__(self):
        if not (0 < self.min_repo_share < 1):
            raise ValueError("min_repo_share must be in (0, 1)")

    def to_meta(self) -> dict:
        return {
            "min_repo_share": self.min_repo_share,
            "global_common_share": self.global_common_share,
            "min_repo_links": self.min_repo_links,
            "seed": self.seed,
            "closed_statuses": sorted(self.closed_statuses),
            "non_links_within_project": self.non_links_within_project,
        }


def select_label_set(snapshot: RepositorySnapshot, spec: DatasetSpec) -> list[str]:
    """Link types with within-repo share >= min_repo_share, by descending count,
    with NON_LINK appended last."""
    counts = snapshot.link_type_counts()
    total = sum(counts.values())
    if total < spec.min_repo_links:
        raise RepoTooSmall(
            f"{snapshot.repo_id}: {total} links < required {spec.min_repo_links}"
        )
    kept = [t for t, c in counts.items() if c / total >= spec.min_repo_share]
    kept.sort(key=lambda t: (-counts[t], t))
    return kept + [NON_LINK]


def common_types(snapshots: list[RepositorySnapshot], spec: DatasetSpec) -> set[str]:
    """Types whose share of all links pooled across repositories >= global_common_share."""
    counts: dict[str, int] = {}
    for snap in snapshots:
        for t, c in snap.link_type_counts().items():
            counts[t] = counts.get(t, 0) + c
    total = sum(counts.values())
    if total == 0:
        return set()
    return {t for t, c in counts.items() if c / total >= spec.global_common_share}


def _eligible_non_link_issues(snapshot: RepositorySnapshot, closed_statuses) -> list[Issue]:
    out = []
    for key in sorted(snapshot.issues):
        issue = snapshot.issues[key]
        if issue.status not in closed_statuses:
            continue
        if issue.resolution is not None and issue.resolution.lower() == "duplicate":
            continue
        out.append(issue)
    return out


def non_link_target_count(snapshot: RepositorySnapshot, labels: list[str]) -> int:
    """round-half-even of the mean per-label link count (NON_LINK excluded)."""
    counts = snapshot.link_type_counts()
    selected = [counts.get(label, 0) for label in labels if label != NON_LINK]
    if not selected:
        return 0
    return round(sum(selected) / len(selected))


def sample_non_links(
    snapshot: RepositorySnapshot,
    labels: list[str],
    seed: int,
    closed_statuses=DEFAULT_CLOSED_STATUSES,
    within_project: bool = False,
    max_draw_factor: int = 100,
) -> list[LinkExample]:
    """Sample unlinked closed-issue pairs as NON_LINK examples.

    Rejection-samples uniform unordered pairs of eligible issues; a pair is
    rejected if it is linked in the snapshot (any type, including pairs that
    were removed as multi-links) or already drawn. Deterministic per seed.
    """
    target = non_link_target_count(snapshot, labels)
    if target == 0:
        return []
    eligible = _eligible_non_link_issues(snapshot, closed_statuses)
    n = len(eligible)
    if n < 2:
        raise InsufficientCandidates(
            f"{snapshot.repo_id}: {n} eligible issues, need at least 2"
        )

    linked = snapshot.linked_pairs()
    eligible_keys = {i.issue_key for i in eligible}
    blocked = sum(1 for a, b in linked if a in eligible_keys and b in eligible_keys)
    universe = n * (n - 1) // 2
    if not within_project and universe - blocked < target:
        raise InsufficientCandidates(
            f"{snapshot.repo_id}: only {universe - blocked} unlinked eligible pairs, "
            f"need {target}"
        )

    rng = random.Random(seed)
    drawn: set[tuple[str, str]] = set()
    examples: list[LinkExample] = []
    attempts, cap = 0, max_draw_factor * target
    while len(examples) < target:
        attempts += 1
        if attempts > cap:
            raise InsufficientCandidates(
                f"{snapshot.repo_id}: gave up after {cap} draws with "
                f"{len(examples)}/{target} sampled"
            )
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        a, b = eligible[i], eligible[j]
        if within_project and a.project_key != b.project_key:
            continue
        pair = (a.issue_key, b.issue_key) if a.issue_key < b.issue_key else (b.issue_key, a.issue_key)
        if pair in linked or pair in drawn:
            continue
        drawn.add(pair)
        first, second = (a, b) if a.issue_key == pair[0] else (b, a)
        examples.append(
            LinkExample(
                example_id=example_id(snapshot.repo_id, *pair),
                repo_id=snapshot.repo_id,
                issue_a=first,
                issue_b=second,
                label=NON_LINK,
            )
        )
    return examples


def link_examples(snapshot: RepositorySnapshot, labels: list[str]) -> list[LinkExample]:
    """One example per retained link whose type is in the selected label set."""
    wanted = {label for label in labels if label != NON_LINK}
    out = []
    for link in snapshot.links:
        if link.link_type not in wanted:
            continue
        out.append(
            LinkExample(
                example_id=example_id(snapshot.repo_id, link.key_a, link.key_b),
                repo_id=snapshot.repo_id,
                issue_a=snapshot.issues[link.key_a],
                issue_b=snapshot.issues[link.key_b],
                label=link.link_type,
            )
        )
    return out


def split_counts(n: int) -> tuple[int, int, int]:
    """(train, val, test) counts for one class of size n under 64/16/20."""
    n_test = (n * 20 + 50) // 100
    n_val = (n * 16 + 50) // 100
    return n - n_val - n_test, n_val, n_test


def stratified_split(examples: list[LinkExample], seed: int) -> list[LinkExample]:
    """Assign TRAIN/VAL/TEST per label; remainder goes to TRAIN."""
    by_label: dict[str, list[int]] = {}
    for pos, ex in enumerate(examples):
        by_label.setdefault(ex.label, []).append(pos)
    for label, positions in by_label.items():
        if len(positions) < 3:
            raise StratificationImpossible(
                f"label {label!r} has {len(positions)} examples, need >= 3"
            )
    assignment: dict[int, str] = {}
    for label in sorted(by_label):
        positions = list(by_label[label])
        rng = random.Random(f"{seed}\x1f{label}")
        rng.shuffle(positions)
        _, n_val, n_test = split_counts(len(positions))
        for pos in positions[:n_test]:
            assignment[pos] = TEST
        for pos in positions[n_test : n_test + n_val]:
            assignment[pos] = VAL
        for pos in positions[n_test + n_val :]:
            assignment[pos] = TRAIN
    return [replace(ex, split=assignment[pos]) for pos, ex in enumerate(examples)]


def build_dataset(
    snapshot: RepositorySnapshot, spec: DatasetSpec
) -> tuple[list[LinkExample], list[str]]:
    """Full dataset for one repository: labeled links + non-links, split assigned."""
    labels = select_label_set(snapshot, spec)
    examples = link_examples(snapshot, labels)
    examples += sample_non_links(
        snapshot,
        labels,
        spec.seed,
        closed_statuses=spec.closed_statuses,
        within_project=spec.non_links_within_project,
    )
    return stratified_split(examples, spec.seed), labels


# --------------------------------------------------------------------------
# dataset.jsonl: the exchange format with any downstream trainer.
# First line is a {"_meta": ...} object (labels, seed, provenance); every
# following line is one example with embedded issue texts.
# --------------------------------------------------------------------------


def example_to_record(ex: LinkExample) -> dict:
    return {
        "example_id": ex.example_id,
        "repo_id": ex.repo_id,
        "key_a": ex.issue_a.issue_key,
        "key_b": ex.issue_b.issue_key,
        "title_a": ex.issue_a.title,
        "description_a": ex.issue_a.description,
        "title_b": ex.issue_b.title,
        "description_b": ex.issue_b.description,
        "label": ex.label,
        "split": ex.split,
    }


def _issue_stub(repo_id: str, key: str, title: str, description: str) -> Issue:
    return Issue(
        repo_id=repo_id,
        project_key=derive_project_key(key) or key,
        issue_key=key,
        title=title,
        description=description,
    )


def record_to_example(rec: dict) -> LinkExample:
    return LinkExample(
        example_id=rec["example_id"],
        repo_id=rec["repo_id"],
        issue_a=_issue_stub(rec["repo_id"], rec["key_a"], rec["title_a"], rec["description_a"]),
        issue_b=_issue_stub(rec["repo_id"], rec["key_b"], rec["title_b"], rec["description_b"]),
        label=rec["label"],
        split=rec.get("split", UNASSIGNED),
    )


def write_dataset_jsonl(path, examples: list[LinkExample], labels: list[str], meta: dict | None = None):
    header = {"labels": labels}
    header.update(meta or {})
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"_meta": header}, sort_keys=True, ensure_ascii=False) + "\n")
        for ex in examples:
            fh.write(json.dumps(example_to_record(ex), sort_keys=True, ensure_ascii=False) + "\n")


def read_dataset_jsonl(path) -> tuple[list[LinkExample], dict]:
    examples, meta = [], {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            if "_meta" in rec:
                meta = rec["_meta"]
                continue
            examples.append(record_to_example(rec))
    return examples, meta
