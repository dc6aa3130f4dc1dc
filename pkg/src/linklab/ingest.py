"""Issue/link export parsing and repository snapshot construction.

Input contract: issues.jsonl and links.jsonl, one JSON object per line.
Cleaning rules applied by build_snapshot, in order:
  1. links with a private or unresolved endpoint are dropped and counted,
  2. exact duplicate (pair, type) records collapse to one,
  3. pairs carrying two or more distinct types are removed entirely
     (counted per pair),
so every surviving unordered pair carries exactly one link.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field, replace

from .errors import MalformedRecord, SelfLink

_PROJECT_KEY_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)-\d+$")

#: Default raw-name merges: plural/tense variants of one verb only.
DEFAULT_TYPE_MAP = {
    "Blocks": "Block",
    "Blocked": "Block",
    "Blocked by": "Block",
    "Causes": "Cause",
    "Caused": "Cause",
    "Caused by": "Cause",
    "Clones": "Clone",
    "Cloned": "Clone",
    "Cloners": "Clone",
    "Depends": "Depend",
    "Dependency": "Depend",
    "Dependent": "Depend",
    "Depended on by": "Depend",
    "Duplicates": "Duplicate",
    "Duplicated": "Duplicate",
    "Duplicated by": "Duplicate",
    "Epic-Story": "Epic",
    "Incorporates": "Incorporate",
    "Incorporated": "Incorporate",
    "Relates": "Relate",
    "Related": "Relate",
    "Splits": "Split",
    "Split to": "Split",
    "Split from": "Split",
    "Sub-task": "Subtask",
    "Sub-Task": "Subtask",
    "Subtasks": "Subtask",
    "Supercedes": "Supersede",
    "Superceded by": "Supersede",
    "Supersedes": "Supersede",
}


class TypeNormalizer:
    """Maps raw link-type names onto canonical ones via a flat table.

    Unmapped names pass through stripped but otherwise unchanged.
    """

    def __init__(self, table: dict[str, str] | None = None):
        self.table = dict(DEFAULT_TYPE_MAP if table is None else table)

    @classmethod
    def from_file(cls, path) -> "TypeNormalizer":
        with open(path, encoding="utf-8") as fh:
            table = json.load(fh)
        if not isinstance(table, dict):
            raise MalformedRecord("type map must be a flat JSON object")
        return cls(table)

    def normalize(self, raw: str) -> str:
        name = (raw or "").strip()
        return self.table.get(name, name).strip()


@dataclass(frozen=True)
class Issue:
    repo_id: str
    project_key: str
    issue_key: str
    title: str
    description: str = ""
    issue_type: str = ""
    status: str = ""
    resolution: str | None = None
    created: str | None = None
    reporter_id: str | None = None
    creator_id: str | None = None
    assignee_id: str | None = None
    is_private: bool = False


@dataclass(frozen=True, order=True)
class Link:
    repo_id: str
    key_a: str
    key_b: str
    link_type: str

    def __post_init__(self):
        if self.key_a >= self.key_b:
            raise ValueError("link keys must be in canonical order key_a < key_b")

    @property
    def pair(self) -> tuple[str, str]:
        return (self.key_a, self.key_b)


def derive_project_key(issue_key: str) -> str | None:
    m = _PROJECT_KEY_RE.match(issue_key)
    return m.group(1) if m else None


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def parse_issue_record(line: str, line_number: int | None = None) -> Issue:
    """Parse one issues.jsonl line. Raises MalformedRecord on bad input."""
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"invalid JSON: {exc}", line_number) from exc
    if not isinstance(rec, dict):
        raise MalformedRecord("issue record must be a JSON object", line_number)
    for name in ("repo_id", "issue_key", "title"):
        if not rec.get(name):
            raise MalformedRecord(f"missing required field {name!r}", line_number)
    issue_key = str(rec["issue_key"])
    project_key = rec.get("project_key") or derive_project_key(issue_key)
    if not project_key:
        raise MalformedRecord(
            f"project_key absent and not derivable from issue_key {issue_key!r}", line_number
        )
    return Issue(
        repo_id=str(rec["repo_id"]),
        project_key=str(project_key),
        issue_key=issue_key,
        title=_nfc(str(rec["title"])),
        description=_nfc(str(rec.get("description") or "")),
        issue_type=str(rec.get("issue_type") or ""),
        status=str(rec.get("status") or ""),
        resolution=rec.get("resolution"),
        created=rec.get("created"),
        reporter_id=rec.get("reporter_id"),
        creator_id=rec.get("creator_id"),
        assignee_id=rec.get("assignee_id"),
        is_private=bool(rec.get("is_private", False)),
    )


def issue_to_record(issue: Issue) -> dict:
    """Inverse of parse_issue_record: parse(json.dumps(rec)) == issue."""
    rec = {
        "repo_id": issue.repo_id,
        "project_key": issue.project_key,
        "issue_key": issue.issue_key,
        "title": issue.title,
        "description": issue.description,
        "issue_type": issue.issue_type,
        "status": issue.status,
        "is_private": issue.is_private,
    }
    for name in ("resolution", "created", "reporter_id", "creator_id", "assignee_id"):
        value = getattr(issue, name)
        if value is not None:
            rec[name] = value
    return rec


def parse_link_record(
    line: str, normalizer: TypeNormalizer, line_number: int | None = None
) -> Link:
    """Parse one links.jsonl line into canonical undirected form."""
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"invalid JSON: {exc}", line_number) from exc
    if not isinstance(rec, dict):
        raise MalformedRecord("link record must be a JSON object", line_number)
    for name in ("repo_id", "key_a", "key_b", "link_type"):
        if not rec.get(name):
            raise MalformedRecord(f"missing required field {name!r}", line_number)
    key_a, key_b = str(rec["key_a"]), str(rec["key_b"])
    if key_a == key_b:
        raise SelfLink(f"link connects {key_a!r} to itself")
    if key_b < key_a:
        key_a, key_b = key_b, key_a
    link_type = normalizer.normalize(str(rec["link_type"]))
    if not link_type:
        raise MalformedRecord("link_type empty after normalization", line_number)
    return Link(repo_id=str(rec["repo_id"]), key_a=key_a, key_b=key_b, link_type=link_type)


def link_to_record(link: Link) -> dict:
    return {
        "repo_id": link.repo_id,
        "key_a": link.key_a,
        "key_b": link.key_b,
        "link_type": link.link_type,
    }


@dataclass
class ParseReport:
    """Per-file parse anomaly tally (lenient mode skips, strict mode aborts)."""

    parsed: int = 0
    malformed: int = 0
    self_links: int = 0
    messages: list[str] = field(default_factory=list)

    MAX_MESSAGES = 20

    def note(self, text: str):
        if len(self.messages) < self.MAX_MESSAGES:
            self.messages.append(text)

    @property
    def clean(self) -> bool:
        return self.malformed == 0 and self.self_links == 0


def read_issues_jsonl(path, strict: bool = False) -> tuple[list[Issue], ParseReport]:
    issues, report = [], ParseReport()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                issues.append(parse_issue_record(line, lineno))
                report.parsed += 1
            except MalformedRecord as exc:
                if strict:
                    raise
                report.malformed += 1
                report.note(str(exc))
    return issues, report


def read_links_jsonl(
    path, normalizer: TypeNormalizer | None = None, strict: bool = False
) -> tuple[list[Link], ParseReport]:
    normalizer = normalizer or TypeNormalizer()
    links, report = [], ParseReport()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                links.append(parse_link_record(line, normalizer, lineno))
                report.parsed += 1
            except SelfLink as exc:
                report.self_links += 1
                report.note(f"line {lineno}: {exc}")
            except MalformedRecord as exc:
                if strict:
                    raise
                report.malformed += 1
                report.note(str(exc))
    return links, report


@dataclass
class RepositorySnapshot:
    """Cleaned, immutable view of one repository's issues and links."""

    repo_id: str
    creation_year: int | None
    issues: dict[str, Issue]
    links: list[Link]
    dropped_private_link_count: int = 0
    dropped_multilink_count: int = 0
    # Pairs removed as multi-links; still off-limits for non-link sampling.
    multilink_pairs: frozenset[tuple[str, str]] = frozenset()

    def linked_pairs(self) -> set[tuple[str, str]]:
        """All pairs known to be linked, including removed multi-link pairs."""
        pairs = {link.pair for link in self.links}
        pairs.update(self.multilink_pairs)
        return pairs

    def link_type_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for link in self.links:
            counts[link.link_type] = counts.get(link.link_type, 0) + 1
        return counts


def _creation_year_from_issues(issues) -> int | None:
    years = []
    for issue in issues:
        if not issue.created:
            continue
        m = re.match(r"^\s*(\d{4})", str(issue.created))
        if m:
            years.append(int(m.group(1)))
    return min(years) if years else None


def build_snapshot(
    issues: list[Issue],
    links: list[Link],
    repo_id: str | None = None,
    creation_year: int | None = None,
) -> RepositorySnapshot:
    """Merge parsed records into a cleaned snapshot. Anomalies are counted, not fatal."""
    if repo_id is None:
        if issues:
            repo_id = issues[0].repo_id
        elif links:
            repo_id = links[0].repo_id
        else:
            repo_id = ""

    retained: dict[str, Issue] = {}
    for issue in issues:
        if issue.is_private:
            continue
        retained.setdefault(issue.issue_key, issue)

    dropped_private = 0
    by_pair: dict[tuple[str, str], set[str]] = {}
    for link in links:
        if link.key_a not in retained or link.key_b not in retained:
            dropped_private += 1
            continue
        by_pair.setdefault(link.pair, set()).add(link.link_type)

    clean_links: list[Link] = []
    multilink_pairs = set()
    for pair in sorted(by_pair):
        types = by_pair[pair]
        if len(types) > 1:
            multilink_pairs.add(pair)
            continue
        clean_links.append(Link(repo_id, pair[0], pair[1], next(iter(types))))

    if creation_year is None:
        creation_year = _creation_year_from_issues(retained.values())

    return RepositorySnapshot(
        repo_id=repo_id,
        creation_year=creation_year,
        issues=retained,
        links=clean_links,
        dropped_private_link_count=dropped_private,
        dropped_multilink_count=len(multilink_pairs),
        multilink_pairs=frozenset(multilink_pairs),
    )


def snapshot_to_json(snapshot: RepositorySnapshot) -> str:
    payload = {
        "repo_id": snapshot.repo_id,
        "creation_year": snapshot.creation_year,
        "issues": [issue_to_record(snapshot.issues[k]) for k in sorted(snapshot.issues)],
        "links": [link_to_record(link) for link in snapshot.links],
        "dropped_private_link_count": snapshot.dropped_private_link_count,
        "dropped_multilink_count": snapshot.dropped_multilink_count,
        "multilink_pairs": sorted(list(p) for p in snapshot.multilink_pairs),
    }
    return json.dumps(payload, sort_keys=True, ensure_ascii=False)


def snapshot_from_json(payload: str) -> RepositorySnapshot:
    data = json.loads(payload)
    issues = [parse_issue_record(json.dumps(rec)) for rec in data["issues"]]
    passthrough = TypeNormalizer(table={})
    links = [parse_link_record(json.dumps(rec), passthrough) for rec in data["links"]]
    return RepositorySnapshot(
        repo_id=data["repo_id"],
        creation_year=data["creation_year"],
        issues={i.issue_key: i for i in issues},
        links=links,
        dropped_private_link_count=int(data["dropped_private_link_count"]),
        dropped_multilink_count=int(data["dropped_multilink_count"]),
        multilink_pairs=frozenset(tuple(p) for p in data["multilink_pairs"]),
    )


@dataclass
class RepoStats:
    """Descriptive repository properties used by the correlation analyses."""

    repo_id: str
    issue_count: int
    link_count: int
    link_type_count: int
    project_count: int
    coverage: float
    cross_project_share: float | None
    creator_count: int
    reporter_count: int
    assignee_count: int
    total_user_count: int
    assignee_issue_ratio: float | None
    creation_year: int | None
    age: int | None


def repo_stats(snapshot: RepositorySnapshot, reference_year: int = 2021) -> RepoStats:
    issues = snapshot.issues
    links = snapshot.links

    linked_keys = {k for link in links for k in link.pair}
    coverage = len(linked_keys) / len(issues) if issues else 0.0

    cross = None
    if links:
        n_cross = sum(
            1
            for link in links
            if issues[link.key_a].project_key != issues[link.key_b].project_key
        )
        cross = n_cross / len(links)

    creators = {i.creator_id for i in issues.values() if i.creator_id}
    reporters = {i.reporter_id for i in issues.values() if i.reporter_id}
    assignees = {i.assignee_id for i in issues.values() if i.assignee_id}

    return RepoStats(
        repo_id=snapshot.repo_id,
        issue_count=len(issues),
        link_count=len(links),
        link_type_count=len({link.link_type for link in links}),
        project_count=len({i.project_key for i in issues.values()}),
        coverage=coverage,
        cross_project_share=cross,
        creator_count=len(creators),
        reporter_count=len(reporters),
        assignee_count=len(assignees),
        total_user_count=len(creators | reporters | assignees),
        assignee_issue_ratio=len(issues) / len(assignees) if assignees else None,
        creation_year=snapshot.creation_year,
        age=(reference_year - snapshot.creation_year)
        if snapshot.creation_year is not None
        else None,
    )
