"""Repository- and link-type-level analyses: descriptive tables and correlations.

Two-sided p-values come from the exact t-distribution identity
p = I_x(df/2, 1/2) with x = df / (df + t^2), where I is the regularized
incomplete beta function and t = r * sqrt((n-2) / (1-r^2)).
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

from scipy.special import betainc

from .dataset import NON_LINK, LinkExample
from .errors import ConstantSeries, LengthMismatch
from .evaluate import EvalReport
from .ingest import RepoStats, RepositorySnapshot
from .textfeat import (
    TfidfModel,
    TfidfParams,
    cosine_similarity,
    issue_token_length,
    tfidf_fit,
    tfidf_transform,
)


@dataclass(frozen=True)
class CorrelationResult:
    property: str
    r: float
    p: float
    n: int
    link_type: str | None = None
    note: str | None = None


@dataclass(frozen=True)
class SkippedRow:
    property: str
    reason: str
    link_type: str | None = None


def t_two_sided_p(t: float, df: int) -> float:
    """P(|T_df| >= |t|) via the regularized incomplete beta function."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return float(betainc(df / 2.0, 0.5, x))


def pearson(x, y, name: str = "", link_type: str | None = None) -> CorrelationResult:
    """Sample Pearson r with a two-sided p-value against t(n-2)."""
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    if len(xs) != len(ys):
        raise LengthMismatch(f"{name}: series lengths {len(xs)} != {len(ys)}")
    n = len(xs)
    if n < 3:
        raise LengthMismatch(f"{name}: need at least 3 points, got {n}")
    mx = sum(xs) / n
    my = sum(ys) / n
    dx = [v - mx for v in xs]
    dy = [v - my for v in ys]
    sxx = sum(v * v for v in dx)
    syy = sum(v * v for v in dy)
    if sxx == 0.0 or syy == 0.0:
        raise ConstantSeries(f"{name}: constant input series")
    r = sum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * math.sqrt((n - 2) / (1 - r * r))
        p = t_two_sided_p(t, n - 2)
    return CorrelationResult(property=name, r=r, p=p, n=n, link_type=link_type)


# --------------------------------------------------------------------------
# Repository-level correlation table.
# --------------------------------------------------------------------------

REPO_PROPERTIES = (
    "issues",
    "links",
    "projects",
    "predicted_types",
    "coverage",
    "cross_project_share",
    "total_users",
    "assignees",
    "creators",
    "reporters",
    "assignee_issue_ratio",
    "age",
)


def _repo_property_value(stats: RepoStats, prop: str):
    return {
        "issues": stats.issue_count,
        "links": stats.link_count,
        "projects": stats.project_count,
        "coverage": stats.coverage,
        "cross_project_share": stats.cross_project_share,
        "total_users": stats.total_user_count,
        "assignees": stats.assignee_count,
        "creators": stats.creator_count,
        "reporters": stats.reporter_count,
        "assignee_issue_ratio": stats.assignee_issue_ratio,
        "age": stats.age,
    }[prop]


def repo_correlation_table(
    stats_by_repo: dict[str, RepoStats],
    macro_f1_by_repo: dict[str, float],
    predicted_type_counts: dict[str, int],
) -> list[CorrelationResult]:
    """Pearson r of each repository property against the per-repo macro F1."""
    repos = sorted(set(stats_by_repo) & set(macro_f1_by_repo))
    rows = []
    for prop in REPO_PROPERTIES:
        xs, ys = [], []
        for repo in repos:
            if prop == "predicted_types":
                value = predicted_type_counts.get(repo)
            else:
                value = _repo_property_value(stats_by_repo[repo], prop)
            if value is None:
                continue
            xs.append(float(value))
            ys.append(macro_f1_by_repo[repo])
        rows.append(pearson(xs, ys, name=prop))
    return rows


# --------------------------------------------------------------------------
# Link-type property table (median cosine similarity / length / difference).
# --------------------------------------------------------------------------


@dataclass
class LinkTypePropertyRow:
    link_type: str
    cosine_by_repo: dict[str, float] = field(default_factory=dict)
    length_by_repo: dict[str, float] = field(default_factory=dict)
    difference_by_repo: dict[str, float] = field(default_factory=dict)
    count_by_repo: dict[str, int] = field(default_factory=dict)

    def _mean(self, values: dict[str, float]) -> float | None:
        return sum(values.values()) / len(values) if values else None

    @property
    def mean_cosine(self) -> float | None:
        return self._mean(self.cosine_by_repo)

    @property
    def mean_length(self) -> float | None:
        return self._mean(self.length_by_repo)

    @property
    def mean_difference(self) -> float | None:
        return self._mean(self.difference_by_repo)

    @property
    def mean_count(self) -> float | None:
        return self._mean({k: float(v) for k, v in self.count_by_repo.items()})


def fit_repo_tfidf(
    snapshot: RepositorySnapshot, params: TfidfParams = TfidfParams()
) -> TfidfModel:
    """TF-IDF model over every retained issue's title + description."""
    docs = [
        f"{issue.title} {issue.description}"
        for _, issue in sorted(snapshot.issues.items())
    ]
    return tfidf_fit(docs, params)


def _pair_measures(model: TfidfModel, issue_a, issue_b, cache: dict):
    def vec(issue):
        if issue.issue_key not in cache:
            cache[issue.issue_key] = tfidf_transform(
                model, f"{issue.title} {issue.description}"
            )
        return cache[issue.issue_key]

    min_len = model.params.min_token_len
    len_a = issue_token_length(issue_a.title, issue_a.description, min_len)
    len_b = issue_token_length(issue_b.title, issue_b.description, min_len)
    return cosine_similarity(vec(issue_a), vec(issue_b)), len_a + len_b, abs(len_a - len_b)


def linktype_property_table(
    snapshots: dict[str, RepositorySnapshot],
    types: list[str],
    non_links_by_repo: dict[str, list[LinkExample]] | None = None,
    tfidf_by_repo: dict[str, TfidfModel] | None = None,
    params: TfidfParams = TfidfParams(),
) -> list[LinkTypePropertyRow]:
    """Per (repo, type) medians of pair cosine similarity, pair token length,
    and absolute token-length difference; NON_LINK rows use sampled non-links.

    Cosine similarity is computed on the concatenated title + description of
    each issue; repos where a type is absent simply have no entry (gap)."""
    rows = {t: LinkTypePropertyRow(t) for t in types}
    for repo in sorted(snapshots):
        snap = snapshots[repo]
        model = (tfidf_by_repo or {}).get(repo) or fit_repo_tfidf(snap, params)
        cache: dict = {}
        per_type: dict[str, list[tuple[float, int, int]]] = {}
        for link in snap.links:
            if link.link_type not in rows or link.link_type == NON_LINK:
                continue
            measures = _pair_measures(
                model, snap.issues[link.key_a], snap.issues[link.key_b], cache
            )
            per_type.setdefault(link.link_type, []).append(measures)
        if NON_LINK in rows and non_links_by_repo and repo in non_links_by_repo:
            for ex in non_links_by_repo[repo]:
                measures = _pair_measures(model, ex.issue_a, ex.issue_b, cache)
                per_type.setdefault(NON_LINK, []).append(measures)
        for link_type, triples in per_type.items():
            row = rows[link_type]
            row.cosine_by_repo[repo] = statistics.median(t[0] for t in triples)
            row.length_by_repo[repo] = statistics.median(t[1] for t in triples)
            row.difference_by_repo[repo] = statistics.median(t[2] for t in triples)
            row.count_by_repo[repo] = len(triples)
    return [rows[t] for t in types]


# --------------------------------------------------------------------------
# Link-type correlation tables.
# --------------------------------------------------------------------------

POOLED_PROPERTIES = ("count", "difference", "length", "cosine")


def linktype_correlation_tables(
    rows: list[LinkTypePropertyRow],
    f1_by_type: dict[str, dict[str, float]],
    support_by_type: dict[str, dict[str, float]] | None = None,
    training_share_by_type: dict[str, dict[str, float]] | None = None,
    exclude_repos: frozenset[str] = frozenset(),
):
    """(a) pooled: type-level mean properties vs type-level mean F1;
    (b) per type: F1 vs per-repo properties across repos (excluded repos
    dropped from (b) only). Rows that cannot be computed become SkippedRow."""
    by_type = {row.link_type: row for row in rows}
    types = [t for t in by_type if t in f1_by_type and f1_by_type[t]]

    pooled: list[CorrelationResult | SkippedRow] = []
    mean_f1 = {t: sum(f1_by_type[t].values()) / len(f1_by_type[t]) for t in types}
    prop_getters = {
        "count": lambda r: r.mean_count,
        "difference": lambda r: r.mean_difference,
        "length": lambda r: r.mean_length,
        "cosine": lambda r: r.mean_cosine,
    }
    for prop in POOLED_PROPERTIES:
        points = [
            (prop_getters[prop](by_type[t]), mean_f1[t])
            for t in sorted(types)
            if prop_getters[prop](by_type[t]) is not None
        ]
        try:
            pooled.append(pearson([p[0] for p in points], [p[1] for p in points], name=prop))
        except (ConstantSeries, LengthMismatch) as exc:
            pooled.append(SkippedRow(property=prop, reason=str(exc)))

    per_type: list[CorrelationResult | SkippedRow] = []
    prop_by_repo = {
        "support": support_by_type,
        "training_share": training_share_by_type,
        "length": {t: by_type[t].length_by_repo for t in by_type},
        "difference": {t: by_type[t].difference_by_repo for t in by_type},
        "cosine": {t: by_type[t].cosine_by_repo for t in by_type},
    }
    for link_type in sorted(types):
        f1s = f1_by_type[link_type]
        for prop, table in prop_by_repo.items():
            if table is None or link_type not in table:
                continue
            values = table[link_type]
            repos = sorted(
                r for r in values if r in f1s and r not in exclude_repos and values[r] is not None
            )
            try:
                per_type.append(
                    pearson(
                        [values[r] for r in repos],
                        [f1s[r] for r in repos],
                        name=prop,
                        link_type=link_type,
                    )
                )
            except (ConstantSeries, LengthMismatch) as exc:
                per_type.append(SkippedRow(property=prop, reason=str(exc), link_type=link_type))
    return pooled, per_type


def inter_type_f1_correlation(
    f1_by_type: dict[str, dict[str, float]]
) -> dict[str, dict[str, CorrelationResult | SkippedRow]]:
    """Pairwise Pearson r of per-repo F1 between link types (n >= 3 repos)."""
    types = sorted(f1_by_type)
    out: dict[str, dict[str, CorrelationResult | SkippedRow]] = {}
    for a in types:
        out[a] = {}
        for b in types:
            if a == b:
                n = len(f1_by_type[a])
                out[a][b] = CorrelationResult(property="f1", r=1.0, p=0.0, n=n, link_type=a)
                continue
            repos = sorted(set(f1_by_type[a]) & set(f1_by_type[b]))
            if len(repos) < 3:
                out[a][b] = SkippedRow(
                    property="f1", reason=f"co-occur in {len(repos)} repos", link_type=a
                )
                continue
            try:
                result = pearson(
                    [f1_by_type[a][r] for r in repos],
                    [f1_by_type[b][r] for r in repos],
                    name=f"{a}~{b}",
                    link_type=a,
                )
            except ConstantSeries as exc:
                result = SkippedRow(property="f1", reason=str(exc), link_type=a)
            out[a][b] = result
    return out


def correlate_f1_with_presence(
    f1_by_repo: dict[str, float], presence_by_repo: dict[str, bool], name: str = "presence"
) -> CorrelationResult:
    """Point-biserial r: a type's F1 against a 0/1 presence indicator."""
    repos = sorted(set(f1_by_repo) & set(presence_by_repo))
    result = pearson(
        [f1_by_repo[r] for r in repos],
        [1.0 if presence_by_repo[r] else 0.0 for r in repos],
        name=name,
    )
    return CorrelationResult(
        property=result.property,
        r=result.r,
        p=result.p,
        n=result.n,
        note="point-biserial (binary second series)",
    )


# --------------------------------------------------------------------------
# Emitters.
# --------------------------------------------------------------------------


def summarize_reports(reports: dict[str, EvalReport]) -> list[dict]:
    """Per-repo summary rows (macro/weighted F1 and across-class std dev)."""
    return [
        {
            "repo_id": repo,
            "macro_f1": reports[repo].macro_f1,
            "weighted_f1": reports[repo].weighted_f1,
            "f1_std_dev": reports[repo].f1_std_dev,
            "n_predictions": reports[repo].n_predictions,
        }
        for repo in sorted(reports)
    ]


def correlations_to_csv(rows: list[CorrelationResult | SkippedRow]) -> str:
    lines = ["link_type,property,r,p,n,note"]
    for row in rows:
        lt = row.link_type or ""
        if isinstance(row, SkippedRow):
            lines.append(f"{lt},{row.property},,,,skipped: {row.reason}")
        else:
            lines.append(f"{lt},{row.property},{row.r:.6f},{row.p:.6f},{row.n},{row.note or ''}")
    return "\n".join(lines) + "\n"


def correlation_row_to_dict(row: CorrelationResult | SkippedRow) -> dict:
    if isinstance(row, SkippedRow):
        return {
            "property": row.property,
            "link_type": row.link_type,
            "skipped": True,
            "reason": row.reason,
        }
    return {
        "property": row.property,
        "link_type": row.link_type,
        "r": row.r,
        "p": row.p,
        "n": row.n,
        "note": row.note,
    }


def property_table_to_csv(
    rows: list[LinkTypePropertyRow], attribute: str, repos: list[str]
) -> str:
    """Repo-per-row matrix of one property (cosine/length/difference/count);
    absent (repo, type) combinations are left empty; last row is the
    cross-repo unweighted mean."""
    getter = {
        "cosine": lambda row: row.cosine_by_repo,
        "length": lambda row: row.length_by_repo,
        "difference": lambda row: row.difference_by_repo,
        "count": lambda row: row.count_by_repo,
    }[attribute]
    types = [row.link_type for row in rows]
    lines = ["repo," + ",".join(types)]
    for repo in repos:
        cells = []
        for row in rows:
            value = getter(row).get(repo)
            cells.append("" if value is None else f"{value:g}")
        lines.append(repo + "," + ",".join(cells))
    means = []
    for row in rows:
        mean = row._mean({k: float(v) for k, v in getter(row).items()})
        means.append("" if mean is None else f"{mean:.4f}")
    lines.append("mean," + ",".join(means))
    return "\n".join(lines) + "\n"


def property_rows_to_dict(rows: list[LinkTypePropertyRow]) -> dict:
    return {
        row.link_type: {
            "cosine_by_repo": row.cosine_by_repo,
            "length_by_repo": row.length_by_repo,
            "difference_by_repo": row.difference_by_repo,
            "count_by_repo": row.count_by_repo,
            "mean_cosine": row.mean_cosine,
            "mean_length": row.mean_length,
            "mean_difference": row.mean_difference,
            "mean_count": row.mean_count,
        }
        for row in rows
    }


def inter_type_matrix_to_csv(
    matrix: dict[str, dict[str, CorrelationResult | SkippedRow]]
) -> str:
    types = sorted(matrix)
    lines = ["type," + ",".join(types)]
    for a in types:
        cells = []
        for b in types:
            entry = matrix[a][b]
            cells.append("" if isinstance(entry, SkippedRow) else f"{entry.r:.4f}")
        lines.append(a + "," + ",".join(cells))
    return "\n".join(lines) + "\n"


PER_TYPE_PROPERTIES = ("support", "training_share", "length", "difference", "cosine")


def per_type_matrix_to_csv(rows: list[CorrelationResult | SkippedRow]) -> str:
    """Property-per-row, type-per-column matrix of r values; skipped cells
    are left blank (details live in the JSON emission)."""
    cells: dict[tuple[str, str], str] = {}
    types: list[str] = []
    for row in rows:
        if row.link_type and row.link_type not in types:
            types.append(row.link_type)
        if isinstance(row, CorrelationResult) and row.link_type:
            cells[(row.property, row.link_type)] = f"{row.r:.4f}"
    types.sort()
    present = [p for p in PER_TYPE_PROPERTIES if any((p, t) in cells for t in types)]
    lines = ["property," + ",".join(types)]
    for prop in present:
        lines.append(prop + "," + ",".join(cells.get((prop, t), "") for t in types))
    return "\n".join(lines) + "\n"


def f1_vs_presence_table(
    f1_by_type: dict[str, dict[str, float]], all_repos: list[str]
) -> list[CorrelationResult | SkippedRow]:
    """Point-biserial r of each type's per-repo F1 against the presence of
    every other type in those repos."""
    out: list[CorrelationResult | SkippedRow] = []
    for a in sorted(f1_by_type):
        for b in sorted(f1_by_type):
            if a == b:
                continue
            presence = {repo: repo in f1_by_type[b] for repo in all_repos}
            name = f"presence_of_{b}"
            try:
                result = correlate_f1_with_presence(f1_by_type[a], presence, name=name)
                out.append(
                    CorrelationResult(
                        property=name,
                        r=result.r,
                        p=result.p,
                        n=result.n,
                        link_type=a,
                        note=result.note,
                    )
                )
            except (ConstantSeries, LengthMismatch) as exc:
                out.append(SkippedRow(property=name, reason=str(exc), link_type=a))
    return out
