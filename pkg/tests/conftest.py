import random

import pytest

from linklab.dataset import LinkExample
from linklab.ingest import Issue, Link, build_snapshot
from linklab.util import example_id


def make_issue(key, repo="demo", title="a title here", description="", status="Closed",
               resolution=None, private=False, **kw):
    return Issue(
        repo_id=repo,
        project_key=key.rsplit("-", 1)[0],
        issue_key=key,
        title=title,
        description=description,
        status=status,
        resolution=resolution,
        is_private=private,
        **kw,
    )


def make_link(a, b, link_type, repo="demo"):
    if b < a:
        a, b = b, a
    return Link(repo_id=repo, key_a=a, key_b=b, link_type=link_type)


def pair_example(issue_a, issue_b, label, split="UNASSIGNED"):
    a, b = sorted((issue_a, issue_b), key=lambda i: i.issue_key)
    return LinkExample(
        example_id=example_id(a.repo_id, a.issue_key, b.issue_key),
        repo_id=a.repo_id,
        issue_a=a,
        issue_b=b,
        label=label,
        split=split,
    )


def separable_corpus(n_per_class=200, n_tokens=25, seed=0):
    """Three classes with fully disjoint vocabularies: trivially separable."""
    rng = random.Random(seed)
    vocab = {c: [f"{c.lower()}word{i}" for i in range(n_tokens)] for c in ("Alpha", "Beta", "Gamma")}
    examples = []
    counter = 0
    for cls, words in vocab.items():
        for _ in range(n_per_class):
            counter += 2
            text = [rng.choice(words) for _ in range(16)]
            a = make_issue(f"SEP-{counter - 1}", title=" ".join(text[:5]),
                           description=" ".join(text[5:10]))
            b = make_issue(f"SEP-{counter}", title=" ".join(text[10:13]),
                           description=" ".join(text[13:]))
            examples.append(pair_example(a, b, cls))
    return examples


@pytest.fixture(scope="session")
def separable_examples():
    return separable_corpus()


def synthetic_snapshot(n_issues=60, links_spec=None, repo="demo", seed=0,
                       open_share=0.0, duplicate_share=0.0):
    """Snapshot with the requested per-type link counts over random pairs."""
    rng = random.Random(seed)
    issues = []
    for i in range(n_issues):
        status = "Closed"
        resolution = None
        if open_share and rng.random() < open_share:
            status = "Open"
        elif duplicate_share and rng.random() < duplicate_share:
            resolution = "Duplicate"
        issues.append(
            make_issue(
                f"SYN-{i+1}",
                repo=repo,
                title=f"issue number {i+1}",
                description="some descriptive words",
                status=status,
                resolution=resolution,
                created="2015-03-04T10:00:00+00:00",
            )
        )
    links = []
    used = set()
    for link_type, count in (links_spec or {}).items():
        while count > 0:
            i, j = rng.sample(range(n_issues), 2)
            a, b = sorted((issues[i].issue_key, issues[j].issue_key))
            if (a, b) in used:
                continue
            used.add((a, b))
            links.append(make_link(a, b, link_type, repo=repo))
            count -= 1
    return build_snapshot(issues, links, repo_id=repo)
