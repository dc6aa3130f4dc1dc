import json

import pytest

from linklab.errors import MalformedRecord, SelfLink
from linklab.ingest import (
    TypeNormalizer,
    build_snapshot,
    issue_to_record,
    parse_issue_record,
    parse_link_record,
    read_issues_jsonl,
    read_links_jsonl,
    repo_stats,
    snapshot_from_json,
    snapshot_to_json,
)
from conftest import make_issue, make_link

NORM = TypeNormalizer()


def test_parse_minimal_issue():
    line = json.dumps(
        {
            "repo_id": "qt",
            "issue_key": "QTBUG-1",
            "project_key": "QTBUG",
            "title": "Crash",
            "description": "",
            "issue_type": "Bug",
            "status": "Closed",
            "is_private": False,
        }
    )
    issue = parse_issue_record(line)
    assert issue.description == ""
    assert issue.resolution is None
    assert not issue.is_private


def test_parse_issue_missing_title():
    with pytest.raises(MalformedRecord):
        parse_issue_record(json.dumps({"repo_id": "qt", "issue_key": "QTBUG-2"}))


def test_parse_issue_bad_json_reports_line_number():
    with pytest.raises(MalformedRecord) as err:
        parse_issue_record("{not json", line_number=7)
    assert "line 7" in str(err.value)


def test_parse_issue_derives_project_key():
    issue = parse_issue_record(
        json.dumps({"repo_id": "a", "issue_key": "ZOOKEEPER-3920", "title": "t"})
    )
    assert issue.project_key == "ZOOKEEPER"


def test_parse_issue_underivable_project_key():
    with pytest.raises(MalformedRecord):
        parse_issue_record(json.dumps({"repo_id": "a", "issue_key": "weird key", "title": "t"}))


def test_issue_round_trip():
    issue = parse_issue_record(
        json.dumps(
            {
                "repo_id": "a",
                "issue_key": "AB-1",
                "title": "café crash",
                "description": "steps to reproduce",
                "issue_type": "Bug",
                "status": "Closed",
                "resolution": "Fixed",
                "created": "2019-05-06T07:08:09+00:00",
                "reporter_id": "u1",
                "creator_id": "u2",
                "assignee_id": "u3",
                "is_private": False,
            }
        )
    )
    assert parse_issue_record(json.dumps(issue_to_record(issue))) == issue


def test_parse_link_canonical_order_and_normalization():
    link = parse_link_record(
        json.dumps({"repo_id": "r", "key_a": "B-2", "key_b": "B-1", "link_type": "Blocks"}),
        NORM,
    )
    assert (link.key_a, link.key_b) == ("B-1", "B-2")
    assert link.link_type == "Block"


def test_parse_self_link():
    with pytest.raises(SelfLink):
        parse_link_record(
            json.dumps({"repo_id": "r", "key_a": "A-1", "key_b": "A-1", "link_type": "Relate"}),
            NORM,
        )


def test_unmapped_type_passes_through():
    assert NORM.normalize("Bonfire Testing") == "Bonfire Testing"
    assert NORM.normalize("  Relates ") == "Relate"


def test_type_map_from_file(tmp_path):
    path = tmp_path / "type_map.json"
    path.write_text(json.dumps({"Weird": "Relate"}))
    norm = TypeNormalizer.from_file(path)
    assert norm.normalize("Weird") == "Relate"
    assert norm.normalize("Blocks") == "Blocks"  # file replaces the default table


def test_reversed_duplicate_links_collapse():
    issues = [make_issue("A-1"), make_issue("A-2")]
    links = [make_link("A-1", "A-2", "Duplicate"), make_link("A-2", "A-1", "Duplicate")]
    snap = build_snapshot(issues, links)
    assert len(snap.links) == 1
    assert snap.dropped_multilink_count == 0


def test_multilink_pair_removed_and_counted():
    issues = [make_issue("A-1"), make_issue("A-2")]
    links = [make_link("A-1", "A-2", "Duplicate"), make_link("A-1", "A-2", "Block")]
    snap = build_snapshot(issues, links)
    assert snap.links == []
    assert snap.dropped_multilink_count == 1
    assert ("A-1", "A-2") in snap.multilink_pairs


def test_private_and_unresolved_endpoints_dropped():
    issues = [make_issue("A-1"), make_issue("A-2", private=True)]
    links = [
        make_link("A-1", "A-2", "Relate"),  # private endpoint
        make_link("A-1", "A-9", "Relate"),  # missing endpoint, treated private
    ]
    snap = build_snapshot(issues, links)
    assert snap.links == []
    assert snap.dropped_private_link_count == 2
    assert "A-2" not in snap.issues


def test_clean_corpus_keeps_everything():
    issues = [make_issue(f"A-{i}") for i in range(1, 202)]
    links = [make_link(f"A-{i}", f"A-{i + 100}", "Relate") for i in range(1, 101)]
    snap = build_snapshot(issues, links)
    assert len(snap.links) == 100
    assert snap.dropped_private_link_count == 0
    assert snap.dropped_multilink_count == 0


def test_crafted_corpus_hand_derived_counts():
    # 3 multi-typed pairs, 2 private-endpoint links, 1 reversed duplicate,
    # plus 4 clean links.
    issues = [make_issue(f"C-{i}") for i in range(1, 13)] + [make_issue("C-99", private=True)]
    links = []
    for i, (a, b) in enumerate([("C-1", "C-2"), ("C-3", "C-4"), ("C-5", "C-6")]):
        links.append(make_link(a, b, "Relate"))
        links.append(make_link(a, b, ["Block", "Duplicate", "Clone"][i]))
    links.append(make_link("C-7", "C-99", "Relate"))  # private issue endpoint
    links.append(make_link("C-7", "C-50", "Relate"))  # absent issue endpoint
    links.append(make_link("C-8", "C-9", "Duplicate"))
    links.append(make_link("C-9", "C-8", "Duplicate"))  # reversed duplicate
    links.append(make_link("C-10", "C-11", "Subtask"))
    links.append(make_link("C-11", "C-12", "Epic"))
    links.append(make_link("C-7", "C-8", "Relate"))
    snap = build_snapshot(issues, links)
    # Hand-derived: multi-typed pairs gone (3), private-ish links gone (2),
    # reversed duplicate collapses, leaving C-8/C-9, C-10/C-11, C-11/C-12, C-7/C-8.
    assert snap.dropped_multilink_count == 3
    assert snap.dropped_private_link_count == 2
    assert len(snap.links) == 4


def test_snapshot_idempotent_rebuild():
    issues = [make_issue(f"A-{i}") for i in range(1, 8)]
    links = [
        make_link("A-1", "A-2", "Relate"),
        make_link("A-2", "A-3", "Block"),
        make_link("A-4", "A-5", "Duplicate"),
    ]
    snap = build_snapshot(issues, links)
    again = build_snapshot(list(snap.issues.values()), list(snap.links))
    assert again.links == snap.links
    assert again.issues == snap.issues
    assert again.dropped_private_link_count == 0
    assert again.dropped_multilink_count == 0


def test_snapshot_json_round_trip():
    issues = [make_issue(f"A-{i}", created="2014-01-01T00:00:00+00:00") for i in range(1, 5)]
    links = [make_link("A-1", "A-2", "Relate"), make_link("A-3", "A-4", "Block")]
    snap = build_snapshot(issues, links)
    back = snapshot_from_json(snapshot_to_json(snap))
    assert back.issues == snap.issues
    assert back.links == snap.links
    assert back.creation_year == 2014
    assert back.multilink_pairs == snap.multilink_pairs


def test_lenient_and_strict_file_reading(tmp_path):
    path = tmp_path / "issues.jsonl"
    good = json.dumps({"repo_id": "r", "issue_key": "A-1", "title": "ok"})
    path.write_text(good + "\n{broken\n", encoding="utf-8")
    issues, report = read_issues_jsonl(path)
    assert len(issues) == 1 and report.malformed == 1
    with pytest.raises(MalformedRecord):
        read_issues_jsonl(path, strict=True)

    lpath = tmp_path / "links.jsonl"
    lpath.write_text(
        json.dumps({"repo_id": "r", "key_a": "A-1", "key_b": "A-1", "link_type": "Relate"})
        + "\n",
        encoding="utf-8",
    )
    links, lreport = read_links_jsonl(lpath)
    assert links == [] and lreport.self_links == 1


def test_repo_stats_small():
    issues = [make_issue(f"A-{i}", assignee_id=f"u{i % 2}") for i in range(1, 11)]
    links = [make_link("A-1", "A-2", "Relate"), make_link("A-2", "A-3", "Block")]
    snap = build_snapshot(issues, links, creation_year=2016)
    stats = repo_stats(snap, reference_year=2021)
    assert stats.issue_count == 10
    assert stats.link_count == 2
    assert abs(stats.coverage - 0.30) < 1e-12
    assert stats.cross_project_share == 0.0
    assert stats.link_type_count == 2
    assert stats.assignee_count == 2
    assert stats.assignee_issue_ratio == 5.0
    assert stats.age == 5


def test_repo_stats_cross_project():
    issues = [make_issue("AA-1"), make_issue("BB-1"), make_issue("AA-2")]
    links = [make_link("AA-1", "BB-1", "Relate"), make_link("AA-1", "AA-2", "Relate")]
    stats = repo_stats(build_snapshot(issues, links))
    assert abs(stats.cross_project_share - 0.5) < 1e-12
    assert stats.project_count == 2


def test_repo_stats_empty_and_no_links():
    empty = repo_stats(build_snapshot([], []))
    assert empty.issue_count == 0 and empty.coverage == 0.0
    assert empty.cross_project_share is None
    assert empty.assignee_issue_ratio is None

    no_links = repo_stats(build_snapshot([make_issue("A-1")], []))
    assert no_links.coverage == 0.0
    assert no_links.cross_project_share is None
