"""Command-line pipeline: ingest -> build -> baseline -> eval -> analyze.

Every artifact embeds the resolved run configuration and its hash, so a rerun
with the same config and inputs reproduces byte-identical outputs (timestamps
only ever appear in log lines). Exit codes: 0 success, 1 completed with
skipped repos or recorded anomalies, 2 fatal.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import __version__
from .analysis import (
    correlation_row_to_dict,
    correlations_to_csv,
    f1_vs_presence_table,
    inter_type_f1_correlation,
    inter_type_matrix_to_csv,
    linktype_correlation_tables,
    linktype_property_table,
    per_type_matrix_to_csv,
    property_rows_to_dict,
    property_table_to_csv,
    repo_correlation_table,
    summarize_reports,
)
from .baselines import (
    LINEAR_SVM,
    RANDOM_FOREST,
    BaselineConfig,
    cross_validate,
    featurize_pair,
    model_to_json,
    predict,
    predict_proba,
    train,
)
from .dataset import (
    NON_LINK,
    TEST,
    TRAIN,
    VAL,
    DatasetSpec,
    build_dataset,
    common_types,
    read_dataset_jsonl,
    write_dataset_jsonl,
)
from .errors import (
    CoverageError,
    InsufficientCandidates,
    LinkLabError,
    RepoTooSmall,
    SchemaError,
    StratificationImpossible,
)
from .evaluate import (
    EvalReport,
    ClassMetrics,
    ConfusionMatrix,
    classification_report,
    confusion_to_csv,
    load_predictions,
    report_to_dict,
    report_to_text,
    topk_analysis,
    write_predictions_jsonl,
)
from .ingest import (
    TypeNormalizer,
    build_snapshot,
    read_issues_jsonl,
    read_links_jsonl,
    repo_stats,
    snapshot_from_json,
    snapshot_to_json,
)
from .textfeat import tfidf_fit
from .util import config_hash

log = logging.getLogger("linklab")

MODEL_KINDS = {"rf": RANDOM_FOREST, "svm": LINEAR_SVM}


@dataclass
class RunConfig:
    """Resolved run options; serialized into every artifact for provenance."""

    seed: int = 0
    strict: bool = False
    min_share: float = 0.01
    global_share: float = 0.02
    min_links: int = 50
    closed_statuses: list[str] = field(
        default_factory=lambda: ["Closed", "Resolved", "Done"]
    )
    within_project: bool = False
    model: str = "rf"
    trees: int = 100
    svm_epochs: int = 30
    svm_regularization: float = 1e-4
    class_weighting: str = "BALANCED"
    folds: int = 5
    topk: int = 0
    jobs: int = 0  # 0 = logical CPU count
    reference_year: int = 2021
    type_map: str | None = None
    log_level: str = "INFO"

    @classmethod
    def resolve(cls, args: argparse.Namespace) -> "RunConfig":
        """Config file first, explicit CLI flags override."""
        values: dict = {}
        config_path = getattr(args, "config", None)
        if config_path:
            with open(config_path, encoding="utf-8") as fh:
                loaded = json.load(fh)
            known = {f.name for f in fields(cls)}
            unknown = set(loaded) - known
            if unknown:
                raise SchemaError(f"unknown config keys: {sorted(unknown)}")
            values.update(loaded)
        for f in fields(cls):
            flag = getattr(args, f.name, None)
            if flag is not None:
                values[f.name] = flag
        return cls(**values)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def meta(self) -> dict:
        # jobs and log_level are operational knobs: they never change artifact
        # content, so they stay out of the provenance hash and header.
        cfg = {
            k: v for k, v in self.to_dict().items() if k not in ("jobs", "log_level")
        }
        return {"config": cfg, "config_hash": config_hash(cfg), "tool_version": __version__}

    @property
    def effective_jobs(self) -> int:
        import os

        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)

    def dataset_spec(self) -> DatasetSpec:
        return DatasetSpec(
            min_repo_share=self.min_share,
            global_common_share=self.global_share,
            min_repo_links=self.min_links,
            seed=self.seed,
            closed_statuses=frozenset(self.closed_statuses),
            non_links_within_project=self.within_project,
        )

    def baseline_config(self) -> BaselineConfig:
        return BaselineConfig(
            model_kind=MODEL_KINDS[self.model],
            n_trees=self.trees,
            svm_epochs=self.svm_epochs,
            svm_regularization=self.svm_regularization,
            class_weighting=self.class_weighting,
            seed=self.seed,
        )


def _write_json(path: Path, payload: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, ensure_ascii=False, indent=1)
        fh.write("\n")


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _write_csv(path: Path, text: str, cfg: "RunConfig"):
    """CSV artifact with the run's config hash stamped as a comment line."""
    _write_text(path, f"# config_hash={cfg.meta()['config_hash']}\n{text}")


# --------------------------------------------------------------------------
# ingest
# --------------------------------------------------------------------------


def _repo_dirs(corpus_dir: Path) -> list[Path]:
    if (corpus_dir / "issues.jsonl").exists():
        return [corpus_dir]
    dirs = [p for p in sorted(corpus_dir.iterdir()) if (p / "issues.jsonl").exists()]
    if not dirs:
        raise LinkLabError(f"no repo directories with issues.jsonl under {corpus_dir}")
    return dirs


def _ingest_repo(repo_dir_str: str, out_dir_str: str, cfg_dict: dict) -> dict:
    cfg = RunConfig(**cfg_dict)
    repo_dir, out_dir = Path(repo_dir_str), Path(out_dir_str)
    normalizer = TypeNormalizer.from_file(cfg.type_map) if cfg.type_map else TypeNormalizer()
    issues, issue_report = read_issues_jsonl(repo_dir / "issues.jsonl", strict=cfg.strict)
    links_path = repo_dir / "links.jsonl"
    if links_path.exists():
        links, link_report = read_links_jsonl(links_path, normalizer, strict=cfg.strict)
    else:
        links, link_report = [], None
    snapshot = build_snapshot(issues, links)
    out_path = out_dir / "snapshots" / f"{snapshot.repo_id}.snapshot.json"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    payload = json.loads(snapshot_to_json(snapshot))
    payload["meta"] = cfg.meta()
    _write_text(out_path, json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n")
    stats = repo_stats(snapshot, reference_year=cfg.reference_year)
    return {
        "repo_id": snapshot.repo_id,
        "issues_parsed": issue_report.parsed,
        "issues_malformed": issue_report.malformed,
        "links_parsed": link_report.parsed if link_report else 0,
        "links_malformed": link_report.malformed if link_report else 0,
        "self_links": link_report.self_links if link_report else 0,
        "dropped_private_links": snapshot.dropped_private_link_count,
        "dropped_multilink_pairs": snapshot.dropped_multilink_count,
        "retained_links": len(snapshot.links),
        "retained_issues": len(snapshot.issues),
        "coverage": stats.coverage,
        "messages": (issue_report.messages + (link_report.messages if link_report else [])),
    }


def cmd_ingest(args) -> int:
    cfg = RunConfig.resolve(args)
    corpus = Path(args.corpus)
    out = Path(args.out)
    repo_dirs = _repo_dirs(corpus)
    jobs = cfg.effective_jobs
    rows = []
    if jobs > 1 and len(repo_dirs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_ingest_repo, str(d), str(out), cfg.to_dict()) for d in repo_dirs
            ]
            rows = [f.result() for f in futures]
    else:
        rows = [_ingest_repo(str(d), str(out), cfg.to_dict()) for d in repo_dirs]
    rows.sort(key=lambda r: r["repo_id"])
    report = {"meta": cfg.meta(), "repos": rows}
    _write_json(out / "ingest_report.json", report)
    for row in rows:
        log.info(
            "%s: %d issues, %d links retained (%d private-dropped, %d multi-link pairs)",
            row["repo_id"],
            row["retained_issues"],
            row["retained_links"],
            row["dropped_private_links"],
            row["dropped_multilink_pairs"],
        )
    anomalies = sum(r["issues_malformed"] + r["links_malformed"] for r in rows)
    if anomalies:
        log.warning("skipped %d malformed records (lenient mode)", anomalies)
    return 0


# --------------------------------------------------------------------------
# build
# --------------------------------------------------------------------------


def _build_repo(snapshot_path_str: str, out_dir_str: str, cfg_dict: dict) -> dict:
    cfg = RunConfig(**cfg_dict)
    path, out_dir = Path(snapshot_path_str), Path(out_dir_str)
    snapshot = snapshot_from_json(path.read_text(encoding="utf-8"))
    spec = cfg.dataset_spec()
    try:
        examples, labels = build_dataset(snapshot, spec)
    except (RepoTooSmall, InsufficientCandidates, StratificationImpossible) as exc:
        return {"snapshot": str(path), "skipped": f"{type(exc).__name__}: {exc}"}
    out_path = out_dir / "datasets" / f"{snapshot.repo_id}.dataset.jsonl"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    meta = cfg.meta()
    meta.update({"repo_id": snapshot.repo_id, "spec": spec.to_meta(), "seed": spec.seed})
    write_dataset_jsonl(out_path, examples, labels, meta)
    return {"repo_id": snapshot.repo_id, "path": str(out_path)}


def _snapshot_paths(snapshots: str) -> list[Path]:
    root = Path(snapshots)
    if root.is_file():
        return [root]
    paths = sorted(root.glob("**/*.snapshot.json"))
    if not paths:
        raise LinkLabError(f"no *.snapshot.json under {root}")
    return paths


def cmd_build(args) -> int:
    cfg = RunConfig.resolve(args)
    out = Path(args.out)
    paths = _snapshot_paths(args.snapshots)
    jobs = cfg.effective_jobs
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_build_repo, str(p), str(out), cfg.to_dict()) for p in paths]
            results = [f.result() for f in futures]
    else:
        results = [_build_repo(str(p), str(out), cfg.to_dict()) for p in paths]
    built, skipped = [], []
    for path, result in zip(paths, results):
        if "skipped" in result:
            skipped.append({"snapshot": result["snapshot"], "reason": result["skipped"]})
            log.warning("skipped %s: %s", path.name, result["skipped"])
        else:
            built.append(result["repo_id"])
            log.info("%s -> %s", result["repo_id"], result["path"])
    _write_json(
        out / "build_report.json",
        {"meta": cfg.meta(), "built": sorted(built), "skipped": skipped},
    )
    if not built:
        log.error("no datasets built")
        return 2
    return 1 if skipped else 0


# --------------------------------------------------------------------------
# baseline
# --------------------------------------------------------------------------


def cmd_baseline(args) -> int:
    cfg = RunConfig.resolve(args)
    out = Path(args.out)
    examples, meta = read_dataset_jsonl(args.dataset)
    if not examples:
        log.error("dataset %s is empty", args.dataset)
        return 2
    stem = Path(args.dataset).name.replace(".dataset.jsonl", "").replace(".jsonl", "")
    bcfg = cfg.baseline_config()

    cv = cross_validate(bcfg, examples, folds=cfg.folds)
    cv_payload = {
        "meta": cfg.meta(),
        "repo_id": meta.get("repo_id", stem),
        "model_kind": cv.model_kind,
        "folds": cv.folds,
        "per_fold_macro_f1": cv.per_fold_macro_f1,
        "mean_macro_f1": cv.mean_macro_f1,
        "labels": cv.labels,
    }
    _write_json(out / f"{stem}.{cfg.model}.cv.json", cv_payload)
    log.info(
        "%s %s: 5-fold macro F1 %.4f (folds: %s)",
        stem,
        cfg.model,
        cv.mean_macro_f1,
        ", ".join(f"{v:.4f}" for v in cv.per_fold_macro_f1),
    )

    # Final model fit on TRAIN+VAL texts; optional TEST predictions for eval.
    fit_examples = [ex for ex in examples if ex.split in (TRAIN, VAL)]
    if not fit_examples:
        fit_examples = examples
    docs = []
    for ex in fit_examples:
        docs.append(f"{ex.issue_a.title} {ex.issue_a.description}")
        docs.append(f"{ex.issue_b.title} {ex.issue_b.description}")
    tfidf = tfidf_fit(docs)
    X = [featurize_pair(tfidf, ex) for ex in fit_examples]
    universe = meta.get("labels") or sorted({ex.label for ex in examples})
    model = train(
        bcfg,
        X,
        [ex.label for ex in fit_examples],
        dim=2 * tfidf.dim,
        feature_space=config_hash({"vocab": sorted(tfidf.vocabulary)}),
        label_order=universe,
    )
    model_path = out / f"{stem}.{cfg.model}.model.json"
    _write_text(model_path, model_to_json(model, extra_meta=cfg.meta()) + "\n")
    vec_dump = json.loads(tfidf.to_json())
    vec_dump["meta"] = cfg.meta()
    vec_path = out / f"{stem}.{cfg.model}.tfidf.json"
    _write_text(vec_path, json.dumps(vec_dump, sort_keys=True) + "\n")

    if args.emit_test_predictions:
        test_examples = [ex for ex in examples if ex.split == TEST]
        from .evaluate import Prediction, PredictionSet

        labels = universe
        records = []
        for ex in test_examples:
            vec = featurize_pair(tfidf, ex)
            scores = predict_proba(model, vec)
            full = {lab: scores.get(lab, 0.0) for lab in labels}
            records.append(Prediction(ex.example_id, ex.label, predict(model, vec), full))
        pred_set = PredictionSet(records, labels)
        pred_path = out / f"{stem}.{cfg.model}.predictions.jsonl"
        write_predictions_jsonl(pred_path, pred_set, meta=cfg.meta())
        log.info("wrote %s", pred_path)
    return 0


# --------------------------------------------------------------------------
# eval
# --------------------------------------------------------------------------


def cmd_eval(args) -> int:
    cfg = RunConfig.resolve(args)
    out = Path(args.out)
    examples, meta = read_dataset_jsonl(args.dataset)
    labels = meta.get("labels") or sorted({ex.label for ex in examples})
    predictions = load_predictions(args.predictions, examples, labels)
    report = classification_report(predictions)
    stem = Path(args.predictions).name.replace(".predictions.jsonl", "").replace(".jsonl", "")
    payload = {
        "meta": cfg.meta(),
        "repo_id": meta.get("repo_id", ""),
        "labels": labels,
        "report": report_to_dict(report),
    }
    if cfg.topk and cfg.topk > 0:
        payload["topk"] = topk_analysis(predictions, cfg.topk)
    _write_json(out / f"{stem}.report.json", payload)
    config_hash_line = f"config hash  {cfg.meta()['config_hash']}\n"
    _write_text(out / f"{stem}.report.txt", report_to_text(report) + config_hash_line)
    _write_csv(out / f"{stem}.confusion.csv", confusion_to_csv(report.confusion), cfg)
    if args.figures:
        from .figures import render_confusion_heatmap

        render_confusion_heatmap(
            report,
            out / f"{stem}.confusion.png",
            title=payload["repo_id"] or stem,
            metadata={"Description": f"config_hash={cfg.meta()['config_hash']}"},
        )
    log.info(
        "%s: macro F1 %.4f, weighted F1 %.4f, accuracy %.4f",
        stem,
        report.macro_f1,
        report.weighted_f1,
        report.accuracy,
    )
    return 0


# --------------------------------------------------------------------------
# analyze
# --------------------------------------------------------------------------


def _report_from_dict(payload: dict) -> EvalReport:
    rep = payload["report"]
    per_class = {
        lab: ClassMetrics(
            precision=m["precision"],
            recall=m["recall"],
            f1=m["f1"],
            support=m["support"],
            zero_division=m.get("zero_division", False),
        )
        for lab, m in rep["per_class"].items()
    }
    confusion = ConfusionMatrix(
        labels=rep["confusion"]["labels"],
        rows=rep["confusion"]["rows"],
        supports=rep["confusion"]["supports"],
        zero_support_labels=rep["confusion"].get("zero_support_labels", []),
    )
    return EvalReport(
        labels=rep["confusion"]["labels"],
        per_class=per_class,
        macro_f1=rep["macro_f1"],
        weighted_f1=rep["weighted_f1"],
        accuracy=rep["accuracy"],
        f1_std_dev=rep["f1_std_dev"],
        confusion=confusion,
        n_predictions=rep["n_predictions"],
    )


def cmd_analyze(args) -> int:
    cfg = RunConfig.resolve(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spec = cfg.dataset_spec()

    snapshots = {}
    for path in _snapshot_paths(args.snapshots):
        snap = snapshot_from_json(path.read_text(encoding="utf-8"))
        snapshots[snap.repo_id] = snap
    stats = {r: repo_stats(s, reference_year=cfg.reference_year) for r, s in snapshots.items()}

    # Common types across the corpus plus the non-link class.
    common = sorted(common_types(list(snapshots.values()), spec))
    types = common + [NON_LINK]

    # Optional dataset artifacts: non-link samples, training shares, label counts.
    non_links_by_repo: dict = {}
    training_share: dict[str, dict[str, float]] = {}
    predicted_types: dict[str, int] = {}
    if args.datasets:
        for path in sorted(Path(args.datasets).glob("**/*.dataset.jsonl")):
            examples, meta = read_dataset_jsonl(path)
            repo = meta.get("repo_id") or (examples[0].repo_id if examples else "")
            if not repo:
                continue
            predicted_types[repo] = len(meta.get("labels", []))
            non_links_by_repo[repo] = [ex for ex in examples if ex.label == NON_LINK]
            train_examples = [ex for ex in examples if ex.split == TRAIN]
            if train_examples:
                for t in {ex.label for ex in train_examples}:
                    count = sum(1 for ex in train_examples if ex.label == t)
                    training_share.setdefault(t, {})[repo] = count / len(train_examples)

    rows = linktype_property_table(snapshots, types, non_links_by_repo or None)
    repo_order = sorted(snapshots)
    for attribute, fname in (
        ("cosine", "linktype_cosine_medians.csv"),
        ("length", "linktype_length_medians.csv"),
        ("difference", "linktype_difference_medians.csv"),
        ("count", "linktype_counts.csv"),
    ):
        _write_csv(out / fname, property_table_to_csv(rows, attribute, repo_order), cfg)

    analysis_payload: dict = {
        "meta": cfg.meta(),
        "common_types": common,
        "linktype_properties": property_rows_to_dict(rows),
    }

    # Optional eval reports: per-repo macro F1 and per-type F1.
    reports: dict[str, EvalReport] = {}
    if args.reports:
        for path in sorted(Path(args.reports).glob("**/*.report.json")):
            payload = json.loads(path.read_text(encoding="utf-8"))
            repo = payload.get("repo_id") or path.name.replace(".report.json", "")
            if repo in reports:
                log.warning(
                    "multiple reports for repo %s; using %s (point --reports at "
                    "one model's reports)",
                    repo,
                    path.name,
                )
            reports[repo] = _report_from_dict(payload)

    exit_code = 0
    if reports:
        summary = summarize_reports(reports)
        _write_csv(
            out / "repo_summary.csv",
            "repo,macro_f1,weighted_f1,f1_std_dev,n_predictions\n"
            + "".join(
                f"{r['repo_id']},{r['macro_f1']:.4f},{r['weighted_f1']:.4f},"
                f"{r['f1_std_dev']:.4f},{r['n_predictions']}\n"
                for r in summary
            ),
            cfg,
        )
        analysis_payload["repo_summary"] = summary

        macro_by_repo = {r: rep.macro_f1 for r, rep in reports.items()}
        usable = sorted(set(macro_by_repo) & set(stats) & set(predicted_types))
        if len(usable) >= 3:
            table = repo_correlation_table(
                {r: stats[r] for r in usable},
                {r: macro_by_repo[r] for r in usable},
                {r: predicted_types[r] for r in usable},
            )
            _write_csv(out / "repo_property_correlations.csv", correlations_to_csv(table), cfg)
            analysis_payload["repo_property_correlations"] = [
                correlation_row_to_dict(r) for r in table
            ]
        else:
            log.warning(
                "repo correlations skipped: %d repos with stats+reports, need >= 3",
                len(usable),
            )
            exit_code = 1

        f1_by_type: dict[str, dict[str, float]] = {}
        support_by_type: dict[str, dict[str, float]] = {}
        for repo, rep in reports.items():
            for lab in rep.labels:
                if lab not in types:
                    continue
                metrics = rep.per_class[lab]
                if metrics.support > 0:
                    f1_by_type.setdefault(lab, {})[repo] = metrics.f1
                    support_by_type.setdefault(lab, {})[repo] = float(metrics.support)
        exclude = frozenset(args.exclude_repo or [])
        pooled, per_type = linktype_correlation_tables(
            rows,
            f1_by_type,
            support_by_type=support_by_type,
            training_share_by_type=training_share or None,
            exclude_repos=exclude,
        )
        _write_csv(out / "linktype_pooled_correlations.csv", correlations_to_csv(pooled), cfg)
        _write_csv(
            out / "linktype_f1_property_correlations.csv", per_type_matrix_to_csv(per_type), cfg
        )
        analysis_payload["linktype_pooled_correlations"] = [
            correlation_row_to_dict(r) for r in pooled
        ]
        analysis_payload["linktype_f1_property_correlations"] = [
            correlation_row_to_dict(r) for r in per_type
        ]

        matrix = inter_type_f1_correlation(f1_by_type)
        _write_csv(out / "inter_type_f1_matrix.csv", inter_type_matrix_to_csv(matrix), cfg)
        analysis_payload["inter_type_f1"] = {
            a: {b: correlation_row_to_dict(v) for b, v in row.items()}
            for a, row in matrix.items()
        }

        presence = f1_vs_presence_table(f1_by_type, sorted(reports))
        _write_csv(out / "f1_vs_presence.csv", correlations_to_csv(presence), cfg)
        analysis_payload["f1_vs_presence"] = [correlation_row_to_dict(r) for r in presence]

        if args.figures:
            from .figures import render_repo_scatter

            render_repo_scatter(
                summary,
                out / "repo_f1_scatter.png",
                metadata={"Description": f"config_hash={cfg.meta()['config_hash']}"},
            )

    _write_json(out / "analysis.json", analysis_payload)
    log.info("analysis artifacts written to %s", out)
    return exit_code


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="JSON file with RunConfig fields")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=None, help="worker processes")
    parser.add_argument("--reference-year", dest="reference_year", type=int, default=None)
    parser.add_argument("--log-level", dest="log_level", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linklab", description="Issue-tracker link mining workbench"
    )
    parser.add_argument("--version", action="version", version=f"linklab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse exports into cleaned repository snapshots")
    p.add_argument("--corpus", required=True, help="dir of <repo>/issues.jsonl [+ links.jsonl]")
    p.add_argument("--out", required=True)
    p.add_argument("--strict", action="store_true", default=None)
    p.add_argument("--type-map", dest="type_map", default=None, help="type_map.json path")
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("build", help="build labeled split datasets from snapshots")
    p.add_argument("--snapshots", required=True, help="snapshot file or directory")
    p.add_argument("--out", required=True)
    p.add_argument("--min-share", dest="min_share", type=float, default=None)
    p.add_argument("--global-share", dest="global_share", type=float, default=None)
    p.add_argument("--min-links", dest="min_links", type=int, default=None)
    p.add_argument(
        "--within-project",
        dest="within_project",
        action="store_true",
        default=None,
        help="sample non-links from same-project pairs only",
    )
    _add_common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("baseline", help="cross-validate and fit a TF-IDF baseline")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model", choices=sorted(MODEL_KINDS), default=None)
    p.add_argument("--trees", type=int, default=None)
    p.add_argument("--svm-epochs", dest="svm_epochs", type=int, default=None)
    p.add_argument("--folds", type=int, default=None)
    p.add_argument(
        "--emit-test-predictions",
        action="store_true",
        help="also fit on TRAIN+VAL and write TEST predictions.jsonl",
    )
    _add_common(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("eval", help="evaluate a predictions.jsonl against a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--topk", type=int, default=None)
    p.add_argument("--figures", action="store_true", help="render confusion heatmap PNG")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze", help="repository and link-type analyses")
    p.add_argument("--snapshots", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--datasets", help="directory of *.dataset.jsonl")
    p.add_argument("--reports", help="directory of *.report.json")
    p.add_argument("--global-share", dest="global_share", type=float, default=None)
    p.add_argument(
        "--exclude-repo",
        dest="exclude_repo",
        action="append",
        help="repo to drop from per-type F1 correlations (repeatable)",
    )
    p.add_argument("--figures", action="store_true", help="render scatter figure PNG")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = getattr(args, "log_level", None) or "INFO"
    logging.basicConfig(level=level.upper(), format="%(asctime)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CoverageError, SchemaError) as exc:
        log.error("%s", exc)
        return 2
    except LinkLabError as exc:
        log.error("%s", exc)
        return 2
    except FileNotFoundError as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
