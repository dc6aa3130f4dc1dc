"""Prediction-set evaluation: per-class P/R/F1, aggregates, confusion, top-k.

Conventions: zero-denominator precision/recall/F1 are defined as 0 and
flagged; the confusion matrix is row-normalized with rows ordered by
descending true-label support (ties alphabetical); score dicts, when present,
must cover the whole label universe and argmax-match the predicted label.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .dataset import TEST, LinkExample
from .errors import (
    CoverageError,
    EmptyPredictions,
    MissingScores,
    SchemaError,
    UnknownLabel,
)


@dataclass(frozen=True)
class Prediction:
    example_id: str
    true_label: str
    predicted_label: str
    scores: dict[str, float] | None = None


@dataclass
class PredictionSet:
    """Validated predictions over a fixed label universe."""

    records: list[Prediction]
    labels: list[str]

    def __post_init__(self):
        universe = set(self.labels)
        if len(universe) != len(self.labels):
            raise SchemaError("label universe contains duplicates")
        seen = set()
        for rec in self.records:
            if rec.example_id in seen:
                raise CoverageError(f"duplicate example_id {rec.example_id!r}")
            seen.add(rec.example_id)
            if rec.predicted_label not in universe:
                raise SchemaError(
                    f"{rec.example_id}: predicted label {rec.predicted_label!r} not in universe"
                )
            if rec.scores is not None:
                if set(rec.scores) != universe:
                    raise SchemaError(
                        f"{rec.example_id}: scores must cover the full label universe"
                    )
                if self._argmax(rec.scores) != rec.predicted_label:
                    raise SchemaError(
                        f"{rec.example_id}: argmax of scores != predicted_label"
                    )

    def _argmax(self, scores: dict[str, float]) -> str:
        # Ties resolve to the earliest label in universe order.
        best = None
        for label in self.labels:
            if best is None or scores[label] > scores[best]:
                best = label
        return best

    @property
    def has_scores(self) -> bool:
        return all(rec.scores is not None for rec in self.records)


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    zero_division: bool = False


@dataclass
class ConfusionMatrix:
    labels: list[str]  # ordered by descending support, ties alphabetical
    rows: list[list[float]]  # row-normalized; zero-support rows all zero
    supports: list[int]
    zero_support_labels: list[str] = field(default_factory=list)


@dataclass
class EvalReport:
    labels: list[str]  # ordered by descending support, ties alphabetical
    per_class: dict[str, ClassMetrics]
    macro_f1: float
    weighted_f1: float
    accuracy: float
    f1_std_dev: float
    confusion: ConfusionMatrix
    n_predictions: int


def _ordered_by_support(labels: list[str], support: dict[str, int]) -> list[str]:
    return sorted(labels, key=lambda lab: (-support.get(lab, 0), lab))


def confusion_matrix(predictions: PredictionSet) -> ConfusionMatrix:
    """Row-normalized confusion counts over the full label universe."""
    if not predictions.records:
        raise EmptyPredictions("no predictions to evaluate")
    universe = set(predictions.labels)
    support: dict[str, int] = {lab: 0 for lab in predictions.labels}
    counts: dict[tuple[str, str], int] = {}
    for rec in predictions.records:
        if rec.true_label not in universe:
            raise UnknownLabel(f"true label {rec.true_label!r} not in universe")
        support[rec.true_label] += 1
        counts[(rec.true_label, rec.predicted_label)] = (
            counts.get((rec.true_label, rec.predicted_label), 0) + 1
        )
    order = _ordered_by_support(predictions.labels, support)
    rows = []
    for t in order:
        if support[t] == 0:
            rows.append([0.0] * len(order))
        else:
            rows.append([counts.get((t, p), 0) / support[t] for p in order])
    return ConfusionMatrix(
        labels=order,
        rows=rows,
        supports=[support[t] for t in order],
        zero_support_labels=[t for t in order if support[t] == 0],
    )


def classification_report(predictions: PredictionSet) -> EvalReport:
    """Per-class precision/recall/F1 plus macro/weighted aggregates."""
    if not predictions.records:
        raise EmptyPredictions("no predictions to evaluate")
    universe = set(predictions.labels)
    tp: dict[str, int] = {lab: 0 for lab in predictions.labels}
    fp: dict[str, int] = {lab: 0 for lab in predictions.labels}
    fn: dict[str, int] = {lab: 0 for lab in predictions.labels}
    support: dict[str, int] = {lab: 0 for lab in predictions.labels}
    correct = 0
    for rec in predictions.records:
        if rec.true_label not in universe:
            raise UnknownLabel(f"true label {rec.true_label!r} not in universe")
        support[rec.true_label] += 1
        if rec.true_label == rec.predicted_label:
            tp[rec.true_label] += 1
            correct += 1
        else:
            fn[rec.true_label] += 1
            fp[rec.predicted_label] += 1

    per_class: dict[str, ClassMetrics] = {}
    for lab in predictions.labels:
        p_den = tp[lab] + fp[lab]
        r_den = tp[lab] + fn[lab]
        flagged = p_den == 0 or r_den == 0
        precision = tp[lab] / p_den if p_den else 0.0
        recall = tp[lab] / r_den if r_den else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[lab] = ClassMetrics(precision, recall, f1, support[lab], flagged)

    f1s = [per_class[lab].f1 for lab in predictions.labels]
    total_support = sum(support.values())
    macro_f1 = sum(f1s) / len(f1s)
    weighted_f1 = (
        sum(per_class[lab].f1 * support[lab] for lab in predictions.labels) / total_support
    )
    mean_f1 = macro_f1
    f1_std = math.sqrt(sum((v - mean_f1) ** 2 for v in f1s) / len(f1s))

    order = _ordered_by_support(predictions.labels, support)
    return EvalReport(
        labels=order,
        per_class=per_class,
        macro_f1=macro_f1,
        weighted_f1=weighted_f1,
        accuracy=correct / len(predictions.records),
        f1_std_dev=f1_std,
        confusion=confusion_matrix(predictions),
        n_predictions=len(predictions.records),
    )


def topk_analysis(predictions: PredictionSet, k: int) -> dict[str, float]:
    """Top-1 vs top-k accuracy when the true label is among the k best scores."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not predictions.records:
        raise EmptyPredictions("no predictions to evaluate")
    if not predictions.has_scores:
        raise MissingScores("top-k analysis requires scores on every prediction")
    index = {lab: i for i, lab in enumerate(predictions.labels)}
    top1 = topk = 0
    for rec in predictions.records:
        ranked = sorted(rec.scores, key=lambda lab: (-rec.scores[lab], index[lab]))
        if ranked[0] == rec.true_label:
            top1 += 1
        if rec.true_label in ranked[:k]:
            topk += 1
    n = len(predictions.records)
    top1_acc, topk_acc = top1 / n, topk / n
    return {
        "k": k,
        "top1_accuracy": top1_acc,
        "topk_accuracy": topk_acc,
        "improvement": topk_acc - top1_acc,
    }


# --------------------------------------------------------------------------
# predictions.jsonl: {example_id, true_label, predicted_label, scores?} per
# line; an optional leading {"_meta": ...} line is skipped.
# --------------------------------------------------------------------------


def write_predictions_jsonl(path, predictions: PredictionSet, meta: dict | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        if meta is not None:
            fh.write(json.dumps({"_meta": meta}, sort_keys=True, ensure_ascii=False) + "\n")
        for rec in predictions.records:
            row = {
                "example_id": rec.example_id,
                "true_label": rec.true_label,
                "predicted_label": rec.predicted_label,
            }
            if rec.scores is not None:
                row["scores"] = {lab: float(v) for lab, v in rec.scores.items()}
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")


def load_predictions(
    path, dataset_examples: list[LinkExample], labels: list[str]
) -> PredictionSet:
    """Parse predictions.jsonl and validate it against the dataset's TEST split."""
    expected = {ex.example_id: ex.label for ex in dataset_examples if ex.split == TEST}
    records: list[Prediction] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"line {lineno}: invalid JSON: {exc}") from exc
            if "_meta" in rec:
                continue
            for name in ("example_id", "true_label", "predicted_label"):
                if name not in rec:
                    raise SchemaError(f"line {lineno}: missing field {name!r}")
            ex_id = rec["example_id"]
            if ex_id not in expected:
                raise CoverageError(f"line {lineno}: unexpected example_id {ex_id!r}")
            if ex_id in seen:
                raise CoverageError(f"line {lineno}: duplicate example_id {ex_id!r}")
            seen.add(ex_id)
            if rec["true_label"] != expected[ex_id]:
                raise SchemaError(
                    f"line {lineno}: true_label {rec['true_label']!r} disagrees with "
                    f"dataset label {expected[ex_id]!r}"
                )
            scores = rec.get("scores")
            if scores is not None:
                scores = {lab: float(v) for lab, v in scores.items()}
            records.append(Prediction(ex_id, rec["true_label"], rec["predicted_label"], scores))
    missing = sorted(set(expected) - seen)
    if missing:
        shown = ", ".join(missing[:5])
        raise CoverageError(f"{len(missing)} test examples missing predictions: {shown}")
    return PredictionSet(records, list(labels))


# --------------------------------------------------------------------------
# Report emitters: JSON dict, plain-text table, CSV confusion matrix.
# --------------------------------------------------------------------------


def report_to_dict(report: EvalReport) -> dict:
    return {
        "n_predictions": report.n_predictions,
        "accuracy": report.accuracy,
        "macro_f1": report.macro_f1,
        "weighted_f1": report.weighted_f1,
        "f1_std_dev": report.f1_std_dev,
        "per_class": {
            lab: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
                "zero_division": m.zero_division,
            }
            for lab, m in report.per_class.items()
        },
        "confusion": {
            "labels": report.confusion.labels,
            "rows": report.confusion.rows,
            "supports": report.confusion.supports,
            "zero_support_labels": report.confusion.zero_support_labels,
        },
    }


def report_to_text(report: EvalReport) -> str:
    width = max([len(lab) for lab in report.labels] + [8])
    lines = [f"{'label':<{width}}  precision  recall  f1      support"]
    for lab in report.labels:
        m = report.per_class[lab]
        flag = " *" if m.zero_division else ""
        lines.append(
            f"{lab:<{width}}  {m.precision:9.4f}  {m.recall:6.4f}  {m.f1:6.4f}  {m.support:7d}{flag}"
        )
    lines.append("")
    lines.append(f"accuracy     {report.accuracy:.4f}")
    lines.append(f"macro F1     {report.macro_f1:.4f}")
    lines.append(f"weighted F1  {report.weighted_f1:.4f}")
    lines.append(f"F1 std dev   {report.f1_std_dev:.4f}")
    if any(report.per_class[lab].zero_division for lab in report.labels):
        lines.append("* zero-denominator precision/recall defined as 0")
    return "\n".join(lines) + "\n"


def confusion_to_csv(cm: ConfusionMatrix) -> str:
    header = "true\\pred," + ",".join(cm.labels)
    lines = [header]
    for lab, row in zip(cm.labels, cm.rows):
        lines.append(lab + "," + ",".join(f"{v:.6f}" for v in row))
    return "\n".join(lines) + "\n"
