"""linklab: issue-tracker link mining workbench.

Pipeline stages: ingest exports into cleaned snapshots, build labeled and
split datasets, train lexical baselines, evaluate prediction files, and run
the repository/link-type correlation analyses.
"""

from .dataset import (
    NON_LINK,
    TEST,
    TRAIN,
    UNASSIGNED,
    VAL,
    DatasetSpec,
    LinkExample,
    build_dataset,
    common_types,
    read_dataset_jsonl,
    sample_non_links,
    select_label_set,
    stratified_split,
    write_dataset_jsonl,
)
from .evaluate import (
    EvalReport,
    Prediction,
    PredictionSet,
    classification_report,
    confusion_matrix,
    load_predictions,
    topk_analysis,
    write_predictions_jsonl,
)
from .ingest import (
    Issue,
    Link,
    RepositorySnapshot,
    RepoStats,
    TypeNormalizer,
    build_snapshot,
    parse_issue_record,
    parse_link_record,
    repo_stats,
)
from .textfeat import (
    SparseVector,
    TfidfModel,
    TfidfParams,
    cosine_similarity,
    pair_length,
    pair_length_difference,
    tfidf_fit,
    tfidf_transform,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "NON_LINK",
    "TRAIN",
    "VAL",
    "TEST",
    "UNASSIGNED",
    "DatasetSpec",
    "LinkExample",
    "build_dataset",
    "common_types",
    "read_dataset_jsonl",
    "sample_non_links",
    "select_label_set",
    "stratified_split",
    "write_dataset_jsonl",
    "EvalReport",
    "Prediction",
    "PredictionSet",
    "classification_report",
    "confusion_matrix",
    "load_predictions",
    "topk_analysis",
    "write_predictions_jsonl",
    "Issue",
    "Link",
    "RepositorySnapshot",
    "RepoStats",
    "TypeNormalizer",
    "build_snapshot",
    "parse_issue_record",
    "parse_link_record",
    "repo_stats",
    "SparseVector",
    "TfidfModel",
    "TfidfParams",
    "cosine_similarity",
    "pair_length",
    "pair_length_difference",
    "tfidf_fit",
    "tfidf_transform",
    "tokenize",
    "__version__",
]
