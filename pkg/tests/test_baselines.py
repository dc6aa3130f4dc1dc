import math
import random
from dataclasses import replace

import numpy as np
import pytest

from linklab.baselines import (
    BALANCED,
    LINEAR_SVM,
    RANDOM_FOREST,
    BaselineConfig,
    TrainedBaseline,
    class_weights,
    cross_validate,
    featurize_pair,
    model_from_json,
    model_to_json,
    predict,
    predict_proba,
    predict_votes,
    stratified_fold_assignment,
    train,
)
from linklab.errors import (
    DegenerateTraining,
    DimensionMismatch,
    StratificationImpossible,
)
from linklab.textfeat import SparseVector, TfidfModel, TfidfParams, tfidf_fit
from conftest import make_issue, pair_example, separable_corpus


def small_corpus(n_per_class=30, seed=5):
    return separable_corpus(n_per_class=n_per_class, n_tokens=10, seed=seed)


def featurized(examples, params=TfidfParams()):
    docs = []
    for ex in examples:
        docs.append(f"{ex.issue_a.title} {ex.issue_a.description}")
        docs.append(f"{ex.issue_b.title} {ex.issue_b.description}")
    model = tfidf_fit(docs, params)
    X = [featurize_pair(model, ex) for ex in examples]
    return model, X, [ex.label for ex in examples]


def test_featurize_pair_blocks():
    a = make_issue("F-1", title="alpha beta", description="gamma")
    ex_same = pair_example(a, replace(a, issue_key="F-2"), "Relate")
    model = tfidf_fit(["alpha beta gamma", "delta"], TfidfParams(min_token_len=1, min_df=1))
    vec = featurize_pair(model, ex_same)
    half = model.dim
    first = [(i, w) for i, w in zip(vec.indices, vec.weights) if i < half]
    second = [(i - half, w) for i, w in zip(vec.indices, vec.weights) if i >= half]
    assert first == second  # identical issues produce identical blocks

    empty_b = make_issue("F-3", title="", description="")
    vec2 = featurize_pair(model, pair_example(a, empty_b, "Relate"))
    assert all(i < half for i in vec2.indices)  # second block all zero


def test_featurize_pair_dimension():
    vocab = {f"tok{i}": i for i in range(1000)}
    model = TfidfModel(vocab, np.ones(1000), 10, TfidfParams())
    a = make_issue("F-4", title="tok1 tok2")
    b = make_issue("F-5", title="tok3")
    vec = featurize_pair(model, pair_example(a, b, "Relate"))
    assert max(vec.indices) >= 1000  # second block present
    assert max(vec.indices) < 2000


def test_class_weights_balanced():
    y = np.array([0] * 90 + [1] * 10)
    w = class_weights(y, 2, BALANCED)
    assert abs(w[1] / w[0] - 9.0) < 1e-12
    uniform = class_weights(y, 2, "NONE")
    assert list(uniform) == [1.0, 1.0]


def test_training_accuracy_separable_both_kinds():
    examples = small_corpus()
    model_tfidf, X, y = featurized(examples)
    for kind in (RANDOM_FOREST, LINEAR_SVM):
        cfg = BaselineConfig(model_kind=kind, n_trees=20, seed=3)
        model = train(cfg, X, y, dim=2 * model_tfidf.dim)
        correct = sum(1 for vec, lab in zip(X, y) if predict(model, vec) == lab)
        assert correct == len(y)


def test_single_class_degenerate():
    examples = [ex for ex in small_corpus() if ex.label == "Alpha"]
    model_tfidf, X, y = featurized(examples)
    with pytest.raises(DegenerateTraining):
        train(BaselineConfig(seed=1), X, y, dim=2 * model_tfidf.dim)


def test_unanimous_votes_give_proba_one():
    trees = [[{"c": 0}] for _ in range(10)]
    model = TrainedBaseline(
        config=BaselineConfig(n_trees=10), labels=["A", "B"], dim=4, trees=trees
    )
    x = SparseVector((0,), (1.0,))
    assert predict(model, x) == "A"
    assert predict_proba(model, x)["A"] == 1.0


def test_tie_breaks_to_lowest_label_index():
    trees = [[{"c": 0}] for _ in range(5)] + [[{"c": 1}] for _ in range(5)]
    model = TrainedBaseline(
        config=BaselineConfig(n_trees=10), labels=["A", "B"], dim=4, trees=trees
    )
    x = SparseVector((0,), (1.0,))
    proba = predict_proba(model, x)
    assert proba["A"] == proba["B"] == 0.5
    assert predict(model, x) == "A"


def test_forest_votes_sum_exactly():
    examples = small_corpus()
    model_tfidf, X, y = featurized(examples)
    model = train(BaselineConfig(n_trees=17, seed=2), X, y, dim=2 * model_tfidf.dim)
    for vec in X[:20]:
        votes = predict_votes(model, vec)
        assert sum(votes.values()) == 17
        proba = predict_proba(model, vec)
        assert abs(sum(proba.values()) - 1.0) < 1e-12


def test_svm_softmax_sums_to_one():
    examples = small_corpus()
    model_tfidf, X, y = featurized(examples)
    model = train(
        BaselineConfig(model_kind=LINEAR_SVM, seed=2), X, y, dim=2 * model_tfidf.dim
    )
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = rng.uniform(0, 1, 2 * model_tfidf.dim)
        proba = predict_proba(model, x)
        assert abs(sum(proba.values()) - 1.0) < 1e-9


def test_predict_is_argmax_of_proba():
    examples = small_corpus()
    model_tfidf, X, y = featurized(examples)
    for kind in (RANDOM_FOREST, LINEAR_SVM):
        model = train(
            BaselineConfig(model_kind=kind, n_trees=15, seed=4), X, y, dim=2 * model_tfidf.dim
        )
        for vec in X[::7]:
            proba = predict_proba(model, vec)
            best = min(
                (lab for lab in model.labels),
                key=lambda lab: (-proba[lab], model.labels.index(lab)),
            )
            assert predict(model, vec) == best


def test_determinism_same_seed_same_predictions():
    examples = small_corpus()
    model_tfidf, X, y = featurized(examples)
    probe = X[::5]
    for kind in (RANDOM_FOREST, LINEAR_SVM):
        cfg = BaselineConfig(model_kind=kind, n_trees=12, seed=11)
        m1 = train(cfg, X, y, dim=2 * model_tfidf.dim)
        m2 = train(cfg, X, y, dim=2 * model_tfidf.dim)
        assert [predict(m1, v) for v in probe] == [predict(m2, v) for v in probe]
        if kind == RANDOM_FOREST:
            assert m1.trees == m2.trees
        else:
            assert np.array_equal(m1.weights, m2.weights)


def test_dimension_mismatch():
    examples = small_corpus()
    model_tfidf, X, y = featurized(examples)
    model = train(BaselineConfig(n_trees=5, seed=1), X, y, dim=2 * model_tfidf.dim)
    with pytest.raises(DimensionMismatch):
        predict(model, np.zeros(3))
    with pytest.raises(DimensionMismatch):
        big = SparseVector((2 * model_tfidf.dim + 5,), (1.0,))
        predict(model, big)


def test_model_json_round_trip():
    examples = small_corpus()
    model_tfidf, X, y = featurized(examples)
    probe = X[::9]
    for kind in (RANDOM_FOREST, LINEAR_SVM):
        model = train(
            BaselineConfig(model_kind=kind, n_trees=8, seed=6), X, y, dim=2 * model_tfidf.dim
        )
        back = model_from_json(model_to_json(model))
        assert back.labels == model.labels
        assert [predict(back, v) for v in probe] == [predict(model, v) for v in probe]
        payload = model_to_json(model)
        assert payload == model_to_json(model_from_json(payload))


def test_stratified_folds_partition_and_cover_classes():
    y = ["A"] * 23 + ["B"] * 11 + ["C"] * 9
    assignment = stratified_fold_assignment(y, 5, seed=3)
    assert len(assignment) == len(y)
    for fold in range(5):
        train_labels = {lab for lab, f in zip(y, assignment) if f != fold}
        assert train_labels == {"A", "B", "C"}
    counts = {lab: [0] * 5 for lab in "ABC"}
    for lab, fold in zip(y, assignment):
        counts[lab][fold] += 1
    for lab, per_fold in counts.items():
        assert max(per_fold) - min(per_fold) <= 1


def test_stratified_folds_too_small():
    with pytest.raises(StratificationImpossible):
        stratified_fold_assignment(["A"] * 10 + ["B"] * 4, 5, seed=0)


def test_cross_validate_reports_per_fold():
    examples = small_corpus(n_per_class=15)
    cv = cross_validate(BaselineConfig(n_trees=10, seed=7), examples, folds=3)
    assert len(cv.per_fold_macro_f1) == 3
    assert abs(cv.mean_macro_f1 - sum(cv.per_fold_macro_f1) / 3) < 1e-12
    assert cv.labels == ["Alpha", "Beta", "Gamma"]


def test_cross_validate_deterministic():
    examples = small_corpus(n_per_class=15)
    cfg = BaselineConfig(model_kind=LINEAR_SVM, seed=9)
    a = cross_validate(cfg, examples, folds=3)
    b = cross_validate(cfg, examples, folds=3)
    assert a.per_fold_macro_f1 == b.per_fold_macro_f1


def test_config_validation():
    with pytest.raises(ValueError):
        BaselineConfig(model_kind="BOOSTING")
    with pytest.raises(ValueError):
        BaselineConfig(n_trees=0)
    with pytest.raises(ValueError):
        BaselineConfig(class_weighting="focal")
