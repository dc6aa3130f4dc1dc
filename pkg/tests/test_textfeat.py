import math
import random

import pytest

from linklab.errors import EmptyCorpus
from linklab.textfeat import (
    SparseVector,
    TfidfParams,
    cosine_similarity,
    issue_token_length,
    pair_length,
    pair_length_difference,
    tfidf_fit,
    tfidf_transform,
    tokenize,
)
from conftest import make_issue, pair_example

LOOSE = TfidfParams(min_token_len=1, min_df=1)


def test_tokenize_basic():
    assert tokenize("Fix NPE in Parser!") == ["fix", "npe", "in", "parser"]
    assert tokenize("") == []
    assert tokenize("a1-b2_c3") == ["a1", "b2", "c3"]


def test_tokenize_drops_short_tokens_and_lowercases():
    assert tokenize("A bug in X") == ["bug", "in"]
    assert tokenize("A bug in X", min_token_len=1) == ["a", "bug", "in", "x"]


def test_tokenize_unicode_nfc():
    # Decomposed e + combining accent must equal the precomposed form.
    assert tokenize("café bug") == tokenize("café bug")


def test_idf_worked_example():
    model = tfidf_fit(["a", "a", "b"], LOOSE)
    assert abs(model.idf[model.vocabulary["a"]] - (math.log(4 / 3) + 1)) < 1e-12
    assert abs(model.idf[model.vocabulary["b"]] - (math.log(4 / 2) + 1)) < 1e-12


def test_transform_l2_normalized_and_support():
    model = tfidf_fit(["a b", "a c"], LOOSE)
    vec = tfidf_transform(model, "a b")
    got = {i for i in vec.indices}
    assert got == {model.vocabulary["a"], model.vocabulary["b"]}
    assert abs(vec.norm() - 1.0) < 1e-12


def test_transform_oov_only_gives_zero_vector():
    model = tfidf_fit(["a b", "a c"], LOOSE)
    vec = tfidf_transform(model, "zz yy")
    assert vec.nnz == 0


def test_fit_empty_corpus_raises():
    with pytest.raises(EmptyCorpus):
        tfidf_fit([], LOOSE)


def test_min_df_prunes_rare_tokens():
    model = tfidf_fit(["common rare1", "common rare2"], TfidfParams(min_token_len=1, min_df=2))
    assert "common" in model.vocabulary
    assert "rare1" not in model.vocabulary and "rare2" not in model.vocabulary


def test_vocabulary_order_independent_of_corpus_permutation():
    docs = [f"tok{i} tok{i % 3} shared" for i in range(10)]
    m1 = tfidf_fit(docs, LOOSE)
    shuffled = list(docs)
    random.Random(5).shuffle(shuffled)
    m2 = tfidf_fit(shuffled, LOOSE)
    assert m1.vocabulary == m2.vocabulary
    for tok, idx in m1.vocabulary.items():
        assert m1.idf[idx] == m2.idf[m2.vocabulary[tok]]


def test_model_json_round_trip():
    model = tfidf_fit(["a b", "a c", "b c d"], LOOSE)
    back = type(model).from_json(model.to_json())
    assert back.vocabulary == model.vocabulary
    assert list(back.idf) == list(model.idf)
    assert back.n_docs == model.n_docs


def test_cosine_identity_and_orthogonal():
    model = tfidf_fit(["a b", "c d"], LOOSE)
    v = tfidf_transform(model, "a b")
    w = tfidf_transform(model, "c d")
    assert abs(cosine_similarity(v, v) - 1.0) < 1e-12
    assert cosine_similarity(v, w) == 0.0
    assert cosine_similarity(v, tfidf_transform(model, "zz")) == 0.0


def test_cosine_hand_dot_product():
    u = SparseVector((0, 1), (1.0, 1.0))
    v = SparseVector((0, 2), (1.0, 1.0))
    assert abs(cosine_similarity(u, v) - 0.5) < 1e-12


def test_cosine_symmetry_and_range_random():
    rng = random.Random(11)
    for _ in range(200):
        def rand_vec():
            idx = sorted(rng.sample(range(20), rng.randint(0, 6)))
            return SparseVector(tuple(idx), tuple(rng.uniform(0.1, 2.0) for _ in idx))

        u, v = rand_vec(), rand_vec()
        assert cosine_similarity(u, v) == cosine_similarity(v, u)
        assert -1e-12 <= cosine_similarity(u, v) <= 1.0 + 1e-12


def test_pair_lengths():
    a = make_issue("P-1", title="", description="")
    b = make_issue("P-2", title="", description="")
    empty = pair_example(a, b, "Relate")
    assert pair_length(empty) == 0
    assert pair_length_difference(empty) == 0

    long_a = make_issue("P-3", title="word " * 40, description="word " * 60)
    short_b = make_issue("P-4", title="word " * 20, description="word " * 40)
    ex = pair_example(long_a, short_b, "Relate")
    assert pair_length(ex) == 160
    assert pair_length_difference(ex) == 40


def test_pair_length_difference_bounded_by_length():
    rng = random.Random(3)
    for _ in range(50):
        a = make_issue("P-9", title="tok " * rng.randint(0, 30))
        b = make_issue("P-10", title="tok " * rng.randint(0, 30))
        ex = pair_example(a, b, "Relate")
        assert pair_length_difference(ex) <= pair_length(ex)


def test_issue_token_length_counts_title_plus_description():
    assert issue_token_length("one two", "three four five") == 5
