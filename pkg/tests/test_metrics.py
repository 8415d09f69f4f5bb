"""Evaluation metrics against brute-force pairwise oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ttrules import metrics
from ttrules.errors import UndefinedMetricError


def pairwise_auc(scores, labels):
    """O(n^2) oracle: P(score_pos > score_neg) + 0.5 P(tie)."""
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = sum((p > n) + 0.5 * (p == n) for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


def test_perfect_and_tied_auc():
    assert metrics.roc_auc([0.1, 0.9], [0, 1]) == 1.0
    assert metrics.roc_auc([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1]) == 0.5


def test_auc_matches_pairwise_oracle():
    rng = np.random.default_rng(0)
    for _ in range(30):
        scores = rng.choice(np.linspace(0, 1, 11), size=50)  # forces ties
        labels = rng.integers(0, 2, size=50)
        if labels.min() == labels.max():
            continue
        assert metrics.roc_auc(scores, labels) == pytest.approx(
            pairwise_auc(scores, labels), abs=1e-12)


def test_auc_requires_both_classes():
    with pytest.raises(UndefinedMetricError):
        metrics.roc_auc([0.2, 0.4], [1, 1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.integers(0, 1)), min_size=4, max_size=60))
def test_auc_invariances(pairs):
    # round to a coarse grid so the transforms below cannot merge distinct
    # scores through float underflow
    scores = np.array([round(p[0], 3) for p in pairs])
    labels = np.array([p[1] for p in pairs])
    if labels.min() == labels.max():
        return
    base = metrics.roc_auc(scores, labels)
    # invariant under strictly increasing transforms
    assert metrics.roc_auc(3 * scores + 1, labels) == pytest.approx(base, abs=1e-12)
    assert metrics.roc_auc(np.exp(scores / 5), labels) == pytest.approx(base, abs=1e-12)
    # complement identity (exact when scores have no ties)
    if len(np.unique(scores)) == len(scores):
        assert metrics.roc_auc(-scores, labels) == pytest.approx(1 - base, abs=1e-12)


def test_macro_ovr_extremes():
    probs = np.eye(3)[[0, 1, 2, 0]]
    assert metrics.macro_ovr_auc(probs, np.array([0, 1, 2, 0])) == 1.0
    uniform = np.full((6, 3), 1 / 3)
    assert metrics.macro_ovr_auc(uniform, np.array([0, 1, 2, 0, 1, 2])) == 0.5


def test_macro_ovr_matches_per_class_oracle():
    rng = np.random.default_rng(1)
    probs = rng.dirichlet(np.ones(3), size=60)
    labels = rng.integers(0, 3, size=60)
    expected = np.mean([pairwise_auc(probs[:, c], (labels == c).astype(int))
                        for c in range(3)])
    assert metrics.macro_ovr_auc(probs, labels) == pytest.approx(expected, abs=1e-12)


def test_macro_ovr_skips_absent_class_with_warning():
    probs = np.array([[0.7, 0.2, 0.1], [0.1, 0.8, 0.1], [0.5, 0.4, 0.1], [0.2, 0.7, 0.1]])
    labels = np.array([0, 1, 0, 1])  # class 2 absent
    with pytest.warns(UserWarning, match="absent"):
        value = metrics.macro_ovr_auc(probs, labels)
    assert value == 1.0


def test_macro_ovr_is_class_permutation_invariant():
    rng = np.random.default_rng(2)
    probs = rng.dirichlet(np.ones(4), size=40)
    labels = rng.integers(0, 4, size=40)
    base = metrics.macro_ovr_auc(probs, labels)
    perm = np.array([2, 0, 3, 1])
    inv = np.argsort(perm)
    assert metrics.macro_ovr_auc(probs[:, perm], inv[labels]) == pytest.approx(base, abs=1e-12)


def test_macro_ovr_needs_two_classes():
    with pytest.raises(UndefinedMetricError):
        metrics.macro_ovr_auc(np.full((3, 2), 0.5), np.zeros(3, dtype=int))


def test_r2_values():
    t = np.array([1.0, 2, 3, 4])
    assert metrics.r2(t, t) == 1.0
    assert metrics.r2(np.full(4, t.mean()), t) == pytest.approx(0.0, abs=1e-12)


def test_r2_matches_direct_formula():
    rng = np.random.default_rng(3)
    t = rng.normal(0, 2, 40)
    p = t + rng.normal(0, 1, 40)
    expected = 1 - ((t - p) ** 2).sum() / ((t - t.mean()) ** 2).sum()
    assert metrics.r2(p, t) == pytest.approx(expected, abs=1e-12)


def test_r2_undefined_cases():
    with pytest.raises(UndefinedMetricError):
        metrics.r2(np.array([1.0]), np.array([1.0]))
    with pytest.raises(UndefinedMetricError):
        metrics.r2(np.array([1.0, 2.0]), np.array([3.0, 3.0]))
