import math
from collections import Counter
from random import Random

import numpy as np
import pytest

from pufcommit.entropy import (
    JointDistribution,
    avg_min_entropy,
    avg_min_entropy_matrix,
    check_entropy_lemmas,
    histogram_distance,
    max_entropy,
    min_entropy,
    statistical_distance,
)


def direct_avg_min_entropy(probs: np.ndarray) -> float:
    """Independent oracle: the defining formula with explicit conditionals."""
    total = 0.0
    for y in range(probs.shape[1]):
        p_y = probs[:, y].sum()
        if p_y == 0:
            continue  # zero-probability condition contributes nothing
        total += p_y * max(probs[x, y] / p_y for x in range(probs.shape[0]))
    return -math.log2(total)


def test_uniform_bit_with_independent_condition():
    j = JointDistribution.independent([0.5, 0.5], [0.3, 0.7])
    assert avg_min_entropy(j) == pytest.approx(1.0, abs=1e-12)
    assert min_entropy(j.marginal_x()) == pytest.approx(1.0, abs=1e-12)


def test_fully_revealed_bit():
    j = JointDistribution((0, 1), (0, 1), np.array([[0.5, 0.0], [0.0, 0.5]]))
    assert avg_min_entropy(j) == pytest.approx(0.0, abs=1e-12)


def test_avg_min_entropy_agrees_with_direct_formula():
    g = np.random.default_rng(42)
    for _ in range(1000):
        j = JointDistribution.random(g, 4, 4)
        assert avg_min_entropy(j) == pytest.approx(
            direct_avg_min_entropy(j.probs), abs=1e-9)


def test_zero_probability_rows_skipped():
    probs = np.array([[0.5, 0.0, 0.5], [0.0, 0.0, 0.0]])
    probs = probs / probs.sum()
    assert avg_min_entropy_matrix(probs) == pytest.approx(0.0, abs=1e-12)


def test_joint_distribution_validation():
    with pytest.raises(ValueError, match="sum"):
        JointDistribution((0, 1), (0,), np.array([[0.5], [0.4]]))
    with pytest.raises(ValueError, match="negative"):
        JointDistribution((0, 1), (0,), np.array([[1.5], [-0.5]]))
    with pytest.raises(ValueError, match="shape"):
        JointDistribution((0, 1), (0,), np.array([[0.5, 0.5]]))


def test_statistical_distance_cases():
    p = {0: 0.5, 1: 0.5}
    assert statistical_distance(p, p) == 0.0
    assert statistical_distance({0: 1.0, 1: 0.0}, {0: 0.0, 1: 1.0}) == 1.0
    with pytest.raises(ValueError, match="SUPPORT_MISMATCH"):
        statistical_distance({0: 1.0}, {1: 1.0})


def test_empirical_histograms_of_same_process_are_close():
    # two runs of the same sampler, 1e5 samples: distance within noise
    rng = Random(7)
    a = Counter(rng.getrandbits(4) for _ in range(100_000))
    b = Counter(rng.getrandbits(4) for _ in range(100_000))
    assert histogram_distance(a, b) <= 0.02


def test_lemma_equality_tight_case():
    # X = Y uniform on a 4-element set: Pr[X=Y] = 1 and the bound is 2^0
    probs = np.eye(4) / 4
    assert float(np.trace(probs)) == pytest.approx(1.0)
    assert 2.0 ** -avg_min_entropy_matrix(probs) == pytest.approx(1.0, abs=1e-12)


def test_chain_rule_constant_extra_is_tight():
    g = np.random.default_rng(5)
    j = JointDistribution.random(g, 4, 4)
    # appending a constant variable (support size 1, max-entropy 0) changes nothing
    with_const = j.probs[:, :, None]
    lhs = avg_min_entropy_matrix(with_const.reshape(4, 4))
    assert lhs == pytest.approx(avg_min_entropy(j) - max_entropy(1), abs=1e-12)


def test_lemma_suite_small_run():
    report = check_entropy_lemmas(500, max_support=6, seed=123)
    assert report.failures == 0
    assert all(v == 0 for v in report.details["violations"].values())


def test_lemma_suite_guards():
    with pytest.raises(ValueError):
        check_entropy_lemmas(10, max_support=9)
    with pytest.raises(ValueError):
        check_entropy_lemmas(10, max_support=1)
