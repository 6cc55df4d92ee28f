import sys
import os
from math import sqrt

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from roots.charpoly import (
    check_rootset,
    classify,
    companion_roots,
    dump_roots,
    eval_p,
    eval_p_factored,
    hausdorff_distance,
    roots_for,
    separation_stats,
)
from utils.errors import PreconditionError


def _grid(r, size=20):
    return np.logspace(-6.0, np.log10(0.999 * 4.0 ** r), size)


def test_residuals_and_pairings_over_grid():
    for r in range(1, 7):
        for lam in _grid(r):
            worst = check_rootset(roots_for(lam, r))
            assert worst["residual"] <= 1e-10
            assert worst["pairing"] <= 1e-10
            assert worst["conjugacy"] <= 1e-10


def test_first_order_roots_by_hand():
    # r = 1: x^2 - (2 - lam) x + 1, roots on the unit circle
    lam = 1.0
    rootset = roots_for(lam, 1)
    expected = np.roots([1.0, -(2.0 - lam), 1.0])
    assert hausdorff_distance(rootset.values, expected) < 1e-14
    assert np.allclose(np.abs(rootset.values), 1.0)


def test_classification_counts():
    for r in range(1, 7):
        for lam in (1e-3, 1.0, 0.5 * 4.0 ** r):
            result = classify(roots_for(lam, r))
            assert result.unimodular_count == 2
            assert result.real_count == (2 if r % 2 == 0 else 0)
            assert result.expanding_count == result.contracting_count == r - 1


def test_separation_bounds():
    silver = 1.0 + sqrt(2.0)
    for r in (2, 3, 5):
        for lam in _grid(r, 10):
            stats = separation_stats(roots_for(lam, r))
            assert 0.0 < stats.min_distance_normalized
            assert stats.max_distance_normalized <= 2.0 * silver * (1 + 1e-12)


def test_companion_oracle():
    for r in range(1, 7):
        for lam in (1e-2, 1.0, 0.9 * 4.0 ** r):
            assert hausdorff_distance(roots_for(lam, r).values, companion_roots(lam, r)) <= 1e-8


def test_factored_form_is_signed_polynomial():
    rng = np.random.default_rng(3)
    for r in (1, 2, 3, 4):
        for x in rng.standard_normal(5) + 1j * rng.standard_normal(5):
            assert abs(eval_p_factored(x, 0.7, r) - (-1) ** r * eval_p(x, 0.7, r)) <= 1e-10 * (1 + abs(x)) ** (2 * r)


def test_lambda_outside_range_rejected():
    for lam in (0.0, -1.0, 16.0):
        try:
            roots_for(lam, 2)
        except PreconditionError:
            continue
        raise AssertionError(f"lambda={lam} accepted")


def test_dump_roots_records():
    records = dump_roots(roots_for(1.0, 2))
    assert len(records) == 4
    assert {rec["k"] for rec in records} == {0, 1}
    assert sum("unimodular" in rec["class"] for rec in records) == 2
    assert sum("real" in rec["class"].split("+") for rec in records) == 2


if __name__ == "__main__":
    test_residuals_and_pairings_over_grid()
    test_first_order_roots_by_hand()
    test_classification_counts()
    test_separation_bounds()
    test_companion_oracle()
    test_factored_form_is_signed_polynomial()
    test_lambda_outside_range_rejected()
    test_dump_roots_records()
    print("✅ charpoly tests passed")
