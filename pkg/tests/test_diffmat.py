import sys
import os
import tempfile
from math import comb

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from matrices.diffmat import (
    apply_D,
    apply_Dinv_r,
    apply_Dinv_rT,
    apply_Dr,
    apply_DrT,
    build_gram,
    check_persymmetry,
    dense_Dr,
    dense_Dr_inverse,
    difference_singular_values,
    export_gram_csv,
    gram_entry,
    inverse_gram,
    reverse,
    verify_gram,
)
from services.report_service import read_csv
from utils.errors import DimensionError, InvariantViolation, PreconditionError

REFERENCE_7X7 = [
    [6, -4, 1, 0, 0, 0, 0],
    [-4, 6, -4, 1, 0, 0, 0],
    [1, -4, 6, -4, 1, 0, 0],
    [0, 1, -4, 6, -4, 1, 0],
    [0, 0, 1, -4, 6, -4, 1],
    [0, 0, 0, 1, -4, 5, -2],
    [0, 0, 0, 0, 1, -2, 1],
]


def test_first_difference():
    assert apply_D([3, 5, 4]).tolist() == [3, 2, -1]
    assert apply_Dr([1, 1, 1, 1], 2).tolist() == [1, -1, 0, 0]


def test_transpose_actions_match_dense():
    rng = np.random.default_rng(1)
    v = rng.standard_normal(12)
    dense = dense_Dr(12, 3).astype(float)
    assert np.allclose(apply_DrT(v, 3), dense.T @ v)
    inverse = dense_Dr_inverse(12, 3)
    assert np.allclose(apply_Dinv_r(v, 3), inverse @ v)
    assert np.allclose(apply_Dinv_rT(v, 3), inverse.T @ v)


def test_inverse_sums_are_exact_integers():
    n, r = 4096, 6
    ones = np.ones(n, dtype=np.int64)
    assert int(apply_Dinv_r(ones, r)[-1]) == comb(n + r - 1, r)
    assert apply_Dr(apply_Dinv_r(ones, r), r).tolist() == ones.tolist()


def test_gram_reference_7x7():
    gram = build_gram(7, 2)
    assert gram.entries.tolist() == REFERENCE_7X7
    assert gram.entry(6, 6) == 5 and gram.entry(7, 7) == 1


def test_gram_entries_match_exact_product():
    for n in (5, 9, 16, 33):
        for r in range(1, min(6, (n - 1) // 2) + 1):
            assert verify_gram(build_gram(n, r))


def test_large_order_gram_is_exact():
    n, r = 100, 40
    gram = build_gram(n, r)
    assert gram.entry(1, 1) == comb(2 * r, r)
    assert gram.entry(50, 51) == -comb(2 * r, r - 1)
    assert gram.entry(n, n) == 1
    assert verify_gram(gram)


def test_gram_interior_is_signed_binomial():
    for m in range(4):
        assert gram_entry(20, 3, 5, 5 + m) == (-1) ** m * comb(6, 3 - m)
    assert gram_entry(20, 3, 5, 9) == 0


def test_perturbed_gram_is_caught():
    try:
        verify_gram(build_gram(9, 2).perturbed(3, 4))
    except InvariantViolation as exc:
        assert exc.index == (3, 4)
    else:
        raise AssertionError("perturbation went unnoticed")


def test_half_band_rejected():
    for n, r in ((5, 3), (4, 2)):
        try:
            build_gram(n, r)
        except PreconditionError:
            continue
        raise AssertionError(f"n={n}, r={r} was accepted")


def test_inverse_gram_identity():
    for r in (1, 2):
        product = build_gram(20, r).as_float() @ inverse_gram(20, r)
        assert np.abs(product - np.eye(20)).max() < 1e-8


def test_persymmetry_and_reverse():
    assert check_persymmetry(11, 3)
    assert reverse([1, 2, 3]).tolist() == [3, 2, 1]
    try:
        reverse(np.zeros((2, 2)))
    except DimensionError:
        pass
    else:
        raise AssertionError("two-dimensional input accepted")


def test_difference_singular_values_closed_form():
    n = 30
    closed = difference_singular_values(n)
    lapack = np.linalg.svd(dense_Dr(n, 1).astype(float), compute_uv=False)
    assert np.allclose(closed, lapack, rtol=1e-12, atol=1e-13)
    assert abs(closed[0] - 2 * np.cos(np.pi / (2 * n + 1))) < 1e-14


def test_export_gram_csv():
    with tempfile.TemporaryDirectory() as tmp:
        path = export_gram_csv(build_gram(7, 2), os.path.join(tmp, "gram.csv"), "abc123")
        with open(path, encoding="utf-8") as fh:
            first = fh.readline().strip()
        frame = read_csv(path, header=None)
    assert first == "# config_hash=abc123"
    assert frame.to_numpy().tolist() == REFERENCE_7X7


if __name__ == "__main__":
    test_first_difference()
    test_transpose_actions_match_dense()
    test_inverse_sums_are_exact_integers()
    test_gram_reference_7x7()
    test_gram_entries_match_exact_product()
    test_large_order_gram_is_exact()
    test_gram_interior_is_signed_binomial()
    test_perturbed_gram_is_caught()
    test_half_band_rejected()
    test_inverse_gram_identity()
    test_persymmetry_and_reverse()
    test_difference_singular_values_closed_form()
    test_export_gram_csv()
    print("✅ diffmat tests passed")
