import sys
import os
import tempfile

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from matrices.diffmat import build_gram, dense_Dr
from services.report_service import read_csv
from spectra.spectral import (
    check_reversal,
    check_sigma_bounds,
    decay_slope,
    dynamical_bound,
    eigh_gram,
    export_spectrum_csv,
    flatness,
    jacobi_singular_values,
    symmetric_eigh,
)
from utils.errors import PreconditionError


def test_n3_first_order_closed_form():
    decomp = eigh_gram(3, 1)
    k = np.arange(1, 4)
    # roots of the characteristic cubic in trigonometric form
    expected = np.sort(4.0 * np.sin((2 * k - 1) * np.pi / 14.0) ** 2)[::-1]
    assert np.allclose(decomp.lam, expected, rtol=1e-13)


def test_n7_second_order_residuals():
    decomp = eigh_gram(7, 2)
    gram = build_gram(7, 2).as_float()
    residual = np.linalg.norm(gram @ decomp.V - decomp.V * decomp.lam, axis=0)
    assert residual.max() <= 1e-10 * decomp.lam[0]


def test_orthonormal_vectors_and_signs():
    decomp = eigh_gram(64, 3)
    eye = np.eye(64)
    assert np.abs(decomp.V.T @ decomp.V - eye).max() < 1e-8
    assert np.abs(decomp.U.T @ decomp.U - eye).max() < 1e-8
    peaks = decomp.V[np.argmax(np.abs(decomp.V), axis=0), np.arange(64)]
    assert np.all(peaks > 0)
    assert np.all(np.diff(decomp.sigma) <= 0)


def test_left_vectors_satisfy_svd_relation():
    n, r = 40, 2
    decomp = eigh_gram(n, r)
    dense = dense_Dr(n, r).astype(float)
    assert np.abs(dense @ decomp.V - decomp.U * decomp.sigma).max() < 1e-9


def test_matches_lapack_and_jacobi():
    n, r = 40, 2
    decomp = eigh_gram(n, r)
    lapack = np.linalg.svd(dense_Dr(n, r).astype(float), compute_uv=False)
    jacobi = jacobi_singular_values(n, r)
    assert np.allclose(decomp.sigma, lapack, rtol=1e-8)
    assert np.allclose(decomp.sigma, jacobi, rtol=1e-8)


def test_direct_method_agrees_for_first_order():
    two_sided = eigh_gram(32, 1)
    direct = eigh_gram(32, 1, method="direct")
    assert np.allclose(direct.sigma, two_sided.sigma, rtol=1e-10)


def test_symmetric_eigh_matches_numpy():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((20, 20))
    a = a + a.T
    values, vectors = symmetric_eigh(a)
    assert np.allclose(np.sort(values), np.linalg.eigvalsh(a), atol=1e-10)
    assert np.abs(a @ vectors - vectors * values).max() < 1e-10


def test_sigma_upper_bound():
    for n in (50, 200, 1000):
        for r in (1, 2, 3):
            report = check_sigma_bounds(eigh_gram(n, r))
            assert report.sigma_max <= report.upper_bound * (1 + 1e-12)
            assert report.sigma_min > 0


def test_decay_slopes():
    for r in (1, 2, 3):
        decomp = eigh_gram(512, r)
        assert abs(decay_slope(decomp) - r) <= 0.1
        assert abs(decay_slope(decomp, 0.1, 0.5, corrected=True) - r) <= 0.1


def test_decay_band_needs_two_indices():
    try:
        decay_slope(eigh_gram(16, 1), 0.5, 0.51)
    except PreconditionError:
        pass
    else:
        raise AssertionError("degenerate band accepted")


def test_reversal_symmetry():
    for r in (2, 3):
        report = check_reversal(eigh_gram(128, r))
        assert report.max_norm_gap <= 1e-8
        assert report.max_vector_gap <= 1e-6


def test_flatness_first_order():
    for n in (64, 128, 256):
        report = flatness(eigh_gram(n, 1))
        assert 1.0 <= report.s <= 2.0


def test_dynamical_bound_bottom_vectors():
    decomp = eigh_gram(256, 2)
    for j in range(252, 257):
        bound = dynamical_bound(decomp, j)
        assert np.max(np.abs(decomp.v(j))) <= bound * (1 + 1e-10)


def test_half_band_rejected():
    try:
        eigh_gram(6, 3)
    except PreconditionError:
        pass
    else:
        raise AssertionError("r >= n/2 accepted")


def test_export_spectrum_csv():
    decomp = eigh_gram(16, 2)
    with tempfile.TemporaryDirectory() as tmp:
        path = export_spectrum_csv(decomp, os.path.join(tmp, "spectrum.csv"), config_hash="abc")
        with open(path, encoding="utf-8") as fh:
            first = fh.readline().strip()
        frame = read_csv(path)
    assert first == "# config_hash=abc"
    assert list(frame.columns) == ["j", "sigma", "lambda", "v_inf_norm", "u_inf_norm"]
    assert np.allclose(frame["sigma"].to_numpy(), decomp.sigma)


if __name__ == "__main__":
    test_n3_first_order_closed_form()
    test_n7_second_order_residuals()
    test_orthonormal_vectors_and_signs()
    test_left_vectors_satisfy_svd_relation()
    test_matches_lapack_and_jacobi()
    test_direct_method_agrees_for_first_order()
    test_symmetric_eigh_matches_numpy()
    test_sigma_upper_bound()
    test_decay_slopes()
    test_decay_band_needs_two_indices()
    test_reversal_symmetry()
    test_flatness_first_order()
    test_dynamical_bound_bottom_vectors()
    test_half_band_rejected()
    test_export_spectrum_csv()
    print("✅ spectral tests passed")
