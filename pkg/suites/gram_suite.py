"""
Gram Suite - exactness of the closed-form Gram entries, persymmetry of D^r
and the inverse identity G K = I.
"""

import numpy as np

from matrices.diffmat import build_gram, check_persymmetry, inverse_gram, verify_gram
from suites.common import run_check, within

SUITE = "gram"

# (D^2)^T D^2 for N = 7
REFERENCE_7X7 = np.array([
    [6, -4, 1, 0, 0, 0, 0],
    [-4, 6, -4, 1, 0, 0, 0],
    [1, -4, 6, -4, 1, 0, 0],
    [0, 1, -4, 6, -4, 1, 0],
    [0, 0, 1, -4, 6, -4, 1],
    [0, 0, 0, 1, -4, 5, -2],
    [0, 0, 0, 0, 1, -2, 1],
], dtype=np.int64)


def _exactness(cfg):
    checked = 0
    for n in range(5, cfg.gram_n_max + 1):
        for r in range(1, cfg.gram_r_max + 1):
            if 2 * r >= n:
                continue
            gram = build_gram(n, r)
            if cfg.inject_gram_perturbation and (n, r) == (7, 2):
                gram = gram.perturbed(3, 4)
            verify_gram(gram)
            checked += 1
    return {"pairs": checked}


def _reference():
    entries = build_gram(7, 2).entries
    return within("gram_reference_7x7", np.abs(entries - REFERENCE_7X7).max(), 0)


def _persymmetry(cfg):
    for r in range(1, cfg.gram_r_max + 1):
        check_persymmetry(max(2 * r + 1, 16), r)
    return True


def _inverse_identity(cfg):
    worst = 0.0
    for r in (1, 2, 3):
        n = 32
        product = build_gram(n, r).as_float() @ inverse_gram(n, r)
        worst = max(worst, float(np.abs(product - np.eye(n)).max()))
    return within("gram_inverse_identity", worst, cfg.tolerances.eigen_residual * 1e3)


def run_gram_suite(cfg):
    return [
        run_check(SUITE, "exact_entries", lambda: _exactness(cfg)),
        run_check(SUITE, "reference_7x7", _reference),
        run_check(SUITE, "persymmetry", lambda: _persymmetry(cfg)),
        run_check(SUITE, "inverse_identity", lambda: _inverse_identity(cfg)),
    ]
