"""
Vandermonde Suite - closed-form inverse against the identity, and the
explicit U^{-1} against its column recursion.
"""

import numpy as np

from matrices.vandermonde import inv_U, inv_U_recursive, vand_inverse, vandermonde_matrix
from roots.charpoly import roots_for
from suites.common import run_check, within

SUITE = "vandermonde"


def separated_nodes(n, rng):
    """Jittered points around the unit circle; pairwise gaps stay near 2 pi / n."""
    angles = 2.0 * np.pi * (np.arange(n) + rng.uniform(-0.2, 0.2, n)) / n
    radii = rng.uniform(0.8, 1.2, n)
    return radii * np.exp(1j * angles)


def _identity(n, draws, rng, tol):
    worst = 0.0
    for _ in range(draws):
        x = separated_nodes(n, rng)
        worst = max(worst, float(np.abs(vandermonde_matrix(x) @ vand_inverse(x) - np.eye(n)).max()))
    return within("vandermonde_identity", worst, tol)


def _recursion(n, draws, rng):
    worst = 0.0
    for _ in range(draws):
        x = separated_nodes(n, rng)
        closed = inv_U(x)
        scale = max(1.0, float(np.abs(closed).max()))
        worst = max(worst, float(np.abs(closed - inv_U_recursive(x)).max()) / scale)
    return within("inverse_u_recursion", worst, 1e-12)


def _characteristic_nodes(tol):
    worst = 0.0
    for r in (1, 2, 3):
        x = roots_for(1.0, r).values
        worst = max(worst, float(np.abs(vandermonde_matrix(x) @ vand_inverse(x) - np.eye(2 * r)).max()))
    return within("characteristic_nodes", worst, tol)


def run_vandermonde_suite(cfg):
    rng = np.random.default_rng(cfg.seed)
    tol = cfg.tolerances.vandermonde
    records = []
    for n in cfg.vandermonde_sizes:
        records += [
            run_check(SUITE, f"identity[n={n}]", lambda n=n: _identity(n, cfg.vandermonde_draws, rng, tol)),
            run_check(SUITE, f"inverse_u_recursion[n={n}]", lambda n=n: _recursion(n, cfg.vandermonde_draws, rng)),
        ]
    records.append(run_check(SUITE, "characteristic_nodes", lambda: _characteristic_nodes(tol)))
    return records
