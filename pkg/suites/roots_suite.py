"""
Roots Suite - closed-form characteristic roots over a log-spaced eigenvalue
grid: residuals, pairings, classification, spread, the companion-matrix
oracle and the factored product form.
"""

import numpy as np

from roots.charpoly import (
    check_rootset,
    classify,
    companion_roots,
    eval_p,
    eval_p_factored,
    hausdorff_distance,
    roots_for,
    separation_stats,
)
from suites.common import run_check, within

SUITE = "roots"

COMPANION_POINTS = (1e-4, 0.1, 1.0)


def lambda_grid(r, size):
    """Log-spaced points in (0, 4^r), kept clear of the double root at 4^r."""
    return np.logspace(-6.0, np.log10(0.999 * 4.0 ** r), size)


def _grid_checks(r, size, tol):
    worst = {"residual": 0.0, "pairing": 0.0, "conjugacy": 0.0, "min_distance_normalized": np.inf}
    for lam in lambda_grid(r, size):
        rootset = roots_for(lam, r)
        measured = check_rootset(rootset, tol.root_residual, tol.root_pairing)
        classify(rootset)
        stats = separation_stats(rootset)
        for key in ("residual", "pairing", "conjugacy"):
            worst[key] = max(worst[key], measured[key])
        worst["min_distance_normalized"] = min(worst["min_distance_normalized"], stats.min_distance_normalized)
    return worst


def _companion(r, tol):
    worst = 0.0
    for lam in COMPANION_POINTS + (0.9 * 4.0 ** r,):
        worst = max(worst, hausdorff_distance(roots_for(lam, r).values, companion_roots(lam, r)))
    return within("companion", worst, tol)


def _factored(r, tol):
    rng = np.random.default_rng(r)
    worst = 0.0
    for lam in (1e-3, 1.0, 0.5 * 4.0 ** r):
        for x in rng.standard_normal(8) + 1j * rng.standard_normal(8):
            exact = (-1) ** r * eval_p(x, lam, r)
            worst = max(worst, abs(eval_p_factored(x, lam, r) - exact) / (1.0 + abs(x)) ** (2 * r))
    return within("factored_form", worst, tol)


def run_roots_suite(cfg):
    tol = cfg.tolerances
    records = []
    for r in cfg.root_orders:
        records += [
            run_check(SUITE, f"grid[r={r}]", lambda r=r: _grid_checks(r, cfg.root_grid_size, tol)),
            run_check(SUITE, f"companion[r={r}]", lambda r=r: _companion(r, tol.companion)),
            run_check(SUITE, f"factored_form[r={r}]", lambda r=r: _factored(r, tol.root_residual)),
        ]
    return records
