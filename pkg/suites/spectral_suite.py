"""
Spectral Suite - orthonormality, eigen residuals, singular value bounds,
flatness, reversal symmetry, the Jacobi cross-check, the decay slope and
the small-sigma sup-norm bound.
"""

from math import cos, pi

import numpy as np

from matrices.diffmat import build_gram
from spectra.spectral import (
    check_reversal,
    check_sigma_bounds,
    decay_slope,
    dynamical_bound,
    eigh_gram,
    flatness,
    jacobi_singular_values,
)
from suites.common import fixture, run_check, within
from utils.errors import InvariantViolation

SUITE = "spectral"


def _orthonormality(decomp, tol):
    eye = np.eye(decomp.n)
    worst = max(np.abs(decomp.V.T @ decomp.V - eye).max(), np.abs(decomp.U.T @ decomp.U - eye).max())
    return within("orthonormality", worst, tol)


def _eigen_residual(decomp, tol):
    gram = build_gram(decomp.n, decomp.r).as_float()
    residuals = np.linalg.norm(gram @ decomp.V - decomp.V * decomp.lam, axis=0) / decomp.lam[0]
    worst = int(np.argmax(residuals))
    return within("eigen_residual", residuals[worst], tol, index=worst + 1)


def _lambda_range(decomp):
    ceiling = (2.0 * cos(pi / (2 * decomp.n + 1))) ** (2 * decomp.r)
    if not (np.all(decomp.lam > 0.0) and np.all(decomp.lam <= ceiling * (1.0 + 1e-12))):
        raise InvariantViolation("lambda_range", "eigenvalue outside (0, (2cos(pi/(2N+1)))^(2r)]",
                                 values={"min": float(decomp.lam.min()), "max": float(decomp.lam.max())})
    return {"min": float(decomp.lam.min()), "max": float(decomp.lam.max()), "ceiling": ceiling}


def _sign_convention(decomp):
    peaks = decomp.V[np.argmax(np.abs(decomp.V), axis=0), np.arange(decomp.n)]
    if np.any(peaks <= 0.0):
        j = int(np.argmax(peaks <= 0.0))
        raise InvariantViolation("sign_convention", f"largest entry of v_{j + 1} is not positive", index=j + 1)
    return True


def _bounds(decomp):
    report = check_sigma_bounds(decomp)
    return {"sigma_max": report.sigma_max, "upper_bound": report.upper_bound, "sigma_min": report.sigma_min,
            "ratio_min": report.ratio_min, "ratio_max": report.ratio_max}


def _flatness(decomp):
    report = flatness(decomp)
    return {"s": report.s, "s_u": report.s_u}


def _jacobi(n, r, tol):
    decomp = eigh_gram(n, r)
    oracle = jacobi_singular_values(n, r)
    keep = oracle / oracle[0] >= 1e-5
    relative = np.abs(decomp.sigma[keep] - oracle[keep]) / oracle[keep]
    worst = int(np.argmax(relative))
    return within("jacobi_agreement", relative[worst], tol, index=worst + 1)


def _reversal(n, r, tol):
    report = check_reversal(eigh_gram(n, r), tol.reversal_norm, tol.reversal_vector)
    return {"max_norm_gap": report.max_norm_gap, "max_vector_gap": report.max_vector_gap,
            "max_reversed_gram_gap": report.max_reversed_gram_gap}


def _decay(cfg, r):
    lo, hi = cfg.decay_band
    slope = decay_slope(eigh_gram(cfg.decay_n, r), lo, hi)
    return within("decay_slope", abs(slope - r), cfg.slope_tol) | {"slope": slope}


def _dynamical(cfg):
    decomp = eigh_gram(cfg.dynamical_n, cfg.dynamical_r)
    bounds = {}
    for j in range(decomp.n - cfg.dynamical_count + 1, decomp.n + 1):
        bounds[str(j)] = dynamical_bound(decomp, j)
    return bounds


def run_spectral_suite(cfg):
    tol = cfg.tolerances
    records = []
    for n in cfg.spectral_sizes:
        for r in cfg.spectral_orders:
            if 2 * r >= n:
                continue
            tag = f"n={n},r={r}"
            decomp, failure = fixture(SUITE, f"eigh_gram[{tag}]", lambda: eigh_gram(n, r))
            if failure:
                records.append(failure)
                continue
            records += [
                run_check(SUITE, f"orthonormality[{tag}]", lambda d=decomp: _orthonormality(d, tol.orthogonality)),
                run_check(SUITE, f"eigen_residual[{tag}]", lambda d=decomp: _eigen_residual(d, tol.eigen_residual)),
                run_check(SUITE, f"lambda_range[{tag}]", lambda d=decomp: _lambda_range(d)),
                run_check(SUITE, f"sign_convention[{tag}]", lambda d=decomp: _sign_convention(d)),
                run_check(SUITE, f"sigma_bounds[{tag}]", lambda d=decomp: _bounds(d)),
                run_check(SUITE, f"flatness[{tag}]", lambda d=decomp: _flatness(d)),
            ]

    for r in cfg.spectral_orders:
        if 2 * r < cfg.jacobi_n:
            records.append(run_check(SUITE, f"jacobi_agreement[n={cfg.jacobi_n},r={r}]",
                                     lambda r=r: _jacobi(cfg.jacobi_n, r, tol.jacobi_agreement)))
        if 2 * r < cfg.reversal_n:
            records.append(run_check(SUITE, f"reversal[n={cfg.reversal_n},r={r}]",
                                     lambda r=r: _reversal(cfg.reversal_n, r, tol)))
    for r in cfg.decay_orders:
        records.append(run_check(SUITE, f"decay_slope[n={cfg.decay_n},r={r}]", lambda r=r: _decay(cfg, r)))
    records.append(run_check(SUITE, f"dynamical_bound[n={cfg.dynamical_n},r={cfg.dynamical_r}]",
                             lambda: _dynamical(cfg)))
    return records
