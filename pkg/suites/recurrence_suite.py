"""
Recurrence Suite - every computed eigenvector with lambda_j above the floor
must satisfy the extended recurrence, and the root formula with
boundary-system coefficients must reproduce it.
"""

import numpy as np

from roots.recurrence import (
    check_interior_recurrence,
    check_recurrence,
    eval_formula,
    eval_real_form,
    extend_sequence,
    real_representation,
    reconstruction_report,
    solve_coeffs,
)
from spectra.spectral import eigh_gram
from suites.common import fixture, run_check, within

SUITE = "recurrence"


def _extended(decomp, min_lambda):
    worst = 0.0
    for j in range(1, decomp.n + 1):
        lam = float(decomp.lam[j - 1])
        if lam < min_lambda:
            continue
        v = decomp.v(j)
        seq = extend_sequence(v, lam, decomp.r)
        limit = 1e-7 * float(decomp.lam[0]) * float(np.max(np.abs(v)))
        residual = check_recurrence(seq, tol=limit)
        worst = max(worst, residual / limit)
    return {"worst_fraction_of_limit": worst}


def _interior(decomp, min_lambda):
    worst = 0.0
    for j in range(1, decomp.n + 1):
        lam = float(decomp.lam[j - 1])
        if lam >= min_lambda:
            worst = max(worst, check_interior_recurrence(decomp.v(j), lam, decomp.r))
    return within("interior_recurrence", worst / float(decomp.lam[0]), 1e-7)


def _reconstruction(decomp, min_lambda, tol):
    report = reconstruction_report(decomp, min_lambda)
    measured = {"count": int(len(report))}
    for column, limit in (("residual", tol.null_residual), ("max_diff", tol.reconstruction),
                          ("conjugacy_err", tol.conjugacy)):
        worst = int(report[column].to_numpy().argmax())
        measured[column] = within(column, report[column].iloc[worst], limit, index=int(report["j"].iloc[worst]))
    return measured


def _real_form(decomp, min_lambda, tol):
    worst = 0.0
    picks = [j for j in (1, decomp.n // 2, decomp.n) if decomp.lam[j - 1] >= min_lambda]
    for j in picks:
        coeffs = solve_coeffs(float(decomp.lam[j - 1]), decomp.r, decomp.n)
        terms = real_representation(coeffs)
        for i in range(1, decomp.n + 1, max(1, decomp.n // 8)):
            worst = max(worst, abs(eval_real_form(coeffs, i, terms) - eval_formula(coeffs, coeffs.rootset, i)))
    return within("real_form", worst, tol.reconstruction)


def run_recurrence_suite(cfg):
    tol = cfg.tolerances
    n = cfg.recurrence_n
    floor = cfg.recurrence_min_lambda
    records = []
    for r in cfg.recurrence_orders:
        if 2 * r >= n:
            continue
        tag = f"n={n},r={r}"
        decomp, failure = fixture(SUITE, f"eigh_gram[{tag}]", lambda r=r: eigh_gram(n, r))
        if failure:
            records.append(failure)
            continue
        records += [
            run_check(SUITE, f"extended_recurrence[{tag}]", lambda d=decomp: _extended(d, floor)),
            run_check(SUITE, f"interior_recurrence[{tag}]", lambda d=decomp: _interior(d, floor)),
            run_check(SUITE, f"reconstruction[{tag}]", lambda d=decomp: _reconstruction(d, floor, tol)),
            run_check(SUITE, f"real_form[{tag}]", lambda d=decomp: _real_form(d, floor, tol)),
        ]
    return records
