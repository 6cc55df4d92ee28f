"""
Linear recurrence behind every right singular vector of D^r.

A unit eigenvector v of G with eigenvalue lambda, padded with r zeros below
index 1 and r forced values above index N, satisfies

    sum_{k=0}^{2r} (-1)^{k+r} C(2r, k) v_{i-r+k} = lambda v_i    for i in [1, N],

so v_i = sum_l c_l rho_l^i over the roots of the characteristic polynomial.
The 2r coefficients span the one-dimensional nullspace of the boundary system.
"""

from dataclasses import dataclass
from math import comb, cos, pi

import numpy as np
import pandas as pd

from matrices.diffmat import build_gram
from roots.charpoly import roots_for
from utils.errors import ConditioningError, DimensionError, InvariantViolation, NullspaceError, PreconditionError
from utils.guardrail import require_order, require_size, require_vector
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class ExtendedSequence:
    n: int
    r: int
    lam: float
    start: int
    values: np.ndarray

    @property
    def stop(self):
        return self.start + self.values.shape[0] - 1

    def value(self, i):
        if not self.start <= i <= self.stop:
            raise PreconditionError(f"index {i} outside the stored range [{self.start}, {self.stop}]")
        return float(self.values[i - self.start])


@dataclass(frozen=True)
class CoefficientSet:
    """
    Coefficients stored relative to per-root anchors: v_i = sum_l scaled_l rho_l^{i - a_l}.
    Expanding roots are anchored at N+1, all others at 0, so no power overflows.
    """
    lam: float
    r: int
    n: int
    rootset: object
    scaled: np.ndarray
    anchors: np.ndarray
    residual: float
    relative_residual: float
    conjugacy_error: float

    @property
    def coefficients(self):
        """Unanchored c_l = scaled_l rho_l^{-a_l} (underflows for large N)."""
        return self.scaled * self.rootset.values ** (-self.anchors.astype(float))


@dataclass(frozen=True)
class RealTerm:
    k: int
    ell: int
    weight: int
    c_tilde: float
    modulus: float
    theta: float
    gamma: float
    anchor: int


@dataclass(frozen=True)
class ScanPoint:
    lam: float
    smallest: float
    relative: float


def _recurrence_kernel(r):
    return np.array([(-1) ** (k + r) * comb(2 * r, k) for k in range(2 * r + 1)], dtype=np.float64)


def _gram_lambda_ceiling(n, r):
    return (2.0 * cos(pi / (2 * n + 1))) ** (2 * r)


def extend_sequence(v, lam, r, extra=0, residual_tol=1e-8):
    """
    Zero-pad [1-r, 0], solve the r top conditions on [N+1, N+r] by forward
    substitution, then continue `extra` steps both ways with the 2r-term
    recurrence.
    """
    r = require_order(r)
    v = np.asarray(require_vector(v), dtype=np.float64)
    n = v.shape[0]
    gram = build_gram(n, r).as_float()
    residual = float(np.linalg.norm(gram @ v - lam * v))
    if residual > residual_tol * _gram_lambda_ceiling(n, r):
        raise PreconditionError(f"v is not an eigenvector for lambda={lam!r} (residual {residual:.3e})")

    body = np.concatenate([np.zeros(r), v, np.zeros(r)])
    weights = [(-1) ** k * comb(r, k) for k in range(r + 1)]
    for pos in range(r + n, 2 * r + n):
        body[pos] = -sum(weights[k] * body[pos - k] for k in range(1, r + 1))

    start = 1 - r
    if extra:
        extra = require_size(extra, "extra", 0)
        body, start = _continue_both_ways(body, start, lam, r, extra)
    return ExtendedSequence(n, r, float(lam), start, body)


def _continue_both_ways(body, start, lam, r, extra):
    wide = [(-1) ** k * comb(2 * r, k) for k in range(2 * r + 1)]
    sign = (-1) ** r
    values = list(body)
    for _ in range(extra):
        i = len(values)
        tail = sign * lam * values[i - r] - sum(wide[k] * values[i - 2 * r + k] for k in range(2 * r))
        values.append(tail)
    for _ in range(extra):
        head = sign * lam * values[r - 1] - sum(wide[k] * values[k - 1] for k in range(1, 2 * r + 1))
        values.insert(0, head)
        start -= 1
    return np.array(values), start


def _window_residuals(values, lam, r):
    """Residual at every index whose full window of 2r+1 values is available."""
    kernel = _recurrence_kernel(r)
    return np.correlate(values, kernel, mode="valid") - lam * values[r:values.shape[0] - r]


def check_recurrence(seq, tol=None):
    """Max |residual| over i in [1, N]; raises when above `tol` (if given)."""
    residuals = _window_residuals(seq.values, seq.lam, seq.r)
    first = seq.start + seq.r
    lo, hi = 1 - first, seq.n - first + 1
    window = np.abs(residuals[lo:hi])
    worst = int(np.argmax(window))
    value = float(window[worst])
    if tol is not None and value > tol:
        raise InvariantViolation("recurrence", f"residual {value!r} at i={worst + 1}", index=worst + 1,
                                 values={"residual": value, "tol": tol})
    return value


def check_interior_recurrence(v, lam, r):
    """Residual of the raw eigenvector for r < i <= N - r."""
    r = require_order(r)
    v = np.asarray(require_vector(v), dtype=np.float64)
    if v.shape[0] <= 2 * r:
        raise PreconditionError("vector too short for an interior window")
    return float(np.max(np.abs(_window_residuals(v, lam, r))))


# --- Boundary system ---

def root_anchors(rootset, n):
    anchors = np.zeros(2 * rootset.r, dtype=np.int64)
    for pos, root in enumerate(rootset.roots):
        if root.k != 0 and abs(root.value) > 1.0:
            anchors[pos] = n + 1
    return anchors


def binomial_transform(r):
    """H_{i,j} = (-1)^{i-j} C(i-1, j-1); maps rows rho^i to rho^{1-r} (rho - 1)^t."""
    h = np.zeros((r, r))
    for i in range(r):
        for j in range(i + 1):
            h[i, j] = (-1) ** (i - j) * comb(i, j)
    return h


def boundary_matrix(lam, r, n, rootset=None, precondition=False):
    """
    2r x 2r system: r rows forcing the zero padding on [1-r, 0] and r rows
    forcing the top conditions on [N+1, N+r], one column per root.
    """
    r = require_order(r)
    n = require_size(n, "n", 2 * r + 1)
    rootset = rootset or roots_for(lam, r)
    if rootset.ill_conditioned:
        raise ConditioningError(
            f"roots for lambda={lam:g} r={r} are {rootset.min_distance:.2e} apart; boundary system is singular to working precision"
        )
    rho = rootset.values
    anchors = root_anchors(rootset, n)

    left_idx = np.arange(1 - r, 1)[:, None]
    left = rho[None, :] ** (left_idx - anchors[None, :])
    if precondition:
        left = binomial_transform(r) @ left

    right_idx = np.arange(n + 1, n + r + 1)[:, None]
    right = rho[None, :] ** (right_idx - r - anchors[None, :]) * (rho[None, :] - 1.0) ** r
    return np.vstack([left, right])


def _equilibrate(matrix):
    rows = np.linalg.norm(matrix, axis=1)
    rows[rows == 0.0] = 1.0
    balanced = matrix / rows[:, None]
    cols = np.linalg.norm(balanced, axis=0)
    cols[cols == 0.0] = 1.0
    return balanced / cols[None, :], cols


def _evaluate(scaled, rho, anchors, indices):
    powers = rho[None, :] ** (np.asarray(indices)[:, None] - anchors[None, :])
    return powers @ scaled


def solve_coeffs(lam, r, n, precondition=False, null_tol=1e-6):
    """
    Nullspace vector of the boundary system, phase-rotated so the
    reconstruction is real, scaled to unit l2 norm on [1, N] and signed so
    its largest-magnitude entry is positive.
    """
    rootset = roots_for(lam, r)
    matrix = boundary_matrix(lam, r, n, rootset, precondition)
    anchors = root_anchors(rootset, n)

    raw = np.linalg.svd(matrix, compute_uv=False)
    balanced, col_scale = _equilibrate(matrix)
    _, s, vh = np.linalg.svd(balanced)
    relative = s / s[0]
    dimension = int(np.sum(relative <= null_tol))
    if dimension != 1:
        raise NullspaceError(
            f"boundary system for lambda={lam!r} has numerical nullspace dimension {dimension}",
            dimension=dimension,
        )
    scaled = vh[-1].conj() / col_scale

    rho = rootset.values
    indices = np.arange(1, n + 1)
    values = _evaluate(scaled, rho, anchors, indices)
    peak = values[int(np.argmax(np.abs(values)))]
    scaled = scaled * (abs(peak) / peak)
    real = _evaluate(scaled, rho, anchors, indices).real
    scaled = scaled / np.linalg.norm(real)
    real = real / np.linalg.norm(real)
    if real[int(np.argmax(np.abs(real)))] < 0:
        scaled = -scaled

    partners = [rootset.conjugate_partner(p) for p in range(2 * r)]
    conjugacy = float(np.max(np.abs(scaled - scaled[partners].conj())) / np.max(np.abs(scaled)))
    return CoefficientSet(
        lam=float(lam),
        r=r,
        n=n,
        rootset=rootset,
        scaled=scaled,
        anchors=anchors,
        residual=float(raw[-1]),
        relative_residual=float(raw[-1] / raw[0]),
        conjugacy_error=conjugacy,
    )


def eval_formula(coeffs, rootset, i, imag_tol=1e-8):
    """v_i from the closed form over `rootset`; the imaginary part must vanish."""
    if rootset.r != coeffs.r:
        raise DimensionError(f"{2 * rootset.r} roots for {2 * coeffs.r} coefficients")
    value = complex(_evaluate(coeffs.scaled, rootset.values, coeffs.anchors, [i])[0])
    limit = imag_tol * float(np.max(np.abs(coeffs.scaled)))
    if abs(value.imag) > limit:
        raise InvariantViolation("formula_imaginary", f"Im v_{i} = {value.imag!r}", index=i,
                                 values={"imag": value.imag, "limit": limit})
    return value.real


def eval_formula_range(coeffs, indices):
    return _evaluate(coeffs.scaled, coeffs.rootset.values, coeffs.anchors, indices).real


def real_representation(coeffs):
    """
    Cosine-sum view: one term per conjugate class, weight 2 for a
    conjugate pair and 1 for the real roots of even r.
    """
    r = coeffs.r
    positions = [(0, 0)]
    positions += [(k, ell) for k in range(1, (r - 1) // 2 + 1) for ell in (0, 1)]
    if r % 2 == 0:
        positions += [(r // 2, 0), (r // 2, 1)]
    terms = []
    for k, ell in positions:
        pos = 2 * k + ell
        rho = coeffs.rootset.values[pos]
        c = coeffs.scaled[pos]
        weight = 1 if (r % 2 == 0 and 2 * k == r) else 2
        terms.append(RealTerm(
            k=k,
            ell=ell,
            weight=weight,
            c_tilde=weight * abs(c),
            modulus=abs(rho),
            theta=float(np.angle(rho)),
            gamma=float(np.angle(c)),
            anchor=int(coeffs.anchors[pos]),
        ))
    return terms


def eval_real_form(coeffs, i, terms=None):
    terms = terms or real_representation(coeffs)
    total = 0.0
    for t in terms:
        shift = i - t.anchor
        total += t.c_tilde * t.modulus ** shift * np.cos(shift * t.theta + t.gamma)
    return float(total)


# --- Scans and reports ---

def secular_scan(r, n, grid, precondition=False):
    points = []
    for lam in grid:
        s = np.linalg.svd(boundary_matrix(lam, r, n, precondition=precondition), compute_uv=False)
        points.append(ScanPoint(float(lam), float(s[-1]), float(s[-1] / s[0])))
    logger.debug("secular scan r=%d n=%d over %d points", r, n, len(points))
    return points


def locate_minima(scan, flag_tol=1e-6):
    """Interior local minima of the relative smallest singular value."""
    rel = np.array([p.relative for p in scan])
    minima = []
    for t in range(1, rel.shape[0] - 1):
        if rel[t] < rel[t - 1] and rel[t] < rel[t + 1]:
            minima.append({"index": t, "lambda": scan[t].lam, "relative": float(rel[t]),
                           "flagged": bool(rel[t] <= flag_tol)})
    return minima


def reconstruction_report(decomp, min_lambda=1e-6, precondition=False):
    """One record per eigenpair with lambda_j >= min_lambda."""
    records = []
    for j in range(1, decomp.n + 1):
        lam = float(decomp.lam[j - 1])
        if lam < min_lambda:
            continue
        coeffs = solve_coeffs(lam, decomp.r, decomp.n, precondition=precondition)
        formula = eval_formula_range(coeffs, np.arange(1, decomp.n + 1))
        records.append({
            "j": j,
            "lambda": lam,
            "residual": coeffs.relative_residual,
            "max_diff": float(np.max(np.abs(formula - decomp.v(j)))),
            "conjugacy_err": coeffs.conjugacy_error,
        })
    return pd.DataFrame.from_records(records, columns=["j", "lambda", "residual", "max_diff", "conjugacy_err"])
