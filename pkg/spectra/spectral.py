"""
Spectral decomposition of D^r through its Gram matrix.

S = J D^r is symmetric with S^2 = G = (D^r)^T D^r, so its eigenvectors are
the right singular vectors of D^r and its eigenvalues are +-sigma_j. In
"two_sided" mode the compiled Householder + QL kernels run on S for the
upper half of the spectrum (sigma_j above the geometric mean of the
extremes) and on S^{-1} = D^{-r} J for the rest. Both hold exact integers.
"direct" solves G alone.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil, cos, floor, pi, sqrt

import numpy as np
import pandas as pd

from config.config import config
from matrices.diffmat import build_gram, dense_Dr, dense_Dr_inverse
from services.report_service import write_csv
from spectra.kernels import EPS, householder_tridiagonalize, one_sided_jacobi, tridiagonal_ql
from utils.errors import ConditioningError, ConvergenceError, InvariantViolation, PreconditionError
from utils.guardrail import require_half_band, require_index, require_max_n
from utils.logger import get_logger

logger = get_logger(__name__)

METHODS = ("two_sided", "direct")


@dataclass(frozen=True)
class SpectralDecomposition:
    n: int
    r: int
    sigma: np.ndarray
    lam: np.ndarray
    V: np.ndarray
    U: np.ndarray
    method: str = "two_sided"
    from_root: np.ndarray = field(default=None, repr=False)

    def v(self, j):
        return self.V[:, j - 1]

    def u(self, j):
        return self.U[:, j - 1]


@dataclass(frozen=True)
class SigmaBoundsReport:
    n: int
    r: int
    sigma_max: float
    upper_bound: float
    sigma_min: float
    ratio_min: float
    ratio_max: float
    decay_slope: float


@dataclass(frozen=True)
class FlatnessReport:
    n: int
    r: int
    v_inf: np.ndarray
    u_inf: np.ndarray
    s: float
    s_u: float


@dataclass(frozen=True)
class ReversalReport:
    max_norm_gap: float
    max_vector_gap: float
    max_reversed_gram_gap: float


def fix_signs(vectors):
    """Largest-magnitude entry of every column made positive; ties go to the lowest index."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.where(vectors[idx, np.arange(vectors.shape[1])] < 0, -1.0, 1.0)
    return vectors * signs


def symmetric_eigh(a, max_iter=None):
    """Eigenpairs of a dense symmetric matrix, eigenvalues descending, vectors as columns."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    diag, offdiag, qt = householder_tridiagonalize(a)
    status = tridiagonal_ql(diag, offdiag, qt, max_iter or config.MAX_QL_ITERATIONS)
    if status >= 0:
        raise ConvergenceError(f"QL iteration did not converge for eigenvalue {status + 1}", index=status + 1)
    order = np.argsort(-diag, kind="stable")
    return diag[order], np.ascontiguousarray(qt[order].T)


def _difference_columns(mat, r):
    out = mat
    for _ in range(r):
        out = np.diff(out, axis=0, prepend=0.0)
    return out


def _reverse_cumsum_columns(mat, r):
    out = mat
    for _ in range(r):
        out = np.cumsum(out[::-1], axis=0)[::-1]
    return out


def _square_roots(n, r, flipped=False):
    """S = J D^r and S^{-1} = D^{-r} J (J S J and J S^{-1} J when flipped)."""
    root = dense_Dr(n, r).astype(np.float64)[::-1, :]
    inverse = dense_Dr_inverse(n, r)[:, ::-1]
    if flipped:
        root, inverse = root[::-1, ::-1], inverse[::-1, ::-1]
    return np.ascontiguousarray(root), np.ascontiguousarray(inverse)


def _by_magnitude(values, vectors, descending=True):
    order = np.argsort(-np.abs(values) if descending else np.abs(values), kind="stable")
    return np.abs(values[order]), vectors[:, order]


def _eigenpairs(n, r, method, flipped=False):
    """
    (sigma descending, vectors, from_root). from_root marks the pairs taken
    from S (or from G in direct mode); the others come from S^{-1}.
    """
    if method == "direct":
        gram = build_gram(n, r).as_float()
        if flipped:
            gram = np.ascontiguousarray(gram[::-1, ::-1])
        lam, vecs = symmetric_eigh(gram)
        if np.any(lam <= 0.0):
            raise ConditioningError(f"non-positive eigenvalue from the direct solve (n={n}, r={r})")
        return np.sqrt(lam), vecs, np.ones(n, dtype=bool)

    root, inverse = _square_roots(n, r, flipped)
    sigma_s, vec_s = _by_magnitude(*symmetric_eigh(root))
    nu, vec_k = _by_magnitude(*symmetric_eigh(inverse), descending=False)
    if np.any(nu == 0.0):
        raise ConditioningError(f"singular inverse square root (n={n}, r={r})")
    sigma_k = 1.0 / nu
    split = sqrt(sigma_s[0] * sigma_k[-1])
    from_root = sigma_s >= split
    sigma = np.where(from_root, sigma_s, sigma_k)
    vecs = np.where(from_root[None, :], vec_s, vec_k)
    return sigma, vecs, from_root


def eigh_gram(n, r, method="two_sided"):
    """
    Singular values (descending) and right/left singular vectors of D^r.
    Left vectors are u_j = D^r v_j / sigma_j, computed on the inverse side as
    sigma_j (D^{-r})^T v_j.
    """
    n, r = require_half_band(n, r)
    require_max_n(n)
    if method not in METHODS:
        raise PreconditionError(f"method must be one of {METHODS}, got {method!r}")

    sigma, V, from_root = _eigenpairs(n, r, method)
    if not np.all(sigma > 0.0):
        raise ConditioningError(f"zero singular value from the {method} solve (n={n}, r={r})")

    V = fix_signs(V / np.linalg.norm(V, axis=0))
    U = np.where(
        from_root[None, :],
        _difference_columns(V, r) / sigma,
        _reverse_cumsum_columns(V, r) * sigma,
    )
    U = U / np.linalg.norm(U, axis=0)
    logger.debug("eigh_gram n=%d r=%d method=%s upper-side pairs=%d", n, r, method, int(from_root.sum()))
    return SpectralDecomposition(n, r, sigma, sigma ** 2, V, U, method, from_root)


def one_sided_jacobi_svd(a, tol=None, max_sweeps=60):
    """Singular values (descending) of a dense matrix by one-sided Jacobi."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    values, sweeps = one_sided_jacobi(a, tol or 10 * EPS, max_sweeps)
    if sweeps < 0:
        raise ConvergenceError(f"one-sided Jacobi did not converge in {max_sweeps} sweeps")
    return np.sort(values)[::-1]


def jacobi_singular_values(n, r):
    return one_sided_jacobi_svd(dense_Dr(n, r).astype(np.float64))


@lru_cache(maxsize=64)
def smallest_difference_singular_value(n):
    return float(eigh_gram(n, 1).sigma[-1])


# --- Verifiers ---

def decay_slope(decomp, lo=0.02, hi=0.2, corrected=False):
    """
    Least-squares slope of log sigma_{N-j+1} against log(j/N) for j in [lo N, hi N].

    sigma_{N-j+1} behaves like (2 sin(pi j / 2N))^r, so on wide bands the plain
    fit drifts below r. corrected=True regresses against log(2 sin(pi j / 2N))
    instead, which stays near r up to j = N/2.
    """
    n = decomp.n
    j = np.arange(max(1, ceil(lo * n)), floor(hi * n) + 1)
    if j.size < 2:
        raise PreconditionError(f"band [{lo}, {hi}] holds fewer than two indices for n={n}")
    x = np.log(2.0 * np.sin(pi * j / (2 * n))) if corrected else np.log(j / n)
    y = np.log(decomp.sigma[n - j])
    return float(np.polyfit(x, y, 1)[0])


def check_sigma_bounds(decomp, slack=1e-12):
    n, r = decomp.n, decomp.r
    upper = (2.0 * cos(pi / (2 * n + 1))) ** r
    if decomp.sigma[0] > upper * (1.0 + slack):
        raise InvariantViolation(
            "sigma_upper", f"sigma_1={decomp.sigma[0]!r} exceeds {upper!r}",
            index=1, values={"sigma_1": float(decomp.sigma[0]), "bound": upper},
        )
    if not decomp.sigma[-1] > 0.0:
        raise InvariantViolation("sigma_positive", "sigma_N is not positive", index=n,
                                 values={"sigma_N": float(decomp.sigma[-1])})

    j = np.arange(1, n + 1)
    tail = decomp.sigma[::-1]
    keep = tail >= 1e-12
    ratios = tail[keep] / (j[keep] / n) ** r
    return SigmaBoundsReport(
        n=n,
        r=r,
        sigma_max=float(decomp.sigma[0]),
        upper_bound=upper,
        sigma_min=float(decomp.sigma[-1]),
        ratio_min=float(ratios.min()),
        ratio_max=float(ratios.max()),
        decay_slope=decay_slope(decomp),
    )


def flatness(decomp):
    v_inf = np.max(np.abs(decomp.V), axis=0)
    u_inf = np.max(np.abs(decomp.U), axis=0)
    root_n = sqrt(decomp.n)
    s = root_n * float(v_inf.max())
    s_u = root_n * float(u_inf.max())
    if s < 1.0 - 1e-12:
        raise InvariantViolation("flatness_floor", f"s={s!r} below 1", values={"s": s})
    return FlatnessReport(decomp.n, decomp.r, v_inf, u_inf, s, s_u)


def _signed_gap(a, b):
    """Columnwise min(|a - b|_inf, |a + b|_inf)."""
    return np.minimum(np.max(np.abs(a - b), axis=0), np.max(np.abs(a + b), axis=0))


def check_reversal(decomp, tol_norm=1e-8, tol_vector=1e-6):
    """
    u_j = +-J v_j, so the sup norms agree; the eigenvectors w_j of the
    reversed Gram J G J = D^r (D^r)^T must match +-u_j as well.
    """
    n, r = decomp.n, decomp.r
    reversed_v = decomp.V[::-1, :]

    norm_gaps = np.abs(np.max(np.abs(decomp.U), axis=0) - np.max(np.abs(decomp.V), axis=0))
    vector_gaps = _signed_gap(decomp.U, reversed_v)

    _, W, _ = _eigenpairs(n, r, decomp.method, flipped=True)
    gram_gaps = _signed_gap(W / np.linalg.norm(W, axis=0), decomp.U)

    for name, gaps, tol in (
        ("reversal_norm", norm_gaps, tol_norm),
        ("reversal_vector", vector_gaps, tol_vector),
        ("reversed_gram", gram_gaps, tol_vector),
    ):
        worst = int(np.argmax(gaps))
        if gaps[worst] > tol:
            raise InvariantViolation(name, f"gap {gaps[worst]!r} above {tol!r} at j={worst + 1}",
                                     index=worst + 1, values={"gap": float(gaps[worst]), "tol": tol})
    return ReversalReport(float(norm_gaps.max()), float(vector_gaps.max()), float(gram_gaps.max()))


def dynamical_bound(decomp, j, alpha=None):
    """
    sup-norm bound alpha^r * sigma_N(D) * sqrt(N) for v_j, valid whenever
    sigma_j^{1/r} <= alpha * sigma_N(D). alpha=None takes the equality case.
    """
    n, r = decomp.n, decomp.r
    j = require_index(j, n, "j")
    base = smallest_difference_singular_value(n)
    root = float(decomp.sigma[j - 1]) ** (1.0 / r)
    if alpha is None:
        alpha = root / base
    elif root > alpha * base * (1.0 + 1e-12):
        raise PreconditionError(f"sigma_{j}^(1/r)={root!r} exceeds alpha*sigma_N(D)={alpha * base!r}")
    bound = alpha ** r * base * sqrt(n)
    v_inf = float(np.max(np.abs(decomp.v(j))))
    if v_inf > bound * (1.0 + 1e-10):
        raise InvariantViolation("dynamical_bound", f"|v_{j}|_inf={v_inf!r} exceeds {bound!r}",
                                 index=j, values={"v_inf": v_inf, "bound": bound})
    return bound


def export_spectrum_csv(decomp, path, config_hash=None):
    """Columns (j, sigma, lambda, v_inf_norm, u_inf_norm)."""
    frame = pd.DataFrame({
        "j": np.arange(1, decomp.n + 1),
        "sigma": decomp.sigma,
        "lambda": decomp.lam,
        "v_inf_norm": np.max(np.abs(decomp.V), axis=0),
        "u_inf_norm": np.max(np.abs(decomp.U), axis=0),
    })
    return write_csv(frame, path, config_hash)
