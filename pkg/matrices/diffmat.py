"""
Finite-difference operators.
D is the N x N lower-bidiagonal first-difference matrix (1 on the diagonal,
-1 below it). Everything here acts implicitly in O(N r) except the dense
builders, which exist for oracles and small exports.
"""

from dataclasses import dataclass
from math import comb

import numpy as np
import pandas as pd

from services.report_service import write_csv
from utils.errors import InvariantViolation
from utils.guardrail import require_half_band, require_index, require_order, require_size, require_vector

_INT_LIMIT = 2 ** 62


def _exact_ready(v, growth):
    """Promote integer vectors to Python ints when `growth` could overflow int64."""
    arr = np.asarray(v)
    if arr.dtype.kind in "iu":
        peak = int(np.max(np.abs(arr))) if arr.size else 0
        if peak * growth >= _INT_LIMIT:
            return arr.astype(object)
        return arr.astype(np.int64)
    return arr


# --- Implicit actions ---

def apply_D(v):
    """(Dv)_1 = v_1, (Dv)_i = v_i - v_{i-1}."""
    v = require_vector(v)
    return np.diff(v, prepend=0)


def apply_DT(v):
    """(D^T v)_i = v_i - v_{i+1}, last entry v_N."""
    v = require_vector(v)
    return -np.diff(v, append=0)


def apply_Dr(v, r):
    r = require_order(r)
    out = _exact_ready(require_vector(v), 2 ** r)
    for _ in range(r):
        out = apply_D(out)
    return out


def apply_DrT(v, r):
    r = require_order(r)
    out = _exact_ready(require_vector(v), 2 ** r)
    for _ in range(r):
        out = apply_DT(out)
    return out


def apply_Dinv(v):
    """Cumulative sum; exact for integer input."""
    v = require_vector(v)
    return np.cumsum(_exact_ready(v, v.shape[0]))


def apply_Dinv_T(v):
    """(D^{-T} v)_i = sum_{j >= i} v_j."""
    v = require_vector(v)
    return np.cumsum(_exact_ready(v, v.shape[0])[::-1])[::-1]


def apply_Dinv_r(v, r):
    r = require_order(r)
    v = require_vector(v)
    out = _exact_ready(v, comb(v.shape[0] + r - 1, r))
    for _ in range(r):
        out = np.cumsum(out)
    return out


def apply_Dinv_rT(v, r):
    r = require_order(r)
    v = require_vector(v)
    out = _exact_ready(v, comb(v.shape[0] + r - 1, r))
    for _ in range(r):
        out = np.cumsum(out[::-1])[::-1]
    return out


def reverse(v):
    """(Jv)_i = v_{N+1-i}."""
    return require_vector(v)[::-1].copy()


# --- Gram matrix of D^r ---

def gram_entry(n, r, i, j):
    """
    Exact entry (i, j) (1-based) of G = (D^r)^T D^r. Requires r < n/2.
    Interior rows follow a signed central binomial; the last r rows are
    truncated convolutions of binomial rows.
    """
    n, r = require_half_band(n, r)
    require_index(i, n, "i")
    require_index(j, n, "j")
    a, b = (i, j) if i <= j else (j, i)
    m = b - a
    if m > r:
        return 0
    sign = -1 if m % 2 else 1
    if a <= n - r:
        return sign * comb(2 * r, r - m)
    return sign * sum(comb(r, l + m) * comb(r, l) for l in range(0, n - b + 1))


@dataclass(frozen=True)
class GramMatrix:
    n: int
    r: int
    entries: np.ndarray

    def entry(self, i, j):
        return int(self.entries[i - 1, j - 1])

    def as_float(self):
        return self.entries.astype(np.float64)

    def perturbed(self, i, j, delta=1):
        """Copy with one symmetric pair of entries shifted by `delta`."""
        entries = self.entries.copy()
        entries[i - 1, j - 1] += delta
        if i != j:
            entries[j - 1, i - 1] += delta
        return GramMatrix(self.n, self.r, entries)


def build_gram(n, r):
    n, r = require_half_band(n, r)
    entries = np.zeros((n, n), dtype=object if comb(2 * r, r) >= _INT_LIMIT else np.int64)
    for i in range(1, n + 1):
        for m in range(0, min(r, n - i) + 1):
            value = gram_entry(n, r, i, i + m)
            entries[i - 1, i + m - 1] = value
            entries[i + m - 1, i - 1] = value
    return GramMatrix(n, r, entries)


def verify_gram(gram):
    """Compare against the exact integer product (D^r)^T D^r."""
    # int64 products are exact while C(2r, r) < 2^62
    dense = dense_Dr(gram.n, gram.r, exact=comb(2 * gram.r, gram.r) >= _INT_LIMIT)
    exact = dense.T.dot(dense)
    diff = np.argwhere(exact != gram.entries)
    if diff.size:
        i, j = (int(x) + 1 for x in diff[0])
        raise InvariantViolation(
            "gram_exact",
            f"entry ({i}, {j}) is {gram.entry(i, j)}, exact product gives {exact[i - 1, j - 1]}",
            index=(i, j),
            values={"stored": gram.entry(i, j), "exact": int(exact[i - 1, j - 1]), "mismatches": len(diff)},
        )
    return True


def inverse_gram(n, r):
    """K = D^{-r} (D^{-r})^T = G^{-1}, dense float."""
    lower = dense_Dr_inverse(n, r)
    return lower @ lower.T


# --- Dense builders ---

def dense_Dr(n, r, exact=False):
    n = require_size(n, "n")
    r = require_order(r)
    out = np.zeros((n, n), dtype=object if exact else np.int64)
    for k in range(min(r, n - 1) + 1):
        idx = np.arange(k, n)
        out[idx, idx - k] = (-1) ** k * comb(r, k)
    return out


def dense_Dr_inverse(n, r, exact=False):
    """(D^{-r})_{i,j} = C(i-j+r-1, r-1) for i >= j."""
    n = require_size(n, "n")
    r = require_order(r)
    out = np.zeros((n, n), dtype=object if exact else np.float64)
    for t in range(n):
        idx = np.arange(t, n)
        out[idx, idx - t] = comb(t + r - 1, r - 1)
    return out


def check_persymmetry(n, r):
    dense = dense_Dr(n, r, exact=True)
    flipped = dense[::-1, ::-1].T
    bad = np.argwhere(dense != flipped)
    if bad.size:
        i, j = (int(x) + 1 for x in bad[0])
        raise InvariantViolation("persymmetry", f"D^r differs from its persymmetric image at ({i}, {j})", index=(i, j))
    return True


def difference_singular_values(n):
    """Singular values of D in descending order; sigma_1 = 2 cos(pi / (2N+1))."""
    n = require_size(n, "n")
    k = np.arange(n, 0, -1)
    return 2.0 * np.sin((2 * k - 1) * np.pi / (2 * (2 * n + 1)))


def export_gram_csv(gram, path, config_hash=None):
    """Exact integers, row-major, no header row."""
    return write_csv(pd.DataFrame(gram.entries), path, config_hash, header=False)
