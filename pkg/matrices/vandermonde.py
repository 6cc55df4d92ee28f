"""
Closed-form inverse of a Vandermonde matrix A_{i,j} = x_i^{j-1}.

A factors as L U with U unit upper triangular, and both inverse factors
have explicit entries:
    (L^{-1})_{i,j} = prod_{k <= i, k != j} 1 / (x_j - x_k)          (i >= j)
    (U^{-1})_{i,j} = (-1)^{i+j} e_{j-i}(x_1, ..., x_{j-1})           (i <= j)
so A^{-1} = U^{-1} L^{-1}.
"""

from itertools import combinations

import numpy as np

from utils.errors import ConditioningError
from utils.guardrail import require_vector

SEPARATION_FLOOR = 1e-10


def _nodes(nodes, check_separation=True):
    x = np.asarray(require_vector(nodes, name="nodes"), dtype=complex)
    if check_separation and x.shape[0] > 1:
        gap, (a, b) = min((abs(x[a] - x[b]), (a, b)) for a, b in combinations(range(x.shape[0]), 2))
        if gap < SEPARATION_FLOOR:
            raise ConditioningError(f"nodes {a + 1} and {b + 1} are {gap:.3e} apart")
    return x


def vandermonde_matrix(nodes):
    x = _nodes(nodes, check_separation=False)
    return np.vander(x, increasing=True)


def inv_L(nodes):
    x = _nodes(nodes)
    n = x.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for j in range(n):
        acc = 1.0 + 0.0j
        for k in range(j):
            acc /= x[j] - x[k]
        out[j, j] = acc
        for i in range(j + 1, n):
            acc /= x[j] - x[i]
            out[i, j] = acc
    return out


def elementary_symmetric(values):
    """e_0..e_m of `values` by the one-node-at-a-time recurrence."""
    e = np.zeros(len(values) + 1, dtype=complex)
    e[0] = 1.0
    for count, x in enumerate(values, start=1):
        e[1:count + 1] = e[1:count + 1] + x * e[0:count]
    return e


def inv_U(nodes):
    x = _nodes(nodes, check_separation=False)
    n = x.shape[0]
    out = np.zeros((n, n), dtype=complex)
    e = np.zeros(n + 1, dtype=complex)
    e[0] = 1.0
    for j in range(n):
        # e holds e_0..e_j of x_1..x_j (0-based prefix x[:j])
        for i in range(j + 1):
            out[i, j] = (-1) ** (i + j) * e[j - i]
        if j < n - 1:
            e[1:j + 2] = e[1:j + 2] + x[j] * e[0:j + 1]
    return out


def inv_U_recursive(nodes):
    """(U^{-1})_{i,j} = (U^{-1})_{i-1,j-1} - (U^{-1})_{i,j-1} x_{j-1}, unit diagonal."""
    x = _nodes(nodes, check_separation=False)
    n = x.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for j in range(n):
        out[j, j] = 1.0
        for i in range(j):
            above = out[i - 1, j - 1] if i > 0 else 0.0
            out[i, j] = above - out[i, j - 1] * x[j - 1]
    return out


def vand_inverse(nodes):
    x = _nodes(nodes)
    return inv_U(x) @ inv_L(x)
