"""
Compiled dense kernels: Householder tridiagonalization, implicit-shift QL on
the tridiagonal form, and Hestenes one-sided Jacobi SVD.
Kernels never raise; they return a status code the caller turns into an error.
"""

import math

import numpy as np
from numba import njit

EPS = np.finfo(np.float64).eps


@njit(cache=True)
def householder_tridiagonalize(a):
    """
    Reduce a symmetric matrix to tridiagonal form T = Q^T A Q.
    Returns (diag, offdiag, qt) with qt = Q^T stored row-wise; offdiag[i]
    couples i and i+1 and offdiag[n-1] = 0.
    """
    n = a.shape[0]
    work = a.copy()
    qt = np.eye(n)
    v = np.empty(n)
    p = np.empty(n)
    for k in range(n - 2):
        alpha = 0.0
        for i in range(k + 1, n):
            alpha += work[i, k] * work[i, k]
        alpha = math.sqrt(alpha)
        if alpha == 0.0:
            continue
        if work[k + 1, k] > 0.0:
            alpha = -alpha
        vnorm2 = 0.0
        for i in range(k + 1, n):
            v[i] = work[i, k]
        v[k + 1] -= alpha
        for i in range(k + 1, n):
            vnorm2 += v[i] * v[i]
        if vnorm2 == 0.0:
            continue
        beta = 2.0 / vnorm2

        # p = beta * B v on the trailing block
        for i in range(k + 1, n):
            s = 0.0
            for j in range(k + 1, n):
                s += work[i, j] * v[j]
            p[i] = beta * s
        kappa = 0.0
        for i in range(k + 1, n):
            kappa += p[i] * v[i]
        kappa *= 0.5 * beta
        for i in range(k + 1, n):
            p[i] -= kappa * v[i]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                work[i, j] -= v[i] * p[j] + p[i] * v[j]

        work[k + 1, k] = alpha
        work[k, k + 1] = alpha
        for i in range(k + 2, n):
            work[i, k] = 0.0
            work[k, i] = 0.0

        # Q <- Q H, kept as rows of Q^T
        for j in range(n):
            p[j] = 0.0
        for i in range(k + 1, n):
            for j in range(n):
                p[j] += v[i] * qt[i, j]
        for i in range(k + 1, n):
            scale = beta * v[i]
            for j in range(n):
                qt[i, j] -= scale * p[j]

    diag = np.empty(n)
    offdiag = np.zeros(n)
    for i in range(n):
        diag[i] = work[i, i]
    for i in range(n - 1):
        offdiag[i] = work[i + 1, i]
    return diag, offdiag, qt


@njit(cache=True)
def tridiagonal_ql(diag, offdiag, zt, max_iter):
    """
    Implicit-shift QL on (diag, offdiag), rotating the rows of zt alongside.
    On return diag holds eigenvalues and row i of zt the matching eigenvector.
    Returns -1 on success, otherwise the index that failed to converge.
    """
    n = diag.shape[0]
    cols = zt.shape[1]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(diag[m]) + abs(diag[m + 1])
                if abs(offdiag[m]) + dd == dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return l
            it += 1
            g = (diag[l + 1] - diag[l]) / (2.0 * offdiag[l])
            r = math.hypot(g, 1.0)
            g = diag[m] - diag[l] + offdiag[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            deflated = False
            i = m - 1
            while i >= l:
                f = s * offdiag[i]
                b = c * offdiag[i]
                r = math.hypot(f, g)
                offdiag[i + 1] = r
                if r == 0.0:
                    diag[i + 1] -= p
                    offdiag[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = diag[i + 1] - p
                r = (diag[i] - g) * s + 2.0 * c * b
                p = s * r
                diag[i + 1] = g + p
                g = c * r - b
                for k in range(cols):
                    f = zt[i + 1, k]
                    zt[i + 1, k] = s * zt[i, k] + c * f
                    zt[i, k] = c * zt[i, k] - s * f
                i -= 1
            if deflated:
                continue
            diag[l] -= p
            offdiag[l] = g
            offdiag[m] = 0.0
    return -1


@njit(cache=True)
def one_sided_jacobi(a, tol, max_sweeps):
    """
    Hestenes one-sided Jacobi. Orthogonalizes the columns of a copy of `a`;
    the column norms are the singular values (unsorted).
    Returns (values, sweeps_used); sweeps_used == -1 means no convergence.
    """
    work = a.copy()
    rows, cols = work.shape
    for sweep in range(max_sweeps):
        rotated = False
        for i in range(cols - 1):
            for j in range(i + 1, cols):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for k in range(rows):
                    alpha += work[k, i] * work[k, i]
                    beta += work[k, j] * work[k, j]
                    gamma += work[k, i] * work[k, j]
                if gamma == 0.0 or abs(gamma) <= tol * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                for k in range(rows):
                    x = work[k, i]
                    y = work[k, j]
                    work[k, i] = c * x - s * y
                    work[k, j] = s * x + c * y
        if not rotated:
            values = np.empty(cols)
            for j in range(cols):
                acc = 0.0
                for k in range(rows):
                    acc += work[k, j] * work[k, j]
                values[j] = math.sqrt(acc)
            return values, sweep + 1
    return np.zeros(cols), -1
