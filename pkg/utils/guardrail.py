"""
Argument guards.
Every public operation validates its inputs here before touching numerics.
"""

import math

import numpy as np

from config.config import config
from utils.errors import DimensionError, PreconditionError


def require_size(n, name="n", minimum=1):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise PreconditionError(f"{name} must be an integer, got {type(n).__name__}")
    if n < minimum:
        raise PreconditionError(f"{name} must be >= {minimum}, got {n}")
    return int(n)


def require_order(r):
    return require_size(r, "r", 1)


def require_half_band(n, r):
    """Gram closed form and the spectral machinery need r < n/2."""
    n = require_size(n, "n", 2)
    r = require_order(r)
    if 2 * r >= n:
        raise PreconditionError(f"need r < n/2, got n={n}, r={r}")
    return n, r


def require_max_n(n):
    if n > config.MAX_N:
        raise PreconditionError(f"n={n} exceeds the configured maximum {config.MAX_N} (SD_SPECTRA_MAX_N)")
    return n


def require_vector(v, n=None, name="v"):
    arr = np.asarray(v)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionError(f"{name} has length {arr.shape[0]}, expected {n}")
    if arr.shape[0] == 0:
        raise DimensionError(f"{name} must not be empty")
    return arr


def require_index(i, n, name="index"):
    if not 1 <= i <= n:
        raise DimensionError(f"{name} {i} outside 1..{n}")
    return int(i)


def require_lambda(lam, r):
    """Admissible eigenvalue range for the closed-form root machinery."""
    lam = float(lam)
    upper = 4.0 ** r * (1.0 - 1e-12)
    if not (math.isfinite(lam) and 1e-300 <= lam <= upper):
        raise PreconditionError(f"lambda={lam!r} outside [1e-300, 4^r(1-1e-12)] for r={r}")
    return lam
