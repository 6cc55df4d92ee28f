"""
Greedy Sigma-Delta quantizers.

The r-th order scheme keeps the state equation D^r u = y - q exact by
quantizing h_i = y_i + sum_{k=1}^r (-1)^{k+1} C(r, k) u_{i-k}, with u
zero before the first sample.
"""

from dataclasses import dataclass
from math import ceil, comb

import numpy as np
import pandas as pd

from matrices.diffmat import apply_Dr
from services.report_service import write_csv
from utils.errors import AlphabetError, InvariantViolation, PreconditionError
from utils.guardrail import require_order, require_size, require_vector
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class Alphabet:
    """Midrise levels +-(2k-1) step/2, k = 1..levels. One-bit is levels=1, step=2."""
    levels: int
    step: float
    kind: str = "midrise"

    @classmethod
    def one_bit(cls):
        return cls(levels=1, step=2.0, kind="one_bit")

    @classmethod
    def midrise(cls, levels, step):
        require_size(levels, "levels")
        if not step > 0:
            raise PreconditionError(f"step must be positive, got {step!r}")
        return cls(levels=int(levels), step=float(step))

    @property
    def max_level(self):
        return (2 * self.levels - 1) * self.step / 2.0

    @property
    def size(self):
        return 2 * self.levels

    @property
    def is_one_bit(self):
        return self.levels == 1

    def values(self):
        k = np.arange(1, self.levels + 1)
        half = (2 * k - 1) * self.step / 2.0
        return np.concatenate([-half[::-1], half])

    def nearest(self, h):
        """Nearest level; ties go away from zero and sign(0) = +1."""
        sign = -1.0 if h < 0 else 1.0
        level = self.step * (np.floor(abs(h) / self.step) + 0.5)
        return sign * min(level, self.max_level)


@dataclass(frozen=True)
class QuantizationRun:
    y: np.ndarray
    r: int
    alphabet: Alphabet
    q: np.ndarray
    u: np.ndarray
    stability_guaranteed: bool


@dataclass(frozen=True)
class RunReport:
    max_state_residual: float
    u_inf: float
    u_bound: float
    within_bound: bool


def sufficient_alphabet(y_max, r, step=1.0):
    """Smallest midrise alphabet with (2L-1) step/2 >= y_max + 2^{r-1} step."""
    r = require_order(r)
    levels = max(1, ceil((y_max + 2 ** (r - 1) * step) / step + 0.5))
    return Alphabet.midrise(levels, step)


def _stability(y, r, alphabet):
    y_max = float(np.max(np.abs(y)))
    if alphabet.is_one_bit:
        if r == 1:
            if y_max > 1.0:
                logger.warning("one-bit first order with |y|_inf=%g > 1: stability not guaranteed", y_max)
                return False
            return True
        logger.warning("one-bit alphabet with r=%d: stability not guaranteed", r)
        return False
    if alphabet.max_level < y_max + 2 ** (r - 1) * alphabet.step:
        raise AlphabetError(
            f"alphabet max level {alphabet.max_level!r} < |y|_inf + 2^(r-1) step = "
            f"{y_max + 2 ** (r - 1) * alphabet.step!r}"
        )
    return True


def quantize_order_r(y, r, alphabet):
    r = require_order(r)
    y = np.asarray(require_vector(y, name="y"), dtype=np.float64)
    guaranteed = _stability(y, r, alphabet)

    weights = [(-1) ** (k + 1) * comb(r, k) for k in range(1, r + 1)]
    n = y.shape[0]
    q = np.empty(n)
    u = np.zeros(n + r)  # r leading zeros
    for i in range(n):
        h = y[i]
        for k in range(1, r + 1):
            h += weights[k - 1] * u[r + i - k]
        q[i] = alphabet.nearest(h)
        u[r + i] = h - q[i]
    return QuantizationRun(y, r, alphabet, q, u[r:], guaranteed)


def quantize_order1(y):
    """Classical one-bit first-order scheme: q_i = sign(y_i + u_{i-1})."""
    return quantize_order_r(y, 1, Alphabet.one_bit())


def verify_run(run, tol=1e-12):
    """State equation D^r u = y - q and, when guaranteed, |u|_inf <= step/2."""
    residual = apply_Dr(run.u, run.r) - (run.y - run.q)
    scale = 1.0 + float(np.max(np.abs(run.y)))
    worst = int(np.argmax(np.abs(residual)))
    max_residual = float(abs(residual[worst]))
    if max_residual > tol * scale:
        raise InvariantViolation("state_equation", f"residual {max_residual!r} at i={worst + 1}",
                                 index=worst + 1, values={"residual": max_residual})

    bound = run.alphabet.step / 2.0
    u_inf = float(np.max(np.abs(run.u)))
    within = u_inf <= bound * (1.0 + 1e-12)
    if run.stability_guaranteed and not within:
        worst = int(np.argmax(np.abs(run.u)))
        raise InvariantViolation("state_bound", f"|u|_inf={u_inf!r} exceeds {bound!r}", index=worst + 1,
                                 values={"u_inf": u_inf, "bound": bound})
    return RunReport(max_residual, u_inf, bound, within)


def export_run_csv(run, path, config_hash=None):
    frame = pd.DataFrame({"i": np.arange(1, run.y.shape[0] + 1), "y": run.y, "q": run.q, "u": run.u})
    return write_csv(frame, path, config_hash)
