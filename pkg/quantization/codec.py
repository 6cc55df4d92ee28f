"""
Compression of Sigma-Delta streams and least-squares decoding.

encode keeps s = R D^{-r} q as exact integers at m randomly selected
positions; decode solves min_x |R D^{-r} F x - s|_2 by QR. Because
R D^{-r} q = R D^{-r} F x - R u, the reconstruction error is exactly
(R D^{-r} F)^+ R u.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from matrices.diffmat import apply_Dinv_r
from quantization.sigmadelta import Alphabet
from spectra.spectral import eigh_gram
from utils.errors import DimensionError, PreconditionError, RankDeficiencyError
from utils.guardrail import require_half_band, require_order, require_size, require_vector

HEADER_BYTES = 32
RANK_TOL = 1e-12


@dataclass(frozen=True)
class Frame:
    n: int
    d: int
    kind: str
    columns: np.ndarray
    row_normalized: bool = False

    @property
    def max_row_norm(self):
        return float(np.max(np.linalg.norm(self.columns, axis=1)))

    def synthesize(self, x):
        return self.columns @ np.asarray(x, dtype=np.float64)


@dataclass(frozen=True)
class SelectorMatrix:
    m: int
    n: int
    seed: int
    rows: np.ndarray

    def apply(self, v):
        v = require_vector(v, self.n)
        return v[self.rows - 1]

    def dense(self):
        out = np.zeros((self.m, self.n), dtype=np.int64)
        out[np.arange(self.m), self.rows - 1] = 1
        return out


def frame_singular(n, d, r, decomp=None):
    """The d left singular vectors of D^r with the smallest singular values, ascending."""
    n, r = require_half_band(n, r)
    d = require_size(d, "d")
    if d > n:
        raise PreconditionError(f"d={d} exceeds n={n}")
    decomp = decomp or eigh_gram(n, r)
    columns = np.ascontiguousarray(decomp.U[:, ::-1][:, :d])
    return Frame(n, d, "singular", columns)


def frame_harmonic(n, d, row_normalized=False):
    """Unit-norm cos/sin pairs at the lowest nonzero frequencies."""
    n = require_size(n, "n", 2)
    d = require_size(d, "d")
    if d > n:
        raise PreconditionError(f"d={d} exceeds n={n}")
    t = np.arange(n)
    columns = []
    freq = 1
    while len(columns) < d:
        angle = 2.0 * np.pi * freq * t / n
        columns.append(np.cos(angle))
        if len(columns) < d:
            columns.append(np.sin(angle))
        freq += 1
    frame = np.column_stack(columns)
    norms = np.linalg.norm(frame, axis=0)
    if np.any(norms == 0.0):
        raise RankDeficiencyError(f"harmonic frame with d={d} needs n > {d}")
    frame = frame / norms
    if row_normalized:
        rows = np.linalg.norm(frame, axis=1)
        if np.any(rows == 0.0):
            raise RankDeficiencyError("harmonic frame has a zero row")
        frame = frame / rows[:, None]
    if np.linalg.matrix_rank(frame) < d:
        raise RankDeficiencyError(f"harmonic frame of size {n} x {d} is rank deficient")
    return Frame(n, d, "harmonic", frame, row_normalized)


def derive_seed(master, n, r, trial):
    """Per-trial 64-bit seed mixed from (master, N, r, trial)."""
    state = np.random.SeedSequence([int(master), int(n), int(r), int(trial)]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def sample_unit_ball(d, rng):
    """Uniform draw from the unit l2 ball."""
    g = rng.standard_normal(d)
    return g / np.linalg.norm(g) * rng.random() ** (1.0 / d)


def make_selector(m, n, seed):
    """m i.i.d. uniform row indices in [1, n] (with replacement)."""
    m = require_size(m, "m")
    n = require_size(n, "n")
    rng = np.random.default_rng(seed)
    rows = rng.integers(1, n + 1, size=m, dtype=np.int64)
    return SelectorMatrix(m, n, int(seed), rows)


# --- Bit-exact payload ---

def magnitude_width(n, r, levels=1):
    """Smallest w with 2^w >= (2L - 1) N^r."""
    return ((2 * levels - 1) * n ** r - 1).bit_length()


def _parities(rows, r):
    """(D^{-r} 1)_i = C(i + r - 1, r) mod 2, shared by every odd-integer stream."""
    return np.array([comb(int(i) + r - 1, r) % 2 for i in rows], dtype=np.int64)


@dataclass(frozen=True)
class EncodedPayload:
    m: int
    n: int
    r: int
    seed: int
    levels: int
    step: float
    s: np.ndarray
    width: int
    rows: np.ndarray

    @property
    def bit_count(self):
        return self.m * (self.width + 1)

    @property
    def header_bits(self):
        return 8 * HEADER_BYTES

    @property
    def seeded(self):
        return np.array_equal(self.rows, make_selector(self.m, self.n, self.seed).rows)

    def to_bytes(self):
        """
        32-byte little-endian preamble (m, n, r, seed) followed by the entries,
        each stored as t = (s - parity) / 2 in `width` magnitude bits (LSB first)
        plus a trailing sign bit. The reader re-derives the rows from the seed,
        so rows that the seed does not reproduce are refused.
        """
        if not self.seeded:
            raise PreconditionError(f"selector rows are not reproducible from seed {self.seed}")
        folded = (np.asarray(self.s, dtype=np.int64) - _parities(self.rows, self.r)) // 2
        magnitude = np.abs(folded)
        if np.any(magnitude >= 2 ** self.width):
            raise PreconditionError("payload entry exceeds its magnitude width")
        bits = (magnitude[:, None] >> np.arange(self.width, dtype=np.int64)[None, :]) & 1
        bits = np.column_stack([bits, (folded < 0).astype(np.int64)])
        header = np.array([self.m, self.n, self.r, self.seed], dtype="<u8").tobytes()
        return header + np.packbits(bits.astype(np.uint8).ravel(), bitorder="little").tobytes()

    @classmethod
    def from_bytes(cls, data, levels=1, step=2.0):
        """Inverse of to_bytes; multilevel streams take the alphabet out of band."""
        if len(data) < HEADER_BYTES:
            raise DimensionError("payload shorter than its preamble")
        m, n, r, seed = (int(v) for v in np.frombuffer(data[:HEADER_BYTES], dtype="<u8"))
        width = magnitude_width(n, r, levels)
        body = np.unpackbits(np.frombuffer(data[HEADER_BYTES:], dtype=np.uint8), bitorder="little")
        if body.shape[0] < m * (width + 1):
            raise DimensionError("payload body truncated")
        bits = body[: m * (width + 1)].reshape(m, width + 1).astype(np.int64)
        magnitude = (bits[:, :width] << np.arange(width, dtype=np.int64)[None, :]).sum(axis=1)
        folded = np.where(bits[:, width] == 1, -magnitude, magnitude)
        rows = make_selector(m, n, seed).rows
        s = 2 * folded + _parities(rows, r)
        return cls(m, n, r, seed, levels, float(step), s, width, rows)


def _odd_codes(q, alphabet):
    codes = np.asarray(q, dtype=np.float64) / (alphabet.step / 2.0)
    rounded = np.rint(codes)
    if np.any(np.abs(codes - rounded) > 1e-9) or np.any(rounded % 2 == 0) \
            or np.any(np.abs(rounded) > 2 * alphabet.levels - 1):
        raise PreconditionError("q contains values outside the alphabet")
    return rounded.astype(np.int64)


def encode(q, r, selector, alphabet=None):
    """s = R D^{-r} q in exact integer arithmetic (q scaled to odd integers)."""
    r = require_order(r)
    alphabet = alphabet or Alphabet.one_bit()
    q = require_vector(q, selector.n, "q")
    width = magnitude_width(selector.n, r, alphabet.levels)
    if width > 62:
        raise PreconditionError(f"magnitude width {width} exceeds 62 bits")
    full = apply_Dinv_r(_odd_codes(q, alphabet), r)
    s = np.asarray(full[selector.rows - 1], dtype=np.int64)
    return EncodedPayload(selector.m, selector.n, r, selector.seed, alphabet.levels, alphabet.step, s, width,
                          np.asarray(selector.rows, dtype=np.int64))


def decode_payload(data, levels=1, step=2.0):
    return EncodedPayload.from_bytes(data, levels, step)


# --- Decoders ---

def qr_least_squares(a, b):
    """min |a x - b|_2 through a reduced QR; raises on numerical rank deficiency."""
    a = np.asarray(a, dtype=np.float64)
    if a.shape[0] < a.shape[1]:
        raise RankDeficiencyError(f"{a.shape[0]} rows cannot determine {a.shape[1]} unknowns")
    q, rr = np.linalg.qr(a)
    diag = np.abs(np.diag(rr))
    if diag.min() <= RANK_TOL * diag.max():
        raise RankDeficiencyError("design matrix is numerically rank deficient")
    return np.linalg.solve(rr, q.T @ np.asarray(b, dtype=np.float64))


def design_matrix(frame, selector, r):
    """R D^{-r} F."""
    out = frame.columns
    for _ in range(r):
        out = np.cumsum(out, axis=0)
    return out[selector.rows - 1]


def decode(payload, frame, selector, r):
    if payload.n != frame.n or payload.n != selector.n or payload.m != selector.m:
        raise DimensionError("payload, frame and selector sizes disagree")
    if payload.r != r:
        raise PreconditionError(f"payload was encoded with r={payload.r}, decoder asked for r={r}")
    values = np.asarray(payload.s, dtype=np.float64) * (payload.step / 2.0)
    return qr_least_squares(design_matrix(frame, selector, r), values)


def error_identity(x, x_hat, u, frame, selector, r):
    """
    Returns (|x - x_hat|, |A^+ R u|, |(x - x_hat) - A^+ R u|) with A = R D^{-r} F.
    """
    predicted = qr_least_squares(design_matrix(frame, selector, r), selector.apply(u))
    err = np.asarray(x) - np.asarray(x_hat)
    return float(np.linalg.norm(err)), float(np.linalg.norm(predicted)), float(np.linalg.norm(err - predicted))


@dataclass(frozen=True)
class ProjectionDecode:
    x_hat: np.ndarray
    bound: float


def decode_projection(q, frame, r, ell, u=None, decomp=None):
    """
    x_hat = (W^T F)^+ W^T q with W the ell least significant left singular
    vectors of D^r. With the state vector u, the returned bound is
    sigma_{N-ell+1} |u|_2 / sigma_min(W^T F); otherwise the flat-state
    estimate (N / ell)^{-r} sqrt(N) / sigma_min(W^T F).
    """
    n = frame.n
    ell = require_size(ell, "ell", frame.d)
    if ell > n:
        raise PreconditionError(f"ell={ell} exceeds n={n}")
    decomp = decomp or eigh_gram(n, r)
    w = decomp.U[:, ::-1][:, :ell]
    projected = w.T @ frame.columns
    x_hat = qr_least_squares(projected, w.T @ require_vector(q, n, "q"))
    smallest = float(np.linalg.svd(projected, compute_uv=False).min())
    if u is not None:
        bound = float(decomp.sigma[n - ell]) * float(np.linalg.norm(u)) / smallest
    else:
        bound = (n / ell) ** (-r) * np.sqrt(n) / smallest
    return ProjectionDecode(x_hat, float(bound))
