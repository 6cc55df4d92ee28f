"""
Codec Suite - bit-exact payloads, the hand-summed encodings, frame
properties and the exact reconstruction error identity.
"""

from math import comb, log2

import numpy as np

from quantization.codec import (
    EncodedPayload,
    SelectorMatrix,
    decode,
    design_matrix,
    encode,
    error_identity,
    frame_harmonic,
    frame_singular,
    make_selector,
    qr_least_squares,
    sample_unit_ball,
)
from quantization.sigmadelta import Alphabet, quantize_order_r, sufficient_alphabet
from suites.common import run_check, within
from utils.errors import InvariantViolation

SUITE = "codec"

ORDERS = (1, 2, 3)


def _hand_encodings():
    single = SelectorMatrix(1, 3, 0, np.array([2]))
    first = int(encode([1, -1, 1], 1, single).s[0])
    n = 16
    last = int(encode(np.ones(n), 1, SelectorMatrix(1, n, 0, np.array([n]))).s[0])
    if first != 0 or last != n:
        raise InvariantViolation("hand_encodings", "cumulative sums disagree with hand values",
                                 values={"row_2": first, "row_n": last})
    return {"row_2": first, "row_n": last}


def _payloads(n, rng, seed):
    power_of_two = n & (n - 1) == 0
    measured = {}
    for r in ORDERS:
        selector = make_selector(max(1, n // 4), n, seed + r)
        q = rng.choice([-1.0, 1.0], size=n)
        payload = encode(q, r, selector)
        restored = EncodedPayload.from_bytes(payload.to_bytes())
        if not np.array_equal(restored.s, payload.s):
            raise InvariantViolation("payload_round_trip", f"decoded entries differ for r={r}")
        cap = comb(n + r - 1, r)
        if np.abs(payload.s).max() > cap:
            raise InvariantViolation("payload_magnitude", f"|s| above C(N+r-1, r)={cap} for r={r}")
        if power_of_two and payload.bit_count != selector.m * (r * int(log2(n)) + 1):
            raise InvariantViolation("bit_count", f"{payload.bit_count} bits for r={r}, m={selector.m}, N={n}")
        measured[f"bits[r={r}]"] = payload.bit_count
    return measured


def _harmonic_rows(n, d):
    d += d % 2
    frame = frame_harmonic(4 * (n // 4), d)
    rows = np.linalg.norm(frame.columns, axis=1)
    gram = frame.columns.T @ frame.columns
    return {"row_spread": within("harmonic_row_norms", rows.max() - rows.min(), 1e-10)["measured"],
            "orthogonality": within("harmonic_orthogonality", np.abs(gram - np.eye(d)).max(), 1e-8)["measured"]}


def _singular_columns(n, d, tol):
    frame = frame_singular(n, d, 1)
    return within("singular_frame", np.abs(frame.columns.T @ frame.columns - np.eye(d)).max(), tol)


def _noiseless(n, d, rng, seed):
    frame = frame_harmonic(n, d)
    selector = make_selector(max(d, n // 4), n, seed)
    worst = 0.0
    for r in ORDERS:
        x = sample_unit_ball(d, rng)
        a = design_matrix(frame, selector, r)
        worst = max(worst, float(np.abs(qr_least_squares(a, a @ x) - x).max()))
    return within("noiseless_consistency", worst, 1e-10)


def _error_identity(n, d, rng, seed, tol):
    frame = frame_harmonic(n, d)
    selector = make_selector(max(d, n // 4), n, seed)
    worst = 0.0
    for r in (1, 2):
        x = sample_unit_ball(d, rng)
        y = frame.synthesize(x)
        alphabet = Alphabet.one_bit() if r == 1 else sufficient_alphabet(float(np.abs(y).max()), r)
        run = quantize_order_r(y, r, alphabet)
        x_hat = decode(encode(run.q, r, selector, alphabet), frame, selector, r)
        _, _, gap = error_identity(x, x_hat, run.u, frame, selector, r)
        worst = max(worst, gap)
    return within("error_identity", worst, tol)


def run_codec_suite(cfg):
    rng = np.random.default_rng(cfg.seed)
    n, d = cfg.codec_n, cfg.codec_d
    tol = cfg.tolerances
    return [
        run_check(SUITE, "hand_encodings", _hand_encodings),
        run_check(SUITE, f"payloads[n={n}]", lambda: _payloads(n, rng, cfg.seed)),
        run_check(SUITE, f"harmonic_frame[n={n},d={d}]", lambda: _harmonic_rows(n, d)),
        run_check(SUITE, f"singular_frame[n={n},d={d}]", lambda: _singular_columns(n, d, tol.orthogonality)),
        run_check(SUITE, f"noiseless_consistency[n={n},d={d}]", lambda: _noiseless(n, d, rng, cfg.seed)),
        run_check(SUITE, f"error_identity[n={n},d={d}]",
                  lambda: _error_identity(n, d, rng, cfg.seed, tol.error_identity)),
    ]
