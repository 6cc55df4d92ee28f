"""
Sigma-Delta Suite - exact state equations and greedy stability over random
signals, plus the hand-executed first-order streams.
"""

import numpy as np

from quantization.sigmadelta import Alphabet, quantize_order1, quantize_order_r, sufficient_alphabet, verify_run
from suites.common import run_check, within
from utils.errors import InvariantViolation

SUITE = "sigmadelta"

FIRST_ORDER_STREAMS = (
    (np.zeros(6), [1, -1, 1, -1, 1, -1], [-1, 0, -1, 0, -1, 0]),
    (np.full(5, 0.5), [1, 1, -1, 1, 1], [-0.5, -1, 0.5, 0, -0.5]),
)


def _random_runs(cfg, r, rng, alphabet=None):
    worst_residual = 0.0
    worst_state = 0.0
    for _ in range(cfg.quantizer_trials):
        y = rng.uniform(-1.0, 1.0, cfg.quantizer_length)
        run = quantize_order_r(y, r, alphabet or sufficient_alphabet(1.0, r))
        report = verify_run(run, cfg.tolerances.state_equation)
        worst_residual = max(worst_residual, report.max_state_residual)
        worst_state = max(worst_state, report.u_inf / report.u_bound)
    return {"max_state_residual": worst_residual, "u_inf_over_bound": worst_state}


def _first_order_streams():
    for y, q, u in FIRST_ORDER_STREAMS:
        run = quantize_order1(y)
        if not (np.array_equal(run.q, q) and np.allclose(run.u, u, atol=1e-15)):
            raise InvariantViolation("first_order_stream", f"unexpected stream for y={y.tolist()}",
                                     values={"q": run.q.tolist(), "u": run.u.tolist()})
    return True


def _one_bit_reduces(cfg, rng):
    y = rng.uniform(-0.99, 0.99, cfg.quantizer_length)
    a = quantize_order1(y)
    b = quantize_order_r(y, 1, Alphabet.one_bit())
    return within("one_bit_reduction", max(np.abs(a.q - b.q).max(), np.abs(a.u - b.u).max()), 0.0)


def run_sigmadelta_suite(cfg):
    rng = np.random.default_rng(cfg.seed)
    records = [
        run_check(SUITE, "first_order_streams", _first_order_streams),
        run_check(SUITE, "one_bit_reduction", lambda: _one_bit_reduces(cfg, rng)),
        run_check(SUITE, "one_bit_first_order[random]",
                  lambda: _random_runs(cfg, 1, rng, Alphabet.one_bit())),
    ]
    for r in cfg.quantizer_orders:
        records.append(run_check(SUITE, f"multilevel[r={r}]", lambda r=r: _random_runs(cfg, r, rng)))
    return records
