import sys
import os
from math import comb

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from quantization.codec import (
    EncodedPayload,
    SelectorMatrix,
    decode,
    decode_payload,
    decode_projection,
    derive_seed,
    design_matrix,
    encode,
    error_identity,
    frame_harmonic,
    frame_singular,
    magnitude_width,
    make_selector,
    qr_least_squares,
    sample_unit_ball,
)
from quantization.sigmadelta import Alphabet, quantize_order1, quantize_order_r, sufficient_alphabet
from spectra.spectral import eigh_gram
from utils.errors import PreconditionError, RankDeficiencyError


def test_hand_encodings():
    payload = encode([1, -1, 1], 1, SelectorMatrix(1, 3, 0, np.array([2])))
    assert payload.s.tolist() == [0]
    n = 32
    payload = encode(np.ones(n), 1, SelectorMatrix(1, n, 0, np.array([n])))
    assert payload.s.tolist() == [n]


def test_selector_is_reproducible():
    a = make_selector(64, 100, 99)
    b = make_selector(64, 100, 99)
    assert np.array_equal(a.rows, b.rows)
    assert a.rows.min() >= 1 and a.rows.max() <= 100
    v = np.arange(1, 101) * 10
    assert SelectorMatrix(1, 100, 0, np.array([3])).apply(v).tolist() == [30]
    assert np.array_equal(a.dense() @ v, a.apply(v))


def test_selector_histogram_is_uniform():
    n, draws = 10, 1_000_000
    counts = np.bincount(make_selector(draws, n, 5).rows, minlength=n + 1)[1:]
    mean = draws / n
    sd = np.sqrt(draws * (1 / n) * (1 - 1 / n))
    assert np.all(np.abs(counts - mean) <= 4 * sd)


def test_payload_round_trip_and_bits():
    rng = np.random.default_rng(31)
    n = 128
    for r in (1, 2, 3):
        selector = make_selector(32, n, derive_seed(1, n, r, 0))
        for _ in range(5):
            q = rng.choice([-1.0, 1.0], size=n)
            payload = encode(q, r, selector)
            assert np.abs(payload.s).max() <= comb(n + r - 1, r)
            assert payload.bit_count == 32 * (7 * r + 1)
            restored = decode_payload(payload.to_bytes())
            assert np.array_equal(restored.s, payload.s)
            assert (restored.m, restored.n, restored.r, restored.seed) == (32, n, r, selector.seed)


def test_extreme_payload_is_lossless():
    n, r = 64, 2
    selector = make_selector(4096, n, 11)
    assert n in selector.rows
    for sign in (1.0, -1.0):
        payload = encode(np.full(n, sign), r, selector)
        assert np.abs(payload.s).max() == comb(n + r - 1, r)
        assert EncodedPayload.from_bytes(payload.to_bytes()).s.tolist() == payload.s.tolist()


def test_hand_built_selector_bytes():
    n = 64
    seeded = make_selector(4, n, 7)
    copied = SelectorMatrix(4, n, 7, seeded.rows.copy())
    q = np.random.default_rng(35).choice([-1.0, 1.0], size=n)
    for r in (1, 2):
        payload = encode(q, r, copied)
        assert np.array_equal(decode_payload(payload.to_bytes()).s, payload.s)

    rows = seeded.rows.copy()
    rows[0] = rows[0] % n + 1
    payload = encode(q, 1, SelectorMatrix(4, n, 7, rows))
    assert not payload.seeded
    try:
        payload.to_bytes()
    except PreconditionError:
        pass
    else:
        raise AssertionError("rows the seed cannot reproduce were serialized")


def test_multilevel_payload():
    alphabet = Alphabet.midrise(3, 0.5)
    rng = np.random.default_rng(32)
    q = rng.choice(alphabet.values(), size=64)
    selector = make_selector(16, 64, 3)
    payload = encode(q, 2, selector, alphabet)
    assert payload.width == magnitude_width(64, 2, 3)
    restored = EncodedPayload.from_bytes(payload.to_bytes(), levels=3, step=0.5)
    assert np.array_equal(restored.s, payload.s)


def test_harmonic_frame_properties():
    frame = frame_harmonic(64, 4)
    rows = np.linalg.norm(frame.columns, axis=1)
    assert rows.max() - rows.min() <= 1e-10
    assert np.abs(frame.columns.T @ frame.columns - np.eye(4)).max() <= 1e-8
    normalized = frame_harmonic(64, 4, row_normalized=True)
    assert np.allclose(np.linalg.norm(normalized.columns, axis=1), 1.0, atol=1e-10)


def test_singular_frame_is_bottom_of_spectrum():
    decomp = eigh_gram(64, 2)
    frame = frame_singular(64, 3, 2, decomp)
    assert np.allclose(frame.columns[:, 0], decomp.u(64))
    assert np.abs(frame.columns.T @ frame.columns - np.eye(3)).max() <= 1e-8
    try:
        frame_singular(8, 9, 1)
    except PreconditionError:
        pass
    else:
        raise AssertionError("d > n accepted")


def test_noiseless_decode_is_exact():
    frame = frame_harmonic(128, 2)
    selector = make_selector(32, 128, 4)
    x = np.array([0.3, -0.4])
    for r in (1, 2):
        a = design_matrix(frame, selector, r)
        assert np.abs(qr_least_squares(a, a @ x) - x).max() <= 1e-10


def test_rank_deficient_design_rejected():
    frame = frame_harmonic(64, 2)
    selector = SelectorMatrix(3, 64, 0, np.array([5, 5, 5]))
    try:
        qr_least_squares(design_matrix(frame, selector, 1), np.ones(3))
    except RankDeficiencyError:
        pass
    else:
        raise AssertionError("repeated rows accepted")


def test_error_identity():
    n, d = 256, 2
    frame = frame_harmonic(n, d)
    selector = make_selector(64, n, 8)
    rng = np.random.default_rng(33)
    for r in (1, 2):
        for _ in range(5):
            x = sample_unit_ball(d, rng)
            y = frame.synthesize(x)
            alphabet = Alphabet.one_bit() if r == 1 else sufficient_alphabet(float(np.abs(y).max()), r)
            run = quantize_order_r(y, r, alphabet)
            x_hat = decode(encode(run.q, r, selector, alphabet), frame, selector, r)
            err, predicted, gap = error_identity(x, x_hat, run.u, frame, selector, r)
            assert gap <= 1e-8
            assert abs(err - predicted) <= 1e-8


def test_projection_decoder():
    n, d = 256, 2
    frame = frame_harmonic(n, d)
    x = np.array([0.5, 0.2])
    run = quantize_order1(frame.synthesize(x))
    result = decode_projection(run.q, frame, 1, 16, u=run.u)
    assert result.x_hat.shape == (d,)
    assert np.linalg.norm(result.x_hat - x) <= result.bound * (1 + 1e-9)


def test_unit_ball_samples():
    rng = np.random.default_rng(34)
    norms = [np.linalg.norm(sample_unit_ball(3, rng)) for _ in range(200)]
    assert max(norms) <= 1.0


if __name__ == "__main__":
    test_hand_encodings()
    test_selector_is_reproducible()
    test_selector_histogram_is_uniform()
    test_payload_round_trip_and_bits()
    test_extreme_payload_is_lossless()
    test_hand_built_selector_bytes()
    test_multilevel_payload()
    test_harmonic_frame_properties()
    test_singular_frame_is_bottom_of_spectrum()
    test_noiseless_decode_is_exact()
    test_rank_deficient_design_rejected()
    test_error_identity()
    test_projection_decoder()
    test_unit_ball_samples()
    print("✅ codec tests passed")
