import sys
import os
import tempfile

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from matrices.diffmat import apply_Dr
from quantization.sigmadelta import (
    Alphabet,
    export_run_csv,
    quantize_order1,
    quantize_order_r,
    sufficient_alphabet,
    verify_run,
)
from services.report_service import read_csv
from utils.errors import AlphabetError


def test_zero_input_alternates():
    run = quantize_order1(np.zeros(6))
    assert run.q.tolist() == [1, -1, 1, -1, 1, -1]
    assert run.u.tolist() == [-1, 0, -1, 0, -1, 0]


def test_constant_half_by_hand():
    run = quantize_order1(np.full(5, 0.5))
    assert run.q.tolist() == [1, 1, -1, 1, 1]
    assert np.allclose(run.u, [-0.5, -1.0, 0.5, 0.0, -0.5])


def test_first_order_stability():
    rng = np.random.default_rng(21)
    for _ in range(50):
        run = quantize_order1(rng.uniform(-1.0, 1.0, 256))
        assert np.max(np.abs(run.u)) <= 1.0 + 1e-12


def test_order_one_reduces_to_first_order():
    y = np.random.default_rng(22).uniform(-0.9, 0.9, 128)
    a = quantize_order1(y)
    b = quantize_order_r(y, 1, Alphabet.one_bit())
    assert np.array_equal(a.q, b.q) and np.array_equal(a.u, b.u)


def test_state_equation_and_bound():
    rng = np.random.default_rng(23)
    for r in (2, 3):
        alphabet = sufficient_alphabet(1.0, r)
        for _ in range(20):
            y = rng.uniform(-1.0, 1.0, 256)
            run = quantize_order_r(y, r, alphabet)
            residual = apply_Dr(run.u, r) - (y - run.q)
            assert np.abs(residual).max() <= 1e-12 * (1 + np.abs(y).max())
            report = verify_run(run)
            assert report.within_bound and report.u_inf <= alphabet.step / 2


def test_four_level_second_order():
    alphabet = Alphabet.midrise(4, 1.0)
    assert alphabet.max_level == 3.5
    run = quantize_order_r(np.random.default_rng(24).uniform(-1.0, 1.0, 512), 2, alphabet)
    assert np.max(np.abs(run.u)) <= 0.5


def test_alphabet_levels_and_ties():
    alphabet = Alphabet.midrise(2, 1.0)
    assert alphabet.values().tolist() == [-1.5, -0.5, 0.5, 1.5]
    assert alphabet.nearest(0.0) == 0.5
    assert alphabet.nearest(1.0) == 1.5
    assert alphabet.nearest(-1.0) == -1.5
    assert alphabet.nearest(9.0) == 1.5
    assert Alphabet.one_bit().values().tolist() == [-1.0, 1.0]


def test_insufficient_alphabet_rejected():
    try:
        quantize_order_r(np.full(8, 0.9), 3, Alphabet.midrise(2, 1.0))
    except AlphabetError:
        pass
    else:
        raise AssertionError("insufficient alphabet accepted")


def test_one_bit_higher_order_is_flagged():
    run = quantize_order_r(np.full(16, 0.1), 2, Alphabet.one_bit())
    assert not run.stability_guaranteed
    assert verify_run(run).max_state_residual <= 1e-12


def test_one_bit_first_order_beyond_unit_input():
    run = quantize_order1(np.full(4, 1.5))
    assert not run.stability_guaranteed
    assert run.q.tolist() == [1, 1, 1, 1]
    assert np.allclose(run.u, [0.5, 1.0, 1.5, 2.0])
    report = verify_run(run)
    assert report.max_state_residual <= 1e-12
    assert not report.within_bound


def test_export_run_csv():
    run = quantize_order1(np.full(5, 0.5))
    with tempfile.TemporaryDirectory() as tmp:
        frame = read_csv(export_run_csv(run, os.path.join(tmp, "run.csv")))
    assert list(frame.columns) == ["i", "y", "q", "u"]
    assert frame["q"].tolist() == [1, 1, -1, 1, 1]


if __name__ == "__main__":
    test_zero_input_alternates()
    test_constant_half_by_hand()
    test_first_order_stability()
    test_order_one_reduces_to_first_order()
    test_state_equation_and_bound()
    test_four_level_second_order()
    test_alphabet_levels_and_ties()
    test_insufficient_alphabet_rejected()
    test_one_bit_higher_order_is_flagged()
    test_one_bit_first_order_beyond_unit_input()
    test_export_run_csv()
    print("✅ sigmadelta tests passed")
