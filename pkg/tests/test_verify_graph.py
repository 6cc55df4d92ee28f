import sys
import os

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.config import VerifyConfig
from orchestration.graph import SUITES, classify_suite, create_graph, run_verify
from utils.errors import ConfigError


def _desk_config(**changes):
    fields = {
        "gram_n_max": 16,
        "spectral_sizes": [50],
        "jacobi_n": 24,
        "reversal_n": 64,
        "dynamical_n": 128,
        "root_grid_size": 10,
        "recurrence_n": 32,
        "vandermonde_draws": 5,
        "quantizer_trials": 5,
        "codec_n": 64,
    }
    fields.update(changes)
    return VerifyConfig(**fields)


def test_classification_expands_all():
    assert classify_suite({"suite": "all"})["suites"] == list(SUITES)
    assert classify_suite({"suite": "roots"})["suites"] == ["roots"]
    try:
        classify_suite({"suite": "plots"})
    except ConfigError:
        pass
    else:
        raise AssertionError("unknown suite accepted")


def test_single_suite_passes():
    for suite in ("gram", "vandermonde", "sigmadelta", "codec"):
        passed, checks = run_verify(suite, _desk_config())
        failed = [rec["check"] for rec in checks if not rec["passed"]]
        print(f"{'✅' if passed else '❌'} {suite}: {len(checks)} checks, failed={failed}")
        assert passed and checks
        assert {rec["suite"] for rec in checks} == {suite}


def test_injected_perturbation_fails_exactness():
    passed, checks = run_verify("gram", _desk_config(inject_gram_perturbation=True))
    assert not passed
    failed = [rec for rec in checks if not rec["passed"]]
    assert [rec["check"] for rec in failed] == ["exact_entries"]
    assert failed[0]["index"] == (3, 4)


def test_all_suites_in_canonical_order():
    passed, checks = run_verify("all", _desk_config())
    failed = [f"{rec['suite']}/{rec['check']}: {rec['error']}" for rec in checks if not rec["passed"]]
    assert passed, failed
    order = [rec["suite"] for rec in checks]
    assert order == sorted(order, key=list(SUITES).index)
    assert set(order) == set(SUITES)


def test_seed_leaves_deterministic_suites_unchanged():
    _, first = run_verify("roots", _desk_config(seed=1))
    _, second = run_verify("roots", _desk_config(seed=2))
    assert first == second


def test_graph_compiles_with_all_nodes():
    graph = create_graph()
    nodes = set(graph.get_graph().nodes)
    assert {"classify_suite", "finalize"} <= nodes
    assert {f"{name}_node" for name in SUITES} <= nodes


if __name__ == "__main__":
    test_classification_expands_all()
    test_single_suite_passes()
    test_injected_perturbation_fails_exactness()
    test_all_suites_in_canonical_order()
    test_seed_leaves_deterministic_suites_unchanged()
    test_graph_compiles_with_all_nodes()
    print("✅ verify graph tests passed")
