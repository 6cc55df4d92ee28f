import sys
import os
import time

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import test_diffmat
import test_spectral
import test_charpoly
import test_recurrence
import test_vandermonde
import test_sigmadelta
import test_codec
import test_experiments
import test_verify_graph
import test_cli

MODULES = [
    ("Difference Matrices", test_diffmat),
    ("Spectral Decomposition", test_spectral),
    ("Characteristic Roots", test_charpoly),
    ("Recurrence Reconstruction", test_recurrence),
    ("Vandermonde Inverse", test_vandermonde),
    ("Sigma-Delta Quantizers", test_sigmadelta),
    ("Codec", test_codec),
    ("Experiments", test_experiments),
    ("Verify Graph", test_verify_graph),
    ("CLI", test_cli),
]


def run_module(module):
    passed = 0
    failed = 0
    for name in sorted(n for n in dir(module) if n.startswith("test_")):
        test = getattr(module, name)
        if not callable(test):
            continue
        start = time.perf_counter()
        try:
            test()
            print(f"✅ {name} ({time.perf_counter() - start:.1f}s)")
            passed += 1
        except Exception as e:
            print(f"❌ {name} -> {type(e).__name__}: {e}")
            failed += 1
    return passed, failed


def run_all_tests():
    """Run all test suites."""

    print("\n" + "=" * 80)
    print("SD-SPECTRA - COMPREHENSIVE TEST SUITE")
    print("=" * 80 + "\n")

    total_passed = 0
    total_failed = 0

    for position, (title, module) in enumerate(MODULES, start=1):
        print(f"\n[{position}/{len(MODULES)}] Running {title} Tests...")
        passed, failed = run_module(module)
        total_passed += passed
        total_failed += failed

    # Final Summary
    print("\n" + "=" * 80)
    print("FINAL TEST SUMMARY")
    print("=" * 80)
    print(f"Total Passed: {total_passed}")
    print(f"Total Failed: {total_failed}")
    print(f"Success Rate: {(total_passed / max(1, total_passed + total_failed) * 100):.1f}%")
    print("=" * 80 + "\n")

    return total_failed == 0


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
