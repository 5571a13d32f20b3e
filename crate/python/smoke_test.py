"""Smoke test for the nisqlab Python bindings.

Build and install first:  pip install --no-build-isolation -e crates/py
Then run:                 python3 python/smoke_test.py
"""

import json
import math

import nisqlab

BELL = json.dumps(
    {
        "n_qubits": 2,
        "lambda": 0.0,
        "steps": [
            {"type": "layer", "gates": [{"name": "h", "targets": [0]}]},
            {"type": "layer", "gates": [{"name": "cnot", "targets": [0, 1]}]},
        ],
    }
)


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def check_bell():
    d = nisqlab.exact_distribution(BELL)
    assert close(d.get("00", 0), 0.5) and close(d.get("11", 0), 0.5), d
    assert close(d.get("01", 0), 0.0) and close(d.get("10", 0), 0.0), d


def check_full_noise_is_uniform():
    d = nisqlab.exact_distribution(BELL, lam=1.0)
    assert all(close(p, 0.25) for p in d.values()) and len(d) == 4, d


def check_sampling_matches_exact():
    exact = nisqlab.exact_distribution(BELL, lam=0.2)
    sampled = nisqlab.sample_distribution(BELL, 20000, seed=3, lam=0.2)
    tv = 0.5 * sum(abs(exact.get(k, 0) - sampled.get(k, 0)) for k in set(exact) | set(sampled))
    assert tv < 0.02, tv


def check_bv():
    secret, n = 0b1011001, 7
    r = nisqlab.run_noisy_bv(secret, n, lam=0.03, seed=11)
    assert r["estimate"] == secret, r
    m, regime = nisqlab.bv_repetitions(n, 0.03, 0.01)
    assert r["repetitions"] == m and regime


def check_grover():
    for n_search, t in [(8, 1), (8, 2), (16, 3)]:
        closed = nisqlab.grover_closed_form(n_search, t)
        expected = math.sin((2 * t + 1) * math.asin(n_search ** -0.5)) ** 2
        assert close(closed, expected, 1e-12)
        exact = nisqlab.exact_grover_success(n_search, 1, 0.0, t)
        assert close(exact, closed, 1e-9), (n_search, t, exact, closed)
    assert nisqlab.exact_grover_success(8, 1, 0.3, 2) < nisqlab.grover_closed_form(8, 2)


def check_shadow():
    for n in (1, 2, 3, 4):
        r = nisqlab.shadow_distinguish("Z" * n, lam=0.1)
        assert close(r["trace_distance"], 0.9 ** n, 1e-9), (n, r)


def check_code_lemmas():
    reports = nisqlab.code_checks(trials=2000, seed=0)
    assert reports and all(r["holds"] for r in reports), reports


def check_capacity_error():
    try:
        nisqlab.shadow_distinguish("Z" * 30, lam=0.1)
    except nisqlab.CapacityError:
        return
    raise AssertionError("expected CapacityError")


def check_bad_parameter():
    try:
        nisqlab.exact_distribution(BELL, lam=1.5)
    except ValueError:
        return
    raise AssertionError("expected ValueError")


CHECKS = [
    check_bell,
    check_full_noise_is_uniform,
    check_sampling_matches_exact,
    check_bv,
    check_grover,
    check_shadow,
    check_code_lemmas,
    check_capacity_error,
    check_bad_parameter,
]


def main():
    failed = 0
    for check in CHECKS:
        try:
            check()
            print(f"PASS {check.__name__}")
        except Exception as e:  # noqa: BLE001
            failed += 1
            print(f"FAIL {check.__name__}: {type(e).__name__}: {e}")
    print(f"nisqlab {nisqlab.__version__}: {len(CHECKS) - failed}/{len(CHECKS)} passed")
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
