"""Smoke test for the hardy extension module.

Build and run from the workspace root:

    cargo build --release -p hardy-py --features extension-module
    cp target/release/libhardy.so python/hardy.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import hardy


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    ids = hardy.catalogue_ids()
    assert len(ids) >= 13 and "ex1-leray" in ids

    pair = hardy.Pair.catalogue("ex1-leray")
    assert pair.dimension == 2 and pair.p == 2.0
    close(pair.weight(5.0), 0.25 / (25.0 * math.log(5.0) ** 2), 1e-15)

    mass = pair.weighted_mass(math.e)
    assert mass["kind"] == "Convergent"
    close(mass["value"], math.pi / 2, 1e-6)
    assert hardy.Pair.catalogue("ex4-critical").weighted_mass()["kind"] == "Divergent"

    same = hardy.Pair.from_json(pair.to_json())
    assert same.label == pair.label

    close(pair.best_constant(20.0, 4096), 0.25 + math.pi**2 / 400.0, 1e-3)
    tail = pair.lambda_infinity([2.0, 4.0], 200.0, 4096)
    assert all(lam <= 1.0 + math.pi**2 / 200.0**2 + 1e-3 for _, lam in tail)

    close(hardy.alpha_exponent(3.0 / 16.0, 2.0), 0.75, 1e-12)
    close(hardy.null_sequence_q(2, 1000.0) * 1000.0, 2.0 * math.pi, 1e-9)

    bump = f"{315.0 / (64.0 * math.pi)}*(1-r^2)^3"
    close(hardy.green_potential(bump, 3, 1.0, 2.0), 1.0 / (8.0 * math.pi), 1e-8)

    g = hardy.Profile("log(r/1)", 1.0)
    _, _, weight = hardy.construct_weight(g, 2.0, 0.0)
    close(weight(5.0), 0.25 / (25.0 * math.log(5.0) ** 2), 1e-15)

    csv = hardy.consistency_matrix_csv()
    rows = csv.strip().splitlines()[1:]
    assert len(rows) >= 13 and all(r.endswith(",true") for r in rows)

    try:
        hardy.Pair.catalogue("nope")
    except KeyError:
        pass
    else:
        raise AssertionError("unknown id accepted")

    print(f"ok: {len(ids)} pairs, {len(rows)} matrix rows")


if __name__ == "__main__":
    main()
