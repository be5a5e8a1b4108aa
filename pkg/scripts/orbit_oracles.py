"""Orbit counts of the small linear actions used as oracles, computed both by
brute force over the group and by the orbit engine.

    python scripts/orbit_oracles.py 5 7 11
"""

import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))

import test_orbit_oracles as oo  # noqa: E402


def main(primes):
    rows = [
        ("scalar x conjugation on 2x2 (p+5)", lambda p: (len(oo._z_times_gl(p)), oo._engine_count(p, False), p + 5)),
        ("det-twisted conjugation (p+7)", lambda p: (len(oo._det_twisted(p)), oo._engine_count(p, True), p + 7)),
        ("triangular group on F_p^3 (7)", lambda p: (len(oo.triangular_orbits(p)),
                                                      oo.vector_orbits(list(oo._triangular_group(p)), 3, p).n_orbits + 1, 7)),
        ("tensor quotient (3)", lambda p: (len(oo.tensor_quotient_orbits(p)[0]), None, 3)),
        ("skew 4x4 congruence (3)", lambda p: (len(set(oo.skew_orbits(p)[0].tolist())), None, 3)),
    ]
    for p in primes:
        print(f"p = {p}")
        for label, fn in rows:
            t0 = time.perf_counter()
            brute, engine, want = fn(p)
            eng = "-" if engine is None else engine
            flag = "ok" if brute == want and engine in (None, want) else "MISMATCH"
            print(f"  {label:<38} brute {brute:>3}  engine {eng:>3}  expected {want:>3}  "
                  f"{flag}  {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main([int(a) for a in sys.argv[1:]] or [5, 7])
