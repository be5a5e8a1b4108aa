"""Brute-force count of the orbits of Aut(D_p) on the 2-dimensional subspaces
of the multiplicator of D_p, with and without the allowability filter, next to
the orbit engine's count of allowable subgroups.

    python scripts/d_p_allowable.py 5 7
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))

from oracles import all_subspaces, nucleus_codes, subspace_label_orbits  # noqa: E402
from test_descend import d_p_closed_form_gens, d_p_record  # noqa: E402

from pgroupgen.descend import allowable_reps  # noqa: E402


def main(primes):
    for p in primes:
        subs = all_subspaces(4, 2, p)
        labels = subspace_label_orbits(subs, d_p_closed_form_gens(p), p, 4)
        n_codes = nucleus_codes([0, 1], 4, p)
        allow = np.array([len(n_codes & set(s.tolist())) == 1 for s in subs])
        rec = d_p_record(p)
        engine = len(allowable_reps(rec.get_cover(), rec.auts, 2, stabilizers=False))
        print(f"p = {p}: {len(subs)} planes, {len(np.unique(labels))} orbits, "
              f"{len(np.unique(labels[allow]))} allowable orbits (engine {engine}, p + 7 = {p + 7})")


if __name__ == "__main__":
    main([int(a) for a in sys.argv[1:]] or [5])
