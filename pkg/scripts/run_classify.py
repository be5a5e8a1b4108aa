"""Classify the groups of order p^1..p^n for one prime and print the counts,
the per-parent descendant table and the verification report.

    python scripts/run_classify.py --p 5
    python scripts/run_classify.py --p 7 --heavy-ok --json catalog7.json
"""

import argparse
import json
import time

from pgroupgen.classify import ClassifyConfig, classify, expected_count, name_records, verify
from pgroupgen.cli import report_table
from pgroupgen.orbits import OrbitConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, required=True)
    ap.add_argument("-n", type=int, default=5)
    ap.add_argument("--heavy-ok", action="store_true")
    ap.add_argument("--json", help="write the catalog here")
    args = ap.parse_args()

    t0 = time.perf_counter()
    cfg = ClassifyConfig(args.p, args.n, orbit=OrbitConfig(heavy_ok=args.heavy_ok))
    cat = classify(args.p, args.n, cfg)
    elapsed = time.perf_counter() - t0
    print(f"p = {args.p}: counts {cat.counts()} in {elapsed:.1f}s")
    print(f"expected        {[expected_count(args.p, k) for k in range(1, args.n + 1)]}")

    names = name_records(cat)
    print("\nimmediate descendants per parent")
    for rec in cat.records():
        kids = cat.children(rec.record_id)
        if not kids:
            continue
        by_order = {}
        for k in kids:
            by_order[k.order_exponent] = by_order.get(k.order_exponent, 0) + 1
        label = names.get(rec.record_id) or rec.record_id
        print(f"  {label:<28} " + ", ".join(f"p^{o}: {c}" for o, c in sorted(by_order.items())))

    print()
    print(report_table(verify(cat)))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(cat.to_dict(), fh, sort_keys=True)


if __name__ == "__main__":
    main()
