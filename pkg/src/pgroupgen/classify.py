"""Breadth-first classification of the groups of order p^n, n <= 5, and the
checks that compare a catalog with the known counts.
"""

from __future__ import annotations

import logging
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd

from .descend import DescendantRecord, StabilizerConfig, immediate_descendants, root_record
from .fp import check_prime, find_primitive_root
from .orbits import OrbitConfig
from .pcover import is_extendable
from .pcpres import PcPresentation, build, exhaustive_consistency, is_consistent

log = logging.getLogger(__name__)

MAX_EXPONENT = 5
ABELIAN_COUNTS = {1: 1, 2: 2, 3: 3, 4: 5, 5: 7}


def expected_count(p: int, n: int) -> int:
    """Number of groups of order p^n for a prime p > 3 and 1 <= n <= 5."""
    check_prime(p)
    if n in (1, 2, 3, 4):
        return (1, 2, 5, 15)[n - 1]
    if n == 5:
        return 61 + 2 * p + gcd(4, p - 1) + 2 * gcd(3, p - 1)
    raise ValueError("n must lie in 1..5")


def class_table_p5(p: int) -> dict:
    """Groups of order p^5 by (generator number, p-class)."""
    g4, g3 = gcd(4, p - 1), gcd(3, p - 1)
    return {
        (1, 5): 1,
        (2, 2): 1,
        (2, 3): p + 20,
        (2, 4): g4 + 2 * g3 + 5,
        (3, 2): p + 14,
        (3, 3): 13,
        (4, 2): 6,
        (5, 1): 1,
    }


@dataclass
class ClassifyConfig:
    p: int
    max_exponent: int = MAX_EXPONENT
    threads: int = 1
    orbit: OrbitConfig = field(default_factory=OrbitConfig)
    stabilizer: StabilizerConfig = field(default_factory=StabilizerConfig)


@dataclass
class Catalog:
    p: int
    max_exponent: int
    groups: dict  # n -> list of DescendantRecord
    timings: dict = field(default_factory=dict)

    def counts(self) -> list:
        return [len(self.groups.get(n, [])) for n in range(1, self.max_exponent + 1)]

    def records(self):
        for n in sorted(self.groups):
            yield from self.groups[n]

    def by_id(self) -> dict:
        return {r.record_id: r for r in self.records()}

    def children(self, record_id: str) -> list:
        return [r for r in self.records() if r.parent_id == record_id]

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "max_exponent": self.max_exponent,
            "counts": self.counts(),
            "groups": {str(n): [r.to_dict() for r in self.groups[n]] for n in sorted(self.groups)},
            "timings": {k: round(v, 3) for k, v in self.timings.items()},
        }


def _expand(args):
    record, max_exponent, orbit_cfg, stab_cfg = args
    return immediate_descendants(record, max_exponent, orbit_cfg, stab_cfg)


def classify(p: int, max_exponent: int = MAX_EXPONENT, config: ClassifyConfig | None = None) -> Catalog:
    """All groups of order p^1 .. p^max_exponent, one presentation per isomorphism class."""
    check_prime(p)
    if not 1 <= max_exponent <= MAX_EXPONENT:
        raise ValueError(f"max_exponent must lie in 1..{MAX_EXPONENT}")
    config = config or ClassifyConfig(p, max_exponent)
    threads = int(os.environ.get("PGROUPGEN_THREADS", config.threads) or 1)
    groups = {n: [] for n in range(1, max_exponent + 1)}
    timings = {}
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for d in range(1, max_exponent + 1):
            t0 = time.perf_counter()
            root = root_record(p, d)
            groups[d].append(root)
            level = [root] if d < max_exponent else []
            while level:
                jobs = [(r, max_exponent, config.orbit, config.stabilizer) for r in level]
                results = list(pool.map(_expand, jobs)) if pool else [_expand(j) for j in jobs]
                level = []
                for r, kids in zip(jobs, results):
                    for k in kids:
                        groups[k.order_exponent].append(k)
                        level.append(k)
                    log.info("%s: %d immediate descendants", r[0].record_id, len(kids))
            timings[f"d={d}"] = time.perf_counter() - t0
    finally:
        if pool:
            pool.shutdown()
    for n in groups:
        groups[n].sort(key=lambda r: (r.d, r.p_class, r.record_id))
    return Catalog(p, max_exponent, groups, timings)


# -- reference groups and fingerprints ------------------------------------------


def reference_groups(p: int) -> dict:
    """Named presentations of the groups of order p^2 .. p^4 (one-indexed relations, re-indexed here)."""
    w = find_primitive_root(p)

    def g(n, powers=None, comms=None):
        pw = {i - 1: {k - 1: e for k, e in rhs.items()} for i, rhs in (powers or {}).items()}
        cm = {(j - 1, i - 1): {k - 1: e for k, e in rhs.items()} for (j, i), rhs in (comms or {}).items()}
        return build(p, n, pw, cm)

    c21 = {(2, 1): {3: 1}}
    chain = {(2, 1): {3: 1}, (3, 1): {4: 1}}
    return {
        "C_p": g(1),
        "C_{p^2}": g(2, {1: {2: 1}}),
        "C_p^2": g(2),
        "C_{p^3}": g(3, {1: {2: 1}, 2: {3: 1}}),
        "D_p": g(3, comms=c21),
        "C_{p^2}xC_p": g(3, {1: {3: 1}}),
        "Q_p": g(3, {1: {3: 1}}, c21),
        "C_p^3": g(3),
        "(p^4,1)": g(4, {1: {2: 1}, 2: {3: 1}, 3: {4: 1}}),
        "(p^4,2)": g(4, {1: {3: 1}, 2: {4: 1}}),
        "(p^4,3)": g(4, {1: {4: 1}}, c21),
        "(p^4,4)": g(4, {1: {3: 1}, 2: {4: 1}}, {(2, 1): {4: 1}}),
        "(p^4,5)": g(4, {1: {3: 1}, 3: {4: 1}}),
        "(p^4,6)": g(4, {1: {3: 1}, 3: {4: 1}}, {(2, 1): {4: 1}}),
        "(p^4,7)": g(4, comms=chain),
        "(p^4,8)": g(4, {1: {4: 1}}, chain),
        "(p^4,9)": g(4, {2: {4: 1}}, chain),
        "(p^4,10)": g(4, {2: {4: w}}, chain),
        "(p^4,11)": g(4, {1: {4: 1}}),
        "(p^4,12)": g(4, comms={(2, 1): {4: 1}}),
        "(p^4,13)": g(4, {1: {4: 1}}, {(2, 1): {4: 1}}),
        "(p^4,14)": g(4, {3: {4: 1}}, {(2, 1): {4: 1}}),
        "(p^4,15)": g(4),
    }



def _elements(pres: PcPresentation):
    p, n = pres.p, pres.n
    for idx in range(p**n):
        v = []
        for _ in range(n):
            v.append(idx % p)
            idx //= p
        yield tuple(reversed(v))


def _subgroup_size(pres: PcPresentation, gens) -> int:
    c = pres.collector
    seen = {pres.identity()}
    frontier = [pres.identity()]
    gens = [g for g in gens if any(g)]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = c.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
    return len(seen)


def fingerprint(pres: PcPresentation) -> tuple:
    """Isomorphism invariants: order, generator number, class, abelian flag,
    sizes of centre, derived subgroup and p-th power subgroup, and element
    order statistics over the group and over its centre."""
    c = pres.collector
    p, n = pres.p, pres.n
    gens = [pres.gen(k) for k in range(pres.d)]
    orders = Counter()
    central_orders = Counter()
    pth = set()
    # the commutators [x, a_i] generate a normal subgroup with abelian quotient
    derived_gens = set()
    ident = pres.identity()
    for x in _elements(pres):
        xp = c.power(x, p)
        pth.add(xp)
        y, k = xp, 1
        while any(y):
            y = c.power(y, p)
            k += 1
        if not any(x):
            k = 0
        orders[k] += 1
        comms = {c.commutator(x, g) for g in gens}
        if comms == {ident}:
            central_orders[k] += 1
        derived_gens |= comms
    centre = sum(central_orders.values())
    return (
        n,
        pres.d,
        pres.p_class,
        pres.is_abelian(),
        centre,
        _subgroup_size(pres, derived_gens),
        _subgroup_size(pres, pth),
        tuple(sorted(orders.items())),
        tuple(sorted(central_orders.items())),
    )


def name_records(catalog: Catalog, max_n: int = 4) -> dict:
    """Map record_id -> reference name for the groups of order up to p^max_n.

    Groups with equal fingerprints get the joined name, e.g. '(p^4,9)|(p^4,10)'.
    """
    refs = reference_groups(catalog.p)
    by_fp = {}
    for name, pres in refs.items():
        if pres.n > max_n:
            continue
        by_fp.setdefault(fingerprint(pres), []).append(name)
    out = {}
    for n in range(1, min(max_n, catalog.max_exponent) + 1):
        for r in catalog.groups[n]:
            names = by_fp.get(fingerprint(r.presentation))
            out[r.record_id] = "|".join(names) if names else None
    return out


# -- verification ---------------------------------------------------------------


@dataclass
class Check:
    name: str
    status: str  # "pass", "fail" or "skipped"
    expected: object = None
    actual: object = None
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "status": self.status, "expected": _jsonable(self.expected),
                "actual": _jsonable(self.actual), "detail": self.detail}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in (sorted(x, key=str) if isinstance(x, (set, frozenset)) else x)]
    return x


@dataclass
class Report:
    p: int
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def failed(self) -> list:
        return [c for c in self.checks if c.status == "fail"]

    def to_dict(self):
        return {"p": self.p, "ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def _cmp(name, expected, actual, detail=""):
    return Check(name, "pass" if expected == actual else "fail", expected, actual, detail)


def per_parent_expectations(p: int) -> list:
    """(parent name, child order exponent, expected number of immediate descendants)."""
    g4, g3 = gcd(4, p - 1), gcd(3, p - 1)
    return [
        ("C_p^2", 3, 3),
        ("C_p^2", 4, 3),
        ("C_p^2", 5, 1),
        ("D_p", 4, 4),
        # p + 7: eight single groups plus two families of (p - 1)/2 each
        ("D_p", 5, p + 7),
        ("(p^4,7)", 5, 3 + g4 + 2 * g3),
        ("C_{p^2}xC_p", 4, 2),
        ("C_{p^2}xC_p", 5, 0),
        ("(p^4,5)", 5, 2),
        ("(p^4,2)", 5, 2),
        ("(p^4,3)", 5, 9),
        ("(p^4,4)", 5, 2),
        ("C_p^3", 4, 4),
        ("C_p^3", 5, 14 + p),
        ("(p^4,11)", 5, 3),
        ("(p^4,12)", 5, 10),
        ("(p^4,15)", 5, 6),
    ]


TERMINAL = frozenset({"(p^4,6)", "(p^4,8)", "(p^4,9)", "(p^4,10)", "Q_p", "(p^4,13)", "(p^4,14)"})


def verify(catalog: Catalog, exhaustive_up_to: int = 4) -> Report:
    p, top = catalog.p, catalog.max_exponent
    checks = []
    for n in range(1, MAX_EXPONENT + 1):
        if n > top:
            checks.append(Check(f"count p^{n}", "skipped", expected_count(p, n)))
            continue
        checks.append(_cmp(f"count p^{n}", expected_count(p, n), len(catalog.groups[n])))
    for n in range(1, MAX_EXPONENT + 1):
        if n > top:
            checks.append(Check(f"abelian p^{n}", "skipped", ABELIAN_COUNTS[n]))
            continue
        ab = sum(1 for r in catalog.groups[n] if r.presentation.is_abelian())
        checks.append(_cmp(f"abelian p^{n}", ABELIAN_COUNTS[n], ab))

    if top >= 5:
        table = Counter((r.d, r.p_class) for r in catalog.groups[5])
        checks.append(_cmp("p^5 by (d, class)", class_table_p5(p), dict(sorted(table.items()))))
    else:
        checks.append(Check("p^5 by (d, class)", "skipped", class_table_p5(p)))

    bad_cons, bad_class = [], []
    for r in catalog.records():
        pres = r.presentation
        ok = exhaustive_consistency(pres) if pres.n <= exhaustive_up_to else is_consistent(pres).ok
        if not ok:
            bad_cons.append(r.record_id)
        if r.p_class != r.depth + 1 or pres.p_class != r.p_class:
            bad_class.append(r.record_id)
    checks.append(_cmp("consistency of every presentation", [], bad_cons))
    checks.append(_cmp("p-class equals lineage depth + 1", [], bad_class))

    names = name_records(catalog)
    index = {}
    for rid, nm in names.items():
        if nm:
            for part in nm.split("|"):
                index.setdefault(part, []).append(rid)
    unnamed = [rid for rid, nm in names.items() if nm is None]
    checks.append(_cmp("every group up to p^4 matches a reference", [], unnamed))

    for parent, n_child, want in per_parent_expectations(p):
        label = f"{parent} -> p^{n_child}"
        if n_child > top:
            checks.append(Check(label, "skipped", want))
            continue
        ids = index.get(parent, [])
        if len(ids) != 1:
            checks.append(Check(label, "fail", want, None, f"parent matched {len(ids)} records"))
            continue
        got = sum(1 for r in catalog.children(ids[0]) if r.order_exponent == n_child)
        checks.append(_cmp(label, want, got))

    # terminal groups among non-elementary groups of order up to p^4,
    # compared as multisets of names (fingerprint-equal names stay joined)
    terminal = []
    for n in range(2, min(4, top) + 1):
        for r in catalog.groups[n]:
            if r.presentation.n == r.d:
                continue
            if not is_extendable(r.get_cover()):
                terminal.append(names.get(r.record_id) or r.record_id)
    joined = {part: nm for nm in names.values() if nm for part in nm.split("|")}
    expected_terminal = sorted(joined.get(t, t) for t in TERMINAL)
    if top >= 4:
        checks.append(_cmp("terminal groups", expected_terminal, sorted(terminal)))
    else:
        checks.append(Check("terminal groups", "skipped", sorted(TERMINAL)))
    return Report(p, checks)


def relations_text(pres: PcPresentation) -> str:
    """Relations in one-indexed notation, trivial ones omitted."""

    def word(v):
        parts = []
        for k, e in enumerate(v):
            if e:
                parts.append(f"a{k + 1}" + (f"^{e}" if e != 1 else ""))
        return " ".join(parts)

    out = []
    for kind, i, j, rhs in pres.nontrivial_relations():
        lhs = f"a{i + 1}^p" if kind == "power" else f"[a{j + 1},a{i + 1}]"
        out.append(f"{lhs}={word(rhs)}")
    return ", ".join(out) or "-"
