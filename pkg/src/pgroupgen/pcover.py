"""p-covers: the largest central elementary abelian extension with the same
generator number, together with its multiplicator and nucleus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matfp
from .pcpres import COMM, POWER, Definition, PcPresentation, consistency_pairs, is_consistent


@dataclass(frozen=True)
class Tail:
    """A tail generator attached to the relation a_i^p (kind POWER) or [a_j, a_i]."""

    kind: str
    i: int
    j: int | None
    weight: int

    def definition(self) -> Definition:
        return Definition(self.kind, self.i, self.j)

    def sort_key(self):
        return (-self.weight, 0 if self.kind == COMM else 1, self.i, self.j if self.j is not None else -1)


@dataclass(frozen=True)
class CoverData:
    cover: PcPresentation
    parent: PcPresentation
    parent_n: int
    parent_class: int
    multiplicator_gens: tuple
    nucleus_gens: tuple
    tails_eliminated: int
    tails: tuple  # Tail per multiplicator generator, same order

    @property
    def mult_dim(self) -> int:
        return len(self.multiplicator_gens)

    @property
    def nucleus_dim(self) -> int:
        return len(self.nucleus_gens)

    def nucleus_columns(self) -> list:
        """Positions of the nucleus generators inside the multiplicator basis."""
        return [g - self.parent_n for g in self.nucleus_gens]

    def to_dict(self) -> dict:
        out = self.cover.to_dict()
        out["multiplicator"] = list(self.multiplicator_gens)
        out["nucleus"] = list(self.nucleus_gens)
        return out


def candidate_tails(pres: PcPresentation) -> list:
    """One tail per relation that does not define a generator."""
    defined = {(df.kind, df.i, df.j) for df in pres.definitions if df is not None}
    w = pres.weights
    tails = []
    for i in range(pres.n):
        if (POWER, i, None) not in defined:
            tails.append(Tail(POWER, i, None, w[i] + 1))
    for j in range(pres.n):
        for i in range(j):
            if (COMM, i, j) not in defined:
                tails.append(Tail(COMM, i, j, w[i] + w[j]))
    return tails


def _extended(pres: PcPresentation, tails: list) -> PcPresentation:
    n, q, p = pres.n, len(tails), pres.p
    N = n + q

    def pad(v):
        return tuple(v) + (0,) * q

    pw = [list(pad(v)) for v in pres.power_rhs] + [[0] * N for _ in range(q)]
    cm = [[list(pad(pres.comm_rhs[j][i])) if i < j and j < n else [0] * N for i in range(N)] for j in range(N)]
    defs = list(pres.definitions) + [t.definition() for t in tails]
    for t_idx, t in enumerate(tails):
        if t.kind == POWER:
            pw[t.i][n + t_idx] = 1
        else:
            cm[t.j][t.i][n + t_idx] = 1
    weights = tuple(pres.weights) + tuple(t.weight for t in tails)
    return PcPresentation(
        p,
        N,
        tuple(tuple(v) for v in pw),
        tuple(tuple(tuple(v) for v in row) for row in cm),
        weights,
        tuple(defs),
        monotone=False,
    )


def _is_compliant(t: Tail, pres: PcPresentation, c: int) -> bool:
    w = pres.weights
    if t.kind == POWER:
        return w[t.i] == c
    return w[t.j] == c and w[t.i] == 1


def build_cover(pres: PcPresentation) -> CoverData:
    """Cover presentation of a consistent weighted presentation."""
    res = is_consistent(pres)
    if not res.ok:
        raise ValueError(f"input presentation is inconsistent at test {res.test}")
    p, n = pres.p, pres.n
    c = pres.p_class
    tails = candidate_tails(pres)
    q = len(tails)
    ext = _extended(pres, tails)

    rels = []
    for label, lhs, rhs in consistency_pairs(ext):
        if lhs[:n] != rhs[:n]:
            raise ValueError(f"input presentation is inconsistent at test {label}")
        diff = [(a - b) % p for a, b in zip(lhs[n:], rhs[n:])]
        if any(diff):
            rels.append(diff)

    # Column priority: pivots are eliminated, so list the tails we least
    # want to keep first.  Low weights go first, then heavy or awkward
    # weight-(c+1) tails, and last the tails that can define a generator in
    # a descendant.  Within a group the highest index is eliminated first.
    def group(t_idx):
        t = tails[t_idx]
        if t.weight <= c:
            return 0
        if t.weight > c + 1 or not _is_compliant(t, pres, c):
            return 1
        return 2

    order = sorted(range(q), key=lambda t: (group(t), -t))
    if rels:
        canon = matfp.rref(np.array(rels, dtype=np.int64)[:, order], p)
        pivots = [order[pc] for pc in canon.pivots]
        rows = []
        for row in canon.basis:
            full = [0] * q
            for pos, t in enumerate(order):
                full[t] = row[pos]
            rows.append(full)
    else:
        pivots, rows = [], []
    eliminated = dict(zip(pivots, rows))
    survivors = sorted((t for t in range(q) if t not in eliminated), key=lambda t: tails[t].sort_key())
    for t in survivors:
        if tails[t].weight > c + 1:
            raise AssertionError(f"tail {tails[t]} of weight above c+1 survived elimination")
    m = len(survivors)
    new_index = {t: n + k for k, t in enumerate(survivors)}

    def tail_value(t):
        """Survivor coordinates of tail t in the cover (length m, offset n)."""
        v = [0] * m
        if t in new_index:
            v[new_index[t] - n] = 1
        else:
            row = eliminated[t]
            for s, x in enumerate(row):
                if x and s != t:
                    v[new_index[s] - n] = (v[new_index[s] - n] - x) % p
        return v

    N = n + m
    zero = (0,) * N
    pw = [tuple(pres.power_rhs[i]) + (0,) * m for i in range(n)] + [zero] * m
    cm = [[zero] * N for _ in range(N)]
    for j in range(n):
        for i in range(j):
            cm[j][i] = tuple(pres.comm_rhs[j][i]) + (0,) * m
    for t_idx, t in enumerate(tails):
        tv = tail_value(t_idx)
        if t.kind == POWER:
            pw[t.i] = tuple(pw[t.i][:n]) + tuple(tv)
        else:
            cm[t.j][t.i] = tuple(cm[t.j][t.i][:n]) + tuple(tv)
    defs = list(pres.definitions) + [tails[t].definition() for t in survivors]
    weights = tuple(pres.weights) + tuple(tails[t].weight for t in survivors)
    cover = PcPresentation(p, N, tuple(pw), tuple(tuple(r) for r in cm), weights, tuple(defs), monotone=False)
    check = is_consistent(cover)
    if not check.ok:
        raise AssertionError(f"cover failed consistency at {check.test}")
    mult = tuple(range(n, N))
    nucleus = tuple(g for g in mult if weights[g] == c + 1)
    return CoverData(
        cover=cover,
        parent=pres,
        parent_n=n,
        parent_class=c,
        multiplicator_gens=mult,
        nucleus_gens=nucleus,
        tails_eliminated=q - m,
        tails=tuple(tails[t] for t in survivors),
    )


def is_extendable(cd: CoverData) -> bool:
    return len(cd.nucleus_gens) > 0
