"""Weighted power-commutator presentations of p-groups of prime relative orders.

Generators a_0..a_{n-1} (zero-indexed).  Relations:

    a_i^p      = power_rhs[i]        support on indices > i
    [a_j, a_i] = comm_rhs[j][i]      j > i, support on indices > j

with [h, g] = h^-1 g^-1 h g.  Elements are exponent vectors in [0, p)^n
standing for the normal form a_0^{e_0} ... a_{n-1}^{e_{n-1}}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

Vec = tuple

POWER = "power"
COMM = "comm"


@dataclass(frozen=True)
class Definition:
    """The relation defining a generator a_k of weight > 1.

    The relation's right-hand side has the form v * a_k with v supported on
    indices below k, so a_k = v^-1 * (a_i^p or [a_j, a_i]).
    """

    kind: str  # POWER or COMM
    i: int
    j: int | None = None  # only for COMM: the relation [a_j, a_i], j > i

    def weight(self, weights: Sequence[int]) -> int:
        if self.kind == POWER:
            return weights[self.i] + 1
        return weights[self.i] + weights[self.j]

    def shifted(self, index_map: dict) -> "Definition":
        j = None if self.j is None else index_map[self.j]
        return Definition(self.kind, index_map[self.i], j)


def _zero(n: int) -> Vec:
    return (0,) * n


def unit(n: int, k: int, e: int = 1) -> Vec:
    v = [0] * n
    v[k] = e
    return tuple(v)


@dataclass(frozen=True)
class PcPresentation:
    p: int
    n: int
    power_rhs: tuple  # n vectors
    comm_rhs: tuple  # n x n table; entry [j][i] used for j > i
    weights: tuple
    definitions: tuple  # per generator: Definition or None
    monotone: bool = field(default=True, compare=False)

    def __post_init__(self):
        p, n = self.p, self.n
        if len(self.power_rhs) != n or len(self.comm_rhs) != n:
            raise ValueError("relation tables do not match n")
        for i, v in enumerate(self.power_rhs):
            _check_vec(v, n, p, i, f"power of a_{i}")
        for j in range(n):
            if len(self.comm_rhs[j]) != n:
                raise ValueError("commutator table is not n x n")
            for i in range(j):
                _check_vec(self.comm_rhs[j][i], n, p, j, f"[a_{j},a_{i}]")
        if len(self.weights) != n or len(self.definitions) != n:
            raise ValueError("weights/definitions do not match n")
        for k, df in enumerate(self.definitions):
            if df is None:
                if self.weights[k] != 1:
                    raise ValueError(f"a_{k} has weight {self.weights[k]} but no definition")
                continue
            rhs = self.relation_rhs(df)
            if rhs[k] != 1 or any(rhs[k + 1:]):
                raise ValueError(f"definition of a_{k} does not end in a_{k}")
            if df.weight(self.weights) != self.weights[k]:
                raise ValueError(f"weight of a_{k} disagrees with its definition")
        if self.monotone and any(a > b for a, b in zip(self.weights, self.weights[1:])):
            raise ValueError("weights must be nondecreasing")

    # -- basic data ---------------------------------------------------------

    @property
    def d(self) -> int:
        return sum(1 for df in self.definitions if df is None)

    @property
    def p_class(self) -> int:
        return max(self.weights, default=0)

    def identity(self) -> Vec:
        return _zero(self.n)

    def gen(self, k: int, e: int = 1) -> Vec:
        return unit(self.n, k, e % self.p)

    def relation_rhs(self, df: Definition) -> Vec:
        if df.kind == POWER:
            return self.power_rhs[df.i]
        return self.comm_rhs[df.j][df.i]

    def is_abelian(self) -> bool:
        return all(not any(self.comm_rhs[j][i]) for j in range(self.n) for i in range(j))

    def nontrivial_relations(self):
        """Yield (kind, i, j, rhs) for every relation with nonzero right-hand side."""
        for i in range(self.n):
            if any(self.power_rhs[i]):
                yield POWER, i, None, self.power_rhs[i]
        for j in range(self.n):
            for i in range(j):
                if any(self.comm_rhs[j][i]):
                    yield COMM, i, j, self.comm_rhs[j][i]

    @cached_property
    def collector(self) -> "Collector":
        return Collector(self)

    # -- arithmetic shortcuts ---------------------------------------------

    def mul(self, u, v) -> Vec:
        return self.collector.mul(u, v)

    def inv(self, u) -> Vec:
        return self.collector.inverse(u)

    def pow(self, u, e: int) -> Vec:
        return self.collector.power(u, e)

    def comm(self, u, v) -> Vec:
        return self.collector.commutator(u, v)

    # -- serialisation ------------------------------------------------------

    def to_dict(self) -> dict:
        n = self.n
        out = {
            "p": self.p,
            "n": n,
            "d": self.d,
            "powers": [list(v) for v in self.power_rhs],
            "commutators": [
                {"j": j, "i": i, "rhs": list(self.comm_rhs[j][i])}
                for j in range(n)
                for i in range(j)
                if any(self.comm_rhs[j][i])
            ],
            "weights": list(self.weights),
            "definitions": [],
        }
        for k, df in enumerate(self.definitions):
            if df is None:
                continue
            entry = {"gen": k, "kind": df.kind, "i": df.i}
            if df.kind == COMM:
                entry["j"] = df.j
            out["definitions"].append(entry)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict, monotone: bool | None = None) -> "PcPresentation":
        try:
            p, n = int(data["p"]), int(data["n"])
            powers = [tuple(int(x) % p for x in v) for v in data.get("powers", [])] or [_zero(n)] * n
            if len(powers) != n:
                raise ValueError("powers must list one vector per generator")
            comm = [[_zero(n)] * n for _ in range(n)]
            for c in data.get("commutators", []):
                j, i = int(c["j"]), int(c["i"])
                if not 0 <= i < j < n:
                    raise ValueError(f"bad commutator indices ({j},{i})")
                comm[j][i] = tuple(int(x) % p for x in c["rhs"])
            defs = [None] * n
            for e in data.get("definitions", []):
                k = int(e["gen"])
                kind = e["kind"]
                if kind not in (POWER, COMM):
                    raise ValueError(f"unknown definition kind {kind!r}")
                defs[k] = Definition(kind, int(e["i"]), int(e["j"]) if kind == COMM else None)
            weights = tuple(int(w) for w in data["weights"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed presentation: {exc}") from exc
        if monotone is None:
            monotone = all(a <= b for a, b in zip(weights, weights[1:]))
        pres = cls(p, n, tuple(powers), tuple(tuple(r) for r in comm), weights, tuple(defs), monotone)
        if "d" in data and int(data["d"]) != pres.d:
            raise ValueError("field d disagrees with the definitions")
        return pres

    @classmethod
    def from_json(cls, text: str) -> "PcPresentation":
        return cls.from_dict(json.loads(text))


def _check_vec(v, n, p, after, what):
    if len(v) != n:
        raise ValueError(f"{what}: vector has wrong length")
    for k, x in enumerate(v):
        if not 0 <= x < p:
            raise ValueError(f"{what}: exponent {x} outside [0,{p})")
        if x and k <= after:
            raise ValueError(f"{what}: right-hand side involves a_{k}")


# -- construction helpers ----------------------------------------------------


def build(
    p: int,
    n: int,
    powers: dict | None = None,
    comms: dict | None = None,
    definitions: Sequence | None = None,
    monotone: bool = True,
) -> PcPresentation:
    """Assemble a presentation from sparse relations.

    powers maps i -> {k: e}; comms maps (j, i) -> {k: e}.  Without explicit
    definitions, each generator takes the largest weight among the relations
    it occurs in and is defined by one of those whose right-hand side is
    exactly that generator (ties: lowest (j, i)).
    """
    powers = powers or {}
    comms = comms or {}
    pw = []
    for i in range(n):
        v = [0] * n
        for k, e in powers.get(i, {}).items():
            v[k] = e % p
        pw.append(tuple(v))
    cm = [[_zero(n)] * n for _ in range(n)]
    for (j, i), rhs in comms.items():
        if not j > i:
            raise ValueError("commutator relations need j > i")
        v = [0] * n
        for k, e in rhs.items():
            v[k] = e % p
        cm[j][i] = tuple(v)
    cm = tuple(tuple(r) for r in cm)
    if definitions is None:
        definitions = _infer_definitions(p, n, pw, cm)
    weights = [1] * n
    for k in range(n):
        df = definitions[k]
        if df is not None:
            weights[k] = df.weight(weights)
    return PcPresentation(p, n, tuple(pw), cm, tuple(weights), tuple(definitions), monotone)


def _infer_definitions(p, n, pw, cm):
    """Give each generator the largest weight its occurrences force, and
    define it by a relation of exactly that weight with right-hand side a_k.
    """
    defs = [None] * n
    weights = [1] * n
    for k in range(n):
        exact = []
        for i in range(k):
            cands = [(weights[i] + 1, (i, -1), Definition(POWER, i), pw[i])]
            cands += [(weights[i] + weights[j], (j, i), Definition(COMM, i, j), cm[j][i]) for j in range(i + 1, k)]
            for w, key, df, rhs in cands:
                if rhs[k]:
                    weights[k] = max(weights[k], w)
                    if rhs == unit(n, k):
                        exact.append((-w, key, df))
        if exact:
            w, _, df = min(exact)
            if -w != weights[k]:
                raise ValueError(f"a_{k} has no defining relation of weight {weights[k]}")
            defs[k] = df
        elif weights[k] > 1:
            raise ValueError(f"a_{k} has no defining relation of weight {weights[k]}")
    return defs


def elementary_abelian(p: int, d: int) -> PcPresentation:
    return build(p, d)


# -- collection --------------------------------------------------------------


class Collector:
    """Multiplication of normal forms by collection from the left.

    x * a_i^e is computed as head * a_i^e * (tail conjugated by a_i^e), where
    head holds the exponents of a_0..a_i and tail those of a_{i+1}.. .  The
    conjugates a_i^-e a_k a_i^e are cached on first use.
    """

    def __init__(self, pres: PcPresentation):
        self.pres = pres
        self.p = pres.p
        self.n = pres.n
        n = self.n
        self._pow = [list(v) for v in pres.power_rhs]
        # commutes[i] = set of k > i with [a_k, a_i] = 1
        self._noncomm = [[k for k in range(i + 1, n) if any(pres.comm_rhs[k][i])] for i in range(n)]
        self._conj = {}
        self._conjpow = {}

    def _conj_gen(self, k: int, i: int, e: int) -> tuple:
        """Normal form of a_i^-e a_k a_i^e for k > i, 1 <= e < p."""
        key = (k, i, e)
        r = self._conj.get(key)
        if r is not None:
            return r
        if e == 1:
            v = list(self.pres.comm_rhs[k][i])
            v[k] = 1
            r = tuple(v)
        else:
            r = self._conj_elem(self._conj_gen(k, i, e - 1), i, 1)
        self._conj[key] = r
        return r

    def _conj_gen_pow(self, k: int, i: int, e: int, t: int) -> tuple:
        key = (k, i, e, t)
        r = self._conjpow.get(key)
        if r is None:
            base = self._conj_gen(k, i, e)
            r = base if t == 1 else self.mul(self._conj_gen_pow(k, i, e, t - 1), base)
            self._conjpow[key] = r
        return r

    def _conj_elem(self, x, i: int, e: int) -> tuple:
        """a_i^-e x a_i^e for x supported on indices > i."""
        out = None
        for k in range(i + 1, self.n):
            t = x[k]
            if not t:
                continue
            c = self._conj_gen_pow(k, i, e, t)
            out = c if out is None else self.mul(out, c)
        return out if out is not None else _zero(self.n)

    def _times_gen(self, x: list, i: int, e: int) -> list:
        """x * a_i^e with 1 <= e < p; x is a list and may be modified."""
        p, n = self.p, self.n
        tail = None
        for k in range(i + 1, n):
            if x[k]:
                tail = x[i + 1:]
                break
        if tail is not None:
            for k in range(i + 1, n):
                x[k] = 0
        x[i] += e
        if x[i] >= p:
            x[i] -= p
            pw = self._pow[i]
            for k in range(i + 1, n):
                x[k] = pw[k]
        if tail is None:
            return x
        full_tail = [0] * (i + 1) + tail
        if all(not full_tail[k] for k in self._noncomm[i]):
            conj = full_tail
        else:
            conj = self._conj_elem(full_tail, i, e)
        return self._mul_into(x, conj)

    def _mul_into(self, x: list, y) -> list:
        f = self._first(y)
        if f is None:
            return x
        if not any(x[f:]):
            x[f:] = y[f:]
            return x
        for k in range(f, self.n):
            if y[k]:
                x = self._times_gen(x, k, y[k])
        return x

    def _first(self, y):
        for k in range(self.n):
            if y[k]:
                return k
        return None

    # -- public -------------------------------------------------------------

    def mul(self, u, v) -> tuple:
        return tuple(self._mul_into(list(u), v))

    def times_gen(self, u, i: int, e: int = 1) -> tuple:
        e %= self.p
        if e == 0:
            return tuple(u)
        return tuple(self._times_gen(list(u), i, e))

    def inverse(self, u) -> tuple:
        z = list(u)
        y = [0] * self.n
        for i in range(self.n):
            if z[i]:
                e = self.p - z[i]
                z = self._times_gen(z, i, e)
                y = self._times_gen(y, i, e)
        assert not any(z)
        return tuple(y)

    def power(self, u, e: int) -> tuple:
        if e < 0:
            return self.power(self.inverse(u), -e)
        result = _zero(self.n)
        base = tuple(u)
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def commutator(self, u, v) -> tuple:
        return self.mul(self.mul(self.inverse(u), self.inverse(v)), self.mul(u, v))

    def conjugate(self, u, g) -> tuple:
        return self.mul(self.mul(self.inverse(g), u), g)


def collect(pres: PcPresentation, word: Iterable) -> Vec:
    """Normal form of a word given as (generator, exponent) pairs; exponents may be negative."""
    c = pres.collector
    x = pres.identity()
    for g, e in word:
        if not 0 <= g < pres.n:
            raise ValueError(f"generator index {g} out of range")
        if 0 <= e < pres.p:
            x = c.times_gen(x, g, e)
        else:
            x = c.mul(x, c.power(pres.gen(g), e))
    return x


def multiply(pres, u, v):
    return pres.collector.mul(u, v)


def inverse(pres, u):
    return pres.collector.inverse(u)


def power(pres, u, e):
    return pres.collector.power(u, e)


def commutator(pres, u, v):
    return pres.collector.commutator(u, v)


# -- consistency -------------------------------------------------------------


@dataclass(frozen=True)
class ConsistencyResult:
    ok: bool
    test: tuple | None = None  # label of the first failing test word
    lhs: Vec | None = None
    rhs: Vec | None = None

    def __bool__(self):
        return self.ok


def consistency_pairs(pres: PcPresentation):
    """Yield (label, lhs, rhs) for the standard test words of a prime-exponent pcp."""
    c = pres.collector
    p, n = pres.p, pres.n
    e = pres.gen
    mul = c.mul
    for k in range(n):
        for j in range(k):
            for i in range(j):
                yield ("assoc", k, j, i), mul(mul(e(k), e(j)), e(i)), mul(e(k), mul(e(j), e(i)))
    for j in range(n):
        for i in range(j):
            yield ("power_left", j, i), mul(pres.power_rhs[j], e(i)), mul(e(j, p - 1), mul(e(j), e(i)))
            yield ("power_right", j, i), mul(e(j), pres.power_rhs[i]), mul(mul(e(j), e(i)), e(i, p - 1))
    for i in range(n):
        yield ("power_self", i), mul(e(i), pres.power_rhs[i]), mul(pres.power_rhs[i], e(i))


def is_consistent(pres: PcPresentation) -> ConsistencyResult:
    for label, lhs, rhs in consistency_pairs(pres):
        if lhs != rhs:
            return ConsistencyResult(False, label, lhs, rhs)
    return ConsistencyResult(True)


def element_index(v, p: int) -> int:
    k = 0
    for x in v:
        k = k * p + x
    return k


def right_regular_permutations(pres: PcPresentation) -> np.ndarray:
    """perm[i][x] = index of x * a_i, over all p^n normal forms."""
    p, n = pres.p, pres.n
    c = pres.collector
    N = p**n
    perms = np.empty((n, N), dtype=np.int64)
    for idx in range(N):
        v = []
        t = idx
        for _ in range(n):
            v.append(t % p)
            t //= p
        v = tuple(reversed(v))
        for i in range(n):
            perms[i, idx] = element_index(c.times_gen(v, i, 1), p)
    return perms


def exhaustive_consistency(pres: PcPresentation) -> bool:
    """Independent check: the right-multiplication maps on the p^n normal forms
    are permutations satisfying every relation and act transitively.
    """
    p, n = pres.p, pres.n
    perms = right_regular_permutations(pres)
    N = p**n
    ident = np.arange(N)
    for i in range(n):
        if len(np.unique(perms[i])) != N:
            return False

    def word_perm(vec):
        out = ident
        for k in range(n):
            for _ in range(vec[k]):
                out = perms[k][out]
        return out

    def gen_pow(i, e):
        out = ident
        for _ in range(e):
            out = perms[i][out]
        return out

    inv = [np.argsort(perms[i]) for i in range(n)]
    for i in range(n):
        if not np.array_equal(gen_pow(i, p), word_perm(pres.power_rhs[i])):
            return False
    for j in range(n):
        for i in range(j):
            # x -> x a_j^-1 a_i^-1 a_j a_i
            lhs = perms[i][perms[j][inv[i][inv[j]]]]
            if not np.array_equal(lhs, word_perm(pres.comm_rhs[j][i])):
                return False
    # transitivity: orbit of the identity under the generated group
    seen = np.zeros(N, dtype=bool)
    seen[0] = True
    frontier = np.array([0])
    while frontier.size:
        nxt = np.unique(np.concatenate([perms[i][frontier] for i in range(n)]))
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return bool(seen.all())


# -- series and quotients ----------------------------------------------------


def p_central_series(pres: PcPresentation) -> list:
    """[gamma_0, gamma_1, ..., gamma_c] as sets of generator indices; gamma_c is empty."""
    c = pres.p_class
    return [frozenset(k for k in range(pres.n) if pres.weights[k] >= h + 1) for h in range(c + 1)]


def central_elementary_gens(pres: PcPresentation) -> frozenset:
    """Generators that are central with trivial p-th power."""
    n = pres.n
    out = set()
    for k in range(n):
        if any(pres.power_rhs[k]):
            continue
        if any(any(pres.comm_rhs[k][i]) for i in range(k)):
            continue
        if any(any(pres.comm_rhs[j][k]) for j in range(k + 1, n)):
            continue
        out.add(k)
    return frozenset(out)


def quotient(
    pres: PcPresentation,
    subgroup: Sequence,
    eliminate_order: Sequence[int] | None = None,
    monotone: bool | None = None,
) -> PcPresentation:
    """Presentation of pres / <subgroup> for a subgroup inside the span of
    central generators of order p.

    Generators are killed in the order of eliminate_order (default: highest
    index first); the survivors keep their relative order.
    """
    from . import matfp

    p, n = pres.p, pres.n
    vecs = [tuple(int(x) % p for x in v) for v in subgroup]
    vecs = [v for v in vecs if any(v)]
    if not vecs:
        return pres
    allowed = central_elementary_gens(pres)
    for v in vecs:
        bad = [k for k in range(n) if v[k] and k not in allowed]
        if bad:
            raise ValueError(f"subgroup element {v} is not in the central elementary part (a_{bad[0]})")
    order = list(eliminate_order) if eliminate_order is not None else list(range(n - 1, -1, -1))
    order += [k for k in range(n - 1, -1, -1) if k not in order]
    a = np.array(vecs, dtype=np.int64)[:, order]
    canon = matfp.rref(a, p)
    rows = []
    for row, pc in zip(canon.basis, canon.pivots):
        full = [0] * n
        for pos, k in enumerate(order):
            full[k] = row[pos]
        rows.append((order[pc], full))
    killed = {k for k, _ in rows}

    def reduce(v):
        v = list(v)
        for k, row in rows:
            if v[k]:
                f = v[k]
                for t in range(n):
                    if row[t]:
                        v[t] = (v[t] - f * row[t]) % p
        return v

    keep = [k for k in range(n) if k not in killed]
    index_map = {k: t for t, k in enumerate(keep)}

    def project(v):
        v = reduce(v)
        return tuple(v[k] for k in keep)

    m = len(keep)
    pw = tuple(project(pres.power_rhs[k]) for k in keep)
    cm = [[(0,) * m] * m for _ in range(m)]
    for a_, j in enumerate(keep):
        for b_, i in enumerate(keep[:a_]):
            cm[a_][b_] = project(pres.comm_rhs[j][i])
    defs = []
    for k in keep:
        df = pres.definitions[k]
        if df is None:
            defs.append(None)
        elif df.i in index_map and (df.j is None or df.j in index_map):
            defs.append(df.shifted(index_map))
        else:
            raise ValueError(f"definition of surviving a_{k} refers to a killed generator")
    weights = [1] * m
    for t, df in enumerate(defs):
        if df is not None:
            weights[t] = df.weight(weights)
    if monotone is None:
        monotone = all(x <= y for x, y in zip(weights, weights[1:]))
    return PcPresentation(p, m, pw, tuple(tuple(r) for r in cm), tuple(weights), tuple(defs), monotone)

