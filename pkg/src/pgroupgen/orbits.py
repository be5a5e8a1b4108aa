"""Orbits of matrix groups over F_p on vectors and on subspaces.

Points are identified with integer ranks.  Representatives are the minimal
rank in each orbit, which for subspaces is the minimal canonical key.
Small runs build permutation arrays and keep BFS trees for stabilizers;
large runs do a frontier BFS that computes images on the fly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import matfp

log = logging.getLogger(__name__)

DEFAULT_POINT_CAP = 5_000_000
HARD_POINT_CAP = 50_000_000
PERM_LIMIT = 3_000_000  # points * generators beyond which no permutations are stored
CHUNK = 400_000


class ResourceCapExceeded(RuntimeError):
    """An orbit job would enumerate more points than allowed."""


@dataclass
class OrbitConfig:
    point_cap: int = DEFAULT_POINT_CAP
    heavy_ok: bool = False
    hard_cap: int = HARD_POINT_CAP
    schreier_cap: int = 4096

    def check(self, count: int, what: str):
        if count > self.hard_cap:
            raise ResourceCapExceeded(f"{what}: {count} points exceeds the hard cap {self.hard_cap}")
        if count > self.point_cap and not self.heavy_ok:
            raise ResourceCapExceeded(f"{what}: {count} points exceeds the cap {self.point_cap}; pass heavy_ok")


# -- point spaces --------------------------------------------------------------


class VectorSpace:
    """Nonzero vectors of F_p^m; rank = base-p value minus one (coordinate 0 most significant)."""

    k = 1

    def __init__(self, m: int, p: int):
        self.m, self.p = m, p
        self.count = p**m - 1
        self._w = p ** np.arange(m - 1, -1, -1, dtype=np.int64)

    def points(self, ranks) -> np.ndarray:
        r = np.asarray(ranks, dtype=np.int64) + 1
        out = np.empty((len(r), self.m), dtype=np.int64)
        for c in range(self.m - 1, -1, -1):
            out[:, c] = r % self.p
            r = r // self.p
        return out

    def ranks(self, pts) -> np.ndarray:
        return np.asarray(pts, dtype=np.int64) @ self._w - 1

    def image_ranks(self, ranks, g) -> np.ndarray:
        return self.ranks(self.points(ranks) @ g % self.p)

    def point(self, r: int):
        return tuple(int(x) for x in self.points([r])[0])


class ProjectiveSpace:
    """1-dimensional subspaces with leading coordinate among the first `pivot_limit` ones, scaled to lead with 1."""

    k = 1

    def __init__(self, m: int, p: int, pivot_limit: int | None = None):
        self.m, self.p = m, p
        self.limit = m if pivot_limit is None else pivot_limit
        self.idx = matfp.SubspaceIndex(m, 1, p, pivot_limit=self.limit)
        self.count = self.idx.count
        self._inv = matfp.inverse_table(p)

    def points(self, ranks) -> np.ndarray:
        return self.idx.points(np.asarray(ranks, dtype=np.int64))[:, 0, :].astype(np.int64)

    def normalise(self, v: np.ndarray) -> np.ndarray:
        nz = v != 0
        lead = nz.argmax(axis=1)
        s = self._inv[v[np.arange(len(v)), lead]]
        return v * s[:, None] % self.p

    def ranks(self, pts) -> np.ndarray:
        return self.idx.ranks(np.asarray(pts)[:, None, :])

    def image_ranks(self, ranks, g) -> np.ndarray:
        img = self.normalise(self.points(ranks) @ g % self.p)
        return self.ranks(img)

    def point(self, r: int):
        return self.idx.subspace(int(r))


class GrassmannSpace:
    """k-dimensional subspaces of F_p^m (optionally only those with pivots in the first columns)."""

    def __init__(self, m: int, k: int, p: int, pivot_limit: int | None = None):
        self.m, self.k, self.p = m, k, p
        self.idx = matfp.SubspaceIndex(m, k, p, pivot_limit=pivot_limit)
        self.count = self.idx.count

    def points(self, ranks) -> np.ndarray:
        return self.idx.points(np.asarray(ranks, dtype=np.int64)).astype(np.int64)

    def ranks(self, pts) -> np.ndarray:
        return self.idx.ranks(pts)

    def image_ranks(self, ranks, g) -> np.ndarray:
        return self.idx.ranks(self.idx.act(self.points(ranks), g))

    def point(self, r: int):
        return self.idx.subspace(int(r))


def make_space(m: int, k: int, p: int, pivot_limit: int | None = None):
    if k == 1:
        return ProjectiveSpace(m, p, pivot_limit)
    return GrassmannSpace(m, k, p, pivot_limit)


# -- runs ----------------------------------------------------------------------


@dataclass
class OrbitRun:
    space: object
    gens: list  # matrices actually used (invertible, mod p)
    p: int
    rep_ranks: list
    orbit_sizes: list
    orbit_of: np.ndarray | None = None  # orbit index per point rank
    perms: np.ndarray | None = field(default=None, repr=False)
    fwd_parent: dict = field(default_factory=dict, repr=False)  # orbit -> (parent, gen) arrays
    bwd_next: dict = field(default_factory=dict, repr=False)

    @property
    def representatives(self) -> list:
        return [self.space.point(r) for r in self.rep_ranks]

    @property
    def n_orbits(self) -> int:
        return len(self.rep_ranks)

    def histogram(self) -> dict:
        out = {}
        for s in self.orbit_sizes:
            out[s] = out.get(s, 0) + 1
        return dict(sorted(out.items()))

    # -- transversals -------------------------------------------------------

    def _need_perms(self):
        if self.perms is None:
            raise ValueError("this run kept no permutations; transversals are unavailable")

    def forward_word(self, orbit: int, x: int) -> list:
        """Generator indices w with rep * w = x."""
        self._need_perms()
        parent, gen = self._forward_tree(orbit)
        word = []
        while x != self.rep_ranks[orbit]:
            word.append(int(gen[x]))
            x = int(parent[x])
        return word[::-1]

    def backward_word(self, orbit: int, x: int) -> list:
        """Generator indices w with x * w = rep."""
        self._need_perms()
        nxt = self._backward_tree(orbit)
        word = []
        while x != self.rep_ranks[orbit]:
            g = int(nxt[x])
            word.append(g)
            x = int(self.perms[g][x])
        return word

    def _forward_tree(self, orbit):
        if orbit not in self.fwd_parent:
            N = self.space.count
            parent = np.full(N, -1, dtype=np.int64)
            gen = np.full(N, -1, dtype=np.int16)
            rep = self.rep_ranks[orbit]
            parent[rep] = rep
            frontier = np.array([rep])
            while frontier.size:
                new = []
                for g, perm in enumerate(self.perms):
                    img = perm[frontier]
                    fresh = parent[img] < 0
                    img, src = img[fresh], frontier[fresh]
                    img, first = np.unique(img, return_index=True)
                    parent[img] = src[first]
                    gen[img] = g
                    new.append(img)
                frontier = np.concatenate(new) if new else np.array([], dtype=np.int64)
            self.fwd_parent[orbit] = (parent, gen)
        return self.fwd_parent[orbit]

    def _backward_tree(self, orbit):
        if orbit not in self.bwd_next:
            N = self.space.count
            nxt = np.full(N, -1, dtype=np.int16)
            seen = np.zeros(N, dtype=bool)
            rep = self.rep_ranks[orbit]
            seen[rep] = True
            invs = [np.argsort(perm) for perm in self.perms]
            frontier = np.array([rep])
            while frontier.size:
                new = []
                for g, inv in enumerate(invs):
                    pre = inv[frontier]  # pre * g = frontier
                    pre = np.unique(pre[~seen[pre]])
                    seen[pre] = True
                    nxt[pre] = g
                    new.append(pre)
                frontier = np.concatenate(new) if new else np.array([], dtype=np.int64)
            self.bwd_next[orbit] = nxt
        return self.bwd_next[orbit]

    def orbit_members(self, orbit: int) -> np.ndarray:
        if self.orbit_of is None:
            raise ValueError("this run kept no orbit labels")
        return np.nonzero(self.orbit_of == orbit)[0]

    def orbit_index_of(self, x: int) -> int:
        if self.orbit_of is not None:
            return int(self.orbit_of[x])
        raise ValueError("this run kept no orbit labels")


def _clean_gens(gens, p):
    out = []
    for g in gens:
        g = np.asarray(g, dtype=np.int64) % p
        if matfp.det(g, p) == 0:
            raise ValueError("orbit generators must be invertible")
        out.append(g)
    return out


def _perm_run(space, gens, p) -> OrbitRun:
    N = space.count
    perms = np.empty((len(gens), N), dtype=np.int64)
    all_ranks = np.arange(N, dtype=np.int64)
    for gi, g in enumerate(gens):
        for s in range(0, N, CHUNK):
            perms[gi, s:s + CHUNK] = space.image_ranks(all_ranks[s:s + CHUNK], g)
    if gens:
        rows = np.tile(all_ranks, len(gens))
        graph = csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, perms.ravel())), shape=(N, N))
        _, labels = connected_components(graph, directed=True, connection="weak")
    else:
        labels = all_ranks.copy()
    # relabel so orbits are numbered by their minimal rank
    first = np.full(labels.max() + 1, N, dtype=np.int64)
    np.minimum.at(first, labels, all_ranks)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    orbit_of = relabel[labels]
    sizes = np.bincount(orbit_of)
    reps = first[order]
    return OrbitRun(space, gens, p, [int(r) for r in reps], [int(s) for s in sizes], orbit_of, perms)


def _frontier_run(space, gens, p) -> OrbitRun:
    N = space.count
    seen = np.zeros(N, dtype=bool)
    reps, sizes = [], []
    start = 0
    while True:
        rest = np.flatnonzero(~seen[start:])
        if rest.size == 0:
            break
        rep = start + int(rest[0])
        start = rep
        seen[rep] = True
        size = 1
        frontier = np.array([rep], dtype=np.int64)
        while frontier.size:
            new = []
            for s in range(0, frontier.size, CHUNK):
                chunk = frontier[s:s + CHUNK]
                for g in gens:
                    img = space.image_ranks(chunk, g)
                    img = np.unique(img[~seen[img]])
                    seen[img] = True
                    if img.size:
                        new.append(img)
            frontier = np.concatenate(new) if new else np.array([], dtype=np.int64)
            size += frontier.size
        reps.append(rep)
        sizes.append(size)
        log.debug("orbit %d: rep %d size %d", len(reps), rep, size)
    return OrbitRun(space, gens, p, reps, sizes)


def run_orbits(space, gens, p: int, config: OrbitConfig | None = None, keep_perms: bool | None = None) -> OrbitRun:
    config = config or OrbitConfig()
    gens = _clean_gens(gens, p)
    config.check(space.count, "orbit enumeration")
    # drop duplicates and the identity: they do not change orbits
    uniq, keys = [], set()
    ident = np.eye(space.m, dtype=np.int64)
    for g in gens:
        key = g.tobytes()
        if key in keys or np.array_equal(g, ident):
            continue
        keys.add(key)
        uniq.append(g)
    small = space.count * max(1, len(uniq)) <= PERM_LIMIT
    if keep_perms is None:
        keep_perms = small
    if keep_perms or not uniq:
        return _perm_run(space, uniq, p)
    return _frontier_run(space, uniq, p)


def vector_orbits(gens: Sequence, m: int, p: int, scalar_closure: bool = False, config: OrbitConfig | None = None) -> OrbitRun:
    """Orbits on F_p^m minus zero; scalar_closure adjoins w*I."""
    gens = [np.asarray(g, dtype=np.int64) % p for g in gens]
    if scalar_closure:
        w = matfp.find_primitive_root(p)
        gens = gens + [w * np.eye(m, dtype=np.int64) % p]
    return run_orbits(VectorSpace(m, p), gens, p, config)


def subspace_orbits(gens: Sequence, dim: int, m: int, p: int, config: OrbitConfig | None = None,
                    pivot_limit: int | None = None) -> OrbitRun:
    """Orbits on dim-dimensional subspaces under s -> rref(s @ g)."""
    if not 0 < dim <= m:
        raise ValueError("need 0 < dim <= m")
    return run_orbits(make_space(m, dim, p, pivot_limit), gens, p, config)


def word_matrix(run: OrbitRun, word: Sequence[int]) -> np.ndarray:
    out = np.eye(run.space.m, dtype=np.int64)
    for g in word:
        out = out @ run.gens[g] % run.p
    return out


def stabilizer_words(run: OrbitRun, rep_index: int, cap: int | None = None) -> list:
    """Schreier generators of the stabilizer of a representative, as generator words.

    For each orbit point y and generator g the word t_y g u_{yg} fixes the
    representative (t_y reaches y from it, u_z leads z back to it); adding
    t_y u_y for every y makes the set generate the full stabilizer.  Words
    are deduplicated by their matrix.
    """
    cap = cap or OrbitConfig().schreier_cap
    members = run.orbit_members(rep_index)
    seen = {}
    ident = np.eye(run.space.m, dtype=np.int64).tobytes()

    def add(word):
        mat = word_matrix(run, word)
        key = mat.tobytes()
        if key == ident or key in seen:
            return
        if len(seen) >= cap:
            raise ResourceCapExceeded(f"more than {cap} distinct Schreier generators")
        seen[key] = word

    for y in members:
        t = run.forward_word(rep_index, int(y))
        u_y = run.backward_word(rep_index, int(y))
        add(t + u_y)
        for g in range(len(run.gens)):
            z = int(run.perms[g][y])
            add(t + [g] + run.backward_word(rep_index, z))
    return list(seen.values())


def closure_order(gens: Sequence, p: int, limit: int = 200_000) -> int:
    """Order of the matrix group generated by gens, by brute-force closure."""
    gens = [np.asarray(g, dtype=np.int64) % p for g in gens]
    if not gens:
        return 1
    m = gens[0].shape[0]
    start = np.eye(m, dtype=np.int64)
    seen = {start.tobytes()}
    frontier = [start]
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                b = a @ g % p
                key = b.tobytes()
                if key not in seen:
                    seen.add(key)
                    new.append(b)
                    if len(seen) > limit:
                        raise ResourceCapExceeded("group closure too large")
        frontier = new
    return len(seen)
