"""Dense matrices and subspaces over F_p.

Matrices are numpy int64 arrays with entries reduced mod p.  Row-vector
convention throughout: a matrix acts by x -> x @ g, and row i of a matrix
is the image of the i-th basis vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .fp import find_primitive_root


def as_matrix(rows, p: int) -> np.ndarray:
    a = np.array(rows, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return a % p


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


@lru_cache(maxsize=None)
def inverse_table(p: int) -> np.ndarray:
    t = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        t[x] = pow(x, p - 2, p)
    return t


def _eliminate(a: np.ndarray, p: int, full: bool = True):
    """In-place Gauss(-Jordan) elimination; returns (matrix, pivot cols, swaps, scale product)."""
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    inv = inverse_table(p)
    pivots = []
    swaps = 0
    scale = 1
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
            swaps += 1
        piv = int(a[r, c])
        scale = scale * piv % p
        a[r] = a[r] * inv[piv] % p
        others = np.arange(rows) != r if full else np.arange(rows) > r
        f = a[:, c].copy()
        f[~others] = 0
        a = (a - np.outer(f, a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots, swaps, scale


@dataclass(frozen=True)
class SubspaceCanon:
    """A subspace given by its reduced row-echelon basis."""

    ambient_dim: int
    basis: tuple
    pivots: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((0, self.ambient_dim), dtype=np.int64)
        return np.array(self.basis, dtype=np.int64)

    def key(self, p: int) -> int:
        """Base-p integer of the flattened basis."""
        k = 0
        for row in self.basis:
            for x in row:
                k = k * p + int(x)
        return k

    def contains(self, v, p: int) -> bool:
        return rank(np.vstack([self.matrix(), as_matrix(v, p)]), p) == self.dim


def rref(m, p: int, ambient_dim: int | None = None) -> SubspaceCanon:
    a = np.asarray(m, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    n = a.shape[1] if ambient_dim is None else ambient_dim
    if a.shape[0] == 0:
        return SubspaceCanon(n, (), ())
    red, piv, _, _ = _eliminate(a, p)
    basis = tuple(tuple(int(x) for x in red[i]) for i in range(len(piv)))
    return SubspaceCanon(n, basis, tuple(piv))


def rank(m, p: int) -> int:
    a = np.asarray(m, dtype=np.int64)
    if a.size == 0:
        return 0
    return len(_eliminate(a, p, full=False)[1])


def det(m, p: int) -> int:
    a = np.asarray(m, dtype=np.int64)
    n, n2 = a.shape
    if n != n2:
        raise ValueError("det of a non-square matrix")
    red, piv, swaps, scale = _eliminate(a, p, full=False)
    if len(piv) < n:
        return 0
    return (-1) ** swaps * scale % p


def inverse(m, p: int) -> np.ndarray:
    a = np.asarray(m, dtype=np.int64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    red, piv, _, _ = _eliminate(np.hstack([a, identity(n)]), p)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular mod p")
    return red[:, n:] % p


def nullspace(m, p: int) -> np.ndarray:
    """Basis (rows) of {x : m @ x^T = 0}."""
    a = np.asarray(m, dtype=np.int64)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return identity(cols)
    red, piv, _, _ = _eliminate(a, p)
    free = [c for c in range(cols) if c not in piv]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for t, f in enumerate(free):
        out[t, f] = 1
        for r, c in enumerate(piv):
            out[t, c] = -red[r, f] % p
    return out


def orthogonal_complement(s: SubspaceCanon, p: int) -> SubspaceCanon:
    if s.dim == 0:
        return rref(identity(s.ambient_dim), p)
    return rref(nullspace(s.matrix(), p), p, s.ambient_dim)


def gaussian_binomial(m: int, k: int, p: int) -> int:
    if k < 0 or k > m:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (m - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def gl_order(n: int, p: int) -> int:
    out = 1
    for i in range(n):
        out *= p**n - p**i
    return out


def gl_generators(n: int, p: int) -> list[np.ndarray]:
    """diag(w,1,..,1), the signed cycle e_i -> e_{i+1}, e_n -> -e_1, and e_1 -> e_1 + e_2."""
    w = find_primitive_root(p)
    diag = identity(n)
    diag[0, 0] = w
    if n == 1:
        return [diag]
    cyc = np.zeros((n, n), dtype=np.int64)
    for i in range(n - 1):
        cyc[i, i + 1] = 1
    cyc[n - 1, 0] = p - 1
    tv = identity(n)
    tv[0, 1] = 1
    return [diag, cyc, tv]


def _patterns(m: int, k: int):
    """Pivot patterns in lexicographic order, with free positions in row-major order."""
    out = []
    for piv in combinations(range(m), k):
        pset = set(piv)
        free = [(r, c) for r, pc in enumerate(piv) for c in range(pc + 1, m) if c not in pset]
        out.append((piv, free))
    return out


def enumerate_subspaces(ambient_dim: int, dim: int, p: int) -> Iterator[SubspaceCanon]:
    """Every dim-dimensional subspace of F_p^ambient_dim exactly once, in rank order."""
    if dim == 0:
        yield SubspaceCanon(ambient_dim, (), ())
        return
    for piv, free in _patterns(ambient_dim, dim):
        f = len(free)
        for value in range(p**f):
            a = np.zeros((dim, ambient_dim), dtype=np.int64)
            for r, c in enumerate(piv):
                a[r, c] = 1
            v = value
            for (r, c) in reversed(free):
                a[r, c] = v % p
                v //= p
            yield SubspaceCanon(ambient_dim, tuple(tuple(int(x) for x in row) for row in a), piv)


# -- vectorised helpers used by the orbit engine --------------------------------


def batch_rref(a: np.ndarray, p: int) -> np.ndarray:
    """Reduced echelon form of every matrix in a stack of shape (N, k, m)."""
    a = np.array(a, dtype=np.int64) % p
    N, k, m = a.shape
    inv = inverse_table(p)
    row = np.zeros(N, dtype=np.int64)
    ar = np.arange(k)
    for c in range(m):
        cand = (a[:, :, c] != 0) & (ar[None, :] >= row[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        sel = np.nonzero(has)[0]
        piv = cand[sel].argmax(axis=1)
        r = row[sel]
        sub = a[sel]
        idx = np.arange(len(sel))
        tmp = sub[idx, r].copy()
        sub[idx, r] = sub[idx, piv]
        sub[idx, piv] = tmp
        scale = inv[sub[idx, r, c]]
        sub[idx, r] = sub[idx, r] * scale[:, None] % p
        f = sub[:, :, c].copy()
        f[idx, r] = 0
        sub = (sub - f[:, :, None] * sub[idx, r][:, None, :]) % p
        a[sel] = sub
        row[sel] += 1
    return a


class SubspaceIndex:
    """Bijection between the dim-dimensional subspaces of F_p^m and 0..count-1.

    Ranks follow the order of enumerate_subspaces, so the minimal rank in an
    orbit is the minimal canonical key.  With pivot_limit = l only subspaces
    whose pivots all lie in the first l columns are indexed, i.e. those
    meeting the span of the remaining coordinate vectors trivially.
    """

    def __init__(self, m: int, dim: int, p: int, pivot_limit: int | None = None):
        if not 0 < dim <= m:
            raise ValueError("need 0 < dim <= m")
        self.m, self.k, self.p = m, dim, p
        self.pivot_limit = m if pivot_limit is None else pivot_limit
        if self.pivot_limit < dim:
            raise ValueError("pivot_limit below the subspace dimension")
        self._pat = {}
        self._order = []
        offset = 0
        for piv, free in _patterns(m, dim):
            if piv[-1] >= self.pivot_limit:
                continue
            mask = sum(1 << c for c in piv)
            flat = np.array([r * m + c for r, c in free], dtype=np.int64)
            weights = p ** np.arange(len(free) - 1, -1, -1, dtype=np.int64)
            self._pat[mask] = (offset, flat, weights, piv)
            self._order.append(mask)
            offset += p ** len(free)
        self.count = offset

    def all_points(self) -> np.ndarray:
        out = np.zeros((self.count, self.k, self.m), dtype=np.int8)
        for mask in self._order:
            offset, flat, weights, piv = self._pat[mask]
            n = int(p_pow(self.p, len(flat)))
            block = np.zeros((n, self.k * self.m), dtype=np.int8)
            for r, c in enumerate(piv):
                block[:, r * self.m + c] = 1
            vals = np.arange(n, dtype=np.int64)
            for t in range(len(flat) - 1, -1, -1):
                block[:, flat[t]] = vals % self.p
                vals //= self.p
            out[offset:offset + n] = block.reshape(n, self.k, self.m)
        return out

    def points(self, ranks: np.ndarray) -> np.ndarray:
        ranks = np.asarray(ranks, dtype=np.int64)
        out = np.zeros((len(ranks), self.k * self.m), dtype=np.int8)
        for mask in self._order:
            offset, flat, weights, piv = self._pat[mask]
            n = p_pow(self.p, len(flat))
            sel = np.nonzero((ranks >= offset) & (ranks < offset + n))[0]
            if sel.size == 0:
                continue
            for r, c in enumerate(piv):
                out[sel, r * self.m + c] = 1
            vals = ranks[sel] - offset
            for t in range(len(flat) - 1, -1, -1):
                out[sel, flat[t]] = vals % self.p
                vals = vals // self.p
        return out.reshape(len(ranks), self.k, self.m)

    def ranks(self, canon: np.ndarray) -> np.ndarray:
        """Ranks of a stack of reduced echelon bases of full rank."""
        canon = np.asarray(canon)
        N = canon.shape[0]
        nz = canon != 0
        lead = nz.argmax(axis=2)
        if not nz.any(axis=2).all():
            raise ValueError("rank-deficient basis in SubspaceIndex.ranks")
        masks = (np.int64(1) << lead.astype(np.int64)).sum(axis=1)
        flat = canon.reshape(N, -1).astype(np.int64)
        out = np.empty(N, dtype=np.int64)
        for mask in np.unique(masks):
            offset, fl, weights, _ = self._pat[int(mask)]
            sel = np.nonzero(masks == mask)[0]
            out[sel] = offset + (flat[np.ix_(sel, fl)] @ weights if fl.size else 0)
        return out

    def act(self, canon: np.ndarray, g: np.ndarray) -> np.ndarray:
        img = np.einsum("nkm,ml->nkl", canon.astype(np.int64), g.astype(np.int64)) % self.p
        return batch_rref(img, self.p)

    def canon_of(self, s: SubspaceCanon) -> np.ndarray:
        return s.matrix().reshape(1, self.k, self.m)

    def rank_of(self, s: SubspaceCanon) -> int:
        return int(self.ranks(self.canon_of(s))[0])

    def subspace(self, r: int) -> SubspaceCanon:
        return rref(self.points(np.array([r]))[0].astype(np.int64), self.p)


def p_pow(p: int, e: int) -> int:
    return p**e
