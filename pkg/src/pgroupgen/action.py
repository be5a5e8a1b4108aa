"""Automorphisms of pc-presented groups and their action on the multiplicator.

An automorphism is stored by the images of the weight-1 generators.  Maps act
on the right: compose(a, b) applies a first, then b.  Matrices use the row
convention, so the matrix of compose(a, b) is M_a @ M_b.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import matfp
from .pcover import CoverData
from .pcpres import POWER, PcPresentation


@dataclass(frozen=True)
class Automorphism:
    images: tuple  # d exponent vectors

    @classmethod
    def of(cls, images) -> "Automorphism":
        return cls(tuple(tuple(int(x) for x in v) for v in images))


@dataclass
class AutGroup:
    group_n: int
    d: int
    gens: list

    def to_dict(self) -> dict:
        return {"group_n": self.group_n, "d": self.d, "gens": [[list(v) for v in a.images] for a in self.gens]}

    @classmethod
    def from_dict(cls, data: dict) -> "AutGroup":
        return cls(int(data["group_n"]), int(data["d"]), [Automorphism.of(g) for g in data["gens"]])


def apply_images(pres: PcPresentation, all_images: Sequence, x) -> tuple:
    """Image of the normal form x under the map sending a_k to all_images[k]."""
    c = pres.collector
    out = pres.identity()
    for k, e in enumerate(x):
        if e:
            out = c.mul(out, c.power(all_images[k], e))
    return out


def images_of_all(pres: PcPresentation, images: Sequence) -> list:
    """Images of every generator, derived through the definitions."""
    c = pres.collector
    n, p = pres.n, pres.p
    out = [tuple(v) for v in images]
    if len(out) != pres.d:
        raise ValueError(f"expected {pres.d} images, got {len(out)}")
    for k in range(len(out), n):
        df = pres.definitions[k]
        if df is None:
            raise ValueError("weight-1 generators must come first")
        if df.kind == POWER:
            u = c.power(out[df.i], p)
        else:
            u = c.commutator(out[df.j], out[df.i])
        rhs = pres.relation_rhs(df)
        prefix = tuple(rhs[:k]) + (0,) * (n - k)
        if any(prefix):
            u = c.mul(c.inverse(apply_images(pres, out, prefix)), u)
        out.append(u)
    return out


def apply(pres: PcPresentation, alpha: Automorphism, x) -> tuple:
    return apply_images(pres, images_of_all(pres, alpha.images), x)


def compose(pres: PcPresentation, a: Automorphism, b: Automorphism, b_all=None) -> Automorphism:
    """a followed by b."""
    b_all = b_all if b_all is not None else images_of_all(pres, b.images)
    return Automorphism(tuple(apply_images(pres, b_all, v) for v in a.images))


def identity_automorphism(pres: PcPresentation) -> Automorphism:
    return Automorphism(tuple(pres.gen(k) for k in range(pres.d)))


def frattini_matrix(pres: PcPresentation, alpha: Automorphism) -> np.ndarray:
    d = pres.d
    return np.array([v[:d] for v in alpha.images], dtype=np.int64) % pres.p


def is_automorphism(pres: PcPresentation, alpha: Automorphism) -> bool:
    """True iff the images respect every relation and generate the group."""
    if len(alpha.images) != pres.d:
        return False
    if matfp.det(frattini_matrix(pres, alpha), pres.p) == 0:
        return False
    c = pres.collector
    imgs = images_of_all(pres, alpha.images)
    for i in range(pres.n):
        if c.power(imgs[i], pres.p) != apply_images(pres, imgs, pres.power_rhs[i]):
            return False
    for j in range(pres.n):
        for i in range(j):
            if c.commutator(imgs[j], imgs[i]) != apply_images(pres, imgs, pres.comm_rhs[j][i]):
                return False
    return True


def gl_automorphisms(pres: PcPresentation) -> list:
    """GL(d, p) generators as automorphisms of an elementary abelian group."""
    if pres.n != pres.d:
        raise ValueError("only elementary abelian groups carry the full GL(d,p)")
    return [Automorphism.of(g.tolist()) for g in matfp.gl_generators(pres.d, pres.p)]


def extend_automorphism(cd: CoverData, alpha: Automorphism) -> np.ndarray:
    """Matrix of the extension automorphism on the multiplicator (rows = images)."""
    cover = cd.cover
    n = cd.parent_n
    pad = cover.n - n
    lifted = [tuple(v) + (0,) * pad for v in alpha.images]
    imgs = images_of_all(cover, lifted)
    rows = []
    for g in cd.multiplicator_gens:
        v = imgs[g]
        if any(v[:n]):
            raise AssertionError(f"image of multiplicator generator a_{g} leaves the multiplicator: {v}")
        rows.append(v[n:])
    return np.array(rows, dtype=np.int64).reshape(len(rows), pad)


def operation_homomorphism(cd: CoverData, auts: AutGroup | Sequence) -> list:
    gens = auts.gens if isinstance(auts, AutGroup) else auts
    return [extend_automorphism(cd, a) for a in gens]


def dual(mats: Sequence) -> list:
    """Transpose of every matrix."""
    return [np.ascontiguousarray(np.asarray(m).T) for m in mats]


def contragredient(mats: Sequence, p: int) -> list:
    """Inverse transpose: the action on the dual space that is again a right action."""
    return [matfp.inverse(np.asarray(m).T, p) for m in mats]
