"""Immediate descendants: allowable subgroups up to the automorphism action,
the quotients of the cover by them, and automorphisms of the results.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import matfp
from .action import (
    AutGroup,
    Automorphism,
    compose,
    contragredient,
    gl_automorphisms,
    images_of_all,
    is_automorphism,
    operation_homomorphism,
)
from .orbits import OrbitConfig, make_space, run_orbits
from .pcover import CoverData, build_cover, is_extendable
from .pcpres import PcPresentation, elementary_abelian, quotient


@dataclass
class StabilizerConfig:
    """Random Schreier sampling of stabilizers in the automorphism group."""

    samples: int = 30
    slots: int = 10
    warmup: int = 60


@dataclass
class DescendantRecord:
    presentation: PcPresentation
    parent_id: str | None
    record_id: str
    order_exponent: int
    p_class: int
    auts: AutGroup | None
    chosen_subgroup: matfp.SubspaceCanon | None = None
    orbit_size: int | None = None
    cover: CoverData | None = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.presentation.d

    @property
    def depth(self) -> int:
        return self.record_id.count("/")

    def get_cover(self) -> CoverData:
        if self.cover is None:
            self.cover = build_cover(self.presentation)
        return self.cover

    def to_dict(self) -> dict:
        out = self.presentation.to_dict()
        out["id"] = self.record_id
        out["parent"] = self.parent_id
        out["class"] = self.p_class
        out["order_exponent"] = self.order_exponent
        if self.auts is not None:
            out["automorphisms"] = self.auts.to_dict()
        return out


@dataclass
class AllowableRep:
    subgroup: matfp.SubspaceCanon  # U inside M(G), coordinates of the multiplicator generators
    annihilator: matfp.SubspaceCanon  # U^perp, the orbit point actually enumerated
    orbit_size: int
    stabilizer: list | None  # Automorphisms of the parent fixing U, or None if not computed


def root_record(p: int, d: int) -> DescendantRecord:
    pres = elementary_abelian(p, d)
    return DescendantRecord(pres, None, f"C{d}", d, 1, AutGroup(d, d, gl_automorphisms(pres)))


def _check_nucleus_layout(cd: CoverData):
    nuc = cd.nucleus_columns()
    if nuc != list(range(len(nuc))):
        raise AssertionError("nucleus generators must lead the multiplicator")


def allowable_reps(
    cd: CoverData,
    auts: AutGroup,
    step: int,
    config: OrbitConfig | None = None,
    stabilizers: bool = True,
    seed: int = 0,
    stab_config: StabilizerConfig | None = None,
) -> list:
    """One allowable subgroup of codimension `step` per orbit.

    U is allowable iff U + N = M and U != M.  Writing W = U^perp in the dual
    space, that is W meeting the annihilator of N trivially; with the nucleus
    coordinates first, these W are exactly the subspaces whose echelon pivots
    lie among the nucleus columns, and only those are enumerated.
    """
    if not is_extendable(cd):
        raise ValueError("group is terminal: its nucleus is trivial")
    nu, m, p = cd.nucleus_dim, cd.mult_dim, cd.cover.p
    if not 1 <= step <= nu:
        raise ValueError(f"step must lie in 1..{nu}")
    _check_nucleus_layout(cd)
    mats = operation_homomorphism(cd, auts)
    duals = contragredient(mats, p)
    space = make_space(m, step, p, pivot_limit=nu)
    run = run_orbits(space, duals, p, config, keep_perms=True if stabilizers else None)
    out = []
    for o, (r, size) in enumerate(zip(run.rep_ranks, run.orbit_sizes)):
        w = space.point(r)
        if not isinstance(w, matfp.SubspaceCanon):
            w = matfp.rref(np.array([w]), p)
        u = matfp.orthogonal_complement(w, p)
        stab = None
        if stabilizers:
            stab = _random_stabilizer(cd.parent, auts.gens, duals, run, o, seed, stab_config or StabilizerConfig())
        out.append(AllowableRep(u, w, size, stab))
    return out


def _random_stabilizer(pres, gens, duals, run, orbit, seed, cfg: StabilizerConfig) -> list:
    """Random elements of the stabilizer of an orbit representative.

    Product replacement produces near-uniform group elements g; following g
    by a transversal word that leads rep*g back to rep gives a stabilizer
    element.  A few dozen of them generate the stabilizer with overwhelming
    probability, including the part acting trivially on the multiplicator.
    """
    p = run.p
    rng = random.Random(seed * 1_000_003 + orbit)
    ident = np.eye(run.space.m, dtype=np.int64)
    by_key = {}
    kernel = []
    for a, dm in zip(gens, duals):
        key = (dm % p).tobytes()
        by_key.setdefault(key, a)
        if np.array_equal(dm % p, ident):
            kernel.append(a)
    run_auts = [by_key[g.tobytes()] for g in run.gens]
    cache = {}

    def all_images(a):
        k = a.images
        if k not in cache:
            cache[k] = images_of_all(pres, a.images)
        return cache[k]

    def mul(x, y):
        return compose(pres, x[0], y[0], all_images(y[0])), x[1] @ y[1] % p

    if not gens:
        return []
    pairs = [(a, np.asarray(dm) % p) for a, dm in zip(gens, duals)]
    slots = [pairs[i % len(pairs)] for i in range(max(cfg.slots, len(pairs)))]
    acc = slots[0]
    for _ in range(cfg.warmup):
        i, j = rng.sample(range(len(slots)), 2)
        slots[i] = mul(slots[i], slots[j]) if rng.random() < 0.5 else mul(slots[j], slots[i])
        acc = mul(acc, slots[i])
    rep = run.rep_ranks[orbit]
    out = list(kernel)
    for _ in range(cfg.samples):
        i, j = rng.sample(range(len(slots)), 2)
        slots[i] = mul(slots[i], slots[j]) if rng.random() < 0.5 else mul(slots[j], slots[i])
        acc = mul(acc, slots[i])
        alpha, dm = acc
        x = int(run.space.image_ranks(np.array([rep]), dm)[0])
        s = alpha
        for g in run.backward_word(orbit, x):
            s = compose(pres, s, run_auts[g], all_images(run_auts[g]))
        out.append(s)
    return out


def make_descendant(cd: CoverData, u: matfp.SubspaceCanon) -> PcPresentation:
    """The quotient of the cover by an allowable U (given in multiplicator coordinates)."""
    n, m = cd.parent_n, cd.mult_dim
    nu = cd.nucleus_dim
    _check_nucleus_layout(cd)
    vecs = [(0,) * n + tuple(row) for row in u.basis]
    # kill the non-nucleus part first, then nucleus generators from the top
    order = [n + k for k in range(nu, m)] + [n + k for k in range(nu - 1, -1, -1)]
    child = quotient(cd.cover, vecs, eliminate_order=order, monotone=True)
    if child.p_class != cd.parent_class + 1 or child.d != cd.parent.d:
        raise AssertionError("quotient by U is not an immediate descendant; U was not allowable")
    return child


def lift_automorphisms(cd: CoverData, stabilizer: list, child: PcPresentation, check: bool = True) -> AutGroup:
    """Automorphism generators of P(G)/U from generators of the stabilizer of U.

    Each stabilizer element lifts by keeping its images (padded with zeros);
    the central automorphisms a_i -> a_i t for t in the new top layer are added.
    """
    n = cd.parent_n
    d = child.d
    pad = child.n - n
    gens = []
    for a in stabilizer:
        gens.append(Automorphism(tuple(tuple(v) + (0,) * pad for v in a.images)))
    for i in range(d):
        for t in range(n, child.n):
            imgs = [child.gen(k) for k in range(d)]
            v = list(imgs[i])
            v[t] = (v[t] + 1) % child.p
            imgs[i] = tuple(v)
            gens.append(Automorphism(tuple(imgs)))
    if check:
        for a in gens:
            if not is_automorphism(child, a):
                raise AssertionError("lifted map is not an automorphism of the descendant")
    return AutGroup(child.n, d, gens)


def lineage_seed(record_id: str) -> int:
    return zlib.crc32(record_id.encode())


def immediate_descendants(
    record: DescendantRecord,
    max_exponent: int,
    config: OrbitConfig | None = None,
    stab_config: StabilizerConfig | None = None,
) -> list:
    """All immediate descendants of order at most p^max_exponent, one per isomorphism class."""
    pres = record.presentation
    if pres.n >= max_exponent:
        return []
    cd = record.get_cover()
    if not is_extendable(cd):
        return []
    if record.auts is None:
        raise ValueError(f"{record.record_id} carries no automorphisms")
    out = []
    seed = lineage_seed(record.record_id)
    for step in range(1, cd.nucleus_dim + 1):
        order = pres.n + step
        if order > max_exponent:
            break
        need_auts = order < max_exponent
        reps = allowable_reps(cd, record.auts, step, config, stabilizers=need_auts, seed=seed + step,
                              stab_config=stab_config)
        for j, rep in enumerate(reps):
            child = make_descendant(cd, rep.subgroup)
            auts = lift_automorphisms(cd, rep.stabilizer, child) if need_auts else None
            out.append(
                DescendantRecord(
                    presentation=child,
                    parent_id=record.record_id,
                    record_id=f"{record.record_id}/{step}.{j}",
                    order_exponent=order,
                    p_class=record.p_class + 1,
                    auts=auts,
                    chosen_subgroup=rep.subgroup,
                    orbit_size=rep.orbit_size,
                )
            )
    return out
