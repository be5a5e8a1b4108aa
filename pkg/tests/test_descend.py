"""Allowable subgroups, descendants and automorphism lifting.

Orbit counts of allowable subgroups are checked against a brute-force oracle
that works in the basis of named tails with hand-derived action matrices, so
it shares no code with the cover, the action or the orbit engine.
"""

import numpy as np
import pytest

from closed_forms import _c_p_squared_matrix, _d_p_matrix, _gl3_matrix, tail_basis
from oracles import all_subspaces, all_vectors, brute_orbits, nucleus_codes, subspace_label_orbits
from pgroupgen import matfp
from pgroupgen.action import AutGroup, Automorphism, extend_automorphism, is_automorphism
from pgroupgen.classify import reference_groups
from pgroupgen.descend import (
    DescendantRecord,
    allowable_reps,
    immediate_descendants,
    lift_automorphisms,
    make_descendant,
    root_record,
)
from pgroupgen.pcover import build_cover
from pgroupgen.pcpres import elementary_abelian, exhaustive_consistency, is_consistent

P = 5


def brute_allowable_count(mats, nucleus, u_dim, m, p):
    """Orbits of subspaces U of dimension u_dim with U + N = M and U != M."""
    subs = all_subspaces(m, u_dim, p)
    n_codes = nucleus_codes(nucleus, m, p)
    # dim(U + N) = dim U + dim N - dim(U meet N)
    keep = []
    for i, s in enumerate(subs):
        meet = len(n_codes & set(s.tolist()))
        if u_dim < m and u_dim + len(nucleus) - round(np.log(meet) / np.log(p)) == m:
            keep.append(i)
    labels = subspace_label_orbits(subs, mats, p, m)
    return len(np.unique(labels[keep]))


def d_p_closed_form_gens(p):
    out = []
    for g in matfp.gl_generators(2, p):
        q = {"u1": g[0, 0], "u2": g[0, 1], "v1": g[1, 0], "v2": g[1, 1]}
        out.append(np.array(_d_p_matrix(q, p)) % p)
    return out


def d_p_record(p):
    """D_p with Aut(D_p) generated by the GL(2,p) generators (central parts zero)."""
    pres = reference_groups(p)["D_p"]
    gens = [Automorphism.of([list(g[0]) + [0], list(g[1]) + [0]]) for g in matfp.gl_generators(2, p)]
    # inner and central automorphisms a_i -> a_i a_3
    gens += [Automorphism.of([[1, 0, 1], [0, 1, 0]]), Automorphism.of([[1, 0, 0], [0, 1, 1]])]
    return DescendantRecord(pres, None, "D_p", 3, 2, AutGroup(3, 2, gens))


@pytest.mark.parametrize("p", [5, 7])
def test_d_p_step_two_count(p):
    rec = d_p_record(p)
    reps = allowable_reps(rec.get_cover(), rec.auts, 2, stabilizers=False)
    assert len(reps) == p + 7


def test_d_p_step_two_against_brute_force():
    # tails [a_3,a_1], [a_3,a_2] span the nucleus; the oracle sees all 806 planes
    count = brute_allowable_count(d_p_closed_form_gens(P), [0, 1], 2, 4, P)
    assert count == P + 7
    rec = d_p_record(P)
    assert len(allowable_reps(rec.get_cover(), rec.auts, 2, stabilizers=False)) == count


def test_d_p_step_one_against_brute_force():
    count = brute_allowable_count(d_p_closed_form_gens(P), [0, 1], 3, 4, P)
    rec = d_p_record(P)
    assert len(allowable_reps(rec.get_cover(), rec.auts, 1, stabilizers=False)) == count == 4


@pytest.mark.parametrize("step", [1, 2, 3])
def test_c_p_squared_steps_against_brute_force(step):
    mats = []
    for g in matfp.gl_generators(2, P):
        mats.append(np.array(_c_p_squared_matrix({"m": g}, P)) % P)
    count = brute_allowable_count(mats, [0, 1, 2], 3 - step, 3, P)
    rec = root_record(P, 2)
    assert len(allowable_reps(rec.get_cover(), rec.auts, step, stabilizers=False)) == count
    assert count == {1: 3, 2: 3, 3: 1}[step]


def test_c_p_cubed_step_one_against_brute_force():
    """Hyperplanes of M are kernels of functionals; U -> U g matches f -> g^-1 f."""
    mats = [np.array(_gl3_matrix({"m": g}, P)) % P for g in matfp.gl_generators(3, P)]
    inv_t = [matfp.inverse(g, P).T for g in mats]
    pts = all_vectors(6, P)[1:]
    pts = pts[pts[np.arange(len(pts)), (pts != 0).argmax(1)] == 1]  # one per line

    def images(x):
        out = []
        frontier = [x]
        seen = {tuple(x)}
        while frontier:
            nxt = []
            for y in frontier:
                for g in inv_t:
                    z = y @ g % P
                    z = z * pow(int(z[(z != 0).argmax()]), P - 2, P) % P
                    if tuple(z) not in seen:
                        seen.add(tuple(z))
                        nxt.append(z)
            frontier = nxt
        return np.array(sorted(seen))

    orbits = brute_orbits(pts, images, P)
    rec = root_record(P, 3)
    reps = allowable_reps(rec.get_cover(), rec.auts, 1, stabilizers=False)
    assert len(reps) == len(orbits) == 4
    assert sorted(r.orbit_size for r in reps) == sorted(len(o) for o in orbits)


def test_orbit_homogeneity_of_the_allowable_condition():
    """Allowability is preserved by the action, so whole orbits pass or fail."""
    mats = d_p_closed_form_gens(P)
    subs = all_subspaces(4, 2, P)
    labels = subspace_label_orbits(subs, mats, P, 4)
    n_codes = nucleus_codes([0, 1], 4, P)
    ok = np.array([len(n_codes & set(s.tolist())) == 1 for s in subs])
    for lab in np.unique(labels):
        vals = ok[labels == lab]
        assert vals.all() or not vals.any()


def test_descendants_are_quotients_of_the_right_shape():
    rec = d_p_record(P)
    cd = rec.get_cover()
    for step in (1, 2):
        for rep in allowable_reps(cd, rec.auts, step, stabilizers=False):
            child = make_descendant(cd, rep.subgroup)
            assert child.n == 3 + step
            assert child.p_class == 3 and child.d == 2
            assert is_consistent(child).ok
            if child.n <= 4:
                assert exhaustive_consistency(child)


def test_cover_mod_commutator_tail_is_homocyclic():
    cd = build_cover(elementary_abelian(P, 2))
    basis = tail_basis(cd, [("comm", 2, 1)])
    child = make_descendant(cd, matfp.rref(basis, P))
    assert child.is_abelian()
    assert child.n == 4
    assert all(any(child.power_rhs[k]) for k in range(2))  # both generators of order p^2


def test_cover_mod_zero_has_order_p5():
    cd = build_cover(elementary_abelian(P, 2))
    child = make_descendant(cd, matfp.rref(np.zeros((0, 3), dtype=np.int64), P, ambient_dim=3))
    assert child.n == 5


def test_non_allowable_subgroup_is_rejected():
    cd = build_cover(reference_groups(P)["D_p"])
    nuc = [np.eye(4, dtype=np.int64)[k] for k in cd.nucleus_columns()]
    with pytest.raises(AssertionError):
        make_descendant(cd, matfp.rref(np.array(nuc), P))


def test_lifted_automorphisms_are_automorphisms():
    rec = root_record(P, 2)
    cd = rec.get_cover()
    for step in (1, 2):
        for rep in allowable_reps(cd, rec.auts, step, stabilizers=True, seed=step):
            child = make_descendant(cd, rep.subgroup)
            grp = lift_automorphisms(cd, rep.stabilizer, child, check=False)
            assert all(is_automorphism(child, a) for a in grp.gens)
            assert len(grp.gens) >= child.d * (child.n - cd.parent_n)


def test_stabilizer_elements_fix_the_subgroup():
    rec = d_p_record(P)
    cd = rec.get_cover()
    for rep in allowable_reps(cd, rec.auts, 2, stabilizers=True, seed=7):
        for a in rep.stabilizer:
            m = extend_automorphism(cd, a)
            img = matfp.rref(np.asarray(rep.subgroup.basis) @ m % P, P)
            assert img == rep.subgroup


def test_terminal_group_has_no_descendants():
    pres = reference_groups(P)["Q_p"]
    rec = DescendantRecord(pres, None, "Q_p", 3, 2, AutGroup(3, 2, []))
    assert immediate_descendants(rec, 5) == []
    with pytest.raises(ValueError):
        allowable_reps(rec.get_cover(), rec.auts, 1)


def test_immediate_descendants_of_c_p_squared():
    kids = immediate_descendants(root_record(P, 2), 4)
    by_order = {}
    for k in kids:
        by_order.setdefault(k.order_exponent, []).append(k)
    assert len(by_order[3]) == 3 and len(by_order[4]) == 3
    assert all(k.auts is not None for k in by_order[3])
    assert all(k.auts is None for k in by_order[4])  # no automorphisms needed at the top order
    assert sum(k.orbit_size for k in by_order[3]) == matfp.gaussian_binomial(3, 1, P)
