"""p-covers: multiplicator, nucleus and extendability."""

import itertools

import numpy as np
import pytest

from closed_forms import tail_basis
from pgroupgen import matfp
from pgroupgen.classify import reference_groups
from pgroupgen.pcover import build_cover, is_extendable
from pgroupgen.pcpres import build, elementary_abelian, exhaustive_consistency, is_consistent, quotient

REFS5 = reference_groups(5)

# groups of order up to p^4 with trivial nucleus
NO_NUCLEUS = {"Q_p", "(p^4,6)", "(p^4,8)", "(p^4,9)", "(p^4,10)", "(p^4,13)", "(p^4,14)"}


@pytest.mark.parametrize("p", [5, 7])
def test_cover_of_c_p_squared(p):
    cd = build_cover(elementary_abelian(p, 2))
    assert cd.cover.n == 5
    assert cd.multiplicator_gens == cd.nucleus_gens == (2, 3, 4)
    # the three named tails are exactly the three new generators
    basis = tail_basis(cd, [("comm", 2, 1), ("pow", 1), ("pow", 2)])
    assert sorted(map(tuple, basis)) == sorted(map(tuple, np.eye(3, dtype=np.int64)))


@pytest.mark.parametrize("p", [5, 7])
def test_cover_of_d_p(p):
    cd = build_cover(reference_groups(p)["D_p"])
    assert cd.cover.n == 7
    assert cd.mult_dim == 4 and cd.nucleus_dim == 2
    assert cd.multiplicator_gens == (3, 4, 5, 6)
    assert cd.cover.p_class == 3


@pytest.mark.parametrize("p", [5, 7])
def test_cover_of_c_p_cubed(p):
    cd = build_cover(elementary_abelian(p, 3))
    assert cd.cover.n == 9
    assert cd.mult_dim == 6
    assert cd.multiplicator_gens == cd.nucleus_gens


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_elementary_abelian_multiplicator_rank(d):
    cd = build_cover(elementary_abelian(5, d))
    assert cd.mult_dim == d * (d + 1) // 2


@pytest.mark.parametrize("name", list(REFS5))
def test_cover_invariants(name):
    pres = REFS5[name]
    cd = build_cover(pres)
    c = pres.p_class
    assert set(cd.nucleus_gens) <= set(cd.multiplicator_gens)
    assert cd.cover.p_class <= c + 1
    assert is_extendable(cd) == (cd.cover.p_class == c + 1)
    assert is_extendable(cd) == (name not in NO_NUCLEUS)
    assert is_consistent(cd.cover).ok
    if cd.cover.n <= 6:
        assert exhaustive_consistency(cd.cover)
    # multiplicator generators are central of order p
    cov = cd.cover
    for k in cd.multiplicator_gens:
        assert not any(cov.power_rhs[k])
        for g in range(cov.n):
            assert cov.comm(cov.gen(k), cov.gen(g)) == cov.identity()
    # the cover modulo the multiplicator is the group again
    rows = [cov.gen(k) for k in cd.multiplicator_gens]
    assert quotient(cov, rows) == pres
    # the cover is d-generated: every generator beyond a_d carries a definition
    assert cov.d == pres.d


def test_extendability_examples():
    assert not is_extendable(build_cover(REFS5["Q_p"]))
    assert not is_extendable(build_cover(REFS5["(p^4,8)"]))
    assert is_extendable(build_cover(REFS5["C_{p^2}xC_p"]))


def test_inconsistent_input_is_rejected():
    bad = build(5, 3, powers={0: {1: 1}}, comms={(1, 0): {2: 1}})
    with pytest.raises(ValueError):
        build_cover(bad)


@pytest.mark.parametrize("p", [5, 7])
def test_cover_quotient_by_power_tails_is_free_exponent_p_class_two(p):
    """P(C_p^d) modulo the power tails is the free class-2 exponent-p group on d generators."""
    for d in (2, 3):
        cd = build_cover(elementary_abelian(p, d))
        basis = tail_basis(cd, [("pow", i) for i in range(1, d + 1)])
        rows = np.hstack([np.zeros((d, d), dtype=np.int64), basis])
        q = quotient(cd.cover, rows)
        assert q.n == d + d * (d - 1) // 2  # d generators and one commutator per pair
        for v in itertools.islice(itertools.product(range(p), repeat=q.n), 0, None, 7):
            assert q.pow(v, p) == q.identity()
        assert matfp.rank(basis, p) == d
