"""Collection, consistency, series and quotients of power-commutator presentations."""

import dataclasses
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from closed_forms import tail_basis
from pgroupgen import matfp
from pgroupgen.classify import reference_groups
from pgroupgen.pcover import build_cover
from pgroupgen.pcpres import (
    PcPresentation,
    build,
    collect,
    elementary_abelian,
    exhaustive_consistency,
    is_consistent,
    p_central_series,
    quotient,
)

P = 5
REFS = reference_groups(P)
NONTRIVIAL = [k for k in REFS if REFS[k].n >= 2]


def d_p(p):
    return build(p, 3, comms={(1, 0): {2: 1}})


def naive_collect(pres, word):
    """Stepwise rewriting of a word, one letter at a time, with no shortcuts:
    moving a_j past a_i (j > i) uses a_j a_i = a_i a_j [a_j,a_i], and p equal
    letters are replaced by the power relation.  Only safe for class <= 2
    groups, where all right-hand sides are central."""
    p, n = pres.p, pres.n
    letters = [g for g, e in word for _ in range(e % p)]
    changed = True
    while changed:
        changed = False
        for pos in range(len(letters) - 1):
            j, i = letters[pos], letters[pos + 1]
            if j > i:
                rhs = [k for k in range(n) for _ in range(pres.comm_rhs[j][i][k])]
                letters[pos:pos + 2] = [i, j] + rhs
                changed = True
                break
        if changed:
            continue
        for pos in range(len(letters) - p + 1):
            if len(set(letters[pos:pos + p])) == 1:
                g = letters[pos]
                rhs = [k for k in range(n) for _ in range(pres.power_rhs[g][k])]
                letters[pos:pos + p] = rhs
                changed = True
                break
    out = [0] * n
    for g in letters:
        out[g] += 1
    return tuple(out)


# -- collection ------------------------------------------------------------------


@pytest.mark.parametrize("p", [5, 7])
def test_d_p_swap(p):
    assert collect(d_p(p), [(1, 1), (0, 1)]) == (1, 1, 1)


@pytest.mark.parametrize("name", NONTRIVIAL)
def test_p_copies_of_a_generator_give_the_power_relation(name):
    pres = REFS[name]
    for i in range(pres.n):
        assert collect(pres, [(i, 1)] * P) == pres.power_rhs[i]


def test_d_p_word_at_p5():
    pres = d_p(5)
    word = [(0, 2), (1, 3), (0, 3)]
    assert collect(pres, word) == (0, 3, 4)
    assert naive_collect(pres, word) == (0, 3, 4)


def test_central_commutator_identity_exhaustive_in_d_p():
    # a^n b^m a^l = a^(n+l) b^m [b,a]^(lm) whenever [b,a] is central
    pres = d_p(P)
    a, b = pres.gen(0), pres.gen(1)
    ba = pres.comm(b, a)
    for n, m, l in itertools.product(range(P), repeat=3):
        lhs = pres.mul(pres.mul(pres.pow(a, n), pres.pow(b, m)), pres.pow(a, l))
        rhs = pres.mul(pres.mul(pres.pow(a, n + l), pres.pow(b, m)), pres.pow(ba, l * m))
        assert lhs == rhs


@pytest.mark.parametrize("p", [5, 7])
def test_inverted_commutator_in_d_p(p):
    pres = d_p(p)
    assert pres.comm(pres.gen(0), pres.gen(1)) == (0, 0, p - 1)
    assert pres.comm(pres.gen(1), pres.gen(0)) == (0, 0, 1)


def test_elementary_abelian_commutators_are_trivial():
    pres = elementary_abelian(P, 2)
    for u in itertools.product(range(P), repeat=2):
        for v in itertools.product(range(P), repeat=2):
            assert pres.comm(u, v) == (0, 0)


@pytest.mark.parametrize("p", [5, 7])
def test_d_p_matches_heisenberg_matrices(p):
    """Map a_1, a_2 to unitriangular 3x3 matrices and check the map is a
    homomorphism on random pairs."""
    pres = d_p(p)
    x = np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    y = np.array([[1, 0, 0], [0, 1, 1], [0, 0, 1]])

    def mpow(m, e):
        return np.linalg.matrix_power(m, e) % p

    def inv(m):
        return mpow(m, p - 1)

    z = inv(y) @ inv(x) @ y @ x % p  # [a_2, a_1]

    def phi(v):
        return mpow(x, v[0]) @ mpow(y, v[1]) @ mpow(z, v[2]) % p

    rng = np.random.default_rng(p)
    for _ in range(300):
        u = tuple(int(t) for t in rng.integers(0, p, 3))
        v = tuple(int(t) for t in rng.integers(0, p, 3))
        assert np.array_equal(phi(pres.mul(u, v)), phi(u) @ phi(v) % p)
    # the map is injective: p^3 distinct images
    imgs = {phi(v).tobytes() for v in itertools.product(range(p), repeat=3)}
    assert len(imgs) == p**3


# -- consistency -------------------------------------------------------------------


@pytest.mark.parametrize("name", list(REFS))
def test_reference_groups_are_consistent(name):
    pres = REFS[name]
    assert is_consistent(pres).ok
    assert exhaustive_consistency(pres)


def test_elementary_abelian_rank_three_is_consistent():
    assert is_consistent(elementary_abelian(P, 3)).ok


def test_mutated_d_p_is_rejected():
    pres = d_p(P)
    comm = [list(map(tuple, row)) for row in pres.comm_rhs]
    comm[2][0] = (0, 1, 0)  # [a_3, a_1] = a_2
    with pytest.raises(ValueError):
        dataclasses.replace(pres, comm_rhs=tuple(tuple(r) for r in comm))


def test_inconsistent_presentation_has_a_witness():
    # a_1^p = a_2 forces a_1 and a_2 to commute, contradicting [a_2, a_1] = a_3
    bad = build(P, 3, powers={0: {1: 1}}, comms={(1, 0): {2: 1}})
    res = is_consistent(bad)
    assert not res.ok
    assert res.lhs != res.rhs
    assert not exhaustive_consistency(bad)


def test_normal_form_count_by_closure():
    """p^n distinct elements reached from the generators by right multiplication."""
    for name in ["Q_p", "(p^4,7)", "(p^4,10)", "(p^4,13)"]:
        pres = REFS[name]
        seen = {pres.identity()}
        frontier = [pres.identity()]
        while frontier:
            nxt = []
            for x in frontier:
                for k in range(pres.d):
                    y = pres.mul(x, pres.gen(k))
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        assert len(seen) == P**pres.n


# -- series ---------------------------------------------------------------------------


def test_p_central_series():
    series = p_central_series(d_p(P))
    assert series[1] == frozenset({2})
    assert series[2] == frozenset()
    assert d_p(P).p_class == 2
    assert elementary_abelian(P, 4).p_class == 1
    assert REFS["(p^4,7)"].p_class == 3


# -- quotients -----------------------------------------------------------------------


def _order(pres, x):
    k, y = 1, x
    while any(y):
        y = pres.mul(y, x)
        k += 1
    return k


def _exponent(pres):
    return max(_order(pres, v) for v in itertools.product(range(pres.p), repeat=pres.n))


@pytest.mark.parametrize("p", [5, 7])
def test_cover_quotient_by_power_tails_is_d_p(p):
    cd = build_cover(elementary_abelian(p, 2))
    basis = tail_basis(cd, [("pow", 1), ("pow", 2)])
    pad = np.zeros((2, cd.parent_n), dtype=np.int64)
    q = quotient(cd.cover, np.hstack([pad, basis]))
    assert q.n == 3
    assert is_consistent(q).ok and exhaustive_consistency(q)
    assert not q.is_abelian()
    assert _exponent(q) == p


@pytest.mark.parametrize("p", [5, 7])
def test_cover_quotient_by_commutator_and_one_power_tail(p):
    cd = build_cover(elementary_abelian(p, 2))
    basis = tail_basis(cd, [("comm", 2, 1), ("pow", 2)])
    pad = np.zeros((2, cd.parent_n), dtype=np.int64)
    q = quotient(cd.cover, np.hstack([pad, basis]))
    assert q.n == 3
    assert is_consistent(q).ok and exhaustive_consistency(q)
    assert q.is_abelian()
    assert _exponent(q) == p * p


def test_quotient_by_zero_subgroup_is_identity():
    cd = build_cover(REFS["D_p"])
    assert quotient(cd.cover, []) == cd.cover
    assert quotient(cd.cover, [cd.cover.identity()]) == cd.cover


def test_quotient_rejects_non_central_elements():
    with pytest.raises(ValueError):
        quotient(REFS["D_p"], [(1, 0, 0)])


@pytest.mark.parametrize("name", ["C_p^3", "D_p", "(p^4,7)"])
def test_quotient_orders_and_consistency(name):
    cd = build_cover(REFS[name])
    n0 = cd.parent_n
    rng = np.random.default_rng(3)
    for k in range(1, cd.mult_dim + 1):
        rows = np.zeros((k, cd.cover.n), dtype=np.int64)
        rows[:, n0:] = rng.integers(0, P, size=(k, cd.mult_dim))
        q = quotient(cd.cover, rows)
        assert is_consistent(q).ok
        assert q.n == cd.cover.n - matfp.rank(rows, P)
        if q.n <= 5:
            assert exhaustive_consistency(q)


# -- properties ----------------------------------------------------------------------


def elements(pres):
    return st.tuples(*[st.integers(0, pres.p - 1)] * pres.n)


groups = st.sampled_from(NONTRIVIAL).map(lambda k: REFS[k])


@given(st.data())
def test_associativity(data):
    pres = data.draw(groups)
    u, v, t = (data.draw(elements(pres)) for _ in range(3))
    assert pres.mul(pres.mul(u, v), t) == pres.mul(u, pres.mul(v, t))


@given(st.data())
def test_inverse_and_identity(data):
    pres = data.draw(groups)
    u = data.draw(elements(pres))
    assert pres.mul(u, pres.identity()) == u
    assert pres.mul(u, pres.inv(u)) == pres.identity()
    assert pres.mul(pres.inv(u), u) == pres.identity()


@given(st.data(), st.integers(-30, 30))
def test_power_matches_repeated_multiplication(data, e):
    pres = data.draw(groups)
    u = data.draw(elements(pres))
    base = u if e >= 0 else pres.inv(u)
    x = pres.identity()
    for _ in range(abs(e)):
        x = pres.mul(x, base)
    assert pres.pow(u, e) == x


@given(st.data())
def test_commutator_definition(data):
    pres = data.draw(groups)
    h, g = data.draw(elements(pres)), data.draw(elements(pres))
    want = pres.mul(pres.mul(pres.inv(h), pres.inv(g)), pres.mul(h, g))
    assert pres.comm(h, g) == want


@given(st.data())
def test_collect_matches_normal_form_product(data):
    pres = data.draw(groups)
    word = data.draw(st.lists(st.tuples(st.integers(0, pres.n - 1), st.integers(-7, 7)), max_size=8))
    x = pres.identity()
    for g, e in word:
        x = pres.mul(x, pres.pow(pres.gen(g), e))
    assert collect(pres, word) == x


@given(st.sampled_from(list(REFS)))
def test_json_round_trip(name):
    pres = REFS[name]
    text = pres.to_json()
    back = PcPresentation.from_json(text)
    assert back == pres
    assert back.to_json() == text


def _mutate(pres, rng):
    """Overwrite one or two relation right-hand sides with random later words."""
    n, p = pres.n, pres.p
    pw = [list(v) for v in pres.power_rhs]
    cm = [[list(v) for v in row] for row in pres.comm_rhs]
    for _ in range(int(rng.integers(1, 3))):
        j, i = int(rng.integers(0, n)), int(rng.integers(0, n))
        tgt = cm[j][i] if i < j else pw[j]
        for k in range(j + 1, n):
            tgt[k] = int(rng.integers(0, p)) if rng.random() < 0.5 else 0
    return dataclasses.replace(
        pres,
        power_rhs=tuple(map(tuple, pw)),
        comm_rhs=tuple(tuple(map(tuple, r)) for r in cm),
    )


ORDER_P4 = [k for k in REFS if REFS[k].n == 4]


@given(st.integers(0, 2**32 - 1))
def test_mutated_presentations_two_consistency_checks_agree(seed):
    """Random mutations of order-p^4 groups: the test-word check and the
    permutation check must agree (roughly one in six mutations is inconsistent)."""
    rng = np.random.default_rng(seed)
    try:
        pres = _mutate(REFS[ORDER_P4[seed % len(ORDER_P4)]], rng)
    except ValueError:
        return
    assert bool(is_consistent(pres).ok) == exhaustive_consistency(pres)
