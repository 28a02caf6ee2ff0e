import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbitalis.poset_core import (
    CycleViolation,
    FinPoset,
    NotEmbedding,
    Rel,
    SandwichViolation,
    UnknownElem,
    amalgamate,
    antichain,
    canonical_form,
    chain,
    check_amalgam,
    compare,
    embeds_all_small,
    find_embedding,
    insert_edge,
    is_embedding,
    qftp,
    sandwich_insert,
)


@st.composite
def posets(draw, max_n=6):
    n = draw(st.integers(0, max_n))
    perm = draw(st.permutations(range(n)))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return FinPoset(range(n), [(perm[i], perm[j]) for (i, j), k in zip(pairs, keep) if k])


@given(posets())
def test_closure_is_a_strict_order(P):
    P.check_invariants()
    for a, b, c in itertools.product(P.elems, repeat=3):
        assert not P.less(a, a)
        if P.less(a, b):
            assert not P.less(b, a)
            if P.less(b, c):
                assert P.less(a, c)


@given(posets(), st.data())
def test_sandwich_insert_is_minimal(P, data):
    if not P.elems:
        return
    a = data.draw(st.sampled_from(P.elems))
    ups = sorted(P.up(a))
    Q, z = sandwich_insert(P, [a], ups[:1])
    Q.check_invariants()
    assert Q.down(z) == P.down(a) | {a}
    # nothing old changes
    for x, y in itertools.product(P.elems, repeat=2):
        assert Q.less(x, y) == P.less(x, y)


@given(posets(max_n=5))
def test_json_round_trip(P):
    assert FinPoset.from_json(P.to_json()) == P


@given(posets(max_n=5), st.randoms(use_true_random=False))
def test_canonical_form_ignores_relabelling(P, rnd):
    xs = P.elems
    ys = list(xs)
    rnd.shuffle(ys)
    m = dict(zip(xs, ys))
    Q = FinPoset(ys, [(m[a], m[b]) for a, b in P.lt_pairs()])
    assert canonical_form(P) == canonical_form(Q)


def _embeddings(A, P):
    for img in itertools.permutations(P.elems, len(A)):
        m = dict(zip(A.elems, img))
        if is_embedding(A, P, m):
            yield m


@given(posets(max_n=3), posets(max_n=4), posets(max_n=4), st.data())
def test_amalgam_conditions(A, P1, P2, data):
    E1, E2 = list(_embeddings(A, P1)), list(_embeddings(A, P2))
    if not E1 or not E2:
        return
    f1, f2 = data.draw(st.sampled_from(E1)), data.draw(st.sampled_from(E2))
    Q, g1, g2 = amalgamate(P1, P2, A, f1, f2)
    Q.check_invariants()
    assert check_amalgam(P1, P2, A, f1, f2, Q, g1, g2) == []
    assert len(Q) == len(P1) + len(P2) - len(A)


def test_chain_antichain_compare():
    C = chain(3)
    assert compare(C, 0, 2) is Rel.LT
    assert compare(C, 2, 0) is Rel.GT
    assert compare(C, 1, 1) is Rel.EQ
    assert compare(antichain(2), 0, 1) is Rel.INC
    with pytest.raises(UnknownElem):
        compare(C, 0, 9)


def test_insert_edge_rejects_cycles():
    C = chain(3)
    with pytest.raises(CycleViolation):
        insert_edge(C, 2, 0)
    with pytest.raises(CycleViolation):
        insert_edge(C, 1, 1)
    Q = insert_edge(antichain(2), 0, 1)
    assert Q.less(0, 1) and not C.less(0, 0)


def test_sandwich_needs_a_below_b():
    with pytest.raises(SandwichViolation):
        sandwich_insert(antichain(2), [0], [1])


def test_amalgamate_rejects_non_embedding():
    A = chain(2)
    with pytest.raises(NotEmbedding):
        amalgamate(chain(2), antichain(2), A, {0: 0, 1: 1}, {0: 0, 1: 1})


def test_amalgam_of_two_chains_over_a_point_is_free():
    # 0 < 1 and 0 < 1' share 0; the two tops stay incomparable
    Q, g1, g2 = amalgamate(chain(2), chain(2), FinPoset([0]), {0: 0}, {0: 0})
    assert len(Q) == 3
    assert not Q.comparable(g1[1], g2[1])


def test_qftp():
    t = qftp(chain(3), 1, [0, 2])
    assert t.rel == ("above", "below")
    assert qftp(antichain(2), 0, [1]).rel == ("incomparable",)


def test_find_embedding_and_small_universality():
    assert find_embedding(chain(3), antichain(5)) is None
    assert find_embedding(antichain(2), FinPoset(range(3), [(0, 1)])) is not None
    assert not embeds_all_small(chain(4), 2)
    # diamond plus an isolated point holds all five 3-point posets but no 4-antichain
    G = FinPoset(range(5), [(0, 1), (0, 2), (1, 3), (2, 3)])
    assert embeds_all_small(G, 3)
    assert not embeds_all_small(G, 4)


def test_restrict_and_hasse():
    G = FinPoset(range(4), [(0, 1), (1, 2), (0, 3)])
    assert set(G.hasse_edges()) == {(0, 1), (1, 2), (0, 3)}
    R = G.restrict([0, 2])
    assert list(R.elems) == [0, 2] and R.less(0, 2)
