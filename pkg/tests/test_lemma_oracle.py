import pytest

from orbitalis.lemma_oracle import (
    LEMMAS,
    MAX_N,
    SHADOW_NOTE,
    Dyn,
    SizeCap,
    UnknownLemmaId,
    check_lemma,
    enumerate_autos,
    enumerate_posets,
    labeled_by_extension,
    labeled_by_subsets,
    partial_autos_extending,
)
from orbitalis.poset_core import FinPoset, antichain, canonical_form, chain

# frozen from the two independent enumerators below
LABELED = [1, 1, 3, 19, 219, 4231]
ISO = [1, 1, 2, 5, 16, 63, 318]


def _key(P):
    return frozenset(P.lt_pairs())


@pytest.mark.parametrize("n", range(5))
def test_enumerators_agree_as_sets(n):
    a = {_key(P) for P in labeled_by_extension(n)}
    b = {_key(P) for P in labeled_by_subsets(n)}
    assert a == b
    assert len(a) == len(labeled_by_extension(n)) == LABELED[n]


def test_labeled_count_n5():
    assert sum(1 for _ in enumerate_posets(5)) == LABELED[5]


@pytest.mark.parametrize("n", range(7))
def test_iso_counts(n):
    classes = list(enumerate_posets(n, "iso"))
    assert len(classes) == ISO[n]
    assert len({canonical_form(P) for P in classes}) == ISO[n]


def test_iso_classes_cover_labeled():
    forms = {canonical_form(P) for P in enumerate_posets(4, "iso")}
    assert {canonical_form(P) for P in enumerate_posets(4)} == forms


def test_size_cap_and_bad_mode():
    with pytest.raises(SizeCap):
        list(enumerate_posets(MAX_N + 1))
    with pytest.raises(ValueError):
        list(enumerate_posets(2, "nope"))
    with pytest.raises(SizeCap):
        check_lemma("NLemma", MAX_N + 1)
    with pytest.raises(UnknownLemmaId):
        check_lemma("NoSuchLemma", 2)


def test_autos_of_small_posets():
    assert len(list(enumerate_autos(antichain(3)))) == 6
    assert list(enumerate_autos(chain(3))) == [{0: 0, 1: 1, 2: 2}]
    # V shape: swap the two tops
    V = FinPoset(range(3), [(0, 1), (0, 2)])
    assert len(list(enumerate_autos(V))) == 2


def test_partial_autos_extending():
    P = antichain(2)
    maps = list(partial_autos_extending(P, {}))
    # {}, two singletons per point, and two total bijections
    assert len(maps) == 1 + 4 + 2
    assert all(m[0] == 1 for m in partial_autos_extending(P, {0: 1}))


def test_dyn_swapped_parallel_edges():
    # two parallel edges swapped: orbits {0, 2} and {1, 3}, weakly but not strongly ordered
    P = FinPoset(range(4), [(0, 1), (2, 3)])
    d = Dyn(P, {0: 2, 2: 0, 1: 3, 3: 1})
    assert d.order == 2
    assert d.pow(0, 3) == 2
    assert d.bseq(0, 1) == (True, False)
    assert d.parity(0) == 0 and d.sp(0) == 2
    assert d.weak(0, 1) and not d.strong(0, 1) and not d.weak(1, 0)
    assert d.orbital(0) == frozenset({0, 2})


@pytest.mark.parametrize("lemma", sorted(LEMMAS))
def test_every_lemma_verified_n4(lemma):
    rep = check_lemma(lemma, 4)
    assert rep["verified"], rep["counterexample"]
    assert rep["instances"] > 0
    assert ("note" in rep) == (lemma in SHADOW_NOTE)


def test_iso_mode_runs():
    rep = check_lemma("OrbitalOrder", 4, "iso")
    assert rep["verified"] and rep["mode"] == "iso"


def test_oracle_catches_a_broken_invariant():
    # mutation: pretend the spiral length is the element id
    rep = check_lemma("SpiralLengthOrbitInvariant", 3, sp=lambda d, x: x)
    assert not rep["verified"]
    assert rep["counterexample"]["witness"]["k"] >= 1


def test_oracle_catches_a_broken_parity():
    rep = check_lemma("SpiralLengthOrbitInvariant", 3, par=lambda d, x: x % 2)
    assert not rep["verified"]
