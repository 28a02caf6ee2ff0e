import itertools

import pytest

from orbitalis import generic_builder as gb
from orbitalis import orbital_analysis as oa
from orbitalis.fraisse_engine import LazyPoset
from orbitalis.partial_autos import PartialAuto, undetermined_pairs, validate
from orbitalis.poset_core import FinPoset, canonical_form

Q_INF = FinPoset(range(6), [(1, 2), (0, 2), (0, 3), (4, 3), (5, 4)])
Q_INF_MAP = {0: 5, 1: 2, 3: 4}
CROWN = FinPoset(range(6), [(0, 3), (0, 4), (1, 4), (1, 5), (2, 5), (2, 3)])


@pytest.fixture(scope="module")
def base():
    return gb.build(1, 12)


def _main(g, style, which=0):
    return [m for st, _, _, m in g.blocks if st == style][which]


def kind(r):
    return (r.status, r.n, r.parity) if r.status == "Finite" else (r.status,)


def test_spiral_reports(base):
    assert kind(oa.spiral_length(base, _main(base, "positive"))) == ("Finite", 1, 1)
    assert kind(oa.spiral_length(base, _main(base, "two_cycle"))) == ("Finite", 2, 0)
    assert kind(oa.spiral_length(base, _main(base, "fixed"))) == ("Finite", 1, 0)
    r = oa.spiral_length(base, _main(base, "infinite"))
    assert r.status == "InfiniteCertified" and r.cert.kind == "MConfig"


def test_unknown_at_horizon():
    L = LazyPoset(0)
    a, b = L.add_point(), L.add_point()
    r = oa.spiral_length(PartialAuto({a: b}, L), a, 4)
    assert r.status == "UnknownAtHorizon" and r.to_dict() == {"status": "UnknownAtHorizon", "horizon": 4}


def test_m_block_gives_weak_not_strong(base):
    # M configuration: x < f(y) with x incomparable to y
    x = _main(base, "infinite")
    _, y, *_ = oa.spiral_length(base, x).cert.witnesses
    assert oa.orbital_order(base, x, y).relation == "WeakLeqNotStrong"
    assert oa.orbital_order(base, y, x).relation == "NotWeakLeq"
    assert oa.same_orbital(base, x, y).answer == "No"


def test_fixed_floor_is_strongly_below(base):
    style, d, u, x = base.blocks[2]
    assert oa.orbital_order(base, d, x).relation == "StrongLess"
    assert oa.orbital_order(base, x, u).relation == "StrongLess"
    assert oa.orbital_order(base, x, d).relation == "NotWeakLeq"


def test_same_orbital_along_an_orbit(base):
    h = base.fork()
    x = _main(h, "positive")
    y = gb.eval(h, x, 5)
    r = oa.same_orbital(h, x, y)
    assert r.answer == "Yes" and r.to_dict()["answer"] == "Yes"
    f, c = _main(h, "fixed", 0), _main(h, "fixed", 1)
    assert oa.same_orbital(h, f, c).answer == "No"


def test_sandwich_crown_of_fixed_points(base):
    h = base.fork()
    e = oa.sandwich_orbitals(h, [], [], [], CROWN, {i: i for i in range(6)})
    Q = oa.quotient_fragment(h, list(e.values()))
    assert canonical_form(Q) == canonical_form(CROWN)
    assert all(kind(oa.spiral_length(h, v)) == ("Finite", 1, 0) for v in e.values())
    assert undetermined_pairs(h.top) == []


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sandwich_antichain_cycle(base, n):
    h = base.fork()
    X = _main(h, "positive")
    Y = oa.sandwich_orbitals(h, [X], [], [], FinPoset([0]), {0: 0})[0]
    e = oa.sandwich_orbitals(h, [X], [Y], [], FinPoset(range(n)), {i: (i + 1) % n for i in range(n)})
    assert kind(oa.spiral_length(h, e[0])) == ("Finite", n, 0)
    assert oa.orbital_order(h, X, e[0]).relation == "StrongLess"
    assert oa.orbital_order(h, e[0], Y).relation == "StrongLess"


def test_sandwich_q_infinity(base):
    h = base.fork()
    X = _main(h, "positive")
    Y = oa.sandwich_orbitals(h, [X], [], [], FinPoset([0]), {0: 0})[0]
    e = oa.sandwich_orbitals(h, [X], [Y], [], Q_INF, Q_INF_MAP)
    kinds = sorted(kind(oa.spiral_length(h, e[q])) for q in (0, 1, 3))
    assert kinds == sorted([("InfiniteCertified",), ("Finite", 1, 1), ("Finite", 1, -1)])
    validate(h.top)


def test_sandwich_rejects_unordered_orbitals(base):
    a, b = _main(base, "positive", 0), _main(base, "positive", 1)
    with pytest.raises(oa.HypothesisViolation):
        oa.sandwich_orbitals(base.fork(), [a], [b], [], FinPoset([0]), {0: 0})


def test_directedness(base):
    c = oa.directedness_check(base, _main(base, "positive"))
    assert c.kind == "DirectedBound" and c.params["N"] == 1
    with pytest.raises(oa.ParityZero):
        oa.directedness_check(base, _main(base, "fixed"))
    with pytest.raises(oa.ParityZero):
        oa.directedness_check(base, _main(base, "infinite"))
    with pytest.raises(oa.ParityZero):
        oa.all_spiral_lengths_in_orbital(base.fork(), _main(base, "two_cycle"), 2)


@pytest.mark.parametrize("sig", [1, -1])
@pytest.mark.parametrize("n", [2, 3])
def test_length_one_point_inside_a_longer_spiral(base, n, sig):
    # chain of n+1 points closed under f^n: spiral length n with parity sig
    h = base.fork()
    lt = [(0, n)] if sig > 0 else [(n, 0)]
    e = oa.sandwich_orbitals(h, [_main(h, "positive")], [], [], FinPoset(range(n + 1), lt),
                             {i: i + 1 for i in range(n)})
    x = e[0]
    assert kind(oa.spiral_length(h, x)) == ("Finite", n, sig)
    assert oa.directedness_check(h, x) is not None
    ws = oa.all_spiral_lengths_in_orbital(h, x, 3)
    assert [kind(oa.spiral_length(h, w)) for w in ws] == [("Finite", m, sig) for m in (1, 2, 3)]
    assert all(oa.same_orbital(h, x, w).answer == "Yes" for w in ws)
    validate(h.top)
    assert undetermined_pairs(h.top) == []


def test_order_axioms_on_a_quotient(base):
    h = base.fork()
    X = _main(h, "positive")
    Y = oa.sandwich_orbitals(h, [X], [], [], FinPoset([0]), {0: 0})[0]
    e = oa.sandwich_orbitals(h, [X], [Y], [], Q_INF, Q_INF_MAP)
    pts = gb.covered(h) + [Y, e[0], e[1], e[3]]
    Q = oa.quotient_fragment(h, pts)
    reps = list(Q.elems)
    rel = {(a, b): oa.orbital_order(h, a, b).relation for a in reps for b in reps}
    strong = {k for k, v in rel.items() if v == "StrongLess"}
    weak = {k for k, v in rel.items() if v != "NotWeakLeq"}
    for a in reps:
        assert (a, a) not in strong and (a, a) in weak
    for a, b in itertools.permutations(reps, 2):
        assert not ((a, b) in weak and (b, a) in weak)
    for a, b, c in itertools.product(reps, repeat=3):
        if (a, b) in strong and (b, c) in strong:
            assert (a, c) in strong
        if (a, b) in weak and (b, c) in weak:
            assert (a, c) in weak
    assert strong == set(Q.lt_pairs())


def test_admissible_complement_splits_by_weak_order(base):
    h = base.fork()
    X = _main(h, "positive")
    Y = oa.sandwich_orbitals(h, [X], [], [], FinPoset([0]), {0: 0})[0]
    e = oa.sandwich_orbitals(h, [X], [Y], [], Q_INF, Q_INF_MAP)
    reps = [X, Y, e[0], e[1], e[3]]
    C, forced = oa.admissible_complement(h, [e[1]], [], reps)
    for z in C:
        assert oa.orbital_order(h, z, e[1]).relation == "NotWeakLeq"
    for z in forced:
        assert oa.orbital_order(h, z, e[1]).relation != "NotWeakLeq"


def test_labels(base):
    assert oa.orbital_label(base, _main(base, "positive")).endswith("parity +1, sp 1")
    assert oa.orbital_label(base, _main(base, "infinite")).endswith("sp inf")
