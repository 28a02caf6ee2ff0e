import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitalis import generic_builder as gb
from orbitalis import orbital_analysis as oa
from orbitalis.partial_autos import (
    b_window,
    certify_pair,
    spiral_status,
    undetermined_pairs,
    validate,
)


@pytest.fixture(scope="module")
def g20():
    return gb.build(1, 20)


def _main(g, style, which=0):
    return [m for st_, _, _, m in g.blocks if st_ == style][which]


def test_empty_generic():
    g = gb.new_generic(5)
    assert len(g.top) == 0 and g.round == 0
    assert [o.kind for o in g.queue] == ["Cover"]
    with pytest.raises(ValueError):
        gb.new_generic(0, "random")


def test_first_step_covers_a_fixed_block():
    g = gb.step(gb.new_generic(0))
    style, d, u, x = g.blocks[0]
    assert style == "fixed" and g.round == 1
    assert {g.top(d), g.top(u), g.top(x)} == {d, u, x}
    assert g.host.fragment.less(d, x) and g.host.fragment.less(x, u)


def test_block_styles(g20):
    h = g20.fork()
    fixed, cyc = _main(h, "fixed"), _main(h, "two_cycle")
    pos, inf = _main(h, "positive"), _main(h, "infinite")
    assert gb.eval(h, fixed, 10 ** 6) == fixed
    assert gb.eval(h, cyc, 2) == cyc and gb.eval(h, cyc, 1) != cyc
    assert spiral_status(h.top, pos) == ("finite", 1, 1)
    assert spiral_status(h.top, inf)[0] == "infinite"
    assert spiral_status(h.top, cyc) == ("finite", 2, 0)


def test_tower_is_increasing_and_valid(g20):
    for a, b in zip(g20.tower, g20.tower[1:]):
        assert a.subset_of(b)
    validate(g20.top)
    assert len(g20.tower_lines().splitlines()) == len(g20.tower)


def test_fifty_rounds_leave_nothing_undetermined():
    g = gb.build(2, 50)
    validate(g.top)
    assert undetermined_pairs(g.top) == []


@given(st.integers(0, 20), st.integers(1, 25), st.sampled_from(gb.POLICIES))
@settings(max_examples=10)
def test_determinism(seed, rounds, policy):
    assert gb.build(seed, rounds, policy).to_json() == gb.build(seed, rounds, policy).to_json()


def test_fork_is_independent(g20):
    before = g20.to_json()
    h = g20.fork()
    gb.run(h, 3)
    assert g20.to_json() == before
    assert h.round == g20.round + 3


def test_clone_switches_policy(g20):
    h = g20.clone("determine-first")
    assert h.policy == "determine-first" and g20.policy == "fifo"
    gb.run(h, 4)
    validate(h.top)


def test_eval_pushes_a_larger_map(g20):
    h = g20.fork()
    pos = _main(h, "positive")
    n = len(h.top)
    y = gb.eval(h, pos, 12)
    assert len(h.top) >= n and h.host.fragment.less(pos, y)
    assert gb.eval(h, y, -12) == pos


def test_schedules_agree_on_b_data():
    g = gb.build(4, 8)
    pts = sorted(g.top.dur)
    a, c = g.clone("fifo"), g.clone("determine-first")
    gb.run(a, 12)
    gb.run(c, 12)
    for x in pts[:12]:
        for y in pts[:12]:
            da, dc = certify_pair(a.top, x, y), certify_pair(c.top, x, y)
            if da and dc:
                assert da.pattern.window(10) == dc.pattern.window(10)


def test_homogeneity_identity_is_reused(g20):
    h = g20.fork()
    x = _main(h, "positive")
    assert gb.homogeneity_extend(h, {}, x) == {x: x}


@pytest.mark.parametrize("style", gb.STYLES)
def test_homogeneity_copies_self_data(g20, style):
    h = g20.fork()
    x = _main(h, style)
    y = gb.homogeneity_extend(h, {}, x, reuse=False)[x]
    assert y != x
    assert gb.same_pattern(certify_pair(h.top, x, x).pattern, certify_pair(h.top, y, y).pattern)
    rx, ry = oa.spiral_length(h, x), oa.spiral_length(h, y)
    assert (rx.status, rx.n, rx.parity) == (ry.status, ry.n, ry.parity)
    assert undetermined_pairs(h.top) == []


def test_homogeneity_respects_gamma(g20):
    h = g20.fork()
    m1, m2 = _main(h, "positive", 0), _main(h, "positive", 1)
    x = _main(h, "infinite")
    gamma = gb.homogeneity_extend(h, {m1: m2}, x, reuse=False)
    y = gamma[x]
    for e in (x, y, m1, m2):
        gb.eval(h, e, 8)
        gb.eval(h, e, -8)
    p = h.top
    for a, b in ((b_window(p, x, m1, 8), b_window(p, y, m2, 8)), (b_window(p, m1, x, 8), b_window(p, m2, y, 8))):
        assert all(u is None or v is None or u == v for u, v in zip(a.as_list(), b.as_list()))
