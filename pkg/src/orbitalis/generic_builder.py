"""Seeded construction of a generic automorphism as a tower of determined partial maps."""

import copy
import json
from collections import deque
from dataclasses import dataclass
from math import lcm

from .fraisse_engine import LazyPoset
from .partial_autos import (
    ConfigConflict,
    PartialAuto,
    Plan,
    UnresolvedSpiralStatus,
    certify_pair,
    determine_pair,
    force,
    insert_fixed_separator,
    insert_incomparability_witness,
    insert_M,
    plant_spiral_pair,
    settle,
    spiral_status,
)

STYLES = ("fixed", "two_cycle", "positive", "infinite")
POLICIES = ("fifo", "determine-first")


@dataclass(frozen=True)
class Obligation:
    kind: str
    payload: tuple

    def to_dict(self):
        return {"kind": self.kind, "payload": list(self.payload)}


class GenericAuto:
    def __init__(self, seed=0, policy="fifo"):
        if policy not in POLICIES:
            raise ValueError(f"unknown schedule policy {policy!r}")
        self.seed = seed
        self.policy = policy
        self.host = LazyPoset(seed)
        self.tower = [PartialAuto({}, self.host)]
        self.queue = deque([Obligation("Cover", (0,))])
        self.round = 0
        self.blocks = []  # (style, floor, ceiling, main point)
        self.done = []

    @property
    def top(self):
        return self.tower[-1]

    def push(self, p):
        if p is not self.top:
            self.tower.append(p)
        return p

    def clone(self, policy=None):
        g = copy.deepcopy(self)
        if policy is not None:
            g.policy = policy
        return g

    def fork(self):
        """Independent copy of the host and the current map only (the tower history is dropped)."""
        g = GenericAuto.__new__(GenericAuto)
        g.seed, g.policy, g.round = self.seed, self.policy, self.round
        g.host = LazyPoset(self.seed)
        g.host.fragment = self.host.fragment.copy()
        g.host.log = [dict(r) for r in self.host.log]
        g.host.rng.setstate(self.host.rng.getstate())
        top = self.top
        g.tower = [PartialAuto(top.map, g.host, top.certs)]
        g.queue = deque(self.queue)
        g.blocks = list(self.blocks)
        g.done = list(self.done)
        return g

    def to_dict(self):
        p = self.top
        return {
            "seed": self.seed,
            "round": self.round,
            "fragment": self.host.fragment.to_dict(),
            "map": p.to_dict()["map"],
            "certs": [c.to_dict() for c in p.certs],
            "blocks": [list(b) for b in self.blocks],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def tower_lines(self):
        out = []
        for i, p in enumerate(self.tower):
            d = p.to_dict()
            d["level"] = i
            out.append(json.dumps(d, sort_keys=True) + "\n")
        return "".join(out)


def new_generic(seed=0, policy="fifo"):
    return GenericAuto(seed, policy)


def snapshot(g):
    return g.top


# ---------------------------------------------------------------- blocks

def _block(p, style):
    """Plant a floor d < ceiling u, both fixed, with a fresh orbit of the given style between."""
    plan = Plan(p)
    d, u = plan.point("d"), plan.point("u")
    plan.edge(d, u)
    plan.map(d, d)
    plan.map(u, u)
    x = plan.point("x")
    plan.edge(d, x)
    plan.edge(x, u)
    if style == "fixed":
        plan.map(x, x)
    elif style == "two_cycle":
        x1 = plan.point("x1")
        plan.edge(d, x1)
        plan.edge(x1, u)
        plan.map(x, x1)
        plan.map(x1, x)
    elif style == "positive":
        fx = plan.point("fx")
        plan.edge(x, fx)
        plan.edge(fx, u)
        plan.map(x, fx)
    plan.close()
    q = plan.commit()
    if style == "infinite":
        q, _ = insert_M(q, x, floor=d)
    if style in ("positive", "infinite"):
        q, _ = force(q, x, -1)
        q, _ = force(q, x, 1)
    return q, d, u, x


def _reps(p):
    return [s.rep for s in p.segments()]


def _undetermined_with(p, news, olds):
    out = []
    for a in news:
        for b in olds:
            if certify_pair(p, a, b) is None or certify_pair(p, b, a) is None:
                out.append((a, b))
    return out


def _settle(g, p, news):
    return settle(p, news, lambda a: _floor_of(g, a))


def _floor_of(g, x):
    for style, d, u, m in g.blocks:
        if m == x or g.host.fragment.less(d, x):
            return d
    return None


# ---------------------------------------------------------------- schedule

def _next(g):
    if g.policy == "determine-first":
        for i, ob in enumerate(g.queue):
            if ob.kind == "Determine":
                del g.queue[i]
                return ob
    return g.queue.popleft()


def step(g):
    if not g.queue:
        g.queue.append(Obligation("Cover", (len(g.blocks),)))
    ob = _next(g)
    p = g.top
    before = set(_reps(p))
    if ob.kind == "Cover":
        t = ob.payload[0]
        style = STYLES[t % 4]
        p, d, u, x = _block(p, style)
        g.blocks.append((style, d, u, x))
        news = [r for r in _reps(p) if r not in before]
        for a, b in _undetermined_with(p, news, _reps(p)):
            g.queue.append(Obligation("Determine", (a, b)))
        if style == "infinite":
            # standing spiral obligation against the previous covered point
            prev = [m for _, _, _, m in g.blocks[:-1]]
            if prev:
                g.queue.append(Obligation("Realize", ("spirals", x, prev[-1])))
        g.queue.append(Obligation("Cover", (t + 1,)))
    elif ob.kind == "Determine":
        a, b = ob.payload
        p, _ = determine_pair(p, a, b, floor=_floor_of(g, a))
    elif ob.kind == "Realize":
        what = ob.payload[0]
        if what == "spirals":
            _, x, y = ob.payload
            p, _ = plant_spiral_pair(p, x, y, floor=_floor_of(g, x))
        elif what == "separator":
            p, _ = insert_fixed_separator(p, *ob.payload[1:])
        elif what == "witness":
            p, _ = insert_incomparability_witness(p, *ob.payload[1:])
        elif what == "M":
            p, _ = insert_M(p, ob.payload[1])
        news = [r for r in _reps(p) if r not in before]
        p = _settle(g, p, news)
    else:
        raise ValueError(f"unknown obligation {ob.kind}")
    g.push(p)
    g.done.append(ob)
    g.round += 1
    return g


def run(g, rounds):
    for _ in range(rounds):
        step(g)
    return g


def build(seed, rounds, policy="fifo"):
    return run(new_generic(seed, policy), rounds)


def eval(g, x, k):
    g.host.need(x)
    p, y = force(g.top, x, k)
    g.push(p)
    return y


def covered(g):
    return [m for _, _, _, m in g.blocks]


# ---------------------------------------------------------------- homogeneity

def same_pattern(a, b):
    L = lcm(len(a.left), len(a.right), len(b.left), len(b.right))
    lo = min(a.lo, b.lo) - L
    hi = max(a.hi, b.hi) + L
    return all(a(i) == b(i) for i in range(lo, hi + 1))


def _need_det(g, p, a, b):
    d = certify_pair(p, a, b)
    if d is None:
        p, _ = determine_pair(p, a, b, floor=_floor_of(g, a))
        d = certify_pair(p, a, b)
    return p, d


def _matches(p, gamma, x, y, targets):
    dyy = certify_pair(p, y, y)
    if dyy is None or not same_pattern(dyy.pattern, targets[None]):
        return False
    for xp, zp in gamma.items():
        t_xy, t_yx = targets[xp]
        d1, d2 = certify_pair(p, y, zp), certify_pair(p, zp, y)
        if d1 is None or d2 is None:
            return False
        if not same_pattern(d1.pattern, t_xy) or not same_pattern(d2.pattern, t_yx):
            return False
    return True


def homogeneity_extend(g, gamma, x, reuse=True):
    """Return gamma + {x: y} with y's certified b-data copying x's through gamma."""
    gamma = dict(gamma)
    g.host.need(x)
    if x in gamma:
        return gamma
    p = g.top
    before = set(_reps(p))
    st = spiral_status(p, x)
    if st[0] == "unknown":
        raise UnresolvedSpiralStatus(f"spiral length of {x} is not resolved")
    p, dxx = _need_det(g, p, x, x)
    targets = {None: dxx.pattern}
    for xp in gamma:
        p, d1 = _need_det(g, p, x, xp)
        p, d2 = _need_det(g, p, xp, x)
        targets[xp] = (d1.pattern, d2.pattern)
    if reuse and x not in gamma.values() and _matches(p, gamma, x, x, targets):
        g.push(_settle(g, p, [r for r in _reps(p) if r not in before]))
        gamma[x] = x
        return gamma
    sx = p.segment(x)
    s0 = sx.offset(x)
    # make each gamma-image's realized segment at least as long as its preimage's
    for xp, zp in gamma.items():
        a, b = p.segment(xp), p.segment(zp)
        if a.closed or b.closed:
            continue
        sa, sb = a.offset(xp), b.offset(zp)
        p, _ = force(p, zp, max(a.hi - sa, b.hi - sb))
        p, _ = force(p, zp, min(a.lo - sa, b.lo - sb))
    if sx.closed:
        J = list(range(len(sx)))
    else:
        J = list(range(sx.lo - s0, sx.hi - s0 + 1))
    plan = Plan(p)
    ys = {j: plan.point(("y", j)) for j in J}
    for i in J:
        for j in J:
            if i != j and dxx.pattern(j - i):
                plan.edge(ys[i], ys[j])
    for xp, zp in gamma.items():
        t_xy, t_yx = targets[xp]
        sz = p.segment(zp)
        tz = sz.offset(zp)
        for w, off in sz.index.items():
            l = off - tz
            for j in J:
                if t_xy(l - j):
                    plan.edge(ys[j], w)
                elif t_yx(j - l):
                    plan.edge(w, ys[j])
    for a, b in zip(J, J[1:]):
        plan.map(ys[a], ys[b])
    if sx.closed:
        plan.map(ys[J[-1]], ys[J[0]])
    plan.close()
    q = plan.commit()
    y = ys[0]
    if st[0] == "infinite":
        q, _ = insert_M(q, y, floor=_floor_of(g, x))
    for xp, zp in gamma.items():
        for a, b in ((y, zp), (zp, y)):
            if certify_pair(q, a, b) is not None:
                continue
            src = (x, xp) if a == y else (xp, x)
            kinds = {c.kind for c in certify_pair(q, *src).certs}
            if "TighteningSpiral" in kinds or spiral_status(q, a)[0] == "infinite" or spiral_status(q, b)[0] == "infinite":
                m, o = (y, zp) if spiral_status(q, y)[0] == "infinite" else (zp, y)
                q, _ = plant_spiral_pair(q, m, o, floor=_floor_of(g, x))
            else:
                q, _ = determine_pair(q, a, b, floor=_floor_of(g, x))
    if not _matches(q, gamma, x, y, targets):
        raise ConfigConflict(f"copy of {x} does not reproduce its certified b-data")
    q = _settle(g, q, [r for r in _reps(q) if r not in before])
    g.push(q)
    gamma[x] = y
    return gamma
