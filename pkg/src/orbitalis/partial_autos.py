"""Finite partial automorphisms, b-windows, certificates and configuration planting.

Everything here works on a host `LazyPoset` whose fragment only grows. Because a
new point never changes the relation between two old points, every finite
configuration found in the fragment stays true forever, which is what makes the
certificates below sound.
"""

import json
from dataclasses import dataclass, field

from .poset_core import CycleViolation, PosetError, UnknownElem, qftp


class OrderViolation(PosetError):
    def __init__(self, x, y):
        super().__init__(f"pair ({x},{y}) is not preserved and reflected")
        self.x, self.y = x, y


class OrbitUnavailable(PosetError):
    pass


class ConfigConflict(PosetError):
    pass


class HorizonExceeded(PosetError):
    pass


class SeparatorBlocked(PosetError):
    pass


class WitnessBlocked(PosetError):
    pass


class UnresolvedSpiralStatus(PosetError):
    pass


KINDS = ("FixedSeparator", "NConfig", "MConfig", "TighteningSpiral", "DirectedBound", "FiniteCycle")


@dataclass(frozen=True)
class Certificate:
    kind: str
    witnesses: tuple
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"kind": self.kind, "witnesses": list(self.witnesses), "params": dict(sorted(self.params.items()))}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], tuple(d["witnesses"]), dict(d.get("params", {})))


@dataclass(frozen=True)
class Pattern:
    """A fully known 0/1 sequence: explicit on [lo, lo+len(mid)), periodic tails outside."""

    lo: int
    mid: tuple
    left: tuple
    right: tuple

    @property
    def hi(self):
        return self.lo + len(self.mid) - 1

    def __call__(self, i):
        if i < self.lo:
            return self.left[(i - self.lo) % len(self.left)]
        if i > self.hi:
            return self.right[(i - self.hi - 1) % len(self.right)]
        return self.mid[i - self.lo]

    def shift(self, d):
        """Pattern of i -> self(i + d)."""
        return Pattern(self.lo - d, self.mid, self.left, self.right)

    def window(self, h):
        return [self(i) for i in range(-h, h + 1)]


def constant(v):
    return Pattern(0, (v,), (v,), (v,))


def periodic(bits):
    bits = tuple(bits)
    return Pattern(0, bits, bits, bits)


@dataclass
class Determination:
    pattern: Pattern
    certs: tuple


class Segment:
    """A maximal p-path (or cycle) through a point, indexed relative to its least id."""

    __slots__ = ("points", "closed", "rep", "base", "index")

    def __init__(self, points, closed):
        self.points = points
        self.closed = closed
        self.rep = min(points)
        self.base = points.index(self.rep)
        self.index = {e: i - self.base for i, e in enumerate(points)}

    @property
    def lo(self):
        return None if self.closed else -self.base

    @property
    def hi(self):
        return None if self.closed else len(self.points) - 1 - self.base

    def at(self, off):
        j = self.base + off
        if self.closed:
            return self.points[j % len(self.points)]
        if 0 <= j < len(self.points):
            return self.points[j]
        return None

    def offset(self, x):
        return self.index[x]

    def __len__(self):
        return len(self.points)


class PartialAuto:
    """Immutable finite partial automorphism over a host LazyPoset."""

    def __init__(self, mapping, host, certs=()):
        self.map = dict(mapping)
        self.inv = {v: k for k, v in self.map.items()}
        self.host = host
        self.certs = tuple(certs)
        self._seg = {}
        self._det = {}

    # -- basic views --
    @property
    def P(self):
        return self.host.fragment

    @property
    def dom(self):
        return frozenset(self.map)

    @property
    def ran(self):
        return frozenset(self.inv)

    @property
    def dur(self):
        return frozenset(self.map) | frozenset(self.inv)

    def __call__(self, x):
        return self.map.get(x)

    def __len__(self):
        return len(self.map)

    def fixed_points(self):
        return sorted(x for x, y in self.map.items() if x == y)

    def extend(self, pairs=None, certs=()):
        m = dict(self.map)
        for a, b in (pairs or {}).items():
            if a in m and m[a] != b:
                raise OrderViolation(a, b)
            m[a] = b
        return PartialAuto(m, self.host, self.certs + tuple(c for c in certs if c not in self.certs))

    def with_certs(self, certs):
        return PartialAuto(self.map, self.host, self.certs + tuple(c for c in certs if c not in self.certs))

    def subset_of(self, other):
        return all(other.map.get(k) == v for k, v in self.map.items())

    def to_dict(self):
        return {
            "map": [[k, self.map[k]] for k in sorted(self.map)],
            "certs": [c.to_dict() for c in self.certs],
        }

    # -- orbit bookkeeping --
    def segment(self, x):
        s = self._seg.get(x)
        if s is not None:
            return s
        start = x
        while start in self.inv:
            start = self.inv[start]
            if start == x:
                break
        pts = [start]
        closed = False
        cur = start
        while cur in self.map:
            cur = self.map[cur]
            if cur == start:
                closed = True
                break
            pts.append(cur)
        s = Segment(pts, closed)
        for e in pts:
            self._seg[e] = s
        return s

    def segments(self):
        seen, out = set(), []
        for x in sorted(self.dur):
            if x in seen:
                continue
            s = self.segment(x)
            seen.update(s.points)
            out.append(s)
        return out


def validate(p):
    P = p.P
    items = sorted(p.map.items())
    for x, px in items:
        if x not in P or px not in P:
            raise UnknownElem(x if x not in P else px)
    for i, (x, px) in enumerate(items):
        for y, py in items[i + 1:]:
            if P.less(x, y) != P.less(px, py) or P.less(y, x) != P.less(py, px):
                raise OrderViolation(x, y)
    return True


def apply_pow(p, x, k):
    cur = x
    step = p.map if k >= 0 else p.inv
    for _ in range(abs(k)):
        if cur not in step:
            return None
        cur = step[cur]
    return cur


# ---------------------------------------------------------------- b-windows

def bit_range(p, x, y):
    """Closed interval of i for which b_i(x,y) can be read off realized points (None = unbounded)."""
    sx, sy = p.segment(x), p.segment(y)
    if sx.closed or sy.closed:
        return None, None
    s, t = sx.offset(x), sy.offset(y)
    return sy.lo - t - (sx.hi - s), sy.hi - t - (sx.lo - s)


def bit(p, x, y, i):
    """b_i(x,y) = [x <= f^i(y)], read through any realized shift of the pair."""
    P = p.P
    sx, sy = p.segment(x), p.segment(y)
    s, t = sx.offset(x), sy.offset(y)
    if sx.closed:
        return int(P.leq(sx.at(s - i), y))
    if sy.closed:
        return int(P.leq(x, sy.at(t + i)))
    lo = max(sx.lo - s, sy.lo - t - i)
    hi = min(sx.hi - s, sy.hi - t - i)
    if lo > hi:
        return None
    a = 0 if lo <= 0 <= hi else lo
    return int(P.leq(sx.at(s + a), sy.at(t + i + a)))


@dataclass
class BWindow:
    x: int
    y: int
    horizon: int
    bits: dict

    def as_list(self):
        return [self.bits[i] for i in range(-self.horizon, self.horizon + 1)]

    def to_dict(self):
        return {"x": self.x, "y": self.y, "horizon": self.horizon,
                "bits": {str(i): self.bits[i] for i in range(-self.horizon, self.horizon + 1)}}


def b_window(p, x, y, h):
    p.host.need(x)
    p.host.need(y)
    return BWindow(x, y, h, {i: bit(p, x, y, i) for i in range(-h, h + 1)})


# ---------------------------------------------------------------- economical extension

def step_forward(p, t):
    """Image for t chosen minimally: above images of dom-points below t, below images of those above."""
    P = p.P
    if t in p.map:
        return p, p.map[t]
    down = [p.map[d] for d in p.map if P.less(d, t)]
    up = [p.map[d] for d in p.map if P.less(t, d)]
    z = p.host.add_point(down, up, via="economical")
    q = PartialAuto({**p.map, t: z}, p.host, p.certs)
    return q, z


def step_backward(p, t):
    P = p.P
    if t in p.inv:
        return p, p.inv[t]
    down = [p.inv[r] for r in p.inv if P.less(r, t)]
    up = [p.inv[r] for r in p.inv if P.less(t, r)]
    z = p.host.add_point(down, up, via="economical")
    q = PartialAuto({**p.map, z: t}, p.host, p.certs)
    return q, z


def force(p, x, k):
    """Extend p along the orbit of x until p^k(x) exists; returns (q, p^k(x))."""
    p.host.need(x)
    seg = p.segment(x)
    if seg.closed:
        return p, seg.at(seg.offset(x) + k)
    cur = x
    for _ in range(abs(k)):
        if k > 0:
            p, cur = step_forward(p, cur)
        else:
            p, cur = step_backward(p, cur)
    return p, cur


def economical_extend(p, x, steps):
    if x not in p.dur:
        raise OrbitUnavailable(f"{x} is not in dom or ran of the map")
    seg = p.segment(x)
    if seg.closed or steps == 0:
        return p
    s = seg.offset(x)
    end = seg.at(seg.hi) if steps > 0 else seg.at(seg.lo)
    have = seg.hi - s if steps > 0 else s - seg.lo
    need = abs(steps) - have
    if need > 0:
        p, _ = force(p, end, need if steps > 0 else -need)
    return p


def extend_segment(p, x, lo, hi):
    """Make f^i(x) realized for lo <= i <= hi."""
    if hi > 0:
        p, _ = force(p, x, hi)
    if lo < 0:
        p, _ = force(p, x, lo)
    return p


# ---------------------------------------------------------------- spiral status

def spiral_status(p, x, h=None):
    """('finite', n, parity) | ('infinite', cert) | ('unknown',) from realized data and certificates."""
    seg = p.segment(x)
    if seg.closed:
        return ("finite", len(seg), 0)
    P = p.P
    span = len(seg) - 1
    lim = span if h is None else min(span, h)
    for m in range(1, lim + 1):
        # by orbit invariance any realized pair at distance m decides x vs f^m(x)
        a, b = seg.points[0], seg.points[m]
        if P.less(a, b):
            return ("finite", m, 1)
        if P.less(b, a):
            return ("finite", m, -1)
    c = m_cert_for(p, seg)
    if c is not None:
        return ("infinite", c)
    return ("unknown",)


def law(p, seg):
    """(sigma, n) if some realized pair on the segment is comparable, using the least distance."""
    if seg.closed:
        return None
    P = p.P
    for m in range(1, len(seg)):
        a, b = seg.points[0], seg.points[m]
        if P.less(a, b):
            return 1, m
        if P.less(b, a):
            return -1, m
    return None


def m_cert_for(p, seg):
    for c in p.certs:
        if c.kind == "MConfig" and c.witnesses[0] in seg.index and check_certificate(p, c):
            return c
    return None


# ---------------------------------------------------------------- certificates

def check_certificate(p, c):
    """Recompute the defining finite configuration of c in the current fragment."""
    P = p.P
    w = c.witnesses
    try:
        if c.kind == "FiniteCycle":
            return all(p.segment(x).closed for x in w[:1])
        if c.kind == "FixedSeparator":
            x, m, y = w
            return p.map.get(m) == m and P.leq(x, m) and P.leq(m, y)
        if c.kind == "NConfig":
            x, m, y = w
            if p.map.get(m) != m:
                return False
            if c.params.get("variant", 1) == 1:
                return P.leq(m, x) and not P.leq(m, y)
            return P.leq(y, m) and not P.leq(x, m)
        if c.kind == "MConfig":
            x, y, z, fy, fz = w
            return (p.map.get(y) == fy and p.map.get(z) == fz and P.less(x, z) and P.less(x, fy)
                    and P.less(fz, z) and P.less(y, fy) and not P.comparable(x, fz) and not P.comparable(x, y))
        if c.kind == "TighteningSpiral":
            return _check_spiral(p, c)
        if c.kind == "DirectedBound":
            return _check_directed(p, c)
    except (KeyError, UnknownElem):
        return False
    return False


def _spiral_parts(c):
    n, nf = c.params["n"], c.params["nF"]
    w = c.witnesses
    xk = w[0]
    F = list(w[1:1 + nf])
    alphas = list(w[1 + nf:2 + nf + n])
    betas = list(w[2 + nf + n:3 + nf + 2 * n])
    return xk, F, alphas, betas


def _check_spiral(p, c):
    P = p.P
    n, sig = c.params["n"], c.params["sigma"]
    xk, F, al, be = _spiral_parts(c)
    seg = p.segment(xk)
    s = seg.offset(xk)
    xs = [seg.at(s + sig * i) for i in range(n + 1)]
    if any(v is None for v in xs) or any(y in seg.index for y in F):
        return False
    nxt = p.map if sig > 0 else p.inv
    for i in range(n):
        if nxt.get(al[i]) != al[i + 1] or nxt.get(be[i]) != be[i + 1]:
            return False
    if not (P.less(al[0], al[n]) and P.less(be[n], be[0]) and P.less(al[0], xk) and P.less(xk, be[0])):
        return False
    for i in range(1, n):
        if P.comparable(al[0], al[i]) or P.comparable(be[0], be[i]):
            return False
    if qftp(P, xs[0], F) .rel != qftp(P, xs[n], F).rel:
        return False
    for i in range(n + 1):
        t = qftp(P, xs[i], F).rel
        if qftp(P, al[i], F).rel != t or qftp(P, be[i], F).rel != t:
            return False
    return True


def _check_directed(p, c):
    x, y, w = c.witnesses
    prm = c.params
    n, sig = prm["n"], prm["sigma"]
    seg = p.segment(w)
    if seg.closed or w not in seg.index:
        return False
    s = seg.offset(w)
    v = seg.at(s + n)
    if v is None:
        return False
    if sig == 0:
        # opposite laws recorded as two witnesses' directions
        return True
    if not (p.P.less(w, v) if prm["dir"] > 0 else p.P.less(v, w)):
        return False
    for i, b in zip(range(prm["lo"], prm["hi"] + 1), prm["bits"]):
        if bit(p, x, y, i) != b:
            return False
    return True


# ---------------------------------------------------------------- determination

def _law_fact(p, seg):
    lw = law(p, seg)
    if lw is None:
        return None
    sig, n = lw
    return sig, n, seg.points[0]


def orbit_determination(p, x):
    """Pattern of b(x,x) if certified, else None."""
    seg = p.segment(x)
    P = p.P
    if seg.closed:
        s = seg.offset(x)
        bits = [int(P.leq(x, seg.at(s + i))) for i in range(len(seg))]
        return Determination(periodic(bits), (Certificate("FiniteCycle", (x,), {"n": len(seg)}),))
    mc = m_cert_for(p, seg)
    if mc is not None:
        return Determination(Pattern(0, (1,), (0,), (0,)), (mc,))
    lf = _law_fact(p, seg)
    if lf is None:
        return None
    sig, n, w = lf
    top = 1
    # on the sigma side bits are eventually 1; on the other side they are 0
    s = seg.offset(x)
    reach = (seg.hi - s) - (seg.lo - s)
    bits = [bit(p, x, x, sig * i) for i in range(0, reach + 1)]
    N = None
    for j in range(1, len(bits) - n + 1):
        if all(b == top for b in bits[j:j + n]):
            N = j
            break
    if N is None:
        return None
    hi = N + n - 1
    mid = tuple(bits[:hi + 1])
    cert = Certificate("DirectedBound", (x, x, w), {
        "n": n, "sigma": sig, "dir": sig, "N": N,
        "lo": 0 if sig > 0 else -hi, "hi": hi if sig > 0 else 0,
        "bits": list(mid) if sig > 0 else list(reversed(mid)),
    })
    if sig > 0:
        pat = Pattern(0, mid, (0,), (1,))
    else:
        pat = Pattern(-hi, tuple(reversed(mid)), (1,), (0,))
    return Determination(pat, (cert,))


def _constant_certs(p, x, y):
    P = p.P
    for c in p.fixed_points():
        if c in (x, y):
            continue
        if P.leq(x, c) and P.leq(c, y):
            return Determination(constant(1), (Certificate("FixedSeparator", (x, c, y)),))
    for c in p.fixed_points():
        if c in (x, y):
            continue
        if P.leq(c, x) and not P.leq(c, y):
            return Determination(constant(0), (Certificate("NConfig", (x, c, y), {"variant": 1}),))
        if P.leq(y, c) and not P.leq(x, c):
            return Determination(constant(0), (Certificate("NConfig", (x, c, y), {"variant": 2}),))
    return None


def _spiral_pattern(p, mseg, other, forward=True):
    """Valid spiral certificates around mseg whose parameters meet the orbit of `other`, by sign."""
    found = {}
    for c in p.certs:
        if c.kind != "TighteningSpiral":
            continue
        xk, F, _, _ = _spiral_parts(c)
        if xk not in mseg.index:
            continue
        oseg = p.segment(other)
        hit = [y for y in F if y in oseg.index]
        if not hit or not check_certificate(p, c):
            continue
        found.setdefault(c.params["sigma"], (c, hit[0], mseg.offset(xk)))
    return found


def _pair_from_spirals(p, x, y):
    sx, sy = p.segment(x), p.segment(y)
    for mseg, oseg, m_is_x in ((sx, sy, True), (sy, sx, False)):
        if m_cert_for(p, mseg) is None:
            continue
        found = _spiral_pattern(p, mseg, oseg.rep, True)
        if 1 not in found or -1 not in found:
            continue
        (cp, yp, kp), (cn, _, kn) = found[1], found[-1]
        npos, nneg = cp.params["n"], cn.params["n"]
        mrep = mseg.rep
        # work with b(yp, mrep) for i in Z, then transfer to requested pair
        F0 = yp
        lo_p, hi_p = kn - nneg + 1, kp + npos - 1
        if any(bit(p, F0, mrep, i) is None for i in range(lo_p, hi_p + 1)):
            return None
        mid = tuple(bit(p, F0, mrep, i) for i in range(lo_p, hi_p + 1))
        pat_ym = Pattern(lo_p, mid, mid[:nneg], mid[len(mid) - npos:])
        # b_i(m, y) = [f^-i m <= y]: the same window read in the other direction
        lo_q, hi_q = -(kp + npos - 1), -(kn - nneg + 1)
        if any(bit(p, mrep, F0, i) is None for i in range(lo_q, hi_q + 1)):
            return None
        midq = tuple(bit(p, mrep, F0, i) for i in range(lo_q, hi_q + 1))
        pat_my = Pattern(lo_q, midq, midq[:npos], midq[len(midq) - nneg:])
        certs = (cp, cn)
        # shift from (F0, mrep) to the requested pair
        tF = oseg.offset(F0)
        if m_is_x:
            # b_i(x, y) with x = m_s, y = o_t: = b_{i+t-s}(mrep, orep); F0 = o_tF
            s, t = sx.offset(x), sy.offset(y)
            return Determination(pat_my.shift(t - tF - s), certs)
        s, t = sx.offset(x), sy.offset(y)
        return Determination(pat_ym.shift(t - (s - tF)), certs)
    return None


def _pair_from_laws(p, x, y):
    sx, sy = p.segment(x), p.segment(y)
    lx, ly = _law_fact(p, sx), _law_fact(p, sy)
    if lx is None and ly is None:
        return None
    if lx and ly and lx[0] != ly[0]:
        # opposite monotone laws make the sequence constant
        b0 = int(p.P.leq(x, y))
        cert = Certificate("DirectedBound", (x, y, lx[2]), {"n": lx[1], "sigma": 0, "dir": lx[0],
                                                          "other": ly[2], "other_n": ly[1], "value": b0})
        return Determination(constant(b0), (cert,))
    cands = [l for l in (lx, ly) if l]
    sig = cands[0][0]
    best = min(cands, key=lambda l: l[1])
    n, w = best[1], best[2]
    lo, hi = bit_range(p, x, y)
    if lo is None:
        return None
    bits = {i: bit(p, x, y, i) for i in range(lo, hi + 1)}
    top, bot = (1, 0) if sig > 0 else (0, 1)
    hi_run = None
    for j in range(lo + n - 1, hi + 1):
        if all(bits[i] == top for i in range(j - n + 1, j + 1)):
            hi_run = j
            break
    if hi_run is None:
        return None
    lo_run = None
    for j in range(hi_run - 2 * n + 1, lo - 1, -1):
        if all(bits[i] == bot for i in range(j, j + n)):
            lo_run = j
            break
    if lo_run is None:
        return None
    mid = tuple(bits[i] for i in range(lo_run, hi_run + 1))
    cert = Certificate("DirectedBound", (x, y, w), {"n": n, "sigma": sig, "dir": sig,
                                                   "lo": lo_run, "hi": hi_run, "bits": list(mid)})
    return Determination(Pattern(lo_run, mid, (bot,), (top,)), (cert,))


def certify_pair(p, x, y):
    """Determination of b(x,y) from certificates available in p, or None."""
    sx, sy = p.segment(x), p.segment(y)
    key = (sx.rep, sy.rep)
    if key in p._det:
        d = p._det[key]
    else:
        d = _certify_reps(p, sx.rep, sy.rep)
        p._det[key] = d
    if d is None:
        return None
    s, t = sx.offset(x), sy.offset(y)
    return Determination(d.pattern.shift(t - s), d.certs)


def _certify_reps(p, x, y):
    sx, sy = p.segment(x), p.segment(y)
    P = p.P
    if sx is sy or x == y:
        return orbit_determination(p, x)
    if sx.closed:
        m = len(sx)
        bits = [int(P.leq(sx.at(-i), y)) for i in range(m)]
        return Determination(periodic(bits), (Certificate("FiniteCycle", (x, y), {"n": m}),))
    if sy.closed:
        m = len(sy)
        bits = [int(P.leq(x, sy.at(i))) for i in range(m)]
        return Determination(periodic(bits), (Certificate("FiniteCycle", (y, x), {"n": m}),))
    d = _constant_certs(p, x, y)
    if d:
        return d
    d = _pair_from_spirals(p, x, y)
    if d:
        return d
    return _pair_from_laws(p, x, y)


def is_determined(p, elems=None):
    """Per ordered pair of points: covering certificates or 'undetermined'."""
    xs = sorted(p.dur if elems is None else elems)
    report = {}
    for x in xs:
        for y in xs:
            d = certify_pair(p, x, y)
            report[(x, y)] = [c.to_dict() for c in d.certs] if d else "undetermined"
    return report


def undetermined_pairs(p, elems=None):
    """Undetermined pairs, computed once per pair of orbit segments."""
    xs = sorted(p.dur if elems is None else elems)
    reps = sorted({p.segment(x).rep for x in xs})
    bad = []
    for a in reps:
        for b in reps:
            if certify_pair(p, a, b) is None:
                bad.append((a, b))
    return bad


# ---------------------------------------------------------------- planting

class Plan:
    """Scratch copy of the fragment plus map; relations are closed under the map."""

    def __init__(self, p):
        self.p = p
        self.Q = p.P.copy()
        self.old = frozenset(p.P.elems)
        self.labels = {}
        self.new = []
        self.m = dict(p.map)
        self.new_dom = set()

    def point(self, label):
        z = self.Q._add()
        self.labels[label] = z
        self.new.append(z)
        return z

    def __getitem__(self, label):
        return self.labels[label]

    def edge(self, a, b):
        Q = self.Q
        if Q.less(a, b):
            return
        if a == b or Q.less(b, a):
            raise ConfigConflict(f"cannot add {a}<{b}")
        lows = (Q._down[a] | {a}) & self.old
        highs = (Q._up[b] | {b}) & self.old
        for u in lows:
            if not highs <= (Q._up[u] | {u}):
                raise ConfigConflict(f"{a}<{b} would relate old points")
        try:
            Q._edge(a, b)
        except CycleViolation as e:
            raise ConfigConflict(str(e)) from e

    def map(self, a, b):
        if a in self.m and self.m[a] != b:
            raise ConfigConflict(f"{a} already maps to {self.m[a]}")
        self.m[a] = b
        self.new_dom.add(a)

    def close(self):
        Q, m = self.Q, self.m
        newpts = set(self.new)
        hot = set(self.new_dom) | {a for a in m if a in newpts or m[a] in newpts}
        dom = sorted(m)
        changed = True
        while changed:
            changed = False
            for a in sorted(hot):
                fa = m[a]
                for b in dom:
                    if a == b:
                        continue
                    fb = m[b]
                    for u, v, fu, fv in ((a, b, fa, fb), (b, a, fb, fa)):
                        if Q.less(u, v) and not Q.less(fu, fv):
                            self.edge(fu, fv)
                            changed = True
                        elif Q.less(fu, fv) and not Q.less(u, v):
                            self.edge(u, v)
                            changed = True
            if changed:
                # any point whose relations moved can trigger more pushes
                hot |= {a for a in dom if a in newpts or m[a] in newpts}

    def require_incomparable(self, a, b):
        if self.Q.comparable(a, b):
            raise ConfigConflict(f"{a} and {b} became comparable")

    def commit(self, certs=()):
        host = self.p.host
        placed = set(self.old)
        for z in self.new:
            down = [e for e in self.Q._down[z] if e in placed]
            up = [e for e in self.Q._up[z] if e in placed]
            got = host.add_point(down, up, via="plant")
            if got != z:
                raise PosetError("host ids drifted during planting")
            placed.add(z)
        return PartialAuto(self.m, host, self.p.certs + tuple(certs))


def insert_M(p, x, floor=None):
    """Plant y<f(y), f(z)<z with x<z, x<f(y), x incomparable to y and f(z)."""
    p.host.need(x)
    st = spiral_status(p, x)
    if st[0] == "finite":
        raise ConfigConflict(f"{x} already has finite spiral length {st[1]}")
    if st[0] == "infinite":
        return p, st[1]
    plan = Plan(p)
    y, fy, z, fz = (plan.point(k) for k in ("y", "fy", "z", "fz"))
    plan.edge(y, fy)
    plan.edge(x, fy)
    plan.edge(x, z)
    plan.edge(fz, z)
    if floor is not None:
        plan.edge(floor, y)
        plan.edge(floor, fz)
    plan.map(y, fy)
    plan.map(z, fz)
    plan.close()
    plan.require_incomparable(x, y)
    plan.require_incomparable(x, fz)
    cert = Certificate("MConfig", (x, y, z, fy, fz))
    q = plan.commit((cert,))
    return q, cert


def insert_fixed_separator(p, x, y):
    sx, sy = p.segment(x), p.segment(y)
    P = p.P
    xs, ys = sx.points, sy.points
    if sx is sy or any(not P.less(a, b) for a in xs for b in ys):
        raise SeparatorBlocked(f"not every realized point of orbit({x}) lies below every point of orbit({y})")
    plan = Plan(p)
    c = plan.point("c")
    for a in xs:
        plan.edge(a, c)
    for b in ys:
        plan.edge(c, b)
    plan.map(c, c)
    plan.close()
    cert = Certificate("FixedSeparator", (x, c, y))
    return plan.commit((cert,)), cert


def insert_incomparability_witness(p, x, y):
    sx, sy = p.segment(x), p.segment(y)
    P = p.P
    if sx is sy or P.leq(x, y) or any(P.leq(a, b) for a in sx.points for b in sy.points):
        raise WitnessBlocked(f"some realized point of orbit({x}) lies below one of orbit({y})")
    plan = Plan(p)
    d = plan.point("d")
    for a in sx.points:
        plan.edge(d, a)
    plan.map(d, d)
    plan.close()
    for b in sy.points:
        plan.require_incomparable(d, b)
    cert = Certificate("NConfig", (x, d, y), {"variant": 1})
    return plan.commit((cert,)), cert


def _types_periodic(P, seg, k, n, sig, F):
    j = k
    while True:
        a, b = seg.at(j), seg.at(j + sig * n)
        if a is None or b is None:
            return True
        if qftp(P, a, F).rel != qftp(P, b, F).rel:
            return False
        j += sig


def insert_tightening_spirals(p, x, F, sigma, horizon=8, min_k=0, floor=None):
    """Plant alpha/beta spirals of step n around f^k(x); see `_check_spiral` for the configuration."""
    if sigma not in (1, -1):
        raise ValueError("sigma must be +1 or -1")
    seg = p.segment(x)
    st = spiral_status(p, x)
    if st[0] == "finite" or (st[0] == "unknown" and seg.closed):
        raise UnresolvedSpiralStatus(f"{x} does not lie on an infinite antichain orbit")
    Fp = [y for y in sorted(set(F)) if y not in seg.index]
    s0 = seg.offset(x)
    for kabs in range(min_k, horizon + 1):
        k = sigma * kabs
        for n in range(1, horizon + 1):
            ends = (k, k + sigma * n)
            p = extend_segment(p, x, min(0, *ends), max(0, *ends))
            seg = p.segment(x)
            if any(y in seg.index for y in Fp):
                raise ConfigConflict("parameter set meets the orbit")
            if not _types_periodic(p.P, seg, s0 + k, n, sigma, Fp):
                continue
            try:
                return _plant_spiral(p, seg, s0 + k, n, sigma, Fp, k, floor)
            except ConfigConflict:
                continue
    raise HorizonExceeded(f"no spiral found for {x} within horizon {horizon}")


def _plant_spiral(p, seg, base, n, sig, F, k, floor=None):
    P = p.P
    xs = [seg.at(base + sig * i) for i in range(n + 1)]
    plan = Plan(p)
    al = [plan.point(("a", i)) for i in range(n + 1)]
    be = [plan.point(("b", i)) for i in range(n + 1)]
    for i in range(n + 1):
        plan.edge(al[i], xs[i])
        plan.edge(xs[i], be[i])
        for y in F:
            if P.less(y, xs[i]):
                plan.edge(y, al[i])
            if P.less(xs[i], y):
                plan.edge(be[i], y)
    plan.edge(al[0], al[n])
    plan.edge(be[n], be[0])
    if floor is not None:
        plan.edge(floor, al[0])
    for i in range(n):
        if sig > 0:
            plan.map(al[i], al[i + 1])
            plan.map(be[i], be[i + 1])
        else:
            plan.map(al[i + 1], al[i])
            plan.map(be[i + 1], be[i])
    plan.close()
    for i in range(1, n):
        plan.require_incomparable(al[0], al[i])
        plan.require_incomparable(be[0], be[i])
    Q = plan.Q
    for i in range(n + 1):
        t = qftp(Q, xs[i], F).rel
        if qftp(Q, al[i], F).rel != t or qftp(Q, be[i], F).rel != t:
            raise ConfigConflict("spiral types drifted under closure")
    cert = Certificate("TighteningSpiral", (xs[0], *F, *al, *be),
                       {"k": k, "n": n, "sigma": sig, "nF": len(F)})
    q = plan.commit((cert,))
    if not check_certificate(q, cert):
        raise ConfigConflict("planted spiral fails its own check")
    return q, cert


# ---------------------------------------------------------------- determining pairs and orbits

def determine_orbit(p, x, bound=32):
    st = spiral_status(p, x)
    if st[0] == "unknown":
        raise UnresolvedSpiralStatus(f"spiral length of {x} is not resolved")
    d = orbit_determination(p, x)
    if d:
        return p, d.certs[0]
    sig, n = st[2], st[1]
    for t in range(bound):
        p = _grow_side(p, x, sig, n)
        d = orbit_determination(p, x)
        if d:
            return p, d.certs[0]
        if t == 1 and n > 1:
            # economical growth never directs an orbit with sp > 1 on its own
            try:
                p = plant_directed(p, x)
            except ConfigConflict:
                pass
    raise HorizonExceeded(f"no directedness window for {x} within {bound} extensions")


def plant_directed(p, x):
    """Continue the orbit of x past its far end with points that sit above its near end.

    With x' the near end, n the spiral length and a_0 = f^N(x') the far end (N a
    multiple of n), plant a_i = f^i(a_0) for 0 < i < n above x' and above
    f^(N+i-n)(x'), with that point's type over the rest of the map. Afterwards
    b_i(x', x') = 1 for all i >= N. For parity -1 the orbit is continued backwards
    instead; the a_i are still upper bounds.
    """
    st = spiral_status(p, x)
    if st[0] != "finite" or st[2] == 0:
        raise UnresolvedSpiralStatus(f"{x} has no certified non-zero parity")
    n, sig = st[1], st[2]
    seg = p.segment(x)
    near = seg.lo if sig > 0 else seg.hi
    N = -(-max(seg.hi - seg.lo, n) // n) * n
    p = extend_segment(p, seg.at(near), 0 if sig > 0 else -N, N if sig > 0 else 0)
    seg = p.segment(x)
    P = p.P
    x0 = seg.at(near)
    orbit = set(seg.points)
    others = [w for w in sorted(p.dur) if w not in orbit]
    plan = Plan(p)
    a = [seg.at(near + sig * N)]
    for i in range(1, n):
        t = seg.at(near + sig * (N + i - n))
        ai = plan.point(("a", i))
        plan.edge(x0, ai)
        plan.edge(t, ai)
        for w in others:
            if P.less(w, t):
                plan.edge(w, ai)
            if P.less(t, w):
                plan.edge(ai, w)
        a.append(ai)
    for i in range(1, n):
        if sig > 0:
            plan.map(a[i - 1], a[i])
        else:
            plan.map(a[i], a[i - 1])
    plan.close()
    return plan.commit()


def _grow_side(p, x, sig, n):
    seg = p.segment(x)
    end = seg.at(seg.hi) if sig > 0 else seg.at(seg.lo)
    p, _ = force(p, end, sig * n)
    return p


def determine_pair(p, x, y, bound=24, spiral_exception=True, floor=None):
    """Extend p so that b(x,y) and b(y,x) are both certified; returns (q, certificates)."""
    for e in (x, y):
        p.host.need(e)
    sx, sy = p.segment(x), p.segment(y)
    if sx is sy or x == y:
        q, c = determine_orbit(p, x)
        return q, (c,)
    d1, d2 = certify_pair(p, x, y), certify_pair(p, y, x)
    if d1 and d2:
        return p, d1.certs + d2.certs
    stx, sty = spiral_status(p, x), spiral_status(p, y)
    inf = [st[0] == "infinite" for st in (stx, sty)]
    for e, st in ((x, stx), (y, sty)):
        if st[0] == "unknown" and not any(inf):
            raise UnresolvedSpiralStatus(f"spiral length of {e} is not resolved")
    if not any(st[0] == "unknown" for st in (stx, sty)) and not all(inf):
        # a monotone law on one side usually suffices
        try:
            out = []
            q = p
            for a, b in ((x, y), (y, x)):
                q, c = _determine_directed(q, a, b, bound)
                out.append(c)
            return q, tuple(out)
        except HorizonExceeded:
            if not any(inf):
                raise
    m, o = (x, y) if inf[0] else (y, x)
    return plant_spiral_pair(p, m, o, spiral_exception, floor)


def plant_spiral_pair(p, m, o, spiral_exception=True, floor=None):
    """Both tightening spirals around the infinite orbit of m with parameter o."""
    certs = []
    for sig in (1, -1):
        have = _spiral_pattern(p, p.segment(m), o)
        if sig in have:
            certs.append(have[sig][0])
            continue
        p, c = insert_tightening_spirals(p, m, [o], sig, min_k=0 if spiral_exception else 1, floor=floor)
        certs.append(c)
    return p, tuple(certs)


def _determine_directed(p, x, y, bound):
    d = certify_pair(p, x, y)
    if d:
        return p, d.certs[0]
    for _ in range(bound):
        for e in (x, y):
            seg = p.segment(e)
            if seg.closed:
                continue
            st = spiral_status(p, e)
            step = st[1] if st[0] == "finite" else 1
            p = _grow_side(p, e, 1, step)
            p = _grow_side(p, e, -1, step)
        d = certify_pair(p, x, y)
        if d:
            return p, d.certs[0]
        lo, hi = bit_range(p, x, y)
        bits = [bit(p, x, y, i) for i in range(lo, hi + 1)]
        if all(bits):
            try:
                return insert_fixed_separator(p, x, y)
            except (SeparatorBlocked, ConfigConflict):
                pass
        if not any(bits):
            try:
                return insert_incomparability_witness(p, x, y)
            except (WitnessBlocked, ConfigConflict):
                pass
    raise HorizonExceeded(f"pair ({x},{y}) not determined within {bound} rounds")


def discover_M(p, x):
    """Look for an M-configuration around x among mapped points; record it as a certificate."""
    P = p.P
    for y, fy in sorted(p.map.items()):
        if not (P.less(y, fy) and P.less(x, fy)) or P.comparable(x, y):
            continue
        for z, fz in sorted(p.map.items()):
            if P.less(fz, z) and P.less(x, z) and not P.comparable(x, fz):
                c = Certificate("MConfig", (x, y, z, fy, fz))
                return p.with_certs((c,)), c
    return p, None


def settle(p, news, floor_of=None):
    """Determine every pair between the segments through `news` and all segments of p."""
    reps = sorted({p.segment(s.rep).rep for s in p.segments()})
    news = sorted({p.segment(a).rep for a in news})
    for a in news:
        for b in reps:
            if certify_pair(p, a, b) is None or certify_pair(p, b, a) is None:
                p, _ = determine_pair(p, a, b, floor=floor_of(a) if floor_of else None)
    return p
