"""Spiral length, orbitals and the strong/weak orbital orders, gated on certificates."""

from dataclasses import dataclass

from .partial_autos import (
    Certificate,
    ConfigConflict,
    PartialAuto,
    Plan,
    bit,
    certify_pair,
    discover_M,
    extend_segment,
    orbit_determination,
    settle,
    spiral_status,
)
from .poset_core import FinPoset, PosetError, UnknownElem, is_embedding

DEFAULT_HORIZON = 16


class HypothesisViolation(PosetError):
    def __init__(self, a, b, why):
        super().__init__(f"orbitals of {a} and {b}: {why}")
        self.a, self.b, self.why = a, b, why


class ParityZero(PosetError):
    pass


class UnresolvedPair(PosetError):
    def __init__(self, x, y):
        super().__init__(f"orbital relation between {x} and {y} is not certified")
        self.x, self.y = x, y


@dataclass(frozen=True)
class SpiralReport:
    status: str  # Finite | InfiniteCertified | UnknownAtHorizon
    n: int = None
    parity: int = None
    cert: Certificate = None
    horizon: int = None

    def to_dict(self):
        d = {"status": self.status}
        if self.status == "Finite":
            d.update(n=self.n, parity=self.parity)
        elif self.status == "InfiniteCertified":
            d["cert"] = self.cert.to_dict()
        else:
            d["horizon"] = self.horizon
        return d


@dataclass(frozen=True)
class OrbitalRef:
    rep: int
    horizon: int = DEFAULT_HORIZON


@dataclass(frozen=True)
class OrderVerdict:
    relation: str  # StrongLess | WeakLeqNotStrong | NotWeakLeq | Unknown
    cert: tuple = ()

    def to_dict(self):
        return {"relation": self.relation, "certs": [c.to_dict() for c in self.cert]}


@dataclass(frozen=True)
class Same:
    answer: str  # Yes | No | Unknown
    i: int = None
    j: int = None
    cert: tuple = ()

    def to_dict(self):
        d = {"answer": self.answer}
        if self.answer == "Yes":
            d.update(i=self.i, j=self.j)
        if self.cert:
            d["certs"] = [c.to_dict() for c in self.cert]
        return d


def _top(g):
    return g if isinstance(g, PartialAuto) else g.top


def _store(g, q):
    if not isinstance(g, PartialAuto):
        g.push(q)
    return q


def _rep(X):
    return X.rep if isinstance(X, OrbitalRef) else X


# ---------------------------------------------------------------- spiral length

def spiral_length(g, x, h=DEFAULT_HORIZON):
    p = _top(g)
    p.host.need(x)
    st = spiral_status(p, x, h)
    if st[0] == "finite":
        return SpiralReport("Finite", st[1], st[2])
    if st[0] == "infinite":
        return SpiralReport("InfiniteCertified", cert=st[1])
    return SpiralReport("UnknownAtHorizon", horizon=h)


# ---------------------------------------------------------------- orbitals

def _is_zero(pat):
    return not any(pat.mid) and not any(pat.left) and not any(pat.right)


def _is_one(pat):
    return all(pat.mid) and all(pat.left) and all(pat.right)


def same_orbital(g, x, y, h=DEFAULT_HORIZON):
    p = _top(g)
    p.host.need(x)
    p.host.need(y)
    if x == y:
        return Same("Yes", 0, 0)
    dxy, dyx = certify_pair(p, x, y), certify_pair(p, y, x)
    for d in (dxy, dyx):
        if d is not None and _is_zero(d.pattern):
            return Same("No", cert=d.certs)

    # f^i(x) <= y  iff  b_{-i}(x,y) = 1;   y <= f^j(x)  iff  b_j(y,x) = 1
    def val(d, a, b, i):
        return d.pattern(i) if d is not None else bit(p, a, b, i)

    # certified patterns are exact everywhere, so look past h up to their periodic tails
    r = h
    for d in (dxy, dyx):
        if d is not None:
            pat = d.pattern
            r = max(r, abs(pat.lo) + len(pat.left), abs(pat.hi) + len(pat.right))
    lows = [i for i in range(-r, r + 1) if val(dxy, x, y, -i) == 1]
    highs = [j for j in range(-r, r + 1) if val(dyx, y, x, j) == 1]
    if lows and highs:
        i, j = min(((i, j) for i in lows for j in highs), key=lambda t: (abs(t[0] - t[1]), abs(t[0]), t[0]))
        return Same("Yes", i, j)
    return Same("Unknown")


def orbital_order(g, X, Y):
    p = _top(g)
    x, y = _rep(X), _rep(Y)
    p.host.need(x)
    p.host.need(y)
    d = certify_pair(p, x, y)
    if d is None:
        return OrderVerdict("Unknown")
    if _is_zero(d.pattern):
        return OrderVerdict("NotWeakLeq", d.certs)
    if _is_one(d.pattern) and x != y:
        return OrderVerdict("StrongLess", d.certs)
    return OrderVerdict("WeakLeqNotStrong", d.certs)


def quotient_fragment(g, S, h=DEFAULT_HORIZON):
    """Strong-order poset on orbital representatives (least ids) of the points in S."""
    S = sorted(set(S))
    classes = []
    for x in S:
        for cl in classes:
            r = same_orbital(g, cl[0], x, h)
            if r.answer == "Yes":
                cl.append(x)
                break
            if r.answer == "Unknown":
                raise UnresolvedPair(cl[0], x)
        else:
            classes.append([x])
    reps = [min(cl) for cl in classes]
    lt = []
    for a in reps:
        for b in reps:
            if a == b:
                continue
            v = orbital_order(g, a, b)
            if v.relation == "Unknown":
                raise UnresolvedPair(a, b)
            if v.relation == "StrongLess":
                lt.append((a, b))
    Q = FinPoset(reps, lt)
    Q.check_invariants()
    return Q


def orbital_label(g, x, h=DEFAULT_HORIZON):
    r = spiral_length(g, x, h)
    if r.status == "Finite":
        return f"{x}: parity {r.parity:+d}, sp {r.n}" if r.parity else f"{x}: parity 0, sp {r.n}"
    if r.status == "InfiniteCertified":
        return f"{x}: parity 0, sp inf"
    return f"{x}: sp unknown"


# ---------------------------------------------------------------- sandwich

def _check_sandwich(g, A, B, C):
    pts = list(A) + list(B) + list(C)
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            if same_orbital(g, a, b).answer != "No":
                raise HypothesisViolation(a, b, "not certified as distinct orbitals")
    for a in A:
        for b in B:
            if orbital_order(g, a, b).relation != "StrongLess":
                raise HypothesisViolation(a, b, "strong order not certified")
    for c in C:
        for a in A:
            if orbital_order(g, c, a).relation != "NotWeakLeq":
                raise HypothesisViolation(c, a, "C-orbital is not certified weakly incomparable below")
        for b in B:
            if orbital_order(g, b, c).relation != "NotWeakLeq":
                raise HypothesisViolation(b, c, "C-orbital is not certified weakly incomparable above")


def sandwich_orbitals(g, A, B, C, Q, pQ):
    """Realize (Q, pQ) strictly between the A- and B-orbitals, away from the C-orbitals.

    Fixed points a_x above each A-orbit and b_y below each B-orbit hold the copy in
    place; a fixed floor e and ceiling u around the copy certify that it is
    incomparable to C. Returns the embedding Q -> fragment.
    """
    pQ = dict(getattr(pQ, "map", pQ))
    A, B, C = sorted(A), sorted(B), sorted(C)
    for k, v in pQ.items():
        if k not in Q or v not in Q:
            raise UnknownElem(k if k not in Q else v)
    if not is_embedding(Q.restrict(pQ), Q, dict(pQ)) and pQ:
        raise HypothesisViolation(None, None, "pQ is not a partial automorphism of Q")
    items = sorted(pQ.items())
    for i, (a, fa) in enumerate(items):
        for b, fb in items[i + 1:]:
            if Q.less(a, b) != Q.less(fa, fb) or Q.less(b, a) != Q.less(fb, fa):
                raise HypothesisViolation(a, b, "pQ does not preserve the order of Q")
    _check_sandwich(g, A, B, C)
    p = _top(g)
    plan = Plan(p)
    tops = []
    for x in A:
        ax = plan.point(("a", x))
        for w in p.segment(x).points:
            plan.edge(w, ax)
        plan.map(ax, ax)
        tops.append(ax)
    bots = []
    for y in B:
        by = plan.point(("b", y))
        for w in p.segment(y).points:
            plan.edge(by, w)
        plan.map(by, by)
        bots.append(by)
    e, u = plan.point("e"), plan.point("u")
    plan.edge(e, u)
    for ax in tops:
        plan.edge(ax, e)
    for by in bots:
        plan.edge(u, by)
    plan.map(e, e)
    plan.map(u, u)
    emb = {q: plan.point(("q", q)) for q in Q.elems}
    for q in Q.elems:
        plan.edge(e, emb[q])
        plan.edge(emb[q], u)
    for a, b in Q.lt_pairs():
        plan.edge(emb[a], emb[b])
    for a, b in pQ.items():
        plan.map(emb[a], emb[b])
    try:
        plan.close()
    except ConfigConflict as err:
        raise HypothesisViolation(None, None, f"copy cannot be closed under the map: {err}") from err
    for c in C:
        for w in p.segment(c).points:
            if plan.Q.leq(e, w) or plan.Q.leq(w, u):
                raise HypothesisViolation(c, None, "C-orbital is forced against the copy")
    for q in Q.elems:
        for r in Q.elems:
            if q != r and plan.Q.less(emb[q], emb[r]) != Q.less(q, r):
                raise HypothesisViolation(q, r, "closure changed the order of the copy")
    q_ = plan.commit()
    for q in Q.elems:
        w = emb[q]
        seg = q_.segment(w)
        if not seg.closed and spiral_status(q_, w)[0] == "unknown":
            q_, _ = discover_M(q_, w)
    q_ = settle(q_, list(emb.values()) + tops + bots + [e, u], lambda a: e if q_.P.less(e, a) else None)
    _store(g, q_)
    return emb


# ---------------------------------------------------------------- directedness and spiral ladders

def directedness_check(g, x, h=DEFAULT_HORIZON):
    p = _top(g)
    st = spiral_status(p, x)
    if st[0] == "finite" and st[2] == 0:
        raise ParityZero(f"{x} has parity 0")
    if st[0] != "finite":
        raise ParityZero(f"{x} has no certified non-zero parity")
    sig = st[2]
    d = orbit_determination(p, x)
    if d is None:
        p = extend_segment(p, x, -h if sig < 0 else 0, h if sig > 0 else 0)
        _store(g, p)
        d = orbit_determination(p, x)
    if d is None or d.certs[0].kind != "DirectedBound" or d.certs[0].params["N"] > h:
        return None
    return d.certs[0]


def _ladder(g, x, k, m, sig, length1=False, n=None):
    """Plant a_0..a_m next to f^k(x), f^(k+sig)(x), ... with f^sig(a_i) = a_(i+1).

    Returns a_0, or None when this stretch of the orbit cannot take the ladder.
    """
    p = _top(g)
    span = max(m, n or 0)
    p = extend_segment(p, x, min(0, k, k + sig * span), max(0, k, k + sig * span))
    seg = p.segment(x)
    s = seg.offset(x)
    if length1:
        # f^(k+n)(x) must be the far end of the realized orbit so that a_1 stays free above it
        k = (seg.hi - s if sig > 0 else seg.lo - s) - sig * n
    P = p.P
    orbit = set(seg.points)
    others = [w for w in sorted(p.dur) if w not in orbit]
    xs = [seg.at(s + k + sig * i) for i in range(span + 1)]
    # the copied types must already be constant along this stretch of the orbit
    t0 = [(P.less(w, xs[0]), P.less(xs[0], w)) for w in others]
    if any([(P.less(w, v), P.less(v, w)) for w in others] != t0 for v in xs[1:]):
        return None
    plan = Plan(p)
    top = m if not length1 else 1
    a = [plan.point(("a", i)) for i in range(top + 1)]

    for i in range(top + 1):
        for w in others:
            if P.less(w, xs[i]):
                plan.edge(w, a[i])
            if P.less(xs[i], w):
                plan.edge(a[i], w)
    # xs runs along f^sig, so the order relations are the same for both parities
    if length1:
        plan.edge(xs[0], a[0])
        plan.edge(a[0], xs[n])
        plan.edge(xs[1], a[1])
        plan.edge(a[0], a[1])
    else:
        for i in range(m + 1):
            plan.edge(xs[i], a[i])
        plan.edge(a[0], xs[m])
    for i in range(top):
        if sig > 0:
            plan.map(a[i], a[i + 1])
        else:
            plan.map(a[i + 1], a[i])
    try:
        plan.close()
        for i in range(1, top):
            plan.require_incomparable(a[0], a[i])
    except ConfigConflict:
        return None
    q = plan.commit()
    q = settle(q, a, lambda w: _floor(q, w))
    _store(g, q)
    return a[0]


def _floor(p, w):
    for c in p.fixed_points():
        if p.P.less(c, w):
            return c
    return None


def all_spiral_lengths_in_orbital(g, x, N, h=DEFAULT_HORIZON):
    """For m = 1..N plant a point of the orbital of x with spiral length m (same parity)."""
    p = _top(g)
    st = spiral_status(p, x)
    if st[0] != "finite" or st[2] == 0:
        raise ParityZero(f"{x} has no certified non-zero parity")
    dcert = directedness_check(g, x, h)
    if dcert is None:
        raise ParityZero(f"no directedness bound for {x} within horizon {h}")
    n, sig = st[1], st[2]
    base = x
    if n > 1:
        # a_0 < a_1 pulls back to f^(k-j)(x) < a_0 for j >= 1, so the upper anchor must sit
        # at least the directedness bound above f^k(x), not just n
        M = max(n, dcert.params["N"])
        base = None
        for k in range(0, h + len(_top(g).segment(x)) + 1):
            base = _ladder(g, x, sig * k, 1, sig, length1=True, n=M)
            if base is not None:
                break
        if base is None:
            raise ConfigConflict(f"no length-one point found next to {x} within horizon {h}")
    out = []
    for m in range(1, N + 1):
        w = None
        for k in range(0, h + len(_top(g).segment(base)) + 1):
            w = _ladder(g, base, sig * k, m, sig)
            if w is not None:
                break
        if w is None:
            raise ConfigConflict(f"spiral length {m} could not be planted within horizon {h}")
        out.append(w)
    return out


def admissible_complement(g, A, B, reps):
    """Reps outside the strong down/up sets of A/B that meet the weak-order sandwich hypotheses.

    An orbital z with z <=w a for some a in A (or b <=w z for b in B) cannot be kept strongly
    incomparable to a new orbital sitting strongly above A (below B): weak-then-strong
    composes to strong.
    """
    out, forced = [], []
    for z in reps:
        if z in A or z in B:
            continue
        if any(orbital_order(g, a, z).relation == "StrongLess" for a in A) or \
                any(orbital_order(g, z, b).relation == "StrongLess" for b in B) or \
                any(orbital_order(g, z, a).relation == "StrongLess" for a in A) or \
                any(orbital_order(g, b, z).relation == "StrongLess" for b in B):
            continue
        if all(orbital_order(g, z, a).relation == "NotWeakLeq" for a in A) and \
                all(orbital_order(g, b, z).relation == "NotWeakLeq" for b in B):
            out.append(z)
        else:
            forced.append(z)
    return out, forced
