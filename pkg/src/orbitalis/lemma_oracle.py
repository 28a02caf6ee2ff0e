"""Exhaustive small-instance checks of the finite order-theoretic lemmas.

Every check runs over all posets on at most `n_max` points together with all
of their automorphisms (or, for the lemmas about infinite behaviour, all
partial automorphisms realising the relevant configuration). On a finite
poset every automorphism has finite order, so the infinite statements are
only checked through their finite consequences; each report says so.
"""

from itertools import combinations, product
from math import lcm

from .poset_core import FinPoset, PosetError, canonical_form

MAX_N = 7


class SizeCap(PosetError):
    def __init__(self, n):
        super().__init__(f"enumeration supports n <= {MAX_N}, got {n}")


class UnknownLemmaId(PosetError):
    def __init__(self, name):
        super().__init__(f"unknown lemma id {name!r}; known: {', '.join(LEMMAS)}")


# ---------------------------------------------------------------- enumeration

def _extensions(P, z):
    """All ways to add point `z` to labelled poset P (down-closed D, up-closed U, D<U)."""
    xs = P.elems
    out = []
    for dbits in product((0, 1), repeat=len(xs)):
        D = {x for x, b in zip(xs, dbits) if b}
        if any(not P.down(d) <= D for d in D):
            continue
        rest = [x for x in xs if x not in D]
        for ubits in product((0, 1), repeat=len(rest)):
            U = {x for x, b in zip(rest, ubits) if b}
            if any(not P.up(u) <= U for u in U):
                continue
            if all(P.less(d, u) for d in D for u in U):
                out.append((D, U))
    return out


def _grow(P, z, D, U):
    Q = P.copy()
    Q._new(z)
    Q._down[z] = set(D)
    Q._up[z] = set(U)
    for d in D:
        Q._up[d].add(z)
    for u in U:
        Q._down[u].add(z)
    return Q


def labeled_by_extension(n):
    """Labelled posets on {0..n-1}: each arises once from its restriction to {0..n-2}."""
    level = [FinPoset()]
    for z in range(n):
        level = [_grow(P, z, D, U) for P in level for D, U in _extensions(P, z)]
    return level


def labeled_by_subsets(n):
    """Independent strategy: filter every relation subset for transitivity and antisymmetry."""
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    out = []
    for bits in product((0, 1), repeat=len(pairs)):
        rel = {p for p, b in zip(pairs, bits) if b}
        if any((b, a) in rel for a, b in rel):
            continue
        if any((a, c) not in rel for a, b in rel for b2, c in rel if b == b2 and a != c):
            continue
        out.append(FinPoset(range(n), rel))
    return out


_ISO_CACHE = {0: [FinPoset()]}


def iso_classes(n):
    if n in _ISO_CACHE:
        return _ISO_CACHE[n]
    seen = {}
    for P in iso_classes(n - 1):
        for D, U in _extensions(P, n - 1):
            Q = _grow(P, n - 1, D, U)
            key = canonical_form(Q)
            if key not in seen:
                seen[key] = Q
    _ISO_CACHE[n] = [seen[k] for k in sorted(seen)]
    return _ISO_CACHE[n]


def enumerate_posets(n, mode="labeled"):
    if n > MAX_N:
        raise SizeCap(n)
    if n < 0:
        raise ValueError("n must be non-negative")
    if mode == "labeled":
        yield from labeled_by_extension(n)
    elif mode in ("iso", "up-to-iso"):
        yield from iso_classes(n)
    else:
        raise ValueError(f"unknown mode {mode!r}")


def enumerate_autos(P):
    """All order automorphisms of P as dicts."""
    if len(P) > MAX_N:
        raise SizeCap(len(P))
    xs = P.elems
    sig = {x: (len(P.down(x)), len(P.up(x))) for x in xs}
    m, used = {}, set()

    def go(i):
        if i == len(xs):
            yield dict(m)
            return
        x = xs[i]
        for y in xs:
            if y in used or sig[y] != sig[x]:
                continue
            if all(P.less(x, a) == P.less(y, m[a]) and P.less(a, x) == P.less(m[a], y) for a in m):
                m[x] = y
                used.add(y)
                yield from go(i + 1)
                del m[x]
                used.discard(y)

    yield from go(0)


def partial_autos_extending(P, base):
    """All partial automorphisms of P containing `base`."""
    xs = P.elems
    free = [x for x in xs if x not in base]

    def ok(m, x, y):
        for a, b in m.items():
            if P.less(x, a) != P.less(y, b) or P.less(a, x) != P.less(b, y):
                return False
        return True

    def go(i, m, used):
        if i == len(free):
            yield dict(m)
            return
        yield from go(i + 1, m, used)
        x = free[i]
        for y in xs:
            if y not in used and ok(m, x, y):
                m[x] = y
                used.add(y)
                yield from go(i + 1, m, used)
                del m[x]
                used.discard(y)

    yield from go(0, dict(base), set(base.values()))


# ---------------------------------------------------------------- finite dynamics

class Dyn:
    """A finite poset with a total automorphism; powers are read off cycles."""

    def __init__(self, P, f):
        self.P, self.f = P, f
        self._orbital = {}
        self.cyc = {}
        for x in P.elems:
            if x in self.cyc:
                continue
            c, y = [], x
            while True:
                c.append(y)
                y = f[y]
                if y == x:
                    break
            for i, y in enumerate(c):
                self.cyc[y] = (c, i)
        self.order = lcm(*(len(c) for c, _ in self.cyc.values())) if P.elems else 1

    def pow(self, x, k):
        c, i = self.cyc[x]
        return c[(i + k) % len(c)]

    def orbit(self, x):
        return self.cyc[x][0]

    def leq(self, x, y):
        return self.P.leq(x, y)

    def sp(self, x):
        n = 1
        while True:
            y = self.pow(x, n)
            if self.P.comparable(x, y):
                return n
            n += 1

    def parity(self, x):
        y = self.pow(x, self.sp(x))
        if self.P.less(x, y):
            return 1
        if self.P.less(y, x):
            return -1
        return 0

    def b(self, x, y, i):
        return self.leq(x, self.pow(y, i))

    def bseq(self, x, y):
        return tuple(self.b(x, y, i) for i in range(self.order))

    def sim(self, x, y):
        r = range(self.order)
        return any(self.leq(self.pow(x, i), y) for i in r) and any(self.leq(y, self.pow(x, j)) for j in r)

    def orbital(self, x):
        if x not in self._orbital:
            self._orbital[x] = frozenset(y for y in self.P.elems if self.sim(x, y))
        return self._orbital[x]

    def strong(self, x, y):
        X, Y = self.orbital(x), self.orbital(y)
        return all(self.P.less(a, b) for a in X for b in Y)

    def weak(self, x, y):
        X, Y = self.orbital(x), self.orbital(y)
        return any(self.leq(a, b) for a in X for b in Y)

    def fixed(self, c):
        return self.f[c] == c


def instances(n_max, mode):
    for n in range(1, n_max + 1):
        for P in enumerate_posets(n, mode):
            for f in enumerate_autos(P):
                yield Dyn(P, f)


# ---------------------------------------------------------------- lemma checks
# each check yields counterexample witnesses (empty iterator means verified)

def _spiral_invariant(d, sp=None, par=None):
    sp = sp or (lambda d, x: d.sp(x))
    par = par or (lambda d, x: d.parity(x))
    for x in d.P.elems:
        for k in range(1, len(d.orbit(x))):
            y = d.pow(x, k)
            if sp(d, y) != sp(d, x) or par(d, y) != par(d, x):
                yield {"x": x, "k": k}


def _parity_orbital(d):
    for x, y in product(d.P.elems, repeat=2):
        if d.sim(x, y):
            if d.parity(x) != d.parity(y):
                yield {"x": x, "y": y}
            elif d.parity(x) == 0 and d.sp(x) != d.sp(y):
                yield {"x": x, "y": y, "sp": True}


def _interlacing(d):
    for x, y in product(d.P.elems, repeat=2):
        X, Y = d.orbital(x), d.orbital(y)
        inter = any(d.leq(a, b) for a in X for b in Y) and any(d.leq(b, a) for a in X for b in Y)
        if inter != d.sim(x, y):
            yield {"x": x, "y": y}


def _orbital_order(d):
    reps = sorted({min(d.orbital(x)) for x in d.P.elems})
    for a in reps:
        if d.strong(a, a):
            yield {"irreflexive": a}
        if not d.weak(a, a):
            yield {"reflexive": a}
    for a, b in product(reps, repeat=2):
        if a != b and d.weak(a, b) and d.weak(b, a):
            yield {"antisymmetric": (a, b)}
        if d.strong(a, b) and not d.weak(a, b):
            yield {"strong_implies_weak": (a, b)}
    for a, b, c in product(reps, repeat=3):
        if d.strong(a, b) and d.strong(b, c) and not d.strong(a, c):
            yield {"strong_transitive": (a, b, c)}
        if d.weak(a, b) and d.weak(b, c) and not d.weak(a, c):
            yield {"weak_transitive": (a, b, c)}


def _weaker_condition(d):
    r = range(d.order)
    P = d.P
    for x, y in product(P.elems, repeat=2):
        s = (
            d.strong(x, y),
            all(P.less(d.pow(x, n), y) for n in r),
            all(P.less(x, d.pow(y, n)) for n in r),
            all(d.bseq(x, y)) and x != y,
        )
        w = (
            d.weak(x, y),
            any(d.leq(d.pow(x, n), y) for n in r),
            any(d.leq(x, d.pow(y, n)) for n in r),
            any(d.bseq(x, y)),
        )
        if len(set(s)) > 1 or len(set(w)) > 1:
            yield {"x": x, "y": y, "strong": s, "weak": w}


def _fixed_between(d):
    P = d.P
    for c in P.elems:
        if not d.fixed(c):
            continue
        for x in P.down(c):
            for y in P.up(c):
                if not d.strong(x, y):
                    yield {"x": x, "c": c, "y": y}


def _n_lemma(d):
    P = d.P
    for x, y in product(P.elems, repeat=2):
        if P.leq(x, y):
            continue
        fixed = [c for c in P.elems if d.fixed(c)]
        wit = any(P.less(c, x) and not P.comparable(c, y) for c in fixed) or any(
            P.less(y, c) and not P.comparable(c, x) for c in fixed
        )
        if wit and d.weak(x, y):
            yield {"x": x, "y": y}


def _b_definable(d):
    P = d.P
    xs = P.elems
    N = d.order
    for x, y in product(xs, repeat=2):
        sig = d.parity(x)
        if sig:
            n = d.sp(x)
            for i in range(N):
                if d.b(x, y, i) and not d.b(x, y, i + sig * n):
                    yield {"part": 3, "x": x, "y": y, "i": i}
                if d.b(y, x, i) and not d.b(y, x, i + sig * n):
                    yield {"part": 3, "x": y, "y": x, "i": i}
    for x, y, z in product(xs, repeat=3):
        bxy, byz, bxz = d.bseq(x, y), d.bseq(y, z), d.bseq(x, z)
        for i in range(N):
            if not bxy[i]:
                continue
            for j in range(N):
                if byz[j] and not bxz[(i + j) % N]:
                    yield {"part": 4, "xyz": (x, y, z), "i": i, "j": j}


def _antichain_types(d):
    P = d.P
    for x in P.elems:
        orb = set(d.orbit(x))
        rest = [e for e in P.elems if e not in orb]
        for r in range(len(rest) + 1):
            for F in combinations(rest, r):
                bound = 3 ** len(F)
                tps = [_tp(P, d.pow(x, k), F) for k in range(bound + 1)]
                if len(set(tps)) == len(tps):
                    yield {"x": x, "F": F}


def _tp(P, x, F):
    return tuple((P.less(x, y), P.less(y, x)) for y in F)


def _m_shadow(P):
    """M hypotheses on a partial automorphism force x to be incomparable to p^k(x)
    for every k whose iterates of x, y, z are all defined."""
    xs = P.elems
    for y, yy, z, zz in product(xs, repeat=4):
        if len({y, yy, z, zz}) < 4 or not P.less(y, yy) or not P.less(zz, z):
            continue
        if P.less(y, z) != P.less(yy, zz) or P.less(z, y) != P.less(zz, yy):
            continue
        for x in xs:
            if x in (y, yy, z, zz):
                continue
            if not (P.less(x, z) and P.less(x, yy)):
                continue
            if P.comparable(x, zz) or P.comparable(x, y):
                continue
            yield from _m_check(P, x, y, z, {y: yy, z: zz})


def _m_check(P, x, y, z, base):
    for p in partial_autos_extending(P, base):
        inv = {v: k for k, v in p.items()}
        for step in (p, inv):
            a, b, c = x, y, z
            while a in step and b in step and c in step:
                a, b, c = step[a], step[b], step[c]
                if a == x:
                    break
                if P.comparable(x, a):
                    yield {"x": x, "y": y, "z": z, "p": p, "image": a}
                    break


LEMMAS = {
    "SpiralLengthOrbitInvariant": _spiral_invariant,
    "ParityOrbitalInvariant": _parity_orbital,
    "InterlacingOrbitalsEqual": _interlacing,
    "OrbitalOrder": _orbital_order,
    "OrbitalOrderWeakerCondition": _weaker_condition,
    "FixedPointBetweenForcesStronglyLess": _fixed_between,
    "NLemma": _n_lemma,
    "MLemma": None,
    "BDefinableRelations": _b_definable,
    "InfiniteAntichainTypes": _antichain_types,
}

SHADOW_NOTE = {
    "MLemma": "finite shadow: partial automorphisms realising the M pattern, checked along every defined iterate",
    "BDefinableRelations": "finite shadow: total automorphisms of finite posets (parity is always 0 there, so part (3) is vacuous)",
    "InfiniteAntichainTypes": "finite shadow: along any orbit walk of length 3^|F|+1 a qf-type over F repeats",
    "ParityOrbitalInvariant": "finite shadow: total automorphisms of finite posets have parity 0 everywhere",
}


def check_lemma(lemma_id, n_max, mode="labeled", **overrides):
    """Run one lemma over all instances up to n_max. Returns a JSON-ready report."""
    if lemma_id not in LEMMAS:
        raise UnknownLemmaId(lemma_id)
    if n_max > MAX_N:
        raise SizeCap(n_max)
    count = 0
    found = None
    if lemma_id == "MLemma":
        for n in range(1, n_max + 1):
            for P in enumerate_posets(n, mode):
                count += 1
                for w in _m_shadow(P):
                    found = {"poset": P.to_dict(), "witness": _jsonable(w)}
                    break
                if found:
                    break
            if found:
                break
    else:
        fn = LEMMAS[lemma_id]
        for d in instances(n_max, mode):
            count += 1
            for w in fn(d, **overrides):
                found = {"poset": d.P.to_dict(), "auto": {str(k): v for k, v in d.f.items()}, "witness": _jsonable(w)}
                break
            if found:
                break
    rep = {
        "lemma": lemma_id,
        "n_max": n_max,
        "mode": mode,
        "instances": count,
        "verified": found is None,
        "counterexample": found,
    }
    if lemma_id in SHADOW_NOTE:
        rep["note"] = SHADOW_NOTE[lemma_id]
    return rep


def check_all(n_max, mode="labeled"):
    return [check_lemma(k, n_max, mode) for k in LEMMAS]


def _jsonable(w):
    if isinstance(w, dict):
        return {str(k): _jsonable(v) for k, v in w.items()}
    if isinstance(w, (tuple, list, set, frozenset)):
        return [_jsonable(v) for v in w]
    return w
