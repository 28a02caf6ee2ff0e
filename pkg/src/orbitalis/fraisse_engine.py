"""A lazily grown, replayable finite model of the random poset."""

import json
import random
from itertools import combinations, product

from .poset_core import FinPoset, NotEmbedding, UnknownElem, is_embedding


class LazyPoset:
    """Single-owner growing fragment. Every new point is a sandwich over existing ones,
    so old relations never change and the log replays exactly."""

    def __init__(self, seed=0):
        self.seed = seed
        self.fragment = FinPoset()
        self.log = []
        self.rng = random.Random(seed)

    # -- growth --
    def add_point(self, down=(), up=(), via="add"):
        down, up = sorted(set(down)), sorted(set(up))
        z = self.fragment._add(down, up)
        if self.log and self.log[-1]["op"] == via and via != "add" and self.log[-1].get("open"):
            self.log[-1]["points"].append([down, up])
        else:
            self.log.append({"op": via, "points": [[down, up]]})
        return z

    def _open(self, op):
        self.log.append({"op": op, "points": [], "open": True})

    def _close(self):
        rec = self.log[-1]
        rec.pop("open", None)
        if not rec["points"]:
            self.log.pop()

    def snapshot(self):
        return self.fragment.copy()

    def __contains__(self, x):
        return x in self.fragment

    def need(self, x):
        if x not in self.fragment:
            raise UnknownElem(x)

    # -- serialization --
    def log_lines(self):
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.log)

    @classmethod
    def replay(cls, seed, lines):
        L = cls(seed)
        for line in lines.splitlines() if isinstance(lines, str) else lines:
            if not line.strip():
                continue
            rec = json.loads(line)
            for down, up in rec["points"]:
                L.fragment._add(down, up)
            L.log.append(rec)
        return L

    def to_json(self):
        return json.dumps({"seed": self.seed, "fragment": self.fragment.to_dict()}, sort_keys=True)


def realize_extension(L, A, B, anchor):
    """Embed the finite poset B into L's fragment over `anchor` (B-points -> A).

    New points are placed in id order, each sandwiched between the images of its
    already placed lower and upper covers.
    """
    A = set(A)
    src = B.restrict(anchor.keys()) if anchor else FinPoset()
    if set(anchor.values()) - A or not set(anchor.values()) <= set(L.fragment.elems):
        raise NotEmbedding("anchor must land inside A")
    if not is_embedding(src, L.fragment, anchor):
        raise NotEmbedding("anchor is not an order embedding of the A-part of B")
    emb = dict(anchor)
    new = [b for b in B.elems if b not in emb]
    if not new:
        return emb
    L._open("realize")
    for b in new:
        lows = [emb[a] for a in B.down(b) if a in emb]
        highs = [emb[c] for c in B.up(b) if c in emb]
        emb[b] = L.add_point(lows, highs, via="realize")
    L._close()
    return emb


def _closure_key(P, S, D, U):
    lows = set(D)
    for d in D:
        lows |= P._down[d] & S
    highs = set(U)
    for u in U:
        highs |= P._up[u] & S
    return frozenset(lows), frozenset(highs)


def genericity_sweep(L, k):
    """One pass of the one-point extension property over the current fragment.

    Each parameter set of at most k points is split into D (below the witness), U (above)
    and I (incomparable), with D < U pointwise. Some point outside the parameters must sit
    above exactly the down-closure of D and below exactly the up-closure of U, relative to
    the fragment as it was when the pass started. Existing points are reused as witnesses.
    """
    P = L.fragment
    S = frozenset(P.elems)
    have = {}
    for z in P.elems:
        key = (frozenset(P._down[z] & S), frozenset(P._up[z] & S))
        have.setdefault(key, []).append(z)
    xs = sorted(S)
    L._open("sweep")
    for size in range(0, min(k, len(xs)) + 1):
        for sub in combinations(xs, size):
            for roles in product((0, 1, 2), repeat=size):
                D = [x for x, r in zip(sub, roles) if r == 0]
                U = [x for x, r in zip(sub, roles) if r == 1]
                I = {x for x, r in zip(sub, roles) if r == 2}
                if any(not P.less(d, u) for d in D for u in U):
                    continue
                key = _closure_key(P, S, D, U)
                if I & (key[0] | key[1]):
                    continue
                if any(z not in I for z in have.get(key, ())):
                    continue
                have.setdefault(key, []).append(L.add_point(D, U, via="sweep"))
    L._close()
    return L


def saturate(L, k):
    """Sweeps with bounds 1..k; afterwards every poset on at most k points embeds."""
    for j in range(1, k + 1):
        genericity_sweep(L, j)
    return L


def extend_partial_iso(L, p, x):
    """Forth step: find or create y so that p + {x: y} is still a partial isomorphism."""
    P = L.fragment
    L.need(x)
    if x in p:
        return p[x]
    lows = {p[d] for d in p if P.less(d, x)}
    highs = {p[d] for d in p if P.less(x, d)}
    rng = set(p.values())
    for y in P.elems:
        if y in rng:
            continue
        if all(P.less(p[d], y) == (d in P._down[x]) and P.less(y, p[d]) == (d in P._up[x]) for d in p):
            return y
    return L.add_point(lows, highs, via="forth")
