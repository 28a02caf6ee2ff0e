"""Finite strict partial orders stored as their transitive closure."""

import json
from dataclasses import dataclass
from enum import Enum
from itertools import permutations, product


class PosetError(Exception):
    pass


class CycleViolation(PosetError):
    def __init__(self, x, y):
        super().__init__(f"adding {x}<{y} would break antisymmetry: {y}<{x} already holds")
        self.x, self.y = x, y


class UnknownElem(PosetError):
    def __init__(self, x):
        super().__init__(f"unknown element {x}")
        self.x = x


class SandwichViolation(PosetError):
    def __init__(self, a, b):
        super().__init__(f"sandwich needs {a}<{b}")
        self.a, self.b = a, b


class NotEmbedding(PosetError):
    pass


class Rel(str, Enum):
    LT = "LT"
    GT = "GT"
    EQ = "EQ"
    INC = "INC"


class FinPoset:
    """Strict order over integer ids; `_down[x]` and `_up[x]` hold the full closure."""

    __slots__ = ("_down", "_up", "next_id")

    def __init__(self, elems=(), lt=()):
        self._down = {}
        self._up = {}
        self.next_id = 0
        for e in sorted(elems):
            self._new(e)
        for a, b in lt:
            self._edge(a, b)

    # -- construction helpers (mutating; only used on fresh copies) --
    def _new(self, e):
        if e in self._down:
            raise PosetError(f"duplicate element {e}")
        self._down[e] = set()
        self._up[e] = set()
        self.next_id = max(self.next_id, e + 1)

    def _edge(self, x, y):
        self._need(x)
        self._need(y)
        if x == y or x in self._up[y]:
            raise CycleViolation(x, y)
        if y in self._up[x]:
            return
        lows = self._down[x] | {x}
        highs = self._up[y] | {y}
        for a in lows:
            self._up[a] |= highs
        for b in highs:
            self._down[b] |= lows

    def _add(self, down=(), up=()):
        """Add a fresh point above `down` and below `up`, closing minimally."""
        lows, highs = set(), set()
        for a in down:
            self._need(a)
            lows |= self._down[a]
            lows.add(a)
        for b in up:
            self._need(b)
            highs |= self._up[b]
            highs.add(b)
        if lows & highs:
            # some a above some b; report a concrete pair
            for a in down:
                for b in up:
                    if not self.less(a, b):
                        raise SandwichViolation(a, b)
        z = self.next_id
        self._new(z)
        self._down[z] = lows
        self._up[z] = highs
        for a in lows:
            self._up[a].add(z)
        for b in highs:
            self._down[b].add(z)
        return z

    def _need(self, x):
        if x not in self._down:
            raise UnknownElem(x)

    # -- queries --
    def __contains__(self, x):
        return x in self._down

    def __len__(self):
        return len(self._down)

    @property
    def elems(self):
        return tuple(sorted(self._down))

    def less(self, x, y):
        return y in self._up[x]

    def leq(self, x, y):
        return x == y or y in self._up[x]

    def comparable(self, x, y):
        return x == y or y in self._up[x] or x in self._up[y]

    def down(self, x):
        self._need(x)
        return frozenset(self._down[x])

    def up(self, x):
        self._need(x)
        return frozenset(self._up[x])

    def lt_pairs(self):
        return sorted((a, b) for a in self._up for b in self._up[a])

    def copy(self):
        q = FinPoset.__new__(FinPoset)
        q._down = {k: set(v) for k, v in self._down.items()}
        q._up = {k: set(v) for k, v in self._up.items()}
        q.next_id = self.next_id
        return q

    def restrict(self, keep):
        keep = set(keep)
        for x in keep:
            self._need(x)
        q = FinPoset.__new__(FinPoset)
        q._down = {k: self._down[k] & keep for k in keep}
        q._up = {k: self._up[k] & keep for k in keep}
        q.next_id = self.next_id
        return q

    def hasse_edges(self):
        out = []
        for a in sorted(self._up):
            ups = self._up[a]
            for b in sorted(ups):
                # b covers a when nothing sits strictly between
                if not (ups & self._down[b]):
                    out.append((a, b))
        return out

    def check_invariants(self):
        for x in self._down:
            if x in self._up[x]:
                raise PosetError(f"reflexive pair at {x}")
            for y in self._up[x]:
                if x not in self._down[y]:
                    raise PosetError(f"up/down tables disagree at {x},{y}")
                if x in self._up[y]:
                    raise PosetError(f"antisymmetry fails at {x},{y}")
                if not self._up[y] <= self._up[x]:
                    raise PosetError(f"transitivity fails through {x}<{y}")
        return True

    def __eq__(self, other):
        return isinstance(other, FinPoset) and self._up == other._up

    def __repr__(self):
        return f"FinPoset(elems={list(self.elems)}, lt={self.hasse_edges()})"

    # -- serialization --
    def to_dict(self):
        return {"elems": list(self.elems), "lt": [list(e) for e in self.hasse_edges()]}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        p = cls(d["elems"], [tuple(e) for e in d.get("lt", ())])
        p.check_invariants()
        return p

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dot(self, labels=None, name="P"):
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for x in self.elems:
            lab = labels.get(x, str(x)) if labels else str(x)
            lines.append(f'  n{x} [label="{lab}"];')
        for a, b in self.hasse_edges():
            lines.append(f"  n{a} -> n{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def chain(n, start=0):
    return FinPoset(range(start, start + n), [(i, i + 1) for i in range(start, start + n - 1)])


def antichain(n, start=0):
    return FinPoset(range(start, start + n))


def insert_edge(P, x, y):
    if x == y:
        raise CycleViolation(x, y)
    q = P.copy()
    q._edge(x, y)
    return q


def compare(P, x, y):
    P._need(x)
    P._need(y)
    if x == y:
        return Rel.EQ
    if P.less(x, y):
        return Rel.LT
    if P.less(y, x):
        return Rel.GT
    return Rel.INC


def sandwich_insert(P, A, B):
    for a in sorted(A):
        for b in sorted(B):
            P._need(a)
            P._need(b)
            if not P.less(a, b):
                raise SandwichViolation(a, b)
    q = P.copy()
    z = q._add(A, B)
    return q, z


def is_embedding(src, dst, m):
    """True iff `m` is an injective order embedding of `src` into `dst`."""
    if set(m) != set(src.elems):
        return False
    if len(set(m.values())) != len(m):
        return False
    for v in m.values():
        if v not in dst:
            return False
    for a in m:
        for b in m:
            if a != b and src.less(a, b) != dst.less(m[a], m[b]):
                return False
    return True


def amalgamate(P1, P2, A, f1, f2):
    """Free amalgam of P1 and P2 over A. P1 keeps its ids; P2's new points get fresh ones.

    Cross relations are exactly those routed through a point of A.
    """
    if not is_embedding(A, P1, f1):
        raise NotEmbedding("f1 is not an order embedding of A into P1")
    if not is_embedding(A, P2, f2):
        raise NotEmbedding("f2 is not an order embedding of A into P2")
    inv2 = {f2[a]: a for a in f2}
    fresh = max([P1.next_id, *P1.elems, -1]) + 1
    g1 = {x: x for x in P1.elems}
    g2 = {}
    for y in P2.elems:
        if y in inv2:
            g2[y] = f1[inv2[y]]
        else:
            g2[y] = fresh
            fresh += 1
    new2 = [y for y in P2.elems if y not in inv2]
    Q = P1.copy()
    for y in new2:
        Q._new(g2[y])
    for a, b in P2.lt_pairs():
        Q._edge(g2[a], g2[b])
    # cross pairs routed through A
    for x in P1.elems:
        for y in new2:
            for a in A.elems:
                if P1.leq(x, f1[a]) and P2.leq(f2[a], y):
                    Q._edge(x, g2[y])
                    break
            for a in A.elems:
                if P2.leq(y, f2[a]) and P1.leq(f1[a], x):
                    Q._edge(g2[y], x)
                    break
    Q.next_id = fresh
    return Q, g1, g2


def check_amalgam(P1, P2, A, f1, f2, Q, g1, g2):
    """Literal check of the four amalgam conditions; returns a list of failures."""
    bad = []
    for a in A.elems:
        if g1[f1[a]] != g2[f2[a]]:
            bad.append(("a", a))
    if set(Q.elems) != set(g1.values()) | set(g2.values()):
        bad.append(("b",))
    common = {g1[f1[a]] for a in A.elems}
    if set(g1.values()) & set(g2.values()) != common:
        bad.append(("c",))
    if not is_embedding(P1, Q, g1) or not is_embedding(P2, Q, g2):
        bad.append(("embed",))
    for x in P1.elems:
        for y in P2.elems:
            up = any(P1.leq(x, f1[a]) and P2.leq(f2[a], y) for a in A.elems)
            if Q.leq(g1[x], g2[y]) != up:
                bad.append(("d", x, y))
            dn = any(P2.leq(y, f2[a]) and P1.leq(f1[a], x) for a in A.elems)
            if Q.leq(g2[y], g1[x]) != dn:
                bad.append(("d'", y, x))
    return bad


@dataclass(frozen=True)
class QfType:
    over: tuple
    rel: tuple

    def to_dict(self):
        return {"over": list(self.over), "rel": list(self.rel)}


def qftp(P, x, F):
    P._need(x)
    rel = []
    for y in F:
        P._need(y)
        if y == x:
            raise PosetError(f"{x} is one of the parameters")
        if P.less(y, x):
            rel.append("above")
        elif P.less(x, y):
            rel.append("below")
        else:
            rel.append("incomparable")
    return QfType(tuple(F), tuple(rel))


def find_embedding(S, P, partial=None):
    """Backtracking search for an order embedding of S into P."""
    src = list(S.elems)
    dst = list(P.elems)
    m = dict(partial or {})
    used = set(m.values())
    todo = [s for s in src if s not in m]

    def ok(s, t):
        for s2, t2 in m.items():
            if S.less(s, s2) != P.less(t, t2) or S.less(s2, s) != P.less(t2, t):
                return False
        return True

    def go(i):
        if i == len(todo):
            return True
        s = todo[i]
        for t in dst:
            if t in used or not ok(s, t):
                continue
            m[s] = t
            used.add(t)
            if go(i + 1):
                return True
            del m[s]
            used.discard(t)
        return False

    return dict(m) if go(0) else None


def embeds_all_small(P, n):
    from .lemma_oracle import enumerate_posets

    if n > 5:
        raise ValueError("embeds_all_small supports n <= 5")
    for k in range(1, n + 1):
        for S in enumerate_posets(k, "iso"):
            if find_embedding(S, P) is None:
                return False
    return True


def canonical_form(P):
    """Least closure matrix over orderings that sort points by (down-degree, up-degree).

    Restricting to invariant-respecting orderings keeps the form canonical while
    cutting the search from n! to the product of the block factorials.
    """
    xs = P.elems
    key = {x: (len(P._down[x]), len(P._up[x])) for x in xs}
    blocks = {}
    for x in xs:
        blocks.setdefault(key[x], []).append(x)
    groups = [blocks[k] for k in sorted(blocks)]
    best = None
    for parts in product(*(permutations(g) for g in groups)):
        order = [x for part in parts for x in part]
        mat = tuple(1 if P.less(a, b) else 0 for a in order for b in order)
        if best is None or mat < best:
            best = mat
    return len(xs), tuple(sorted(blocks)), best
