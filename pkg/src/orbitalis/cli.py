"""Command line front end. JSON on stdout, diagnostics on stderr.

Every query rebuilds the generic from --seed/--rounds, so results depend only on
the arguments.
"""

import argparse
import json
import os
import sys

from . import generic_builder as gb
from . import orbital_analysis as oa
from .lemma_oracle import LEMMAS, check_all, check_lemma
from .partial_autos import b_window, certify_pair
from .poset_core import FinPoset, PosetError


def _seed_default():
    return int(os.environ.get("ORBITALIS_SEED", "0"))


def _emit(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _builder(a):
    return gb.build(a.seed, a.rounds, a.policy)


def cmd_build(a):
    g = _builder(a)
    if a.dump_tower:
        with open(a.dump_tower, "w") as fh:
            fh.write(g.tower_lines())
    sys.stdout.write(g.to_json() + "\n")


def cmd_eval(a):
    g = _builder(a)
    _emit({"x": a.x, "k": a.k, "value": gb.eval(g, a.x, a.k)})


def cmd_bseq(a):
    g = _builder(a)
    p = g.top
    h = a.window
    w = b_window(p, a.x, a.y, h)
    d = certify_pair(p, a.x, a.y)
    out = {"x": a.x, "y": a.y, "window": {str(i): w.bits[i] for i in range(-h, h + 1)}}
    if d is None:
        out["certified"] = False
    else:
        out["certified"] = True
        out["determined"] = {str(i): d.pattern(i) for i in range(-h, h + 1)}
        out["certs"] = [c.to_dict() for c in d.certs]
    _emit(out)


def cmd_spiral(a):
    g = _builder(a)
    _emit(dict(x=a.x, **oa.spiral_length(g, a.x, a.horizon).to_dict()))


def cmd_orbital(a):
    g = _builder(a)
    _emit({
        "x": a.x,
        "y": a.y,
        "same": oa.same_orbital(g, a.x, a.y, a.horizon).to_dict(),
        "x_vs_y": oa.orbital_order(g, a.x, a.y).to_dict(),
        "y_vs_x": oa.orbital_order(g, a.y, a.x).to_dict(),
    })


def cmd_quotient(a):
    g = _builder(a)
    S = a.elems or gb.covered(g)
    Q = oa.quotient_fragment(g, S, a.horizon)
    if a.dot:
        labels = {x: oa.orbital_label(g, x, a.horizon) for x in Q.elems}
        sys.stdout.write(Q.to_dot(labels, name="quotient"))
    else:
        _emit(Q.to_dict())


def cmd_sandwich(a):
    g = _builder(a)
    Q = FinPoset.from_json(a.Q) if a.Q else FinPoset([0])
    pQ = {int(k): v for k, v in json.loads(a.map).items()} if a.map else {q: q for q in Q.elems}
    emb = oa.sandwich_orbitals(g, a.A, a.B, a.C, Q, pQ)
    _emit({
        "embedding": {str(k): v for k, v in sorted(emb.items())},
        "reports": {str(v): oa.spiral_length(g, v, a.horizon).to_dict() for v in emb.values()},
    })


def cmd_verify(a):
    if a.lemma == "all":
        reps = check_all(a.max_n, a.mode)
    else:
        reps = [check_lemma(a.lemma, a.max_n, a.mode)]
    ok = all(r["verified"] for r in reps)
    _emit({"result": "verified" if ok else "counterexample", "reports": reps})
    return 0 if ok else 1


def cmd_fragment(a):
    if a.load:
        with open(a.load) as fh:
            P = FinPoset.from_json(fh.read())
    else:
        P = _builder(a).host.fragment
    if a.dot:
        sys.stdout.write(P.to_dot(name="fragment"))
    else:
        _emit(P.to_dict())


def parser():
    ap = argparse.ArgumentParser(prog="orbitalis", description="Generic automorphisms of the random poset.")
    ap.add_argument("--horizon", type=int, default=oa.DEFAULT_HORIZON)
    sub = ap.add_subparsers(dest="cmd", required=True)

    def with_build(sp, rounds=20):
        sp.add_argument("--seed", type=int, default=_seed_default())
        sp.add_argument("--rounds", type=int, default=rounds)
        sp.add_argument("--policy", choices=gb.POLICIES, default="fifo")
        return sp

    sp = with_build(sub.add_parser("build", help="run the builder and print its state"))
    sp.add_argument("--dump-tower", metavar="FILE")
    sp.set_defaults(fn=cmd_build)

    sp = with_build(sub.add_parser("eval", help="f^k(x)"))
    sp.add_argument("x", type=int)
    sp.add_argument("k", type=int)
    sp.set_defaults(fn=cmd_eval)

    sp = with_build(sub.add_parser("bseq", help="b-window of a pair with certificates"))
    sp.add_argument("x", type=int)
    sp.add_argument("y", type=int)
    sp.add_argument("--window", type=int, default=8)
    sp.set_defaults(fn=cmd_bseq)

    sp = with_build(sub.add_parser("spiral", help="spiral length report"))
    sp.add_argument("x", type=int)
    sp.set_defaults(fn=cmd_spiral)

    sp = with_build(sub.add_parser("orbital", help="orbital membership and order of two points"))
    sp.add_argument("x", type=int)
    sp.add_argument("y", type=int)
    sp.set_defaults(fn=cmd_orbital)

    sp = with_build(sub.add_parser("quotient", help="strong-order quotient on orbitals"))
    sp.add_argument("elems", type=int, nargs="*")
    sp.add_argument("--dot", action="store_true")
    sp.set_defaults(fn=cmd_quotient)

    sp = with_build(sub.add_parser("sandwich", help="plant a copy of (Q, pQ) between orbitals"))
    sp.add_argument("--A", type=int, nargs="*", default=[])
    sp.add_argument("--B", type=int, nargs="*", default=[])
    sp.add_argument("--C", type=int, nargs="*", default=[])
    sp.add_argument("--Q", help="poset JSON (default: one point)")
    sp.add_argument("--map", help='partial map JSON such as {"0": 0}')
    sp.set_defaults(fn=cmd_sandwich)

    sp = sub.add_parser("verify", help="exhaustive finite lemma checks")
    sp.add_argument("--lemma", default="all", choices=["all", *LEMMAS])
    sp.add_argument("--max-n", type=int, default=4)
    sp.add_argument("--mode", choices=["labeled", "iso", "up-to-iso"], default="labeled")
    sp.set_defaults(fn=cmd_verify)

    sp = with_build(sub.add_parser("fragment", help="print the realized fragment"))
    sp.add_argument("--json", action="store_true", help="JSON output (the default)")
    sp.add_argument("--dot", action="store_true")
    sp.add_argument("--load", metavar="FILE", help="read a poset JSON file instead of building")
    sp.set_defaults(fn=cmd_fragment)
    return ap


def main(argv=None):
    args = parser().parse_args(argv)
    try:
        rc = args.fn(args)
    except (PosetError, ValueError, OSError) as e:
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return 1
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
