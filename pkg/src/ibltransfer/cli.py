"""Command-line driver: ``iblt <command> ...``.

Exit codes: 0 success or verified, 1 verification failure, 2 input error.
Diagnostics go to standard error.  IBLT_THREADS sets the number of worker
threads used inside transfer.
"""
from __future__ import annotations

import argparse
import random
import sys

from . import io
from .complexes import homology_contraction
from .graphs import enumerate_leveled_graphs
from .ibl import verify_maurer_cartan
from .morphisms import (
    check_infinity_morphism,
    compose_infinity,
    extend_to_acyclic,
    invert_infinity,
)
from .transfer import transfer, transfer_all

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(path, kind):
    try:
        return io.load(path, kind)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    except ValueError as e:
        raise InputError(str(e)) from None


def _weight(args, *objs):
    W = args.max_weight
    if W < 0:
        raise InputError("--max-weight must be non-negative")
    for o in objs:
        if W > o.max_weight:
            raise InputError(f"--max-weight {W} exceeds the input truncation {o.max_weight}")
    return W


def _report(rep, what, out=None) -> int:
    if out:
        io.save(rep, out)
    if rep.ok:
        print(f"{what}: {rep.summary()}")
        return OK
    print(f"{what}: {rep.summary()}", file=sys.stderr)
    return FAILED


def cmd_transfer(args):
    s = _load(args.structure, "IBLStructure")
    c = _load(args.contraction, "Contraction")
    if s.complex != c.big:
        raise InputError("the structure does not live on the contraction's big complex")
    W = _weight(args, s)
    capped = args.max_genus is not None or args.max_coarity is not None
    if args.infinity_in or args.infinity_proj:
        if capped:
            raise InputError("genus/coarity caps cannot be combined with morphism outputs")
        nu, i_inf, p_inf = transfer_all(s, c, W)
        if args.infinity_in:
            io.save(i_inf, args.infinity_in)
        if args.infinity_proj:
            io.save(p_inf, args.infinity_proj)
    else:
        nu = transfer(s, c, W, max_genus=args.max_genus, max_coarity=args.max_coarity)
    io.save(nu, args.out)
    return OK


def cmd_verify_mc(args):
    s = _load(args.structure, "IBLStructure")
    return _report(verify_maurer_cartan(s, max_weight=_weight(args, s)), "maurer-cartan",
                   args.report)


def cmd_compose(args):
    f = _load(args.first, "InfinityMorphism")
    g = _load(args.second, "InfinityMorphism")
    W = _weight(args, f, g)
    if f.target != g.source:
        raise InputError("the target of --first is not the source of --second")
    io.save(compose_infinity(g, f, W), args.out)
    return OK


def cmd_invert(args):
    f = _load(args.morphism, "InfinityMorphism")
    W = _weight(args, f)
    try:
        fi = invert_infinity(f, W)
    except ValueError as e:
        raise InputError(str(e)) from None
    io.save(fi, args.out)
    return OK


def cmd_check_morphism(args):
    f = _load(args.morphism, "InfinityMorphism")
    return _report(check_infinity_morphism(f, _weight(args, f)), "morphism", args.report)


def cmd_extend(args):
    f0 = _load(args.map, "GradedMap")
    s = _load(args.source, "IBLStructure")
    B = _load(args.target_complex, "ChainComplex")
    W = _weight(args, s)
    if f0.n_in != 1 or f0.n_out != 1 or f0.source != s.space or f0.target != B.space:
        raise InputError("--map must be a 1->1 map from the source space to the target space")
    try:
        f = extend_to_acyclic(f0, s, B, W)
    except ValueError as e:
        raise InputError(str(e)) from None
    io.save(f, args.out)
    return OK


def cmd_homology(args):
    A = _load(args.complex, "ChainComplex")
    io.save(homology_contraction(A), args.out)
    return OK


def cmd_enumerate(args):
    from .corolla import Corolla
    try:
        c = Corolla(args.k, args.l, args.g).check()
    except ValueError as e:
        raise InputError(str(e)) from None
    W = c.weight if args.max_weight is None else args.max_weight
    if c.weight > W:
        raise InputError(f"--max-weight {W} is below the weight {c.weight} of the corolla")
    graphs = enumerate_leveled_graphs(args.k, args.l, args.g, W)
    if args.count_only:
        print(len(graphs))
    elif args.out:
        io.save(graphs, args.out)
    else:
        sys.stdout.write(io.dumps(graphs))
    return OK


def cmd_generate(args):
    from .generators import random_ibl_infinity, random_strict_ibl
    rng = random.Random(args.seed)
    if args.kind == "strict":
        s = random_strict_ibl(rng, args.max_weight)
    else:
        s, _ = random_ibl_infinity(rng, args.max_weight)
    io.save(s, args.out)
    if args.contraction:
        io.save(homology_contraction(s.complex), args.contraction)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iblt", description="Exact homotopy transfer of "
                                "IBL-infinity structures.")
    sub = p.add_subparsers(dest="command", required=True)

    def weight(q, required=True):
        q.add_argument("--max-weight", type=int, required=required, metavar="W")

    q = sub.add_parser("transfer", help="transfer a structure along a contraction")
    q.add_argument("--structure", required=True)
    q.add_argument("--contraction", required=True)
    weight(q)
    q.add_argument("--max-genus", type=int)
    q.add_argument("--max-coarity", type=int)
    q.add_argument("--out", required=True)
    q.add_argument("--infinity-in", metavar="PATH", help="also write i_infinity")
    q.add_argument("--infinity-proj", metavar="PATH", help="also write p_infinity")
    q.set_defaults(func=cmd_transfer)

    q = sub.add_parser("verify-mc", help="check the Maurer-Cartan relations")
    q.add_argument("--structure", required=True)
    weight(q)
    q.add_argument("--report", metavar="PATH")
    q.set_defaults(func=cmd_verify_mc)

    q = sub.add_parser("compose", help="second o first")
    q.add_argument("--first", required=True)
    q.add_argument("--second", required=True)
    weight(q)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_compose)

    q = sub.add_parser("invert", help="inverse of an infinity-isomorphism")
    q.add_argument("--morphism", required=True)
    weight(q)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_invert)

    q = sub.add_parser("check-morphism", help="check the infinity-morphism equations")
    q.add_argument("--morphism", required=True)
    weight(q)
    q.add_argument("--report", metavar="PATH")
    q.set_defaults(func=cmd_check_morphism)

    q = sub.add_parser("extend", help="extend a chain map into an acyclic complex")
    q.add_argument("--map", required=True)
    q.add_argument("--source", required=True)
    q.add_argument("--target-complex", required=True)
    weight(q)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_extend)

    q = sub.add_parser("homology", help="contraction of a complex onto its homology")
    q.add_argument("--complex", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_homology)

    q = sub.add_parser("enumerate", help="leveled graphs with a given boundary")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--g", type=int, required=True)
    weight(q, required=False)
    q.add_argument("--count-only", action="store_true")
    q.add_argument("--out")
    q.set_defaults(func=cmd_enumerate)

    q = sub.add_parser("generate", help="random test structure")
    q.add_argument("--kind", choices=("strict", "infinity"), default="strict")
    q.add_argument("--seed", type=int, required=True)
    weight(q)
    q.add_argument("--out", required=True)
    q.add_argument("--contraction", metavar="PATH", help="also write the homology contraction")
    q.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return BAD_INPUT if e.code else OK
    try:
        return args.func(args)
    except InputError as e:
        print(f"iblt: error: {e}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
