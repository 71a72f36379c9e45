"""Golden fixtures: seeded inputs and the CLI runs whose outputs are pinned.

Run ``python tests/fixtures.py`` to rewrite tests/golden/ after an intentional
format change.
"""
import os
import random
import sys
from pathlib import Path

from ibltransfer import cli, io
from ibltransfer.complexes import ChainComplex, homology_contraction
from ibltransfer.corolla import Corolla
from ibltransfer.generators import (
    acyclic_space,
    contraction_onto,
    random_automorphism,
    random_complex,
    random_map,
    random_strict_ibl,
)
from ibltransfer.ibl import (
    make_ibl_structure,
    op_degree,
    skew_symmetrize,
    zero_structure,
)
from ibltransfer.linalg import GradedSpace
from ibltransfer.morphisms import InfinityMorphism, random_infinity_components

GOLDEN = Path(__file__).parent / "golden"


def _nu111_inputs():
    rng = random.Random(8)
    Hc = ChainComplex.zero(GradedSpace({0: 1, 1: 1}))
    Kc = random_complex(rng, acyclic_space(rng, 2, degrees=(0, 1)), acyclic=True)
    c = contraction_onto(rng, Hc, Kc)
    A = c.big.space
    raw = {}
    for cor in [Corolla(1, 1, 1), Corolla(2, 1, 0), Corolla(1, 2, 0)]:
        m = random_map(rng, A, A, cor.k, cor.l, op_degree(cor), 0.6, 2)
        raw[cor] = skew_symmetrize(m)
    return make_ibl_structure(c.big, raw, 2), c


def _iso_input():
    rng = random.Random(31)
    A = GradedSpace({0: 2, 1: 2, 2: 1})
    S, _ = random_automorphism(rng, A)
    zs = zero_structure(ChainComplex.zero(A), 3)
    return InfinityMorphism(zs, zs, random_infinity_components(rng, A, A, 3, S, 0.3), 3)


def inputs() -> dict:
    s, c = _nu111_inputs()
    strict = random_strict_ibl(random.Random(0), max_weight=3)
    return {
        "nu111_structure": s, "nu111_contraction": c,
        "strict_structure": strict, "strict_contraction": homology_contraction(strict.complex),
        "iso": _iso_input(),
    }


# (output name, argv with {in:name} and {out} placeholders)
RUNS = [
    ("nu111_transfer", ["transfer", "--structure", "{in:nu111_structure}", "--contraction",
                        "{in:nu111_contraction}", "--max-weight", "2", "--out", "{out}"]),
    ("strict_transfer", ["transfer", "--structure", "{in:strict_structure}", "--contraction",
                         "{in:strict_contraction}", "--max-weight", "3", "--out", "{out}"]),
    ("strict_i_inf", ["transfer", "--structure", "{in:strict_structure}", "--contraction",
                      "{in:strict_contraction}", "--max-weight", "3", "--out", "{tmp}",
                      "--infinity-in", "{out}"]),
    ("strict_p_inf", ["transfer", "--structure", "{in:strict_structure}", "--contraction",
                      "{in:strict_contraction}", "--max-weight", "3", "--out", "{tmp}",
                      "--infinity-proj", "{out}"]),
    ("strict_genus0", ["transfer", "--structure", "{in:strict_structure}", "--contraction",
                       "{in:strict_contraction}", "--max-weight", "3", "--max-genus", "0",
                       "--out", "{out}"]),
    ("iso_inverse", ["invert", "--morphism", "{in:iso}", "--max-weight", "3", "--out", "{out}"]),
    ("graphs_220", ["enumerate", "--k", "2", "--l", "2", "--g", "0", "--out", "{out}"]),
]


def run(name: str, argv: list, indir: Path, outdir: Path, threads: int) -> bytes:
    """Run one pinned command and return the bytes it wrote."""
    out = outdir / f"{name}.json"
    args = []
    for a in argv:
        if a.startswith("{in:"):
            a = str(indir / f"{a[4:-1]}.json")
        elif a == "{out}":
            a = str(out)
        elif a == "{tmp}":
            a = str(outdir / f"{name}.aux.json")
        args.append(a)
    old = os.environ.get("IBLT_THREADS")
    os.environ["IBLT_THREADS"] = str(threads)
    try:
        code = cli.main(args)
    finally:
        if old is None:
            del os.environ["IBLT_THREADS"]
        else:
            os.environ["IBLT_THREADS"] = old
    if code != 0:
        raise RuntimeError(f"{name}: exit code {code}")
    return out.read_bytes()


def regenerate():
    GOLDEN.mkdir(exist_ok=True)
    for name, obj in inputs().items():
        io.save(obj, GOLDEN / f"{name}.json")
    for name, argv in RUNS:
        run(name, argv, GOLDEN, GOLDEN, 1)
    for p in GOLDEN.glob("*.aux.json"):
        p.unlink()


if __name__ == "__main__":
    regenerate()
    print(f"wrote {len(list(GOLDEN.glob('*.json')))} files to {GOLDEN}", file=sys.stderr)
