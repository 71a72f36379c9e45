"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--end-to-end]

Micro-benchmarks call each kernel on fixed random inputs; --end-to-end also
times transfer_all at W = 3 and W = 4 in a subprocess per backend.
"""
import argparse
import os
import random
import subprocess
import sys
import timeit

from ibltransfer import _kernels_py as py
from ibltransfer.linalg import Q

try:
    from ibltransfer import _kernels_c as cy
except ImportError:
    cy = None

DIM = 8
PAR = tuple(i & 1 for i in range(DIM))
INV = [None] + [Q(1, m) for m in range(1, 10)]


def _inputs(seed=0, n=4, terms=400):
    rng = random.Random(seed)
    vec = {}
    for _ in range(terms):
        vec[tuple(rng.randrange(DIM) for _ in range(n))] = Q(rng.randint(-9, 9) or 1,
                                                            rng.randint(1, 5))
    cols = {}
    for _ in range(40):
        a = (rng.randrange(DIM), rng.randrange(DIM))
        cols.setdefault(a, {})[(rng.randrange(DIM),)] = Q(rng.randint(-3, 3) or 1)
    lists = {a: [(b, Q(rng.randint(-2, 2) or 1)) for b in range(DIM) if rng.random() < 0.4]
             for a in range(DIM)}
    return vec, cols, lists


def micro(number=20):
    vec, cols, lists = _inputs()
    cases = {
        "apply_at(front)": lambda m: m.apply_at(vec, (0, 1), cols, PAR),
        "apply_at(1,3)": lambda m: m.apply_at(vec, (1, 3), cols, PAR),
        "permute": lambda m: m.permute(vec, (2, 0, 3, 1), PAR),
        "tensor_apply": lambda m: m.tensor_apply(vec, lists),
        "sym_homotopy": lambda m: m.sym_homotopy(vec, lists, 3, PAR, INV),
        "sym_homotopy_t": lambda m: m.sym_homotopy_t(vec, lists, 3, PAR, INV),
        "project_below": lambda m: m.project_below(vec, 5),
    }
    print(f"{'kernel':<18}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, fn in cases.items():
        tp = min(timeit.repeat(lambda fn=fn: fn(py), number=number, repeat=3)) / number * 1e3
        if cy is None:
            print(f"{name:<18}{tp:>12.3f}{'-':>12}{'-':>10}")
            continue
        assert fn(py) == fn(cy)
        tc = min(timeit.repeat(lambda fn=fn: fn(cy), number=number, repeat=3)) / number * 1e3
        print(f"{name:<18}{tp:>12.3f}{tc:>12.3f}{tp / tc:>9.2f}x")


_E2E = """
import random, time
from ibltransfer import kernels
from ibltransfer.complexes import homology_contraction
from ibltransfer.generators import random_strict_ibl
from ibltransfer.transfer import transfer_all
s = random_strict_ibl(random.Random(0), max_weight={W})
c = homology_contraction(s.complex)
t = time.perf_counter()
transfer_all(s, c, {W})
print(kernels.BACKEND, time.perf_counter() - t)
"""


def end_to_end():
    for W in (3, 4):
        for pure in ("1", "0"):
            env = dict(os.environ, IBLT_PURE_PYTHON=pure, IBLT_THREADS="1")
            out = subprocess.run([sys.executable, "-c", _E2E.format(W=W)], env=env,
                                 capture_output=True, text=True, check=True).stdout.split()
            print(f"transfer_all W={W} {out[0]:<8}{float(out[1]):8.2f} s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args()
    micro()
    if args.end_to_end:
        end_to_end()
