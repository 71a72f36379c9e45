import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ibltransfer import _kernels_py as py
from ibltransfer import kernels
from ibltransfer.linalg import Q

c = pytest.importorskip("ibltransfer._kernels_c")

DIM = 5
PAR = (0, 1, 0, 1, 1)
INV = [None] + [Q(1, m) for m in range(1, 8)]


def _vec(rng, n, terms=6):
    v = {}
    for _ in range(terms):
        v[tuple(rng.randrange(DIM) for _ in range(n))] = Q(rng.randint(-4, 4), rng.randint(1, 3))
    return {k: x for k, x in v.items() if x}


def _cols(rng, n_in, n_out, density=0.4):
    out = {}
    for _ in range(int(density * DIM ** n_in) + 1):
        a = tuple(rng.randrange(DIM) for _ in range(n_in))
        out.setdefault(a, {})[tuple(rng.randrange(DIM) for _ in range(n_out))] = \
            Q(rng.randint(-3, 3) or 1)
    return out


def _lists(rng, density=0.5):
    return {a: [(b, Q(rng.randint(-2, 2) or 1)) for b in range(DIM) if rng.random() < density]
            for a in range(DIM)}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 4))
def test_backends_agree(seed, n):
    rng = random.Random(seed)
    v = _vec(rng, n)
    m = rng.randint(1, n)
    pos = rng.sample(range(n), m)
    cols = _cols(rng, m, rng.randint(0, 2))
    assert c.apply_at(v, pos, cols, PAR) == py.apply_at(v, pos, cols, PAR)
    assert c.apply_at(v, range(m), cols, PAR) == py.apply_at(v, range(m), cols, PAR)
    images = list(range(n))
    rng.shuffle(images)
    assert c.permute(v, images, PAR) == py.permute(v, images, PAR)
    maps = _lists(rng)
    assert c.tensor_apply(v, maps) == py.tensor_apply(v, maps)
    per = [_lists(rng) for _ in range(n)]
    assert c.tensor_apply(v, per) == py.tensor_apply(v, per)
    r = rng.randint(0, DIM)
    h = _lists(rng, 0.3)
    assert c.sym_homotopy(v, h, r, PAR, INV) == py.sym_homotopy(v, h, r, PAR, INV)
    assert c.sym_homotopy_t(v, h, r, PAR, INV) == py.sym_homotopy_t(v, h, r, PAR, INV)
    assert c.project_below(v, r) == py.project_below(v, r)
    key = next(iter(v), tuple(range(n)))
    assert c.reorder_sign(key, images, PAR) == py.reorder_sign(key, images, PAR)


def test_empty_inputs():
    for mod in (c, py):
        assert mod.apply_at({}, [0], {}, PAR) == {}
        assert mod.project_below({(0, 4): Q(1)}, 4) == {}
        assert mod.sym_homotopy({(0, 1): Q(1)}, {}, 3, PAR, INV) == {}


def test_selected_backend():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.apply_at in (c.apply_at, py.apply_at)
