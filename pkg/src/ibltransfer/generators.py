"""Seeded random test data: complexes, contractions, maps.

Everything takes a ``random.Random`` so results are reproducible.
"""
from __future__ import annotations

import random

from .complexes import ChainComplex, Contraction, homology_contraction
from .linalg import GradedMap, GradedSpace, Q
from .linalg.dense import inverse


def rand_q(rng: random.Random, span: int = 3, allow_zero: bool = True):
    while True:
        x = rng.randint(-span, span)
        if x or allow_zero:
            return Q(x)


def random_invertible(rng: random.Random, n: int, span: int = 2):
    while True:
        m = [[Q(rng.randint(-span, span)) for _ in range(n)] for _ in range(n)]
        try:
            return m, inverse(m)
        except ValueError:
            continue


def _blocks(space: GradedSpace):
    by_deg: dict = {}
    for j, x in enumerate(space.degrees):
        by_deg.setdefault(x, []).append(j)
    return by_deg


def random_automorphism(rng, space: GradedSpace, span: int = 2):
    """Random degree-preserving S and S^{-1} as 1->1 GradedMaps."""
    s_cols, si_cols = {}, {}
    for n, idx in _blocks(space).items():
        m, mi = random_invertible(rng, len(idx), span)
        for c, j in enumerate(idx):
            s_cols[(j,)] = {(idx[r],): m[r][c] for r in range(len(idx)) if m[r][c]}
            si_cols[(j,)] = {(idx[r],): mi[r][c] for r in range(len(idx)) if mi[r][c]}
    return (GradedMap(space, space, 1, 1, 0, s_cols), GradedMap(space, space, 1, 1, 0, si_cols))


def _conj(S, f, Si):
    from .linalg import compose
    return compose(S, compose(f, Si))


def random_space(rng, max_dim: int, degrees=(-1, 0, 1, 2)) -> GradedSpace:
    dims: dict = {}
    n = rng.randint(1, max_dim)
    for _ in range(n):
        x = rng.choice(degrees)
        dims[x] = dims.get(x, 0) + 1
    return GradedSpace(dims)


def random_complex(rng, space: GradedSpace, acyclic: bool = False, conjugate: bool = True):
    """Random differential on a space.  With acyclic=True the space must admit it."""
    blocks = _blocks(space)
    free = {n: list(idx) for n, idx in blocks.items()}
    cols = {}
    for n in sorted(blocks, reverse=True):
        # pair some remaining degree-n vectors with degree n-1 vectors
        tgt = free.get(n - 1, [])
        src = free[n]
        if acyclic:
            m = len(src)
            if m > len(tgt):
                raise ValueError("no acyclic differential on this space")
        else:
            m = rng.randint(0, min(len(src), len(tgt)))
        for _ in range(m):
            a = src.pop(0)
            b = tgt.pop(0)
            cols[(a,)] = {(b,): Q(1)}
    if acyclic and any(free.values()):
        raise ValueError("no acyclic differential on this space")
    d = GradedMap(space, space, 1, 1, -1, cols)
    if conjugate:
        S, Si = random_automorphism(rng, space)
        d = _conj(S, d, Si)
    return ChainComplex(space, d)


def acyclic_space(rng, pairs: int, degrees=(0, 1, 2)) -> GradedSpace:
    dims: dict = {}
    for _ in range(pairs):
        n = rng.choice(degrees)
        dims[n] = dims.get(n, 0) + 1
        dims[n - 1] = dims.get(n - 1, 0) + 1
    return GradedSpace(dims)


def direct_sum_space(H: GradedSpace, K: GradedSpace):
    """Sum space plus index embeddings of H and K."""
    dims = dict(H.dims)
    for n, m in K.dims.items():
        dims[n] = dims.get(n, 0) + m
    S = GradedSpace(dims)
    blocks = _blocks(S)
    used = {n: 0 for n in blocks}
    emb_h, emb_k = [], []
    for x in H.degrees:
        emb_h.append(blocks[x][used[x]])
        used[x] += 1
    for x in K.degrees:
        emb_k.append(blocks[x][used[x]])
        used[x] += 1
    return S, emb_h, emb_k


def contraction_onto(rng, Hc: ChainComplex, Kc: ChainComplex, conjugate: bool = True):
    """Contraction of H + K onto H for an acyclic complex K, optionally conjugated."""
    H, K = Hc.space, Kc.space
    A, eh, ek = direct_sum_space(H, K)
    d_cols: dict = {}
    for a, col in Hc.d.cols.items():
        d_cols[(eh[a[0]],)] = {(eh[b[0]],): v for b, v in col.items()}
    for a, col in Kc.d.cols.items():
        d_cols[(ek[a[0]],)] = {(ek[b[0]],): v for b, v in col.items()}
    dA = GradedMap(A, A, 1, 1, -1, d_cols)
    ck = homology_contraction(Kc)
    if ck.small.space.dim:
        raise ValueError("K is not acyclic")
    h_cols = {(ek[a[0]],): {(ek[b[0]],): v for b, v in col.items()} for a, col in ck.h.cols.items()}
    h = GradedMap(A, A, 1, 1, 1, h_cols)
    i = GradedMap(H, A, 1, 1, 0, {(t,): {(eh[t],): Q(1)} for t in range(H.dim)})
    p = GradedMap(A, H, 1, 1, 0, {(eh[t],): {(t,): Q(1)} for t in range(H.dim)})
    if conjugate:
        from .linalg import compose
        S, Si = random_automorphism(rng, A)
        dA = _conj(S, dA, Si)
        h = _conj(S, h, Si)
        i = compose(S, i)
        p = compose(p, Si)
    return Contraction(ChainComplex(A, dA), Hc, i, p, h)


def random_contraction(rng, max_dim: int = 8, small_differential: bool = True):
    """Random contraction; H may carry a nonzero differential."""
    while True:
        H = random_space(rng, max(1, max_dim // 2))
        pairs = rng.randint(0, max(0, (max_dim - H.dim) // 2))
        if H.dim + 2 * pairs <= max_dim:
            break
    Hc = random_complex(rng, H) if small_differential else ChainComplex.zero(H)
    Kc = random_complex(rng, acyclic_space(rng, pairs), acyclic=True) if pairs else \
        ChainComplex.zero(GradedSpace({}))
    return contraction_onto(rng, Hc, Kc)


def random_map(rng, source, target, n_in, n_out, degree, density: float = 0.5, span: int = 3):
    cols: dict = {}
    for a in source.basis_tensors(n_in):
        da = source.deg(a)
        for b in target.basis_tensors(n_out):
            if target.deg(b) - da == degree and rng.random() < density:
                v = rand_q(rng, span, allow_zero=False)
                cols.setdefault(a, {})[b] = v
    return GradedMap(source, target, n_in, n_out, degree, cols)


def _affine_bracket(scale):
    # [x,y] = scale y on indices 0, 1, 2; index 2 (c) is central
    br = {(0, 1): {1: Q(scale)}}
    full: dict = {}
    for (a, b), v in br.items():
        full[(a, b)] = dict(v)
        full[(b, a)] = {c: -x for c, x in v.items()}
    return full


def strict_ibl_ops(scale=1):
    """Bracket and cobracket of a 6-dim graded involutive Lie bialgebra, no differential.

    The space is L + L.xi with L = aff(1) + k.c in degree 0 and xi of degree 1,
    xi^2 = 0.  The cobracket is ad(r) for r = y^c.  Since [y, c] = 0, r solves
    the classical Yang-Baxter equation and its bracket vanishes, so the
    cobracket satisfies co-Jacobi, Drinfeld compatibility and involutivity.
    """
    from itertools import product
    A = GradedSpace({0: 3, 1: 3})
    brL = _affine_bracket(scale)

    def split(i):
        return i % 3, i // 3

    def bracket(i, j):
        (u, a), (w, b) = split(i), split(j)
        if a + b > 1:
            return {}
        return {c + 3 * (a + b): v for c, v in brL.get((u, w), {}).items()}

    br_cols = {}
    for i, j in product(range(6), repeat=2):
        col = {(c,): v for c, v in bracket(i, j).items()}
        if col:
            br_cols[(i, j)] = col
    r = {(1, 2): Q(1), (2, 1): Q(-1)}
    co_cols = {}
    for i in range(6):
        acc: dict = {}
        for (u, w), v in r.items():
            for c, x in bracket(i, u).items():
                acc[(c, w)] = acc.get((c, w), 0) + v * x
            for c, x in bracket(i, w).items():
                acc[(u, c)] = acc.get((u, c), 0) + v * x
        acc = {k: v for k, v in acc.items() if v}
        if acc:
            co_cols[(i,)] = acc
    mu21 = GradedMap(A, A, 2, 1, 0, br_cols)
    mu12 = GradedMap(A, A, 1, 2, 0, co_cols)
    return A, mu21, mu12


def compatible_differentials(A, ops):
    """Basis of degree -1 maps A_1 -> A_0 that commute with the given operations."""
    from .ibl import end_differential
    src = [j for j, x in enumerate(A.degrees) if x == 1]
    tgt = [j for j, x in enumerate(A.degrees) if x == 0]
    params = [(a, b) for a in src for b in tgt]
    cols = {}
    for n, (a, b) in enumerate(params):
        d = GradedMap(A, A, 1, 1, -1, {(a,): {(b,): Q(1)}})
        col = {}
        for t, f in enumerate(ops):
            for key, v in end_differential(f, d, d).entries():
                col[(t,) + key] = v
        cols[n] = col
    from .linalg import Eliminator
    e = Eliminator(row_key=repr)
    for n in range(len(params)):
        e.add_column(n, cols[n])
    return [GradedMap(A, A, 1, 1, -1, _param_map(params, vec)) for vec in e.kernel]


def _param_map(params, vec):
    cols: dict = {}
    for n, v in vec.items():
        a, b = params[n]
        cols.setdefault((a,), {})[(b,)] = v
    return cols


def conjugate_structure(s, S, Si):
    """Push a structure forward along a strict isomorphism S (with inverse Si)."""
    from .ibl import make_ibl_structure
    from .linalg import compose, tensor_power
    d = _conj(S, s.complex.d, Si)
    ops = {}
    for c, f in s.ops.items():
        if not f.is_zero():
            ops[c] = compose(tensor_power(S, c.l), compose(f, tensor_power(Si, c.k)))
    return make_ibl_structure(ChainComplex(s.space, d), ops, s.max_weight)


def random_strict_ibl(rng, max_weight: int = 4, conjugate: bool = True):
    """Random dg involutive Lie bialgebra on a 6-dim space (degrees 0 and 1)."""
    from .ibl import make_ibl_structure
    scale = rng.choice([1, 2, -1, Q(1, 2)])
    A, br, co = strict_ibl_ops(scale)
    co = rand_q(rng, 2, allow_zero=False) * co
    basis = compatible_differentials(A, [br, co])
    while True:
        coefs = [rand_q(rng, 2) for _ in basis]
        if any(coefs):
            break
    d = GradedMap.zero(A, A, 1, 1, -1)
    for x, m in zip(coefs, basis):
        d = d + x * m
    s = make_ibl_structure(ChainComplex(A, d), {(2, 1, 0): br, (1, 2, 0): co}, max_weight)
    if conjugate:
        s = conjugate_structure(s, *random_automorphism(rng, A))
    return s


def random_ibl_infinity(rng, max_weight: int = 4, density: float = 0.15):
    """Random IBL-infinity structure with higher operations in every weight.

    Pushes a random strict structure forward along a random infinity-isomorphism,
    solving the morphism equation weight by weight. Returns the structure and the
    isomorphism from the strict one, so callers can re-check it.
    """
    from .morphisms import InfinityMorphism, push_forward, random_infinity_components
    s = random_strict_ibl(rng, max_weight)
    A = s.space
    S, _ = random_automorphism(rng, A)
    comps = random_infinity_components(rng, A, A, max_weight, S, density)
    beta = push_forward(s, comps, A, max_weight)
    return beta, InfinityMorphism(s.truncate(max_weight), beta, comps, max_weight)
