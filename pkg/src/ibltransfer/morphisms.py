"""Infinity-morphisms of IBL-infinity structures.

Components f_c : A^k -> B^l of degree weight(c), including f_0 on the
identity corolla.  The calculus runs on two-row graphs: every external input
enters a vertex of the top row, every external output leaves a vertex of the
bottom row, and every internal edge goes from the top row to the bottom row.
Rows may contain identity vertices; the label of an identity vertex is f_0
(or a plain identity) depending on the operation.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

from .corolla import IDENTITY, Corolla, corollas_up_to
from .evaluation import Op, accumulate, graph_cols
from .graphs import LeveledGraph, row_multiplicity
from .ibl import (
    IBLStructure,
    RelationReport,
    end_differential,
    is_skew,
    skew_symmetrize,
)
from .linalg import (
    Eliminator,
    GradedMap,
    GradedSpace,
    Q,
    compose,
    derivation_power,
    tensor_power,
)
from .linalg.dense import inverse
from .suspension import delta_terms, evaluate_graph_sign


@dataclass(eq=False)
class InfinityMorphism:
    source: IBLStructure
    target: IBLStructure
    comps: dict
    max_weight: int

    def __post_init__(self):
        A, B = self.source.space, self.target.space
        comps = {}
        for c, f in self.comps.items():
            c = Corolla(*c).check()
            if c.weight > self.max_weight:
                continue
            if f.source != A or f.target != B or f.n_in != c.k or f.n_out != c.l:
                raise ValueError(f"component on {c} has the wrong arity or spaces")
            if not f.is_zero() and f.degree != c.weight:
                raise ValueError(f"component on {c} has degree {f.degree}, expected {c.weight}")
            comps[c] = f
        if IDENTITY not in comps:
            raise ValueError("missing weight-0 component")
        for c in corollas_up_to(self.max_weight):
            if c not in comps:
                comps[c] = GradedMap.zero(A, B, c.k, c.l, c.weight)
        self.comps = comps

    @property
    def f0(self) -> GradedMap:
        return self.comps[IDENTITY]

    def comp(self, c) -> GradedMap:
        return self.comps[Corolla(*c)]

    def nonzero(self):
        return [c for c in sorted(self.comps, key=lambda c: (c.weight, c.k, c.l, c.g))
                if not self.comps[c].is_zero()]

    def truncate(self, w: int) -> "InfinityMorphism":
        return InfinityMorphism(self.source.truncate(w), self.target.truncate(w),
                                {c: f for c, f in self.comps.items() if c.weight <= w}, w)

    def is_skew(self) -> bool:
        return all(is_skew(f) for c, f in self.comps.items() if not f.is_zero())

    def __eq__(self, other):
        if not isinstance(other, InfinityMorphism):
            return NotImplemented
        return (self.max_weight == other.max_weight and self.source == other.source
                and self.target == other.target and self.comps == other.comps)

    __hash__ = None  # type: ignore[assignment]


def identity_morphism(s: IBLStructure, max_weight: int | None = None) -> InfinityMorphism:
    W = s.max_weight if max_weight is None else max_weight
    return InfinityMorphism(s.truncate(W), s.truncate(W),
                            {IDENTITY: GradedMap.identity(s.space)}, W)


# two-row graphs

def _set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _compositions(total, parts, minimum):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for x in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in _compositions(total - x, parts - 1, minimum):
            yield (x,) + rest


def _matrices(rows, cols):
    """Nonnegative integer matrices with the given row and column sums."""
    if not rows:
        if all(c == 0 for c in cols):
            yield ()
        return
    r0 = rows[0]

    def fill(j, left, acc):
        if j == len(cols):
            if left == 0:
                yield tuple(acc)
            return
        for x in range(min(left, cols[j]), -1, -1):
            acc.append(x)
            yield from fill(j + 1, left - x, acc)
            acc.pop()
    for row in fill(0, r0, []):
        rest_cols = tuple(c - x for c, x in zip(cols, row))
        for m in _matrices(rows[1:], rest_cols):
            yield (row,) + m


def _bipartite_connected(m, p, q):
    seen_t, seen_b = {0}, set()
    stack = [("t", 0)]
    while stack:
        side, i = stack.pop()
        if side == "t":
            for b in range(q):
                if m[i][b] and b not in seen_b:
                    seen_b.add(b)
                    stack.append(("b", b))
        else:
            for t in range(p):
                if m[t][i] and t not in seen_t:
                    seen_t.add(t)
                    stack.append(("t", t))
    return len(seen_t) == p and len(seen_b) == q


@dataclass(frozen=True)
class RowTerm:
    """A two-row graph with its coefficient; vertices 0..n_bottom-1 form the bottom row."""

    sign: int
    graph: LeveledGraph
    n_bottom: int

    @property
    def bottom(self):
        return self.graph.vertices[:self.n_bottom]

    @property
    def top(self):
        return self.graph.vertices[self.n_bottom:]


def _build_two_row(tops, bots, m):
    # tops: list of (input block, corolla); bots: list of (output block, corolla)
    q = len(bots)
    vertices = [c for _, c in bots] + [c for _, c in tops]
    ins = [[] for _ in vertices]
    outs = [[] for _ in vertices]
    for t, (block, _) in enumerate(tops):
        ins[q + t] = list(block)
    for b, (block, _) in enumerate(bots):
        outs[b] = list(block)
    for t in range(len(tops)):
        for b in range(q):
            for _ in range(m[t][b]):
                j, i = len(outs[q + t]), len(ins[b])
                outs[q + t].append((b, i))
                ins[b].append((q + t, j))
    return LeveledGraph(vertices, ins, outs)


_ROW_CACHE: dict = {}
_ROW_LOCK = threading.Lock()


def two_row_terms(c, rule: str = "any") -> tuple:
    """Two-row decompositions of a corolla.

    rule "any": both rows unrestricted (identity vertices allowed);
    "top1": exactly one non-identity vertex on the top row;
    "bottom1": exactly one non-identity vertex on the bottom row.
    """
    c = Corolla(*c).check()
    key = (c, rule)
    with _ROW_LOCK:
        hit = _ROW_CACHE.get(key)
    if hit is not None:
        return hit
    out = []
    for tparts in _set_partitions(range(c.k)):
        tparts = sorted(tparts)
        p = len(tparts)
        for bparts in _set_partitions(range(c.l)):
            bparts = sorted(bparts)
            q = len(bparts)
            for gv in range(c.g + 1):
                E = c.g - gv + p + q - 1
                if E < max(p, q):
                    continue
                for lts in _compositions(E, p, 1):
                    for kbs in _compositions(E, q, 1):
                        for gens in _compositions(gv, p + q, 0):
                            tops = [(tuple(blk), Corolla(len(blk), lt, gt))
                                    for blk, lt, gt in zip(tparts, lts, gens[:p])]
                            bots = [(tuple(blk), Corolla(kb, len(blk), gb))
                                    for blk, kb, gb in zip(bparts, kbs, gens[p:])]
                            if not _rule_ok(rule, tops, bots):
                                continue
                            for m in _matrices(lts, kbs):
                                if not _bipartite_connected(m, p, q):
                                    continue
                                if not c.is_identity and any(
                                        m[t][b] and tops[t][1].is_identity and bots[b][1].is_identity
                                        for t in range(p) for b in range(q)):
                                    continue
                                g = _build_two_row(tops, bots, m)
                                s, bd = evaluate_graph_sign(g)
                                if bd != c:
                                    raise AssertionError("two-row graph has the wrong boundary")
                                out.append(RowTerm(s, g, q))
    out.sort(key=lambda t: t.graph.sort_key())
    out = tuple(out)
    with _ROW_LOCK:
        _ROW_CACHE[key] = out
    return out


def _rule_ok(rule, tops, bots):
    if rule == "any":
        return True
    row = tops if rule == "top1" else bots
    return sum(1 for _, v in row if not v.is_identity) == 1


# evaluation with several spaces in one index range

class _Layout:
    def __init__(self, *spaces):
        self.offsets = []
        par = []
        for sp in spaces:
            self.offsets.append(len(par))
            par.extend(sp.parity)
        self.par = tuple(par)

    def op(self, f: GradedMap, src: int, tgt: int) -> Op:
        return Op.from_map(f, self.offsets[src], self.offsets[tgt])


def _identity_op(layout, space, slot):
    return layout.op(GradedMap.identity(space), slot, slot)


def _row_sum(c, rule, layout, label, src, tgt, src_dim, tgt_dim, extra_sign=None):
    """Sum over two-row terms; label(row, corolla) gives an Op or None for zero."""
    acc: dict = {}
    for term in two_row_terms(c, rule):
        ops = []
        for v, cor in enumerate(term.graph.vertices):
            o = label("bottom" if v < term.n_bottom else "top", cor)
            if o is None:
                break
            ops.append(o)
        else:
            s = term.sign
            if extra_sign is not None:
                s *= extra_sign(term)
            cols = graph_cols(term.graph, ops, layout.par, src_dim, tgt_dim,
                              layout.offsets[src], layout.offsets[tgt])
            accumulate(acc, cols, s)
    return acc


def _nz(f):
    return None if f is None or f.is_zero() else f


def right_action(f: InfinityMorphism, alpha: IBLStructure, c) -> GradedMap:
    """(f > alpha)(c): one alpha vertex on top, f (f_0 on identities) on the bottom row."""
    c = Corolla(*c)
    A, B = alpha.space, f.target.space
    lay = _Layout(A, B)
    ida = _identity_op(lay, A, 0)
    cache: dict = {}

    def label(row, cor):
        if (row, cor) in cache:
            return cache[(row, cor)]
        if row == "top":
            o = ida if cor.is_identity else (
                lay.op(alpha.ops[cor], 0, 0) if _nz(alpha.ops.get(cor)) else None)
        else:
            g = _nz(f.comps.get(cor))
            o = lay.op(g, 0, 1) if g is not None else None
        cache[(row, cor)] = o
        return o

    def sign(term):
        w = sum(v.weight for v in term.bottom)
        return -1 if w & 1 else 1
    acc = _row_sum(c, "top1", lay, label, 0, 1, A.dim, B.dim, sign)
    return GradedMap(A, B, c.k, c.l, c.weight - 1, acc, check=False)


def left_action(beta: IBLStructure, f: InfinityMorphism, c) -> GradedMap:
    """(beta < f)(c): one beta vertex on the bottom, f on the top row."""
    c = Corolla(*c)
    A, B = f.source.space, beta.space
    lay = _Layout(A, B)
    idb = _identity_op(lay, B, 1)
    cache: dict = {}

    def label(row, cor):
        if (row, cor) in cache:
            return cache[(row, cor)]
        if row == "bottom":
            o = idb if cor.is_identity else (
                lay.op(beta.ops[cor], 1, 1) if _nz(beta.ops.get(cor)) else None)
        else:
            g = _nz(f.comps.get(cor))
            o = lay.op(g, 0, 1) if g is not None else None
        cache[(row, cor)] = o
        return o
    acc = _row_sum(c, "bottom1", lay, label, 0, 1, A.dim, B.dim)
    return GradedMap(A, B, c.k, c.l, c.weight - 1, acc, check=False)


def obstruction(f: InfinityMorphism, c) -> GradedMap:
    """(f > alpha - beta < f)(c) for the structures attached to f."""
    return right_action(f, f.source, c) - left_action(f.target, f, c)


def check_infinity_morphism(f: InfinityMorphism, max_weight: int | None = None) -> RelationReport:
    """Residual d(f_c) - (f > alpha)(c) + (beta < f)(c) per corolla, weight 0 included."""
    W = f.max_weight if max_weight is None else min(max_weight, f.max_weight)
    dA, dB = f.source.complex.d, f.target.complex.d
    res = {}
    for c in [IDENTITY] + corollas_up_to(W):
        fc = f.comps[c]
        r = end_differential(fc, dA, dB)
        if fc.is_zero():
            r = GradedMap.zero(fc.source, fc.target, c.k, c.l, c.weight - 1)
        if c.weight:
            r = r - obstruction(f, c)
        res[c] = r
    return RelationReport(res)


def compose_infinity(g: InfinityMorphism, f: InfinityMorphism, max_weight: int | None = None
                     ) -> InfinityMorphism:
    """g o f: bottom row labeled by g, top row by f, identities by g_0 and f_0."""
    if f.target.space != g.source.space:
        raise ValueError("target of the first morphism is not the source of the second")
    W = min(f.max_weight, g.max_weight) if max_weight is None else max_weight
    if W > min(f.max_weight, g.max_weight):
        raise ValueError("max_weight exceeds the truncation of an input")
    A, B, C = f.source.space, f.target.space, g.target.space
    lay = _Layout(A, B, C)
    cache: dict = {}

    def label(row, cor):
        if (row, cor) in cache:
            return cache[(row, cor)]
        h = _nz((g if row == "bottom" else f).comps.get(cor))
        o = None if h is None else (lay.op(h, 1, 2) if row == "bottom" else lay.op(h, 0, 1))
        cache[(row, cor)] = o
        return o
    comps = {IDENTITY: compose(g.f0, f.f0)}
    for c in corollas_up_to(W):
        acc = _row_sum(c, "any", lay, label, 0, 2, A.dim, C.dim)
        comps[c] = GradedMap(A, C, c.k, c.l, c.weight, acc, check=False)
    return InfinityMorphism(f.source.truncate(W), g.target.truncate(W), comps, W)


def invert_map(f0: GradedMap) -> GradedMap:
    """Exact inverse of a degree-0 1->1 map; ValueError if singular."""
    A, B = f0.source, f0.target
    if A.dims != B.dims or f0.degree != 0:
        raise ValueError("weight-0 component is not invertible")
    cols = {}
    for n in sorted(A.dims):
        src = [j for j, x in enumerate(A.degrees) if x == n]
        tgt = [j for j, x in enumerate(B.degrees) if x == n]
        pos = {j: s for s, j in enumerate(tgt)}
        M = [[Q(0)] * len(src) for _ in tgt]
        for s, j in enumerate(src):
            for (b,), v in f0.cols.get((j,), {}).items():
                M[pos[b]][s] = v
        try:
            Mi = inverse(M)
        except ValueError:
            raise ValueError("weight-0 component is not invertible") from None
        for s, b in enumerate(tgt):
            col = {(src[r],): Mi[r][s] for r in range(len(src)) if Mi[r][s]}
            if col:
                cols[(b,)] = col
    return GradedMap(B, A, 1, 1, 0, cols)


_ROW_MULT: dict = {}


def _row_mult(g) -> int:
    m = _ROW_MULT.get(g)
    if m is None:
        m = _ROW_MULT[g] = row_multiplicity(g)
    return m


def invert_infinity(f: InfinityMorphism, max_weight: int | None = None) -> InfinityMorphism:
    """Two-sided inverse of an infinity-isomorphism up to the weight bound.

    Sum over graphs with all vertices labeled by f and every edge and leg
    by f_0^{-1}, with coefficient (-1)^{#vertices} times the graph sign times
    row_multiplicity (which is 1 unless legs of one vertex can be shared out
    among several vertices of a connected piece).
    """
    W = f.max_weight if max_weight is None else max_weight
    if W > f.max_weight:
        raise ValueError("max_weight exceeds the truncation of the input")
    A = f.source.space
    f0i = invert_map(f.f0)
    lay = _Layout(A)
    labels = {}
    for c, fc in f.comps.items():
        if c.weight and not fc.is_zero():
            labels[c] = lay.op(compose(tensor_power(f0i, c.l), fc), 0, 0)
    comps = {IDENTITY: f0i}
    for c in corollas_up_to(W):
        acc: dict = {}
        for sign, g in delta_terms(c, c.weight):
            ops = [labels.get(v) for v in g.vertices]
            if any(o is None for o in ops):
                continue
            s = -sign if len(ops) & 1 else sign
            accumulate(acc, graph_cols(g, ops, lay.par, A.dim, A.dim), s * _row_mult(g))
        m = GradedMap(A, A, c.k, c.l, c.weight, acc, check=False)
        comps[c] = compose(m, tensor_power(f0i, c.k))
    return InfinityMorphism(f.target.truncate(W), f.source.truncate(W), comps, W)


def _truncated(f: InfinityMorphism, n: int) -> InfinityMorphism:
    """The components of weight < n (weight n and above set to zero)."""
    return InfinityMorphism(f.source, f.target,
                            {c: h for c, h in f.comps.items() if c.weight < n}, f.max_weight)


def obstruction_step(alpha: IBLStructure, beta: IBLStructure, partial: dict, n: int) -> dict:
    """Obstruction cycles at weight n for components known up to weight n-1.

    Raises ValueError if a cycle check fails (the partial data is inconsistent).
    """
    comps = {Corolla(*c): h for c, h in partial.items() if Corolla(*c).weight < n}
    f = InfinityMorphism(alpha, beta, comps, n)
    dA, dB = alpha.complex.d, beta.complex.d
    out = {}
    for c in corollas_up_to(n, n):
        ob = obstruction(f, c)
        if not end_differential(ob, dA, dB).is_zero():
            raise ValueError(f"inconsistent input: obstruction at {c} is not a cycle")
        out[c] = ob
    return out


def hom_differential_solver(A: GradedSpace, B: GradedSpace, dA, dB, k, l, degree):
    """Eliminator for the Hom-complex differential on maps A^k -> B^l of a given degree."""
    Dk = derivation_power(dA, k)
    Dl = derivation_power(dB, l)
    dk_rows: dict = {}
    for a2, col in Dk.cols.items():
        for a, v in col.items():
            dk_rows.setdefault(a, []).append((a2, v))
    sgn = -1 if degree & 1 else 1
    e = Eliminator()
    for a in A.basis_tensors(k):
        da = A.deg(a)
        for b in B.basis_tensors(l):
            if B.deg(b) - da != degree:
                continue
            col: dict = {}
            for b2, v in Dl.cols.get(b, {}).items():
                col[(a, b2)] = col.get((a, b2), 0) + v
            for a2, v in dk_rows.get(a, ()):
                col[(a2, b)] = col.get((a2, b), 0) - sgn * v
            e.add_column((a, b), {x: y for x, y in col.items() if y})
    return e


def extend_to_acyclic(f0: GradedMap, alpha: IBLStructure, target, max_weight: int
                      ) -> InfinityMorphism:
    """Extend a chain map into an acyclic complex to an infinity-morphism (A, alpha) -> (B, 0)."""
    from .complexes import homology_contraction
    from .ibl import zero_structure
    B = target
    if homology_contraction(B).small.space.dim:
        raise ValueError("target complex is not acyclic")
    if not end_differential(f0, alpha.complex.d, B.d).is_zero():
        raise ValueError("f0 is not a chain map")
    W = max_weight
    alpha = alpha.truncate(W)
    beta = zero_structure(B, W)
    comps = {IDENTITY: f0}
    for n in range(1, W + 1):
        cyc = obstruction_step(alpha, beta, comps, n)
        for c, y in cyc.items():
            if y.is_zero():
                comps[c] = GradedMap.zero(alpha.space, B.space, c.k, c.l, c.weight)
                continue
            e = hom_differential_solver(alpha.space, B.space, alpha.complex.d, B.d,
                                        c.k, c.l, c.weight)
            sol = e.preimage({(a, b): v for (a, b), v in y.entries()})
            if sol is None:
                raise RuntimeError(f"no preimage for a cycle at {c}; sign conventions are broken")
            cols: dict = {}
            for (a, b), v in sol.items():
                cols.setdefault(a, {})[b] = v
            h = skew_symmetrize(GradedMap(alpha.space, B.space, c.k, c.l, c.weight, cols))
            comps[c] = h
    return InfinityMorphism(alpha, beta, comps, W)


def push_forward(alpha: IBLStructure, f_comps: dict, target_space, max_weight: int):
    """The structure beta making f an infinity-morphism (A, alpha) -> (B, beta).

    f_0 must be invertible; beta is solved weight by weight from the
    morphism equation, beta_c o f_0^k = (f > alpha)(c) - (rest of beta < f)(c) - d(f_c).
    """
    from .complexes import ChainComplex
    from .ibl import make_ibl_structure, op_degree
    W = max_weight
    alpha = alpha.truncate(W)
    f0 = f_comps[IDENTITY]
    f0i = invert_map(f0)
    dB = compose(f0, compose(alpha.complex.d, f0i))
    Bc = ChainComplex(target_space, dB)
    ops: dict = {}
    for n in range(1, W + 1):
        beta = make_ibl_structure(Bc, ops, W, check_skew=False)
        f = InfinityMorphism(alpha, beta, f_comps, W)
        for c in corollas_up_to(n, n):
            rhs = obstruction(f, c) - end_differential(f.comps[c], alpha.complex.d, dB) \
                if not f.comps[c].is_zero() else obstruction(f, c)
            b = compose(rhs, tensor_power(f0i, c.k))
            if not b.is_zero():
                ops[c] = GradedMap(target_space, target_space, c.k, c.l, op_degree(c), b.cols,
                                   check=False)
    return make_ibl_structure(Bc, ops, W)


def random_infinity_components(rng, A: GradedSpace, B: GradedSpace, max_weight: int,
                               f0: GradedMap, density: float = 0.3, corollas=None) -> dict:
    """Random skew components of degree weight(c) (f_0 given)."""
    from .generators import random_map
    comps = {IDENTITY: f0}
    for c in corollas or corollas_up_to(max_weight):
        m = random_map(rng, A, B, c.k, c.l, c.weight, density, 2)
        if not m.is_zero():
            comps[c] = skew_symmetrize(m)
    return comps


__all__ = ["InfinityMorphism", "identity_morphism", "two_row_terms", "RowTerm", "right_action",
           "left_action", "obstruction", "check_infinity_morphism", "compose_infinity",
           "invert_map", "invert_infinity", "obstruction_step", "extend_to_acyclic",
           "push_forward", "random_infinity_components", "hom_differential_solver"]
