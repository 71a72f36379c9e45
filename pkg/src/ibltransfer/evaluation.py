"""Evaluation of labeled leveled graphs in the endomorphism properad.

A graph is evaluated level by level.  Going forward (from the inputs down to
the outputs) each vertex label is applied after its input strands are moved
to the front, with their Koszul sign; between consecutive vertices an
optional full-width map (a symmetric homotopy) is applied.  Going backward
the same composite is computed on covectors with transposed maps, which is
cheaper when the output side has fewer basis tensors.

Basis indices of all spaces involved live in one global index range, so a
single parity table serves every strand.
"""
from __future__ import annotations

from . import kernels
from .graphs import PortGraph


class Op:
    """A label: columns in_key -> {out_key: coef} with lazily built rows."""

    __slots__ = ("cols", "_rows", "n_in", "n_out")

    def __init__(self, cols, n_in, n_out):
        self.cols = cols
        self._rows = None
        self.n_in = n_in
        self.n_out = n_out

    @classmethod
    def from_map(cls, f, in_offset: int = 0, out_offset: int = 0) -> "Op":
        if not in_offset and not out_offset:
            return cls(f.cols, f.n_in, f.n_out)
        cols = {tuple(a + in_offset for a in k): {tuple(b + out_offset for b in o): v
                                                  for o, v in col.items()}
                for k, col in f.cols.items()}
        return cls(cols, f.n_in, f.n_out)

    @property
    def rows(self):
        if self._rows is None:
            rows: dict = {}
            for a, col in self.cols.items():
                for b, v in col.items():
                    rows.setdefault(b, {})[a] = v
            self._rows = rows
        return self._rows

    def __bool__(self):
        return bool(self.cols)


def forward(graph: PortGraph, ops, vec: dict, par, between=None) -> dict:
    """Push a vector on the input legs (in label order) through the graph.

    Vertex order must be a level order (vertex 0 at the bottom).  Returns a
    vector on the output legs in label order.
    """
    n = graph.n_vertices
    slots = [("i", x) for x in range(len(graph.in_legs()))]
    for v in range(n - 1, -1, -1):
        if not vec:
            return {}
        wanted = [("i", p) if isinstance(p, int) else ("e", p[0], p[1]) for p in graph.ins[v]]
        pos = [slots.index(w) for w in wanted]
        vec = kernels.apply_at(vec, pos, ops[v].cols, par)
        taken = set(pos)
        rest = [s for t, s in enumerate(slots) if t not in taken]
        produced = [("o", p) if isinstance(p, int) else ("e", v, j)
                    for j, p in enumerate(graph.outs[v])]
        slots = produced + rest
        if v and between is not None and vec:
            vec = between(vec)
    return _to_label_order(vec, slots, par)


def backward(graph: PortGraph, ops, covec: dict, par, between_t=None) -> dict:
    """Pull a covector on the output legs (in label order) up through the graph."""
    n = graph.n_vertices
    slots = [("o", x) for x in range(len(graph.out_legs()))]
    for v in range(n):
        if not covec:
            return {}
        wanted = [("o", p) if isinstance(p, int) else ("e", v, j)
                  for j, p in enumerate(graph.outs[v])]
        pos = [slots.index(w) for w in wanted]
        covec = kernels.apply_at(covec, pos, ops[v].rows, par)
        taken = set(pos)
        rest = [s for t, s in enumerate(slots) if t not in taken]
        produced = [("i", p) if isinstance(p, int) else ("e", p[0], p[1]) for p in graph.ins[v]]
        slots = produced + rest
        if v < n - 1 and between_t is not None and covec:
            covec = between_t(covec)
    return _to_label_order(covec, slots, par)


def _to_label_order(vec, slots, par):
    labels = [s[1] for s in slots]
    if labels == sorted(labels):
        return vec
    return kernels.permute(vec, labels, par)


def evaluate_columns(graph, ops, columns, par, between=None, start=None, finish=None):
    """Forward evaluation for each input basis tensor; returns {col: vec}."""
    out = {}
    for col in columns:
        vec = start(col) if start else {col: 1}
        if not vec:
            continue
        res = forward(graph, ops, vec, par, between)
        if finish and res:
            res = finish(res)
        if res:
            out[col] = res
    return out


def evaluate_rows(graph, ops, rows, par, between_t=None, start=None, finish=None):
    """Backward evaluation for each output basis tensor; returns {row: covec}."""
    out = {}
    for row in rows:
        cv = start(row) if start else {row: 1}
        if not cv:
            continue
        res = backward(graph, ops, cv, par, between_t)
        if finish and res:
            res = finish(res)
        if res:
            out[row] = res
    return out


def rows_to_cols(rows: dict) -> dict:
    cols: dict = {}
    for b, cv in rows.items():
        for a, v in cv.items():
            cols.setdefault(a, {})[b] = v
    return cols


def accumulate(acc: dict, cols: dict, scale=1):
    """acc += scale * cols for column dicts."""
    for a, col in cols.items():
        tgt = acc.setdefault(a, {})
        for b, v in col.items():
            x = tgt.get(b, 0) + scale * v
            if x:
                tgt[b] = x
            else:
                del tgt[b]
        if not tgt:
            del acc[a]


def _basis(dim, n, off):
    from itertools import product
    return (tuple(a + off for a in t) for t in product(range(dim), repeat=n))


def graph_cols(graph, ops, par, src_dim, tgt_dim, src_off=0, tgt_off=0, mode="auto",
               between=None, between_t=None):
    """Matrix of the evaluated graph as columns with offsets removed.

    mode "forward" walks input basis tensors, "backward" walks output ones;
    "auto" picks the side with fewer basis tensors.
    """
    k = len(graph.in_legs())
    l = len(graph.out_legs())
    if mode == "auto":
        mode = "forward" if src_dim ** k <= tgt_dim ** l else "backward"
    if mode == "forward":
        cols = evaluate_columns(graph, ops, _basis(src_dim, k, src_off), par, between)
    else:
        cols = rows_to_cols(evaluate_rows(graph, ops, _basis(tgt_dim, l, tgt_off), par, between_t))
    if not src_off and not tgt_off:
        return cols
    return {tuple(a - src_off for a in key): {tuple(b - tgt_off for b in o): v for o, v in col.items()}
            for key, col in cols.items()}


# families of graphs sharing level prefixes

def _forward_steps(graph):
    n = graph.n_vertices
    slots = [("i", x) for x in range(len(graph.in_legs()))]
    steps = []
    for v in range(n - 1, -1, -1):
        wanted = [("i", p) if isinstance(p, int) else ("e", p[0], p[1]) for p in graph.ins[v]]
        pos = tuple(slots.index(w) for w in wanted)
        steps.append((v, pos))
        taken = set(pos)
        rest = [s for t, s in enumerate(slots) if t not in taken]
        produced = [("o", p) if isinstance(p, int) else ("e", v, j)
                    for j, p in enumerate(graph.outs[v])]
        slots = produced + rest
    return steps, slots


def _backward_steps(graph):
    slots = [("o", x) for x in range(len(graph.out_legs()))]
    steps = []
    for v in range(graph.n_vertices):
        wanted = [("o", p) if isinstance(p, int) else ("e", v, j)
                  for j, p in enumerate(graph.outs[v])]
        pos = tuple(slots.index(w) for w in wanted)
        steps.append((v, pos))
        taken = set(pos)
        rest = [s for t, s in enumerate(slots) if t not in taken]
        produced = [("i", p) if isinstance(p, int) else ("e", p[0], p[1]) for p in graph.ins[v]]
        slots = produced + rest
    return steps, slots


def evaluate_family(items, start_keys, par, between=None, backward_mode=False):
    """Evaluate many labeled graphs with the same number of input (or output) legs.

    ``items`` is a list of (graph, ops, payload).  Graphs whose first levels
    coincide (same labels at the same strand positions) share the work for
    those levels.  Yields (payload, {start_key: vector in leg label order}).
    Forward mode pushes input basis tensors down; backward mode pulls output
    basis covectors up using the label rows and ``between`` as the transpose.
    """
    walk = _backward_steps if backward_mode else _forward_steps
    prepared = []
    for graph, ops, payload in items:
        steps, slots = walk(graph)
        key = tuple((graph.vertices[v], pos) for v, pos in steps)
        prepared.append((key, steps, slots, ops, payload))
    prepared.sort(key=lambda t: t[0])
    init = {a: {a: 1} for a in start_keys}
    stack: list = []  # entries [step key, state before between, state after between]
    for key, steps, slots, ops, payload in prepared:
        common = 0
        while common < len(stack) and common < len(key) and stack[common][0] == key[common]:
            common += 1
        del stack[common:]
        for j in range(common, len(key)):
            if j == 0:
                prev = init
            else:
                ent = stack[j - 1]
                if ent[2] is None:
                    ent[2] = _map_state(ent[1], between) if between is not None else ent[1]
                prev = ent[2]
            v, pos = steps[j]
            table = ops[v].rows if backward_mode else ops[v].cols
            state = {}
            for a, vec in prev.items():
                out = kernels.apply_at(vec, pos, table, par)
                if out:
                    state[a] = out
            stack.append([key[j], state, None])
        final = stack[-1][1] if key else init
        yield payload, {a: _to_label_order(vec, slots, par) for a, vec in final.items()}


def _map_state(state, fn):
    out = {}
    for a, vec in state.items():
        res = fn(vec)
        if res:
            out[a] = res
    return out
