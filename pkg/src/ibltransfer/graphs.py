"""Directed connected port graphs, leveled graphs and their enumeration.

Edges flow downwards.  A port endpoint is either an int (an external leg
label, 0-based) or a pair (vertex, port) naming the port at the other end of
an internal edge.  ``ins[v][i]`` is what feeds in-port i of vertex v and
``outs[v][j]`` is where out-port j of v goes.
"""
from __future__ import annotations

import threading
from collections.abc import Callable, Sequence
from itertools import combinations, product
from math import factorial

from .corolla import Corolla


class PortGraph:
    __slots__ = ("vertices", "ins", "outs", "_hash")

    def __init__(self, vertices: Sequence, ins: Sequence, outs: Sequence, check: bool = True):
        self.vertices = tuple(Corolla(*v) for v in vertices)
        self.ins = tuple(tuple(_ep(p) for p in x) for x in ins)
        self.outs = tuple(tuple(_ep(p) for p in x) for x in outs)
        self._hash = None
        if check:
            self.validate()

    # construction helpers
    @classmethod
    def from_edges(cls, vertices, edges, inputs, outputs, check=True):
        """Build from edges {id: ((upper, out_port), (lower, in_port))} and leg maps
        {label: (vertex, port)}."""
        vertices = [Corolla(*v) for v in vertices]
        ins = [[None] * v.k for v in vertices]
        outs = [[None] * v.l for v in vertices]
        for (u, j), (w, i) in edges.values():
            if outs[u][j] is not None or ins[w][i] is not None:
                raise ValueError("port used twice")
            outs[u][j] = (w, i)
            ins[w][i] = (u, j)
        for lab, (v, i) in inputs.items():
            if ins[v][i] is not None:
                raise ValueError("port used twice")
            ins[v][i] = lab
        for lab, (v, j) in outputs.items():
            if outs[v][j] is not None:
                raise ValueError("port used twice")
            outs[v][j] = lab
        if any(p is None for x in ins + outs for p in x):
            raise ValueError("unused port")
        return cls(vertices, ins, outs, check)

    @classmethod
    def single(cls, c: Corolla) -> "PortGraph":
        c = Corolla(*c)
        return cls([c], [tuple(range(c.k))], [tuple(range(c.l))])

    # basic data
    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def edges(self):
        """List of ((upper, out_port), (lower, in_port))."""
        return [((u, j), p) for u, x in enumerate(self.outs) for j, p in enumerate(x)
                if not isinstance(p, int)]

    def in_legs(self) -> dict:
        return {p: (v, i) for v, x in enumerate(self.ins) for i, p in enumerate(x)
                if isinstance(p, int)}

    def out_legs(self) -> dict:
        return {p: (v, j) for v, x in enumerate(self.outs) for j, p in enumerate(x)
                if isinstance(p, int)}

    @property
    def genus(self) -> int:
        return len(self.edges()) - self.n_vertices + 1

    def boundary(self) -> Corolla:
        return Corolla(len(self.in_legs()), len(self.out_legs()),
                       sum(v.g for v in self.vertices) + self.genus)

    @property
    def weight(self) -> int:
        return sum(v.weight for v in self.vertices)

    def below(self, v) -> list:
        return [p[0] for p in self.outs[v] if not isinstance(p, int)]

    def is_leveled(self) -> bool:
        return all(u > w for (u, _), (w, _) in self.edges())

    def validate(self):
        n = len(self.vertices)
        if n == 0:
            raise ValueError("empty graph")
        if len(self.ins) != n or len(self.outs) != n:
            raise ValueError("port lists do not match vertices")
        for v, c in enumerate(self.vertices):
            if c.k < 1 or c.l < 1 or c.g < 0:
                raise ValueError(f"invalid corolla at vertex {v}")
            if len(self.ins[v]) != c.k or len(self.outs[v]) != c.l:
                raise ValueError(f"port count mismatch at vertex {v}")
        for v, x in enumerate(self.ins):
            for i, p in enumerate(x):
                if not isinstance(p, int):
                    u, j = p
                    if not (0 <= u < n and 0 <= j < len(self.outs[u])) or self.outs[u][j] != (v, i):
                        raise ValueError("inconsistent edge")
        for u, x in enumerate(self.outs):
            for j, p in enumerate(x):
                if not isinstance(p, int):
                    w, i = p
                    if not (0 <= w < n and 0 <= i < len(self.ins[w])) or self.ins[w][i] != (u, j):
                        raise ValueError("inconsistent edge")
        li, lo = self.in_legs(), self.out_legs()
        if sorted(li) != list(range(len(li))) or len(li) != sum(
                1 for x in self.ins for p in x if isinstance(p, int)):
            raise ValueError("input legs must be labeled 0..k-1 bijectively")
        if sorted(lo) != list(range(len(lo))) or len(lo) != sum(
                1 for x in self.outs for p in x if isinstance(p, int)):
            raise ValueError("output legs must be labeled 0..l-1 bijectively")
        # connectivity
        adj = [set() for _ in range(n)]
        for (u, _), (w, _) in self.edges():
            adj[u].add(w)
            adj[w].add(u)
        seen, stack = {0}, [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != n:
            raise ValueError("graph is disconnected")
        if topological_order(self) is None:
            raise ValueError("graph has a directed cycle")

    def relabel_vertices(self, order: Sequence[int]) -> "PortGraph":
        """New graph whose vertex t is old vertex order[t]."""
        new = {old: t for t, old in enumerate(order)}

        def m(p):
            return p if isinstance(p, int) else (new[p[0]], p[1])
        return PortGraph([self.vertices[o] for o in order],
                         [[m(p) for p in self.ins[o]] for o in order],
                         [[m(p) for p in self.outs[o]] for o in order], check=False)

    def key(self):
        return (self.vertices, self.ins, self.outs)

    def sort_key(self):
        f = lambda x: tuple(tuple((0, p, 0) if isinstance(p, int) else (1,) + p for p in y)
                            for y in x)
        return (self.n_vertices, self.vertices, f(self.ins), f(self.outs))

    def __eq__(self, other):
        return isinstance(other, PortGraph) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return f"PortGraph({[tuple(v) for v in self.vertices]}, ins={self.ins}, outs={self.outs})"


def _ep(p):
    if isinstance(p, int):
        return p
    return (int(p[0]), int(p[1]))


class LeveledGraph(PortGraph):
    """Port graph whose vertex order is its level order (vertex 0 at the bottom)."""

    __slots__ = ()

    def validate(self):
        super().validate()
        if not self.is_leveled():
            raise ValueError("vertex order does not refine the edge order")


def topological_order(g: PortGraph):
    """Some bottom-to-top linear extension, or None if there is a cycle."""
    n = g.n_vertices
    above = [0] * n  # number of edges coming from above
    for (_, _), (w, _) in g.edges():
        above[w] += 1
    # bottom-up: vertices with no outgoing internal edges first
    out_deg = [len(g.below(v)) for v in range(n)]
    ready = [v for v in range(n) if out_deg[v] == 0]
    order = []
    preds: list = [[] for _ in range(n)]
    for (u, _), (w, _) in g.edges():
        preds[w].append(u)
    while ready:
        ready.sort()
        v = ready.pop(0)
        order.append(v)
        for u in preds[v]:
            out_deg[u] -= 1
            if out_deg[u] == 0:
                ready.append(u)
    return order if len(order) == n else None


def linear_extensions(g: PortGraph) -> list:
    """All bottom-to-top orders of the vertices compatible with the edges."""
    n = g.n_vertices
    below = [set(g.below(v)) for v in range(n)]
    res = []

    def rec(order, placed):
        if len(order) == n:
            res.append(tuple(order))
            return
        for v in range(n):
            if v not in placed and below[v] <= placed:
                placed.add(v)
                order.append(v)
                rec(order, placed)
                order.pop()
                placed.discard(v)
    if topological_order(g) is None:
        raise ValueError("graph has a directed cycle")
    rec([], set())
    return res


def levelizations(g: PortGraph) -> list:
    return [LeveledGraph(*g.relabel_vertices(o).key()) for o in linear_extensions(g)]


def edge_counts(g: PortGraph) -> dict:
    """(upper, lower) -> number of parallel edges."""
    e: dict = {}
    for (u, _), (w, _) in g.edges():
        e[(u, w)] = e.get((u, w), 0) + 1
    return e


def _components(vs, e):
    adj = {v: set() for v in vs}
    for (a, b) in e:
        if a in adj and b in adj:
            adj[a].add(b)
            adj[b].add(a)
    left, out = set(vs), []
    while left:
        x = left.pop()
        comp, stack = {x}, [x]
        while stack:
            for z in adj[stack.pop()]:
                if z in left:
                    left.discard(z)
                    comp.add(z)
                    stack.append(z)
        out.append(sorted(comp))
    return out


def leg_multiplicity(g: LeveledGraph, end: str = "bottom") -> int:
    """Number of leg labelings of a leveled graph that build it one level at a time.

    Peeling the extreme vertex v at the given end leaves connected pieces U;
    the legs of U attached to v can be distributed in
    (sum_u e(u, v))! / prod_u e(u, v)! ways, and each piece recurses.
    This is 1 on trees and on graphs whose end vertex meets every piece
    through one vertex.
    """
    if end not in ("bottom", "top"):
        raise ValueError("end must be 'bottom' or 'top'")
    e = edge_counts(g)

    def m(vs):
        if len(vs) <= 1:
            return 1
        v = vs[0] if end == "bottom" else vs[-1]
        rest = [x for x in vs if x != v]
        acc = 1
        for U in _components(rest, e):
            counts = [e.get((u, v) if end == "bottom" else (v, u), 0) for u in U]
            acc *= factorial(sum(counts)) * m(U)
            for n in counts:
                acc //= factorial(n)
        return acc
    return m(list(range(g.n_vertices)))


def _row_peel(vs, rows, e):
    if not vs:
        return 1
    lo = min(rows[v] for v in vs)
    low = [v for v in vs if rows[v] == lo]
    acc = 1
    for U in _components([v for v in vs if rows[v] != lo], e):
        for b in low:
            counts = [e.get((u, b), 0) for u in U]
            acc *= factorial(sum(counts))
            for n in counts:
                acc //= factorial(n)
        acc *= _row_peel(U, rows, e)
    return acc


def row_multiplicity(g: PortGraph) -> int:
    """(-1)^#V times the alternating sum over stackings of g into nonempty rows.

    A stacking puts each vertex in a row so that every edge goes strictly
    down; it is weighted by (-1)^{#rows} and by the number of leg labelings
    reproducing g when the rows are composed one under the other (peel the
    bottom row, distribute the legs of each connected piece above it).  Equals 1
    whenever no vertex meets a piece through several vertices.
    """
    n = g.n_vertices
    e = edge_counts(g)
    total = 0
    for nr in range(1, n + 1):
        for rows in product(range(nr), repeat=n):
            if len(set(rows)) != nr or any(rows[u] <= rows[w] for (u, w) in e):
                continue
            m = _row_peel(list(range(n)), rows, e)
            total += -m if nr & 1 else m
    return -total if n & 1 else total


# canonical forms

def _port_keys(g: PortGraph):
    ins = tuple(tuple(sorted((0, p) if isinstance(p, int) else (1, p[0]) for p in x)) for x in g.ins)
    outs = tuple(tuple(sorted((0, p) if isinstance(p, int) else (1, p[0]) for p in x)) for x in g.outs)
    return ins, outs


def _from_port_keys(vertices, in_keys, out_keys, cls=PortGraph):
    n = len(vertices)
    ins = [[None] * len(x) for x in in_keys]
    outs = [[None] * len(x) for x in out_keys]
    pending: dict = {}
    for w in range(n):
        for i, (kind, x) in enumerate(in_keys[w]):
            if kind == 0:
                ins[w][i] = x
            else:
                pending.setdefault((x, w), []).append(i)
    for u in range(n):
        cnt: dict = {}
        for j, (kind, x) in enumerate(out_keys[u]):
            if kind == 0:
                outs[u][j] = x
            else:
                t = cnt.get(x, 0)
                cnt[x] = t + 1
                i = pending[(u, x)][t]
                outs[u][j] = (x, i)
                ins[x][i] = (u, j)
    return cls(vertices, ins, outs, check=False)


def canonical_form(g: PortGraph) -> PortGraph:
    """Canonical representative.

    A leveled graph keeps its level order and only has its ports normalized
    (external legs first by label, then internal edges grouped by the vertex at
    the other end, parallel edges matched in order).  A general port graph is
    first relabeled by the linear extension giving the smallest encoding.
    """
    if isinstance(g, LeveledGraph):
        ins, outs = _port_keys(g)
        return _from_port_keys(g.vertices, ins, outs, LeveledGraph)
    best = None
    for o in linear_extensions(g):
        h = g.relabel_vertices(o)
        ins, outs = _port_keys(h)
        enc = (h.vertices, ins, outs)
        if best is None or enc < best:
            best = enc
    return _from_port_keys(*best)


def equals(g1: PortGraph, g2: PortGraph) -> bool:
    return canonical_form(g1) == canonical_form(g2)


# enumeration

def _assign_labels(counts, labels):
    """Ways to hand out the given labels: counts[t] labels to slot t (sets)."""
    if not counts:
        yield ()
        return
    first, rest = counts[0], counts[1:]
    for chosen in combinations(labels, first):
        remaining = [x for x in labels if x not in chosen]
        for tail in _assign_labels(rest, remaining):
            yield (chosen,) + tail


def _count_choices(avail: list, need: int):
    """Vectors m with 0 <= m[t] <= avail[t] and sum m = need."""
    if not avail:
        if need == 0:
            yield ()
        return
    for x in range(min(avail[0], need) + 1):
        for tail in _count_choices(avail[1:], need - x):
            yield (x,) + tail


def _connected(n, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for a, b in edges:
        parent[find(a)] = find(b)
    return len({find(x) for x in range(n)}) == 1


def _enumerate(k, l, g, vertex_ok, max_vertices):
    total = k + l + 2 * g - 2
    results = []
    # placed vertices are indexed top-down; each is (corolla, number of external
    # inputs, multiplicities of edges from earlier vertices).  Leg labels are
    # handed out at the end, since levels already tell vertices apart.
    placed: list = []

    def rec(labels_left, open_outs, budget):
        if budget == 0:
            if labels_left or sum(open_outs) != l:
                return
            n = len(placed)
            edges = [(t, s) for t, (_, _, m) in enumerate(placed) for s, x in enumerate(m) if x]
            if not _connected(n, edges):
                return
            in_counts = [x for _, x, _ in placed]
            for ins in _assign_labels(in_counts, list(range(k))):
                for outs in _assign_labels(list(open_outs), list(range(l))):
                    results.append(_build(placed, ins, outs))
            return
        if max_vertices is not None and len(placed) >= max_vertices:
            return
        avail = list(open_outs)
        kmax = labels_left + sum(avail)
        for kv in range(1, kmax + 1):
            for nlab in range(min(kv, labels_left) + 1):
                if not placed and nlab != kv:
                    continue
                for m in _count_choices(avail, kv - nlab):
                    for lv in range(1, budget + 3 - kv):
                        for gv in range(budget + 1):
                            c = Corolla(kv, lv, gv)
                            w = c.weight
                            if w < 1:
                                continue
                            if w > budget:
                                break
                            if vertex_ok is not None and not vertex_ok(c):
                                continue
                            new_open = [a - b for a, b in zip(open_outs, m)] + [lv]
                            placed.append((c, nlab, m))
                            rec(labels_left - nlab, new_open, budget - w)
                            placed.pop()

    rec(k, [], total)
    return results


def _build(placed, in_sets, out_sets):
    """Leveled graph from top-down placement data and leg label sets."""
    n = len(placed)
    lev = lambda t: n - 1 - t
    vertices = [None] * n
    in_keys = [None] * n
    out_keys: list = [[] for _ in range(n)]
    for t, (c, _, m) in enumerate(placed):
        v = lev(t)
        vertices[v] = c
        ik = [(0, x) for x in in_sets[t]]
        for s, x in enumerate(m):
            ik.extend([(1, lev(s))] * x)
            out_keys[lev(s)].extend([(1, v)] * x)
        in_keys[v] = tuple(sorted(ik))
    for t, labs in enumerate(out_sets):
        out_keys[lev(t)].extend((0, x) for x in labs)
    out_keys = [tuple(sorted(x)) for x in out_keys]
    return _from_port_keys(vertices, in_keys, out_keys, LeveledGraph)


_CACHE: dict = {}
_LOCK = threading.Lock()


def enumerate_leveled_graphs(k: int, l: int, g: int, max_weight: int | None = None,
                             max_vertices: int | None = None,
                             vertex_ok: Callable | None = None, cache_key=None) -> list:
    """All leveled graphs with nontrivial vertices and boundary (k, l, g), in a fixed order."""
    c = Corolla(k, l, g).check()
    if max_weight is not None and c.weight > max_weight:
        raise ValueError("max_weight is below the weight of the boundary corolla")
    if c.weight < 1:
        return []
    key = (k, l, g, max_vertices, cache_key) if (vertex_ok is None or cache_key) else None
    if key is not None:
        with _LOCK:
            hit = _CACHE.get(key)
        if hit is not None:
            return hit
    res = _enumerate(k, l, g, vertex_ok, max_vertices)
    res.sort(key=PortGraph.sort_key)
    res = tuple(res)
    if key is not None:
        with _LOCK:
            _CACHE[key] = res
    return res


def enumerate_graphs(k: int, l: int, g: int, max_vertices: int | None = None) -> list:
    """Unleveled canonical graphs (each isomorphism class of labeled graph once)."""
    seen = {}
    for lg in enumerate_leveled_graphs(k, l, g, max_vertices=max_vertices):
        cf = canonical_form(PortGraph(*lg.key(), check=False))
        seen.setdefault(cf, None)
    return sorted(seen, key=PortGraph.sort_key)


__all__ = ["PortGraph", "LeveledGraph", "canonical_form", "equals", "enumerate_leveled_graphs",
           "enumerate_graphs", "edge_counts", "leg_multiplicity", "levelizations", "row_multiplicity", "linear_extensions", "topological_order"]
