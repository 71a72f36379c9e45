"""Sign calculus of the suspension coproperad, one dimension per corolla c_{k,l,g}.

Port convention for a composite bottom o_r top: the last r outputs of the top
feed the first r inputs of the bottom, in order.  The composite's inputs are
the top's inputs followed by the bottom's remaining inputs; its outputs are the
top's remaining outputs followed by the bottom's outputs.  This is the ordering
for which the sign below makes composition associative.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from itertools import combinations

from .corolla import Corolla
from .graphs import LeveledGraph, PortGraph, canonical_form, enumerate_leveled_graphs
from .linalg import Permutation, perm_sign


def compose_sign(kb: int, lb: int, kt: int, lt: int, r: int) -> int:
    e = ((r - 1) * (r - 2) // 2 + (kb - r) * (kt - r) + (lb - r) * (lt - r)
         + (kb - r) * (lt - r))
    return -1 if e & 1 else 1


def compose_r(bottom, top, r: int):
    """(sign, corolla) of bottom o_r top."""
    b, t = Corolla(*bottom).check(), Corolla(*top).check()
    if not 1 <= r <= min(b.k, t.l):
        raise ValueError(f"r={r} out of range for {b} o {t}")
    return (compose_sign(b.k, b.l, t.k, t.l, r),
            Corolla(b.k + t.k - r, b.l + t.l - r, b.g + t.g + r - 1))


@dataclass(frozen=True)
class SuspensionElement:
    coeff: object
    corolla: Corolla


def act(elem: SuspensionElement, sigma_in: Permutation, tau_out: Permutation) -> SuspensionElement:
    c = elem.corolla
    if len(sigma_in) != c.k or len(tau_out) != c.l:
        raise ValueError("permutation sizes do not match the corolla")
    return SuspensionElement(elem.coeff * sigma_in.sign() * tau_out.sign(), c)


# graph signs

class _Work:
    """Mutable copy of a port graph with edge ids, used during reduction."""

    def __init__(self, g: PortGraph):
        self.verts = dict(enumerate(g.vertices))
        self.edges = {}
        self.ins = {}
        self.outs = {}
        eid = {}
        for n, ((u, j), (w, i)) in enumerate(g.edges()):
            self.edges[n] = (u, w)
            eid[(u, j)] = n
        for v in range(g.n_vertices):
            self.ins[v] = [("x", p) if isinstance(p, int) else ("e", eid[p]) for p in g.ins[v]]
            self.outs[v] = [("x", p) if isinstance(p, int) else ("e", eid[(v, j)])
                            for j, p in enumerate(g.outs[v])]
        self.order = list(range(g.n_vertices))

    def copy(self):
        w = _Work.__new__(_Work)
        w.verts = dict(self.verts)
        w.edges = dict(self.edges)
        w.ins = {v: list(p) for v, p in self.ins.items()}
        w.outs = {v: list(p) for v, p in self.outs.items()}
        w.order = list(self.order)
        return w

    def below(self, v):
        return [self.edges[p[1]][1] for p in self.outs[v] if p[0] == "e"]

    def contractible(self):
        res = set()
        for u, w in self.edges.values():
            if (u, w) in res:
                continue
            stack = [x for x in self.below(u) if x != w]
            seen = set()
            ok = True
            while stack:
                x = stack.pop()
                if x == w:
                    ok = False
                    break
                if x in seen:
                    continue
                seen.add(x)
                stack.extend(self.below(x))
            if ok:
                res.add((u, w))
        return sorted(res)

    def contract(self, u, v):
        """Merge upper vertex u into lower vertex v; returns the sign picked up."""
        verts = self.verts
        wt = lambda x: verts[x].weight
        order = self.order
        pu, pv = order.index(u), order.index(v)
        between = order[pv + 1:pu] if pu > pv else order[pu + 1:pv + 1]
        s = -1 if wt(u) * sum(wt(x) for x in between) & 1 else 1
        order.remove(u)
        order.insert(order.index(v) + 1, u)
        b, t = verts[v], verts[u]
        conn = [i for i, p in enumerate(self.ins[v]) if p[0] == "e" and self.edges[p[1]] == (u, v)]
        cset = set(conn)
        rest_v = [i for i in range(b.k) if i not in cset]
        eids = [self.ins[v][i][1] for i in conn]
        upos = {p[1]: j for j, p in enumerate(self.outs[u]) if p[0] == "e"}
        matched = [upos[e] for e in eids]
        mset = set(matched)
        rest_u = [j for j in range(t.l) if j not in mset]
        r = len(conn)
        s *= perm_sign(conn + rest_v) * perm_sign(rest_u + matched)
        s *= compose_sign(b.k, b.l, t.k, t.l, r)
        new_ins = self.ins[u] + [self.ins[v][i] for i in rest_v]
        new_outs = [self.outs[u][j] for j in rest_u] + self.outs[v]
        for e in eids:
            del self.edges[e]
        for e, (a, c) in list(self.edges.items()):
            if a == u or c == u:
                self.edges[e] = (v if a == u else a, v if c == u else c)
        verts[v] = Corolla(b.k + t.k - r, b.l + t.l - r, b.g + t.g + r - 1)
        del verts[u], self.ins[u], self.outs[u]
        self.ins[v], self.outs[v] = new_ins, new_outs
        order.remove(u)
        return s

    def final(self):
        (v,) = self.verts
        si = perm_sign([p[1] for p in self.ins[v]])
        so = perm_sign([p[1] for p in self.outs[v]])
        return si * so, self.verts[v]


def _work_for(g: PortGraph) -> _Work:
    if not isinstance(g, PortGraph):
        raise TypeError("expected a PortGraph")
    g.validate()
    if any(c.weight < 0 for c in g.vertices):
        raise ValueError("invalid vertex")
    return _Work(g)


def evaluate_graph_sign(g: PortGraph):
    """(sign, boundary corolla) of composing the graph in the suspension properad.

    Vertex order is the tensor order of the vertex labels.  Pairs are merged
    one at a time: the upper vertex is first moved next to the lower one
    (Koszul sign on vertex weights), then ports are brought into the canonical
    position (signature signs) and compose_r is applied.
    """
    w = _work_for(g)
    s = 1
    while len(w.verts) > 1:
        u, v = w.contractible()[0]
        s *= w.contract(u, v)
    f, c = w.final()
    return s * f, c


def reduction_signs(g: PortGraph) -> set:
    """Results of every possible reduction order (used to test order independence)."""
    out = set()

    def rec(w, s):
        if len(w.verts) == 1:
            f, c = w.final()
            out.add((s * f, c))
            return
        for u, v in w.contractible():
            w2 = w.copy()
            s2 = w2.contract(u, v)
            rec(w2, s * s2)
    rec(_work_for(g), 1)
    return out


# the infinitesimal decomposition

@dataclass(frozen=True)
class DeltaTerm:
    """One term of Delta_(1,1)(c).

    ``in_labels[q]`` is the external input label on the composite's input port
    q (top inputs first, then the bottom's unconnected ones) and ``out_labels``
    likewise for outputs (the top's unconnected outputs, then the bottom's).
    ``sigma`` and ``tau`` are the same data as permutations.
    """

    sign: int
    bottom: Corolla
    top: Corolla
    r: int
    in_labels: tuple
    out_labels: tuple

    @property
    def sigma(self) -> Permutation:
        return Permutation(self.in_labels).inverse()

    @property
    def tau(self) -> Permutation:
        return Permutation(self.out_labels)

    def graph(self) -> LeveledGraph:
        """Two-vertex leveled graph: vertex 0 is the bottom, vertex 1 the top."""
        b, t, r = self.bottom, self.top, self.r
        top_in = list(self.in_labels[:t.k])
        bot_in = [(1, t.l - r + j) for j in range(r)] + list(self.in_labels[t.k:])
        top_out = list(self.out_labels[:t.l - r]) + [(0, j) for j in range(r)]
        bot_out = list(self.out_labels[t.l - r:])
        return LeveledGraph([b, t], [bot_in, top_in], [bot_out, top_out])


def _splits(c: Corolla):
    for r in range(1, c.k + c.l + 2 * c.g + 1):
        for gb in range(c.g + 2 - r):
            gt = c.g + 1 - r - gb
            if gt < 0:
                continue
            for kb in range(r, c.k + r):
                kt = c.k + r - kb
                if kt < 1:
                    continue
                for lt in range(r, c.l + r):
                    lb = c.l + r - lt
                    if lb < 1:
                        continue
                    b, t = Corolla(kb, lb, gb), Corolla(kt, lt, gt)
                    if b.weight >= 1 and t.weight >= 1:
                        yield r, b, t


def delta_one_one(c) -> list:
    """All terms of Delta_(1,1)(c), sign = eps * sgn(sigma) * sgn(tau)."""
    c = Corolla(*c).check()
    terms = []
    if c.weight < 2:
        return terms
    for r, b, t in _splits(c):
        eps = compose_sign(b.k, b.l, t.k, t.l, r)
        for top_ins in combinations(range(c.k), t.k):
            chosen = set(top_ins)
            ins = top_ins + tuple(x for x in range(c.k) if x not in chosen)
            si = perm_sign(ins)
            for top_outs in combinations(range(c.l), t.l - r):
                chosen_o = set(top_outs)
                outs = top_outs + tuple(x for x in range(c.l) if x not in chosen_o)
                terms.append(DeltaTerm(eps * si * perm_sign(outs), b, t, r, ins, outs))
    return terms


_DT_CACHE: dict = {}
_DT_LOCK = threading.Lock()


def delta_terms(c, max_vertices: int, leveled: bool = False) -> list:
    """(coefficient, graph) over graphs with at most max_vertices nontrivial vertices.

    By default each unleveled graph appears once, in canonical form; with
    leveled=True every leveled graph appears.
    """
    c = Corolla(*c).check()
    key = (c, max_vertices, leveled)
    with _DT_LOCK:
        hit = _DT_CACHE.get(key)
    if hit is not None:
        return hit
    if leveled:
        graphs = enumerate_leveled_graphs(*c, max_vertices=max_vertices)
    else:
        seen: dict = {}
        for lg in enumerate_leveled_graphs(*c, max_vertices=max_vertices):
            seen.setdefault(canonical_form(PortGraph(*lg.key(), check=False)), None)
        graphs = sorted(seen, key=PortGraph.sort_key)
    out = tuple((evaluate_graph_sign(gr)[0], gr) for gr in graphs)
    with _DT_LOCK:
        _DT_CACHE[key] = out
    return out


__all__ = ["compose_r", "compose_sign", "act", "SuspensionElement", "evaluate_graph_sign",
           "reduction_signs", "DeltaTerm", "delta_one_one", "delta_terms"]
