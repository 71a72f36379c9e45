"""Homotopy transfer of IBL-infinity structures along a contraction."""
from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from itertools import product

from . import kernels
from .complexes import Contraction
from .corolla import Corolla, corollas_up_to
from .evaluation import (
    Op,
    accumulate,
    evaluate_columns,
    evaluate_family,
    evaluate_rows,
    rows_to_cols,
)
from .graphs import enumerate_leveled_graphs, leg_multiplicity
from .ibl import IBLStructure, make_ibl_structure, op_degree
from .linalg import GradedMap
from .suspension import evaluate_graph_sign

_SIGN_CACHE: dict = {}
_SIGN_LOCK = threading.Lock()


def graph_sign(g) -> int:
    with _SIGN_LOCK:
        s = _SIGN_CACHE.get(g)
    if s is None:
        s = evaluate_graph_sign(g)[0]
        with _SIGN_LOCK:
            _SIGN_CACHE[g] = s
    return s


def graph_coefficient(g, end: str = "bottom") -> int:
    """Sign times leg multiplicity, peeling from the given end."""
    key = (g, end)
    with _SIGN_LOCK:
        s = _SIGN_CACHE.get(key)
    if s is None:
        s = graph_sign(g) * leg_multiplicity(g, end)
        with _SIGN_LOCK:
            _SIGN_CACHE[key] = s
    return s


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("IBLT_THREADS", "1")))
    except ValueError:
        return 1


class _Adapted:
    """Labels and helpers for evaluating graphs in the adapted frame of a contraction."""

    def __init__(self, s: IBLStructure, c: Contraction):
        if s.complex.space != c.big.space:
            raise ValueError("structure and contraction live on different spaces")
        self.fr = fr = c.frame
        self.r = fr.r
        self.par = fr.par
        self.ops = {}
        for cor, f in s.ops.items():
            if not f.is_zero():
                self.ops[cor] = Op(self._adapt(f), cor.k, cor.l)
        # transposes of the frame maps, for the backward walks
        hrows: dict = {}
        for a, col in fr.hcols.items():
            for b, v in col:
                hrows.setdefault(b, []).append((a, v))
        self.hrows = hrows
        tinv_t: dict = {}
        for a, col in fr.Tinv.items():
            for b, v in col:
                tinv_t.setdefault(b, []).append((a, v))
        self.tinv_t = tinv_t

    def _adapt(self, f: GradedMap) -> dict:
        fr = self.fr
        cols = {}
        n = f.n_in
        for a in product(range(len(fr.degrees)), repeat=n):
            vec = kernels.tensor_apply({a: 1}, fr.T)
            out = kernels.apply_at(vec, range(n), f.cols, f.source.parity)
            if out:
                out = kernels.tensor_apply(out, fr.Tinv)
                if out:
                    cols[a] = out
        return cols

    def h(self, vec):
        return kernels.sym_homotopy(vec, self.fr.hcols, self.r, self.par, self.fr.inv)

    def h_t(self, covec):
        return kernels.sym_homotopy_t(covec, self.hrows, self.r, self.par, self.fr.inv)

    def labels(self, g):
        try:
            return [self.ops[v] for v in g.vertices]
        except KeyError:
            return None


def _h_basis(r, n):
    return product(range(r), repeat=n)


def eval_phi(g, ctx: _Adapted) -> dict:
    """Columns of P o (vertices with H between levels) o I, on H."""
    ops = ctx.labels(g)
    if ops is None:
        return {}
    k, l = len(g.in_legs()), len(g.out_legs())
    r = ctx.r
    if k <= l:
        return evaluate_columns(g, ops, _h_basis(r, k), ctx.par, ctx.h,
                                finish=lambda v: kernels.project_below(v, r))
    rows = evaluate_rows(g, ops, _h_basis(r, l), ctx.par, ctx.h_t,
                         finish=lambda v: kernels.project_below(v, r))
    return rows_to_cols(rows)


def eval_hhi(g, ctx: _Adapted) -> dict:
    """Columns of h_l o (vertices with H between levels) o I, as a map H -> A."""
    ops = ctx.labels(g)
    if ops is None:
        return {}
    k = len(g.in_legs())
    fr = ctx.fr

    def finish(v):
        v = ctx.h(v)
        return kernels.tensor_apply(v, fr.T) if v else v
    return evaluate_columns(g, ops, _h_basis(ctx.r, k), ctx.par, ctx.h, finish=finish)


def eval_phh(g, ctx: _Adapted) -> dict:
    """Columns of P o (vertices with H between levels) o h_k, as a map A -> H."""
    ops = ctx.labels(g)
    if ops is None:
        return {}
    l = len(g.out_legs())

    def finish(cv):
        cv = ctx.h_t(cv)
        return kernels.tensor_apply(cv, ctx.tinv_t) if cv else cv
    return rows_to_cols(evaluate_rows(g, ops, _h_basis(ctx.r, l), ctx.par, ctx.h_t,
                                      finish=finish))


def _graphs_for(c: Corolla, s: IBLStructure, ctx):
    nz = frozenset(ctx.ops)
    return enumerate_leveled_graphs(*c, vertex_ok=lambda v: v in nz, cache_key=nz)


def _sum_graphs(c, s, ctx, evaluator, end="bottom"):
    """Graph-by-graph sum (reference path, used in tests)."""
    acc: dict = {}
    for g in _graphs_for(c, s, ctx):
        cols = evaluator(g, ctx)
        if cols:
            accumulate(acc, cols, graph_coefficient(g, end))
    return acc


def _family_sums(cors, s, ctx, backward: bool, finishes: dict) -> dict:
    """Shared-prefix graph sums for corollas with the same number of start legs.

    ``finishes`` maps a name to (finish function, peeling end).  Returns
    {name: {corolla: columns}}.
    """
    items = []
    for cor in cors:
        for g in _graphs_for(cor, s, ctx):
            ops = ctx.labels(g)
            if ops is not None:
                items.append((g, ops, (cor, g)))
    n = cors[0].l if backward else cors[0].k
    between = ctx.h_t if backward else ctx.h
    out = {name: {cor: {} for cor in cors} for name in finishes}
    starts = list(_h_basis(ctx.r, n))
    for (cor, g), res in evaluate_family(items, starts, ctx.par, between, backward):
        for name, (finish, end) in finishes.items():
            coeff = graph_coefficient(g, end)
            acc = out[name][cor]
            for a, vec in res.items():
                v = finish(vec)
                if v:
                    accumulate(acc, {a: v}, coeff)
    if backward:
        out = {name: {cor: rows_to_cols(rows) for cor, rows in d.items()}
               for name, d in out.items()}
    return out


def _grouped(cors, key):
    groups: dict = {}
    for c in cors:
        groups.setdefault(key(c), []).append(c)
    return [groups[k] for k in sorted(groups)]


def _target_corollas(W, max_genus=None, max_coarity=None):
    return corollas_up_to(W, 1, max_genus, max_coarity)


def _parallel_map(fn, items):
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _collect(jobs):
    """Run (corollas, backward, finishes) jobs and merge the results by name."""
    merged: dict = {}
    for res in _parallel_map(lambda j: _family_sums(j[0], j[1], j[2], j[3], j[4]), jobs):
        for name, d in res.items():
            merged.setdefault(name, {}).update(d)
    return merged


def _finish_project(ctx):
    r = ctx.r
    return lambda v: kernels.project_below(v, r)


def _finish_hhi(ctx):
    T = ctx.fr.T

    def finish(v):
        v = ctx.h(v)
        return kernels.tensor_apply(v, T) if v else v
    return finish


def _finish_phh(ctx):
    def finish(cv):
        cv = ctx.h_t(cv)
        return kernels.tensor_apply(cv, ctx.tinv_t) if cv else cv
    return finish


def _compute(s, c, W, want_nu=True, want_i=False, want_p=False, max_genus=None,
             max_coarity=None):
    if W > s.max_weight:
        raise ValueError("max_weight exceeds the structure's truncation")
    ctx = _Adapted(s, c)
    cors = _target_corollas(W, max_genus, max_coarity)
    jobs = []
    fwd_nu = [x for x in cors if x.k <= x.l] if want_nu else []
    bwd_nu = [x for x in cors if x.k > x.l] if want_nu else []
    fwd_i = cors if want_i else []
    for k, group in ((g[0].k, g) for g in _grouped(set(fwd_nu) | set(fwd_i), lambda x: x.k)):
        fin = {}
        if any(x in fwd_nu for x in group):
            fin["nu"] = (_finish_project(ctx), "bottom")
        if fwd_i:
            fin["i"] = (_finish_hhi(ctx), "bottom")
        jobs.append((sorted(group), s, ctx, False, fin))
    bwd = set(bwd_nu) | (set(cors) if want_p else set())
    for group in _grouped(bwd, lambda x: x.l):
        fin = {}
        if any(x in bwd_nu for x in group):
            fin["nu"] = (_finish_project(ctx), "bottom")
        if want_p:
            fin["p"] = (_finish_phh(ctx), "top")
        jobs.append((sorted(group), s, ctx, True, fin))
    merged = _collect(jobs)
    res = {}
    if want_nu:
        H = c.small.space
        nu_cols = merged.get("nu", {})
        ops = {x: GradedMap(H, H, x.k, x.l, op_degree(x), nu_cols.get(x, {}), check=False)
               for x in cors}
        res["nu"] = make_ibl_structure(c.small, ops, W, check_skew=False)
    A, H = c.big.space, c.small.space
    if want_i:
        res["i"] = {x: GradedMap(H, A, x.k, x.l, x.weight, merged["i"][x], check=False)
                    for x in cors}
    if want_p:
        res["p"] = {}
        for x in cors:
            f = GradedMap(A, H, x.k, x.l, x.weight, merged["p"][x], check=False)
            res["p"][x] = f if p_inf_sign(x) > 0 else -f
    return res


def transfer(s: IBLStructure, c: Contraction, max_weight: int, max_genus=None,
             max_coarity=None) -> IBLStructure:
    """Transferred structure nu on H: nu_c = sum over leveled graphs of coefficient * PHI.

    Absent vertex labels are skipped; genus and coarity caps restrict the
    target corollas (graphs never raise either).
    """
    return _compute(s, c, max_weight, max_genus=max_genus, max_coarity=max_coarity)["nu"]


def p_inf_sign(c: Corolla) -> int:
    """Global sign applied to the PHH graph sum for p_infinity: (-1)^weight."""
    return -1 if c.weight & 1 else 1


def _morphism(src, tgt, comps, f0, W):
    from .morphisms import InfinityMorphism
    comps = dict(comps)
    comps[Corolla(1, 1, 0)] = f0
    return InfinityMorphism(src, tgt, comps, W)


def infinity_in(s: IBLStructure, c: Contraction, max_weight: int, nu: IBLStructure | None = None):
    """i_infinity: (H, nu) -> (A, mu), with weight-0 component i."""
    res = _compute(s, c, max_weight, want_nu=nu is None, want_i=True)
    nu = nu if nu is not None else res["nu"]
    return _morphism(nu, s.truncate(max_weight), res["i"], c.i, max_weight)


def infinity_proj(s: IBLStructure, c: Contraction, max_weight: int,
                  nu: IBLStructure | None = None):
    """p_infinity: (A, mu) -> (H, nu), with weight-0 component p."""
    res = _compute(s, c, max_weight, want_nu=nu is None, want_p=True)
    nu = nu if nu is not None else res["nu"]
    return _morphism(s.truncate(max_weight), nu, res["p"], c.p, max_weight)


def transfer_all(s: IBLStructure, c: Contraction, max_weight: int):
    """(nu, i_infinity, p_infinity) in one pass sharing the graph walks."""
    res = _compute(s, c, max_weight, want_i=True, want_p=True)
    nu, W = res["nu"], max_weight
    return (nu, _morphism(nu, s.truncate(W), res["i"], c.i, W),
            _morphism(s.truncate(W), nu, res["p"], c.p, W))
