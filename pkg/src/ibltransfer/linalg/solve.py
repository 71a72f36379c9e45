"""Exact sparse Gaussian elimination."""
from __future__ import annotations

import heapq
from collections.abc import Callable, Hashable, Iterable, Mapping

from .maps import GradedMap
from .rational import Q


class Eliminator:
    """Incremental column echelon form over Q.

    Columns are added in a fixed order.  Each column is reduced against the
    existing pivots in increasing row order; a nonzero remainder becomes a new
    pivot at its smallest row, a zero remainder records a kernel vector.
    """

    def __init__(self, row_key: Callable | None = None):
        self.row_key = row_key or (lambda r: r)
        self.pivots: dict = {}  # row -> (vector, combination of columns)
        self.kernel: list = []

    def _reduce(self, vec: dict, comb: dict):
        key = self.row_key
        heap = [(key(r), r) for r in vec if r in self.pivots]
        heapq.heapify(heap)
        while heap:
            _, r = heapq.heappop(heap)
            c = vec.get(r)
            if not c:
                continue
            pv, pc = self.pivots[r]
            f = c / pv[r]
            for rr, x in pv.items():
                y = vec.get(rr, 0) - f * x
                if y:
                    if rr not in vec and rr in self.pivots:
                        heapq.heappush(heap, (key(rr), rr))
                    vec[rr] = y
                else:
                    vec.pop(rr, None)
            for cc, x in pc.items():
                y = comb.get(cc, 0) - f * x
                if y:
                    comb[cc] = y
                else:
                    comb.pop(cc, None)
        return vec, comb

    def add_column(self, name: Hashable, col: Mapping) -> bool:
        """Add a column; returns True when it increases the rank."""
        vec, comb = self._reduce({r: Q(v) for r, v in col.items() if v}, {name: Q(1)})
        if vec:
            r = min(vec, key=self.row_key)
            self.pivots[r] = (vec, comb)
            return True
        self.kernel.append(comb)
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def preimage(self, y: Mapping):
        """Combination of columns mapping to y, or None if y is not in the span."""
        vec, comb = self._reduce({r: Q(v) for r, v in y.items() if v}, {})
        if vec:
            return None
        return {c: -v for c, v in comb.items() if v}


def _map_columns(d: GradedMap):
    sd = d.source.degrees
    names = sorted(d.source.basis_tensors(d.n_in), key=lambda a: (sum(sd[i] for i in a), a))
    td = d.target.degrees
    row_key = lambda b: (sum(td[i] for i in b), b)
    return names, row_key


def eliminate(columns: Iterable, row_key: Callable | None = None) -> Eliminator:
    """Echelon form of (name, column) pairs taken in the given order."""
    e = Eliminator(row_key)
    for name, col in columns:
        e.add_column(name, col)
    return e


def _eliminator_for(d: GradedMap) -> Eliminator:
    names, row_key = _map_columns(d)
    return eliminate(((a, d.cols.get(a, {})) for a in names), row_key)


def solve_preimage(d: GradedMap, y: Mapping):
    """Some x with d(x) = y, or None.  Pivots go lowest degree first, then by index."""
    return _eliminator_for(d).preimage(y)


def kernel_basis(d: GradedMap) -> list:
    return _eliminator_for(d).kernel


def rank(d: GradedMap) -> int:
    return _eliminator_for(d).rank
