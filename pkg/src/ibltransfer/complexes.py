"""Chain complexes, contractions and symmetric homotopies."""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

from . import kernels
from .linalg import GradedMap, GradedSpace, Q, compose, derivation_power, factor_map
from .linalg.dense import inverse
from .linalg.solve import Eliminator


@dataclass(frozen=True, eq=False)
class ChainComplex:
    space: GradedSpace
    d: GradedMap

    def __post_init__(self):
        d = self.d
        if d.source != self.space or d.target != self.space or d.n_in != 1 or d.n_out != 1:
            raise ValueError("differential must be a 1->1 endomorphism of the space")
        if not d.is_zero() and d.degree != -1:
            raise ValueError("differential must have degree -1")
        if not compose(d, d).is_zero():
            raise ValueError("d∘d ≠ 0")

    @classmethod
    def zero(cls, space: GradedSpace) -> "ChainComplex":
        return cls(space, GradedMap.zero(space, space, 1, 1, -1))

    def __eq__(self, other):
        return (isinstance(other, ChainComplex) and self.space == other.space
                and self.d == other.d)

    __hash__ = None  # type: ignore[assignment]

    def d_power(self, n: int) -> GradedMap:
        return derivation_power(self.d, n)


def _d(m: GradedMap) -> GradedMap:
    return m if not m.is_zero() else GradedMap.zero(m.source, m.target, 1, 1, -1)


@dataclass(eq=False)
class Contraction:
    """Contraction (A, H, i, p, h); all side conditions are checked on construction."""

    big: ChainComplex
    small: ChainComplex
    i: GradedMap
    p: GradedMap
    h: GradedMap
    check: bool = True
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if self.check:
            bad = validate_contraction(self)
            if bad:
                raise ValueError("invalid contraction: " + "; ".join(bad))

    @property
    def pi(self) -> GradedMap:
        return compose(self.i, self.p)

    @property
    def frame(self) -> "AdaptedFrame":
        with self._lock:
            fr = self._cache.get("frame")
            if fr is None:
                fr = self._cache["frame"] = AdaptedFrame(self)
            return fr

    def h_n(self, n: int) -> GradedMap:
        return symmetric_homotopy(self, n)


def _shape_ok(m, src, tgt):
    return m.source == src and m.target == tgt and m.n_in == 1 and m.n_out == 1


def validate_contraction(c: Contraction) -> list:
    """Descriptions of the violated conditions; empty when c is a contraction."""
    A, H = c.big.space, c.small.space
    if not (_shape_ok(c.i, H, A) and _shape_ok(c.p, A, H) and _shape_ok(c.h, A, A)):
        raise ValueError("contraction maps have the wrong spaces or arities")
    out = []
    if not c.i.is_zero() and c.i.degree != 0:
        out.append("i does not have degree 0")
    if not c.p.is_zero() and c.p.degree != 0:
        out.append("p does not have degree 0")
    if not c.h.is_zero() and c.h.degree != 1:
        out.append("h does not have degree 1")
    if out:
        return out
    dA, dH = c.big.d, c.small.d
    if compose(dA, c.i) != compose(c.i, dH):
        out.append("i is not a chain map")
    if compose(dH, c.p) != compose(c.p, dA):
        out.append("p is not a chain map")
    if compose(c.p, c.i) != GradedMap.identity(H):
        out.append("p∘i ≠ id")
    lhs = compose(c.i, c.p) - GradedMap.identity(A)
    rhs = compose(dA, c.h) + compose(c.h, dA) if not c.h.is_zero() else GradedMap.zero(A, A, 1, 1, 0)
    if not (lhs - rhs).is_zero():
        out.append("i∘p − id ≠ d∘h + h∘d")
    if not compose(c.h, c.i).is_zero():
        out.append("h∘i ≠ 0")
    if not compose(c.p, c.h).is_zero():
        out.append("p∘h ≠ 0")
    if not compose(c.h, c.h).is_zero():
        out.append("h∘h ≠ 0")
    return out


def identity_contraction(A: ChainComplex) -> Contraction:
    sp = A.space
    ident = GradedMap.identity(sp)
    return Contraction(A, A, ident, ident, GradedMap.zero(sp, sp, 1, 1, 1))


def _vec_to_col(v):
    return {(j,): x for j, x in v.items() if x}


def homology_contraction(A: ChainComplex) -> Contraction:
    """Deterministic contraction of A onto its homology.

    Degree by degree, A_n splits as C_n + B_n + H_n, where C_n is spanned by
    the basis vectors whose d-images are pivots (taken in basis order), B_n is
    the image of C_{n+1}, and H_n is completed greedily from the kernel basis.
    Then h = -(d|C)^{-1} on B and zero on C and H.
    """
    sp = A.space
    degs = sp.degrees
    d = A.d
    by_deg: dict = {}
    for j, x in enumerate(degs):
        by_deg.setdefault(x, []).append(j)
    dcol = {a[0]: {b[0]: v for b, v in col.items()} for a, col in d.cols.items()}

    pivots_c = {}  # degree -> basis indices forming C_n
    kernels_ = {}  # degree -> kernel vectors of d_n
    for n, idx in by_deg.items():
        e = Eliminator()
        chosen = []
        for j in idx:
            if e.add_column(j, dcol.get(j, {})):
                chosen.append(j)
        pivots_c[n] = chosen
        kernels_[n] = e.kernel

    new_basis = {}  # degree -> list of (kind, vector as dict index->Q)
    h_basis = []  # (degree, vector) in H order
    for n in sorted(by_deg):
        C = [{j: Q(1)} for j in pivots_c[n]]
        B = [dict(dcol[j]) for j in pivots_c.get(n + 1, [])]
        e = Eliminator()
        for t, v in enumerate(B):
            e.add_column(("b", t), v)
        Hn = []
        for v in kernels_[n]:
            if e.add_column(("h", len(Hn)), v):
                Hn.append(v)
        new_basis[n] = (C, B, Hn)
        h_basis.extend((n, v) for v in Hn)

    Hsp = GradedSpace.from_degrees([n for n, _ in h_basis])
    i_cols, p_cols, h_cols = {}, {}, {}
    hpos = 0
    for n in sorted(by_deg):
        C, B, Hn = new_basis[n]
        idx = by_deg[n]
        pos = {j: t for t, j in enumerate(idx)}
        cols = C + B + Hn
        if len(cols) != len(idx):
            raise AssertionError("homology splitting has the wrong dimension")
        M = [[Q(0)] * len(idx) for _ in idx]
        for t, v in enumerate(cols):
            for j, x in v.items():
                M[pos[j]][t] = Q(x)
        Minv = inverse(M)
        nc, nb = len(C), len(B)
        cidx_next = pivots_c.get(n + 1, [])
        for t, v in enumerate(Hn):
            i_cols[(hpos + t,)] = _vec_to_col(v)
        for j in idx:
            coords = [Minv[r][pos[j]] for r in range(len(idx))]
            pc = {(hpos + t,): coords[nc + nb + t] for t in range(len(Hn)) if coords[nc + nb + t]}
            if pc:
                p_cols[(j,)] = pc
            hc = {}
            for t in range(nb):
                x = coords[nc + t]
                if x:
                    k = cidx_next[t]
                    hc[(k,)] = hc.get((k,), 0) - x
            hc = {k: v for k, v in hc.items() if v}
            if hc:
                h_cols[(j,)] = hc
        hpos += len(Hn)

    i = GradedMap(Hsp, sp, 1, 1, 0, i_cols)
    p = GradedMap(sp, Hsp, 1, 1, 0, p_cols)
    h = GradedMap(sp, sp, 1, 1, 1, h_cols)
    return Contraction(A, ChainComplex.zero(Hsp), i, p, h)


class AdaptedFrame:
    """Basis of A adapted to A = im(pi) + ker(pi).

    Adapted index t < r stands for i(e_t); indices t >= r run over a basis of
    ker(p) chosen degree by degree.  In this basis pi is a coordinate
    projection, h kills the first r vectors and lands in ker(p).
    """

    def __init__(self, c: Contraction):
        A = c.big.space
        H = c.small.space
        self.r = r = H.dim
        icols = {a[0]: {b[0]: v for b, v in col.items()} for a, col in c.i.cols.items()}
        pcols = {a[0]: {b[0]: v for b, v in col.items()} for a, col in c.p.cols.items()}
        by_deg: dict = {}
        for j, x in enumerate(A.degrees):
            by_deg.setdefault(x, []).append(j)
        adapted = [icols.get(t, {}) for t in range(r)]
        degs = list(H.degrees)
        for n in sorted(by_deg):
            e = Eliminator()
            for j in by_deg[n]:
                e.add_column(j, pcols.get(j, {}))
            for v in e.kernel:
                adapted.append(v)
                degs.append(n)
        if len(adapted) != A.dim:
            raise AssertionError("adapted basis has the wrong size")
        self.degrees = tuple(degs)
        self.par = tuple(x & 1 for x in degs)
        # T: adapted -> A ; Tinv: A -> adapted (block inverse per degree)
        self.T = {t: sorted(v.items()) for t, v in enumerate(adapted)}
        Tinv: dict = {}
        for n, idx in by_deg.items():
            ts = [t for t, x in enumerate(degs) if x == n]
            pos = {j: s for s, j in enumerate(idx)}
            M = [[Q(0)] * len(ts) for _ in idx]
            for s, t in enumerate(ts):
                for j, x in adapted[t].items():
                    M[pos[j]][s] = Q(x)
            Minv = inverse(M)
            for j in idx:
                Tinv[j] = [(ts[s], Minv[s][pos[j]]) for s in range(len(ts)) if Minv[s][pos[j]]]
        self.Tinv = Tinv
        hm = factor_map(c.h)
        hcols = {}
        for t in range(r, len(adapted)):
            acc: dict = {}
            for j, x in self.T[t]:
                for k, y in hm.get(j, ()):
                    for s, z in Tinv[k]:
                        acc[s] = acc.get(s, 0) + x * y * z
            hcols[t] = [(s, v) for s, v in sorted(acc.items()) if v]
            if any(s < r for s, _ in hcols[t]):
                raise AssertionError("h does not land in ker p")
        self.hcols = hcols
        self.inv = [None] + [Q(1, m) for m in range(1, 64)]

    def to_adapted(self, vec):
        return kernels.tensor_apply(vec, self.Tinv)

    def from_adapted(self, vec):
        return kernels.tensor_apply(vec, self.T)

    def h_w(self, vec):
        return kernels.sym_homotopy(vec, self.hcols, self.r, self.par, self.inv)


def symmetric_homotopy(c: Contraction, n: int) -> GradedMap:
    """h_n: the S_n-average of sum_k id^{k-1} (x) h (x) pi^{n-k}.

    Computed in the adapted frame, where the average collapses to
    (1/|K|) sum over the ker(pi) factors of h placed at that factor.
    """
    if n < 1:
        raise ValueError("n must be positive")
    key = ("h", n)
    with c._lock:
        hit = c._cache.get(key)
    if hit is not None:
        return hit
    A = c.big.space
    fr = c.frame
    cols = {}
    for a in A.basis_tensors(n):
        v = fr.from_adapted(fr.h_w(fr.to_adapted({a: Q(1)})))
        if v:
            cols[a] = v
    out = GradedMap(A, A, n, n, 1, cols, check=False)
    with c._lock:
        c._cache[key] = out
    return out
