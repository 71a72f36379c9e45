"""Graded vector spaces and sparse multilinear maps between tensor powers."""
from __future__ import annotations

from collections.abc import Iterable, Mapping
from itertools import product

from .. import kernels
from .perms import Permutation, koszul_sign
from .rational import Q, to_q


class GradedSpace:
    """Finite-dimensional Z-graded space with a fixed basis sorted by degree."""

    __slots__ = ("dims", "degrees", "parity")

    def __init__(self, dims: Mapping[int, int]):
        dims = {int(d): int(n) for d, n in dims.items() if int(n) != 0}
        if any(n < 0 for n in dims.values()):
            raise ValueError("negative dimension")
        self.dims = dict(sorted(dims.items()))
        degs = []
        for d, n in self.dims.items():
            degs.extend([d] * n)
        self.degrees = tuple(degs)
        self.parity = tuple(d & 1 for d in degs)

    @classmethod
    def from_degrees(cls, degrees: Iterable[int]) -> "GradedSpace":
        degrees = list(degrees)
        if degrees != sorted(degrees):
            raise ValueError("basis degrees must be sorted")
        dims: dict = {}
        for d in degrees:
            dims[d] = dims.get(d, 0) + 1
        return cls(dims)

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def deg(self, key: tuple) -> int:
        return sum(self.degrees[a] for a in key)

    def basis_tensors(self, n: int):
        return product(range(self.dim), repeat=n)

    def __eq__(self, other):
        return isinstance(other, GradedSpace) and self.degrees == other.degrees

    def __hash__(self):
        return hash(self.degrees)

    def __repr__(self):
        return f"GradedSpace({self.dims})"


def _add_into(acc: dict, vec: Mapping, scale=1):
    for k, v in vec.items():
        x = acc.get(k, 0) + scale * v
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)


class GradedMap:
    """Homogeneous map source^{(x)n_in} -> target^{(x)n_out} of a fixed degree.

    Stored column-wise: ``cols[in_key] = {out_key: coefficient}`` with zero
    entries never stored.  Treat instances as immutable.
    """

    __slots__ = ("source", "target", "n_in", "n_out", "degree", "cols")

    def __init__(self, source: GradedSpace, target: GradedSpace, n_in: int, n_out: int,
                 degree: int, cols: Mapping | None = None, check: bool = True):
        self.source = source
        self.target = target
        self.n_in = n_in
        self.n_out = n_out
        self.degree = degree
        clean = {}
        for a, col in (cols or {}).items():
            c = {b: Q(v) for b, v in col.items() if v}
            if c:
                clean[tuple(a)] = c
        self.cols = clean
        if check:
            self._check()

    def _check(self):
        sd, td = self.source.degrees, self.target.degrees
        for a, col in self.cols.items():
            if len(a) != self.n_in or any(not 0 <= i < len(sd) for i in a):
                raise ValueError(f"bad input index {a}")
            da = sum(sd[i] for i in a)
            for b in col:
                if len(b) != self.n_out or any(not 0 <= i < len(td) for i in b):
                    raise ValueError(f"bad output index {b}")
                if sum(td[i] for i in b) - da != self.degree:
                    raise ValueError(f"entry {a}->{b} is not of degree {self.degree}")

    # constructors
    @classmethod
    def from_entries(cls, source, target, n_in, n_out, degree, entries):
        cols: dict = {}
        for (a, b), v in entries.items():
            v = to_q(v)
            if v:
                cols.setdefault(tuple(a), {})[tuple(b)] = v
        return cls(source, target, n_in, n_out, degree, cols)

    @classmethod
    def zero(cls, source, target, n_in, n_out, degree):
        return cls(source, target, n_in, n_out, degree, {}, check=False)

    @classmethod
    def identity(cls, space: GradedSpace, n: int = 1):
        cols = {a: {a: Q(1)} for a in space.basis_tensors(n)}
        return cls(space, space, n, n, 0, cols, check=False)

    def _like(self, cols, **kw):
        args = dict(source=self.source, target=self.target, n_in=self.n_in,
                    n_out=self.n_out, degree=self.degree)
        args.update(kw)
        return GradedMap(cols=cols, check=False, **args)

    # inspection
    def entries(self):
        """Sorted list of ((in_key, out_key), value)."""
        return sorted(((a, b), v) for a, col in self.cols.items() for b, v in col.items())

    def __call__(self, vec: Mapping) -> dict:
        """Apply to a sparse vector of source^{(x)n_in}."""
        return kernels.apply_at(vec, range(self.n_in), self.cols, self.source.parity)

    def is_zero(self) -> bool:
        return not self.cols

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols.values())

    def same_shape(self, other) -> bool:
        return (self.source == other.source and self.target == other.target
                and self.n_in == other.n_in and self.n_out == other.n_out)

    def __eq__(self, other):
        if not isinstance(other, GradedMap) or not self.same_shape(other):
            return NotImplemented
        if self.cols != other.cols:
            return False
        return self.degree == other.degree or self.is_zero()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return (f"GradedMap({self.n_in}->{self.n_out}, deg={self.degree}, "
                f"nnz={self.nnz()})")

    # linear structure
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1))

    def __neg__(self):
        return scale(self, -1)

    def __rmul__(self, c):
        return scale(self, c)


def add(f: GradedMap, g: GradedMap) -> GradedMap:
    if not f.same_shape(g):
        raise ValueError("shape mismatch in add")
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    if f.degree != g.degree:
        raise ValueError("degree mismatch in add")
    cols = {a: dict(c) for a, c in f.cols.items()}
    for a, col in g.cols.items():
        tgt = cols.setdefault(a, {})
        _add_into(tgt, col)
        if not tgt:
            del cols[a]
    return f._like(cols)


def scale(f: GradedMap, c) -> GradedMap:
    c = to_q(c)
    if not c:
        return f._like({})
    return f._like({a: {b: c * v for b, v in col.items()} for a, col in f.cols.items()})


def compose(f: GradedMap, g: GradedMap) -> GradedMap:
    """f o g."""
    if g.target != f.source or g.n_out != f.n_in:
        raise ValueError("cannot compose: arity or space mismatch")
    cols = {}
    par = f.source.parity
    for a, col in g.cols.items():
        out = kernels.apply_at(col, range(f.n_in), f.cols, par)
        if out:
            cols[a] = out
    return GradedMap(g.source, f.target, g.n_in, f.n_out, f.degree + g.degree, cols,
                     check=False)


def tensor(f: GradedMap, g: GradedMap) -> GradedMap:
    """(f (x) g)(x (x) y) = (-1)^{|g||x|} f(x) (x) g(y)."""
    if f.source != g.source or f.target != g.target:
        raise ValueError("tensor needs maps between the same spaces")
    sd = f.source.degrees
    gpar = g.degree & 1
    cols = {}
    for a, fa in f.cols.items():
        sa = -1 if gpar and sum(sd[i] for i in a) & 1 else 1
        for b, gb in g.cols.items():
            cols[a + b] = {x + y: sa * u * v for x, u in fa.items() for y, v in gb.items()}
    return GradedMap(f.source, f.target, f.n_in + g.n_in, f.n_out + g.n_out,
                     f.degree + g.degree, cols, check=False)


def permute_inputs(f: GradedMap, sigma: Permutation) -> GradedMap:
    """f o sigma, where sigma moves input factor i to position sigma(i)."""
    if len(sigma) != f.n_in:
        raise ValueError("permutation size mismatch")
    sd = f.source.degrees
    cols = {}
    for a in f.source.basis_tensors(f.n_in):
        moved = sigma.apply(a)
        col = f.cols.get(moved)
        if not col:
            continue
        s = koszul_sign(sigma, [sd[i] for i in a])
        cols[a] = col if s > 0 else {b: -v for b, v in col.items()}
    return f._like(cols)


def permute_outputs(f: GradedMap, tau: Permutation) -> GradedMap:
    """tau o f."""
    if len(tau) != f.n_out:
        raise ValueError("permutation size mismatch")
    par = f.target.parity
    return f._like({a: kernels.permute(col, tau.images, par) for a, col in f.cols.items()})


def tensor_power(f: GradedMap, n: int) -> GradedMap:
    """f^{(x)n} for a 1->1 map f."""
    if f.n_in != 1 or f.n_out != 1:
        raise ValueError("tensor_power needs a 1->1 map")
    if n == 0:
        return GradedMap(f.source, f.target, 0, 0, 0, {(): {(): Q(1)}}, check=False)
    out = f
    for _ in range(n - 1):
        out = tensor(out, f)
    return out


def factor_map(f: GradedMap) -> dict:
    """1->1 map as {index: [(index, coef), ...]} for the factorwise kernels."""
    return {a[0]: [(b[0], v) for b, v in col.items()] for a, col in f.cols.items()}


def derivation_power(d: GradedMap, n: int) -> GradedMap:
    """The differential induced on the n-th tensor power (Koszul rule)."""
    if d.n_in != 1 or d.n_out != 1 or d.source != d.target:
        raise ValueError("derivation_power needs an endomorphism")
    sp = d.source
    par = sp.parity
    dm = factor_map(d)
    odd_d = d.degree & 1
    cols = {}
    for a in sp.basis_tensors(n):
        col: dict = {}
        s = 0
        for j, x in enumerate(a):
            for y, v in dm.get(x, ()):
                k = a[:j] + (y,) + a[j + 1:]
                col[k] = col.get(k, 0) + (-v if s else v)
            if odd_d:
                s ^= par[x]
        col = {k: v for k, v in col.items() if v}
        if col:
            cols[a] = col
    return GradedMap(sp, sp, n, n, d.degree, cols, check=False)
