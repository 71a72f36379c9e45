"""IBL-infinity structures and the Maurer-Cartan relations."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

from .complexes import ChainComplex
from .corolla import Corolla, corollas_up_to
from .evaluation import Op, accumulate, graph_cols
from .linalg import (
    GradedMap,
    Permutation,
    Q,
    compose,
    derivation_power,
    permute_inputs,
    permute_outputs,
)
from .linalg.perms import perm_sign
from .suspension import delta_one_one


def op_degree(c: Corolla) -> int:
    return c.k + c.l + 2 * c.g - 3


def _adjacent(n):
    for i in range(n - 1):
        im = list(range(n))
        im[i], im[i + 1] = i + 1, i
        yield Permutation(im)


def is_skew(f: GradedMap) -> bool:
    """Inputs and outputs permute by the sign representation (Koszul-graded action)."""
    for s in _adjacent(f.n_in):
        if permute_inputs(f, s) != -f:
            return False
    for t in _adjacent(f.n_out):
        if permute_outputs(f, t) != -f:
            return False
    return True


def skew_symmetrize(f: GradedMap) -> GradedMap:
    """(1/(k! l!)) sum sgn(s) sgn(t) t o f o s."""
    from itertools import permutations
    acc = GradedMap.zero(f.source, f.target, f.n_in, f.n_out, f.degree)
    for si in permutations(range(f.n_in)):
        g = permute_inputs(f, Permutation(si))
        if perm_sign(si) < 0:
            g = -g
        for to in permutations(range(f.n_out)):
            h = permute_outputs(g, Permutation(to))
            acc = acc + (h if perm_sign(to) > 0 else -h)
    return acc.__rmul__(Q(1, factorial(f.n_in) * factorial(f.n_out)))


@dataclass(eq=False)
class IBLStructure:
    """Operations mu_{k,l,g} on a complex, for all corollas of weight 1..max_weight.

    Absent corollas are stored as zero maps.
    """

    complex: ChainComplex
    ops: dict
    max_weight: int
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def space(self):
        return self.complex.space

    def op(self, c) -> GradedMap:
        return self.ops[Corolla(*c)]

    def corollas(self):
        return sorted(self.ops, key=lambda c: (c.weight, c.k, c.l, c.g))

    def nonzero(self):
        return [c for c in self.corollas() if not self.ops[c].is_zero()]

    def truncate(self, w: int) -> "IBLStructure":
        return IBLStructure(self.complex, {c: f for c, f in self.ops.items() if c.weight <= w}, w)

    def __eq__(self, other):
        if not isinstance(other, IBLStructure):
            return NotImplemented
        return (self.complex == other.complex and self.max_weight == other.max_weight
                and self.ops == other.ops)

    __hash__ = None  # type: ignore[assignment]


def make_ibl_structure(A: ChainComplex, raw_ops: dict, max_weight: int,
                       enforce_skew: bool = False, check_skew: bool = True) -> IBLStructure:
    sp = A.space
    ops = {}
    for c, f in raw_ops.items():
        c = Corolla(*c).check()
        if c.weight < 1:
            raise ValueError(f"operation on {c}: only corollas of weight >= 1 carry operations")
        if c.weight > max_weight:
            raise ValueError(f"operation on {c} exceeds max weight {max_weight}")
        if f.source != sp or f.target != sp or f.n_in != c.k or f.n_out != c.l:
            raise ValueError(f"operation on {c} has the wrong arity or spaces")
        if not f.is_zero() and f.degree != op_degree(c):
            raise ValueError(f"operation on {c} has degree {f.degree}, expected {op_degree(c)}")
        if f.is_zero():
            f = GradedMap.zero(sp, sp, c.k, c.l, op_degree(c))
        if enforce_skew:
            f = skew_symmetrize(f)
        elif check_skew and not is_skew(f):
            raise ValueError(f"operation on {c} is not skew-symmetric")
        ops[c] = f
    for c in corollas_up_to(max_weight):
        if c not in ops:
            ops[c] = GradedMap.zero(sp, sp, c.k, c.l, op_degree(c))
    return IBLStructure(A, ops, max_weight)


def zero_structure(A: ChainComplex, max_weight: int) -> IBLStructure:
    return make_ibl_structure(A, {}, max_weight)


@dataclass
class RelationReport:
    residuals: dict  # Corolla -> GradedMap

    @property
    def ok(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    def failures(self):
        return [c for c in sorted(self.residuals, key=lambda c: (c.weight, c.k, c.l, c.g))
                if not self.residuals[c].is_zero()]

    def summary(self) -> str:
        bad = self.failures()
        if not bad:
            return f"all {len(self.residuals)} residuals vanish"
        return "nonzero residuals at " + ", ".join(
            f"{c} ({self.residuals[c].nnz()} entries)" for c in bad)


def end_differential(f: GradedMap, d_src: GradedMap, d_tgt: GradedMap) -> GradedMap:
    """d o f - (-1)^{|f|} f o d, with d acting on tensor powers as a derivation."""
    Dl = derivation_power(d_tgt, f.n_out)
    Dk = derivation_power(d_src, f.n_in)
    left = compose(Dl, f)
    right = compose(f, Dk)
    return left - right if f.degree % 2 == 0 else left + right


def two_level(term, bottom: GradedMap, top: GradedMap, space) -> dict:
    """Columns of the two-vertex composite of a Delta term with the given labels."""
    if bottom.is_zero() or top.is_zero():
        return {}
    par = space.parity
    return graph_cols(term.graph(), [Op.from_map(bottom), Op.from_map(top)], par,
                      space.dim, space.dim)


def convolution_star(x: dict, y: dict, space, corollas, x_degree: int) -> dict:
    """(x * y)(c) = sum over Delta_(1,1)(c) of sign (-1)^{|x||c'|} x(c') composed under y(c'')."""
    out = {}
    for c in corollas:
        c = Corolla(*c)
        acc: dict = {}
        for t in delta_one_one(c):
            xb, yt = x.get(t.bottom), y.get(t.top)
            if xb is None or yt is None:
                continue
            s = t.sign * (-1 if (x_degree * t.bottom.weight) & 1 else 1)
            accumulate(acc, two_level(t, xb, yt, space), s)
        deg = x_degree + _deg_of(y) + c.weight
        out[c] = GradedMap(space, space, c.k, c.l, deg, acc, check=False)
    return out


def _deg_of(y: dict) -> int:
    for c, f in y.items():
        return f.degree - Corolla(*c).weight
    return 0


def verify_maurer_cartan(s: IBLStructure, max_weight: int | None = None) -> RelationReport:
    """Residual d(mu_c) + (alpha * alpha)(c) for every corolla up to the weight bound."""
    W = s.max_weight if max_weight is None else min(max_weight, s.max_weight)
    sp = s.space
    d = s.complex.d
    res = {}
    for c in corollas_up_to(W):
        mu = s.ops[c]
        r = end_differential(mu, d, d) if not mu.is_zero() else \
            GradedMap.zero(sp, sp, c.k, c.l, op_degree(c) - 1)
        acc: dict = {}
        for t in delta_one_one(c):
            if t.bottom.weight + t.top.weight != c.weight:
                raise AssertionError("weight additivity broken")
            sign = t.sign * (-1 if t.bottom.weight & 1 else 1)
            accumulate(acc, two_level(t, s.ops[t.bottom], s.ops[t.top], sp), sign)
        quad = GradedMap(sp, sp, c.k, c.l, op_degree(c) - 1, acc, check=False)
        res[c] = r + quad
    return RelationReport(res)
