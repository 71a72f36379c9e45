"""Permutations, shuffles and Koszul signs.

A permutation is stored 0-based as ``images``: the factor in position i is
moved to position ``images[i]``.  Acting on tensors this way is a left action,
so precomposing a map with it gives a right action on inputs.
"""
from __future__ import annotations

from collections.abc import Iterator, Sequence
from itertools import combinations


class Permutation:
    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images}")
        self.images = images

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def from_one_based(cls, images: Sequence[int]) -> "Permutation":
        return cls([i - 1 for i in images])

    def __len__(self):
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (self * other)(i) = self(other(i))
        if len(self) != len(other):
            raise ValueError("size mismatch")
        return Permutation([self.images[j] for j in other.images])

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def sign(self) -> int:
        return perm_sign(self.images)

    def apply(self, seq: Sequence) -> tuple:
        """Place seq[i] at position images[i]."""
        out = [None] * len(seq)
        for i, x in enumerate(seq):
            out[self.images[i]] = x
        return tuple(out)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({list(self.images)})"


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation that sorts a sequence of distinct keys."""
    seq = list(seq)
    n = len(seq)
    s = 1
    seen = [False] * n
    order = sorted(range(n), key=seq.__getitem__)
    for i in range(n):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def koszul_sign(perm: Permutation, degrees: Sequence[int]) -> int:
    """Koszul sign of moving factor i (of degree degrees[i]) to position perm(i)."""
    im = perm.images
    if len(im) != len(degrees):
        raise ValueError("degree list does not match permutation size")
    odd = [i for i, d in enumerate(degrees) if d % 2]
    s = 0
    for a, b in combinations(odd, 2):
        if im[a] > im[b]:
            s ^= 1
    return -1 if s else 1


def shuffles(p: int, q: int) -> Iterator[Permutation]:
    """(p,q)-shuffles: images increasing on the first p and on the last q positions."""
    n = p + q
    for first in combinations(range(n), p):
        fs = set(first)
        rest = [i for i in range(n) if i not in fs]
        yield Permutation(list(first) + rest)


def inverse_shuffles(p: int, q: int) -> Iterator[Permutation]:
    for s in shuffles(p, q):
        yield s.inverse()
