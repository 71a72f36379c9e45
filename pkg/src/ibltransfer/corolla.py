"""Corollas c_{k,l,g}: k inputs, l outputs, genus g."""
from __future__ import annotations

from typing import NamedTuple


class Corolla(NamedTuple):
    k: int
    l: int
    g: int = 0

    @property
    def weight(self) -> int:
        return self.k + self.l + 2 * self.g - 2

    @property
    def is_identity(self) -> bool:
        return self.k == 1 and self.l == 1 and self.g == 0

    def check(self) -> "Corolla":
        if self.k < 1 or self.l < 1 or self.g < 0:
            raise ValueError(f"invalid corolla {tuple(self)}")
        return self

    def __str__(self):
        return f"c({self.k},{self.l},{self.g})"


IDENTITY = Corolla(1, 1, 0)


def corollas_up_to(max_weight: int, min_weight: int = 1, max_genus=None, max_coarity=None):
    """All corollas with min_weight <= weight <= max_weight, sorted by (weight, k, l, g)."""
    out = []
    for w in range(min_weight, max_weight + 1):
        for g in range(w // 2 + 2):
            for k in range(1, w + 3):
                l = w + 2 - 2 * g - k
                if l < 1:
                    continue
                if max_genus is not None and g > max_genus:
                    continue
                if max_coarity is not None and l > max_coarity:
                    continue
                out.append(Corolla(k, l, g))
    return sorted(set(out), key=lambda c: (c.weight, c.k, c.l, c.g))
