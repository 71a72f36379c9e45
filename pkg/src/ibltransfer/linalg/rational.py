"""Exact rational scalars.

Everything in the package is computed over Q using gmpy2's mpq.
"""
from __future__ import annotations

from gmpy2 import mpq

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)


def to_q(x) -> mpq:
    """Coerce ints, mpq, Fractions and "p/q" strings to an mpq."""
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            p, q = s.split("/")
            if int(q) == 0:
                raise ValueError(f"zero denominator in {x!r}")
            return mpq(int(p), int(q))
        return mpq(int(s))
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact scalars")
    return mpq(x)


def q_str(x) -> str:
    """Canonical "p/q" text for a rational, always with an explicit denominator."""
    x = mpq(x)
    return f"{x.numerator}/{x.denominator}"
