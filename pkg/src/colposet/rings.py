"""Exact coefficient rings: the rationals, the integers, and prime fields.

Scalars are plain python ints wherever the value is integral; non-integral
rationals are gmpy2.mpq (canonical lowest terms, C-backed). fractions.Fraction
is the drop-in fallback when gmpy2 is unavailable.
"""
from __future__ import annotations

from dataclasses import dataclass

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    from fractions import Fraction as _mpq


class RingError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Ring:
    """Coefficient ring tag. kind is one of 'q', 'z', 'fp'."""

    kind: str
    p: int = 0

    @property
    def is_field(self) -> bool:
        return self.kind in ("q", "fp")

    @property
    def tag(self) -> str:
        if self.kind == "q":
            return "q"
        if self.kind == "z":
            return "z"
        return "f2" if self.p == 2 else f"fp:{self.p}"

    def __repr__(self) -> str:
        return f"Ring({self.tag})"

    def canon(self, x):
        """Canonical scalar: int in [0,p) for fp, int or mpq otherwise."""
        if self.kind == "fp":
            return int(x) % self.p
        if self.kind == "z":
            if not isinstance(x, int):
                q = _mpq(x)
                if q.denominator != 1:
                    raise RingError(f"{x!r} is not an integer")
                return int(q)
            return x
        if isinstance(x, int):
            return x
        q = _mpq(x)
        return int(q) if q.denominator == 1 else q

    def scalar_from_json(self, v):
        if isinstance(v, str):
            if self.kind == "fp":
                raise RingError(f"string scalar {v!r} not allowed over {self.tag}")
            num, _, den = v.partition("/")
            return self.canon(_mpq(int(num), int(den or "1")))
        if isinstance(v, (int, bool)) and not isinstance(v, bool):
            return self.canon(v)
        raise RingError(f"bad scalar {v!r}")

    def scalar_to_json(self, x):
        if isinstance(x, int):
            return x
        return f"{x.numerator}/{x.denominator}"

    def inv(self, x):
        if self.kind == "fp":
            x = int(x) % self.p
            if x == 0:
                raise ZeroDivisionError("inverse of 0")
            return pow(x, self.p - 2, self.p)
        if self.kind == "q":
            if x == 0:
                raise ZeroDivisionError("inverse of 0")
            return self.canon(_mpq(1, 1) / _mpq(x))
        raise RingError("inverse only over fields")


QQ = Ring("q")
ZZ = Ring("z")


def GF(p: int) -> Ring:
    if not _is_prime(p):
        raise RingError(f"{p} is not prime")
    return Ring("fp", p)


def parse_ring(tag: str) -> Ring:
    """Parse a ring tag: 'q', 'z', 'f2', or 'fp:<p>'."""
    tag = tag.strip().lower()
    if tag == "q":
        return QQ
    if tag == "z":
        return ZZ
    if tag == "f2":
        return GF(2)
    if tag.startswith("fp:"):
        return GF(int(tag[3:]))
    raise RingError(f"unknown ring tag {tag!r}")


def rational(a, b=1):
    """Exact rational a/b as a canonical scalar."""
    q = _mpq(a, b)
    return int(q) if q.denominator == 1 else q


mpq = _mpq
