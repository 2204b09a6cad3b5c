"""Exact amplitudes of the form (1/sqrt2)^k * (a + b*w + c*w^2 + d*w^3), w = e^{i*pi/4}.

Values are stored as canonical 5-tuples: the power ``k`` is the smallest one
for which the coefficients stay integral, and zero is ``(0,0,0,0,0)``.  Two
amplitudes are equal as values iff their tuples are identical, which is what
lets them serve as a finite leaf alphabet of a tree automaton.
"""

from __future__ import annotations

import math
import re

__all__ = [
    "Amplitude",
    "ZERO",
    "ONE",
    "OMEGA",
    "INV_SQRT2",
    "add",
    "sub",
    "negate",
    "mul_omega_pow",
    "div_sqrt2",
    "mul_sqrt2",
    "to_complex",
]


def _canonical(a: int, b: int, c: int, d: int, k: int) -> tuple[int, int, int, int, int]:
    if not (a or b or c or d):
        return (0, 0, 0, 0, 0)
    # z is divisible by sqrt2 = w - w^3 in Z[w] iff a = c and b = d (mod 2);
    # then z / sqrt2 = (z * sqrt2) / 2.
    while not ((a - c) & 1 or (b - d) & 1):
        a, b, c, d = (b - d) >> 1, (a + c) >> 1, (b + d) >> 1, (c - a) >> 1
        k -= 1
    return (a, b, c, d, k)


class Amplitude(tuple):
    """Immutable exact complex number; construction always canonicalizes."""

    __slots__ = ()

    def __new__(cls, a: int = 0, b: int = 0, c: int = 0, d: int = 0, k: int = 0) -> Amplitude:
        return tuple.__new__(cls, _canonical(int(a), int(b), int(c), int(d), int(k)))

    @property
    def a(self) -> int:
        return self[0]

    @property
    def b(self) -> int:
        return self[1]

    @property
    def c(self) -> int:
        return self[2]

    @property
    def d(self) -> int:
        return self[3]

    @property
    def k(self) -> int:
        return self[4]

    def is_zero(self) -> bool:
        return self[0] == 0 and self[1] == 0 and self[2] == 0 and self[3] == 0

    def __repr__(self) -> str:
        return "(%d,%d,%d,%d,%d)" % self

    __str__ = __repr__

    def __add__(self, other):  # type: ignore[override]
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return negate(self)

    def __reduce__(self):
        return (Amplitude, tuple(self))

    @classmethod
    def parse(cls, text: str) -> Amplitude:
        """Parse the textual form ``(a,b,c,d,k)``."""
        m = _TUPLE_RE.fullmatch(text.strip())
        if m is None:
            raise ValueError(f"malformed amplitude {text!r}; expected (a,b,c,d,k)")
        return cls(*(int(g) for g in m.groups()))


_INT = r"\s*([+-]?\d+)\s*"
_TUPLE_RE = re.compile(r"\(" + ",".join([_INT] * 5) + r"\)")

ZERO = Amplitude(0, 0, 0, 0, 0)
ONE = Amplitude(1, 0, 0, 0, 0)
OMEGA = Amplitude(0, 1, 0, 0, 0)
INV_SQRT2 = Amplitude(1, 0, 0, 0, 1)


def _raw_mul_sqrt2(a: int, b: int, c: int, d: int) -> tuple[int, int, int, int]:
    # sqrt2 = w - w^3
    return (b - d, a + c, b + d, c - a)


def mul_omega_pow(x: Amplitude, p: int) -> Amplitude:
    """Return ``x * w**p``; each step is the shift ``(a,b,c,d) -> (-d,a,b,c)``."""
    a, b, c, d, k = x
    for _ in range(p % 8):
        a, b, c, d = -d, a, b, c
    return Amplitude(a, b, c, d, k)


def negate(x: Amplitude) -> Amplitude:
    a, b, c, d, k = x
    return Amplitude(-a, -b, -c, -d, k)


def div_sqrt2(x: Amplitude) -> Amplitude:
    a, b, c, d, k = x
    return Amplitude(a, b, c, d, k + 1)


def mul_sqrt2(x: Amplitude) -> Amplitude:
    a, b, c, d, k = x
    return Amplitude(a, b, c, d, k - 1)


def _align(x: Amplitude, y: Amplitude) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """Bring both operands to the larger power of 1/sqrt2 without changing values."""
    xa, xb, xc, xd, xk = x
    ya, yb, yc, yd, yk = y
    while xk < yk:
        xa, xb, xc, xd = _raw_mul_sqrt2(xa, xb, xc, xd)
        xk += 1
    while yk < xk:
        ya, yb, yc, yd = _raw_mul_sqrt2(ya, yb, yc, yd)
        yk += 1
    return (xa, xb, xc, xd), (ya, yb, yc, yd), xk


def add(x: Amplitude, y: Amplitude) -> Amplitude:
    if x.is_zero():
        return y if isinstance(y, Amplitude) else Amplitude(*y)
    if y.is_zero():
        return x if isinstance(x, Amplitude) else Amplitude(*x)
    (xa, xb, xc, xd), (ya, yb, yc, yd), k = _align(x, y)
    return Amplitude(xa + ya, xb + yb, xc + yc, xd + yd, k)


def sub(x: Amplitude, y: Amplitude) -> Amplitude:
    return add(x, negate(y))


def to_complex(x: Amplitude) -> complex:
    """Floating-point value; for display and testing only.

    Raises:
        OverflowError: if the value does not fit a double.
    """
    a, b, c, d, k = x
    r = math.sqrt(0.5)
    try:
        re_part = a + (b - d) * r
        im_part = c + (b + d) * r
        scale = 2.0 ** (-k / 2)
        z = complex(re_part * scale, im_part * scale)
    except OverflowError as exc:
        raise OverflowError(f"amplitude {x!r} is out of floating-point range") from exc
    if math.isinf(z.real) or math.isinf(z.imag):
        raise OverflowError(f"amplitude {x!r} is out of floating-point range")
    return z
