"""Magnitudes too large for a double.

Fast addresses have entries that grow like iterated exponentials, and the
potentials along escaping orbits overflow after a handful of steps.  A
:class:`Tower` stores such a number as ``sign * exp(exp(...exp(top)))`` with
``height`` exponentials.  Only the operations the model needs are provided:
logarithms (which is what minimal-potential bounds apply), exponentials,
multiplication by a positive constant and ordering.

Additive and multiplicative constants below the top level are dropped; their
relative effect is smaller than ``exp(-700)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

# exp(LOG_CAP) ~ 1e304 still leaves headroom below the double range
LOG_CAP = 700.0


@dataclass(frozen=True)
class Tower:
    sign: int
    height: int
    top: float

    def __post_init__(self):
        if self.sign not in (1, -1) or self.height < 1 or not math.isfinite(self.top):
            raise ValueError(f"malformed Tower{(self.sign, self.height, self.top)}")
        if self.top <= LOG_CAP:
            raise ValueError("Tower value fits in a float; use from_log")

    def __neg__(self) -> Tower:
        return Tower(-self.sign, self.height, self.top)

    def __abs__(self) -> Tower:
        return Tower(1, self.height, self.top)

    def _cmp_abs(self, other) -> int:
        if isinstance(other, Tower):
            a = (self.height, self.top)
            b = (other.height, other.top)
            return (a > b) - (a < b)
        x = abs(other)
        if x == 0:
            return 1
        if isinstance(x, float) and math.isinf(x):
            return -1
        if self.height >= 2:
            return 1
        lx = math.log(x)
        return (self.top > lx) - (self.top < lx)

    def _cmp(self, other) -> int:
        osign = other.sign if isinstance(other, Tower) else (1 if other >= 0 else -1)
        if self.sign != osign:
            return self.sign
        return self.sign * self._cmp_abs(other)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self) -> float:
        return math.inf * self.sign

    def __str__(self) -> str:
        return f"{'-' if self.sign < 0 else ''}exp^{self.height}({self.top:.6g})"


Mag = Union[int, float, Tower]


def from_log(L: Union[float, Tower], sign: int = 1) -> Union[float, Tower]:
    """Return ``sign * exp(L)``."""
    if isinstance(L, Tower):
        if L.sign < 0:
            return 0.0
        return Tower(sign, L.height + 1, L.top)
    if L <= LOG_CAP:
        return sign * math.exp(L)
    return Tower(sign, 1, float(L))


def mag_log(x: Mag) -> Union[float, Tower]:
    """Natural logarithm of a positive magnitude."""
    if isinstance(x, Tower):
        if x.sign < 0:
            raise ValueError("log of a negative magnitude")
        if x.height == 1:
            return x.top
        return Tower(1, x.height - 1, x.top)
    return math.log(x)


def mag_log1p(x: Mag) -> Union[float, Tower]:
    if isinstance(x, Tower):
        return mag_log(x)
    if isinstance(x, int) and x.bit_length() > 1000:
        # log1p(1/x) is far below double resolution of log(x) here
        return math.log(x)
    return math.log1p(x)


def mag_exp(x: Union[float, Tower]) -> Union[float, Tower]:
    return from_log(x)


def mag_expm1(x: Union[float, Tower]) -> Union[float, Tower]:
    if isinstance(x, Tower):
        return from_log(x)
    if x <= LOG_CAP:
        return math.expm1(x)
    return Tower(1, 1, float(x))


def mag_scale(x: Mag, c: float) -> Mag:
    """Multiply by a positive constant."""
    if isinstance(x, Tower):
        if x.height >= 2:
            return x
        return from_log(x.top + math.log(c), x.sign)
    return x * c


def mag_shift(x: Mag, c: float) -> Mag:
    """Add a constant (absorbed entirely by towers)."""
    if isinstance(x, Tower):
        return x
    return x + c


def mag_ceil(x: Mag) -> Union[int, Tower]:
    if isinstance(x, Tower):
        return x
    return math.ceil(x)


def mag_abs(x: Mag) -> Mag:
    return abs(x)


def to_float(x: Mag) -> float:
    return float(x)


def is_huge(x) -> bool:
    return isinstance(x, Tower)


def pow2(x: Union[int, Tower]) -> Union[int, Tower]:
    """``2**x`` for a nonnegative integer or tower exponent."""
    if isinstance(x, Tower):
        return from_log(mag_scale(x, math.log(2.0)))
    if x * math.log(2.0) <= LOG_CAP:
        return 2 ** x
    return from_log(x * math.log(2.0))
