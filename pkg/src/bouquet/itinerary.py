"""Combinatorial itineraries relative to a partition address ``s``.

The translates ``m s`` (first entry shifted by ``m``) cut the line of
external addresses into slots; the itinerary of ``r`` records the slot of each
shift ``sigma^j(r)``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional

from .addresses import (
    INFINITY,
    Cmp,
    EventuallyPeriodic,
    ExternalAddress,
    Generated,
    Intermediate,
    _key,
    cmp_lex,
    format_address,
    prepend,
)
from .errors import (
    EmptyRealization,
    HitsPartition,
    PreconditionFailed,
    UndecidedAtDepth,
)
from .magnitude import Tower
from .model import TWO_PI, t_min, t_star

DEFAULT_DEPTH_CAP = 64


@dataclass(frozen=True)
class Itinerary:
    entries: tuple
    star_terminated: bool = False
    requested_length: int = 0

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.star_terminated and len(self.entries) >= self.requested_length:
            raise ValueError("a star-terminated itinerary is shorter than requested")

    def __str__(self) -> str:
        parts = [str(m) for m in self.entries]
        if self.star_terminated:
            parts.append("*")
        return " ".join(parts)

    def to_dict(self) -> dict:
        return {
            "entries": list(self.entries),
            "star_terminated": self.star_terminated,
            "requested_length": self.requested_length,
        }


def _first_key(a) -> int:
    k = _key(a, 0)
    if isinstance(k, Tower):
        raise UndecidedAtDepth(0, "first entry exceeds double range")
    return k


def _checked(c: Cmp, depth_cap: int) -> Cmp:
    if c is Cmp.UNDECIDED:
        raise UndecidedAtDepth(depth_cap)
    return c


def slot(s, x, depth_cap: int = DEFAULT_DEPTH_CAP) -> int:
    """The integer ``m`` with ``m s < x < (m+1) s``.

    Raises HitsPartition(0) when ``x`` equals a translate of ``s``.
    """
    if s is INFINITY:
        raise ValueError("the partition address must not be infinity")
    if x is INFINITY:
        raise HitsPartition(0)
    m = (_first_key(x) - _first_key(s)) // 2
    while True:
        c = _checked(cmp_lex(s.translate(m), x, depth_cap), depth_cap)
        if c is Cmp.EQUAL:
            raise HitsPartition(0)
        if c is Cmp.LESS:
            break
        m -= 1
    while True:
        c = _checked(cmp_lex(x, s.translate(m + 1), depth_cap), depth_cap)
        if c is Cmp.EQUAL:
            raise HitsPartition(0)
        if c is Cmp.LESS:
            return m
        m += 1


def itinerary(s, r: ExternalAddress, length: int, depth_cap: int = DEFAULT_DEPTH_CAP) -> Itinerary:
    if length < 0:
        raise ValueError("length must be nonnegative")
    out = []
    for j in range(length):
        try:
            out.append(slot(s, r.shift(j), depth_cap))
        except HitsPartition:
            raise HitsPartition(j) from None
    return Itinerary(tuple(out), False, length)


def kneading(s, length: int, intermediate_count: str = "shifted", depth_cap: int = DEFAULT_DEPTH_CAP) -> Itinerary:
    """Kneading sequence ``u_0 u_1 ...`` with ``u_j`` the slot of ``sigma^{j+1}(s)``.

    Stops with ``*`` once the shift equals a translate of ``s`` or infinity.
    ``intermediate_count="prefixed"`` adds a leading ``0`` entry for intermediate
    ``s`` (the slot of ``s`` in its own partition, taken from below), giving
    ``n - 1`` integer entries for an address of length ``n``.
    """
    if intermediate_count not in ("shifted", "prefixed"):
        raise ValueError(f"unknown convention {intermediate_count!r}")
    out = []
    if intermediate_count == "prefixed" and isinstance(s, Intermediate) and length > 0:
        out.append(0)
    j = 0
    while len(out) < length:
        x = s.shift(j + 1)
        try:
            out.append(slot(s, x, depth_cap))
        except HitsPartition:
            return Itinerary(tuple(out), True, length)
        j += 1
    return Itinerary(tuple(out), False, length)


# ---------------------------------------------------------------------------
# cylinders


@dataclass(frozen=True)
class AddressInterval:
    """Open interval of external addresses.

    ``lower=None`` is the bottom end of the line; ``upper=INFINITY`` the top.
    """

    lower: Optional[object]
    upper: object

    def __post_init__(self):
        if self.lower is not None and self.upper is not INFINITY:
            if cmp_lex(self.lower, self.upper) is not Cmp.LESS:
                raise ValueError(f"empty interval ({self.lower}, {self.upper})")

    def contains(self, r, depth_cap: int = DEFAULT_DEPTH_CAP) -> bool:
        above = self.lower is None or _checked(cmp_lex(self.lower, r, depth_cap), depth_cap) is Cmp.LESS
        below = self.upper is INFINITY or _checked(cmp_lex(r, self.upper, depth_cap), depth_cap) is Cmp.LESS
        return above and below

    def __str__(self) -> str:
        lo = "-inf" if self.lower is None else format_address(self.lower)
        return f"({lo}, {format_address(self.upper)})"


FULL_LINE = AddressInterval(None, INFINITY)


def _lower_max(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if cmp_lex(a, b) is Cmp.GREATER else b


def _upper_min(a, b):
    if a is INFINITY:
        return b
    if b is INFINITY:
        return a
    return a if cmp_lex(a, b) is Cmp.LESS else b


def _intersect(iv: AddressInterval, lower, upper) -> Optional[AddressInterval]:
    lo = _lower_max(iv.lower, lower)
    hi = _upper_min(iv.upper, upper)
    if lo is not None and hi is not INFINITY and cmp_lex(lo, hi) is not Cmp.LESS:
        return None
    return AddressInterval(lo, hi)


def _prepend_interval(k: int, iv: AddressInterval) -> AddressInterval:
    return AddressInterval(prepend(k, iv.lower), prepend(k, iv.upper))


def _same_point(a, b) -> bool:
    if a is None or b is None or a is INFINITY or b is INFINITY:
        return False
    return cmp_lex(a, b) is Cmp.EQUAL


def _merge(intervals: list) -> list:
    def sort_key_cmp(x: AddressInterval, y: AddressInterval) -> int:
        if x.lower is None:
            return -1
        if y.lower is None:
            return 1
        c = cmp_lex(x.lower, y.lower)
        return -1 if c is Cmp.LESS else (1 if c is Cmp.GREATER else 0)

    ordered = sorted(intervals, key=functools.cmp_to_key(sort_key_cmp))
    out: list = []
    for iv in ordered:
        if out and _same_point(out[-1].upper, iv.lower):
            out[-1] = AddressInterval(out[-1].lower, iv.upper)
        else:
            out.append(iv)
    return out


def _pullback(s, m: int, intervals: list) -> list:
    """Addresses ``r`` in the slot ``(m s, (m+1) s)`` with ``sigma(r)`` in ``intervals``."""
    pieces = []
    if isinstance(s, Intermediate) and not s.finite:
        # the slot is exactly the set of addresses with first entry last + m + 1/2
        c = (s.last2 + 1) // 2 + m
        pieces = [_prepend_interval(c, iv) for iv in intervals]
    else:
        k0 = s.entry(0) + m
        p = s.shift(1)
        for iv in intervals:
            above = _intersect(iv, p, INFINITY)
            if above is not None:
                pieces.append(_prepend_interval(k0, above))
            below = _intersect(iv, None, p)
            if below is not None:
                pieces.append(_prepend_interval(k0 + 1, below))
    return _merge(pieces)


def itinerary_interval(s, prefix) -> list:
    """Maximal open intervals of addresses whose itinerary starts with ``prefix``."""
    if s is INFINITY:
        raise ValueError("the partition address must not be infinity")
    if isinstance(s, Generated):
        raise TypeError("cylinders need an exactly representable partition address")
    intervals = [FULL_LINE]
    for m in reversed(list(prefix)):
        intervals = _pullback(s, int(m), intervals)
        if not intervals:
            raise EmptyRealization(f"no address has itinerary prefix {list(prefix)}")
    return intervals


# ---------------------------------------------------------------------------
# sharing


@dataclass
class SharingReport:
    N: int
    itinerary: Itinerary
    t_partition: float
    bound: float
    tstar_lo: list = field(default_factory=list)
    tstar_hi: list = field(default_factory=list)
    holds: bool = False

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "itinerary": str(self.itinerary),
            "t_partition": self.t_partition,
            "bound": self.bound,
            "tstar_lo": [float(v) for v in self.tstar_lo],
            "tstar_hi": [float(v) for v in self.tstar_hi],
            "holds": self.holds,
        }


def partition_potential(s, tol: float = 1e-9) -> float:
    """Upper bound ``t`` on potentials with ``2 pi |s_n| <= F^n(t)`` for all ``n >= 1``."""
    if isinstance(s, Intermediate):
        t = 0.0
        finite = list(s.finite) + [s.last]
        for n in range(1, len(finite)):
            y = TWO_PI * abs(float(finite[n]))
            for _ in range(n):
                y = math.log1p(y)
            t = max(t, y)
        return t
    return float(t_min(s, tol).hi)


def verify_slow_sharing(s, r1: ExternalAddress, r2: ExternalAddress, N: int, tol: float = 1e-6, depth: int = 64) -> SharingReport:
    """Evaluate ``hi(t*(sigma^N r_i)) <= t + 2 pi`` for two addresses sharing an itinerary."""
    it1 = itinerary(s, r1, N)
    it2 = itinerary(s, r2, N)
    if it1 != it2:
        raise PreconditionFailed(f"itineraries differ: {it1} vs {it2}")
    if all(r1.entry(n) == r2.entry(n) for n in range(N)):
        raise PreconditionFailed("addresses agree on the first N entries")
    t = partition_potential(s)
    bound = t + TWO_PI
    rep = SharingReport(N, it1, t, bound)
    for r in (r1, r2):
        ts = t_star(r.shift(N), depth)
        rep.tstar_lo.append(ts.lo)
        rep.tstar_hi.append(ts.hi)
    rep.holds = all(h <= bound + tol for h in rep.tstar_hi)
    return rep
