"""External addresses, intermediate external addresses and their orders.

An external address is an infinite integer sequence ``s_0 s_1 s_2 ...``.  Only
finitely describable sequences are representable:

* :class:`EventuallyPeriodic` -- a preperiod followed by a repeated period.
  Stored in canonical form (minimal period, shortest preperiod) so that
  structural equality is sequence equality.
* :class:`Generated` -- entries produced by a deterministic rule together with
  a declared growth class.  Comparisons involving these are depth-capped.

Intermediate external addresses ``s_0 ... s_{n-2} inf`` (last finite entry a
half-integer) fill the order gaps; their half-integer is stored doubled so all
comparisons stay in exact integer arithmetic.  The bare ``inf`` is the
:data:`INFINITY` sentinel, the largest element of the linear order and the
point at which the circle of addresses closes up.

Text syntax (see README for the grammar)::

    "3 [1 2]"        preperiod 3, period (1 2)
    "(1 2)^inf"      periodic, preperiod empty
    "5 1/2 inf"      intermediate address of length 3
    "gen:iterexp:1"  s_0 = 1, s_{k+1} = 2**s_k
"""

from __future__ import annotations

import enum
import math
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

from .errors import AddressSyntaxError, GrowthBoundViolated, UndecidedAtDepth
from .magnitude import Tower, mag_scale, pow2

DEFAULT_DEPTH_CAP = 64


class Cmp(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    UNDECIDED = 2


class Orientation(enum.Enum):
    POSITIVE = 1
    NEGATIVE = -1
    DEGENERATE = 0


# ---------------------------------------------------------------------------
# growth declarations for generated addresses


@dataclass(frozen=True)
class Bounded:
    M: int


@dataclass(frozen=True)
class IteratedExponential:
    pass


@dataclass(frozen=True)
class Unbounded:
    """No usable growth information."""


@dataclass(frozen=True, eq=False)
class Dominated:
    """Caller-supplied upper bound on the potential bound t* of every shift.

    ``bound(k)`` must return an upper bound for t* of the address shifted by
    ``k`` (measured from the unshifted generator).
    """

    bound: Callable[[int], float]


Growth = Union[Bounded, IteratedExponential, Unbounded, Dominated]


# ---------------------------------------------------------------------------
# infinite addresses


class ExternalAddress:
    """Common interface of infinite addresses."""

    exact = False

    def entry(self, n: int):
        raise NotImplementedError

    def shift(self, k: int = 1) -> "ExternalAddress":
        raise NotImplementedError

    def translate(self, m: int) -> "ExternalAddress":
        raise NotImplementedError

    def prefix(self, n: int) -> list:
        return [self.entry(i) for i in range(n)]


def _canonical(pre: tuple, per: tuple) -> tuple[tuple, tuple]:
    n = len(per)
    for d in range(1, n + 1):
        if n % d == 0 and per == per[:d] * (n // d):
            per = per[:d]
            break
    while pre and pre[-1] == per[-1]:
        pre = pre[:-1]
        per = per[-1:] + per[:-1]
    return pre, per


@dataclass(frozen=True)
class EventuallyPeriodic(ExternalAddress):
    pre: tuple
    per: tuple

    exact = True

    def __post_init__(self):
        pre = tuple(int(x) for x in self.pre)
        per = tuple(int(x) for x in self.per)
        if not per:
            raise ValueError("period must be nonempty")
        pre, per = _canonical(pre, per)
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "per", per)

    @classmethod
    def periodic(cls, *per: int) -> "EventuallyPeriodic":
        return cls((), tuple(per))

    def entry(self, n: int) -> int:
        if n < 0:
            raise IndexError(n)
        if n < len(self.pre):
            return self.pre[n]
        return self.per[(n - len(self.pre)) % len(self.per)]

    def shift(self, k: int = 1) -> "EventuallyPeriodic":
        if k <= len(self.pre):
            return EventuallyPeriodic(self.pre[k:], self.per)
        r = (k - len(self.pre)) % len(self.per)
        return EventuallyPeriodic((), self.per[r:] + self.per[:r])

    def translate(self, m: int) -> "EventuallyPeriodic":
        if self.pre:
            return EventuallyPeriodic((self.pre[0] + m,) + self.pre[1:], self.per)
        return EventuallyPeriodic((self.per[0] + m,), self.per[1:] + self.per[:1])

    def prepend(self, k: int) -> "EventuallyPeriodic":
        return EventuallyPeriodic((k,) + self.pre, self.per)

    def replace(self, n: int, value: int) -> "EventuallyPeriodic":
        """Copy with entry ``n`` replaced."""
        head = tuple(self.entry(i) for i in range(max(n + 1, len(self.pre))))
        head = head[:n] + (value,) + head[n + 1:]
        # keep the periodic tail aligned with the original sequence
        tail_start = len(head)
        k = (tail_start - len(self.pre)) % len(self.per)
        return EventuallyPeriodic(head, self.per[k:] + self.per[:k])

    @property
    def horizon(self) -> int:
        """Number of entries that determine the sequence."""
        return len(self.pre) + len(self.per)

    def max_abs(self) -> int:
        return max(abs(x) for x in self.pre + self.per)

    def __str__(self) -> str:
        return format_address(self)


class _Memo:
    def __init__(self):
        self.lock = threading.Lock()
        self.values: dict = {}


@dataclass(frozen=True)
class IterExpRule:
    """s_0 = seed, s_{k+1} = 2**s_k."""

    seed: int
    _memo: _Memo = field(default_factory=_Memo, compare=False, repr=False, hash=False)

    def __call__(self, n: int):
        memo = self._memo
        with memo.lock:
            if n in memo.values:
                return memo.values[n]
            k = max((i for i in memo.values if i < n), default=None)
            if k is None:
                k, v = 0, self.seed
                memo.values[0] = v
            else:
                v = memo.values[k]
            while k < n:
                v = pow2(v)
                k += 1
                memo.values[k] = v
            return v


@dataclass(frozen=True)
class CountRule:
    """s_n = n + start."""

    start: int

    def __call__(self, n: int) -> int:
        return n + self.start


@dataclass(frozen=True)
class Generated(ExternalAddress):
    rule: Callable[[int], object]
    growth: Growth
    label: str
    offset: int = 0
    head_delta: int = 0
    _memo: _Memo = field(default_factory=_Memo, compare=False, repr=False, hash=False)

    def entry(self, n: int):
        if n < 0:
            raise IndexError(n)
        memo = self._memo
        with memo.lock:
            if n in memo.values:
                return memo.values[n]
        v = self.rule(self.offset + n)
        if isinstance(self.growth, Bounded):
            if isinstance(v, Tower) or abs(v) > self.growth.M:
                raise GrowthBoundViolated(f"{self.label}: entry {n} = {v} exceeds declared bound {self.growth.M}")
        if n == 0 and self.head_delta:
            if isinstance(v, Tower):
                raise ValueError("cannot translate an address whose first entry is a tower")
            v = v + self.head_delta
        with memo.lock:
            memo.values[n] = v
        return v

    def shift(self, k: int = 1) -> "Generated":
        if k == 0:
            return self
        return Generated(self.rule, self.growth, self.label, self.offset + k, 0)

    def translate(self, m: int) -> "Generated":
        return Generated(self.rule, self.growth, self.label, self.offset, self.head_delta + m)

    def tstar_bound(self) -> Optional[float]:
        if isinstance(self.growth, Dominated):
            return self.growth.bound(self.offset)
        return None

    def __str__(self) -> str:
        return format_address(self)


def iterexp(seed: int) -> Generated:
    if seed < 0:
        raise ValueError("iterated-exponential seed must be nonnegative")
    return Generated(IterExpRule(seed), IteratedExponential(), f"gen:iterexp:{seed}")


def count(start: int = 0) -> Generated:
    return Generated(CountRule(start), Unbounded(), f"gen:count:{start}")


# ---------------------------------------------------------------------------
# intermediate addresses and infinity


@dataclass(frozen=True)
class Intermediate:
    """``finite[0] ... finite[-1] last inf`` with ``last = last2 / 2``."""

    finite: tuple
    last2: int

    def __post_init__(self):
        object.__setattr__(self, "finite", tuple(int(x) for x in self.finite))
        if self.last2 % 2 != 1:
            raise ValueError("last finite entry of an intermediate address must be a half-integer")

    @classmethod
    def of(cls, *entries) -> "Intermediate":
        """Build from entries whose last one is a half-integer (Fraction or float)."""
        *head, last = entries
        last2 = Fraction(last) * 2
        if last2.denominator != 1:
            raise ValueError(f"{last} is not a half-integer")
        return cls(tuple(head), int(last2))

    @property
    def length(self) -> int:
        return len(self.finite) + 2

    @property
    def last(self) -> Fraction:
        return Fraction(self.last2, 2)

    def entry(self, n: int):
        if n < len(self.finite):
            return self.finite[n]
        if n == len(self.finite):
            return self.last
        return math.inf

    def shift(self, k: int = 1):
        if k == 0:
            return self
        if k <= len(self.finite):
            return Intermediate(self.finite[k:], self.last2)
        return INFINITY

    def translate(self, m: int) -> "Intermediate":
        if self.finite:
            return Intermediate((self.finite[0] + m,) + self.finite[1:], self.last2)
        return Intermediate((), self.last2 + 2 * m)

    def prepend(self, k: int) -> "Intermediate":
        return Intermediate((k,) + self.finite, self.last2)

    exact = True

    def __str__(self) -> str:
        return format_address(self)


class _Infinity:
    _instance = None
    exact = True

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    __str__ = __repr__

    def __reduce__(self):
        return (_Infinity, ())

    def shift(self, k: int = 1):
        return self

    def prepend(self, k: int) -> Intermediate:
        return Intermediate((), 2 * k + 1)


INFINITY = _Infinity()

ExtendedAddress = Union[ExternalAddress, Intermediate, _Infinity]


# ---------------------------------------------------------------------------
# free functions mirroring the operations


def entry(a: ExternalAddress, n: int):
    return a.entry(n)


def shift(a, k: int = 1):
    return a.shift(k)


def translate(a, m: int):
    if a is INFINITY:
        raise ValueError("the bare infinity address has no translates")
    return a.translate(m)


def prepend(k: int, a):
    """Address ``k a``; ``None`` stands for the bottom end of the line."""
    if a is None:
        return Intermediate((), 2 * k - 1)
    if isinstance(a, Generated):
        raise TypeError("cannot prepend to a generated address")
    return a.prepend(k)


_TOP = object()


def _key(a, i: int):
    """Doubled entry used for lexicographic comparison."""
    if a is INFINITY:
        return _TOP
    if isinstance(a, Intermediate):
        if i < len(a.finite):
            return 2 * a.finite[i]
        if i == len(a.finite):
            return a.last2
        return _TOP
    v = a.entry(i)
    if isinstance(v, Tower):
        return mag_scale(v, 2.0)
    return 2 * v


def _exact_horizon(a, b) -> Optional[int]:
    """Entries sufficient to decide equality, or None if not exact."""
    lengths = []
    pres, pers = [], []
    for x in (a, b):
        if x is INFINITY:
            lengths.append(1)
        elif isinstance(x, Intermediate):
            lengths.append(x.length)
        elif isinstance(x, EventuallyPeriodic):
            pres.append(len(x.pre))
            pers.append(len(x.per))
        else:
            # a generated address is decided by the other side only if that is finite
            continue
    if lengths:
        return max(lengths)
    if len(pers) == 2:
        return max(pres) + math.lcm(*pers)
    return None


def cmp_lex(a, b, depth_cap: int = DEFAULT_DEPTH_CAP) -> Cmp:
    """Lexicographic comparison on infinite and intermediate addresses.

    The ``inf`` tail of an intermediate address compares greater than every
    integer or half-integer entry.
    """
    horizon = _exact_horizon(a, b)
    limit = horizon if horizon is not None else depth_cap
    for i in range(limit):
        ka, kb = _key(a, i), _key(b, i)
        if ka is _TOP or kb is _TOP:
            if ka is kb:
                return Cmp.EQUAL
            return Cmp.GREATER if ka is _TOP else Cmp.LESS
        if isinstance(ka, Tower) and isinstance(kb, Tower) and ka == kb:
            return Cmp.UNDECIDED
        if ka < kb:
            return Cmp.LESS
        if ka > kb:
            return Cmp.GREATER
    return Cmp.EQUAL if horizon is not None else Cmp.UNDECIDED


def lex_less(a, b, depth_cap: int = DEFAULT_DEPTH_CAP) -> bool:
    c = cmp_lex(a, b, depth_cap)
    if c is Cmp.UNDECIDED:
        raise UndecidedAtDepth(depth_cap)
    return c is Cmp.LESS


def cyclic_triple(a, b, c, depth_cap: int = DEFAULT_DEPTH_CAP) -> Orientation:
    """Orientation of three points in the circular order closing at infinity."""
    pts = (a, b, c)
    rel = {}
    for i in range(3):
        for j in range(i + 1, 3):
            r = cmp_lex(pts[i], pts[j], depth_cap)
            if r is Cmp.UNDECIDED:
                raise UndecidedAtDepth(depth_cap)
            if r is Cmp.EQUAL:
                return Orientation.DEGENERATE
            rel[i, j] = r
    # rank of each point in the linear order
    rank = [0, 0, 0]
    for (i, j), r in rel.items():
        if r is Cmp.LESS:
            rank[j] += 1
        else:
            rank[i] += 1
    # (0, 1, 2) and its rotations are positive
    if tuple(rank) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        return Orientation.POSITIVE
    return Orientation.NEGATIVE


# ---------------------------------------------------------------------------
# text syntax

_TOKEN = re.compile(
    r"\s*(?:(?P<open>\[)|(?P<close>\])|(?P<popen>\()|(?P<pclose>\)\^inf)"
    r"|(?P<half>[+-]?\d+/2)|(?P<inf>inf)|(?P<int>[+-]?\d+))"
)
_GEN = re.compile(r"gen:(?P<name>[a-z]+):(?P<param>[+-]?\d+)(?:@(?P<offset>\d+))?(?P<delta>[+-]\d+)?$")


def _parse_generated(text: str) -> Generated:
    m = _GEN.match(text)
    if not m:
        raise AddressSyntaxError(text, 0, "malformed generator")
    name, param = m["name"], int(m["param"])
    if name == "iterexp":
        a = iterexp(param)
    elif name == "count":
        a = count(param)
    else:
        raise AddressSyntaxError(text, 4, f"unknown generator {name!r}")
    if m["offset"]:
        a = a.shift(int(m["offset"]))
    if m["delta"]:
        a = a.translate(int(m["delta"]))
    return a


def parse_address(text: str):
    """Parse the textual address syntax; inverse of :func:`format_address`."""
    stripped = text.strip()
    if stripped.startswith("gen:"):
        return _parse_generated(stripped)
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        while text[pos].isspace():
            pos += 1
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise AddressSyntaxError(text, pos, "unexpected character")
        kind = m.lastgroup
        tokens.append((kind, m[kind], m.start(kind)))
        pos = m.end()
    if not tokens:
        raise AddressSyntaxError(text, 0, "empty address")

    head: list[int] = []
    i = 0
    while i < len(tokens) and tokens[i][0] == "int":
        head.append(int(tokens[i][1]))
        i += 1
    if i == len(tokens):
        raise AddressSyntaxError(text, len(text), "missing periodic part or inf")
    kind, value, where = tokens[i]
    if kind == "inf":
        if head:
            raise AddressSyntaxError(text, where, "integer entry directly before inf")
        if i + 1 != len(tokens):
            raise AddressSyntaxError(text, tokens[i + 1][2], "trailing input")
        return INFINITY
    if kind == "half":
        num = int(value.split("/")[0])
        if num % 2 == 0:
            raise AddressSyntaxError(text, where, "half-integer entry must have an odd numerator")
        if i + 2 != len(tokens) or tokens[i + 1][0] != "inf":
            raise AddressSyntaxError(text, where, "half-integer must be followed by inf and nothing else")
        return Intermediate(tuple(head), num)
    closer = {"open": "close", "popen": "pclose"}.get(kind)
    if closer is None:
        raise AddressSyntaxError(text, where, "expected '[' or '('")
    per: list[int] = []
    i += 1
    while i < len(tokens) and tokens[i][0] == "int":
        per.append(int(tokens[i][1]))
        i += 1
    if i == len(tokens) or tokens[i][0] != closer:
        raise AddressSyntaxError(text, tokens[i][2] if i < len(tokens) else len(text), "unterminated period")
    if not per:
        raise AddressSyntaxError(text, tokens[i][2], "empty period")
    if i + 1 != len(tokens):
        raise AddressSyntaxError(text, tokens[i + 1][2], "trailing input")
    return EventuallyPeriodic(tuple(head), tuple(per))


def format_address(a) -> str:
    if a is INFINITY:
        return "inf"
    if isinstance(a, EventuallyPeriodic):
        per = "[" + " ".join(map(str, a.per)) + "]"
        return " ".join([*map(str, a.pre), per])
    if isinstance(a, Intermediate):
        return " ".join([*map(str, a.finite), f"{a.last2}/2", "inf"])
    if isinstance(a, Generated):
        s = a.label
        if a.offset:
            s += f"@{a.offset}"
        if a.head_delta:
            s += f"{a.head_delta:+d}"
        return s
    raise TypeError(f"not an address: {a!r}")
