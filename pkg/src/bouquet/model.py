"""The straight-brush model of exponential dynamics.

Points are pairs ``(t, s)`` of a potential ``t >= 0`` and an external address.
The model map sends ``(t, s)`` to ``(F(t) - 2*pi*|s_1|, shift(s))`` with
``F(t) = e^t - 1``.  Note that the first entry ``s_0`` never influences the
potential: only ``s_1, s_2, ...`` are subtracted along the orbit.

Membership in the invariant set is certified in both directions:

* outside -- some iterate has negative potential (below ``Q`` for the
  ``J_{>=Q}`` variant);
* inside -- an iterate reaches ``hi(t*) + 1 + Q`` for its address, from which
  point the orbit provably never drops again; or, for eventually periodic
  addresses, the potential at some phase of the period does not decrease over
  one full period (the return map is increasing and expanding).

Minimal potentials are found by bisection between those certificates.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Optional, Union

from .addresses import (
    Bounded,
    Dominated,
    EventuallyPeriodic,
    ExternalAddress,
    Generated,
    _Memo,
)
from .errors import (
    CertificateStall,
    IsEndpoint,
    NotCertified,
    NotExponentiallyBounded,
    UndecidedAtDepth,
)
from .magnitude import Tower, mag_ceil, mag_expm1, mag_log1p, mag_scale

TWO_PI = 2.0 * math.pi
EPS = 1e-12
LOG_1_2PI = math.log1p(TWO_PI)


def f_growth(t: float) -> float:
    """``F(t) = e^t - 1``; returns ``inf`` when the result overflows."""
    if t < 0:
        raise ValueError("F is defined on [0, inf)")
    try:
        return math.expm1(t)
    except OverflowError:
        return math.inf


def f_growth_inv(y: float) -> float:
    if y < 0:
        raise ValueError("F^-1 is defined on [0, inf)")
    return math.log1p(y)


def f_inv_iter(y, n: int):
    """``F^{-n}(y)`` for a float or tower ``y``."""
    for _ in range(n):
        y = mag_log1p(y)
    return y


def f_iter(t: float, n: int) -> float:
    for _ in range(n):
        t = f_growth(t)
    return t


@dataclass(frozen=True)
class ModelPoint:
    t: float
    addr: ExternalAddress

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("model points have nonnegative potential")


def _entry_weight(a: ExternalAddress, n: int):
    """``2*pi*|s_n|`` as a float or tower."""
    return mag_scale(abs(a.entry(n)), TWO_PI)


def _step(t, weight):
    """One application of the potential part of the model map (magnitudes)."""
    ft = mag_expm1(t) if not (isinstance(t, float) and t < 0) else None
    if ft is None:
        raise ValueError("model map applied to a negative potential")
    if isinstance(ft, Tower):
        if isinstance(weight, Tower):
            if ft.height > weight.height:
                return ft
            if ft.height < weight.height:
                return -math.inf
            return None
        return ft
    if isinstance(weight, Tower):
        return -math.inf
    return ft - weight


def apply_model(x: ModelPoint) -> tuple[float, ExternalAddress, bool]:
    """Image of ``x``; the flag reports a negative (non-model) potential."""
    t_next = _step(x.t, _entry_weight(x.addr, 1))
    return t_next, x.addr.shift(), t_next < 0


def orbit(x: ModelPoint, n: int) -> list:
    """Potentials ``T(F^k(x))`` for ``k = 0..n`` (stops early once negative)."""
    ts = [x.t]
    t = x.t
    for k in range(1, n + 1):
        t = _step(t, _entry_weight(x.addr, k))
        if t is None:
            raise UndecidedAtDepth(k, "orbit potential and entry are both beyond double range")
        ts.append(t)
        if t < 0:
            break
    return ts


# ---------------------------------------------------------------------------
# certified intervals


class Tag(enum.Enum):
    CERTIFIED = "certified"
    TRUNCATION_BOUNDED = "truncation_bounded"


@dataclass(frozen=True)
class CertInterval:
    lo: Union[float, Tower]
    hi: Union[float, Tower]
    tag: Tag = Tag.CERTIFIED
    depth: Optional[int] = None

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def mid(self) -> float:
        return 0.5 * (float(self.lo) + float(self.hi))

    @property
    def width(self) -> float:
        return float(self.hi) - float(self.lo)

    def contains(self, v: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= v <= self.hi + slack

    def as_list(self) -> list:
        return [float(self.lo), float(self.hi)]


def _sup_terms(a: ExternalAddress, depth: int):
    """``max_{1<=n<=depth} F^{-n}(2 pi |s_n|)`` with early exit per term."""
    best = 0.0
    for n in range(1, depth + 1):
        y = _entry_weight(a, n)
        for _ in range(n):
            if not isinstance(y, Tower) and y <= best:
                break
            y = mag_log1p(y)
        else:
            if y > best:
                best = y
    return best


def _ep_exact_depth(a: EventuallyPeriodic) -> int:
    # entries past this index repeat earlier ones at a smaller exponent
    return max(len(a.pre), 1) + len(a.per) - 1


@functools.lru_cache(maxsize=1 << 16)
def t_star(a: ExternalAddress, depth: int = 64) -> CertInterval:
    """Bracket for ``t*_s = sup_{n>=1} F^{-n}(2 pi |s_n|)``.

    For eventually periodic addresses the supremum is attained within the
    first preperiod + period entries, so ``hi`` is exact regardless of
    ``depth``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if isinstance(a, EventuallyPeriodic):
        exact_n = _ep_exact_depth(a)
        lo = _sup_terms(a, min(depth, exact_n))
        hi = lo if depth >= exact_n else _sup_terms(a, exact_n)
        return CertInterval(lo, hi, Tag.CERTIFIED, depth)
    lo = _sup_terms(a, depth)
    growth = getattr(a, "growth", None)
    if isinstance(growth, Bounded):
        tail = f_inv_iter(TWO_PI * growth.M, depth + 1)
        return CertInterval(lo, max(lo, tail), Tag.TRUNCATION_BOUNDED, depth)
    if isinstance(growth, Dominated):
        bound = a.tstar_bound()
        return CertInterval(lo, max(lo, bound), Tag.TRUNCATION_BOUNDED, depth)
    return CertInterval(lo, math.inf, Tag.TRUNCATION_BOUNDED, depth)


# ---------------------------------------------------------------------------
# membership


class Status(enum.Enum):
    INSIDE = "proved_inside"
    OUTSIDE = "proved_outside"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Membership:
    status: Status
    index: Optional[int] = None

    @property
    def inside(self) -> bool:
        return self.status is Status.INSIDE

    @property
    def outside(self) -> bool:
        return self.status is Status.OUTSIDE


def in_J_geq_Q(x: ModelPoint, Q: float = 0.0, depth: int = 4000, tstar_depth: int = 64, eps: float = EPS) -> Membership:
    """Certify whether every iterate of ``x`` keeps potential ``>= Q``.

    ``depth`` caps the number of iterates examined.  Potentials within ``eps``
    of a certificate threshold resolve to ``UNKNOWN``.
    """
    a = x.addr
    t = x.t
    periodic = isinstance(a, EventuallyPeriodic)
    if periodic:
        pre, per = len(a.pre), len(a.per)
        history = {}
    for n in range(depth + 1):
        if t < Q - eps:
            return Membership(Status.OUTSIDE, n)
        if t < Q:
            return Membership(Status.UNKNOWN, n)
        hi = t_star(a.shift(n), tstar_depth).hi
        if t >= hi + (1.0 + Q + eps):
            return Membership(Status.INSIDE, n)
        if periodic and n >= pre:
            prev = history.get(n - per)
            if prev is not None and t >= prev:
                return Membership(Status.INSIDE, n)
            history[n] = t
            history.pop(n - per, None)
        t = _step(t, _entry_weight(a, n + 1))
        if t is None:
            return Membership(Status.UNKNOWN, n + 1)
    return Membership(Status.UNKNOWN, depth)


def in_J(x: ModelPoint, depth: int = 4000, tstar_depth: int = 64, eps: float = EPS) -> Membership:
    return in_J_geq_Q(x, 0.0, depth, tstar_depth, eps)


def t_min(a: ExternalAddress, tol: float = 1e-9, depth: int = 4000, tstar_depth: int = 64, Q: float = 0.0) -> CertInterval:
    """Certified interval of width ``<= tol`` around the minimal potential.

    The lower end is a proved lower bound (every bisection point below it was
    certified outside), the upper end a proved upper bound.  With ``Q > 0`` the
    same search brackets the least ``t`` with ``(t, s)`` in ``J_{>=Q}``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    ts = t_star(a, tstar_depth)
    if isinstance(ts.hi, Tower) or math.isinf(ts.hi):
        raise NotExponentiallyBounded(f"no finite upper bound for t* of {a}")
    lo = float(ts.lo)
    hi = float(ts.hi) + 1.0 + Q
    if Q > 0:
        # (t_s + Q, s) lies in J_{>=Q}; below Q nothing does
        lo = max(lo, Q)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        r = in_J_geq_Q(ModelPoint(mid, a), Q, depth, tstar_depth)
        if r.inside:
            hi = mid
        elif r.outside:
            lo = mid
        else:
            raise CertificateStall(CertInterval(lo, hi, ts.tag, depth))
    return CertInterval(lo, hi, ts.tag, depth)


# ---------------------------------------------------------------------------
# classification


class SpeedClass(enum.Enum):
    NOT_EXP_BOUNDED = "not_exp_bounded"
    SLOW = "slow"
    FAST = "fast"
    UNKNOWN_AT_DEPTH = "unknown_at_depth"


def classify(a: ExternalAddress, depth: int = 6, doublings: int = 3) -> SpeedClass:
    """Slow/fast classification.

    Eventually periodic and bounded addresses are slow.  Otherwise the lower
    bounds ``L_n = lo(t*(shift^n a))`` are computed for ``n <= depth``; the
    address is reported fast once ``L`` at least doubles ``doublings`` times
    in a row starting from a value ``>= 1``.
    """
    if isinstance(a, EventuallyPeriodic):
        return SpeedClass.SLOW
    if isinstance(getattr(a, "growth", None), Bounded):
        return SpeedClass.SLOW
    L0 = t_star(a, depth).lo
    if isinstance(L0, Tower):
        return SpeedClass.NOT_EXP_BOUNDED
    run = 0
    prev = L0
    for n in range(1, depth + 1):
        cur = t_star(a.shift(n), depth).lo
        if prev >= 1.0 and cur >= mag_scale(prev, 2.0):
            run += 1
            if run >= doublings:
                return SpeedClass.FAST
        else:
            run = 0
        prev = cur
    return SpeedClass.UNKNOWN_AT_DEPTH


# ---------------------------------------------------------------------------
# sub-fans and perturbed addresses


def in_subfan(x: Union[ModelPoint, ExternalAddress], base: ExternalAddress, depth: int = 64) -> bool:
    """Entrywise magnitude dominance ``|s_n| >= |base_n|`` for all ``n >= 0``."""
    addr = x.addr if isinstance(x, ModelPoint) else x
    if isinstance(addr, EventuallyPeriodic) and isinstance(base, EventuallyPeriodic):
        n_check = max(len(addr.pre), len(base.pre)) + math.lcm(len(addr.per), len(base.per))
        exact = True
    else:
        n_check = depth
        exact = False
    for n in range(n_check):
        if abs(addr.entry(n)) < abs(base.entry(n)):
            return False
    if not exact:
        raise UndecidedAtDepth(depth)
    return True


@dataclass(frozen=True)
class _PatchedRule:
    base: ExternalAddress
    index: int
    value: object

    def __call__(self, n: int):
        return self.value if n == self.index else self.base.entry(n)


def endpoint_perturbation(x: ModelPoint, j: int) -> ExternalAddress:
    """Copy of ``addr(x)`` with entry ``j+1`` raised to ``ceil(F(t_j) / 2 pi)``.

    ``t_j`` is the potential of the ``j``-th iterate.  The endpoints of the
    perturbed addresses converge to ``x`` as ``j`` grows.
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    ts = orbit(x, j)
    if len(ts) <= j or ts[-1] < 0:
        raise NotCertified("x leaves the model before iterate j")
    value = mag_ceil(mag_scale(mag_expm1(ts[j]), 1.0 / TWO_PI))
    a = x.addr
    if isinstance(a, EventuallyPeriodic) and isinstance(value, int):
        return a.replace(j + 1, value)
    return Generated(_PatchedRule(a, j + 1, value), getattr(a, "growth", None), f"perturb({a},{j})")


class _Orbit:
    """Lazily extended potential orbit of a model point (magnitudes)."""

    def __init__(self, x: ModelPoint):
        self.x = x
        self.ts = [x.t]
        self.memo = _Memo()

    def __getitem__(self, k: int):
        with self.memo.lock:
            while len(self.ts) <= k:
                n = len(self.ts)
                t = _step(self.ts[-1], _entry_weight(self.x.addr, n))
                if t is None or t < 0:
                    raise NotCertified(f"orbit potential undefined or negative at iterate {n}")
                self.ts.append(t)
            return self.ts[k]


class _FlankRule:
    def __init__(self, orbit: _Orbit, j: int, sign: int):
        self.orbit = orbit
        self.j = j
        self.sign = sign

    def __call__(self, n: int):
        if n <= self.j:
            return self.orbit.x.addr.entry(n)
        v = mag_ceil(mag_scale(mag_expm1(self.orbit[n - 1]), 1.0 / TWO_PI))
        return -v if self.sign < 0 else v


class _FlankBound:
    """Upper bound for t* of every shift of a flanking address."""

    def __init__(self, orbit: _Orbit, j: int):
        self.orbit = orbit
        self.j = j

    def __call__(self, k: int):
        c = LOG_1_2PI + 1e-9
        tk = self.orbit[k]
        if k >= self.j:
            return _pad(tk, c)
        tail = f_inv_iter(_pad(self.orbit[self.j], c), self.j - k)
        return max(tk, tail)


def _pad(t, c: float):
    if isinstance(t, Tower):
        return t
    return t + c + 1e-12 * t


def flank_sequences(x: ModelPoint, j: int, Q: float = 0.0, tol: float = 1e-9) -> tuple[Generated, Generated]:
    """Addresses just below and above ``addr(x)`` whose endpoints escape.

    Both agree with ``addr(x)`` through index ``j``; from index ``j+1`` on the
    entries are ``-/+ ceil(F(t_{n-1}) / 2 pi)`` along the orbit of ``x``.
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    m = in_J_geq_Q(x, Q)
    if not m.inside:
        raise NotCertified(f"x not certified in J_>={Q}: {m.status.value}")
    tm = t_min(x.addr, tol)
    if x.t - tm.hi <= 0:
        raise IsEndpoint(f"potential {x.t} is within the endpoint bracket {tm.as_list()}")
    orb = _Orbit(x)
    bound = Dominated(_FlankBound(orb, j))
    minus = Generated(_FlankRule(orb, j, -1), bound, f"flank-({x.addr},{j})")
    plus = Generated(_FlankRule(orb, j, +1), bound, f"flank+({x.addr},{j})")
    return minus, plus


def flank_point(x: ModelPoint, flank: Generated, j: int, Q: float = 0.0, margin: float = 3.0) -> ModelPoint:
    """A point on the flanking hair whose ``j``-th iterate sits at ``t_j + Q + margin``.

    The potential is pulled back through the shared first ``j`` entries, so
    all earlier iterates dominate those of ``x``.
    """
    orb = orbit(x, j)
    t = orb[j] + Q + margin
    if isinstance(t, Tower):
        raise NotCertified("orbit of x overflows before iterate j")
    for n in range(j, 0, -1):
        t = math.log1p(t + TWO_PI * abs(flank.entry(n)))
    return ModelPoint(t, flank)
