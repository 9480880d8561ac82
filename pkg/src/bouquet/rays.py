"""Dynamic rays of ``f_a(z) = e^z + a`` traced by inverse-branch pullback.

A model point ``(t, s)`` is sent to the plane by following its model orbit out
to a large potential, seeding there with ``t + 2 pi i s``, and pulling back
along the branches ``log(w - a) + 2 pi i s_j``.  Plane points are Python
``complex`` values.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

from .addresses import EventuallyPeriodic, ExternalAddress, cmp_lex, Cmp
from .errors import (
    BoundaryHit,
    DepthInsufficient,
    NoConvergence,
    NotCertified,
    OverflowInSeed,
    PlaneOverflow,
    PreconditionFailed,
    SingularValueHit,
)
from .magnitude import Tower
from .model import ModelPoint, in_J_geq_Q, orbit, t_min

TWO_PI = 2.0 * math.pi
DEFAULT_Q = 5.0
AUTO_DEPTH_POTENTIAL = 40.0
MAX_AUTO_DEPTH = 2000


def exp_map(z: complex, a: complex) -> complex:
    try:
        return cmath.exp(z) + a
    except OverflowError:
        raise PlaneOverflow(f"exp overflows at z = {z}") from None


def inverse_branch(w: complex, a: complex, k: int) -> complex:
    """``log(w - a) + 2 pi i k`` with the principal logarithm."""
    d = w - a
    if d == 0:
        raise SingularValueHit(f"w = a = {a}")
    return cmath.log(d) + TWO_PI * 1j * k


@dataclass(frozen=True)
class RaySample:
    addr: ExternalAddress
    t: float
    z: complex
    depth: int
    residual: float
    path: tuple = field(default=(), compare=False, repr=False)

    @property
    def re(self) -> float:
        return self.z.real

    @property
    def im(self) -> float:
        return self.z.imag

    def to_row(self) -> dict:
        return {"addr": str(self.addr), "t": self.t, "re": self.z.real, "im": self.z.imag, "residual": self.residual, "depth": self.depth}


@dataclass(frozen=True)
class RayFailure:
    addr: ExternalAddress
    t: float
    error: str
    message: str


def _entry_float(s: ExternalAddress, j: int) -> int:
    v = s.entry(j)
    if isinstance(v, Tower):
        raise OverflowInSeed(f"entry {j} of {s} exceeds double range")
    return v


def _pull(s: ExternalAddress, ts: list, a: complex, depth: int) -> tuple[list, float]:
    """Pull back from the seed; returns the points ``z_0..z_K`` and a seed-error bound."""
    K = depth
    for k in range(depth + 1):
        if isinstance(ts[k], Tower):
            K = k - 1
            break
    if K < 0:
        raise OverflowInSeed("the starting potential exceeds double range")
    if K == depth:
        tK = ts[K]
        z = tK + TWO_PI * 1j * _entry_float(s, K)
        # asymptotic seed error: the unresolved part of log(z_{K+1} - a)
        seed_err = (abs(a) + TWO_PI * abs(_entry_float(s, K + 1)) + 1.0) / max(math.expm1(min(tK, 700.0)), 1e-300)
    else:
        # t_{K+1} overflows: use log t_{K+1} = t_K + log1p(-(1 + 2 pi |s_{K+1}|) e^{-t_K})
        tK = ts[K]
        w = TWO_PI * abs(_entry_float(s, K + 1)) if not isinstance(s.entry(K + 1), Tower) else None
        if w is None:
            raise OverflowInSeed("entry beyond double range at the seed level")
        log_next = tK + math.log1p(-(1.0 + w) * math.exp(-tK))
        z = log_next + TWO_PI * 1j * _entry_float(s, K)
        seed_err = (abs(a) + w + 1.0) * math.exp(-tK)
    zs = [z]
    for j in range(K - 1, -1, -1):
        z = inverse_branch(z, a, _entry_float(s, j))
        zs.append(z)
    zs.reverse()
    # each pullback contracts errors by 1/|z - a| at the image point
    contraction = 1.0
    for j in range(1, K + 1):
        contraction /= max(abs(zs[j] - a), 1.0)
    return zs, seed_err * contraction


def auto_depth(x: ModelPoint, target: float = AUTO_DEPTH_POTENTIAL, cap: int = MAX_AUTO_DEPTH) -> int:
    """Least depth at which the model orbit reaches potential ``target`` (at most ``cap``).

    Slowly escaping orbits hit the cap; the pullback residual then decides
    whether the depth sufficed.
    """
    ts = orbit(x, cap)
    for j, tj in enumerate(ts):
        if tj < 0:
            raise NotCertified(f"orbit potential negative at iterate {j}")
        if tj >= target:
            return max(j, 1)
    return cap


def trace_ray(
    a: complex,
    s: ExternalAddress,
    t: float,
    depth: Optional[int] = 20,
    tol: float = 1e-6,
    Q: float = DEFAULT_Q,
    certify: bool = True,
) -> RaySample:
    """Plane point at potential ``t`` on the ray of address ``s``.

    ``depth=None`` picks the depth with :func:`auto_depth`.  The residual
    compares against a trace one level deeper and adds the seed error bound
    and a rounding allowance.
    """
    a = complex(a)
    x = ModelPoint(t, s)
    if certify:
        m = in_J_geq_Q(x, Q)
        if not m.inside:
            raise NotCertified(f"({t}, {s}) not certified in J_>={Q}: {m.status.value}")
    if depth is None:
        depth = auto_depth(x)
    ts = orbit(x, depth + 1)
    if len(ts) < depth + 2 or ts[-1] < 0:
        raise NotCertified("model orbit leaves the half-plane")
    zs, seed_err = _pull(s, ts, a, depth)
    zs2, _ = _pull(s, ts, a, depth + 1)
    z0 = zs[0]
    residual = abs(z0 - zs2[0]) + seed_err + 8.0 * 2.0**-52 * (abs(z0) + 1.0)
    if not (residual <= tol):
        raise DepthInsufficient(residual, tol)
    return RaySample(s, t, z0, depth, residual, tuple(zs))


def conjugacy_residual(a: complex, s: ExternalAddress, t: float, depth: int = 20, Q: float = DEFAULT_Q) -> float:
    """``|f_a(g(t, s)) - g(model image)|`` relative to ``1 + |g(model image)|``."""
    x = ModelPoint(t, s)
    s0 = trace_ray(a, s, t, depth, tol=math.inf, Q=Q)
    ts = orbit(x, 1)
    t1 = ts[1]
    if isinstance(t1, Tower):
        raise PlaneOverflow("image potential exceeds double range")
    s1 = trace_ray(a, s.shift(), float(t1), depth, tol=math.inf, Q=Q)
    return abs(exp_map(s0.z, a) - s1.z) / (1.0 + abs(s1.z))


def ray_polyline(
    a: complex,
    s: ExternalAddress,
    t_lo: float,
    t_hi: float,
    samples: int,
    depth: Optional[int] = 20,
    tol: float = 1e-6,
    Q: float = DEFAULT_Q,
) -> list:
    """Samples on a uniform potential grid; failures become :class:`RayFailure`."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if t_hi < t_lo:
        raise ValueError("t_hi < t_lo")
    if t_lo == t_hi or samples == 1:
        grid = [t_lo]
    else:
        grid = [t_lo + (t_hi - t_lo) * i / (samples - 1) for i in range(samples)]
    out: list = []
    for t in grid:
        try:
            out.append(trace_ray(a, s, t, depth, tol, Q))
        except (NotCertified, DepthInsufficient, OverflowInSeed, SingularValueHit) as e:
            out.append(RayFailure(s, t, type(e).__name__, str(e)))
    return out


def _first_separation(p: tuple, q: tuple, sep: float) -> Optional[int]:
    for j in range(min(len(p), len(q))):
        if abs(p[j] - q[j]) > sep * (1.0 + abs(p[j])):
            return j
    return None


@dataclass(frozen=True)
class VerticalOrderReport:
    ok: bool
    pairs: int
    resolved_in_plane: int
    resolved_at_seed: int
    violations: tuple = ()

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "pairs": self.pairs,
            "resolved_in_plane": self.resolved_in_plane,
            "resolved_at_seed": self.resolved_at_seed,
            "violations": [list(v) for v in self.violations],
        }


def vertical_order_report(a: complex, addrs: list, t: float, depth: int = 20, Q: float = DEFAULT_Q, sep: float = 1e-9) -> VerticalOrderReport:
    """Compare imaginary-part order of traced points with lexicographic order.

    Each pair is compared at the first iterate where the traced orbits are
    separated by more than ``sep`` (relative).  Addresses sharing a long prefix
    have base points equal to within rounding; when no traced iterate
    separates them the comparison falls back to the seed level, whose
    imaginary part is ``2 pi`` times the first differing entry.
    """
    traced = [(s, trace_ray(a, s, t, depth, tol=math.inf, Q=Q)) for s in addrs]
    in_plane = at_seed = 0
    bad = []
    for i in range(len(traced)):
        for k in range(i + 1, len(traced)):
            (r1, x1), (r2, x2) = traced[i], traced[k]
            c = cmp_lex(r1, r2)
            if c is Cmp.EQUAL:
                raise PreconditionFailed(f"repeated address {r1}")
            if c is Cmp.GREATER:
                (r1, x1), (r2, x2) = (r2, x2), (r1, x1)
            j = _first_separation(x1.path, x2.path, sep)
            if j is not None:
                in_plane += 1
                good = x1.path[j].imag < x2.path[j].imag
            else:
                at_seed += 1
                n = len(x1.path)
                while r1.entry(n) == r2.entry(n):
                    n += 1
                good = r1.entry(n) < r2.entry(n)
            if not good:
                bad.append((str(r1), str(r2)))
    pairs = in_plane + at_seed
    return VerticalOrderReport(not bad, pairs, in_plane, at_seed, tuple(bad))


def vertical_order_check(a: complex, addrs: list, t: float, depth: int = 20, Q: float = DEFAULT_Q, sep: float = 1e-9) -> bool:
    return vertical_order_report(a, addrs, t, depth, Q, sep).ok


def plane_itinerary(a: float, z: complex, n: int, eps: float = 1e-9) -> list:
    """Strip indices ``k`` with ``Im f^j(z)`` in ``((2k-1) pi, (2k+1) pi)``."""
    if isinstance(a, complex):
        if a.imag != 0:
            raise ValueError("plane itineraries need a real parameter")
        a = a.real
    if not a < -1:
        raise ValueError("plane itineraries need a < -1")
    out = []
    for j in range(n):
        y = z.imag
        k = math.floor((y + math.pi) / TWO_PI)
        if min(y - (2 * k - 1) * math.pi, (2 * k + 1) * math.pi - y) < eps:
            raise BoundaryHit(j)
        out.append(k)
        if j + 1 < n:
            z = exp_map(z, a)
    return out


@dataclass(frozen=True)
class LandingPoint:
    z: complex
    period: int
    residual: float
    multiplier: float
    trace: tuple
    itinerary_checked: int

    def to_dict(self) -> dict:
        return {
            "re": self.z.real,
            "im": self.z.imag,
            "period": self.period,
            "residual": self.residual,
            "multiplier": self.multiplier,
            "itinerary_checked": self.itinerary_checked,
        }


def _fp_and_derivative(z: complex, a: complex, p: int) -> tuple[complex, complex]:
    d = 1.0 + 0j
    for _ in range(p):
        e = cmath.exp(z)
        d *= e
        z = e + a
    return z, d


def land_periodic(a: complex, s: EventuallyPeriodic, tol: float = 1e-10, steps: int = 12, max_newton: int = 60) -> LandingPoint:
    """Landing point of the periodic ray ``s``.

    The ray is traced at potentials approaching ``t_s`` from above, then the
    last trace point seeds Newton's method on ``f^p(z) - z``.
    """
    a = complex(a)
    if not isinstance(s, EventuallyPeriodic) or s.pre:
        raise PreconditionFailed("land_periodic needs a purely periodic address")
    p = len(s.per)
    tm = float(t_min(s, 1e-12).hi)
    trace = []
    for k in range(steps):
        t = tm + 2.0 ** (-k)
        try:
            trace.append(trace_ray(a, s, t, None, tol=1e-6, Q=0.0))
        except (NotCertified, DepthInsufficient, OverflowInSeed, SingularValueHit, PlaneOverflow):
            break
    if not trace:
        raise NoConvergence("no ray sample could be traced near the landing point")
    z = trace[-1].z
    for _ in range(max_newton):
        try:
            fz, d = _fp_and_derivative(z, a, p)
        except OverflowError:
            raise NoConvergence("Newton iterate escaped") from None
        g = fz - z
        dg = d - 1.0
        if dg == 0:
            raise NoConvergence("singular Newton step")
        step = g / dg
        z = z - step
        if abs(step) <= 1e-15 * (1.0 + abs(z)):
            break
    else:
        raise NoConvergence("Newton did not converge")
    fz, d = _fp_and_derivative(z, a, p)
    residual = abs(fz - z)
    if not residual <= tol:
        raise NoConvergence(f"periodic-point residual {residual:.3g} exceeds {tol:.3g}")
    if abs(trace[-1].z - z) > 0.5:
        raise NoConvergence("refined point is far from the traced ray")
    checked = 0
    if a.imag == 0 and a.real < -1:
        n = 2 * p
        try:
            plane = plane_itinerary(a.real, z, n)
        except BoundaryHit:
            plane = None
        if plane is not None:
            if plane != [s.entry(j) for j in range(n)]:
                raise NoConvergence(f"landing point itinerary {plane} disagrees with {s}")
            checked = n
    return LandingPoint(z, p, residual, abs(d), tuple(r.z for r in trace), checked)
