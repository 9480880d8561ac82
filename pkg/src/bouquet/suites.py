"""Named randomized property suites run by ``bouquet verify``.

Each suite takes an explicit seed and returns a :class:`SuiteResult`; the
default parameters are the acceptance-scale ones.
"""

from __future__ import annotations

import functools
import itertools
import math
import random
import time
from collections import defaultdict
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .addresses import Cmp, EventuallyPeriodic, Intermediate, cmp_lex
from .combinatorics import nwt_search, unlinked
from .errors import BouquetError, EmptyRealization, HitsPartition
from .itinerary import itinerary, itinerary_interval, verify_slow_sharing
from .magnitude import Tower
from .model import (
    TWO_PI,
    ModelPoint,
    SpeedClass,
    classify,
    endpoint_perturbation,
    f_inv_iter,
    flank_point,
    flank_sequences,
    in_J,
    in_J_geq_Q,
    in_subfan,
    orbit,
    t_min,
    t_star,
)
from .rays import conjugacy_residual, land_periodic, plane_itinerary, trace_ray, vertical_order_report
from .sampling import random_ep, sample_between

PLANE_PARTITION = Intermediate((), -1)  # the address -1/2 inf


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    violations: int = 0
    seconds: float = 0.0
    metrics: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.cases > 0 and self.violations == 0

    def fail(self, detail: str) -> None:
        self.violations += 1
        if len(self.failures) < 10:
            self.failures.append(detail)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "violations": self.violations,
            "seconds": round(self.seconds, 3),
            "metrics": self.metrics,
            "failures": self.failures,
        }


def _timed(fn):
    @functools.wraps(fn)
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    return run


@_timed
def lemma_bracket(seed: int = 7, n: int = 1000, tol: float = 1e-9) -> SuiteResult:
    """Certified ``t_min`` lies in ``[lo(t*), hi(t*) + 1]``."""
    rng = random.Random(seed)
    res = SuiteResult("lemma-bracket")
    for _ in range(n):
        s = random_ep(rng, 10, 3, 6)
        ts = t_star(s)
        tm = t_min(s, tol)
        res.cases += 1
        if not (tm.lo >= ts.lo - 1e-9 and tm.hi <= ts.hi + 1 + 1e-9):
            res.fail(f"{s}: t_min {tm.as_list()} vs t* {ts.as_list()}")
    return res


def _dominating(rng: random.Random, s0: EventuallyPeriodic) -> EventuallyPeriodic:
    def grow(v: int) -> int:
        m = abs(v) + rng.choice([0, 0, 1, 2, 5])
        return m if rng.random() < 0.5 else -m

    return EventuallyPeriodic(tuple(grow(v) for v in s0.pre), tuple(grow(v) for v in s0.per))


@_timed
def monotonicity(seed: int = 7, n: int = 500, tol: float = 1e-9) -> SuiteResult:
    """Larger entry magnitudes never lower the minimal potential."""
    rng = random.Random(seed)
    res = SuiteResult("monotonicity")
    for _ in range(n):
        s0 = random_ep(rng, 10, 3, 6)
        s = _dominating(rng, s0)
        if not in_subfan(s, s0):
            res.fail(f"construction: {s} does not dominate {s0}")
            continue
        res.cases += 1
        lo, lo0 = t_min(s, tol).lo, t_min(s0, tol).lo
        if not lo >= lo0 - 1e-9:
            res.fail(f"{s} below {s0}: {lo} < {lo0}")
    return res


@_timed
def backwards_shrinking(seed: int = 7, n: int = 300, tol: float = 1e-9) -> SuiteResult:
    """Potential gaps shrink under pullback: ``T(y) - T(x) <= F^-k(delta)``."""
    rng = random.Random(seed)
    res = SuiteResult("backwards-shrinking")
    worst = -math.inf
    while res.cases < n:
        s = random_ep(rng, 5, 2, 4)
        s2 = EventuallyPeriodic(tuple(v * rng.choice([-1, 1]) for v in s.pre), tuple(v * rng.choice([-1, 1]) for v in s.per))
        base = float(t_min(s, tol).hi)
        tx = base + rng.uniform(0.0, 1.0)
        ty = tx + rng.uniform(0.0, 0.5)
        k = rng.randint(1, 5)
        ox = orbit(ModelPoint(tx, s), k)
        oy = orbit(ModelPoint(ty, s2), k)
        if len(ox) <= k or len(oy) <= k or isinstance(ox[k], Tower) or isinstance(oy[k], Tower):
            continue
        delta = oy[k] - ox[k]
        if not delta > 0:
            continue
        res.cases += 1
        bound = f_inv_iter(delta, k) + tol
        gap = ty - tx
        worst = max(worst, gap - bound)
        if not (0 <= gap <= bound):
            res.fail(f"{s} k={k}: gap {gap} bound {bound}")
    res.metrics["worst_excess"] = worst
    return res


@_timed
def endpoint_convergence(seed: int = 7, n: int = 100, jmin: int = 2, jmax: int = 8) -> SuiteResult:
    """Perturbed addresses have endpoints converging to the chosen point."""
    rng = random.Random(seed)
    res = SuiteResult("endpoint-convergence")
    worst = 0.0
    for _ in range(n):
        s = random_ep(rng, 1, 3, 6)
        tm = float(t_min(s, 1e-12).hi)
        x = ModelPoint(tm + 1e-9 * (1.0 + rng.random()), s)
        if not in_J(x).inside:
            res.fail(f"base point ({x.t}, {s}) not certified")
            continue
        for j in range(jmin, jmax + 1):
            sj = endpoint_perturbation(x, j)
            res.cases += 1
            c = t_min(sj, 1e-10)
            bound = f_inv_iter(TWO_PI + 1.0, j) + 1e-6
            err = abs(x.t - c.mid)
            worst = max(worst, err / bound)
            if not err <= bound:
                res.fail(f"{s} j={j}: |t - mid| = {err} > {bound}")
    res.metrics["worst_ratio"] = worst
    return res


@_timed
def flanks(seed: int = 7, n: int = 50, Q: float = 3.0, classify_depth: int = 12) -> SuiteResult:
    """Flanking addresses are ordered around ``s``, fast, and carry J_>=Q points."""
    rng = random.Random(seed)
    res = SuiteResult("flanks")
    while res.cases < n:
        s = random_ep(rng, 10, 2, 4, min_abs=4)
        tm = float(t_min(s, 1e-12).hi)
        x = ModelPoint(tm + 1e-6, s)
        j = rng.randint(1, 3)
        res.cases += 1
        try:
            minus, plus = flank_sequences(x, j, Q)
        except BouquetError as e:
            res.fail(f"{s} j={j}: {type(e).__name__} {e}")
            continue
        if not (cmp_lex(minus, s) is Cmp.LESS and cmp_lex(s, plus) is Cmp.LESS):
            res.fail(f"{s} j={j}: ordering")
        for f in (minus, plus):
            if classify(f, classify_depth) is not SpeedClass.FAST:
                res.fail(f"{f}: not classified fast")
            if not in_J_geq_Q(flank_point(x, f, j, Q), Q).inside:
                res.fail(f"{f}: no certified J_>={Q} point")
    return res


def _address_pool(bound: int = 3, max_pre: int = 2, max_per: int = 2) -> list:
    rng = range(-bound, bound + 1)
    out = set()
    for L in range(max_pre + 1):
        for P in range(1, max_per + 1):
            for pre in itertools.product(rng, repeat=L):
                for per in itertools.product(rng, repeat=P):
                    out.add(EventuallyPeriodic(pre, per))
    return sorted(out, key=str)


def sharing_pairs(s, pool: list, horizon: int) -> list:
    """Pairs from ``pool`` whose complete itineraries with respect to ``s`` agree.

    For eventually periodic ``r`` the itinerary has the preperiod and period
    of ``r``, so ``horizon = max preperiod + lcm of periods`` decides equality.
    """
    groups = defaultdict(list)
    for r in pool:
        try:
            groups[itinerary(s, r, horizon).entries].append(r)
        except HitsPartition:
            continue
    pairs = []
    for g in groups.values():
        pairs.extend(itertools.combinations(g, 2))
    return pairs


@_timed
def sharing_slow(seed: int = 7, n: int = 100, N: int = 10) -> SuiteResult:
    """Addresses sharing an itinerary have ``t*(sigma^N r) <= t_s + 2 pi``."""
    rng = random.Random(seed)
    res = SuiteResult("sharing-slow")
    max_pre, max_per = 2, 2
    pool = _address_pool(3, max_pre, max_per)
    horizon = max_pre + math.lcm(*range(1, max_per + 1))
    pairs = []
    partitions = 0
    while len(pairs) < n and partitions < 500:
        s = random_ep(rng, 6, 1, 3)
        partitions += 1
        found = sharing_pairs(s, pool, horizon)
        rng.shuffle(found)
        pairs.extend((s, r1, r2) for r1, r2 in found[:25])
    worst = -math.inf
    for s, r1, r2 in pairs[:n]:
        res.cases += 1
        rep = verify_slow_sharing(s, r1, r2, N)
        worst = max(worst, max(float(h) for h in rep.tstar_hi) - rep.bound)
        if not rep.holds:
            res.fail(f"s={s}, r1={r1}, r2={r2}: {rep.to_dict()}")
    res.metrics.update(worst_margin=worst, partitions_scanned=partitions)
    return res


@_timed
def unlinked_itineraries(seed: int = 7, n: int = 200, per_set: int = 4) -> SuiteResult:
    """Samples from cylinders with distinct prefixes form unlinked sets."""
    rng = random.Random(seed)
    res = SuiteResult("unlinked-itineraries")
    while res.cases < n:
        s = random_ep(rng, 3, 2, 3)
        L = rng.randint(1, 4)
        p1 = [rng.randint(-3, 3) for _ in range(L)]
        p2 = list(p1)
        p2[rng.randrange(L)] += rng.choice([-2, -1, 1, 2])
        try:
            cyl = [itinerary_interval(s, p1), itinerary_interval(s, p2)]
        except EmptyRealization:
            continue
        sets = []
        for intervals, prefix in zip(cyl, (p1, p2)):
            members = []
            for _ in range(per_set):
                iv = rng.choice(intervals)
                r = sample_between(iv.lower, iv.upper, rng)
                try:
                    got = list(itinerary(s, r, L).entries)
                except HitsPartition:
                    continue
                if got != prefix:
                    res.fail(f"sample {r} of cylinder {prefix} has itinerary {got}")
                if r not in members:
                    members.append(r)
            sets.append(members)
        res.cases += 1
        if not unlinked(*sets):
            res.fail(f"s={s}: cylinders {p1} and {p2} linked")
    return res


@_timed
def nwt(configs=((1, 2, 1, 10, 2), (2, 2, 1, 12, 2)), jobs: int = 1) -> SuiteResult:
    """Exhaustive wandering-triangle refutation; any survivor fails."""
    res = SuiteResult("nwt")
    runs = []
    for M, P, L, H, W in configs:
        summary = nwt_search(M, P, L, H, W, jobs=jobs)
        res.cases += summary.tested
        for tri in summary.survivors:
            res.fail(f"survivor {tri} at {(M, P, L, H, W)}")
        runs.append(summary.to_dict())
    res.metrics["runs"] = [{k: r[k] for k in ("params", "tested", "refuted", "max_refutation_depth")} for r in runs]
    return res


CONJUGACY_PARAMS = (-2.0, -3.0, complex(1.0, 1.0))
CONJUGACY_POTENTIALS = (8.0, 12.0, 16.0, 20.0)


@_timed
def conjugacy(seed: int = 7, n_addresses: int = 6, depth: int = 20, tol: float = 1e-6) -> SuiteResult:
    """Trace residuals on a grid of (address, t, a); conjugacy defect reported."""
    rng = random.Random(seed)
    res = SuiteResult("conjugacy")
    addrs = [random_ep(rng, 2, 2, 3) for _ in range(n_addresses)]
    worst = worst_conj = 0.0
    for a in CONJUGACY_PARAMS:
        for s in addrs:
            for t in CONJUGACY_POTENTIALS:
                res.cases += 1
                try:
                    r = trace_ray(a, s, t, depth, tol=math.inf)
                    c = conjugacy_residual(a, s, t, depth)
                except BouquetError as e:
                    res.fail(f"{s} t={t} a={a}: {type(e).__name__} {e}")
                    continue
                worst = max(worst, r.residual)
                worst_conj = max(worst_conj, c)
                if not r.residual <= tol:
                    res.fail(f"{s} t={t} a={a}: residual {r.residual}")
    res.metrics.update(worst_residual=worst, worst_relative_conjugacy_defect=worst_conj)
    return res


@_timed
def vertical_order(seed: int = 7, n: int = 20, size: int = 5, t: float = 10.0, a: float = -2.0) -> SuiteResult:
    """Imaginary-part order of traced points matches lexicographic order."""
    rng = random.Random(seed)
    res = SuiteResult("vertical-order")
    in_plane = at_seed = 0
    for _ in range(n):
        family = []
        while len(family) < size:
            s = random_ep(rng, 2, 2, 3)
            if all(cmp_lex(s, f) is not Cmp.EQUAL for f in family):
                family.append(s)
        rep = vertical_order_report(a, family, t)
        res.cases += 1
        in_plane += rep.resolved_in_plane
        at_seed += rep.resolved_at_seed
        for v in rep.violations:
            res.fail(f"order violated for {v}")
    res.metrics.update(pairs_resolved_in_plane=in_plane, pairs_resolved_at_seed=at_seed)
    return res


@_timed
def landing(seed: int = 7, n: int = 10, length: int = 6, a: float = -2.0) -> SuiteResult:
    """Landing point of the 0-ray against a real root-find; plane itineraries of traced samples."""
    rng = random.Random(seed)
    res = SuiteResult("landing")
    lp = land_periodic(a, EventuallyPeriodic.periodic(0))
    oracle = brentq(lambda x: math.exp(x) + a - x, 0.5, 5.0, xtol=1e-15)
    res.cases += 1
    err = abs(lp.z - oracle)
    res.metrics.update(landing_point=[lp.z.real, lp.z.imag], oracle=oracle, landing_error=err, multiplier=lp.multiplier)
    if not (err <= 1e-9 and lp.multiplier > 1):
        res.fail(f"landing point {lp.z} vs oracle {oracle}")
    for _ in range(n):
        s = random_ep(rng, 2, 2, 3)
        t = float(t_min(s, 1e-12).hi) + 1e-8
        sample = trace_ray(a, s, t, None, tol=1e-6, Q=0.0)
        res.cases += 1
        plane = plane_itinerary(a, sample.z, length)
        comb = list(itinerary(PLANE_PARTITION, s, length).entries)
        if plane != comb:
            res.fail(f"{s}: plane {plane} vs combinatorial {comb}")
    return res


SUITES = {
    "lemma-bracket": lemma_bracket,
    "monotonicity": monotonicity,
    "backwards-shrinking": backwards_shrinking,
    "endpoint-convergence": endpoint_convergence,
    "flanks": flanks,
    "sharing-slow": sharing_slow,
    "unlinked-itineraries": unlinked_itineraries,
    "nwt": nwt,
    "conjugacy": conjugacy,
    "vertical-order": vertical_order,
    "landing": landing,
}
