"""Linking of finite address sets and the wandering-triangle refutation search."""

from __future__ import annotations

import functools
import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .addresses import Cmp, EventuallyPeriodic, ExternalAddress, cmp_lex
from .errors import EqualAddresses, NotDisjoint, SearchBudgetExceeded, UndecidedAtDepth


def _cmp(a, b) -> int:
    c = cmp_lex(a, b)
    if c is Cmp.UNDECIDED:
        raise UndecidedAtDepth(64)
    return -1 if c is Cmp.LESS else (1 if c is Cmp.GREATER else 0)


def sort_addresses(members) -> list:
    return sorted(members, key=functools.cmp_to_key(_cmp))


@dataclass(frozen=True)
class AddressSet:
    members: tuple

    def __post_init__(self):
        ordered = tuple(sort_addresses(self.members))
        for x, y in zip(ordered, ordered[1:]):
            if _cmp(x, y) == 0:
                raise EqualAddresses(f"repeated member {x}")
        object.__setattr__(self, "members", ordered)

    @classmethod
    def of(cls, *members) -> "AddressSet":
        return cls(tuple(members))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def translate(self, m: int) -> "AddressSet":
        return AddressSet(tuple(a.translate(m) for a in self.members))

    def shift_members(self, n: int) -> list:
        """Images under ``sigma^n`` (possibly with repetitions)."""
        return [a.shift(n) for a in self.members]

    def __str__(self) -> str:
        return "{" + ", ".join(str(a) for a in self.members) + "}"


def _distinct(members) -> list:
    out = []
    for a in sort_addresses(members):
        if not out or _cmp(out[-1], a) != 0:
            out.append(a)
    return out


def unlinked(A, B) -> bool:
    """True iff ``A`` lies in a single complementary interval of ``B`` on the circle."""
    A = list(A)
    B = list(B)
    pts = sorted([(a, 0) for a in A] + [(b, 1) for b in B], key=functools.cmp_to_key(lambda x, y: _cmp(x[0], y[0])))
    for (x, lx), (y, ly) in zip(pts, pts[1:]):
        if lx != ly and _cmp(x, y) == 0:
            raise NotDisjoint(f"{x} belongs to both sets")
    labels = [lab for _, lab in pts]
    changes = sum(1 for i in range(len(labels)) if labels[i] != labels[i - 1])
    return changes <= 2


def first_difference(r1: ExternalAddress, r2: ExternalAddress, depth_cap: int = 4096) -> int:
    if isinstance(r1, EventuallyPeriodic) and isinstance(r2, EventuallyPeriodic):
        limit = max(len(r1.pre), len(r2.pre)) + math.lcm(len(r1.per), len(r2.per))
        exact = True
    else:
        limit, exact = depth_cap, False
    for n in range(limit):
        if r1.entry(n) != r2.entry(n):
            return n
    if exact:
        raise EqualAddresses(f"{r1} = {r2}")
    raise UndecidedAtDepth(depth_cap)


def triangle_N(T) -> int:
    members = list(T)
    if len(members) != 3:
        raise ValueError("a triangle has three members")
    return max(first_difference(x, y) for x, y in itertools.combinations(members, 2))


@dataclass(frozen=True)
class RefutationReport:
    refuted_at: Optional[tuple]
    horizon: int
    reason: str = ""

    @property
    def survived(self) -> bool:
        return self.refuted_at is None

    @property
    def depth(self) -> Optional[int]:
        return None if self.refuted_at is None else self.refuted_at[2]

    def to_dict(self) -> dict:
        return {
            "refuted_at": list(self.refuted_at) if self.refuted_at else None,
            "horizon": self.horizon,
            "survived": self.survived,
            "reason": self.reason,
        }


def _disjoint(A: list, B: list) -> bool:
    return all(_cmp(a, b) != 0 for a in A for b in B)


def wandering_candidate(T, horizon: int, translate_window: int) -> RefutationReport:
    """Search for a pair of shifted translates of ``T`` that intersect or link.

    Pairs are scanned by increasing ``n2``; the witness is ``(n1, m1, n2, m2)``.
    A set whose image has fewer than three points is refuted with
    ``n1 = n2`` equal to that iterate.
    """
    members = list(T)
    if len(members) != 3:
        raise ValueError("a triangle has three members")
    W = translate_window
    images = []
    for n2 in range(horizon + 1):
        img = _distinct(m.shift(n2) for m in members)
        if len(img) < 3:
            return RefutationReport((n2, 0, n2, 0), horizon, "collapse")
        images.append(img)
        for n1 in range(n2 + 1):
            for d in range(-2 * W, 2 * W + 1):
                if n1 == n2 and d <= 0:
                    continue
                m2 = max(-W, min(W, d))
                m1 = m2 - d
                A = [a.translate(m1) for a in images[n1]]
                B = [b.translate(m2) for b in img]
                if not _disjoint(A, B):
                    return RefutationReport((n1, m1, n2, m2), horizon, "intersect")
                if not unlinked(A, B):
                    return RefutationReport((n1, m1, n2, m2), horizon, "linked")
    return RefutationReport(None, horizon)


# ---------------------------------------------------------------------------
# exhaustive search


def enumerate_addresses(entry_bound: int, period_bound: int, preperiod_bound: int) -> list:
    """All distinct eventually periodic addresses with entries in ``[-M, M]``."""
    rng = range(-entry_bound, entry_bound + 1)
    seen = set()
    for L in range(preperiod_bound + 1):
        for P in range(1, period_bound + 1):
            for pre in itertools.product(rng, repeat=L):
                for per in itertools.product(rng, repeat=P):
                    seen.add(EventuallyPeriodic(pre, per))
    return sort_addresses(seen)


def _normalize(tri) -> tuple:
    ordered = sort_addresses(tri)
    m = -ordered[0].entry(0)
    return tuple(a.translate(m) for a in ordered)


def enumerate_triangles(entry_bound: int, period_bound: int, preperiod_bound: int) -> list:
    addrs = enumerate_addresses(entry_bound, period_bound, preperiod_bound)
    tris = {_normalize(t) for t in itertools.combinations(addrs, 3)}
    return sorted(tris, key=lambda t: tuple(str(a) for a in t))


def _run_chunk(args) -> dict:
    chunk, horizon, window = args
    depths: Counter = Counter()
    reasons: Counter = Counter()
    survivors = []
    witnesses = []
    for tri in chunk:
        rep = wandering_candidate(tri, horizon, window)
        if rep.survived:
            survivors.append([str(a) for a in tri])
            continue
        depths[rep.depth] += 1
        reasons[rep.reason] += 1
        if len(witnesses) < 3:
            witnesses.append({"triangle": [str(a) for a in tri], **rep.to_dict()})
    return {"depths": depths, "reasons": reasons, "survivors": survivors, "witnesses": witnesses, "tested": len(chunk)}


@dataclass
class SearchSummary:
    tested: int = 0
    refuted: int = 0
    max_refutation_depth: int = 0
    survivors: list = field(default_factory=list)
    witnesses_sample: list = field(default_factory=list)
    depth_histogram: dict = field(default_factory=dict)
    reasons: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def merge(self, part: dict) -> None:
        self.tested += part["tested"]
        self.refuted += sum(part["depths"].values())
        for d, c in part["depths"].items():
            self.depth_histogram[d] = self.depth_histogram.get(d, 0) + c
            self.max_refutation_depth = max(self.max_refutation_depth, d)
        for r, c in part["reasons"].items():
            self.reasons[r] = self.reasons.get(r, 0) + c
        self.survivors.extend(part["survivors"])
        room = 5 - len(self.witnesses_sample)
        self.witnesses_sample.extend(part["witnesses"][: max(room, 0)])

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "tested": self.tested,
            "refuted": self.refuted,
            "survivors": self.survivors,
            "max_refutation_depth": self.max_refutation_depth,
            "depth_histogram": {str(k): v for k, v in sorted(self.depth_histogram.items())},
            "reasons": self.reasons,
            "witnesses_sample": self.witnesses_sample,
        }


def nwt_search(
    entry_bound: int,
    period_bound: int,
    preperiod_bound: int,
    horizon: int,
    translate_window: int,
    jobs: int = 1,
    budget: Optional[int] = None,
    chunk_size: int = 2000,
) -> SearchSummary:
    """Test every normalized triangle within the bounds; see :func:`wandering_candidate`."""
    if min(period_bound, horizon) < 1 or min(entry_bound, preperiod_bound, translate_window) < 0:
        raise ValueError("bounds must be nonnegative and period/horizon positive")
    summary = SearchSummary(params={
        "entries": entry_bound,
        "period": period_bound,
        "preperiod": preperiod_bound,
        "horizon": horizon,
        "window": translate_window,
    })
    tris = enumerate_triangles(entry_bound, period_bound, preperiod_bound)
    over = budget is not None and len(tris) > budget
    if over:
        tris = tris[:budget]
    chunks = [(tris[i : i + chunk_size], horizon, translate_window) for i in range(0, len(tris), chunk_size)]
    if jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for part in ex.map(_run_chunk, chunks):
                summary.merge(part)
    else:
        for c in chunks:
            summary.merge(_run_chunk(c))
    if over:
        raise SearchBudgetExceeded(summary)
    return summary
