"""Random eventually periodic addresses for experiments and tests."""

from __future__ import annotations

import random
from typing import Optional

from .addresses import INFINITY, EventuallyPeriodic, _TOP, _key


def random_ep(rng: random.Random, max_entry: int = 10, max_pre: int = 3, max_per: int = 6, min_abs: int = 0) -> EventuallyPeriodic:
    """Uniform-ish eventually periodic address with bounded entries."""

    def draw():
        while True:
            v = rng.randint(-max_entry, max_entry)
            if abs(v) >= min_abs:
                return v

    pre = tuple(draw() for _ in range(rng.randint(0, max_pre)))
    per = tuple(draw() for _ in range(rng.randint(1, max_per)))
    return EventuallyPeriodic(pre, per)


def _tail(rng: random.Random, spread: int = 3) -> tuple[tuple, tuple]:
    pre = tuple(rng.randint(-spread, spread) for _ in range(rng.randint(0, 2)))
    per = tuple(rng.randint(-spread, spread) for _ in range(rng.randint(1, 3)))
    return pre, per


def _build(prefix: list, rest) -> EventuallyPeriodic:
    if isinstance(rest, EventuallyPeriodic):
        return EventuallyPeriodic(tuple(prefix) + rest.pre, rest.per)
    pre, per = rest
    return EventuallyPeriodic(tuple(prefix) + pre, per)


def sample_between(lower: Optional[object], upper: object, rng: random.Random, spread: int = 3) -> EventuallyPeriodic:
    """Eventually periodic address strictly between ``lower`` and ``upper``.

    ``lower=None`` and ``upper=INFINITY`` stand for the two ends of the line.
    Bounds may be eventually periodic or intermediate.
    """
    prefix: list = []
    i = 0
    while True:
        ka = None if lower is None else _key(lower, i)
        kb = _TOP if upper is INFINITY else _key(upper, i)
        if ka is not None and ka is not _TOP and kb is not _TOP and ka == kb:
            prefix.append(ka // 2)
            i += 1
            if i > 10_000:
                raise ValueError("bounds do not separate")
            continue
        break
    if ka is _TOP:
        raise ValueError("empty interval")
    if ka is None and kb is _TOP:
        k = rng.randint(-spread, spread)
        return _build(prefix + [k], _tail(rng, spread))
    if ka is None:
        k = (kb - 1) // 2 - rng.randint(0, spread)
        return _build(prefix + [k], _tail(rng, spread))
    if kb is _TOP:
        k = ka // 2 + 1 + rng.randint(0, spread)
        return _build(prefix + [k], _tail(rng, spread))
    if ka > kb:
        raise ValueError("lower bound exceeds upper bound")
    inner = [k for k in range(ka // 2 + 1, (kb + 1) // 2) if ka < 2 * k < kb]
    options = []
    if inner:
        options.append("inner")
    if ka % 2 == 0:
        options.append("above_lower")
    if kb % 2 == 0:
        options.append("below_upper")
    choice = rng.choice(options)
    if choice == "inner":
        return _build(prefix + [rng.choice(inner)], _tail(rng, spread))
    if choice == "above_lower":
        rest = sample_between(lower.shift(i + 1), INFINITY, rng, spread)
        return _build(prefix + [ka // 2], rest)
    rest = sample_between(None, upper.shift(i + 1), rng, spread)
    return _build(prefix + [kb // 2], rest)
