import math

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from bouquet.addresses import EventuallyPeriodic, Intermediate

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TWO_PI = 2 * math.pi


def ep_strategy(max_entry=10, max_pre=3, max_per=6):
    ints = st.integers(-max_entry, max_entry)
    return st.builds(
        lambda pre, per: EventuallyPeriodic(tuple(pre), tuple(per)),
        st.lists(ints, max_size=max_pre),
        st.lists(ints, min_size=1, max_size=max_per),
    )


def intermediate_strategy(max_entry=5, max_len=4):
    return st.builds(
        lambda fin, h: Intermediate(tuple(fin), 2 * h + 1),
        st.lists(st.integers(-max_entry, max_entry), max_size=max_len),
        st.integers(-max_entry, max_entry),
    )


def oracle_ts(s: EventuallyPeriodic, sweeps: int = 4000) -> float:
    """Minimal potential from the recursion ``t_s = log1p(2 pi |s_1| + t_{sigma s})``.

    On the period the composed map is increasing with slope < 1 unless the
    period is all zeros, so fixed-point iteration from 0 converges upward.
    """
    per = s.per
    p = len(per)
    # potential of the periodic tail starting at phase k needs entries k+1, k+2, ...
    t = 0.0
    for _ in range(sweeps):
        prev = t
        for k in reversed(range(p)):
            t = math.log1p(TWO_PI * abs(per[(k + 1) % p]) + t)
        if abs(t - prev) <= 1e-16 * max(1.0, t):
            break
    # t is the potential of the purely periodic address per[0] per[1] ...
    tail = t
    entries = list(s.pre) + [per[0]]
    for k in reversed(range(len(s.pre))):
        tail = math.log1p(TWO_PI * abs(entries[k + 1]) + tail)
    return tail


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
