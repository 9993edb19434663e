"""Shared fixtures and the acceptance-criteria report.

Tests marked ``criterion(num, title)`` are collected into a summary section
printed after the run, one PASS/FAIL line per criterion.
"""

import random

import pytest

from mosaic_select.instance import DiscreteInstance

_criteria: dict[str, tuple[int, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    mark = item.get_closest_marker("criterion")
    if mark:
        verdict = "PASS" if report.passed else "FAIL"
        _criteria[item.nodeid] = (mark.args[0], mark.args[1], verdict)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, verdict in sorted(_criteria.values()):
        terminalreporter.write_line(f"[{verdict}] criterion {num}: {title}")


def make_random_discrete(seed: int, m: int, n: int) -> DiscreteInstance:
    """Seeded random combinatorial instance; every part guaranteed coverable."""
    rng = random.Random(seed)
    parts_of = []
    for _ in range(m):
        size = rng.randint(1, max(1, n // 2))
        parts_of.append(set(rng.sample(range(n), size)))
    pooled = set().union(*parts_of)
    for k in range(n):
        if k not in pooled:
            parts_of[rng.randrange(m)].add(k)
    cloudy = [frozenset(k for k in parts_of[i] if rng.random() < 0.35) for i in range(m)]
    return DiscreteInstance(
        part_area=tuple(rng.randint(1, 50) for _ in range(n)),
        parts_of=tuple(frozenset(p) for p in parts_of),
        cloudy_of=tuple(cloudy),
        cost=tuple(rng.randint(1, 100) for _ in range(m)),
        resolution=tuple(rng.randint(1, 60) for _ in range(m)),
        angle=tuple(rng.randint(0, 900) for _ in range(m)),
    )


@pytest.fixture
def two_image_overlap() -> DiscreteInstance:
    """Hand-built fixture: two images, seven parts, clouds on both sides.

    Image 0 covers parts {0,2,3,4,5,6} seeing {3,4,6} through clouds;
    image 1 covers parts {1,2,4,5,6} seeing {5,6} through clouds.  Part k
    has area k+1.  Neither image alone covers the universe, so {0,1} is the
    only cover: parts 4 and 5 keep a cloud-free view from one side each,
    parts 3 and 6 stay cloudy, giving cloud area 4 + 7 = 11.
    """
    return DiscreteInstance(
        part_area=(1, 2, 3, 4, 5, 6, 7),
        parts_of=(frozenset({0, 2, 3, 4, 5, 6}), frozenset({1, 2, 4, 5, 6})),
        cloudy_of=(frozenset({3, 4, 6}), frozenset({5, 6})),
        cost=(10, 20),
        resolution=(4, 9),
        angle=(100, 200),
    )
