"""Shared fixtures: seeded random object factories and session-scoped bundles.

Every randomized test draws from random.Random seeded off --rng-seed plus a
per-test tag, so runs are reproducible and independent tests stay decoupled.
The expensive bundles are built once per session; the acceptance tests also
report their criterion outcomes through a terminal-summary hook so a verbose
run ends with one PASS/FAIL line per criterion.
"""

import random
import time

import pytest

from ppvforge.pipeline import build_bundle
from ppvforge.rational import Poly, Rat, RatFunc
from ppvforge.series import TSeries

SESSION_T0 = time.perf_counter()


def pytest_addoption(parser):
    parser.addoption(
        "--rng-seed",
        action="store",
        type=int,
        default=20260815,
        help="master seed for the randomized property tests",
    )


@pytest.fixture(scope="session")
def rng_seed(request) -> int:
    return int(request.config.getoption("--rng-seed"))


class Gen:
    """Deterministic factories for random exact-arithmetic objects."""

    def __init__(self, rng: random.Random):
        self.rng = rng

    def rat(self, zero_ok: bool = True) -> Rat:
        n = self.rng.randint(-9, 9)
        if not zero_ok and n == 0:
            n = 1
        return Rat(n, self.rng.randint(1, 6))

    def poly(self, max_deg: int = 3) -> Poly:
        return Poly([self.rat() for _ in range(self.rng.randint(0, max_deg) + 1)])

    def ratfunc(self, points=(0, 1, -2), max_mult: int = 2) -> RatFunc:
        acc = RatFunc.from_poly(self.poly(2))
        for q in points:
            if self.rng.random() < 0.5:
                acc = acc + RatFunc.linear_pole(
                    q, self.rng.randint(1, max_mult), self.rat(zero_ok=False)
                )
        return acc

    def series(self, prec=None, t_min_lo: int = -2) -> TSeries:
        if prec is None:
            prec = self.rng.randint(3, 7)
        lo = self.rng.randint(t_min_lo, 1)
        terms = {}
        for n in range(lo, prec):
            if self.rng.random() < 0.6:
                terms[n] = self.ratfunc()
        return TSeries.from_terms(terms, prec)

    def unit_series(self, prec: int = 6) -> TSeries:
        """A series with a nonzero ground constant at t^0, so inv() exists."""
        terms = {0: RatFunc.from_ground(self.rat(zero_ok=False))}
        for n in range(1, prec):
            if self.rng.random() < 0.6:
                terms[n] = self.ratfunc()
        return TSeries.from_terms(terms, prec)


@pytest.fixture
def gen(rng_seed):
    def make(tag: str) -> Gen:
        return Gen(random.Random(f"{rng_seed}:{tag}"))

    return make


@pytest.fixture(scope="session")
def session_t0() -> float:
    return SESSION_T0


@pytest.fixture(scope="session")
def a1_bundle():
    return build_bundle("A1", prec=16)


@pytest.fixture(scope="session")
def small_a1_bundle():
    """A cheap bundle for serialization, CLI, and mutation tests."""
    return build_bundle("A1", prec=10)


@pytest.fixture(scope="session")
def a2_bundle():
    return build_bundle("A2", prec=12)


# ---------------------------------------------------------------------------
# acceptance criterion reporting

_CRITERIA = {}


@pytest.fixture(scope="session")
def record():
    def _record(num: int, title: str, ok: bool, detail: str = "") -> None:
        _CRITERIA[num] = (title, bool(ok), detail)

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for num in sorted(_CRITERIA):
            title, ok, detail = _CRITERIA[num]
            extra = f"  [{detail}]" if detail else ""
            terminalreporter.write_line(
                f"criterion {num} ({title}): {'PASS' if ok else 'FAIL'}{extra}"
            )
    elapsed = time.perf_counter() - SESSION_T0
    terminalreporter.write_line(f"suite wall time: {elapsed:.1f}s")
