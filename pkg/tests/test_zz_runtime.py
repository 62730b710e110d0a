"""Whole-suite wall time, measured by the alphabetically last test module."""

import time


def test_suite_wall_time_under_budget(session_t0):
    elapsed = time.perf_counter() - session_t0
    print(f"suite wall time at final test: {elapsed:.1f}s (budget 300s)")
    assert elapsed < 300.0
