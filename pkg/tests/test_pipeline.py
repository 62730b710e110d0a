"""End-to-end bundle construction, verification, and tamper detection."""

import dataclasses

import pytest

from ppvforge.bundlejson import dumps_bundle
from ppvforge.errors import (
    FormatError,
    InvalidPointsError,
    PrecisionExhaustedError,
    WrongPointCountError,
)
from ppvforge.pipeline import (
    DEGREE_SCHEDULE,
    VerificationReport,
    build_bundle,
    default_points,
    gauge_check,
    max_certifiable_degree,
    membership_check,
    plan_seeds,
    reconstruct_entry,
    solution_check,
    verify_bundle,
)
from ppvforge.rational import Rat, rat
from ppvforge.rootdata import RootDatum
from ppvforge.seeds import FAMILIES, dt_oracle, log_series, make_seed
from ppvforge.series import TMatrix, TSeries
from ppvforge.tower import required_precision

EXPECTED_CHECKS = [
    "points-valid",
    "seed-solutions",
    "seed-construction",
    "seed-galois-action",
    "patch-residuals",
    "patch-y-global-ring",
    "patch-z-local-ring",
    "patch-unit-mod-t",
    "patch-det-relation",
    "det-y-one",
    "solution-identity",
    "gauge-identity",
    "trace-zero",
    "membership-global-ring",
    "membership-reconstruction",
    "descriptor-generation",
    "note-shifted-family",
    "note-reflection-sign",
]


def test_default_points_are_consecutive_integers():
    assert default_points(3) == [rat(i) for i in range(12)]


def test_plan_covers_every_root_in_every_family():
    rd = RootDatum.from_label("A2")
    points = default_points(rd.m)
    plans = plan_seeds(rd, points)
    assert len(plans) == 12
    for b, fam in enumerate(FAMILIES):
        block = plans[b * rd.m : (b + 1) * rd.m]
        assert [p.family for p in block] == [fam] * rd.m
        assert [p.root for p in block] == list(rd.positive_roots)
    assert [p.point for p in plans] == points
    assert [p.index for p in plans] == list(range(12))


def test_small_bundle_report_is_complete_and_green(small_a1_bundle):
    b = small_a1_bundle
    rep = b.report
    assert rep.ok
    assert [c.name for c in rep.checks] == EXPECTED_CHECKS
    for c in rep.checks:
        assert c.status in ("pass", "inconclusive", "info")
    # the A1 entries have no certificate at the degrees affordable here
    assert rep.find("membership-reconstruction").status == "inconclusive"
    assert b.achieved_order == b.prec == 10
    assert b.A.prec == 10
    assert "overall: PASS" in rep.summary_lines()[-1]
    assert set(rep.timings) == {"seeds", "factor", "assemble", "reconstruct", "verify"}


def test_direct_checks_on_small_bundle(small_a1_bundle):
    b = small_a1_bundle
    assert solution_check(b)
    assert all(gauge_check(b, i) for i in range(len(b.points)))
    in_ring, certified, inconclusive = membership_check(b)
    assert in_ring
    assert (certified, inconclusive) == (0, 4)


def test_custom_points_accept_rational_strings():
    b = build_bundle("A1", points=["0", "1", "-2", "7/3"], prec=8)
    assert b.report.ok
    assert b.points == [rat(0), rat(1), rat(-2), Rat(7, 3)]
    assert [s.q for s in b.seeds] == b.points


def test_build_rejects_bad_inputs():
    with pytest.raises(WrongPointCountError):
        build_bundle("A1", points=[0, 1, 2], prec=8)
    with pytest.raises(InvalidPointsError):
        build_bundle("A1", points=[0, 1, 1, 2], prec=8)
    with pytest.raises(PrecisionExhaustedError):
        build_bundle("A1", prec=7)
    with pytest.raises(FormatError):
        build_bundle("B2", prec=8)


def test_build_is_deterministic_and_thread_count_neutral():
    one = build_bundle("A1", prec=8)
    two = build_bundle("A1", prec=8)
    threaded = build_bundle("A1", prec=8, threads=2)
    assert dumps_bundle(one) == dumps_bundle(two) == dumps_bundle(threaded)


def test_verify_flags_tampered_equation(small_a1_bundle):
    b = small_a1_bundle
    entries = [list(row) for row in b.A.entries]
    entries[0][0] = entries[0][0] + TSeries(3, [rat(1)], b.prec)
    tampered = dataclasses.replace(b, A=TMatrix(entries), report=None)
    rep = verify_bundle(tampered)
    assert not rep.ok
    assert rep.find("solution-identity").failed
    assert rep.find("gauge-identity").failed


def test_verify_flags_seed_substitution(small_a1_bundle):
    b = small_a1_bundle
    seeds = list(b.seeds)
    wrong = make_seed(b.rd, seeds[0].root, "plus_t", seeds[0].q, seeds[0].prec)
    seeds[0] = wrong
    tampered = dataclasses.replace(b, seeds=seeds, report=None)
    rep = verify_bundle(tampered)
    assert not rep.ok
    assert rep.find("seed-construction").failed


def test_report_helpers():
    rep = VerificationReport()
    rep.add("alpha", "pass", verified_order=5)
    rep.add("beta", "fail", note="boom")
    assert rep.ok is False
    assert rep.find("beta").note == "boom"
    assert rep.find("missing") is None
    lines = rep.summary_lines()
    assert lines[-1] == "overall: FAIL"
    assert any("PASS" in ln and "(order 5)" in ln for ln in lines)
    assert any("FAIL" in ln and "boom" in ln for ln in lines)


def test_max_certifiable_degree_matches_precision_formula():
    assert [max_certifiable_degree(p) for p in (8, 10, 16, 24)] == [1, 2, 5, 9]
    for p in range(8, 41):
        d = max_certifiable_degree(p)
        assert required_precision(d) <= p < required_precision(d + 1)


def test_reconstruct_entry_certifies_planted_rational():
    a = dt_oracle(rat(2), 16)  # the series of 1/(x - 2 + t)
    res = reconstruct_entry(a, 16)
    assert res.success
    assert res.degree_bounds == (DEGREE_SCHEDULE[0], DEGREE_SCHEDULE[0])


def test_reconstruct_entry_inconclusive_and_unaffordable():
    res = reconstruct_entry(log_series(rat(0), 8), 8)
    assert not res.success
    assert res.degree_bounds == (1, 1)
    # below the cheapest rung nothing can even be posed
    res = reconstruct_entry(log_series(rat(0), 7), 7)
    assert not res.success
    assert res.verified_order == 0


def test_high_precision_refinement_certifies_a1_entries(a1_bundle):
    refined = build_bundle("A1", prec=24)
    rep = refined.report
    assert rep.ok
    assert rep.find("membership-reconstruction").status == "pass"
    for row in refined.reconstructions:
        for res in row:
            assert res.success
            assert res.degree_bounds == (9, 9)
            assert res.verified_order >= 24
    # refinement agrees with the lower-precision build on the overlap
    n = a1_bundle.prec
    assert refined.patch.Y.truncate(n) == a1_bundle.patch.Y
    assert refined.A.truncate(n) == a1_bundle.A
    for z_hi, z_lo in zip(refined.patch.Z, a1_bundle.patch.Z):
        assert z_hi.truncate(n) == z_lo
