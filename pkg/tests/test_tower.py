"""Ring membership predicates and rational reconstruction."""

import pytest

from ppvforge.errors import InsufficientPrecisionError, InvalidPointsError
from ppvforge.rational import Poly, Rat, RatFunc, rat
from ppvforge.seeds import log_series
from ppvforge.series import TMatrix, TSeries, shifted_pole_series
from ppvforge.tower import (
    coeff_in_global_ring,
    intersection_certificate,
    matrix_in_global_ring,
    reconstruct,
    required_precision,
    rest_off_points,
    series_in_global_ring,
    series_in_local_ring,
    validate_points,
)

PS = [rat(0), rat(1), rat(-2), Rat(7, 3)]


def test_validate_points():
    out = validate_points(["0", "1", "-2", "7/3"])
    assert out == PS  # coerced, order preserved
    with pytest.raises(InvalidPointsError):
        validate_points([rat(1), rat(1)])
    with pytest.raises(InvalidPointsError):
        validate_points([])


def test_rest_off_points_handles_unfactored_denominators():
    # built without pole hints, the marked factor lands in `rest`
    c = RatFunc(Poly.one(), Poly.linear(rat(1)))
    assert not c.fac
    assert rest_off_points(c, [rat(1)]).degree == 0
    assert rest_off_points(c, [rat(0)]).degree == 1


def test_coeff_membership():
    assert coeff_in_global_ring(RatFunc.linear_pole(0, 1), PS)
    assert coeff_in_global_ring(RatFunc.from_ground(Rat(3, 7)), PS)
    # bounded at infinity: numerator degree up to the denominator degree
    num = Poly([1, 0, 1])
    den = Poly.linear(rat(0)) * Poly.linear(rat(1))
    assert coeff_in_global_ring(RatFunc(num, den), PS)
    assert not coeff_in_global_ring(RatFunc(Poly([0, 0, 0, 1]), den), PS)
    # poles must sit on marked points
    assert not coeff_in_global_ring(RatFunc.linear_pole(9, 1), PS)
    # a plain polynomial of positive degree grows at infinity
    assert not coeff_in_global_ring(RatFunc.x(), PS)
    # membership ignores how the denominator was split
    unhinted = RatFunc(Poly.one(), Poly.linear(rat(1)))
    assert coeff_in_global_ring(unhinted, PS)


def test_series_membership():
    good = TSeries.from_terms({0: RatFunc.linear_pole(0, 1), 3: RatFunc.linear_pole(1, 2)}, 6)
    assert series_in_global_ring(good, PS)
    assert not series_in_global_ring(good.shift(-1), PS)  # negative t-order
    bad = TSeries.from_terms({2: RatFunc.linear_pole(5, 1)}, 6)
    assert not series_in_global_ring(bad, PS)
    assert matrix_in_global_ring(TMatrix([[good, good], [good, good]]), PS)


def test_local_membership_and_intersection():
    pole_at_0 = TSeries.from_terms({1: RatFunc.linear_pole(0, 1)}, 6)
    assert not series_in_local_ring(pole_at_0, rat(0))
    assert series_in_local_ring(pole_at_0, rat(1))
    assert not series_in_local_ring(pole_at_0.shift(-2), rat(1))
    # global + regular at the chosen point = certified intersection
    assert intersection_certificate(pole_at_0, PS, 1)
    assert not intersection_certificate(pole_at_0, PS, 0)


def test_required_precision_table():
    assert [required_precision(d) for d in (1, 2, 4, 8)] == [8, 10, 14, 22]


def test_reconstruct_planted_rationals():
    for q in (rat(0), rat(2), Rat(7, 3)):
        a = shifted_pole_series(q, 1, 12)  # 1/(x - q + t)
        res = reconstruct(a, 1, 12)
        assert res.success
        p, qq = res.as_series_pair(12)
        assert (qq * a - p).truncate(12).is_zero
        # minimal t-degree certificate: Q = x - q + t needs t-degree 1
        assert max(s.end for s in res.denominator if not s.is_zero) <= 2


def test_reconstruct_zero_and_polynomial():
    res = reconstruct(TSeries.zero(8), 1, 8)
    assert res.success
    p, q = res.as_series_pair(8)
    assert p.is_zero and q == TSeries.constant(1, 8)
    # pure polynomial data: Q = 1 certificate
    a = TSeries.from_terms({0: RatFunc.from_poly(Poly([2, 1])), 1: RatFunc.from_ground(3)}, 8)
    res = reconstruct(a, 1, 8)
    assert res.success


def test_reconstruct_flags_the_log_series():
    f = log_series(rat(0), 32)
    for d in (1, 2, 3, 4):
        res = reconstruct(f, d, 32)
        assert not res.success
        assert res.degree_bounds == (d, d)


def test_reconstruct_precision_guards():
    a = shifted_pole_series(0, 1, 6)
    with pytest.raises(InsufficientPrecisionError):
        reconstruct(a, 1, 8)  # series carries less than requested
    with pytest.raises(InsufficientPrecisionError):
        reconstruct(a, 1, 1)
    with pytest.raises(ValueError):
        reconstruct(a, -1, 6)


def test_reconstruct_handles_negative_valuation():
    # t^-1/(x - q + t) still reconstructs; P absorbs the shift
    a = shifted_pole_series(1, 1, 13).shift(-1)
    res = reconstruct(a, 1, 12)
    assert res.success
    p, q = res.as_series_pair(12)
    assert (q * a - p).truncate(res.verified_order).is_zero
