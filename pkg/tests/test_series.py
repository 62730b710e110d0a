"""Truncated Laurent series and matrix series: precision ledger and algebra."""

import pytest

from ppvforge.errors import (
    PrecisionExhaustedError,
    SingularLeadingMatrixError,
    ZeroLeadingTermError,
)
from ppvforge.rational import Poly, RatFunc, rat
from ppvforge.series import (
    INF,
    TMatrix,
    TSeries,
    _series_dot,
    shifted_pole_series,
)


def test_precision_ledger_rules():
    a = TSeries(0, [1], 5)
    b = TSeries(2, [1], 9)
    assert (a + b).prec == 5  # add: min
    assert (a * b).prec == 7  # mul: min(prec_a + ord_b, prec_b + ord_a)
    assert (TSeries.zero(4) * b).prec == 6  # zero operand contributes its prec as order
    assert a.dx().prec == 5
    assert a.dt().prec == 4  # t-derivative costs one order
    assert a.truncate(3).prec == 3
    assert a.truncate(9).prec == 5  # truncation never invents precision
    assert a.shift(2).prec == 7
    assert b.inv().prec == 9 - 2 * 2  # inv: prec - 2*order


def test_equality_modulo_shared_precision():
    assert TSeries(0, [1, 0, 0, 5], 6) == TSeries(0, [1], 3)
    assert TSeries(0, [1], 3) != TSeries(0, [2], 3)
    assert TSeries.zero(4) == TSeries(7, [1], 4)  # first term beyond shared precision


def test_from_terms_and_accessors():
    s = TSeries.from_terms({-1: rat(2), 3: rat(5)}, 6)
    assert s.t_min == -1
    assert s.order == -1
    assert s.coeff(-1) == RatFunc.from_ground(2)
    assert s.coeff(0).is_zero
    assert s.coeff(3) == RatFunc.from_ground(5)
    assert dict(s.terms()) == {-1: RatFunc.from_ground(2), 3: RatFunc.from_ground(5)}
    assert TSeries.t_power(4).order == 4


def test_leibniz_rules(gen):
    g = gen("series-leibniz")
    for _ in range(60):
        a, b = g.series(), g.series()
        assert (a * b).dx() == a.dx() * b + a * b.dx()
        assert (a * b).dt() == a.dt() * b + a * b.dt()
        assert (a + b).dx() == a.dx() + b.dx()


def test_mixed_partials_commute(gen):
    g = gen("series-commute")
    for _ in range(50):
        s = g.series()
        assert s.dx().dt() == s.dt().dx()


def test_inversion_residuals(gen):
    g = gen("series-inv")
    for _ in range(60):
        u = g.unit_series(prec=6)
        assert (u * u.inv() - 1).truncate(6).is_zero
    # negative valuation: the inverse starts at the mirrored order
    u = TSeries(-2, [rat(1), rat(3)], 4)
    v = u.inv()
    assert v.order == 2
    assert (u * v - 1).truncate(v.prec - 2).is_zero


def test_inversion_errors():
    with pytest.raises(ZeroLeadingTermError):
        TSeries.zero(5).inv()
    # an exact series with more than one term has no exact finite inverse
    with pytest.raises(PrecisionExhaustedError):
        TSeries(0, [rat(1), rat(1)], INF).inv()
    # an exact single term is fine
    assert (TSeries.t_power(2, 3).inv() * TSeries.t_power(2, 3)) == TSeries.constant(1, INF)


def test_series_dot_matches_operator_chain(gen):
    g = gen("series-dot")
    for _ in range(100):
        pairs = [(g.series(), g.series()) for _ in range(g.rng.randint(1, 4))]
        want = pairs[0][0] * pairs[0][1]
        for a, b in pairs[1:]:
            want = want + a * b
        got = _series_dot(pairs)
        assert got == want
        assert got.prec == want.prec


def test_shifted_pole_series():
    q = rat(3)
    s = shifted_pole_series(q, 1, 6)  # 1/(x - 3 + t)
    for n in range(6):
        sign = 1 if n % 2 == 0 else -1
        assert s.coeff(n) == RatFunc.linear_pole(q, n + 1, sign)
    # c * d/dx = d/dt for 1/(x - q + c t)
    for c in (1, -2):
        s = shifted_pole_series(q, c, 6)
        assert s.dx().truncate(5).map_coeffs(lambda v: v * rat(c)) == s.dt()


def test_matrix_algebra_and_inverse(gen):
    g = gen("matrix-inv")
    ident = TMatrix.identity(2)
    for _ in range(25):
        m = TMatrix(
            [
                [
                    (1 if i == j else 0) + TSeries(1, [g.ratfunc() for _ in range(3)], 5)
                    for j in range(2)
                ]
                for i in range(2)
            ]
        )
        inv = m.inv()
        assert (m * inv - ident).truncate(5).is_zero
        assert (inv * m - ident).truncate(5).is_zero
        assert (m.det() * inv.det() - 1).truncate(5).is_zero


def test_matrix_singular_leading():
    ones = TSeries.constant(1, 5)
    m = TMatrix([[ones, ones], [ones, ones]])
    with pytest.raises(SingularLeadingMatrixError):
        m.inv()


def test_matrix_det_trace_frozen():
    t = TSeries.t_power(1, 1, 8)
    one = TSeries.constant(1, 8)
    m = TMatrix([[one, t], [t, one]])
    assert m.det() == one - t * t
    assert m.trace() == one + one
    assert m.dx().is_zero
    assert not m.is_zero
    assert TMatrix.zeros(2, 2, 5).is_zero


def test_matrix_precision_unifies():
    m = TMatrix([[TSeries(0, [1], 9), TSeries(0, [1], 4)], [TSeries(0, [1], 7), TSeries(0, [1], 6)]])
    assert m.prec == 4
    assert all(e.prec == 4 for row in m.entries for e in row)


def test_matrix_coeff_round_trip():
    grids = {0: [[rat(1), rat(0)], [rat(0), rat(1)]], 2: [[rat(0), rat(3)], [rat(5), rat(0)]]}
    m = TMatrix.from_coeff_matrices(
        {k: [[RatFunc.from_ground(c) for c in row] for row in g] for k, g in grids.items()},
        prec=5,
    )
    assert m.coeff_matrix(2)[0][1] == RatFunc.from_ground(3)
    assert m.coeff_matrix(1)[0][0].is_zero
    assert m.min_order() == 0
