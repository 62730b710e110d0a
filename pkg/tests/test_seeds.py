"""Local seed families: the log series, its derivatives, and the group action."""

import pytest

from ppvforge.errors import FormatError
from ppvforge.rational import Poly, Rat, RatFunc, rat
from ppvforge.rootdata import RootDatum
from ppvforge.seeds import (
    FAMILIES,
    FAMILY_MINUS_TINV,
    FAMILY_PLUS_T,
    certify_no_rational_antiderivative,
    check_galois_action,
    check_local_model,
    dt_oracle,
    dx_oracle,
    family_argument,
    log_series,
    make_seed,
)
from ppvforge.series import TMatrix, TSeries


def test_log_series_frozen_coefficients():
    f = log_series(rat(0), 5)
    # log(1 + t/x) = t/x - t^2/(2x^2) + t^3/(3x^3) - t^4/(4x^4) + ...
    assert f.coeff(1) == RatFunc.linear_pole(0, 1, 1)
    assert f.coeff(2) == RatFunc.linear_pole(0, 2, Rat(-1, 2))
    assert f.coeff(3) == RatFunc.linear_pole(0, 3, Rat(1, 3))
    assert f.coeff(4) == RatFunc.linear_pole(0, 4, Rat(-1, 4))
    assert f.prec == 5
    assert f.order == 1


def test_derivative_closed_forms():
    for q in (rat(0), rat(1), rat(-2), Rat(7, 3)):
        f = log_series(q, 16)
        assert f.dx() == dx_oracle(q, 16)
        assert f.dt() == dt_oracle(q, 15)


def test_family_arguments():
    q = rat(2)
    prec = 10
    f, c = family_argument("plus_const", q, prec)
    assert f == c
    f, c = family_argument("minus_const", q, prec)
    assert f == c
    f, c = family_argument(FAMILY_PLUS_T, q, prec)
    assert c == f.shift(1)  # argument t*f
    assert c.order == 2
    f, c = family_argument(FAMILY_MINUS_TINV, q, prec)
    # argument f/t - 1/(x-q): the simple-pole shift removes the t^0 term
    assert c.order >= 1
    pole = TSeries.constant(RatFunc.linear_pole(q, 1), prec)
    assert (f.shift(-1) - pole).truncate(c.prec) == c
    with pytest.raises(FormatError):
        family_argument("no_such_family", q, prec)


def test_make_seed_solves_its_equation():
    rd = RootDatum.from_label("A2")
    root = rd.positive_roots[0]
    for fam in FAMILIES:
        s = make_seed(rd, root, fam, rat(1), 10)
        assert (s.Y_local.dx() - s.A_local * s.Y_local).truncate(10).is_zero
        # unipotent: the constant term in t is the identity
        assert s.Y_local.coeff_matrix(0) == [
            [RatFunc.one() if i == j else RatFunc.zero() for j in range(rd.dim)]
            for i in range(rd.dim)
        ]
        assert s.Y_local.det() == TSeries.constant(1, s.Y_local.det().prec)


def test_make_seed_rejects_bad_input():
    rd = RootDatum.from_label("A1")
    with pytest.raises(FormatError):
        make_seed(rd, (-1, 1), "plus_const", rat(0), 8)  # not a positive root
    with pytest.raises(FormatError):
        make_seed(rd, (1, -1), "bogus", rat(0), 8)


def test_galois_action_every_family():
    rd = RootDatum.from_label("A1")
    for i, fam in enumerate(FAMILIES):
        s = make_seed(rd, (1, -1), fam, rat(i), 8)
        assert check_galois_action(s)


def test_local_model_report():
    rep = check_local_model(rat(3), 10)
    assert rep["ok"]
    assert all(rep.values())


def test_no_rational_antiderivative():
    for q in (rat(0), rat(1), rat(-2), Rat(7, 3), Rat(-5, 4)):
        assert certify_no_rational_antiderivative(q)


def test_minus_tinv_solution_is_identity_mod_t():
    # the unshifted argument f/t has a t^0 part; the family subtracts the
    # simple pole so the fundamental matrix starts at the identity
    rd = RootDatum.from_label("A1")
    s = make_seed(rd, (1, -1), FAMILY_MINUS_TINV, rat(0), 8)
    delta = s.Y_local - TMatrix.identity(2)
    assert delta.min_order() >= 1
