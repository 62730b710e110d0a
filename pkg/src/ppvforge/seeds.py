"""Per-point local data: the log-type series, fundamental matrices, actions.

Each marked point q carries the series

    f = sum_{n>=1} (-1)^(n+1) t^n / (n (x-q)^n),

the t-adic logarithm of 1 + t/(x-q).  Its two derivatives have rational
closed forms, which is what every downstream identity check leans on:

    d/dx f = 1/(x-q+t) - 1/(x-q),      d/dt f = 1/(x-q+t).

A seed picks one of four families of arguments fed into a root subgroup,
chosen so that the realized local groups exhaust the generation hypotheses:

    plus_const   u_root(f)              descriptor (root, one)
    minus_const  u_{-root}(f)           descriptor (-root, one)
    plus_t       u_root(t*f)            descriptor (root, t)
    minus_tinv   u_{-root}(t^-1*f - 1/(x-q))   descriptor (-root, t_inverse)

The minus_tinv argument is shifted by the constant-in-t term of t^-1*f.  The
shift changes neither the generated ring nor the realized descriptor (the
substitution f -> f + a acts identically on the shifted and unshifted
arguments), but it makes the fundamental matrix congruent to the identity
mod t, which is the normalization the patching step requires.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FormatError
from .rational import RAT_ONE, RatFunc, rat
from .series import INF, TMatrix, TSeries, shifted_pole_series
from .rootdata import (
    MULT_ONE,
    MULT_T,
    MULT_T_INV,
    GroupDescriptor,
    RootDatum,
    _neg,
)

FAMILY_PLUS_CONST = "plus_const"
FAMILY_MINUS_CONST = "minus_const"
FAMILY_PLUS_T = "plus_t"
FAMILY_MINUS_TINV = "minus_tinv"
FAMILIES = (FAMILY_PLUS_CONST, FAMILY_MINUS_CONST, FAMILY_PLUS_T, FAMILY_MINUS_TINV)

_FAMILY_MULT = {
    FAMILY_PLUS_CONST: MULT_ONE,
    FAMILY_MINUS_CONST: MULT_ONE,
    FAMILY_PLUS_T: MULT_T,
    FAMILY_MINUS_TINV: MULT_T_INV,
}


def family_descriptor(family: str, root: tuple) -> GroupDescriptor:
    """The (effective root, multiplier) condition a seed of this family realizes."""
    root = tuple(root)
    eff = _neg(root) if family in (FAMILY_MINUS_CONST, FAMILY_MINUS_TINV) else root
    return GroupDescriptor(eff, _FAMILY_MULT[family])


def log_series(q, prec) -> TSeries:
    """The series f at q: log(1 + t/(x-q)) expanded in t, modulo t^prec."""
    q = rat(q)
    terms = {}
    sign = RAT_ONE
    for n in range(1, int(prec)):
        terms[n] = RatFunc.linear_pole(q, n, sign / n)
        sign = -sign
    return TSeries.from_terms(terms, prec)


def dx_oracle(q, prec) -> TSeries:
    """Closed-form expansion of 1/(x-q+t) - 1/(x-q)."""
    pole = TSeries.constant(RatFunc.linear_pole(rat(q), 1, RAT_ONE), INF)
    return (shifted_pole_series(q, 1, prec) - pole).truncate(prec)


def dt_oracle(q, prec) -> TSeries:
    """Closed-form expansion of 1/(x-q+t)."""
    return shifted_pole_series(q, 1, prec)


@dataclass
class LocalSeed:
    """One point's fundamental matrix and local equation."""

    rd: RootDatum
    root: tuple  # the positive root this seed is attached to
    family: str
    q: object
    prec: int
    f: TSeries
    c: TSeries
    Y_local: TMatrix
    A_local: TMatrix

    @property
    def effective_root(self) -> tuple:
        if self.family in (FAMILY_MINUS_CONST, FAMILY_MINUS_TINV):
            return _neg(self.root)
        return self.root

    @property
    def multiplier(self) -> str:
        return _FAMILY_MULT[self.family]

    @property
    def descriptor(self) -> GroupDescriptor:
        return family_descriptor(self.family, self.root)


def family_argument(family: str, q, prec) -> tuple:
    """(f, c): the log series and the argument fed to the root subgroup.

    f is built at whatever internal precision leaves c known modulo t^prec.
    """
    q = rat(q)
    if family == FAMILY_PLUS_CONST or family == FAMILY_MINUS_CONST:
        f = log_series(q, prec)
        return f, f
    if family == FAMILY_PLUS_T:
        f = log_series(q, prec - 1)
        return f, f.shift(1)
    if family == FAMILY_MINUS_TINV:
        f = log_series(q, prec + 1)
        pole = TSeries.constant(RatFunc.linear_pole(q, 1, RAT_ONE), INF)
        return f, (f.shift(-1) - pole).truncate(prec)
    raise FormatError(f"unknown family {family!r}")


def make_seed(rd: RootDatum, root: tuple, family: str, q, prec: int) -> LocalSeed:
    """Build one seed; the caller picks a positive root and a family."""
    root = tuple(root)
    if not rd.is_positive(root):
        raise FormatError(f"seed root must be positive in {rd.label}: {root}")
    q = rat(q)
    f, c = family_argument(family, q, prec)
    eff = root if family in (FAMILY_PLUS_CONST, FAMILY_PLUS_T) else _neg(root)
    Y = rd.u(eff, c)
    X = rd.nilpotent(eff)
    dc = c.dx()
    A = TMatrix([[dc * X[i][j] if X[i][j] else TSeries.zero(dc.prec) for j in range(rd.dim)]
                 for i in range(rd.dim)])
    return LocalSeed(rd, root, family, q, int(prec), f, c, Y, A)


def seed_solution_residual(seed: LocalSeed) -> TMatrix:
    """d/dx Y - A*Y; identically zero modulo precision for a valid seed."""
    return seed.Y_local.dx() - seed.A_local * seed.Y_local


# -- lifting to the ground field extended by one formal constant -------------


def lift_ground(value):
    """Embed a rational into Q(a), the ground field with one formal constant."""
    return RatFunc.from_ground(value)


def formal_constant():
    """The adjoined constant a itself, as a ground-field element of Q(a)."""
    return RatFunc.x()


def lift_ratfunc(c: RatFunc) -> RatFunc:
    return c.map_ground(lift_ground)


def lift_series(s: TSeries) -> TSeries:
    return s.map_coeffs(lift_ratfunc)


def lift_matrix(m: TMatrix) -> TMatrix:
    return m.map_entries(lift_series)


def check_galois_action(seed: LocalSeed) -> bool:
    """The substitution f -> f + a moves Y_local by exactly u(w*a).

    Everything is lifted to the ground field Q(a) with a a formal constant
    killed by both derivations.  The check recomputes Y from the shifted
    argument and compares mat_inv(Y)*Y_shifted against the one-parameter
    matrix at argument a times the family multiplier w in {1, t, 1/t},
    coefficient-exactly modulo the seed precision.
    """
    a_const = formal_constant()
    w = seed.multiplier
    if w == MULT_ONE:
        wa = TSeries.constant(RatFunc.from_ground(a_const), INF)
    elif w == MULT_T:
        wa = TSeries.t_power(1, RatFunc.from_ground(a_const), INF)
    else:
        wa = TSeries.t_power(-1, RatFunc.from_ground(a_const), INF)

    c_lift = lift_series(seed.c)
    c_shift = c_lift + wa
    eff = seed.effective_root
    y_base = seed.rd.u(eff, c_lift)
    y_shift = seed.rd.u(eff, c_shift)
    expected = seed.rd.u(eff, wa.truncate(seed.prec))
    return y_base.inv() * y_shift == expected


def check_local_model(q, prec: int) -> dict:
    """The 2x2 upper-triangular model at q, checked from scratch.

    Returns named booleans: the solution identity d/dx Y = A Y, det Y = 1,
    the two derivative closed forms of f, and commutation of the substitution
    f -> f + a with both derivations.
    """
    q = rat(q)
    f = log_series(q, prec)
    a_x = dx_oracle(q, prec)
    a_t = dt_oracle(q, prec)
    one = TSeries.constant(RAT_ONE, INF)
    zero = TSeries.zero(INF)
    Y = TMatrix([[one, f], [zero, one]])
    A = TMatrix([[zero, a_x], [zero, zero]])
    out = {
        "solution_identity": Y.dx() == A * Y,
        "det_one": Y.det() == TSeries.constant(RAT_ONE, f.prec),
        "dx_closed_form": f.dx() == a_x,
        "dt_closed_form": f.dt() == a_t.truncate(prec - 1),
    }
    # commutation of sigma_a with both derivations, over Q(a)
    a_const = RatFunc.from_ground(formal_constant())
    f_lift = lift_series(f)
    f_sigma = f_lift + TSeries.constant(a_const, INF)
    out["sigma_commutes_dx"] = f_sigma.dx() == lift_series(f.dx())
    out["sigma_commutes_dt"] = f_sigma.dt() == lift_series(f.dt())
    out["ok"] = all(out.values())
    return out


def certify_no_rational_antiderivative(q) -> bool:
    """Certify that f is not a rational function of x over the constants.

    d/dx f has the closed form 1/(x-q+t) - 1/(x-q).  Treating t as a formal
    constant tau, this rational function of x has simple poles at q and
    q - tau with residues -1 and +1.  A derivative of a rational function has
    zero residue at every pole, so f has no rational antiderivative
    representative; the check computes both residues exactly over Q(tau)(x).
    """
    q = rat(q)
    tau = formal_constant()
    q_lift = lift_ground(q)
    # 1/(x - q + tau) - 1/(x - q) over the ground field Q(tau)
    g = RatFunc.linear_pole(q_lift - tau, 1, lift_ground(1)) - RatFunc.linear_pole(
        q_lift, 1, lift_ground(1)
    )
    res_at_q = g.residue(q_lift)
    res_at_shift = g.residue(q_lift - tau)
    return res_at_q == -lift_ground(1) and res_at_shift == lift_ground(1)
