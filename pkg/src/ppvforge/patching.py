"""Simultaneous factorization Y_i = Z_i^-1 * Y by order-by-order splitting.

Input: one matrix Y_i per marked point q_i, each congruent to the identity
mod t, with entries in the global ring (poles only at marked points, bounded
at infinity).  Output: a single global Y and per-point Z_i with

    Z_i^-1 * Y = Y_i   (mod t^N),
    Y in the global ring,  Z_i regular at q_i,  all factors = I mod t.

The algorithm tracks the residuals M_i = Z_i^-1 * Y * Y_i^-1, which start at
I + O(t).  At stage s the order-s error matrices E_i are split additively:
the principal parts at every point are collected into one global correction
C = -sum_j pp_{q_j}(E_j), absorbed by Y, while each remainder D_i = E_i + C,
regular at q_i, is absorbed by Z_i.  Because every factor is I + O(t),
conjugation is invisible at the leading error order and each stage pushes the
agreement one order higher.

All updates multiply by I + t^s * (single coefficient), so the state is kept
as raw coefficient grids and each update costs one shifted addition rather
than a full series product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PoleOutsidePointSetError, PPVError, PrecisionExhaustedError
from .rational import RatFunc, principal_part_ratfunc, rat
from .series import TMatrix, TSeries, _gmat_add, _gmat_dot, _gmat_mul
from .tower import (
    matrix_in_global_ring,
    matrix_in_local_ring,
    rest_off_points,
    series_in_global_ring,
    validate_points,
)

RF_ZERO = RatFunc.zero()


@dataclass
class PatchProblem:
    points: list
    inputs: list  # TMatrix, one per point, == I mod t, global-ring entries
    target_order: int

    def validate(self) -> None:
        self.points = validate_points(self.points)
        if len(self.inputs) != len(self.points):
            raise PoleOutsidePointSetError(
                f"{len(self.inputs)} matrices for {len(self.points)} points"
            )
        if self.target_order < 1:
            raise PrecisionExhaustedError("target order must be at least 1")
        n = self.inputs[0].rows
        for i, m in enumerate(self.inputs):
            if not (m.is_square and m.rows == n):
                raise PoleOutsidePointSetError("inputs must be square and same size")
            if m.prec < self.target_order:
                raise PrecisionExhaustedError(
                    f"input {i} known modulo t^{m.prec}, target t^{self.target_order}"
                )
            _require_global(m, self.points, f"input {i}")
            if not _is_identity_mod_t(m):
                raise PoleOutsidePointSetError(f"input {i} is not I mod t")

    @property
    def n(self) -> int:
        return self.inputs[0].rows


@dataclass
class PatchSolution:
    Y: TMatrix
    Z: list
    achieved_order: int


@dataclass
class PatchReport:
    ok: bool
    achieved_order: int
    residual_orders: list  # per point: order to which Z_i^-1 Y - Y_i vanishes
    y_in_global_ring: bool
    z_in_local_ring: list
    unit_mod_t: bool
    det_relation: list
    notes: list = field(default_factory=list)


def _require_global(m: TMatrix, points, what: str) -> None:
    for row in m.entries:
        for e in row:
            if not series_in_global_ring(e, points):
                bad = _first_bad_pole(e, points)
                raise PoleOutsidePointSetError(f"{what}: {bad}")


def _first_bad_pole(e: TSeries, points) -> str:
    pset = set(points)
    for n, c in e.terms():
        for q in c.fac:
            if q not in pset:
                return f"coefficient of t^{n} has a pole at {q}, outside the point set"
        if rest_off_points(c, points).degree > 0:
            return f"coefficient of t^{n} has an unmarked pole factor"
        if c.num.degree > c.den_degree:
            return f"coefficient of t^{n} is unbounded at infinity"
    if e.coeffs and e.t_min < 0:
        return "negative t-valuation"
    return "entry outside the global ring"


def _is_identity_mod_t(m: TMatrix) -> bool:
    g = m.coeff_matrix(0)
    n = m.rows
    one = RatFunc.one()
    return all(
        g[i][j] == (one if i == j else RF_ZERO) for i in range(n) for j in range(n)
    )


def additive_split(E: list, points, i: int):
    """Split one error grid: (C, D) with E = -C + D, D regular at points[i].

    C collects minus the principal parts of E's entries at points[i]; poles
    of E at other marked points stay in D, which is fine: D only ever needs
    regularity at its own point, and the caller aggregates the C's from all
    points before forming the final remainders.
    """
    ps = validate_points(points)
    q = ps[i]
    pset = set(ps)
    n = len(E)
    C = [[RF_ZERO] * len(E[0]) for _ in range(n)]
    D = [[RF_ZERO] * len(E[0]) for _ in range(n)]
    any_c = False
    for r in range(n):
        for s in range(len(E[0])):
            e = E[r][s]
            if e.is_zero:
                continue
            if any(p not in pset for p in e.fac) or rest_off_points(e, ps).degree > 0:
                raise PoleOutsidePointSetError(
                    f"error entry ({r},{s}) has a pole outside the point set"
                )
            k = e.pole_order_at(q)
            if k:
                pp = principal_part_ratfunc(q, e.principal_part(q))
                C[r][s] = -pp
                D[r][s] = e - pp
                any_c = True
            else:
                D[r][s] = e
    return (C if any_c else None), D


def factor_simultaneous(problem: PatchProblem, check_progress: bool = True) -> PatchSolution:
    """Run the stagewise factorization to the problem's target order."""
    problem.validate()
    ps = problem.points
    N = problem.target_order
    n = problem.n
    r = len(ps)

    # state as {t-order: coefficient grid}; absent order means zero
    ident = _identity_grid(n)
    y_state = {0: ident}
    p_state = []  # P_i = Y * Y_i^-1
    zinv_state = []  # Z_i^-1
    for m in problem.inputs:
        inv = m.inv().truncate(N)
        p_state.append({k: g for k, g in _grids_of(inv, N).items()})
        zinv_state.append({0: ident})

    for s in range(1, N):
        errors = [_conv_at(zinv_state[i], p_state[i], s, n) for i in range(r)]
        c_total = None
        remainders = []
        for i in range(r):
            e = errors[i]
            if e is None:
                remainders.append(None)
                continue
            c_part, d_base = additive_split(e, ps, i)
            remainders.append(d_base)
            if c_part is not None:
                c_total = c_part if c_total is None else _gmat_add(c_total, c_part)
        if c_total is not None:
            _apply_unit_plus(y_state, c_total, s, N)
            for i in range(r):
                _apply_unit_plus(p_state[i], c_total, s, N)
        for i in range(r):
            # D_i = E_i + C = remainder-at-own-point plus other points' C parts
            d = remainders[i]
            if c_total is not None:
                other = _gmat_sub_pp(c_total, errors[i], ps, i)
                d = other if d is None else _gmat_add(d, other)
            if d is not None and not _grid_is_zero(d):
                _apply_unit_plus(zinv_state[i], _gmat_neg(d), s, N)
        if check_progress:
            for i in range(r):
                leftover = _conv_at(zinv_state[i], p_state[i], s, n)
                if leftover is not None:
                    raise PPVError(
                        f"stage {s} failed to clear the order-{s} error at point {i}"
                    )

    y_mat = TMatrix.from_coeff_matrices(y_state, N, size=(n, n))
    z_mats = [
        TMatrix.from_coeff_matrices(zi, N, size=(n, n)).inv().truncate(N)
        for zi in zinv_state
    ]

    # when every input is unimodular, det Y is a unit series constant in x;
    # rescaling the first row of Y and every Z_i makes all determinants 1
    # without touching the residuals Z_i^-1 Y
    one = TSeries.constant(1, N)
    if all(m.det() == one for m in problem.inputs):
        d = y_mat.det().truncate(N)
        if not d == one:
            if all(c.is_constant for c in d.coeffs):
                d_inv = d.inv().truncate(N)
                y_mat = _scale_row(y_mat, 0, d_inv)
                z_mats = [_scale_row(z, 0, d_inv) for z in z_mats]

    return PatchSolution(Y=y_mat, Z=z_mats, achieved_order=N)


def verify_patch(problem: PatchProblem, solution: PatchSolution) -> PatchReport:
    """Recompute every contractual property of a solution from scratch."""
    ps = validate_points(problem.points)
    N = solution.achieved_order
    y = solution.Y
    notes = []
    residual_orders = []
    z_local = []
    det_rel = []
    det_y = y.det()
    unit = _is_identity_mod_t(y)
    for i, (q, y_in) in enumerate(zip(ps, problem.inputs)):
        z = solution.Z[i]
        unit = unit and _is_identity_mod_t(z)
        # Y - Z_i*Y_i equals Z_i*(Z_i^-1*Y - Y_i); Z_i == I mod t is a unit,
        # so both residuals vanish to exactly the same t-order
        resid = y - z * y_in
        order = resid.min_order()
        residual_orders.append(min(order, N) if order is not None else N)
        z_local.append(matrix_in_local_ring(z, q))
        det_rel.append(z.det() * y_in.det() == det_y)
    y_global = matrix_in_global_ring(y, ps)
    ok = (
        all(o >= N for o in residual_orders)
        and y_global
        and all(z_local)
        and unit
        and all(det_rel)
    )
    if not ok:
        bad = [i for i, o in enumerate(residual_orders) if o < N]
        if bad:
            notes.append(f"nonzero residuals at point indices {bad}")
        if not y_global:
            notes.append("Y has entries outside the global ring")
        if not all(z_local):
            notes.append("some Z_i is not regular at its point")
        if not unit:
            notes.append("a factor is not I mod t")
        if not all(det_rel):
            notes.append("determinant relation det(Z_i)det(Y_i) = det(Y) fails")
    return PatchReport(
        ok=ok,
        achieved_order=N,
        residual_orders=residual_orders,
        y_in_global_ring=y_global,
        z_in_local_ring=z_local,
        unit_mod_t=unit,
        det_relation=det_rel,
        notes=notes,
    )


# -- grid plumbing -----------------------------------------------------------


def _identity_grid(n: int) -> list:
    one = RatFunc.one()
    return [[one if i == j else RF_ZERO for j in range(n)] for i in range(n)]


def _grids_of(m: TMatrix, N: int) -> dict:
    out = {}
    for k in range(min(N, int(m.prec) if m.prec != float("inf") else N)):
        g = m.coeff_matrix(k)
        if not _grid_is_zero(g):
            out[k] = g
    return out


def _grid_is_zero(g: list) -> bool:
    return all(c.is_zero for row in g for c in row)


def _gmat_neg(g: list) -> list:
    return [[-c for c in row] for row in g]


def _gmat_sub_pp(c_total: list, e: list, ps, i: int) -> list:
    """c_total minus the part of it that came from E_i's own principal parts.

    D_i = E_i + C; additive_split already folded E_i - pp_i(E_i) into the
    remainder, so the missing piece is C + pp_i(E_i), i.e. the aggregated
    correction with this point's own contribution cancelled.
    """
    if e is None:
        return c_total
    q = ps[i]
    n = len(c_total)
    out = [[c_total[r][s] for s in range(n)] for r in range(n)]
    for r in range(n):
        for s in range(n):
            v = e[r][s]
            if v.is_zero or not v.pole_order_at(q):
                continue
            out[r][s] = out[r][s] + principal_part_ratfunc(q, v.principal_part(q))
    return out


def _conv_at(za: dict, pb: dict, s: int, n: int):
    """Coefficient of t^s in the product of two grid dictionaries."""
    grid_pairs = []
    for k in range(s + 1):
        a = za.get(k)
        if a is None:
            continue
        b = pb.get(s - k)
        if b is None:
            continue
        grid_pairs.append((a, b))
    if not grid_pairs:
        return None
    acc = _gmat_dot(grid_pairs)
    if _grid_is_zero(acc):
        return None
    return acc


def _apply_unit_plus(state: dict, C: list, s: int, N: int) -> None:
    """state <- (I + t^s C) * state, truncated below t^N, in place."""
    one = RatFunc.one()
    for k in range(N - 1, s - 1, -1):
        low = state.get(k - s)
        if low is None:
            continue
        cur = state.get(k)
        if cur is None:
            state[k] = _gmat_mul(C, low)
        else:
            # fold the existing coefficient into the same reduction pass
            n = len(C)
            state[k] = [
                [
                    RatFunc.dot(
                        [(cur[i][j], one)] + [(C[i][l], low[l][j]) for l in range(n)]
                    )
                    for j in range(n)
                ]
                for i in range(n)
            ]


def _scale_row(m: TMatrix, row: int, s: TSeries) -> TMatrix:
    entries = [[e for e in r] for r in m.entries]
    entries[row] = [e * s for e in entries[row]]
    return TMatrix(entries)
