"""Ring membership and rational reconstruction for series over k(x).

The construction works inside a tower of rings built from a finite set of
marked points q_1, ..., q_r:

  global ring: power series in t whose coefficients are rational functions
      with poles only at the marked points and a finite value at infinity
      (equivalently, polynomials in the (x - q_j)^-1 plus constants);
  local ring at q: power series in t whose coefficients are regular at q.

Both predicates certify membership at the ring level only.  They are
sufficient, never necessary, for membership in the corresponding fraction
fields, so a failed check is reported as inconclusive rather than as a
disproof.  An element passing the global test and one local test is certified
to lie in the intersection, which for these rings is k((t))(x).

`reconstruct` is the effective membership test for k((t))(x) itself: it
searches for Q(x,t), P(x,t) of bounded x-degree, with t-series coefficients,
such that Q*a = P holds modulo t^N, and re-verifies any certificate it finds
by exact series arithmetic before returning it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InsufficientPrecisionError, InvalidPointsError, PPVError
from .rational import RAT_ONE, RAT_ZERO, Poly, RatFunc, _ginv, poly_lcm, rat
from .series import INF, TMatrix, TSeries

RING_GLOBAL = "global-ring"
RING_LOCAL = "local-ring"


def validate_points(points) -> list:
    """Coerce to exact rationals; points must be pairwise distinct, r >= 1."""
    ps = [rat(q) for q in points]
    if not ps:
        raise InvalidPointsError("need at least one point")
    if len(set(ps)) != len(ps):
        raise InvalidPointsError(f"points are not pairwise distinct: {ps}")
    return ps


def rest_off_points(c: RatFunc, points) -> "object":
    """The part of c's unfactored denominator not explained by marked points.

    Denominator factors at marked points usually live in the factored part,
    but values that passed through an inversion carry them inside `rest`;
    membership must not depend on which split the arithmetic happened to
    produce, so marked roots are divided out here before judging.
    """
    g = c.rest
    if g.degree == 0:
        return g
    for q in points:
        while g.degree > 0:
            quo, rem = g.deflate(q)
            if rem:
                break
            g = quo
    return g


def coeff_in_global_ring(c: RatFunc, points) -> bool:
    """Poles only at marked points and bounded at infinity."""
    pset = set(points)
    if any(q not in pset for q in c.fac):
        return False
    if rest_off_points(c, points).degree > 0:
        return False
    return c.num.degree <= c.den_degree


def series_in_global_ring(a: TSeries, points) -> bool:
    """Ring-level test: nonnegative t-valuation, every coefficient global."""
    if a.coeffs and a.t_min < 0:
        return False
    return all(coeff_in_global_ring(c, points) for c in a.coeffs)


def series_in_local_ring(a: TSeries, q) -> bool:
    """Ring-level test: nonnegative t-valuation, every coefficient regular at q."""
    if a.coeffs and a.t_min < 0:
        return False
    q = rat(q)
    return all(c.regular_at(q) for c in a.coeffs)


def matrix_in_global_ring(m: TMatrix, points) -> bool:
    return all(series_in_global_ring(e, points) for row in m.entries for e in row)


def matrix_in_local_ring(m: TMatrix, q) -> bool:
    return all(series_in_local_ring(e, q) for row in m.entries for e in row)


def intersection_certificate(a: TSeries, points, i: int) -> bool:
    """Sufficient certificate that a lies in k((t))(x).

    True when a passes the global-ring test and the local-ring test at
    points[i]; the intersection of those two rings' fraction fields is
    k((t))(x).  False is inconclusive: it only means this particular
    certificate is unavailable, and membership may still be established
    by `reconstruct`.
    """
    return series_in_global_ring(a, points) and series_in_local_ring(a, points[i])


def required_precision(d_x: int) -> int:
    """Series order needed before attempting reconstruction at x-degree d_x."""
    return 2 * (d_x + 1) + 4


@dataclass
class ReconstructionResult:
    """Certified rational form Q*a = P (mod t^verified_order), or a failure.

    numerator / denominator hold the x-coefficients of P and Q, low degree
    first, each a TSeries in t.  On success the residual Q*a - P has been
    re-verified to vanish modulo t^verified_order.
    """

    success: bool
    numerator: list | None
    denominator: list | None
    degree_bounds: tuple
    verified_order: int

    def as_series_pair(self, prec) -> tuple:
        """(P, Q) combined back into TSeries-in-t with polynomial-in-x coefficients."""
        def combine(cols):
            acc = TSeries.zero(prec)
            for j, s in enumerate(cols):
                xj = RatFunc.from_poly(Poly.x() ** j) if j else RatFunc.one()
                acc = acc + s.map_coeffs(lambda c, m=xj: c * m)
            return acc

        return combine(self.numerator), combine(self.denominator)


def reconstruct(a: TSeries, d_x: int, N: int) -> ReconstructionResult:
    """Search for Q(x,t)*a = P(x,t) mod t^N with x-degrees at most d_x.

    Q is a polynomial in t with polynomial-in-x coefficients, normalized to a
    nonzero constant term in t; P may carry negative t-powers when a does.
    The search escalates the t-degree allowed in Q from 0 upward, posing one
    exact homogeneous linear system over the coefficient field per degree, so
    the certificate returned has minimal t-degree in Q.  Deterministic in all
    choices.  Success is re-verified: the residual Q*a - P is recomputed with
    series arithmetic and must vanish modulo t^N.
    """
    if d_x < 0:
        raise ValueError("x-degree bound must be nonnegative")
    if N < 2:
        raise InsufficientPrecisionError(f"order {N} cannot pose a meaningful system")
    if a.prec < N:
        raise InsufficientPrecisionError(
            f"series known modulo t^{a.prec}, reconstruction to order {N} requested"
        )
    bounds = (d_x, d_x)

    if a.is_zero or a.order >= N:
        zero = [TSeries.zero(N)]
        one = [TSeries.constant(RAT_ONE, N)]
        return ReconstructionResult(True, zero, one, bounds, N)

    # shift a to nonnegative t-valuation; P absorbs the shift at the end
    v = min(a.t_min, 0)
    K = N - v
    b = [a.coeff(n + v) for n in range(K)]

    # common denominator, assembled from the factored structure
    fac_max = {}
    rest_lcm = Poly.one()
    for c in b:
        if c.is_zero:
            continue
        for q, e in c.fac.items():
            if e > fac_max.get(q, 0):
                fac_max[q] = e
        if c.rest.degree > 0:
            rest_lcm = poly_lcm(rest_lcm, c.rest)
    den = rest_lcm
    try:
        fac_order = sorted(fac_max)
    except TypeError:
        fac_order = list(fac_max)
    for q in fac_order:
        den = den * Poly.linear(q) ** fac_max[q]
    deg_d = den.degree
    # numerators over the common denominator
    bn = []
    for c in b:
        if c.is_zero:
            bn.append(Poly.zero())
        else:
            bn.append(c.num * den.div_exact(c.den))

    # row layout per t-order s: deg_d remainder rows, then rows forcing the
    # quotient's x-degree down to d_x (present only when some bn exceeds den)
    excess = max((p.degree - deg_d for p in bn if not p.is_zero), default=0)
    excess = max(excess, 0)
    stride = deg_d + excess
    nrows = K * stride
    if nrows == 0:
        # denominator-free data of degree <= d_x everywhere: Q = 1 works
        qcols = [Poly.one()] + [Poly.zero()] * d_x
        return _certified(a, qcols, d_x, N, bounds)

    # rem/quot tables: x^j * bn[i] = den * quot + rem
    x = Poly.x()
    rem_tab = {}
    quot_tab = {}
    for i, p in enumerate(bn):
        if p.is_zero:
            continue
        shifted = p
        for j in range(d_x + 1):
            if j:
                shifted = shifted * x
            quot, rem = shifted.divmod(den)
            rem_tab[(j, i)] = rem
            quot_tab[(j, i)] = quot

    def column(k: int, j: int) -> list:
        col = [RAT_ZERO] * nrows
        for s in range(k, K):
            i = s - k
            rem = rem_tab.get((j, i))
            if rem is None:
                continue
            base = s * stride
            for d, cv in enumerate(rem.coeffs):
                col[base + d] = cv
            if excess:
                quot = quot_tab[(j, i)]
                for d in range(d_x + 1, quot.degree + 1):
                    col[base + deg_d + (d - d_x - 1)] = quot.coeffs[d]
        return col

    # incremental column elimination: columns arrive in t-degree-major order,
    # so the first dependent column with a nonzero t^0 block is the minimal
    # certificate; expression tracking turns the dependency into Q itself
    pivots = []  # (pivot_row, reduced_column, expression: dict col_index -> coeff)
    width = d_x + 1
    for u in range(width * K):
        k, j = divmod(u, width)
        col = column(k, j)
        expr = {u: RAT_ONE}
        for prow, pcol, pexpr in pivots:
            lam = col[prow]
            if not lam:
                continue
            for r in range(nrows):
                pv = pcol[r]
                if pv:
                    col[r] = col[r] - lam * pv
            for w, cv in pexpr.items():
                expr[w] = expr.get(w, RAT_ZERO) - lam * cv
        lead = next((r for r in range(nrows) if col[r]), None)
        if lead is None:
            qvec = {w: cv for w, cv in expr.items() if cv}
            if any(w < width for w in qvec):
                qcols = _assemble_q(qvec, width, k, d_x)
                return _certified(a, qcols, d_x, N, bounds)
            continue
        inv = _ginv(col[lead])
        col = [cv * inv for cv in col]
        expr = {w: cv * inv for w, cv in expr.items()}
        pivots.append((lead, col, expr))

    return ReconstructionResult(False, None, None, bounds, 0)


def _assemble_q(qvec: dict, width: int, t_deg: int, d_x: int) -> list:
    """Kernel vector -> Q's x-coefficient polynomials in t, normalized."""
    grid = [[RAT_ZERO] * (t_deg + 1) for _ in range(width)]
    for u, cv in qvec.items():
        k, j = divmod(u, width)
        grid[j][k] = cv
    top = max(j for j in range(width) if grid[j][0])
    scale = _ginv(grid[top][0])
    return [Poly([cv * scale for cv in row]) for row in grid]


def _certified(
    a: TSeries, qcols: list, d_x: int, N: int, bounds: tuple
) -> ReconstructionResult:
    """Re-verify Q*a = P by series arithmetic and package the result."""
    den_cols = [
        TSeries(0, [RatFunc.from_ground(c) for c in q.coeffs], N) for q in qcols
    ]
    q_series = TSeries.from_terms(
        {
            k: RatFunc.from_poly(Poly([q.coeffs[k] if k <= q.degree else RAT_ZERO for q in qcols]))
            for k in range(max(q.degree for q in qcols) + 1)
        },
        N,
    )
    prod = (q_series * a).truncate(N)
    num_cols = [dict() for _ in range(d_x + 1)]
    for n, c in prod.terms():
        if c.den_degree != 0 or c.num.degree > d_x:
            raise PPVError("reconstruction certificate failed residual verification")
        for j, cv in enumerate(c.num.coeffs):
            num_cols[j][n] = cv
    numerator = [
        TSeries.from_terms({n: RatFunc.from_ground(cv) for n, cv in colmap.items()}, N)
        for colmap in num_cols
    ]
    result = ReconstructionResult(True, numerator, den_cols, bounds, N)
    p_series, q_check = result.as_series_pair(N)
    residual = (q_check * a - p_series).truncate(N)
    if not residual.is_zero:
        raise PPVError("reconstruction certificate failed residual verification")
    return result
