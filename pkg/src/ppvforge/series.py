"""Truncated Laurent series in t with exact rational-function coefficients.

A TSeries value represents an element of k(x)((t)) known modulo t^prec:
stored coefficients are exact RatFunc values, everything at order >= prec is
unknown, everything else in between is exactly zero. prec may be the float
infinity for values that are exact polynomials in t (constants, t itself),
and every operation propagates precision honestly:

    add/sub:  min(prec_a, prec_b)
    mul:      min(prec_a + ord_b, prec_b + ord_a)   (ord = t-adic valuation)
    d/dt:     prec - 1
    d/dx:     prec
    inverse:  prec - 2 * ord

Equality compares coefficients strictly below the shared precision, so two
values are equal exactly when nothing currently known distinguishes them.

TMatrix is a rectangular grid of TSeries normalized to one shared precision.
"""

from __future__ import annotations

from typing import Callable, Iterable

from .errors import (
    PrecisionExhaustedError,
    SingularLeadingMatrixError,
    ZeroLeadingTermError,
)
from .rational import RAT_ONE, RAT_ZERO, Poly, RatFunc, _ground

INF = float("inf")


def _canon_prec(p):
    # precision arithmetic like INF + k yields a fresh float infinity, but
    # the code tests precisions with "is INF"; fold any infinity back to
    # the singleton before storing or comparing
    return INF if p == INF else p

RF_ZERO = RatFunc.zero()


def _coerce_coeff(c) -> RatFunc:
    if isinstance(c, RatFunc):
        return c
    if isinstance(c, Poly):
        return RatFunc.from_poly(c)
    return RatFunc.from_ground(c)


class TSeries:
    """One truncated Laurent series in t over the rational-function field."""

    __slots__ = ("t_min", "coeffs", "prec")

    def __init__(self, t_min: int, coeffs: Iterable, prec):
        cs = [_coerce_coeff(c) for c in coeffs]
        prec = _canon_prec(prec)
        if prec is not INF:
            prec = int(prec)
            if t_min + len(cs) > prec:
                cs = cs[: max(0, prec - t_min)]
        while cs and cs[-1].is_zero:
            cs.pop()
        while cs and cs[0].is_zero:
            cs.pop(0)
            t_min += 1
        if not cs:
            t_min = 0
        self.t_min = t_min
        self.coeffs = cs
        self.prec = prec

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, prec=INF) -> "TSeries":
        return cls(0, [], prec)

    @classmethod
    def constant(cls, c, prec=INF) -> "TSeries":
        return cls(0, [c], prec)

    @classmethod
    def t_power(cls, k: int, coeff=1, prec=INF) -> "TSeries":
        return cls(k, [coeff], prec)

    @classmethod
    def from_terms(cls, terms: dict, prec) -> "TSeries":
        if not terms:
            return cls.zero(prec)
        lo = min(terms)
        hi = max(terms)
        coeffs = [terms.get(n, RF_ZERO) for n in range(lo, hi + 1)]
        return cls(lo, coeffs, prec)

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        """Zero as far as the stored precision can tell."""
        return not self.coeffs

    @property
    def order(self) -> int:
        """t-adic valuation; for a (known-)zero series this is the precision."""
        return self.t_min if self.coeffs else self.prec

    @property
    def end(self) -> int:
        return self.t_min + len(self.coeffs)

    def coeff(self, n: int) -> RatFunc:
        if self.prec is not INF and n >= self.prec:
            raise PrecisionExhaustedError(
                f"coefficient of t^{n} requested, series known mod t^{self.prec}"
            )
        if self.t_min <= n < self.end:
            return self.coeffs[n - self.t_min]
        return RF_ZERO

    def terms(self):
        for i, c in enumerate(self.coeffs):
            if not c.is_zero:
                yield self.t_min + i, c

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        other = _coerce_series(other)
        if other is NotImplemented:
            return NotImplemented
        m = min(self.prec, other.prec)
        if m is INF:
            return self.t_min == other.t_min and self.coeffs == other.coeffs
        lo = min(self.order, other.order)
        if lo >= m:
            return True
        n = int(m)
        for k in range(lo, n):
            if self.coeff(k) != other.coeff(k):
                return False
        return True

    __hash__ = None

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "TSeries":
        return TSeries(self.t_min, [-c for c in self.coeffs], self.prec)

    def __add__(self, other) -> "TSeries":
        other = _coerce_series(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        if not self.coeffs:
            return other.truncate(prec)
        if not other.coeffs:
            return self.truncate(prec)
        lo = min(self.t_min, other.t_min)
        hi = max(self.end, other.end)
        if prec is not INF:
            hi = min(hi, int(prec))
        out = []
        for n in range(lo, hi):
            a = self.coeffs[n - self.t_min] if self.t_min <= n < self.end else RF_ZERO
            b = (
                other.coeffs[n - other.t_min]
                if other.t_min <= n < other.end
                else RF_ZERO
            )
            out.append(a + b)
        return TSeries(lo, out, prec)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other) -> "TSeries":
        other = _coerce_series(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_series(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "TSeries":
        other = _coerce_series(other)
        if other is NotImplemented:
            return NotImplemented
        prec = _canon_prec(min(self.prec + other.order, other.prec + self.order))
        if not self.coeffs or not other.coeffs:
            return TSeries.zero(prec)
        lo = self.t_min + other.t_min
        hi = self.end + other.end - 1
        if prec is not INF:
            hi = min(hi, int(prec))
        out = []
        for n in range(lo, hi):
            k_lo = max(self.t_min, n - other.end + 1)
            k_hi = min(self.end - 1, n - other.t_min)
            out.append(
                RatFunc.dot(
                    (self.coeffs[k - self.t_min], other.coeffs[n - k - other.t_min])
                    for k in range(k_lo, k_hi + 1)
                )
            )
        return TSeries(lo, out, prec)

    def __rmul__(self, other):
        return self.__mul__(other)

    def inv(self) -> "TSeries":
        """Multiplicative inverse; needs a nonzero leading coefficient."""
        if not self.coeffs:
            raise ZeroLeadingTermError("cannot invert a series that is zero mod t^prec")
        v = self.t_min
        if self.prec is INF:
            if len(self.coeffs) > 1:
                # the inverse of an exact multi-term series is an infinite
                # series; the caller must truncate to say how much is wanted
                raise PrecisionExhaustedError(
                    "inverse of an exact series needs a finite precision; truncate first"
                )
            length = 1
        else:
            length = int(self.prec - v)
        a0_inv = self.coeffs[0].inv()
        out = [a0_inv]
        for n in range(1, length):
            hi = min(n, len(self.coeffs) - 1)
            acc = RatFunc.dot((self.coeffs[k], out[n - k]) for k in range(1, hi + 1))
            out.append(-(a0_inv * acc) if not acc.is_zero else RF_ZERO)
        prec = INF if self.prec is INF else self.prec - 2 * v
        return TSeries(-v, out, prec)

    def __truediv__(self, other):
        other = _coerce_series(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __pow__(self, n: int) -> "TSeries":
        if n == 0:
            return TSeries.constant(RAT_ONE, prec=INF)
        base = self if n > 0 else self.inv()
        n = abs(n)
        out = None
        while n:
            if n & 1:
                out = base if out is None else out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def dx(self) -> "TSeries":
        """Coefficientwise derivative in x; precision is unchanged."""
        return TSeries(self.t_min, [c.dx() for c in self.coeffs], self.prec)

    def dt(self) -> "TSeries":
        """Derivative in t; one order of precision is spent."""
        out = []
        for i, c in enumerate(self.coeffs):
            n = self.t_min + i
            out.append(c * RatFunc.from_ground(n) if n else RF_ZERO)
        prec = INF if self.prec is INF else self.prec - 1
        return TSeries(self.t_min - 1, out, prec)

    def shift(self, k: int) -> "TSeries":
        """Multiply by t^k."""
        prec = INF if self.prec is INF else self.prec + k
        return TSeries(self.t_min + k, list(self.coeffs), prec)

    def truncate(self, prec) -> "TSeries":
        if prec >= self.prec:
            return self
        return TSeries(self.t_min, list(self.coeffs), prec)

    def map_coeffs(self, fn: Callable[[RatFunc], RatFunc]) -> "TSeries":
        return TSeries(self.t_min, [fn(c) for c in self.coeffs], self.prec)

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"TSeries(0 mod t^{self.prec})"
        parts = [f"({c})*t^{self.t_min + i}" for i, c in enumerate(self.coeffs) if not c.is_zero]
        shown = " + ".join(parts[:4]) + (" + ..." if len(parts) > 4 else "")
        return f"TSeries({shown} mod t^{self.prec})"


def _coerce_series(value):
    if isinstance(value, TSeries):
        return value
    if isinstance(value, (RatFunc, Poly, int)) or hasattr(value, "denominator"):
        try:
            return TSeries.constant(value, prec=INF)
        except TypeError:
            return NotImplemented
    return NotImplemented


def shifted_pole_series(q, c, prec) -> TSeries:
    """t-adic expansion of 1/(x - q + c*t), a pole drifting with t.

    Equals sum_{n 0..prec-1} (-c)^n t^n / (x - q)^(n+1), exact at every order.
    """
    c = _ground(c)
    out = {}
    sign = RAT_ONE
    for n in range(int(prec)):
        out[n] = RatFunc.linear_pole(q, n + 1, sign)
        sign = sign * (-c)
    return TSeries.from_terms(out, prec)


class TMatrix:
    """Matrix of TSeries entries sharing one precision."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries, prec=None):
        rows = [[_entry_series(e) for e in row] for row in entries]
        if not rows or not rows[0]:
            raise ValueError("empty matrix")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix")
        p = min((e.prec for r in rows for e in r), default=INF)
        if prec is not None:
            p = min(p, prec)
        self.rows = len(rows)
        self.cols = width
        self.entries = [[e.truncate(p) for e in r] for r in rows]

    @property
    def prec(self):
        return min(e.prec for r in self.entries for e in r)

    @classmethod
    def identity(cls, n: int, prec=INF) -> "TMatrix":
        return cls(
            [
                [TSeries.constant(RAT_ONE if i == j else RAT_ZERO, prec) for j in range(n)]
                for i in range(n)
            ]
        )

    @classmethod
    def zeros(cls, rows: int, cols: int, prec=INF) -> "TMatrix":
        return cls([[TSeries.zero(prec) for _ in range(cols)] for _ in range(rows)])

    def entry(self, i: int, j: int) -> TSeries:
        return self.entries[i][j]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for r in self.entries for e in r)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TMatrix):
            return NotImplemented
        if self.rows != other.rows or self.cols != other.cols:
            return False
        return all(
            self.entries[i][j] == other.entries[i][j]
            for i in range(self.rows)
            for j in range(self.cols)
        )

    __hash__ = None

    def __neg__(self) -> "TMatrix":
        return TMatrix([[-e for e in r] for r in self.entries])

    def __add__(self, other) -> "TMatrix":
        if not isinstance(other, TMatrix):
            return NotImplemented
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")
        return TMatrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other) -> "TMatrix":
        if not isinstance(other, TMatrix):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "TMatrix":
        if not isinstance(other, TMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                row.append(
                    _series_dot(
                        [
                            (self.entries[i][k], other.entries[k][j])
                            for k in range(self.cols)
                        ]
                    )
                )
            out.append(row)
        return TMatrix(out)

    def scale(self, s) -> "TMatrix":
        s = _entry_series(s)
        return TMatrix([[e * s for e in r] for r in self.entries])

    def dx(self) -> "TMatrix":
        return TMatrix([[e.dx() for e in r] for r in self.entries])

    def dt(self) -> "TMatrix":
        return TMatrix([[e.dt() for e in r] for r in self.entries])

    def truncate(self, prec) -> "TMatrix":
        return TMatrix(self.entries, prec=prec)

    def coeff_matrix(self, n: int) -> list:
        """Grid of RatFunc coefficients of t^n."""
        return [[e.coeff(n) for e in r] for r in self.entries]

    @classmethod
    def from_coeff_matrices(cls, coeffs: dict, prec, size=None) -> "TMatrix":
        """Assemble from a map {t-order: RatFunc grid}."""
        if not coeffs and size is None:
            raise ValueError("need a size for an empty coefficient map")
        some = next(iter(coeffs.values())) if coeffs else None
        rows = len(some) if some else size[0]
        cols = len(some[0]) if some else size[1]
        entries = []
        for i in range(rows):
            row = []
            for j in range(cols):
                row.append(
                    TSeries.from_terms(
                        {n: grid[i][j] for n, grid in coeffs.items()}, prec
                    )
                )
            entries.append(row)
        return cls(entries)

    def min_order(self) -> int:
        return min(e.order for r in self.entries for e in r)

    def inv(self) -> "TMatrix":
        """Inverse via leading-coefficient inversion plus the order recurrence."""
        if not self.is_square:
            raise ValueError("inverse of a non-square matrix")
        prec = self.prec
        v = self.min_order()
        if v is INF or (prec is not INF and v >= prec):
            raise SingularLeadingMatrixError("matrix is zero mod t^prec")
        if prec is INF:
            if any(e.end > v + 1 for r in self.entries for e in r):
                raise PrecisionExhaustedError(
                    "inverse of an exact matrix needs a finite precision; truncate first"
                )
            rel = 1
        else:
            rel = int(prec - v)
        lead = self.coeff_matrix(v)
        lead_inv = _gmat_inv(lead)
        if lead_inv is None:
            raise SingularLeadingMatrixError(
                "t-leading coefficient matrix is not invertible over k(x)"
            )
        n = self.rows
        a = {m: self.coeff_matrix(v + m) for m in range(rel)}
        b = {0: lead_inv}
        for m in range(1, rel):
            grid_pairs = [
                (a[k], b[m - k])
                for k in range(1, m + 1)
                if a.get(k) is not None and not _gmat_is_zero(a[k])
            ]
            if not grid_pairs:
                b[m] = [[RF_ZERO] * n for _ in range(n)]
            else:
                acc = _gmat_dot(grid_pairs)
                b[m] = [[-c for c in row] for row in _gmat_mul(lead_inv, acc)]
        out_prec = INF if prec is INF else prec - 2 * v
        shifted = {m - v: grid for m, grid in b.items()}
        return TMatrix.from_coeff_matrices(shifted, out_prec, size=(n, n))

    def det(self) -> TSeries:
        """Determinant by elimination with minimal-valuation pivoting."""
        if not self.is_square:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        work = [[self.entries[i][j] for j in range(n)] for i in range(n)]
        sign = 1
        det = TSeries.constant(RAT_ONE, INF)
        for col in range(n):
            pivot_row = None
            pivot_ord = INF
            for r in range(col, n):
                e = work[r][col]
                if not e.is_zero and e.order < pivot_ord:
                    pivot_ord = e.order
                    pivot_row = r
            if pivot_row is None:
                # column vanishes to working precision, so does the determinant
                p = min(e.prec for row in work for e in row)
                return TSeries.zero(p)
            if pivot_row != col:
                work[col], work[pivot_row] = work[pivot_row], work[col]
                sign = -sign
            pivot = work[col][col]
            pivot_inv = pivot.inv()
            for r in range(col + 1, n):
                e = work[r][col]
                if e.is_zero:
                    continue
                factor = e * pivot_inv
                for c in range(col, n):
                    work[r][c] = work[r][c] - factor * work[col][c]
            det = det * pivot
        if sign < 0:
            det = -det
        return det

    def trace(self) -> TSeries:
        if not self.is_square:
            raise ValueError("trace of a non-square matrix")
        acc = TSeries.zero(self.prec)
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def map_entries(self, fn: Callable[[TSeries], TSeries]) -> "TMatrix":
        return TMatrix([[fn(e) for e in r] for r in self.entries])

    def __repr__(self) -> str:
        return f"TMatrix({self.rows}x{self.cols} mod t^{self.prec})"


def _entry_series(e) -> TSeries:
    if isinstance(e, TSeries):
        return e
    return TSeries.constant(e, prec=INF)


def _series_dot(pairs: list) -> TSeries:
    """Sum of series products a*b with one coefficient reduction per order.

    Carries the same precision bound as the chain of * and + it replaces:
    min over the pairs of (a.prec + b.order, b.prec + a.order).
    """
    prec = INF
    live = []
    for a, b in pairs:
        prec = min(prec, a.prec + b.order, b.prec + a.order)
        if a.coeffs and b.coeffs:
            live.append((a, b))
    prec = _canon_prec(prec)
    if not live:
        return TSeries.zero(prec)
    lo = min(a.t_min + b.t_min for a, b in live)
    hi = max(a.end + b.end - 1 for a, b in live)
    if prec is not INF:
        hi = min(hi, int(prec))
    out = []
    for n in range(lo, hi):
        rf_pairs = []
        for a, b in live:
            k_lo = max(a.t_min, n - b.end + 1)
            k_hi = min(a.end - 1, n - b.t_min)
            for k in range(k_lo, k_hi + 1):
                rf_pairs.append((a.coeffs[k - a.t_min], b.coeffs[n - k - b.t_min]))
        out.append(RatFunc.dot(rf_pairs))
    return TSeries(lo, out, prec)


# -- small exact linear algebra over the coefficient field ------------------


def _gmat_mul(a: list, b: list) -> list:
    n, m, p = len(a), len(b[0]), len(b)
    return [
        [RatFunc.dot((a[i][k], b[k][j]) for k in range(p)) for j in range(m)]
        for i in range(n)
    ]


def _gmat_dot(grid_pairs: list) -> list:
    """Sum of grid products A*B with one reduction per output entry."""
    n = len(grid_pairs[0][0])
    m = len(grid_pairs[0][1][0])
    return [
        [
            RatFunc.dot(
                (a[i][k], b[k][j]) for a, b in grid_pairs for k in range(len(b))
            )
            for j in range(m)
        ]
        for i in range(n)
    ]


def _gmat_add(a: list, b: list) -> list:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _gmat_is_zero(a: list) -> bool:
    return all(c.is_zero for row in a for c in row)


def _gmat_inv(a: list):
    """Gauss-Jordan inverse of a RatFunc grid; None when singular."""
    n = len(a)
    work = [list(row) for row in a]
    inv = [
        [RatFunc.one() if i == j else RF_ZERO for j in range(n)] for i in range(n)
    ]
    for col in range(n):
        pivot_row = None
        for r in range(col, n):
            if not work[r][col].is_zero:
                pivot_row = r
                break
        if pivot_row is None:
            return None
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
            inv[col], inv[pivot_row] = inv[pivot_row], inv[col]
        piv_inv = work[col][col].inv()
        work[col] = [c * piv_inv for c in work[col]]
        inv[col] = [c * piv_inv for c in inv[col]]
        for r in range(n):
            if r == col:
                continue
            f = work[r][col]
            if f.is_zero:
                continue
            work[r] = [c - f * d for c, d in zip(work[r], work[col])]
            inv[r] = [c - f * d for c, d in zip(inv[r], inv[col])]
    return inv
