"""Split root systems with explicit matrix realizations.

Ships type A_l in its standard (l+1)-dimensional representation, where the
root e_i - e_j acts through the elementary matrix E_ij, and type C_2 as the
4x4 symplectic realization, as a witness that nothing depends on simply-laced
combinatorics.  Each root carries a nilpotent generator X, so the
one-parameter subgroup u(c) = exp(c X) is a terminating polynomial in c and
works verbatim over any coefficient ring the rest of the package uses: exact
rationals, rational functions, or truncated series (giving a TMatrix).

Roots are integer vectors in the standard basis.  The positive roots are
enumerated in a fixed deterministic order; their count m drives the 4m-point
layout of the equation builder.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FormatError, NonInvertibleScalarError
from .rational import RAT_ONE, RAT_ZERO, RatFunc, rat
from .series import INF, TMatrix, TSeries

MULT_ONE = "one"
MULT_T = "t"
MULT_T_INV = "t_inverse"
MULTIPLIERS = (MULT_ONE, MULT_T, MULT_T_INV)


@dataclass(frozen=True)
class GroupDescriptor:
    """A realized local group: the root subgroup and its constants-multiplier.

    multiplier "one" stands for the subgroup {u_root(c)}, "t" for
    {u_root(c*t)}, "t_inverse" for {u_root(c*t^-1)}, c running over the
    parameter-field constants.
    """

    root: tuple
    multiplier: str


def _neg(root: tuple) -> tuple:
    return tuple(-v for v in root)


# -- plain grid helpers over an arbitrary coefficient field ------------------


def grid_identity(n: int) -> list:
    return [[RAT_ONE if i == j else RAT_ZERO for j in range(n)] for i in range(n)]


def grid_mul(a: list, b: list) -> list:
    n, p, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for k in range(p):
                x = a[i][k]
                if not x:
                    continue
                y = b[k][j]
                if not y:
                    continue
                term = x * y
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else RAT_ZERO)
        out.append(row)
    return out


def grid_eq(a: list, b: list) -> bool:
    return all(not (x - y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def grid_transpose(a: list) -> list:
    return [list(col) for col in zip(*a)]


def grid_det(a: list):
    """Cofactor expansion; fine at the shipped dimensions (n <= a few)."""
    n = len(a)
    if n == 1:
        return a[0][0]
    total = None
    sign = 1
    for j in range(n):
        piv = a[0][j]
        if piv:
            minor = [[row[c] for c in range(n) if c != j] for row in a[1:]]
            term = piv * grid_det(minor)
            if sign < 0:
                term = -term
            total = term if total is None else total + term
        sign = -sign
    return total if total is not None else RAT_ZERO


class RootDatum:
    """A split root system bound to one concrete matrix representation."""

    def __init__(self, label, rank, dim, positive_roots, simple_roots, nilpotents, coroot_exp):
        self.label = label
        self.rank = rank
        self.dim = dim
        self.positive_roots = list(positive_roots)
        self.simple_roots = list(simple_roots)
        self._nilpotents = dict(nilpotents)  # positive root -> grid of Rat
        self._coroot_exp = dict(coroot_exp)  # positive root -> diag exponent tuple
        self._exp_terms = {}

    # -- constructors --------------------------------------------------------

    @classmethod
    def type_a(cls, rank: int) -> "RootDatum":
        if rank < 1:
            raise FormatError("type A needs rank >= 1")
        n = rank + 1

        def e(i, j):
            v = [0] * n
            v[i], v[j] = 1, -1
            return tuple(v)

        positive = [e(i, j) for i in range(n) for j in range(i + 1, n)]
        simple = [e(i, i + 1) for i in range(n - 1)]
        nilp = {}
        cor = {}
        for i in range(n):
            for j in range(i + 1, n):
                g = [[RAT_ZERO] * n for _ in range(n)]
                g[i][j] = RAT_ONE
                nilp[e(i, j)] = g
                exp = [0] * n
                exp[i], exp[j] = 1, -1
                cor[e(i, j)] = tuple(exp)
        return cls(f"A{rank}", rank, n, positive, simple, nilp, cor)

    @classmethod
    def type_c2(cls) -> "RootDatum":
        # Sp_4 with the torus diag(s1, s2, s1^-1, s2^-1); basis rows 1..4
        def g(*cells):
            out = [[RAT_ZERO] * 4 for _ in range(4)]
            for i, j, v in cells:
                out[i][j] = rat(v)
            return out

        long1, long2 = (2, 0), (0, 2)
        short_m, short_p = (1, -1), (1, 1)
        positive = [short_m, short_p, long1, long2]
        simple = [short_m, long2]
        nilp = {
            short_m: g((0, 1, 1), (3, 2, -1)),
            short_p: g((0, 3, 1), (1, 2, 1)),
            long1: g((0, 2, 1)),
            long2: g((1, 3, 1)),
        }
        cor = {
            short_m: (1, -1, -1, 1),
            short_p: (1, 1, -1, -1),
            long1: (1, 0, -1, 0),
            long2: (0, 1, 0, -1),
        }
        return cls("C2", 2, 4, positive, simple, nilp, cor)

    @classmethod
    def from_label(cls, label: str) -> "RootDatum":
        label = label.strip().upper()
        if label == "C2":
            return cls.type_c2()
        if label.startswith("A") and label[1:].isdigit():
            return cls.type_a(int(label[1:]))
        raise FormatError(f"unknown group label {label!r}; use A1, A2, ... or C2")

    # -- roots ----------------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.positive_roots)

    @property
    def roots(self) -> list:
        return self.positive_roots + [_neg(a) for a in self.positive_roots]

    def is_positive(self, root: tuple) -> bool:
        return tuple(root) in self._nilpotents

    def contains(self, root: tuple) -> bool:
        root = tuple(root)
        return root in self._nilpotents or _neg(root) in self._nilpotents

    def nilpotent(self, root: tuple) -> list:
        """The generator X with u_root(c) = exp(c X); negatives via transpose."""
        root = tuple(root)
        if root in self._nilpotents:
            return self._nilpotents[root]
        neg = _neg(root)
        if neg in self._nilpotents:
            return grid_transpose(self._nilpotents[neg])
        raise FormatError(f"root {root} not in {self.label}")

    def coroot_exponents(self, root: tuple) -> tuple:
        root = tuple(root)
        if root in self._coroot_exp:
            return self._coroot_exp[root]
        neg = _neg(root)
        if neg in self._coroot_exp:
            return tuple(-v for v in self._coroot_exp[neg])
        raise FormatError(f"root {root} not in {self.label}")

    def exp_terms(self, root: tuple) -> list:
        """[X^0, X, X^2/2!, ...] up to the vanishing power of X."""
        root = tuple(root)
        if root not in self._exp_terms:
            terms = [grid_identity(self.dim)]
            power = self.nilpotent(root)
            k = 1
            fact = RAT_ONE
            while any(v for row in power for v in row):
                terms.append([[v / fact for v in row] for row in power])
                k += 1
                fact = fact * k
                power = grid_mul(power, self.nilpotent(root))
            self._exp_terms[root] = terms
        return self._exp_terms[root]

    # -- matrix builders -------------------------------------------------------

    def u(self, root: tuple, c):
        """exp(c * X_root) for c a ground scalar, RatFunc, or TSeries."""
        terms = self.exp_terms(root)
        if isinstance(c, TSeries):
            entries = [
                [TSeries.constant(RAT_ONE if i == j else RAT_ZERO, INF) for j in range(self.dim)]
                for i in range(self.dim)
            ]
            cpow = None
            for k in range(1, len(terms)):
                cpow = c if k == 1 else cpow * c
                grid = terms[k]
                for i in range(self.dim):
                    for j in range(self.dim):
                        v = grid[i][j]
                        if v:
                            entries[i][j] = entries[i][j] + cpow * v
            return TMatrix(entries)
        out = grid_identity(self.dim)
        cpow = None
        for k in range(1, len(terms)):
            cpow = c if k == 1 else cpow * c
            grid = terms[k]
            out = [
                [out[i][j] + cpow * grid[i][j] if grid[i][j] else out[i][j] for j in range(self.dim)]
                for i in range(self.dim)
            ]
        return out

    def coroot(self, root: tuple, c):
        """The cocharacter value: diagonal matrix with powers of c."""
        exps = self.coroot_exponents(root)
        if isinstance(c, TSeries):
            diag = []
            for e in exps:
                if e == 0:
                    diag.append(TSeries.constant(RAT_ONE, INF))
                else:
                    diag.append(c**e)
            return TMatrix(
                [
                    [diag[i] if i == j else TSeries.zero(INF) for j in range(self.dim)]
                    for i in range(self.dim)
                ]
            )
        if not c:
            raise NonInvertibleScalarError("coroot needs an invertible scalar")
        if any(e < 0 for e in exps):
            c_inv = _scalar_inv(c)
        out = grid_identity(self.dim)
        for i, e in enumerate(exps):
            v = RAT_ONE
            base = c if e > 0 else (c_inv if e < 0 else None)
            for _ in range(abs(e)):
                v = v * base
            out[i][i] = v
        return out

    def weyl_rep(self, root: tuple) -> list:
        """u_root(1) u_{-root}(-1) u_root(1), the reflection representative."""
        a = self.u(root, RAT_ONE)
        b = self.u(_neg(root), -RAT_ONE)
        return grid_mul(grid_mul(a, b), a)

    def weyl_rep_inv(self, root: tuple) -> list:
        a = self.u(root, -RAT_ONE)
        b = self.u(_neg(root), RAT_ONE)
        return grid_mul(grid_mul(a, b), a)


def _scalar_inv(c):
    if isinstance(c, RatFunc):
        return c.inv()
    return 1 / c


def check_reflection_identity(rd: RootDatum, root: tuple) -> bool:
    """u(f) u_-(-1/f) u(f) = coroot(f) * weyl_rep, for a formal invertible f.

    Run over the rational-function field with f the formal variable, so a
    pass is an identity of matrices over Q(f), not a sampled check.  The sign
    on the middle factor matters: with +1/f the product is not equal to the
    right-hand side in the standard representations.
    """
    f = RatFunc.x()
    lhs = grid_mul(
        grid_mul(rd.u(root, f), rd.u(_neg(root), -f.inv())),
        rd.u(root, f),
    )
    rhs = grid_mul(rd.coroot(root, f), rd.weyl_rep(root))
    return grid_eq(lhs, rhs)


@dataclass
class GenerationReport:
    """Outcome of the finite generation-hypothesis check."""

    ok: bool
    missing: list
    checked: int


def check_generation_hypotheses(rd: RootDatum, descriptors) -> GenerationReport:
    """Finite test that the realized local groups generate the full group.

    Requirements: for every simple root a, descriptors (a, one) and (-a, one)
    must be present (supplying the unipotent generators at constant argument);
    for every positive root a, descriptors (a, t) and (-a, t_inverse) must be
    present (supplying u_a(g) and u_{-a}(-1/g) for the transcendental g = t).
    """
    have = {(tuple(d.root), d.multiplier) for d in descriptors}
    missing = []
    checked = 0
    for alpha in rd.simple_roots:
        for want in ((alpha, MULT_ONE), (_neg(alpha), MULT_ONE)):
            checked += 1
            if want not in have:
                missing.append(want)
    for alpha in rd.positive_roots:
        for want in ((alpha, MULT_T), (_neg(alpha), MULT_T_INV)):
            checked += 1
            if want not in have:
                missing.append(want)
    return GenerationReport(ok=not missing, missing=missing, checked=checked)
