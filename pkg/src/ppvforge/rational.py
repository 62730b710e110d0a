"""Exact scalar arithmetic: rationals, polynomials, rational functions.

Everything downstream computes with values from this module, so the contracts
here are strict: no floats anywhere, canonical forms after every operation,
and denominators kept monic with gcd(num, den) = 1.

The coefficient ("ground") field is pluggable. Plain work happens over Q,
whose elements are `Rat` (gmpy2.mpq when available, stdlib Fraction
otherwise). Checks that need a formal constant adjoin one by using a RatFunc
in that constant as the ground element of an outer RatFunc, e.g. elements of
Q(a)(x) are RatFunc in x whose coefficients are RatFunc in a over Q. All
algorithms below only use field operations on ground values, so the nesting
costs nothing in generality.

Denominators are stored as an explicit multiset of monic linear factors
(x - q) plus a residual monic polynomial (almost always 1). Every pole the
pipeline creates sits at a known rational point, so cancellation against the
factored part is evaluation plus synthetic division rather than a polynomial
gcd. The residual part is reduced with a genuine gcd (subresultant PRS over
the integers for rational ground, monic Euclid otherwise). No factorization
over Q beyond gcd is ever attempted.
"""

from __future__ import annotations

import math
from typing import Iterable

from .errors import DivisionByZeroError

try:
    from gmpy2 import mpq as Rat
    from gmpy2 import mpz as _BigInt

    _HAVE_GMPY = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as Rat

    _BigInt = int
    _HAVE_GMPY = False

RAT_ZERO = Rat(0)
RAT_ONE = Rat(1)


def rat(value) -> Rat:
    """Coerce an int, string "p/q", or rational-like value to Rat."""
    if isinstance(value, type(RAT_ZERO)):
        return value
    if isinstance(value, (int, str)):
        return Rat(value)
    num = getattr(value, "numerator", None)
    if num is not None:
        return Rat(num, value.denominator)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rat_str(value) -> str:
    """Serialize a rational as the exact string "p/q" (denominator always kept)."""
    return f"{value.numerator}/{value.denominator}"


def _ground(c):
    """Normalize a prospective polynomial coefficient.

    ints become Rat; Rat, Fraction-like, and RatFunc values pass through
    (Fraction is converted so a polynomial never mixes backends).
    """
    if isinstance(c, (RatFunc, type(RAT_ZERO))):
        return c
    if isinstance(c, int):
        return Rat(c)
    num = getattr(c, "numerator", None)
    if num is not None:
        return Rat(num, c.denominator)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def _is_rat_ground(c) -> bool:
    return not isinstance(c, RatFunc)


def _ginv(c):
    """Multiplicative inverse of a ground element."""
    if not c:
        raise DivisionByZeroError("inverse of zero ground element")
    if isinstance(c, RatFunc):
        return c.inv()
    return RAT_ONE / c


_KRONECKER_MIN = 20


def _mul_rat_kronecker(a: list, b: list) -> list:
    """Product of two rational coefficient lists by Kronecker substitution.

    Clears denominators, packs each integer list into one big integer with
    enough bits per slot that neighboring coefficients cannot collide, and
    lets GMP do a single subquadratic multiplication. Slots are read back
    with a borrow pass because coefficients may be negative.
    """
    da = 1
    for c in a:
        da = math.lcm(da, int(c.denominator))
    db = 1
    for c in b:
        db = math.lcm(db, int(c.denominator))
    ia = [int(c.numerator) * (da // int(c.denominator)) for c in a]
    ib = [int(c.numerator) * (db // int(c.denominator)) for c in b]
    bound = max(map(abs, ia)) * max(map(abs, ib)) * min(len(ia), len(ib))
    shift = bound.bit_length() + 2
    pa = _BigInt(0)
    for v in reversed(ia):
        pa = (pa << shift) + v
    pb = _BigInt(0)
    for v in reversed(ib):
        pb = (pb << shift) + v
    prod = pa * pb
    mask = (1 << shift) - 1
    half = 1 << (shift - 1)
    wrap = 1 << shift
    dd = da * db
    out = []
    for _ in range(len(a) + len(b) - 1):
        d = prod & mask
        if d >= half:
            d -= wrap
        out.append(Rat(d, dd))
        prod = (prod - d) >> shift
    return out


class Poly:
    """Dense univariate polynomial, coefficients listed low to high.

    The zero polynomial has an empty coefficient list and degree -1.
    Instances are treated as immutable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = (), *, _trusted: bool = False):
        if _trusted:
            self.coeffs = coeffs
        else:
            cs = [_ground(c) for c in coeffs]
            while cs and not cs[-1]:
                cs.pop()
            self.coeffs = cs

    @classmethod
    def zero(cls) -> "Poly":
        return cls([], _trusted=True)

    @classmethod
    def one(cls) -> "Poly":
        return cls([RAT_ONE])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def linear(cls, q) -> "Poly":
        """The monic factor x - q."""
        return cls([-_ground(q), RAT_ONE])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            if len(self.coeffs) != len(other.coeffs):
                return False
            return all(a == b for a, b in zip(self.coeffs, other.coeffs))
        if isinstance(other, (int, type(RAT_ZERO))):
            return self == Poly([other])
        return NotImplemented

    def __hash__(self):
        return hash(tuple(_hashable(c) for c in self.coeffs))

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs], _trusted=True)

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        while out and not out[-1]:
            out.pop()
        return Poly(out, _trusted=True)

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero()
        if (
            len(a) >= _KRONECKER_MIN
            and len(b) >= _KRONECKER_MIN
            and all(_is_rat_ground(c) for c in a)
            and all(_is_rat_ground(c) for c in b)
        ):
            return Poly(_mul_rat_kronecker(a, b), _trusted=True)
        out = [RAT_ZERO] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if not ca:
                continue
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] = out[i + j] + ca * cb
        while out and not out[-1]:
            out.pop()
        return Poly(out, _trusted=True)

    def scale(self, c) -> "Poly":
        """Multiply every coefficient by the ground element c."""
        c = _ground(c)
        if not c:
            return Poly.zero()
        return Poly([ci * c for ci in self.coeffs], _trusted=True)

    def mul_xk(self, k: int) -> "Poly":
        if self.is_zero or k == 0:
            return self
        return Poly([RAT_ZERO] * k + list(self.coeffs), _trusted=True)

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __call__(self, point):
        """Evaluate by Horner's rule; `point` is a ground element."""
        acc = RAT_ZERO if _is_rat_ground(point) else point - point
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def deriv(self) -> "Poly":
        return Poly(
            [c * i for i, c in enumerate(self.coeffs) if i > 0], _trusted=True
        )

    def deflate(self, q):
        """Synthetic division by (x - q): returns (quotient, remainder value)."""
        if self.is_zero:
            return Poly.zero(), RAT_ZERO
        q = _ground(q)
        out = [RAT_ZERO] * (len(self.coeffs) - 1)
        acc = self.coeffs[-1]
        for i in range(len(self.coeffs) - 2, -1, -1):
            out[i] = acc
            acc = acc * q + self.coeffs[i]
        while out and not out[-1]:
            out.pop()
        return Poly(out, _trusted=True), acc

    def taylor(self, q, m: int) -> list:
        """First m coefficients of the expansion around x = q, by repeated deflation."""
        out = []
        p = self
        for _ in range(m):
            p, r = p.deflate(q)
            out.append(r)
        return out

    def divmod(self, other):
        """Exact long division over the coefficient field."""
        if other.is_zero:
            raise DivisionByZeroError("polynomial division by zero")
        if self.degree < other.degree:
            return Poly.zero(), self
        inv_lead = _ginv(other.leading)
        rem = list(self.coeffs)
        dq = len(self.coeffs) - len(other.coeffs)
        quo = [RAT_ZERO] * (dq + 1)
        for i in range(dq, -1, -1):
            c = rem[i + other.degree] * inv_lead
            quo[i] = c
            if c:
                for j, bc in enumerate(other.coeffs):
                    rem[i + j] = rem[i + j] - c * bc
        while rem and not rem[-1]:
            rem.pop()
        return Poly(quo, _trusted=True), Poly(rem, _trusted=True)

    def div_exact(self, other) -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero:
            raise ValueError("inexact polynomial division")
        return q

    def monic(self):
        """Return (leading coefficient, self / leading)."""
        lead = self.leading
        if lead == RAT_ONE:
            return lead, self
        return lead, self.scale(_ginv(lead))

    def __repr__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*x")
            else:
                parts.append(f"{c}*x^{i}")
        return " + ".join(parts)


def _hashable(c):
    if isinstance(c, RatFunc):
        return c._hash_key()
    return c


# ---------------------------------------------------------------------------
# Polynomial gcd.
#
# Rational ground coefficients go through a primitive subresultant PRS over
# the integers, which keeps intermediate coefficient sizes polynomial.
# Extension ground fields (tiny degrees in practice) use monic Euclid.
# ---------------------------------------------------------------------------


def _int_lists(p: Poly):
    """Scale a Q-coefficient polynomial to a primitive integer list."""
    den_lcm = 1
    for c in p.coeffs:
        den_lcm = math.lcm(den_lcm, int(c.denominator))
    ints = [int(c.numerator) * (den_lcm // int(c.denominator)) for c in p.coeffs]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    if ints and ints[-1] < 0:
        ints = [-v for v in ints]
    return ints


def _int_pseudo_rem(a: list, b: list) -> list:
    """Pseudo-remainder of integer coefficient lists, lc(b)^(da-db+1) * a mod b."""
    da, db = len(a) - 1, len(b) - 1
    lb = b[-1]
    rem = list(a)
    for i in range(da - db, -1, -1):
        c = rem[i + db]
        for j in range(len(rem)):
            rem[j] *= lb
        if c:
            for j in range(db + 1):
                rem[i + j] -= c * b[j]
        # the eliminated coefficient is exactly zero now
    rem = rem[:db]
    while rem and rem[-1] == 0:
        rem.pop()
    return rem


def _int_primitive(v: list) -> list:
    g = 0
    for c in v:
        g = math.gcd(g, c)
    if g > 1:
        v = [c // g for c in v]
    if v and v[-1] < 0:
        v = [-c for c in v]
    return v


def _gcd_int_path(a: Poly, b: Poly) -> Poly:
    A = _int_lists(a)
    B = _int_lists(b)
    if len(A) < len(B):
        A, B = B, A
    g = h = 1
    while True:
        if len(B) == 1:
            return Poly.one()
        d = (len(A) - 1) - (len(B) - 1)
        R = _int_pseudo_rem(A, B)
        if not R:
            break
        denom = g * h**d
        R = [c // denom for c in R]
        A, B = B, R
        g = A[-1]
        if d == 0:
            pass  # h unchanged when degrees drop by zero steps
        elif d == 1:
            h = abs(g)
        else:
            h = abs(g) ** d // h ** (d - 1)
    B = _int_primitive(B)
    lead = Rat(B[-1])
    return Poly([Rat(c) / lead for c in B])


def _gcd_generic(a: Poly, b: Poly) -> Poly:
    while not b.is_zero:
        _, r = a.divmod(b)
        a, b = b, r
    _, m = a.monic()
    return m


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the coefficient field."""
    if a.is_zero and b.is_zero:
        return Poly.zero()
    if a.is_zero:
        return b.monic()[1]
    if b.is_zero:
        return a.monic()[1]
    if a.degree == 0 or b.degree == 0:
        return Poly.one()
    if all(_is_rat_ground(c) for c in a.coeffs) and all(
        _is_rat_ground(c) for c in b.coeffs
    ):
        return _gcd_int_path(a, b)
    return _gcd_generic(a, b)


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero or b.is_zero:
        return Poly.zero()
    g = poly_gcd(a, b)
    return (a * b.div_exact(g)).monic()[1]


# ---------------------------------------------------------------------------
# Rational functions.
# ---------------------------------------------------------------------------


def _linear_power_mult(coeffs: list, q, k: int) -> list:
    """Multiply a coefficient list by (x - q)^k, one linear pass per power."""
    for _ in range(k):
        nxt = [RAT_ZERO] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            if c:
                nxt[i + 1] = nxt[i + 1] + c
                nxt[i] = nxt[i] - q * c
        coeffs = nxt
    return coeffs


class RatFunc:
    """Reduced rational function num/den with monic denominator.

    The denominator is carried as `fac` (a dict mapping a ground point q to
    the multiplicity of the monic factor x - q) times `rest` (a monic Poly
    holding whatever was never seen in factored form). The materialized
    denominator is cached. Public semantics never depend on how the
    denominator happens to be split: equality, hashing, and serialization
    all go through the canonical (num, den) pair, which is unique because
    gcd(num, den) = 1 and den is monic.
    """

    __slots__ = ("num", "fac", "rest", "_den", "_hash")

    def __init__(self, num=None, den=None, *, pole_hints=()):
        """Build num/den from polynomials (or coefficient lists).

        pole_hints lists points whose linear factors should be split out of
        the denominator; deserialization passes the construction points so
        later arithmetic stays cheap.
        """
        if num is None:
            num = Poly.zero()
        if not isinstance(num, Poly):
            num = Poly([num]) if not isinstance(num, (list, tuple)) else Poly(num)
        if den is None:
            den = Poly.one()
        if not isinstance(den, Poly):
            den = Poly([den]) if not isinstance(den, (list, tuple)) else Poly(den)
        if den.is_zero:
            raise DivisionByZeroError("rational function with zero denominator")
        lead, den = den.monic()
        if lead != RAT_ONE:
            num = num.scale(_ginv(lead))
        fac = {}
        for q in pole_hints:
            q = _ground(q)
            while den.degree > 0:
                quo, r = den.deflate(q)
                if r:
                    break
                den = quo
                fac[q] = fac.get(q, 0) + 1
        built = RatFunc._build(num, fac, den)
        self.num = built.num
        self.fac = built.fac
        self.rest = built.rest
        self._den = built._den
        self._hash = built._hash

    @classmethod
    def _raw(cls, num: Poly, fac: dict, rest: Poly) -> "RatFunc":
        """Trusted constructor: invariants are the caller's responsibility."""
        self = object.__new__(cls)
        self.num = num
        self.fac = fac
        self.rest = rest
        self._den = None
        self._hash = None
        return self

    @classmethod
    def _build(cls, num: Poly, fac: dict, rest: Poly) -> "RatFunc":
        """Normalize: cancel factors against num, reduce rest, fix zero."""
        if num.is_zero:
            return cls._raw(Poly.zero(), {}, Poly.one())
        out_fac = {}
        for q, e in fac.items():
            while e > 0:
                quo, r = num.deflate(q)
                if r:
                    break
                num = quo
                e -= 1
            if e:
                out_fac[q] = e
        if rest.degree > 0:
            g = poly_gcd(num, rest)
            if g.degree > 0:
                num = num.div_exact(g)
                rest = rest.div_exact(g)
        return cls._raw(num, out_fac, rest)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "RatFunc":
        return cls._raw(Poly.zero(), {}, Poly.one())

    @classmethod
    def one(cls) -> "RatFunc":
        return cls._raw(Poly.one(), {}, Poly.one())

    @classmethod
    def from_ground(cls, c) -> "RatFunc":
        c = _ground(c)
        if not c:
            return cls.zero()
        return cls._raw(Poly([c], _trusted=True), {}, Poly.one())

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls._raw(p, {}, Poly.one())

    @classmethod
    def x(cls) -> "RatFunc":
        return cls.from_poly(Poly.x())

    @classmethod
    def linear_pole(cls, q, power: int = 1, coeff=1) -> "RatFunc":
        """coeff / (x - q)^power, the basic principal-part building block."""
        coeff = _ground(coeff)
        if not coeff:
            return cls.zero()
        if power < 1:
            raise ValueError("pole order must be >= 1")
        return cls._raw(Poly([coeff]), {_ground(q): power}, Poly.one())

    # -- structure ---------------------------------------------------------

    @property
    def den(self) -> Poly:
        """The materialized monic denominator (cached)."""
        if self._den is None:
            d = self.rest
            for q, e in self.fac.items():
                d = d * Poly.linear(q) ** e
            self._den = d
        return self._den

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.degree <= 0 and not self.fac and self.rest.degree <= 0

    def as_ground(self):
        """Extract the ground value of a constant rational function."""
        if not self.is_constant:
            raise ValueError("not a constant")
        return self.num.coeffs[0] if self.num.coeffs else RAT_ZERO

    @property
    def num_degree(self) -> int:
        return self.num.degree

    @property
    def den_degree(self) -> int:
        return self.rest.degree + sum(self.fac.values())

    def __bool__(self) -> bool:
        return not self.num.is_zero

    def _hash_key(self):
        if self._hash is None:
            self._hash = hash(
                (
                    tuple(_hashable(c) for c in self.num.coeffs),
                    tuple(_hashable(c) for c in self.den.coeffs),
                )
            )
        return self._hash

    def __hash__(self):
        return self._hash_key()

    def __eq__(self, other) -> bool:
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        # canonical reduced forms are unique, so structural comparison of
        # num and materialized den is full value equality
        return self.num == other.num and self.den == other.den

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "RatFunc":
        return RatFunc._raw(-self.num, dict(self.fac), self.rest)

    def __add__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        fac = dict(self.fac)
        for q, e in other.fac.items():
            fac[q] = max(fac.get(q, 0), e)
        # complements: common_den / own_den, assembled factor by factor
        a_comp = Poly.one()
        b_comp = Poly.one()
        for q, e in fac.items():
            da = e - self.fac.get(q, 0)
            db = e - other.fac.get(q, 0)
            if da:
                a_comp = a_comp * Poly.linear(q) ** da
            if db:
                b_comp = b_comp * Poly.linear(q) ** db
        if self.rest.degree <= 0 and other.rest.degree <= 0:
            rest = Poly.one()
        elif self.rest == other.rest:
            rest = self.rest
        else:
            g = poly_gcd(self.rest, other.rest)
            rest = self.rest * other.rest.div_exact(g)
            a_comp = a_comp * other.rest.div_exact(g)
            b_comp = b_comp * self.rest.div_exact(g)
        num = self.num * a_comp + other.num * b_comp
        return RatFunc._build(num, fac, rest)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return RatFunc.zero()
        fac = dict(self.fac)
        for q, e in other.fac.items():
            fac[q] = fac.get(q, 0) + e
        if other.rest.degree <= 0:
            rest = self.rest
        elif self.rest.degree <= 0:
            rest = other.rest
        else:
            rest = self.rest * other.rest
        return RatFunc._build(self.num * other.num, fac, rest)

    def __rmul__(self, other):
        return self.__mul__(other)

    @classmethod
    def dot(cls, pairs) -> "RatFunc":
        """Exact sum of products a*b over one shared denominator.

        Same value as sum(a * b for a, b in pairs), but the common
        denominator is assembled once and the result is reduced once, so the
        inner loops of matrix products and series convolutions do not pay a
        full normalization at every partial sum.
        """
        terms = []
        fac_all = {}
        rest_all = None
        for a, b in pairs:
            if a.is_zero or b.is_zero:
                continue
            f = dict(a.fac)
            for q, e in b.fac.items():
                f[q] = f.get(q, 0) + e
            if b.rest.degree <= 0:
                r = a.rest
            elif a.rest.degree <= 0:
                r = b.rest
            else:
                r = a.rest * b.rest
            terms.append((a.num, b.num, f, r))
            for q, e in f.items():
                if e > fac_all.get(q, 0):
                    fac_all[q] = e
            if r.degree > 0:
                if rest_all is None or rest_all == r:
                    rest_all = r
                else:
                    g = poly_gcd(rest_all, r)
                    rest_all = rest_all * r.div_exact(g)
        if not terms:
            return cls.zero()
        if rest_all is None:
            rest_all = Poly.one()
        num_total = Poly.zero()
        comp_cache = {}
        for na, nb, f, r in terms:
            t = na * nb
            key = tuple(e - f.get(q, 0) for q, e in fac_all.items())
            comp = comp_cache.get(key)
            if comp is None:
                cs = [RAT_ONE]
                for (q, e), d in zip(fac_all.items(), key):
                    if d:
                        cs = _linear_power_mult(cs, q, d)
                comp = Poly(cs, _trusted=True) if len(cs) > 1 else None
                comp_cache[key] = comp
            if comp is not None:
                t = t * comp
            if rest_all.degree > 0 and r != rest_all:
                t = t * rest_all.div_exact(r)
            num_total = num_total + t
        return cls._build(num_total, fac_all, rest_all)

    def inv(self) -> "RatFunc":
        if self.is_zero:
            raise DivisionByZeroError("inverse of the zero rational function")
        den = self.den
        lead, new_rest = self.num.monic()
        num = den.scale(_ginv(lead))
        # num and den were coprime, so no cancellation is possible here
        return RatFunc._raw(num, {}, new_rest)

    def __truediv__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inv()

    def __pow__(self, n: int) -> "RatFunc":
        if n == 0:
            return RatFunc.one()
        base = self if n > 0 else self.inv()
        n = abs(n)
        out = RatFunc.one()
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def dx(self) -> "RatFunc":
        """Derivative in the main variable (quotient rule, factored form)."""
        if self.num.is_zero:
            return RatFunc.zero()
        if not self.fac and self.rest.degree <= 0:
            return RatFunc._raw(self.num.deriv(), {}, Poly.one())
        n, r = self.num, self.rest
        # d(n / (prod (x-q)^e * r)) has denominator prod (x-q)^(e+1) * r^2 with
        # numerator (n' r - n r') L - n r sum_q e_q L_q, L = prod (x-q), L_q = L/(x-q)
        qs = list(self.fac.keys())
        lin = [Poly.linear(q) for q in qs]
        L = Poly.one()
        for p in lin:
            L = L * p
        core = n.deriv() * r - n * r.deriv()
        num = core * L
        nr = n * r
        for idx, q in enumerate(qs):
            Lq = Poly.one()
            for jdx, p in enumerate(lin):
                if jdx != idx:
                    Lq = Lq * p
            num = num - (nr * Lq).scale(self.fac[q])
        fac = {q: e + 1 for q, e in self.fac.items()}
        rest = r * r if r.degree > 0 else Poly.one()
        return RatFunc._build(num, fac, rest)

    # -- local analysis ----------------------------------------------------

    def regular_at(self, q) -> bool:
        """True when the value has no pole at x = q."""
        q = _ground(q)
        if q in self.fac:
            return False
        if self.rest.degree > 0 and not self.rest(q):
            return False
        return True

    def pole_order_at(self, q) -> int:
        q = _ground(q)
        k = self.fac.get(q, 0)
        r = self.rest
        while r.degree > 0:
            quo, rem = r.deflate(q)
            if rem:
                break
            r = quo
            k += 1
        return k

    def evaluate(self, point):
        """Exact value at x = point (ground element); raises on a pole."""
        point = _ground(point)
        dv = self.rest(point)
        for q, e in self.fac.items():
            dv = dv * (point - q) ** e
        if not dv:
            raise DivisionByZeroError(f"evaluation at a pole x = {point}")
        return self.num(point) * _ginv(dv)

    def laurent_at(self, q, hi: int):
        """Exact Laurent expansion around x = q.

        Returns (lo, coeffs) with coeffs[j] the coefficient of (x - q)^(lo + j),
        covering exponents lo..hi where lo = -pole_order_at(q).
        """
        q = _ground(q)
        k = self.pole_order_at(q)
        lo = -k
        m = hi - lo + 1
        if m <= 0:
            return lo, []
        num_t = self.num.taylor(q, m)
        g = self.rest
        fac = dict(self.fac)
        extra = k - fac.pop(q, 0)
        for _ in range(extra):
            g, rem = g.deflate(q)
            assert not rem
        for p, e in fac.items():
            g = g * Poly.linear(p) ** e
        g_t = g.taylor(q, m)
        inv0 = _ginv(g_t[0])
        out = []
        for j in range(m):
            acc = num_t[j]
            for i in range(j):
                acc = acc - out[i] * g_t[j - i]
            out.append(acc * inv0)
        return lo, out

    def residue(self, q):
        """Coefficient of 1/(x - q) in the expansion at q."""
        k = self.pole_order_at(q)
        if k == 0:
            return RAT_ZERO
        lo, coeffs = self.laurent_at(q, -1)
        return coeffs[-1 - lo]

    def principal_part(self, q) -> list:
        """Coefficients [c_1, ..., c_k] of sum_j c_j / (x - q)^j at q (no constant)."""
        k = self.pole_order_at(q)
        if k == 0:
            return []
        lo, coeffs = self.laurent_at(q, -1)
        return [coeffs[-j - lo] for j in range(1, k + 1)]

    def map_ground(self, fn) -> "RatFunc":
        """Apply fn to every ground value (coefficients and factor points)."""
        num = Poly([fn(c) for c in self.num.coeffs])
        fac = {fn(q): e for q, e in self.fac.items()}
        rest = Poly([fn(c) for c in self.rest.coeffs])
        return RatFunc._build(num, fac, rest)

    def __repr__(self) -> str:
        if self.is_zero:
            return "RatFunc(0)"
        den = self.den
        if den.degree <= 0:
            return f"RatFunc({self.num})"
        return f"RatFunc(({self.num}) / ({den}))"


def _coerce_rf(value):
    if isinstance(value, RatFunc):
        return value
    if isinstance(value, Poly):
        return RatFunc.from_poly(value)
    if isinstance(value, int) or hasattr(value, "denominator"):
        try:
            return RatFunc.from_ground(value)
        except TypeError:
            return NotImplemented
    return NotImplemented


def principal_part_ratfunc(q, coeffs) -> RatFunc:
    """Assemble sum_j coeffs[j-1] / (x - q)^j as a RatFunc."""
    q = _ground(q)
    out = RatFunc.zero()
    for j, c in enumerate(coeffs, start=1):
        if c:
            out = out + RatFunc.linear_pole(q, j, c)
    return out


def partial_fractions(a: RatFunc, points):
    """Split off the principal parts of `a` at each of the given points.

    Returns (parts, rest) where parts maps a point q to the coefficient list
    [c_1, ..., c_k] of its principal part (c_j multiplying (x - q)^(-j), no
    constant term) and rest = a - sum of all listed principal parts. The
    subtraction is exact, so rest carries whatever `a` has away from the
    points: its polynomial part and any pole not listed.
    """
    parts = {}
    acc = a
    for q in points:
        cs = a.principal_part(q)
        if cs:
            parts[_ground(q)] = cs
            acc = acc - principal_part_ratfunc(q, cs)
    return parts, acc
