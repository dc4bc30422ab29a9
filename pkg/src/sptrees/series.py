"""Exact truncated power series arithmetic.

Two coefficient rings are supported:

* ``Fraction`` for univariate series (in x at a fixed edge weight, or in
  the excess variable u);
* ``TruncPoly``, a dense truncated polynomial over Q, for bivariate
  series.  A bivariate EGF ``sum c[n][m] x^n y^m`` is stored as a series
  in x whose coefficients are truncated polynomials in y.

All coefficients are exact rationals; nothing in this module touches
floating point.  Truncation of a binary operation is the minimum of the
operand truncation orders.

``TruncPoly`` keeps one common denominator per polynomial so that the
inner loops of polynomial multiplication run on plain Python integers.
Counting series have denominators that divide n! times a small factor,
so normalising with a single gcd after each operation keeps sizes tame.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union


class SeriesError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Truncated polynomials over Q (used for the y direction and for jets)


class TruncPoly:
    """Dense polynomial num[0..trunc]/den over Q, truncated beyond ``trunc``."""

    __slots__ = ("den", "nums", "trunc")

    def __init__(self, den: int, nums: Sequence[int], trunc: int, _norm: bool = True):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        nums = list(nums[: trunc + 1])
        if len(nums) < trunc + 1:
            nums.extend([0] * (trunc + 1 - len(nums)))
        if _norm:
            if den < 0:
                den = -den
                nums = [-v for v in nums]
            g = den
            for v in nums:
                if v:
                    g = gcd(g, v)
                    if g == 1:
                        break
            if g > 1:
                den //= g
                nums = [v // g for v in nums]
            if all(v == 0 for v in nums):
                den = 1
        self.den = den
        self.nums = nums
        self.trunc = trunc

    # -- constructors

    @classmethod
    def zero(cls, trunc: int) -> "TruncPoly":
        return cls(1, [0] * (trunc + 1), trunc, _norm=False)

    @classmethod
    def one(cls, trunc: int) -> "TruncPoly":
        return cls(1, [1] + [0] * trunc, trunc, _norm=False)

    @classmethod
    def variable(cls, trunc: int) -> "TruncPoly":
        if trunc < 1:
            raise SeriesError("y truncation too small to hold y itself")
        nums = [0] * (trunc + 1)
        nums[1] = 1
        return cls(1, nums, trunc, _norm=False)

    @classmethod
    def from_fraction(cls, c: Union[Fraction, int], trunc: int) -> "TruncPoly":
        c = Fraction(c)
        nums = [c.numerator] + [0] * trunc
        return cls(c.denominator, nums, trunc)

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Union[Fraction, int]], trunc: int) -> "TruncPoly":
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for f in fr:
            den = den * f.denominator // gcd(den, f.denominator)
        nums = [int(f * den) for f in fr]
        return cls(den, nums, trunc)

    # -- queries

    def coeff(self, m: int) -> Fraction:
        if m < 0 or m > self.trunc:
            return Fraction(0)
        return Fraction(self.nums[m], self.den)

    def coeffs(self) -> list[Fraction]:
        return [Fraction(v, self.den) for v in self.nums]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.nums)

    def degree_bound(self) -> int:
        for m in range(self.trunc, -1, -1):
            if self.nums[m]:
                return m
        return -1

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncPoly):
            return NotImplemented
        return self.trunc == other.trunc and self.den == other.den and self.nums == other.nums

    def __hash__(self):
        return hash((self.den, tuple(self.nums)))

    def __repr__(self) -> str:
        terms = [f"({v}/{self.den})y^{m}" for m, v in enumerate(self.nums) if v]
        return " + ".join(terms) if terms else "0"

    # -- ring operations

    def _aligned(self, other: "TruncPoly"):
        t = min(self.trunc, other.trunc)
        d1, d2 = self.den, other.den
        g = gcd(d1, d2)
        den = d1 // g * d2
        m1 = den // d1
        m2 = den // d2
        return t, den, m1, m2

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncPoly.from_fraction(other, self.trunc)
        if not isinstance(other, TruncPoly):
            return NotImplemented
        t, den, m1, m2 = self._aligned(other)
        nums = [self.nums[i] * m1 + other.nums[i] * m2 for i in range(t + 1)]
        return TruncPoly(den, nums, t)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncPoly.from_fraction(other, self.trunc)
        if not isinstance(other, TruncPoly):
            return NotImplemented
        t, den, m1, m2 = self._aligned(other)
        nums = [self.nums[i] * m1 - other.nums[i] * m2 for i in range(t + 1)]
        return TruncPoly(den, nums, t)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return TruncPoly(self.den, [-v for v in self.nums], self.trunc, _norm=False)

    def __mul__(self, other):
        if isinstance(other, int):
            return TruncPoly(self.den, [v * other for v in self.nums], self.trunc)
        if isinstance(other, Fraction):
            return TruncPoly(self.den * other.denominator,
                             [v * other.numerator for v in self.nums], self.trunc)
        if not isinstance(other, TruncPoly):
            return NotImplemented
        t = min(self.trunc, other.trunc)
        a, b = self.nums, other.nums
        da = self.degree_bound()
        out = [0] * (t + 1)
        for i in range(min(da, t) + 1):
            ai = a[i]
            if not ai:
                continue
            hi = t - i
            for j, bj in enumerate(b[: hi + 1]):
                if bj:
                    out[i + j] += ai * bj
        return TruncPoly(self.den * other.den, out, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            return TruncPoly(self.den * other, self.nums, self.trunc)
        if isinstance(other, Fraction):
            return self * Fraction(other.denominator, other.numerator)
        if isinstance(other, TruncPoly):
            return self * other.reciprocal()
        return NotImplemented

    def reciprocal(self) -> "TruncPoly":
        """Inverse in Q[y]/(y^{trunc+1}); the constant term must be nonzero."""
        if self.nums[0] == 0:
            raise SeriesError("reciprocal of polynomial with zero constant term")
        t = self.trunc
        c0 = Fraction(self.nums[0], self.den)
        inv0 = 1 / c0
        out = [inv0] + [Fraction(0)] * t
        a = self.coeffs()
        for m in range(1, t + 1):
            acc = Fraction(0)
            for k in range(1, m + 1):
                if self.nums[k]:
                    acc += a[k] * out[m - k]
            out[m] = -inv0 * acc
        return TruncPoly.from_coeffs(out, t)

    # -- calculus in y

    def diff(self) -> "TruncPoly":
        """d/dy; the truncation drops by one (the top coefficient is unknown)."""
        if self.trunc == 0:
            raise SeriesError("cannot differentiate a degree-0 truncation")
        nums = [self.nums[m] * m for m in range(1, self.trunc + 1)]
        return TruncPoly(self.den, nums, self.trunc - 1)

    def integrate(self) -> "TruncPoly":
        """Antiderivative from 0 with zero constant term; truncation grows by one."""
        coeffs = [Fraction(0)] + [Fraction(self.nums[m], self.den * (m + 1))
                                  for m in range(self.trunc + 1)]
        return TruncPoly.from_coeffs(coeffs, self.trunc + 1)

    def eval_at(self, r: Union[Fraction, int]) -> Fraction:
        r = Fraction(r)
        acc = Fraction(0)
        for v in reversed(self.nums):
            acc = acc * r + v
        return acc / self.den


Coeff = Union[Fraction, TruncPoly]


def _czero(template: Coeff):
    if isinstance(template, TruncPoly):
        return TruncPoly.zero(template.trunc)
    return Fraction(0)


def _cone(template: Coeff):
    if isinstance(template, TruncPoly):
        return TruncPoly.one(template.trunc)
    return Fraction(1)


def _cinv(c: Coeff):
    if isinstance(c, TruncPoly):
        return c.reciprocal()
    if c == 0:
        raise SeriesError("inverse of zero coefficient")
    return 1 / c


def _ciszero(c: Coeff) -> bool:
    if isinstance(c, TruncPoly):
        return c.is_zero()
    return c == 0


# ---------------------------------------------------------------------------
# Truncated power series in one main variable


class Series:
    """Dense truncated power series ``sum coeffs[n] * var^n`` for n <= trunc.

    ``coeffs`` entries are Fractions (univariate) or TruncPolys
    (bivariate in y).  ``var`` is a purely informational tag.
    """

    __slots__ = ("coeffs", "trunc", "var")

    def __init__(self, coeffs: Sequence[Coeff], trunc: int, var: str = "x"):
        coeffs = list(coeffs[: trunc + 1])
        if not coeffs:
            raise SeriesError("series needs at least the constant coefficient")
        template = coeffs[0]
        while len(coeffs) < trunc + 1:
            coeffs.append(_czero(template))
        self.coeffs = coeffs
        self.trunc = trunc
        self.var = var

    # -- constructors

    @classmethod
    def zero(cls, trunc: int, ycap: int | None = None, var: str = "x") -> "Series":
        c0 = TruncPoly.zero(ycap) if ycap is not None else Fraction(0)
        return cls([c0], trunc, var)

    @classmethod
    def one(cls, trunc: int, ycap: int | None = None, var: str = "x") -> "Series":
        s = cls.zero(trunc, ycap, var)
        s.coeffs[0] = _cone(s.coeffs[0])
        return s

    @classmethod
    def variable(cls, trunc: int, ycap: int | None = None, var: str = "x") -> "Series":
        if trunc < 1:
            raise SeriesError("truncation too small to hold the variable")
        s = cls.zero(trunc, ycap, var)
        s.coeffs[1] = _cone(s.coeffs[0])
        return s

    @classmethod
    def constant(cls, c: Union[Fraction, int], trunc: int, ycap: int | None = None,
                 var: str = "x") -> "Series":
        s = cls.zero(trunc, ycap, var)
        if ycap is not None:
            s.coeffs[0] = TruncPoly.from_fraction(c, ycap)
        else:
            s.coeffs[0] = Fraction(c)
        return s

    @classmethod
    def y_variable(cls, trunc: int, ycap: int, var: str = "x") -> "Series":
        s = cls.zero(trunc, ycap, var)
        s.coeffs[0] = TruncPoly.variable(ycap)
        return s

    @classmethod
    def from_fractions(cls, coeffs: Iterable[Union[Fraction, int]], trunc: int,
                       var: str = "x") -> "Series":
        return cls([Fraction(c) for c in coeffs], trunc, var)

    # -- queries

    @property
    def ycap(self) -> int | None:
        c0 = self.coeffs[0]
        return c0.trunc if isinstance(c0, TruncPoly) else None

    @property
    def is_bivariate(self) -> bool:
        return isinstance(self.coeffs[0], TruncPoly)

    def coeff(self, n: int) -> Coeff:
        if n < 0 or n > self.trunc:
            return _czero(self.coeffs[0])
        return self.coeffs[n]

    def coeff_nm(self, n: int, m: int) -> Fraction:
        c = self.coeff(n)
        if isinstance(c, TruncPoly):
            return c.coeff(m)
        raise SeriesError("coeff_nm needs a bivariate series")

    def count(self, n: int) -> Fraction:
        """n! times the x^n coefficient (bivariate input must be specialised first)."""
        c = self.coeff(n)
        if isinstance(c, TruncPoly):
            raise SeriesError("specialise y before extracting counts")
        f = 1
        for k in range(2, n + 1):
            f *= k
        return c * f

    def is_zero(self) -> bool:
        return all(_ciszero(c) for c in self.coeffs)

    def order(self) -> int:
        """Index of the first nonzero coefficient; trunc+1 if identically zero."""
        for n, c in enumerate(self.coeffs):
            if not _ciszero(c):
                return n
        return self.trunc + 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        t = min(self.trunc, other.trunc)
        return all(_ciszero(self.coeff(n) - other.coeff(n)) for n in range(t + 1))

    def __repr__(self) -> str:
        shown = [f"({c!r})*{self.var}^{n}" for n, c in enumerate(self.coeffs[:6])
                 if not _ciszero(c)]
        tail = " + ..." if self.trunc > 5 else ""
        return f"Series[{' + '.join(shown) or '0'}{tail}; trunc={self.trunc}]"

    # -- ring operations

    def _pair(self, other: "Series") -> int:
        if self.is_bivariate != other.is_bivariate:
            raise SeriesError("mixed univariate/bivariate arithmetic")
        return min(self.trunc, other.trunc)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Series.constant(other, self.trunc, self.ycap, self.var)
        t = self._pair(other)
        return Series([self.coeffs[n] + other.coeffs[n] for n in range(t + 1)], t, self.var)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Series.constant(other, self.trunc, self.ycap, self.var)
        t = self._pair(other)
        return Series([self.coeffs[n] - other.coeffs[n] for n in range(t + 1)], t, self.var)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Series([-c for c in self.coeffs], self.trunc, self.var)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Series([c * other for c in self.coeffs], self.trunc, self.var)
        t = self._pair(other)
        z = _czero(self.coeffs[0])
        lo_a = self.order()
        lo_b = other.order()
        out = [z] * (t + 1)
        for i in range(lo_a, t + 1 - lo_b):
            a = self.coeffs[i]
            if _ciszero(a):
                continue
            for j in range(lo_b, t + 1 - i):
                b = other.coeffs[j]
                if not _ciszero(b):
                    out[i + j] = out[i + j] + a * b
        return Series(out, t, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            return self * Fraction(1, other)
        if isinstance(other, Fraction):
            return self * (1 / other)
        if isinstance(other, Series):
            return self * other.reciprocal()
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise SeriesError("only nonnegative integer powers")
        result = Series.one(self.trunc, self.ycap, self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def reciprocal(self) -> "Series":
        """Multiplicative inverse; the constant term must be a unit."""
        c0 = self.coeffs[0]
        if _ciszero(c0):
            raise SeriesError("reciprocal of series with zero constant term")
        inv0 = _cinv(c0)
        t = self.trunc
        out = [inv0] + [_czero(c0)] * t
        for n in range(1, t + 1):
            acc = _czero(c0)
            for k in range(1, n + 1):
                if not _ciszero(self.coeffs[k]):
                    acc = acc + self.coeffs[k] * out[n - k]
            out[n] = -(inv0 * acc)
        return Series(out, t, self.var)

    def exp(self) -> "Series":
        """exp of a series with zero constant term, via E' = a'E termwise."""
        if not _ciszero(self.coeffs[0]):
            raise SeriesError("exp needs a zero constant term")
        t = self.trunc
        one = _cone(self.coeffs[0])
        out = [one] + [_czero(self.coeffs[0])] * t
        for n in range(1, t + 1):
            acc = _czero(self.coeffs[0])
            for k in range(1, n + 1):
                if not _ciszero(self.coeffs[k]):
                    acc = acc + (self.coeffs[k] * k) * out[n - k]
            out[n] = acc / n
        return Series(out, t, self.var)

    def compose(self, inner: "Series") -> "Series":
        """Substitute ``inner`` (zero constant term) into the main variable."""
        if not _ciszero(inner.coeffs[0]):
            raise SeriesError("composition needs inner series with zero constant term")
        t = min(self.trunc, inner.trunc)
        acc = Series.constant(0, t, inner.ycap, inner.var)
        if self.is_bivariate != inner.is_bivariate:
            raise SeriesError("mixed univariate/bivariate composition")
        for k in range(min(self.trunc, t), -1, -1):
            acc = acc * inner
            ck = self.coeffs[k]
            acc.coeffs[0] = acc.coeffs[0] + ck
        return acc

    # -- calculus

    def diff_main(self) -> "Series":
        """d/dvar; the truncation drops by one."""
        t = self.trunc
        if t == 0:
            raise SeriesError("cannot differentiate an order-0 truncation")
        out = [self.coeffs[n] * n for n in range(1, t + 1)]
        return Series(out, t - 1, self.var)

    def integrate_main(self) -> "Series":
        """Antiderivative from 0; the truncation grows by one."""
        t = self.trunc
        out = [_czero(self.coeffs[0])]
        out.extend(self.coeffs[n] / (n + 1) for n in range(t + 1))
        return Series(out, t + 1, self.var)

    def xmul(self, k: int = 1) -> "Series":
        """Multiply by var^k."""
        t = self.trunc
        z = _czero(self.coeffs[0])
        return Series([z] * k + self.coeffs[: t + 1 - k], t, self.var)

    def xdiv(self, k: int = 1) -> "Series":
        """Exact division by var^k; the k lowest coefficients must vanish.

        The truncation drops by k: only orders up to trunc-k of the
        quotient are determined by the stored coefficients.
        """
        for n in range(k):
            if not _ciszero(self.coeffs[n]):
                raise SeriesError(f"inexact division by {self.var}^{k}")
        t = self.trunc - k
        if t < 0:
            raise SeriesError("truncation too small for division")
        return Series(self.coeffs[k:], t, self.var)

    def log(self) -> "Series":
        """log of a series with unit constant term, via L' = a'/a termwise."""
        c0 = self.coeffs[0]
        if _ciszero(c0 - _cone(c0)):
            return (self.diff_main() * self.reciprocal()).integrate_main()
        raise SeriesError("log needs constant term exactly one")

    def diff_y(self) -> "Series":
        return Series([c.diff() for c in self._ycoeffs()], self.trunc, self.var)

    def integrate_y(self) -> "Series":
        return Series([c.integrate() for c in self._ycoeffs()], self.trunc, self.var)

    def eval_y(self, r: Union[Fraction, int]) -> "Series":
        return Series([c.eval_at(r) for c in self._ycoeffs()], self.trunc, self.var)

    def _ycoeffs(self) -> list[TruncPoly]:
        if not self.is_bivariate:
            raise SeriesError("y operation on a univariate series")
        return self.coeffs  # type: ignore[return-value]

    def truncate(self, trunc: int) -> "Series":
        if trunc >= self.trunc:
            return self
        return Series(self.coeffs[: trunc + 1], trunc, self.var)

    def reduce_ycap(self, ycap: int) -> "Series":
        """Drop y-orders above ``ycap`` (a legal quotient-ring projection)."""
        cs = self._ycoeffs()
        if ycap >= cs[0].trunc:
            return self
        return Series([TruncPoly(c.den, c.nums[: ycap + 1], ycap) for c in cs],
                      self.trunc, self.var)

    def map_coeffs(self, fn) -> "Series":
        return Series([fn(c) for c in self.coeffs], self.trunc, self.var)


# ---------------------------------------------------------------------------
# Rooted labelled trees: W(x) = x exp(W(x))


def tree_function(trunc: int) -> Series:
    """EGF of rooted labelled trees; [x^n] W = n^(n-1)/n!.

    Built from the Cayley closed form, then certified against the
    functional equation (the residual check is the whole point: the
    closed form and the grammar route must agree exactly).
    """
    coeffs = [Fraction(0)]
    fact = 1
    for n in range(1, trunc + 1):
        fact *= n
        coeffs.append(Fraction(n ** (n - 1), fact))
    w = Series(coeffs, trunc, var="x")
    res = tree_function_residual(w)
    if not res.is_zero():
        raise SeriesError("tree function fails its defining equation")
    return w


def tree_function_residual(w: Series) -> Series:
    """W - x*exp(W); identically zero for the tree EGF."""
    x = Series.variable(w.trunc, var=w.var)
    return w - x * w.exp()
