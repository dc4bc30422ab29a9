"""Truncated power series over arbitrary-precision floats.

The numeric counterpart of the exact series module: coefficients are
mpmath floats, truncation is structural (a fixed number of retained
orders), and the intended uses are

* jets: Taylor coefficients of implicit functions at a regular point,
  giving derivatives for the composition scheme;
* Puiseux data: expansions in X = sqrt(1 - x/rho) at a square-root
  branch point, solved coefficient by coefficient.

Implicit solving never hand-codes a derivative: scalar equations are
solved by a secant/bisection hybrid, series coefficients drop out of
two-point evaluations (each unknown coefficient enters the relevant
residual coefficient affinely, quadratically only for the leading
Puiseux term), and multivariate Newton uses finite-difference
Jacobians, whose accuracy only affects the convergence rate, not the
limit.
"""

from __future__ import annotations

from typing import Callable, Sequence

from mpmath import mp


class TSeries:
    """Dense truncated series sum c[i] t^i with mpf/mpc coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence):
        self.c = [mp.mpf(x) if not isinstance(x, (mp.mpf, mp.mpc)) else x
                  for x in coeffs]
        if not self.c:
            raise ValueError("empty coefficient list")

    @classmethod
    def const(cls, value, order: int) -> "TSeries":
        return cls([value] + [mp.mpf(0)] * order)

    @classmethod
    def var(cls, value, order: int) -> "TSeries":
        """value + t, as a jet of the given order."""
        c = [mp.mpf(value)] + [mp.mpf(0)] * order
        if order >= 1:
            c[1] = mp.mpf(1)
        return cls(c)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    def __repr__(self):
        return "TSeries(%s)" % ", ".join(mp.nstr(x, 8) for x in self.c)

    def _coerce(self, other) -> "TSeries":
        if isinstance(other, TSeries):
            return other
        return TSeries.const(other, self.order)

    def __add__(self, other):
        o = self._coerce(other)
        k = min(self.order, o.order)
        return TSeries([self.c[i] + o.c[i] for i in range(k + 1)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        k = min(self.order, o.order)
        return TSeries([self.c[i] - o.c[i] for i in range(k + 1)])

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return TSeries([-x for x in self.c])

    def __mul__(self, other):
        if not isinstance(other, TSeries):
            return TSeries([x * other for x in self.c])
        k = min(self.order, other.order)
        out = [mp.mpf(0)] * (k + 1)
        for i in range(min(self.order, k) + 1):
            a = self.c[i]
            if a:
                for j in range(min(other.order, k - i) + 1):
                    out[i + j] += a * other.c[j]
        return TSeries(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, TSeries):
            return TSeries([x / other for x in self.c])
        return self * other.recip()

    def __rtruediv__(self, other):
        return self.recip() * other

    def recip(self) -> "TSeries":
        if self.c[0] == 0:
            raise ZeroDivisionError("reciprocal of series with zero constant term")
        k = self.order
        inv0 = 1 / self.c[0]
        out = [inv0] + [mp.mpf(0)] * k
        for n in range(1, k + 1):
            s = mp.mpf(0)
            for i in range(1, n + 1):
                if i < len(self.c) and self.c[i]:
                    s += self.c[i] * out[n - i]
            out[n] = -inv0 * s
        return TSeries(out)

    def exp(self) -> "TSeries":
        k = self.order
        out = [mp.e ** 0 * mp.exp(self.c[0])] + [mp.mpf(0)] * k
        for n in range(1, k + 1):
            s = mp.mpf(0)
            for i in range(1, n + 1):
                if self.c[i]:
                    s += i * self.c[i] * out[n - i]
            out[n] = s / n
        return TSeries(out)

    def log(self) -> "TSeries":
        if self.c[0] <= 0:
            raise ValueError("log needs a positive constant term")
        k = self.order
        dref = self.recip()
        out = [mp.log(self.c[0])] + [mp.mpf(0)] * k
        # d/dt log a = a'/a, integrated termwise
        da = [i * self.c[i] for i in range(1, k + 1)]
        prod = [mp.mpf(0)] * k
        for i in range(len(da)):
            if da[i]:
                for j in range(k - i):
                    prod[i + j] += da[i] * dref.c[j]
        for n in range(1, k + 1):
            out[n] = prod[n - 1] / n
        return TSeries(out)

    def sqrt(self) -> "TSeries":
        if self.c[0] <= 0:
            raise ValueError("sqrt needs a positive constant term")
        k = self.order
        s0 = mp.sqrt(self.c[0])
        out = [s0] + [mp.mpf(0)] * k
        for n in range(1, k + 1):
            s = mp.mpf(0)
            for i in range(1, n):
                s += out[i] * out[n - i]
            out[n] = (self.c[n] - s) / (2 * s0)
        return TSeries(out)

    def pow_int(self, k: int) -> "TSeries":
        result = TSeries.const(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def coeff(self, i: int):
        return self.c[i] if i <= self.order else mp.mpf(0)

    def derivatives(self) -> list:
        """Taylor coefficients scaled to derivatives: f, f', f'', ..."""
        out = []
        fact = 1
        for i, v in enumerate(self.c):
            out.append(v * fact)
            fact *= i + 1
        return out


# ---------------------------------------------------------------------------
# Scalar and vector root finding (derivative-free / FD-Jacobian)


def solve_scalar(f: Callable, lo, hi, tol_bits: int | None = None,
                 max_iter: int = 4000):
    """Root of a continuous scalar function on a bracketing interval.

    Alternates guaranteed-progress bisection with secant steps (taken
    only when they land well inside the bracket), so wildly asymmetric
    functions cannot stall the iteration.  Raises if the bracket has no
    sign change or the tolerance is not reached.
    """
    a, b = mp.mpf(lo), mp.mpf(hi)
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if mp.sign(fa) == mp.sign(fb):
        raise ValueError("no sign change on the given bracket")
    tol = mp.mpf(2) ** (-(tol_bits or mp.prec - 8))
    for it in range(max_iter):
        width = b - a
        mid = (a + b) / 2
        if width < tol * max(1, abs(mid)):
            return mid
        x = None
        if it % 2 and fb != fa:
            xs = b - fb * (b - a) / (fb - fa)
            if a + width / 16 < xs < b - width / 16:
                x = xs
        if x is None:
            x = mid
        fx = f(x)
        if fx == 0:
            return x
        if mp.sign(fx) == mp.sign(fa):
            a, fa = x, fx
        else:
            b, fb = x, fx
    raise RuntimeError("bracketed root refinement did not converge")


def newton_scalar(f: Callable, seed, max_iter: int = 120):
    """Scalar Newton with a finite-difference slope."""
    x = mp.mpf(seed)
    h = mp.mpf(2) ** (-mp.prec // 2)
    tol = mp.mpf(2) ** (-(mp.prec - 10))
    for _ in range(max_iter):
        fx = f(x)
        slope = (f(x + h * max(1, abs(x))) - fx) / (h * max(1, abs(x)))
        if slope == 0:
            raise ZeroDivisionError("flat slope in scalar Newton")
        step = fx / slope
        x -= step
        if abs(step) < tol * max(1, abs(x)):
            return x
    raise RuntimeError("scalar Newton did not converge")


def newton_vector(f: Callable, seed: Sequence, max_iter: int = 120,
                  damping: int = 0) -> list:
    """Newton for F: R^k -> R^k with finite-difference Jacobian."""
    x = [mp.mpf(v) for v in seed]
    k = len(x)
    h = mp.mpf(2) ** (-mp.prec // 2)
    tol = mp.mpf(2) ** (-(mp.prec - 12))
    for it in range(max_iter):
        fx = f(x)
        if all(abs(v) < tol for v in fx):
            return x
        jac = mp.matrix(k, k)
        for j in range(k):
            dx = h * max(1, abs(x[j]))
            xp = list(x)
            xp[j] += dx
            fp = f(xp)
            for i in range(k):
                jac[i, j] = (fp[i] - fx[i]) / dx
        try:
            delta = mp.lu_solve(jac, mp.matrix(fx))
        except ZeroDivisionError as exc:
            raise RuntimeError("singular Jacobian in vector Newton") from exc
        scale = mp.mpf(2) ** (-damping) if it < damping else 1
        moved = mp.mpf(0)
        for i in range(k):
            x[i] -= scale * delta[i]
            moved = max(moved, abs(delta[i]) / max(1, abs(x[i])))
        if moved < tol:
            return x
    raise RuntimeError("vector Newton did not converge")


def solve_series_coeffs(resfn: Callable, u0, order: int) -> TSeries:
    """Order-by-order solve of a regular implicit series equation.

    ``resfn`` maps a TSeries u to the residual TSeries; u0 solves the
    order-0 equation.  Each higher coefficient enters its residual order
    affinely (the implicit function theorem at a regular point), so two
    evaluations pin it down exactly.
    """
    coeffs = [mp.mpf(u0)]
    for j in range(1, order + 1):
        base = TSeries(coeffs + [mp.mpf(0)] * (order + 1 - j))
        r0 = resfn(base).coeff(j)
        bumped = TSeries(coeffs + [mp.mpf(1)] + [mp.mpf(0)] * (order - j))
        r1 = resfn(bumped).coeff(j)
        slope = r1 - r0
        if slope == 0:
            raise RuntimeError(f"degenerate linear solve at series order {j}")
        coeffs.append(-r0 / slope)
    return TSeries(coeffs)


def branch_point_2x2(phi_jet: Callable, x_seed, z_seed) -> tuple:
    """Solve phi = 0, d(phi)/dz = 0 for a square-root branch point.

    ``phi_jet(x, z, order)`` must return phi(x, z + t) as a TSeries in t;
    its coefficients 0 and 1 are phi and phi_z.  Returns (x0, z0).
    """
    def system(v):
        jet = phi_jet(v[0], v[1], 1)
        return [jet.coeff(0), jet.coeff(1)]

    x0, z0 = newton_vector(system, [x_seed, z_seed])
    return x0, z0


def puiseux_sqrt(res_at: Callable, z0, order: int, sign: int = -1) -> TSeries:
    """Puiseux coefficients at a certified square-root branch point.

    ``res_at(z_series)`` evaluates the defining equation with the
    unknown replaced by the TSeries in X (the caller fixes x = rho(1 -
    X^2) inside).  The X^2 residual coefficient is exactly quadratic in
    the leading unknown d1 (phi_z vanishes at the branch point), and
    every later coefficient d_j enters its residual order X^{j+1}
    affinely; both reduce to two-point evaluations.
    """
    work = order + 2
    coeffs = [mp.mpf(z0)]
    # leading coefficient: quadratic, no linear term
    base = TSeries(coeffs + [mp.mpf(0)] * work)
    a = res_at(base).coeff(2)
    bumped = TSeries([coeffs[0], mp.mpf(1)] + [mp.mpf(0)] * (work - 1))
    b = res_at(bumped).coeff(2) - a
    if b == 0:
        raise RuntimeError("degenerate branch point: no quadratic term")
    val = -a / b
    if val < 0:
        raise RuntimeError("branch point solve produced a negative square")
    coeffs.append(sign * mp.sqrt(val))
    for j in range(2, order + 1):
        base = TSeries(coeffs + [mp.mpf(0)] * (work + 1 - j))
        r0 = res_at(base).coeff(j + 1)
        bumped = TSeries(coeffs + [mp.mpf(1)] + [mp.mpf(0)] * (work - j))
        r1 = res_at(bumped).coeff(j + 1)
        slope = r1 - r0
        if slope == 0:
            raise RuntimeError(f"degenerate Puiseux solve at order {j}")
        coeffs.append(-r0 / slope)
    return TSeries(coeffs)
