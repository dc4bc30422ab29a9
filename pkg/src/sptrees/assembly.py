"""Assembling graph-level series from network bundles.

Two-connected SP graphs with a distinguished spanning tree are built
from the tree-marked networks through the ring/multiedge decomposition
tree: a brick of the decomposition is either a ring (a cycle of at
least three networks) or a multiedge brick (at least three networks in
parallel), no two bricks of the same kind are adjacent, and the class
equals rings + multiedges - (ring,multiedge) adjacencies plus the bare
single edge.  That identity avoids integrating the edge-rooting
equation.

Baseline two-connected graphs come from the classical edge-rooting
identity 2(1+y) dB/dy = x^2 (d + 1) by exact termwise integration in y.

Connected graphs are solved from the vertex-rooted equation
F = x exp(Bx(F)) with F = x dC/dx.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .grammar import ApplyPS, Exp, GrammarSystem, Ref, X, fixed_point_solve
from .networks import BASELINE, SPANTREE, NetworkBundle
from .series import Series, SeriesError, _ciszero

_YVal = Union[int, Fraction, None]


@dataclass
class AssembledSeries:
    series: Series
    route: str
    flavor: str


def _x2_half(t: int, ycap: int | None) -> Series:
    return Series.variable(t, ycap).xmul(1) * Fraction(1, 2)


def _y_series(t: int, ycap: int | None, y_value: _YVal) -> Series:
    if ycap is not None:
        return Series.y_variable(t, ycap)
    return Series.constant(Fraction(y_value), t)


def assemble_tree_marked_B(bundle: NetworkBundle) -> AssembledSeries:
    """Two-connected SP graphs with a spanning tree, by dissymmetry.

    ring brick: a series network against a non-series forest companion;
    multiedge brick: parallel-style grouping with an optional direct
    edge; adjacent ring-multiedge pairs subtracted; plus the single edge.
    """
    if bundle.flavor != SPANTREE:
        raise ValueError("tree-marked assembly needs the spanning-tree flavour")
    t, ycap = bundle.trunc, bundle.ycap
    y = _y_series(t, ycap, bundle.y_value)
    s, sbar = bundle["s"], bundle["sbar"]
    p, pbar = bundle["p"], bundle["pbar"]
    dbar = bundle["dbar"]
    esb = sbar.exp()
    ring = s * (dbar - sbar)
    multi = (s * (esb - sbar - 1) + y * (s * (esb - 1)) + y * (esb - sbar - 1))
    ring_multi = s * pbar + sbar * p
    body = y + ring + multi - ring_multi
    x2h = _x2_half(t, ycap)
    return AssembledSeries(x2h * body, route="dissymmetry", flavor="tree-marked")


def baseline_B_by_integration(bundle: NetworkBundle) -> AssembledSeries:
    """Baseline two-connected SP graphs via 2(1+y) dB/dy = x^2 (d + 1).

    The integration constant is fixed by B(x, 0) = 0: a two-connected
    graph on at least two vertices has at least one edge.
    """
    if bundle.flavor != BASELINE:
        raise ValueError("integration route needs the baseline flavour")
    if bundle.ycap is None:
        raise ValueError("integration in y needs a bivariate bundle")
    t, ycap = bundle.trunc, bundle.ycap
    d = bundle["d"]
    one_plus_y = 1 + Series.y_variable(t, ycap)
    integrand = _x2_half(t, ycap) * (d + 1) * one_plus_y.reciprocal()
    b = integrand.integrate_y()
    return AssembledSeries(b, route="edge-rooting-integral", flavor="baseline")


def baseline_B_univariate(d: Series) -> Series:
    """Baseline two-connected series at fixed y from the network series alone.

    Exact closed form of the edge-rooting integral after substituting
    t -> D(x, t), valid at any y specialisation (y enters only through d):

        B = log(1+xD)/2 - x^2 D^2 / 4 - (1-x) xD / (2(1+xD)).

    Validated against the termwise bivariate integration in the tests.
    """
    if d.is_bivariate:
        raise SeriesError("specialise the network series first")
    t = d.trunc
    x = Series.variable(t, var=d.var)
    xd = x * d
    opxd = 1 + xd
    return (opxd.log() / 2 - (x * x) * (d * d) / 4
            - ((1 - x) * xd * opxd.reciprocal()) / 2)


def lagrange_connected(b: Series) -> Series:
    """Connected series from the two-connected one by Lagrange inversion.

    F = x phi(F) with phi = exp(Bx) gives n [x^n] F = [u^{n-1}] phi^n,
    so [x^n] C = [u^{n-1}] exp(n Bx(u)) / n^2.  Runs the power of phi
    incrementally; an independent route to the fixed-point solver.
    """
    bx = b.diff_main()
    t = bx.trunc
    if not _ciszero(bx.coeffs[0]):
        raise SeriesError("two-connected series must have no constant slope")
    phi = bx.exp()
    running = Series.one(t, var=b.var)
    coeffs = [Fraction(0)] * (t + 1)
    for n in range(1, t + 1):
        running = running * phi
        coeffs[n] = running.coeff(n - 1) / Fraction(n * n)
    return Series(coeffs, t, var=b.var)


def bd2_residual(bundle: NetworkBundle, b: Series, reading: str) -> Series:
    """Residual of the tree-marked edge-rooting identity under a reading.

    The final subtracted term of the identity is ambiguous in its usual
    printed form; the two well-formed readings are
    ``y*(exp(sbar)-1)`` and ``y*exp(sbar)``.
    """
    if bundle.ycap is None or not b.is_bivariate:
        raise ValueError("the edge-rooting identity is checked bivariate")
    t = min(bundle.trunc, b.trunc)
    ycap = bundle.ycap
    y = Series.y_variable(t, ycap)
    d, dbar, sbar = (bundle["d"].truncate(t), bundle["dbar"].truncate(t),
                     bundle["sbar"].truncate(t))
    esb = sbar.exp()
    if reading == "y*(exp(sbar)-1)":
        sub = y * (esb - 1)
    elif reading == "y*exp(sbar)":
        sub = y * esb
    else:
        raise ValueError(f"unknown reading {reading!r}")
    lhs = 2 * ((1 + y) * b.truncate(t).diff_y())
    x2 = Series.variable(t, ycap - 1).xmul(1)
    rhs = x2 * (1 + d + dbar - sub).reduce_ycap(ycap - 1)
    return lhs - rhs


BD2_READINGS = ("y*(exp(sbar)-1)", "y*exp(sbar)")


def check_bd2(bundle: NetworkBundle, b: Series) -> dict:
    """Try both readings; report which (if either) gives the zero series."""
    report: dict = {"readings": {}}
    adopted = None
    for reading in BD2_READINGS:
        res = bd2_residual(bundle, b, reading)
        zero = res.is_zero()
        report["readings"][reading] = {
            "zero": zero,
            "first_nonzero_order": None if zero else res.order(),
        }
        if zero and adopted is None:
            adopted = reading
    report["adopted"] = adopted
    return report


def connected_from_B(b: Series, var: str = "x") -> AssembledSeries:
    """Connected graphs from their two-connected series.

    Solves F = x exp(Bx(F)) for the vertex-rooted series F = x dC/dx,
    then divides coefficients by n.  Works for any coefficient ring the
    grammar engine supports.
    """
    bx = b.diff_main()
    t = bx.trunc
    if not _ciszero(bx.coeffs[0]):
        raise SeriesError("two-connected series must have no constant slope")
    system = GrammarSystem({"f": X * Exp(ApplyPS(bx.coeffs, Ref("f")))})
    sol = fixed_point_solve(system, t, ycap=b.ycap,
                            y_value=None if b.ycap is not None else Fraction(0),
                            var=var, require_nonnegative=True)
    f = sol["f"]
    coeffs = [f.coeff(0)] + [f.coeff(n) / n for n in range(1, t + 1)]
    c = Series(coeffs, t, var)
    return AssembledSeries(c, route="vertex-rooted-fixed-point", flavor="connected")


def extract_excess_slice(c: Series, k: int) -> Series:
    """Fixed-excess slice: sum over n of [x^n y^(n+k)] x^n.

    Needs y-truncation at least trunc + k, otherwise the top slices
    would silently be wrong.
    """
    if not c.is_bivariate:
        raise SeriesError("excess slice extraction needs a bivariate series")
    if c.ycap < c.trunc + k:
        raise SeriesError(
            f"y truncation {c.ycap} too small for excess {k} at order {c.trunc}")
    coeffs = [c.coeff_nm(n, n + k) if n + k >= 0 else Fraction(0)
              for n in range(c.trunc + 1)]
    return Series(coeffs, c.trunc, c.var)


def edge_moment_table(series: Series, n_range) -> list[tuple[int, Fraction, Fraction]]:
    """Exact mean and variance of the edge count at each vertex count.

    The measure at size n weights a value m by the coefficient of
    x^n y^m.  Rows with zero total mass are skipped.
    """
    if not series.is_bivariate:
        raise SeriesError("edge moments need a bivariate series")
    rows = []
    for n in n_range:
        if n > series.trunc:
            break
        poly = series.coeff(n)
        m0 = sum(poly.coeffs(), Fraction(0))
        if m0 == 0:
            continue
        m1 = sum((Fraction(m) * c for m, c in enumerate(poly.coeffs())), Fraction(0))
        m2 = sum((Fraction(m * m) * c for m, c in enumerate(poly.coeffs())), Fraction(0))
        mean = m1 / m0
        var = m2 / m0 - mean * mean
        rows.append((n, mean, var))
    return rows


def edge_moment_table_from_jets(jet_series: Series, n_range) -> list[tuple[int, Fraction, Fraction]]:
    """Edge moments from a series solved over jets at y = 1.

    The coefficient of x^n is a polynomial in eps = y - 1 truncated at
    eps^2, i.e. (value, d/dy, half the second derivative) at y = 1.
    """
    rows = []
    for n in n_range:
        if n > jet_series.trunc:
            break
        jet = jet_series.coeff(n)
        a0, a1, a2 = (jet.coeff(0), jet.coeff(1), jet.coeff(2))
        if a0 == 0:
            continue
        mean = a1 / a0
        second_fact = 2 * a2 / a0          # E[m(m-1)]
        var = second_fact + mean - mean * mean
        rows.append((n, mean, var))
    return rows
