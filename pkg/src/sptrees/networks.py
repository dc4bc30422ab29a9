"""Network-level grammars for series-parallel graphs.

A network is a graph on two unlabelled poles plus labelled internal
vertices such that adding the pole edge yields a 2-connected multigraph.
Every nontrivial SP network is either series or parallel; following the
convention used throughout this package, a network containing the root
edge is classified as parallel.

Three flavours are solved here, each as a guarded fixed-point system:

* spanning-tree networks: the network carries a distinguished spanning
  tree (d, s, p), together with the companion classes carrying a
  two-component spanning forest separating the poles (dbar, sbar, pbar);
* baseline networks: no distinguished structure (the same decomposition
  with the marking erased);
* second-moment networks: two distinguished spanning structures, one of
  nine combinations of tree/forest on each slot (dstar .. phat).

Solved bundles are certified by the grammar residual check, by closed
helper identities (s = x d^2/(1+x d), dbar = (1+y) e^sbar - 1), and by
an independent single-equation form of the tree-marked system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .grammar import (GrammarSystem, Ref, X, Y, exp, fixed_point_solve)
from .series import Series

SPANTREE = "spantree"
BASELINE = "baseline"
SECOND_MOMENT = "second-moment"

_YVal = Union[int, Fraction, None]


@dataclass
class NetworkBundle:
    """A solved family of network series sharing flavour and truncation."""

    flavor: str
    series: dict[str, Series]
    trunc: int
    ycap: int | None = None
    y_value: _YVal = None
    extras: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> Series:
        return self.series[name]

    def names(self) -> list[str]:
        return sorted(self.series)


def spantree_system() -> GrammarSystem:
    """Networks with a distinguished spanning tree and their forest companions.

    d: all networks with a spanning tree; dbar: all networks with a
    pole-separating 2-forest; s/sbar: the series subfamilies; p/pbar:
    the parallel subfamilies (root edge allowed).
    """
    d, dbar = Ref("d"), Ref("dbar")
    s, sbar = Ref("s"), Ref("sbar")
    p, pbar = Ref("p"), Ref("pbar")
    esb = exp(Ref("sbar"))
    return GrammarSystem({
        "d": Y + s + p,
        "dbar": Y + sbar + pbar,
        "s": (Y + p) * X * d,
        "sbar": (Y + p) * X * dbar + (Y + pbar) * X * d,
        "p": Y * (esb - 1) + Y * (Ref("s") * esb) + Ref("s") * (esb - 1),
        "pbar": (esb - Ref("sbar") - 1) + Y * (esb - 1),
    })


def baseline_system() -> GrammarSystem:
    """Unmarked SP networks: the same decomposition with marking erased."""
    d, s, p = Ref("d"), Ref("s"), Ref("p")
    es = exp(Ref("s"))
    return GrammarSystem({
        "d": Y + s + p,
        "s": (Y + p) * X * d,
        "p": Y * (es - 1) + (es - Ref("s") - 1),
    })


def second_moment_system() -> GrammarSystem:
    """Networks carrying two distinguished spanning structures.

    star: tree + tree; tilde: tree + forest; hat: forest + forest.
    The parallel rule for the star flavour couples all three levels.
    """
    dst, dti, dha = Ref("dstar"), Ref("dtilde"), Ref("dhat")
    sst, sti, sha = Ref("sstar"), Ref("stilde"), Ref("shat")
    pst, pti, pha = Ref("pstar"), Ref("ptilde"), Ref("phat")
    esh = exp(Ref("shat"))
    return GrammarSystem({
        "dstar": Y + sst + pst,
        "dtilde": Y + sti + pti,
        "dhat": Y + sha + pha,
        "sstar": (Y + pst) * X * dst,
        "stilde": (Y + pti) * X * dst + (Y + pst) * X * dti,
        "shat": ((Y + pst) * X * dha + (Y + pha) * X * dst
                 + 2 * ((Y + pti) * X * dti)),
        "pstar": (Ref("sstar") * (esh - 1) + (1 + Y) * Ref("stilde") ** 2 * esh
                  + Y * Ref("sstar") * esh + 2 * Y * Ref("stilde") * esh
                  + Y * (esh - 1)),
        "ptilde": (Y + Ref("stilde")) * (esh - 1) + Y * Ref("stilde") * esh,
        "phat": (esh - Ref("shat") - 1) + Y * (esh - 1),
    })


def _solve(flavor: str, system: GrammarSystem, trunc: int,
           ycap: int | None, y_value: _YVal) -> NetworkBundle:
    sol = fixed_point_solve(system, trunc, ycap=ycap, y_value=y_value)
    return NetworkBundle(flavor, sol, trunc, ycap=ycap, y_value=y_value)


def solve_spantree_networks(trunc: int, ycap: int | None = None,
                            y_value: _YVal = None) -> NetworkBundle:
    return _solve(SPANTREE, spantree_system(), trunc, ycap, y_value)


def solve_baseline_networks(trunc: int, ycap: int | None = None,
                            y_value: _YVal = None) -> NetworkBundle:
    return _solve(BASELINE, baseline_system(), trunc, ycap, y_value)


def solve_second_moment_networks(trunc: int, ycap: int | None = None,
                                 y_value: _YVal = None) -> NetworkBundle:
    return _solve(SECOND_MOMENT, second_moment_system(), trunc, ycap, y_value)


# ---------------------------------------------------------------------------
# Single-equation consistency checks


def implicit_d_residual(d: Series, y_value: Union[int, Fraction]) -> Series:
    """Residual of the eliminated one-equation form of the tree-marked system.

    The six-series system collapses to a single implicit equation for d;
    substituting the solved d must give the zero series exactly.  Needs a
    univariate series (the inner reciprocals are units only once y is a
    positive rational).
    """
    if d.is_bivariate:
        raise ValueError("specialise y first")
    y = Fraction(y_value)
    t = d.trunc
    x = Series.variable(t, var=d.var)
    xd = x * d
    one_p_xd = 1 + xd
    num = (y * one_p_xd - (1 + y) * d) * (2 + xd)
    den = (y * one_p_xd + (1 + y) * (xd * d)) * (one_p_xd * one_p_xd)
    arg = -(xd * num * den.reciprocal())
    pref = y + (1 + y) * (xd * d) * one_p_xd.reciprocal()
    return d - pref * arg.exp()


def implicit_d_consistency(bundle: NetworkBundle) -> dict:
    """Exact-zero report for the eliminated equation against a solved bundle."""
    if bundle.flavor != SPANTREE:
        raise ValueError("consistency check applies to the tree-marked flavour")
    if bundle.y_value is None:
        raise ValueError("solve the bundle at a specialised y first")
    res = implicit_d_residual(bundle["d"], bundle.y_value)
    nz = [n for n, c in enumerate(res.coeffs) if c != 0]
    return {
        "zero": not nz,
        "first_nonzero_order": nz[0] if nz else None,
        "max_abs_residual": max((abs(c) for c in res.coeffs), default=Fraction(0)),
        "trunc": res.trunc,
    }


def baseline_implicit_residual(d: Series, y_value: _YVal = None) -> Series:
    """Residual of d = y + (1+y)(exp(x d^2/(1+x d)) - 1) for baseline networks."""
    t = d.trunc
    if d.is_bivariate:
        x = Series.variable(t, d.ycap, var=d.var)
        y: Series = Series.y_variable(t, d.ycap, var=d.var)
    else:
        if y_value is None:
            raise ValueError("univariate residual needs the y value")
        x = Series.variable(t, var=d.var)
        y = Series.constant(Fraction(y_value), t, var=d.var)
    xd = x * d
    arg = xd * d * (1 + xd).reciprocal()
    return d - y - (1 + y) * (arg.exp() - 1)


def closed_form_checks(bundle: NetworkBundle) -> dict[str, bool]:
    """Identities that follow from the grammar by elimination.

    s = x d^2 / (1 + x d) holds for the tree-marked and baseline
    flavours, and dbar = (1+y) e^{sbar} - 1 for the tree-marked one.
    """
    t = bundle.trunc
    ycap = bundle.ycap
    x = Series.variable(t, ycap)
    out: dict[str, bool] = {}
    if bundle.flavor in (SPANTREE, BASELINE):
        d, s = bundle["d"], bundle["s"]
        out["series_closed_form"] = (s * (1 + x * d) - x * d * d).is_zero()
    if bundle.flavor == SPANTREE:
        if ycap is not None:
            one_py: Series = 1 + Series.y_variable(t, ycap)
        else:
            one_py = Series.constant(1 + Fraction(bundle.y_value), t)
        dbar, sbar = bundle["dbar"], bundle["sbar"]
        out["dbar_closed_form"] = (dbar + 1 - one_py * sbar.exp()).is_zero()
    return out
