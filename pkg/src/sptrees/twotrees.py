"""Edge-maximal SP graphs (2-trees) and their spanning trees.

A 2-tree on n vertices has exactly 2n-3 edges, so the edge variable is
fixed at 1 throughout.  The rooted class tbar (root edge, unlabelled
endpoints) satisfies tbar = y exp(x tbar^2); the unrooted class follows by
integration, t = (x^2/2)(tbar - (2/3) x tbar^3), and the labelled
count n! [x^n] t reproduces the classical (n choose 2)(2n-3)^(n-4).

For spanning trees the relevant networks are edge-maximal with a marked
spanning tree that either contains the root edge (series a) or not
(series b); the pair satisfies

    a = y exp(2 (a+b) x a),      b = y x (a+b)^2 exp(2 (a+b) x a),

and collapses to one equation for e = a + b, since a = e/(1 + x e^2).
The 2-tree class with a spanning tree is assembled from (a, b) via the
edge/triangle incidence tree of the 2-tree (a bipartite tree), whose
dissymmetry identity reduces to ten node/edge terms that simplify to

    ts = (x^2/2)(a + b) - x^3 a (a + b)^2.

Both the ten-term and the simplified forms are computed and compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .asymptotics import (DEFAULT_PREC, BranchPoint, SingularExpansion,
                          branch_point, psi_maximal)
from .tseries import puiseux_sqrt
from .grammar import GrammarSystem, Ref, X, Y, exp, fixed_point_solve
from .series import Series
from .tseries import TSeries


def two_tree_count(n: int) -> int:
    """Labelled 2-trees on n vertices: (n choose 2) (2n-3)^(n-4)."""
    if n < 2:
        return 0
    if n <= 3:
        return 1
    return (n * (n - 1) // 2) * (2 * n - 3) ** (n - 4)


def solve_T(trunc: int) -> tuple[Series, Series]:
    """(rooted, unrooted) 2-tree series at y = 1.

    The rooted coefficients carry the Lagrange closed form
    [x^n] tbar = (2n+1)^(n-1)/n!, and the classical 2-tree count certifies the
    unrooted ones; both checks run here rather than in the caller.
    """
    sys = GrammarSystem({"tbar": Y * exp(X * Ref("tbar") ** 2)})
    tbar = fixed_point_solve(sys, trunc, y_value=1)["tbar"]
    fact = 1
    for n in range(trunc + 1):
        if n:
            fact *= n
        expected = Fraction((2 * n + 1) ** (n - 1), fact) if n >= 1 else Fraction(1)
        if tbar.coeff(n) != expected:
            raise RuntimeError(f"rooted 2-tree coefficient {n} off: "
                               f"{tbar.coeff(n)} vs {expected}")
    x = Series.variable(trunc)
    t = (x * x) * (tbar - Fraction(2, 3) * (x * tbar ** 3)) / 2
    for n in range(2, trunc + 1):
        if t.count(n) != two_tree_count(n):
            raise RuntimeError(f"2-tree count mismatch at n={n}")
    return tbar, t


def t_expansion(prec: int = DEFAULT_PREC) -> SingularExpansion:
    """Exact singular data of the 2-tree series at 1/(2e).

    A0 = e^{-3/2}/12, A1 = 0, A2 = -(3/16) e^{-3/2},
    A3 = (sqrt(2)/48) e^{-3/2}.
    """
    with mp.workprec(prec):
        s = mp.exp(mp.mpf(-3) / 2)
        rho = 1 / (2 * mp.e)
        return SingularExpansion(
            rho, [s / 12, mp.mpf(0), -3 * s / 16, mp.sqrt(2) * s / 48], "3/2")


@dataclass
class MaximalNetworks:
    """Edge-maximal network pair at y = 1 with the root edge in/out of the tree."""

    root_in_tree: Series     # a
    root_not_in_tree: Series  # b
    total: Series            # e = a + b

    def __getitem__(self, key: str) -> Series:
        return {"a": self.root_in_tree, "b": self.root_not_in_tree,
                "e": self.total}[key]


def solve_maximal_networks(trunc: int) -> MaximalNetworks:
    a, b = Ref("a"), Ref("b")
    core = exp(2 * ((a + b) * (X * a)))
    sys = GrammarSystem({
        "a": Y * core,
        "b": Y * (X * ((a + b) ** 2)) * core,
    })
    sol = fixed_point_solve(sys, trunc, y_value=1)
    av, bv = sol["a"], sol["b"]
    total = av + bv
    # one-unknown elimination must agree: e/(1+x e^2) = exp(2 x e^2/(1+x e^2))
    x = Series.variable(trunc)
    xe2 = x * total * total
    lhs = total * (1 + xe2).reciprocal()
    rhs = (2 * (xe2 * (1 + xe2).reciprocal())).exp()
    if not (lhs - rhs).is_zero():
        raise RuntimeError("maximal-network elimination failed")
    if not (av - lhs).is_zero():
        raise RuntimeError("root-in-tree closed form a = e/(1+x e^2) failed")
    return MaximalNetworks(av, bv, total)


@dataclass
class MaximalExpansions:
    rt: mp.mpf                    # shared singularity
    a: TSeries                    # root edge in the spanning tree
    b: TSeries                    # root edge outside the spanning tree
    e: TSeries                    # a + b
    bp: BranchPoint


def maximal_expansions(prec: int = DEFAULT_PREC, order: int = 3) -> MaximalExpansions:
    """Branch point and X-expansions of the edge-maximal network pair."""
    with mp.workprec(prec):
        bp = branch_point("maximal", 1, prec)
        work = order + 2

        def res_at(eser: TSeries) -> TSeries:
            xser = TSeries([bp.x0, mp.mpf(0), -bp.x0] + [mp.mpf(0)] * (work - 2))
            return psi_maximal(xser, eser, 1, work)

        e = puiseux_sqrt(res_at, bp.z0, order)
        xser = TSeries([bp.x0, mp.mpf(0), -bp.x0] + [mp.mpf(0)] * (order - 2))
        a = e / (xser * e * e + 1)
        b = e - a
        return MaximalExpansions(bp.x0, a, b, e, bp)


def assemble_ts(max_nets: MaximalNetworks) -> Series:
    """2-trees with a distinguished spanning tree, via the incidence tree.

    Node terms: marked tree-edge, marked non-tree edge, marked triangle
    with 0, 1 or 2 non-tree edges; edge terms subtract the five
    edge-triangle adjacencies.  The alternating sum telescopes to
    (x^2/2)(a+b) - x^3 a (a+b)^2, which is asserted.
    """
    a, b = max_nets.root_in_tree, max_nets.root_not_in_tree
    trunc = a.trunc
    x = Series.variable(trunc)
    x2h = (x * x) / 2
    x3 = x * x * x
    node_terms = (
        x2h * a                       # marked edge in the spanning tree
        + x2h * b                     # marked edge outside it
        + (x3 / 2) * a ** 3           # triangle, all edges in the tree slots
        + x3 * (a ** 2 * b)           # triangle, one non-tree edge
        + (x3 / 2) * (a * b ** 2)     # triangle, two non-tree edges
    )
    edge_terms = (
        x3 * a ** 3                   # tree-edge -- triangle adjacencies
        + x3 * (a ** 2 * b)
        + (x3 / 2) * a ** 3
        + 2 * x3 * (a ** 2 * b)
        + Fraction(3, 2) * (x3 * (a * b ** 2))
    )
    ts = node_terms - edge_terms
    simplified = x2h * (a + b) - x3 * (a * (a + b) ** 2)
    if not (ts - simplified).is_zero():
        raise RuntimeError("incidence-tree assembly does not telescope")
    return ts


def ts_expansion(mx: MaximalExpansions, prec: int = DEFAULT_PREC) -> SingularExpansion:
    """Singular expansion of the spanning-tree-marked 2-tree series."""
    with mp.workprec(prec):
        order = mx.a.order
        x = TSeries([mx.rt, mp.mpf(0), -mx.rt] + [mp.mpf(0)] * (order - 2))
        e = mx.e
        ts = x * x * e * mp.mpf("0.5") - x.pow_int(3) * mx.a * e * e
        a1 = ts.coeff(1)
        if abs(a1) > mp.mpf(10) ** (-20):
            raise RuntimeError(f"expected vanishing X coefficient, got {a1}")
        coeffs = list(ts.c[: order + 1])
        coeffs[1] = mp.mpf(0)
        return SingularExpansion(mx.rt, coeffs, "3/2")


@dataclass
class TwoTreeExpectation:
    rho2_inv: mp.mpf             # growth of the expected spanning-tree count
    s2: mp.mpf                   # its constant, from the computed ts data
    ts3: mp.mpf
    t3: mp.mpf
    sequence_limit: mp.mpf       # Richardson limit of E[U_n] (rho_T/R_T)^(-n)... see notes
    rt: mp.mpf


def twotree_expectation(prec: int = DEFAULT_PREC, seq_trunc: int = 160) -> TwoTreeExpectation:
    """Constants of the expected spanning-tree count in a random 2-tree.

    s2 and rho2_inv come from the two singular expansions; the exact
    sequence E[U_n] * (R_T / rho_T)^n, accelerated by Richardson, is an
    independent consistency route computed from the exact series.
    """
    with mp.workprec(prec):
        mx = maximal_expansions(prec)
        texp = t_expansion(prec)
        tsx = ts_expansion(mx, prec)
        rho2_inv = texp.rho / mx.rt
        s2 = tsx.coeff(3) / texp.coeff(3)
        nets = solve_maximal_networks(seq_trunc)
        ts = assemble_ts(nets)
        _, t = solve_T(seq_trunc)
        seq = []
        ratio = mx.rt / texp.rho
        for n in range(seq_trunc - 30, seq_trunc + 1):
            tn = t.coeff(n)
            tsn = ts.coeff(n)
            ev = mp.mpf(tsn.numerator) / tsn.denominator \
                * tn.denominator / tn.numerator
            seq.append((n, ev * ratio ** n))
        from .asymptotics import _richardson
        limit = _richardson(seq, 6)
        return TwoTreeExpectation(rho2_inv, s2, tsx.coeff(3), texp.coeff(3),
                                  limit, mx.rt)
