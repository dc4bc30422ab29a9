"""High-precision singularity analysis for the SP graph families.

The exact grammars admit closed implicit equations once the auxiliary
series are eliminated:

* tree-marked networks: a single unknown d with phi_tree(x, y; d) = 0;
* baseline networks: phi_base(x, y; d) = 0;
* edge-maximal networks: the pair (root-in-tree, root-not-in-tree)
  collapses to one unknown e = sum of the pair via psi_maximal.

A square-root branch point (x0, z0) solves phi = 0, phi_z = 0; it is
found by vector Newton on that 2x2 system (finite-difference Jacobian)
after a continuation seed, and certified by residuals at doubled
precision plus a phi_zz lower bound.  Puiseux coefficients in
X = sqrt(1 - x/x0) come out of exact two-point solves, the companion
network functions are transported through their defining equations,
and the two-connected and connected levels are evaluated through the
ring/multiedge closed form and the composition scheme tau B_xx = 1.

Systems without a one-unknown elimination (the second-moment networks)
go through the generic branch-point locator for strongly connected
positive systems: march x upward along the solution branch until
det(I - Jacobian) changes sign, then bisect.

Everything here is numeric (mpmath); exactness lives in the series
modules, and the two sides are cross-checked in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from mpmath import mp

from .tseries import (TSeries, branch_point_2x2, newton_scalar, newton_vector,
                      puiseux_sqrt, solve_scalar, solve_series_coeffs)

DEFAULT_PREC = 256


# ---------------------------------------------------------------------------
# Closed implicit equations (arguments may be TSeries or scalars)


def _ts(v, order: int) -> TSeries:
    return v if isinstance(v, TSeries) else TSeries.const(v, order)


def phi_tree(x, z, y, order: int = 0) -> TSeries:
    """Defining equation of tree-marked networks, z - A(x,y,z) e^{B(x,y,z)}."""
    x, z = _ts(x, order), _ts(z, order)
    y = mp.mpf(y)
    xz = x * z
    opxz = xz + 1
    num = (opxz * y - z * (1 + y)) * (xz + 2)
    den = (opxz * y + (xz * z) * (1 + y)) * opxz * opxz
    pref = (xz * z) * (1 + y) / opxz + y
    arg = -(xz * num / den)
    return z - pref * arg.exp()


def phi_base(x, z, y, order: int = 0) -> TSeries:
    """Defining equation of unmarked SP networks."""
    x, z = _ts(x, order), _ts(z, order)
    y = mp.mpf(y)
    xz = x * z
    arg = xz * z / (xz + 1)
    return z - y - (arg.exp() - 1) * (1 + y)


def psi_maximal(x, e, y, order: int = 0) -> TSeries:
    """Defining equation for the sum of the two edge-maximal network series."""
    x, e = _ts(x, order), _ts(e, order)
    y = mp.mpf(y)
    xe2 = x * e * e
    frac = xe2 / (xe2 + 1)
    return e / (xe2 + 1) - y * (frac * 2).exp()


# ---------------------------------------------------------------------------
# Branch points


@dataclass
class BranchPoint:
    y: Fraction
    x0: mp.mpf
    z0: mp.mpf
    phi_zz: mp.mpf
    residuals: tuple          # (|phi|, |phi_z|) re-evaluated at doubled precision
    equation: str = "tree"


def _phi_by_name(name: str) -> Callable:
    return {"tree": phi_tree, "base": phi_base, "maximal": psi_maximal}[name]


def _continuation_values(phi: Callable, y, xs: Sequence, z_seed) -> list:
    zs = []
    z = mp.mpf(z_seed)
    for x in xs:
        z = newton_scalar(lambda u, x=x: phi(x, u, y).coeff(0), z)
        zs.append(z)
    return zs


def branch_point(equation: str, y, prec: int = DEFAULT_PREC,
                 r_estimate=None, _depth: int = 0) -> BranchPoint:
    """Locate the square-root branch point of one implicit equation.

    Seeds come from a coarse continuation along the solution branch: the
    radius estimate (by default from exact coefficient ratios) is walked
    toward from below, and the last two points extrapolate (x0, z0) for
    the Newton polish on (phi, phi_z).  On Newton failure the solve
    retries from the branch point at a smaller y (continuation in y).
    """
    phi = _phi_by_name(equation)
    yq = Fraction(y)
    with mp.workprec(prec):
        yv = mp.mpf(yq.numerator) / yq.denominator
        if r_estimate is None:
            r_estimate = _radius_estimate_from_series(equation, yq)
        r_est = mp.mpf(r_estimate)
        try:
            fracs = [mp.mpf(f) for f in ("0.3", "0.6", "0.8", "0.9", "0.96")]
            zs = _continuation_values(phi, yv, [f * r_est for f in fracs], yv)
            # two-point fit z ~ z0 + d1 sqrt(1 - x/r): eliminate d1
            s1 = mp.sqrt(1 - fracs[-2])
            s2 = mp.sqrt(1 - fracs[-1])
            d1 = (zs[-2] - zs[-1]) / (s1 - s2)
            z0_seed = zs[-1] - d1 * s2
            jet = lambda x, z, order: phi(x, TSeries.var(z, order), yv, order)
            x0, z0 = branch_point_2x2(jet, r_est, z0_seed)
        except (RuntimeError, ZeroDivisionError, ValueError):
            if _depth >= 4:
                raise
            smaller = branch_point(equation, yq * Fraction(3, 4), prec,
                                   _depth=_depth + 1)
            x0, z0 = branch_point_2x2(
                lambda x, z, order: phi(x, TSeries.var(z, order), yv, order),
                smaller.x0, smaller.z0)
        if not (0 < x0 < 1):
            raise RuntimeError(f"branch point escaped (0,1): {x0}")
        jet2 = phi(x0, TSeries.var(z0, 2), yv, 2)
        phi_zz = 2 * jet2.coeff(2)
        with mp.workprec(2 * prec):
            cert = phi(mp.mpf(x0), TSeries.var(mp.mpf(z0), 1), yv, 1)
            residuals = (abs(cert.coeff(0)), abs(cert.coeff(1)))
        if abs(phi_zz) < mp.mpf(2) ** (-prec // 4):
            raise RuntimeError("phi_zz nearly vanishes: not a square-root point")
        return BranchPoint(yq, x0, z0, phi_zz, residuals, equation)


def _radius_estimate_from_series(equation: str, y: Fraction, trunc: int = 60):
    """Coarse radius estimate from exact coefficient ratios (no tuning)."""
    from . import networks

    if equation == "tree":
        d = networks.solve_spantree_networks(trunc, y_value=y)["d"]
    elif equation == "base":
        d = networks.solve_baseline_networks(trunc, y_value=y)["d"]
    else:
        from .twotrees import solve_maximal_networks
        pair = solve_maximal_networks(trunc)
        d = pair.total
    qs = []
    for n in range(trunc - 6, trunc + 1):
        a, b = d.coeff(n - 1), d.coeff(n)
        if b != 0:
            qs.append(mp.mpf(a.numerator) * b.denominator
                      / (a.denominator * b.numerator))
    # one Richardson step on the ratio sequence
    if len(qs) >= 2:
        n = trunc
        return qs[-1] + (qs[-1] - qs[-2]) * (n - 1)
    return qs[-1]


def singular_inverse_growth(bp: BranchPoint):
    return 1 / bp.x0


def radius_derivative(bp: BranchPoint, prec: int = DEFAULT_PREC):
    """dR/dy at a branch point: -phi_y / phi_x (phi_z vanishes there)."""
    phi = _phi_by_name(bp.equation)
    with mp.workprec(prec):
        yv = mp.mpf(bp.y.numerator) / bp.y.denominator
        jx = phi(TSeries.var(bp.x0, 1), bp.z0, yv, 1)
        phi_x = jx.coeff(1)
        h = mp.mpf(2) ** (-prec // 3)
        jy_hi = phi(bp.x0, bp.z0, yv + h, 0).coeff(0)
        jy_lo = phi(bp.x0, bp.z0, yv - h, 0).coeff(0)
        phi_y = (jy_hi - jy_lo) / (2 * h)
        return -phi_y / phi_x


# ---------------------------------------------------------------------------
# Puiseux expansions and network transport (tree-marked flavour)


@dataclass
class SingularExpansion:
    rho: mp.mpf
    coeffs: list                     # A0, A1, A2, A3 in X = sqrt(1 - x/rho)
    exponent_class: str = "1/2"      # "1/2" (A1 != 0) or "3/2" (A1 = 0)

    def coeff(self, i: int):
        return self.coeffs[i] if i < len(self.coeffs) else mp.mpf(0)


def d_expansion(bp: BranchPoint, order: int = 3, prec: int = DEFAULT_PREC) -> SingularExpansion:
    phi = _phi_by_name(bp.equation)
    with mp.workprec(prec):
        yv = mp.mpf(bp.y.numerator) / bp.y.denominator
        work = order + 2

        def res_at(zser: TSeries) -> TSeries:
            xser = TSeries([bp.x0, mp.mpf(0), -bp.x0] + [mp.mpf(0)] * (work - 2))
            return phi(xser, zser, yv, work)

        ser = puiseux_sqrt(res_at, bp.z0, order)
        return SingularExpansion(bp.x0, ser.c[: order + 1], "1/2")


@dataclass
class NetworkExpansions:
    """X-expansions of all six tree-marked network series at R(y)."""

    y: Fraction
    rho: mp.mpf
    d: TSeries
    dbar: TSeries
    s: TSeries
    sbar: TSeries
    p: TSeries
    pbar: TSeries

    def table(self) -> dict[str, list]:
        return {name: list(getattr(self, name).c)
                for name in ("d", "dbar", "s", "sbar", "p", "pbar")}


def _transport_networks(x: TSeries, d: TSeries, y, sbar0_seed=None):
    """The five companion series from d by eliminating the grammar.

    s and p are rational in d; sbar solves its own regular implicit
    equation (the forest-side singular behaviour is inherited, so the
    order-0 solve is an honest scalar root).
    """
    y = mp.mpf(y)
    s = x * d * d / (x * d + 1)
    p = d - y - s
    order = d.order

    def rhs(sb: TSeries) -> TSeries:
        dbar_loc = sb.exp() * (1 + y) - 1
        pbar_loc = dbar_loc - y - sb
        return (p + y) * x * dbar_loc + (pbar_loc + y) * x * d

    if sbar0_seed is None:
        sbar0_seed = mp.mpf("0.3")
    sb0 = newton_scalar(
        lambda u: (rhs(TSeries.const(u, 0)) - TSeries.const(u, 0)).coeff(0),
        sbar0_seed)
    sbar = solve_series_coeffs(lambda u: u - rhs(u), sb0, order)
    dbar = sbar.exp() * (1 + y) - 1
    pbar = dbar - y - sbar
    return s, p, sbar, dbar, pbar


def network_expansions(bp: BranchPoint, order: int = 3,
                       prec: int = DEFAULT_PREC) -> NetworkExpansions:
    if bp.equation != "tree":
        raise ValueError("network transport is for the tree-marked flavour")
    with mp.workprec(prec):
        yv = mp.mpf(bp.y.numerator) / bp.y.denominator
        dexp = d_expansion(bp, order, prec)
        d = TSeries(dexp.coeffs)
        x = TSeries([bp.x0, mp.mpf(0), -bp.x0] + [mp.mpf(0)] * (order - 2))
        s, p, sbar, dbar, pbar = _transport_networks(x, d, yv)
        return NetworkExpansions(bp.y, bp.x0, d, dbar, s, sbar, p, pbar)


def b_expansion(nx: NetworkExpansions, prec: int = DEFAULT_PREC) -> SingularExpansion:
    """Two-connected tree-marked expansion via the ring/multiedge form.

    The X coefficient must vanish (the class has a 3/2 singularity);
    its numerical size is asserted tiny and then zeroed.
    """
    with mp.workprec(prec):
        yv = mp.mpf(nx.y.numerator) / nx.y.denominator
        order = nx.d.order
        x = TSeries([nx.rho, mp.mpf(0), -nx.rho] + [mp.mpf(0)] * (order - 2))
        b = _b_closed_form(x, yv, nx.s, nx.sbar, nx.p, nx.pbar, nx.dbar)
        a1 = b.coeff(1)
        if abs(a1) > mp.mpf(10) ** (-20):
            raise RuntimeError(f"expected vanishing X coefficient, got {a1}")
        coeffs = list(b.c[: order + 1])
        coeffs[1] = mp.mpf(0)
        return SingularExpansion(nx.rho, coeffs, "3/2")


def _b_closed_form(x, y, s, sbar, p, pbar, dbar):
    esb = sbar.exp()
    ring = s * (dbar - sbar)
    multi = s * (esb - sbar - 1) + (s * (esb - 1)) * y + (esb - sbar - 1) * y
    ring_multi = s * pbar + sbar * p
    return x * x * (ring + multi - ring_multi + y) * mp.mpf("0.5")


# ---------------------------------------------------------------------------
# Pointwise evaluation of networks and the two-connected series


def _d_scalar(equation: str, x, y,
              steps=("0.4", "0.7", "0.85", "0.93", "0.97", "0.99", "1")):
    """Network value at a point, by continuation along the branch.

    Newton from the previous continuation value, with a bracketed
    fallback when the seed is outside the basin (near the fold the
    first crossing of phi is bracketed by marching z upward).
    """
    phi = _phi_by_name(equation)
    z = mp.mpf(y)
    for f in steps:
        xx = mp.mpf(f) * x

        def ph(u, xx=xx):
            return phi(xx, u, y).coeff(0)

        try:
            z_new = newton_scalar(ph, z)
            if z_new < z / 2 or not mp.isfinite(z_new) or z_new < 0:
                raise RuntimeError("left the combinatorial branch")
            z = z_new
        except (RuntimeError, ZeroDivisionError):
            lo = z
            flo = ph(lo)
            if flo > 0:
                raise
            step = max(z * mp.mpf("0.02"), mp.mpf("1e-6"))
            hi = lo
            for _ in range(4000):
                hi = hi + step
                if ph(hi) > 0:
                    break
            else:
                raise
            z = solve_scalar(ph, lo, hi)
    return z


def network_jets(x, y, order: int, prec: int = DEFAULT_PREC,
                 equation: str = "tree") -> dict[str, TSeries]:
    """Taylor jets of the network series at a regular point x < R(y).

    Returns jets of d (and for the tree flavour all six series) in
    t = (x - x0); derivatives follow by scaling with factorials.
    """
    with mp.workprec(prec):
        x = mp.mpf(x)
        yv = mp.mpf(Fraction(y).numerator) / Fraction(y).denominator
        phi = _phi_by_name(equation)
        d0 = _d_scalar(equation, x, yv)
        xjet = TSeries.var(x, order)
        d = solve_series_coeffs(lambda u: phi(xjet, u, yv, order), d0, order)
        if equation != "tree":
            return {"d": d}
        s, p, sbar, dbar, pbar = _transport_networks(xjet, d, yv)
        return {"d": d, "dbar": dbar, "s": s, "sbar": sbar, "p": p, "pbar": pbar}


def b_jets(x, y, order: int = 3, prec: int = DEFAULT_PREC) -> TSeries:
    """Jet of the tree-marked two-connected series at a regular point."""
    with mp.workprec(prec):
        jets = network_jets(x, y, order, prec, "tree")
        yv = mp.mpf(Fraction(y).numerator) / Fraction(y).denominator
        xjet = TSeries.var(mp.mpf(x), order)
        return _b_closed_form(xjet, yv, jets["s"], jets["sbar"],
                              jets["p"], jets["pbar"], jets["dbar"])


def b_base_jets(x, y, order: int = 3, prec: int = DEFAULT_PREC) -> TSeries:
    """Jet of the baseline two-connected series via the integrated closed form.

    Substituting t -> D(x,t) in the edge-rooting integral gives the
    exact antiderivative

        B = log(1+xD)/2 - x^2 D^2/4 - (1-x) xD / (2 (1+xD)),

    checked against the termwise y-integrated series in the tests.
    """
    with mp.workprec(prec):
        x = mp.mpf(x)
        yv = mp.mpf(Fraction(y).numerator) / Fraction(y).denominator
        d0 = _d_scalar("base", x, yv)
        xjet = TSeries.var(x, order)
        d = solve_series_coeffs(lambda u: phi_base(xjet, u, yv, order), d0, order)
        return _b_base_closed_form(xjet, d)


def _b_base_closed_form(x, d):
    xd = x * d
    opxd = xd + 1
    return opxd.log() * mp.mpf("0.5") - x * x * d * d / 4 \
        - (1 - x) * xd / (opxd * 2)


def b_base_x_series(x: TSeries, d: TSeries) -> TSeries:
    """Baseline closed form over an arbitrary series argument (X-expansions)."""
    return _b_base_closed_form(x, d)


# ---------------------------------------------------------------------------
# Connected level: the composition scheme


@dataclass
class CExpansion:
    y: Fraction
    tau: mp.mpf
    rho_bar: mp.mpf
    c0: mp.mpf
    c2: mp.mpf
    c3_variants: dict
    margin: mp.mpf                   # R(y) - tau, certified positive
    b_at_tau: TSeries

    def c3(self, variant: str = "derived"):
        return self.c3_variants[variant]


def c_expansion(y=1, prec: int = DEFAULT_PREC, flavor: str = "tree",
                bp: BranchPoint | None = None) -> CExpansion:
    """Singularity data of the connected level from the two-connected one.

    tau solves x Bxx(x) = 1 inside (0, R); the composition scheme is
    subcritical, so the connected singularity rho_bar = tau e^{-Bx(tau)}
    lies strictly below R.  The third singular coefficient is computed
    in three variants (see the module notes): the literal printed form,
    the same form with the exponential evaluated at tau, and the
    derived prefactor 2/3; the coefficient-fit arbiter lives in the
    ledger, not here.
    """
    with mp.workprec(prec):
        yq = Fraction(y)
        if bp is None:
            bp = branch_point("tree" if flavor == "tree" else "base", yq, prec)
        jets = (b_jets if flavor == "tree" else b_base_jets)
        r = bp.x0

        def g(x):
            bj = jets(x, yq, 2, prec)
            bxx = 2 * bj.coeff(2)
            return x * bxx - 1

        lo = r * mp.mpf("0.5")
        for _ in range(80):
            if g(lo) < 0:
                break
            lo /= 2
        else:
            raise RuntimeError("no subcritical bracket for tau")
        hi = r * (1 - mp.mpf(2) ** (-max(60, prec // 3)))
        tau = solve_scalar(g, lo, hi)
        bj = jets(tau, yq, 3, prec)
        b_val, bx, bxx, bxxx = (bj.coeff(0), bj.coeff(1), 2 * bj.coeff(2),
                                6 * bj.coeff(3))
        rho_bar = tau * mp.exp(-bx)
        c0 = tau * (1 - bx) + b_val
        c2 = -tau
        denom = tau * bxxx - tau * bxx ** 2 + 2 * bxx
        bj_rho = jets(rho_bar, yq, 1, prec)
        bx_rho = bj_rho.coeff(1)
        inner_tau = 2 * rho_bar * mp.exp(bx) / denom
        inner_rho = 2 * rho_bar * mp.exp(bx_rho) / denom
        variants = {
            "printed": mp.mpf(3) / 2 * mp.sqrt(inner_rho),
            "tau-arg": mp.mpf(3) / 2 * mp.sqrt(inner_tau),
            "derived": mp.mpf(2) / 3 * mp.sqrt(inner_tau),
        }
        return CExpansion(yq, tau, rho_bar, c0, c2, variants, r - tau, bj)


# ---------------------------------------------------------------------------
# Branch points of positive systems: det(I - Jacobian) = 0


@dataclass
class SystemBranchPoint:
    x0: mp.mpf
    values: list
    det_residual: mp.mpf
    fixed_point_residual: mp.mpf


def dlw_solve(F: Callable, k: int, x_hi, prec: int = DEFAULT_PREC,
              x_lo_frac: str = "0.05", grid: int = 24) -> SystemBranchPoint:
    """Branch point of a positive strongly connected system u = F(x; u).

    Marches x upward from x_lo, solving the system by fixed-point
    warm-up plus Newton; the branch point is bracketed either by a sign
    change of det(I - J_F) or by loss of solvability, then polished by
    Newton on the augmented system (u = F, det = 0) in k + 1 unknowns.
    ``x_hi`` must upper-bound the radius (any known dominating family).
    """
    with mp.workprec(prec):
        if isinstance(x_hi, Fraction):
            x_hi = mp.mpf(x_hi.numerator) / x_hi.denominator
        x_hi = mp.mpf(x_hi)
        x_lo = mp.mpf(x_lo_frac) * x_hi
        state = {"u": [mp.mpf(0)] * k}

        def solve_u(x):
            u = state["u"]
            for _ in range(12):
                u = F(x, u)
            u = newton_vector(lambda v: [vi - fi for vi, fi in zip(v, F(x, v))], u)
            state["u"] = u
            return u

        def det_of(x, u):
            h = mp.mpf(2) ** (-prec // 2)
            fu = F(x, u)
            jac = mp.matrix(k, k)
            for j in range(k):
                du = h * max(1, abs(u[j]))
                up = list(u)
                up[j] += du
                fp = F(x, up)
                for i in range(k):
                    jac[i, j] = (fp[i] - fu[i]) / du
            return mp.det(mp.eye(k) - jac)

        def det_at(x):
            return det_of(x, solve_u(x))

        xs = [x_lo + (x_hi - x_lo) * i / grid for i in range(grid + 1)]
        lo = None
        hi = None
        lo_det = None
        for x in xs:
            try:
                dv = det_at(x)
            except RuntimeError:
                if lo is None:
                    raise
                hi = x
                break
            if lo_det is not None and mp.sign(dv) != mp.sign(lo_det):
                hi = x
                break
            lo, lo_det = x, dv
        if hi is None:
            raise RuntimeError("no branch point before the radius bound")
        # The determinant vanishes like sqrt(1 - x/x0) along the branch, so
        # det^2 is asymptotically linear in x: iterate a two-point secant on
        # det^2 using only evaluations on the solvable side of the fold.
        state["u"] = [mp.mpf(0)] * k
        u_lo = solve_u(lo)
        x1, g1 = lo, lo_det
        x2, g2 = None, None
        tol = mp.mpf(2) ** (-(prec - 24))
        for _ in range(400):
            if x2 is not None:
                q1, q2 = g1 * g1, g2 * g2
                if q1 == q2:
                    break
                cand = (x1 * q2 - x2 * q1) / (q2 - q1)
                if not (x2 < cand < hi):
                    cand = (x2 + hi) / 2
            else:
                cand = (x1 + hi) / 2
            saved = list(state["u"])
            try:
                gv = det_at(cand)
            except RuntimeError:
                hi = cand
                state["u"] = saved
                continue
            if mp.sign(gv) != mp.sign(g1):
                hi = cand
                state["u"] = saved
                continue
            x1, g1, x2, g2 = (x2 if x2 is not None else x1,
                              g2 if g2 is not None else g1, cand, gv)
            u_lo = list(state["u"])
            if x2 is not None and x1 is not None and abs(x2 - x1) < tol * x2:
                break
        q1, q2 = g1 * g1, g2 * g2
        x0 = (x1 * q2 - x2 * q1) / (q2 - q1) if q1 != q2 else x2
        u0 = list(u_lo)
        with mp.workprec(2 * prec):
            fu = F(x2, u0)
            fp_res = max(abs(a - b) for a, b in zip(u0, fu))
        return SystemBranchPoint(x0, u0, abs(g2), fp_res)


def spantree_system_F(y=1) -> tuple[Callable, int]:
    """The six-series tree-marked system in positive fixed-point form."""
    yv = mp.mpf(y)

    def F(x, u):
        d, dbar, s, sbar, p, pbar = u
        esb = mp.exp(sbar)
        return [
            yv + s + p,
            yv + sbar + pbar,
            (yv + p) * x * d,
            (yv + p) * x * dbar + (yv + pbar) * x * d,
            yv * (esb - 1) + yv * s * esb + s * (esb - 1),
            (esb - sbar - 1) + yv * (esb - 1),
        ]

    return F, 6


def second_moment_system_F(y=1) -> tuple[Callable, int]:
    """The nine-series second-moment system in positive fixed-point form."""
    yv = mp.mpf(y)

    def F(x, u):
        dst, dti, dha, sst, sti, sha, pst, pti, pha = u
        esh = mp.exp(sha)
        return [
            yv + sst + pst,
            yv + sti + pti,
            yv + sha + pha,
            (yv + pst) * x * dst,
            (yv + pti) * x * dst + (yv + pst) * x * dti,
            (yv + pst) * x * dha + (yv + pha) * x * dst + 2 * (yv + pti) * x * dti,
            (sst * (esh - 1) + (1 + yv) * sti ** 2 * esh + yv * sst * esh
             + 2 * yv * sti * esh + yv * (esh - 1)),
            (yv + sti) * (esh - 1) + yv * sti * esh,
            (esh - sha - 1) + yv * (esh - 1),
        ]

    return F, 9


def maximal_system_F(y=1) -> tuple[Callable, int]:
    """The edge-maximal network pair in fixed-point form."""
    yv = mp.mpf(y)

    def F(x, u):
        a, b = u
        e = mp.exp(2 * (a + b) * x * a)
        return [yv * e, yv * x * (a + b) ** 2 * e]

    return F, 2


# ---------------------------------------------------------------------------
# Transfer theorem and coefficient fits


def gamma_neg_half():
    return mp.gamma(mp.mpf(-1) / 2)


def gamma_neg_three_half():
    return mp.gamma(mp.mpf(-3) / 2)


@dataclass
class AsymptoticEstimate:
    constant: mp.mpf
    poly_exponent: mp.mpf
    growth: mp.mpf               # rho^{-1}
    factorial: bool = False

    def evaluate(self, n: int):
        v = self.constant * mp.mpf(n) ** self.poly_exponent * self.growth ** n
        if self.factorial:
            v *= mp.factorial(n)
        return v


def transfer_estimate(exp: SingularExpansion, factorial: bool = False) -> AsymptoticEstimate:
    """Coefficient asymptotics from a singular expansion.

    1/2 type: A1 X contributes A1/Gamma(-1/2) n^{-3/2} rho^{-n};
    3/2 type: A3 X^3 contributes A3/Gamma(-3/2) n^{-5/2} rho^{-n}.
    """
    if exp.exponent_class == "1/2":
        c = exp.coeff(1) / gamma_neg_half()
        alpha = mp.mpf(-3) / 2
    elif exp.exponent_class == "3/2":
        c = exp.coeff(3) / gamma_neg_three_half()
        alpha = mp.mpf(-5) / 2
    else:
        raise ValueError(f"unsupported exponent class {exp.exponent_class}")
    return AsymptoticEstimate(c, alpha, 1 / exp.rho, factorial)


def _richardson(seq: list[tuple[int, mp.mpf]], depth: int) -> mp.mpf:
    """Iterated Richardson extrapolation for s_n = L + a/n + b/n^2 + ..."""
    vals = [mp.mpf(v) for (_, v) in seq]
    ns = [mp.mpf(n) for (n, _) in seq]
    depth = min(depth, len(vals) - 1)
    for j in range(1, depth + 1):
        nxt = []
        for i in range(j, len(vals)):
            nxt.append((ns[i] * vals[i] - (ns[i] - j) * vals[i - j]) / j)
        vals = nxt
    return vals[-1]


@dataclass
class RatioFit:
    rho: mp.mpf
    alpha: mp.mpf
    constant: mp.mpf
    confidence: mp.mpf           # spread of the last extrapolation depths
    monotone: bool


def ratio_fit(coeffs: Sequence, model_window: int = 24, depth: int = 6,
              prec: int = DEFAULT_PREC) -> RatioFit:
    """Fit a_n ~ c n^alpha rho^{-n} from exact coefficients.

    Uses ratio extrapolation for 1/rho, then n (q_n rho - 1) -> alpha,
    then a_n rho^n n^{-alpha} -> c; each limit is accelerated by
    Richardson extrapolation in 1/n.
    """
    with mp.workprec(prec):
        vals = []
        for c in coeffs:
            if isinstance(c, Fraction):
                vals.append(mp.mpf(c.numerator) / c.denominator)
            else:
                vals.append(mp.mpf(c))
        n_max = len(vals) - 1
        lo = max(2, n_max - model_window)
        qs = [(n, vals[n] / vals[n - 1]) for n in range(lo, n_max + 1)
              if vals[n - 1] != 0]
        growth = _richardson(qs, depth)
        growth_chk = _richardson(qs, depth - 1)
        rho = 1 / growth
        alphas = [(n, n * (q * rho - 1)) for (n, q) in qs]
        alpha = _richardson(alphas, depth - 1)
        cs = [(n, vals[n] * rho ** n * mp.mpf(n) ** (-alpha))
              for (n, _) in qs]
        constant = _richardson(cs, depth - 1)
        diffs = [qs[i + 1][1] - qs[i][1] for i in range(len(qs) - 1)]
        monotone = all(d <= 0 for d in diffs) or all(d >= 0 for d in diffs)
        return RatioFit(rho, alpha, constant, abs(growth - growth_chk), monotone)
