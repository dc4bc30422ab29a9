"""Edge-density curves: singularities in y and the growth-vs-density map.

For a fixed edge density mu the natural weighting assigns y0^m to graphs
with m edges, where y0 solves -y0 R'(y0)/R(y0) = mu and R(y) is the
class's singularity curve.  The expected-spanning-tree growth constant
at density mu divides the baseline weighted growth by the tree-marked
one at their respective saddle parameters:

    growth(mu) = (R_base(y_b) y_b^mu) / (R_tree(y_t) y_t^mu).

Each class gets its own saddle parameter; the two ends of the density
interval approach the edge-maximal (2-tree) and low-excess regimes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .asymptotics import DEFAULT_PREC, _phi_by_name, branch_point, c_expansion
from .tseries import TSeries, branch_point_2x2, solve_scalar


class BranchCurve:
    """Continuation cache for the branch point of one implicit equation.

    The first point comes from the series-seeded locator; every other y
    is solved by Newton seeded from the nearest already-solved point.
    """

    def __init__(self, equation: str, prec: int = DEFAULT_PREC):
        self.equation = equation
        self.prec = prec
        self.points: dict = {}

    def solve(self, y) -> tuple:
        y = mp.mpf(y) if not isinstance(y, Fraction) \
            else mp.mpf(y.numerator) / y.denominator
        key = str(y)
        if key in self.points:
            return self.points[key]
        phi = _phi_by_name(self.equation)
        with mp.workprec(self.prec):
            if not self.points:
                bp = branch_point(self.equation, Fraction(1), self.prec)
                self.points[str(mp.mpf(1))] = (bp.x0, bp.z0)
                if key in self.points:
                    return self.points[key]
            near = min(self.points, key=lambda k: abs(mp.mpf(k) - y))
            seed_x, seed_z = self.points[near]
            ynear = mp.mpf(near)
            # walk in modest steps; the branch point moves smoothly in y
            steps = max(1, int(abs(mp.log(y / ynear)) / mp.mpf("0.25")) + 1)
            for i in range(1, steps + 1):
                yy = ynear * (y / ynear) ** (mp.mpf(i) / steps)
                jet = lambda x, z, order, yy=yy: phi(x, TSeries.var(z, order), yy, order)
                seed_x, seed_z = branch_point_2x2(jet, seed_x, seed_z)
            self.points[key] = (seed_x, seed_z)
            return self.points[key]

    def radius(self, y):
        return self.solve(y)[0]

    def radius_and_slope(self, y) -> tuple:
        """(R, dR/dy) by implicit differentiation: R' = -phi_y / phi_x."""
        yv = mp.mpf(y) if not isinstance(y, Fraction) \
            else mp.mpf(y.numerator) / y.denominator
        x0, z0 = self.solve(yv)
        phi = _phi_by_name(self.equation)
        with mp.workprec(self.prec):
            jx = phi(TSeries.var(x0, 1), z0, yv, 1)
            phi_x = jx.coeff(1)
            h = mp.mpf(2) ** (-self.prec // 3)
            phi_y = (phi(x0, z0, yv + h, 0).coeff(0)
                     - phi(x0, z0, yv - h, 0).coeff(0)) / (2 * h)
            return x0, -phi_y / phi_x

    def density(self, y):
        r, ry = self.radius_and_slope(y)
        yv = mp.mpf(y) if not isinstance(y, Fraction) \
            else mp.mpf(y.numerator) / y.denominator
        return -yv * ry / r


def singularity_curve(equation: str, y_grid, prec: int = DEFAULT_PREC,
                      fd_check: bool = False) -> list[dict]:
    """Table of (y, R, R_y) rows over a y grid, optionally cross-checked
    against central finite differences."""
    bc = BranchCurve(equation, prec)
    rows = []
    for y in y_grid:
        r, ry = bc.radius_and_slope(y)
        row = {"y": y, "R": r, "Ry": ry}
        if fd_check:
            h = mp.mpf("1e-20")
            yv = mp.mpf(y) if not isinstance(y, Fraction) \
                else mp.mpf(y.numerator) / y.denominator
            fd = (bc.radius(yv + h) - bc.radius(yv - h)) / (2 * h)
            row["Ry_fd_rel_err"] = abs(fd - ry) / abs(ry)
        rows.append(row)
    return rows


def density_map(bc: BranchCurve, mu, guess=None) -> mp.mpf:
    """The saddle parameter y0 with -y0 R'(y0)/R(y0) = mu.

    The density is increasing in y; the root is bracketed around the
    guess (an expanding window in log y) and refined to full precision.
    """
    mu = mp.mpf(mu)

    def h(t):
        return bc.density(mp.exp(t)) - mu

    t0 = mp.log(guess) if guess is not None else mp.mpf(0)
    width = mp.mpf("0.25")
    for _ in range(16):
        lo, hi = t0 - width, t0 + width
        vlo, vhi = h(lo), h(hi)
        if mp.sign(vlo) != mp.sign(vhi):
            return mp.exp(solve_scalar(h, lo, hi))
        # walk uphill toward the root before widening
        t0 = hi if vhi < 0 else lo
        width *= 2
        if width > 24:
            break
    raise ValueError(f"density {mu} outside the attainable interval")


@dataclass
class DensityCurvePoint:
    mu: mp.mpf
    y_tree: mp.mpf
    y_base: mp.mpf
    growth: mp.mpf


def growth_vs_density(mu_grid, prec: int = 128) -> list[DensityCurvePoint]:
    """Growth constant of the expected spanning-tree count per density.

    Walks the grid with continuation (each saddle seeds the next); grid
    points whose saddle solve fails are skipped, mirroring the known
    endpoint indeterminacy of the construction.
    """
    tree = BranchCurve("tree", prec)
    base = BranchCurve("base", prec)
    out = []
    guess_t, guess_b = None, None
    for mu in mu_grid:
        try:
            y_t = density_map(tree, mu, guess_t)
            y_b = density_map(base, mu, guess_b)
        except (ValueError, RuntimeError):
            continue
        guess_t, guess_b = y_t, y_b
        r_t = tree.radius(y_t)
        r_b = base.radius(y_b)
        mu_v = mp.mpf(mu)
        growth = (r_b * y_b ** mu_v) / (r_t * y_t ** mu_v)
        out.append(DensityCurvePoint(mu_v, y_t, y_b, growth))
    return out


def kappa_edge_density(prec: int = 160) -> mp.mpf:
    """Asymptotic edge density of baseline connected SP graphs.

    kappa = -(log rho)'(1) for the connected baseline singularity
    rho(y), computed by central differences of the full composition
    pipeline at y = 1 +- 1e-8.
    """
    h = Fraction(1, 10 ** 8)
    with mp.workprec(prec):
        lo = c_expansion(Fraction(1) - h, prec, flavor="base").rho_bar
        hi = c_expansion(Fraction(1) + h, prec, flavor="base").rho_bar
        hv = mp.mpf(h.numerator) / h.denominator
        return -(mp.log(hi) - mp.log(lo)) / (2 * hv)
