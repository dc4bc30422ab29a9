"""Grammar systems and the guarded fixed-point solver.

A grammar maps unknown names to expression DAGs built from constants,
the main variable, the edge variable y, references to unknowns, and the
ring operations +, -, *, integer powers, exp and reciprocal-of-unit.

The solver is demand driven: asking for the order-n coefficient of an
unknown forces the order-n coefficient of its rule, which recursively
forces whatever lower-order (or safely-earlier same-order) coefficients
it needs.  A system is x-guarded when this recursion terminates, which
the scheduler certifies statically: every reference must either sit
behind an x-shift or belong to an acyclic same-order dependency chain.
A genuine cycle is detected at solve time as well and reported as a
guard violation naming the offending unknown.

After the solve, every rule is re-evaluated against the solution with
plain series arithmetic; the residual must vanish identically.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Union

from .series import Coeff, Series, TruncPoly, _ciszero, _cinv

_BIG = 10 ** 9


class GuardViolation(RuntimeError):
    pass


class GrammarResidualError(RuntimeError):
    pass


class NegativeCoefficientError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Expressions


class Expr:
    def __add__(self, other):
        return Add(self, _wrap(other))

    def __radd__(self, other):
        return Add(_wrap(other), self)

    def __sub__(self, other):
        return Sub(self, _wrap(other))

    def __rsub__(self, other):
        return Sub(_wrap(other), self)

    def __mul__(self, other):
        return Mul(self, _wrap(other))

    def __rmul__(self, other):
        return Mul(_wrap(other), self)

    def __pow__(self, k: int):
        return Pow(self, k)

    def __neg__(self):
        return Sub(Const(Fraction(0)), self)


def _wrap(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Const(Fraction(v))
    raise TypeError(f"cannot use {v!r} in a grammar expression")


class Const(Expr):
    def __init__(self, value: Union[int, Fraction]):
        self.value = Fraction(value)


class MainVar(Expr):
    """The main series variable (x, or u for the kernel systems)."""


class YVar(Expr):
    """The edge-marking variable; a constant after y specialisation."""


class Ref(Expr):
    def __init__(self, name: str):
        self.name = name


class Add(Expr):
    def __init__(self, a: Expr, b: Expr):
        self.a, self.b = a, b


class Sub(Expr):
    def __init__(self, a: Expr, b: Expr):
        self.a, self.b = a, b


class Mul(Expr):
    def __init__(self, a: Expr, b: Expr):
        self.a, self.b = a, b


class Pow(Expr):
    def __init__(self, a: Expr, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("integer power must be nonnegative")
        self.a, self.k = a, k


class Exp(Expr):
    def __init__(self, a: Expr):
        self.a = a


class Recip(Expr):
    def __init__(self, a: Expr):
        self.a = a


class ApplyPS(Expr):
    """Substitute an expression (zero constant term) into a known series.

    ``outer`` is the list of coefficients g_0, g_1, ... of a known power
    series G; the node computes G(inner) = sum g_k inner^k.  Used for the
    rooted connected-graph equation, where the two-connected series is
    already solved.
    """

    def __init__(self, outer: list, inner: Expr):
        self.outer = list(outer)
        self.inner = inner

    @property
    def outer_valuation(self) -> int:
        for j, c in enumerate(self.outer):
            if not _ciszero(c):
                return j
        return _BIG


X = MainVar()
Y = YVar()


def exp(a: Expr) -> Expr:
    return Exp(a)


def recip(a: Expr) -> Expr:
    return Recip(a)


# ---------------------------------------------------------------------------
# Static guard analysis


def _min_order(e: Expr, hints: Mapping[str, int] | None = None) -> int:
    """Lower bound on the valuation of an expression in the main variable.

    ``hints`` declares valuation lower bounds for unknowns (part of the
    guard certificate); they are re-validated against the solution.
    """
    if isinstance(e, Const):
        return 0 if e.value != 0 else _BIG
    if isinstance(e, MainVar):
        return 1
    if isinstance(e, YVar):
        return 0
    if isinstance(e, Ref):
        return hints.get(e.name, 0) if hints else 0
    if isinstance(e, (Add, Sub)):
        return min(_min_order(e.a, hints), _min_order(e.b, hints))
    if isinstance(e, Mul):
        return min(_min_order(e.a, hints) + _min_order(e.b, hints), _BIG)
    if isinstance(e, Pow):
        return min(_min_order(e.a, hints) * e.k, _BIG)
    if isinstance(e, (Exp, Recip)):
        return 0
    if isinstance(e, ApplyPS):
        j = e.outer_valuation
        if j >= _BIG:
            return _BIG
        return min(j * _min_order(e.inner, hints), _BIG)
    raise TypeError(e)


def _zero_shift_refs(e: Expr, shift: int = 0,
                     hints: Mapping[str, int] | None = None) -> set[str]:
    """Unknowns an expression touches with no x-shift in front."""
    if isinstance(e, Ref):
        return {e.name} if shift == 0 else set()
    if isinstance(e, (Const, MainVar, YVar)):
        return set()
    if isinstance(e, (Add, Sub)):
        return _zero_shift_refs(e.a, shift, hints) | _zero_shift_refs(e.b, shift, hints)
    if isinstance(e, Mul):
        return (_zero_shift_refs(e.a, shift + _min_order(e.b, hints), hints)
                | _zero_shift_refs(e.b, shift + _min_order(e.a, hints), hints))
    if isinstance(e, Pow):
        if e.k == 0:
            return set()
        return _zero_shift_refs(e.a, shift + (e.k - 1) * _min_order(e.a, hints), hints)
    if isinstance(e, (Exp, Recip)):
        return _zero_shift_refs(e.a, shift, hints)
    if isinstance(e, ApplyPS):
        j = e.outer_valuation
        if j >= _BIG:
            return set()
        extra = (j - 1) * _min_order(e.inner, hints) if j >= 1 else 0
        return _zero_shift_refs(e.inner, shift + extra, hints)
    raise TypeError(e)


class GrammarSystem:
    """Unknown names mapped to rules, plus the static guard certificate.

    ``same_order_deps`` records which unknowns each rule touches without
    an x-shift; a topological order of that relation is the certificate
    that order-n coefficients are well defined given orders below n.
    ``min_orders`` declares valuation lower bounds used by the analysis
    and by the convolution bounds; the solver re-validates them.
    """

    def __init__(self, rules: Mapping[str, Expr],
                 min_orders: Mapping[str, int] | None = None):
        self.rules = dict(rules)
        self.min_orders = dict(min_orders or {})
        self.same_order_deps = {name: _zero_shift_refs(rule, 0, self.min_orders)
                                for name, rule in self.rules.items()}
        self.schedule = self._toposort()

    def _toposort(self) -> list[str]:
        pending = {n: set(d for d in self.same_order_deps[n] if d in self.rules)
                   for n in self.rules}
        order: list[str] = []
        while pending:
            ready = sorted(n for n, deps in pending.items() if not deps)
            if not ready:
                cyc = ", ".join(sorted(pending))
                raise GuardViolation(f"same-order dependency cycle among: {cyc}")
            for n in ready:
                order.append(n)
                del pending[n]
            for deps in pending.values():
                deps.difference_update(ready)
        return order


# ---------------------------------------------------------------------------
# Demand-driven evaluation nodes


class _Ctx:
    __slots__ = ("zero", "one", "active")

    def __init__(self, zero: Coeff, one: Coeff):
        self.zero = zero
        self.one = one
        self.active: set = set()


class _Node:
    __slots__ = ("vals", "lo")

    def __init__(self, lo: int):
        self.vals: list[Coeff] = []
        self.lo = lo

    def get(self, n: int, ctx: _Ctx) -> Coeff:
        vals = self.vals
        while len(vals) <= n:
            vals.append(self._compute(len(vals), ctx))
        return vals[n]

    def _compute(self, n: int, ctx: _Ctx) -> Coeff:
        raise NotImplementedError


class _ConstNode(_Node):
    __slots__ = ("value",)

    def __init__(self, value: Coeff, lo: int):
        super().__init__(lo)
        self.value = value

    def _compute(self, n, ctx):
        return self.value if n == 0 else ctx.zero


class _VarNode(_Node):
    def __init__(self):
        super().__init__(1)

    def _compute(self, n, ctx):
        return ctx.one if n == 1 else ctx.zero


class _RefNode(_Node):
    __slots__ = ("name", "target")

    def __init__(self, name: str):
        super().__init__(0)
        self.name = name
        self.target: "_UnknownNode | None" = None

    def _compute(self, n, ctx):
        assert self.target is not None
        return self.target.get(n, ctx)


class _UnknownNode(_Node):
    __slots__ = ("name", "rule")

    def __init__(self, name: str):
        super().__init__(0)
        self.name = name
        self.rule: _Node | None = None

    def _compute(self, n, ctx):
        key = (self.name, n)
        if key in ctx.active:
            raise GuardViolation(
                f"unknown {self.name!r} needs its own order-{n} coefficient; "
                f"the system is not x-guarded")
        ctx.active.add(key)
        try:
            assert self.rule is not None
            return self.rule.get(n, ctx)
        finally:
            ctx.active.discard(key)


class _AddNode(_Node):
    __slots__ = ("a", "b")

    def __init__(self, a: _Node, b: _Node):
        super().__init__(min(a.lo, b.lo))
        self.a, self.b = a, b

    def _compute(self, n, ctx):
        return self.a.get(n, ctx) + self.b.get(n, ctx)


class _SubNode(_AddNode):
    def _compute(self, n, ctx):
        return self.a.get(n, ctx) - self.b.get(n, ctx)


class _MulNode(_Node):
    __slots__ = ("a", "b")

    def __init__(self, a: _Node, b: _Node):
        super().__init__(min(a.lo + b.lo, _BIG))
        self.a, self.b = a, b

    def _compute(self, n, ctx):
        acc = ctx.zero
        a, b = self.a, self.b
        for k in range(a.lo, n - b.lo + 1):
            av = a.get(k, ctx)
            if _ciszero(av):
                continue
            bv = b.get(n - k, ctx)
            if not _ciszero(bv):
                acc = acc + av * bv
        return acc


class _ExpNode(_Node):
    __slots__ = ("a",)

    def __init__(self, a: _Node):
        super().__init__(0)
        self.a = a

    def _compute(self, n, ctx):
        if n == 0:
            if not _ciszero(self.a.get(0, ctx)):
                raise GuardViolation("exp of expression with nonzero constant term")
            return ctx.one
        acc = ctx.zero
        for k in range(max(1, self.a.lo), n + 1):
            av = self.a.get(k, ctx)
            if not _ciszero(av):
                acc = acc + (av * k) * self.vals[n - k]
        return acc / n


class _RecipNode(_Node):
    __slots__ = ("a", "inv0")

    def __init__(self, a: _Node):
        super().__init__(0)
        self.a = a
        self.inv0: Coeff | None = None

    def _compute(self, n, ctx):
        if n == 0:
            c0 = self.a.get(0, ctx)
            if _ciszero(c0):
                raise GuardViolation("reciprocal of series with zero constant term")
            self.inv0 = _cinv(c0)
            return self.inv0
        acc = ctx.zero
        for k in range(max(1, self.a.lo), n + 1):
            av = self.a.get(k, ctx)
            if not _ciszero(av):
                acc = acc + av * self.vals[n - k]
        return -(self.inv0 * acc)


class _ScaleNode(_Node):
    __slots__ = ("c", "a")

    def __init__(self, c: Coeff, a: _Node):
        super().__init__(a.lo if not _ciszero(c) else _BIG)
        self.c = c
        self.a = a

    def _compute(self, n, ctx):
        return self.c * self.a.get(n, ctx)


def _compile(e: Expr, memo: dict, refs: list, y_coeff: Coeff, ycap: int | None,
             hints: Mapping[str, int] | None = None) -> _Node:
    node = memo.get(id(e))
    if node is not None:
        return node
    if isinstance(e, Const):
        c: Coeff = (TruncPoly.from_fraction(e.value, ycap) if ycap is not None
                    else e.value)
        node = _ConstNode(c, 0 if e.value != 0 else _BIG)
    elif isinstance(e, MainVar):
        node = _VarNode()
    elif isinstance(e, YVar):
        node = _ConstNode(y_coeff, 0 if not _ciszero(y_coeff) else _BIG)
    elif isinstance(e, Ref):
        node = _RefNode(e.name)
        if hints:
            node.lo = hints.get(e.name, 0)
        refs.append(node)
    elif isinstance(e, Add):
        node = _AddNode(_compile(e.a, memo, refs, y_coeff, ycap, hints),
                        _compile(e.b, memo, refs, y_coeff, ycap, hints))
    elif isinstance(e, Sub):
        node = _SubNode(_compile(e.a, memo, refs, y_coeff, ycap, hints),
                        _compile(e.b, memo, refs, y_coeff, ycap, hints))
    elif isinstance(e, Mul):
        node = _MulNode(_compile(e.a, memo, refs, y_coeff, ycap, hints),
                        _compile(e.b, memo, refs, y_coeff, ycap, hints))
    elif isinstance(e, Pow):
        base = _compile(e.a, memo, refs, y_coeff, ycap, hints)
        if e.k == 0:
            one: Coeff = TruncPoly.one(ycap) if ycap is not None else Fraction(1)
            node = _ConstNode(one, 0)
        else:
            acc = base
            for _ in range(e.k - 1):
                acc = _MulNode(acc, base)
            node = acc
    elif isinstance(e, Exp):
        node = _ExpNode(_compile(e.a, memo, refs, y_coeff, ycap, hints))
    elif isinstance(e, Recip):
        node = _RecipNode(_compile(e.a, memo, refs, y_coeff, ycap, hints))
    elif isinstance(e, ApplyPS):
        inner = _compile(e.inner, memo, refs, y_coeff, ycap, hints)
        acc: _Node | None = None
        power: _Node | None = None
        for k, g in enumerate(e.outer):
            if k == 1:
                power = inner
            elif k >= 2:
                power = _MulNode(power, inner)
            if _ciszero(g):
                continue
            term = _ConstNode(g, 0) if k == 0 else _ScaleNode(g, power)
            acc = term if acc is None else _AddNode(acc, term)
        if acc is None:
            z: Coeff = TruncPoly.zero(ycap) if ycap is not None else Fraction(0)
            acc = _ConstNode(z, _BIG)
        node = acc
    else:
        raise TypeError(e)
    memo[id(e)] = node
    return node


def _mentions_y(e: Expr) -> bool:
    if isinstance(e, YVar):
        return True
    if isinstance(e, (Add, Sub, Mul)):
        return _mentions_y(e.a) or _mentions_y(e.b)
    if isinstance(e, (Exp, Recip, Pow)):
        return _mentions_y(e.a)
    if isinstance(e, ApplyPS):
        return _mentions_y(e.inner)
    return False


def fixed_point_solve(system: GrammarSystem, trunc: int,
                      ycap: int | None = None,
                      y_value: Union[int, Fraction, None] = None,
                      var: str = "x",
                      require_nonnegative: bool = True,
                      check_residual: bool = True) -> dict[str, Series]:
    """Solve a guarded grammar to the given truncation order.

    With ``ycap`` the result is bivariate (coefficients are truncated
    polynomials in y); otherwise y is specialised to ``y_value`` and the
    result is univariate.  Returns the unique solution grown from the
    all-zero seed, certified by a full residual re-check and (optionally)
    a nonnegativity scan.
    """
    if ycap is not None:
        y_coeff: Coeff = TruncPoly.variable(ycap)
        zero: Coeff = TruncPoly.zero(ycap)
        one: Coeff = TruncPoly.one(ycap)
    else:
        if y_value is None and any(_mentions_y(r) for r in system.rules.values()):
            raise GuardViolation("grammar mentions y; give y_value or set ycap")
        y_coeff = Fraction(y_value) if y_value is not None else Fraction(0)
        zero = Fraction(0)
        one = Fraction(1)

    memo: dict = {}
    refs: list[_RefNode] = []
    unknowns = {name: _UnknownNode(name) for name in system.rules}
    for name, rule in system.rules.items():
        unknowns[name].rule = _compile(rule, memo, refs, y_coeff, ycap,
                                       system.min_orders)
    for r in refs:
        if r.name not in unknowns:
            raise GuardViolation(f"rule references undefined unknown {r.name!r}")
        r.target = unknowns[r.name]

    ctx = _Ctx(zero, one)
    for n in range(trunc + 1):
        for name in system.schedule:
            unknowns[name].get(n, ctx)

    out = {name: Series(node.vals, trunc, var) for name, node in unknowns.items()}

    for name, declared in system.min_orders.items():
        actual = out[name].order()
        if actual < declared:
            raise GuardViolation(
                f"declared valuation {declared} for {name!r} is wrong "
                f"(actual {actual}); the guard certificate is invalid")

    if check_residual:
        residual_check(system, out, ycap=ycap, y_value=y_value)

    if require_nonnegative:
        for name, s in out.items():
            for n, c in enumerate(s.coeffs):
                vals = c.coeffs() if isinstance(c, TruncPoly) else [c]
                if any(v < 0 for v in vals):
                    raise NegativeCoefficientError(
                        f"unknown {name!r} has a negative coefficient at order {n}")
    return out


def eval_expr(e: Expr, env: Mapping[str, Series], trunc: int,
              ycap: int | None = None,
              y_value: Union[int, Fraction, None] = None,
              var: str = "x") -> Series:
    """Evaluate an expression against known series (residuals, assemblies)."""
    if isinstance(e, Const):
        return Series.constant(e.value, trunc, ycap, var)
    if isinstance(e, MainVar):
        return Series.variable(trunc, ycap, var)
    if isinstance(e, YVar):
        if ycap is not None:
            return Series.y_variable(trunc, ycap, var)
        if y_value is None:
            raise GuardViolation("expression mentions y; no specialisation given")
        return Series.constant(Fraction(y_value), trunc, ycap, var)
    if isinstance(e, Ref):
        return env[e.name].truncate(trunc)
    if isinstance(e, Add):
        return (eval_expr(e.a, env, trunc, ycap, y_value, var)
                + eval_expr(e.b, env, trunc, ycap, y_value, var))
    if isinstance(e, Sub):
        return (eval_expr(e.a, env, trunc, ycap, y_value, var)
                - eval_expr(e.b, env, trunc, ycap, y_value, var))
    if isinstance(e, Mul):
        return (eval_expr(e.a, env, trunc, ycap, y_value, var)
                * eval_expr(e.b, env, trunc, ycap, y_value, var))
    if isinstance(e, Pow):
        return eval_expr(e.a, env, trunc, ycap, y_value, var) ** e.k
    if isinstance(e, Exp):
        return eval_expr(e.a, env, trunc, ycap, y_value, var).exp()
    if isinstance(e, Recip):
        return eval_expr(e.a, env, trunc, ycap, y_value, var).reciprocal()
    if isinstance(e, ApplyPS):
        inner = eval_expr(e.inner, env, trunc, ycap, y_value, var)
        outer = Series(e.outer, min(len(e.outer) - 1, trunc), var)
        return outer.compose(inner)
    raise TypeError(e)


def residual_check(system: GrammarSystem, solution: Mapping[str, Series],
                   ycap: int | None = None,
                   y_value: Union[int, Fraction, None] = None) -> None:
    """Re-substitute the solution into every rule; nonzero residual is fatal."""
    for name, rule in system.rules.items():
        s = solution[name]
        rhs = eval_expr(rule, solution, s.trunc, ycap, y_value, s.var)
        diff = s - rhs
        if not diff.is_zero():
            raise GrammarResidualError(
                f"rule for {name!r} not satisfied; first mismatch at order {diff.order()}")
