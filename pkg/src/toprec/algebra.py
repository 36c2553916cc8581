"""Exact scalar arithmetic.

Three layers live here:

* ``Rational``: arbitrary precision rationals (``flint.fmpq``).
* ``RatFunc``: rational functions over Q in a fixed tuple of parameter names,
  kept as a coprime numerator/denominator pair with monic denominator.
* ``ScalarExpr``: the coefficient type used everywhere else.  A value is a
  sum ``sum c_{b,e} beta^b t^e`` where ``b`` is 0 or 1 (``beta^2`` is rewritten
  to ``1 - alpha^2``), ``e`` runs over exponent vectors of the series
  parameters of the context (truncated at their declared orders) and the
  coefficients ``c`` are rationals or ``RatFunc`` values.

``TruncatedSeries`` is a plain one-parameter series whose coefficients are
scalars of any of the above kinds.
"""
from __future__ import annotations

import ast
import itertools
from typing import Iterable, Mapping

import flint

Rational = flint.fmpq

__all__ = [
    "Rational",
    "rational",
    "RatFunc",
    "Context",
    "ScalarExpr",
    "TruncatedSeries",
    "normalize",
    "equals",
    "series_truncate",
    "series_sqrt",
    "is_zero",
]


def rational(x) -> Rational:
    """Coerce ints, strings like ``"3/4"`` and rationals to ``Rational``."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, int):
        return Rational(x)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            p, q = s.split("/")
            return Rational(int(p), int(q))
        return Rational(int(s))
    if isinstance(x, flint.fmpz):
        return Rational(int(x))
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Rational(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def is_zero(c) -> bool:
    return not c


# ---------------------------------------------------------------------------
# rational functions in named parameters


def _fmt_rat(q: Rational) -> str:
    return str(q)


def _fmt_poly(p, names) -> str:
    """Print an fmpq_mpoly with explicit ``*`` and ``^`` (lex order, descending)."""
    d = p.to_dict()
    if not d:
        return "0"
    out = []
    for mon in sorted(d, reverse=True):
        c = d[mon]
        factors = []
        for name, e in zip(names, mon):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        neg = c < 0
        a = -c if neg else c
        if factors:
            body = "*".join(factors) if a == 1 else f"{a}*" + "*".join(factors)
        else:
            body = str(a)
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


class RatFunc:
    """Element of Q(params) in canonical form."""

    __slots__ = ("ring", "num", "den")

    def __init__(self, ring, num, den=None, _canonical=False):
        self.ring = ring
        if den is None:
            den = ring.constant(1)
        if not _canonical:
            if den.is_zero():
                raise ZeroDivisionError("division by the zero expression")
            if num.is_zero():
                den = ring.constant(1)
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num = num / g
                    den = den / g
                lc = den.leading_coefficient()
                if lc != 1:
                    num = num / lc
                    den = den / lc
        self.num = num
        self.den = den

    @classmethod
    def const(cls, ring, q) -> "RatFunc":
        return cls(ring, ring.constant(rational(q)), ring.constant(1), True)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.ring is not self.ring:
                raise ValueError("incompatible parameter declarations")
            return other
        if isinstance(other, (int, Rational)):
            return RatFunc(self.ring, self.ring.constant(rational(other)),
                           self.ring.constant(1), True)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return RatFunc(self.ring, self.num + o.num, self.den)
        return RatFunc(self.ring, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.ring, -self.num, self.den, True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            if not other:
                return RatFunc(self.ring, self.ring.constant(0), self.ring.constant(1), True)
            return RatFunc(self.ring, self.num * rational(other), self.den, True)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        return RatFunc(self.ring, (self.num / g1) * (o.num / g2),
                       (self.den / g2) * (o.den / g1))

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("division by the zero expression")
        return RatFunc(self.ring, self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.ring, self.num ** k, self.den ** k, True)

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            return self.den.is_one() and self.num == self.ring.constant(rational(other))
        if isinstance(other, RatFunc):
            return self.ring is other.ring and self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant_value())
        return hash((tuple(sorted(self.num.to_dict().items())), tuple(sorted(self.den.to_dict().items()))))

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Rational:
        n = self.num.to_dict()
        c = n.get((0,) * self.ring.nvars(), Rational(0))
        return Rational(c) / Rational(self.den.leading_coefficient())

    def subs(self, values: Mapping[str, Rational]) -> "RatFunc":
        vals = {k: rational(v) for k, v in values.items()}
        den = self.den.subs(vals)
        if den.is_zero():
            raise ZeroDivisionError("pole at the substituted point")
        return RatFunc(self.ring, self.num.subs(vals), den)

    def to_str(self) -> str:
        names = self.ring.names()
        n = _fmt_poly(self.num, names)
        if self.den.is_one():
            return n
        return f"({n})/({_fmt_poly(self.den, names)})"

    __str__ = to_str

    def __repr__(self):
        return f"RatFunc({self.to_str()})"


# ---------------------------------------------------------------------------
# contexts


class Context:
    """Declared parameter set for a computation.

    ``params`` are exact symbols (rational function coefficients),
    ``series`` maps formal parameter names to truncation orders and ``beta``
    adjoins ``beta = sqrt(1 - alpha^2)`` (``alpha`` must be an exact
    parameter).
    """

    _cache: dict = {}

    def __new__(cls, params: Iterable[str] = (), series: Mapping[str, int] | None = None,
                beta: bool = False, alpha_value=None):
        params = tuple(sorted(set(params)))
        series_items = tuple(sorted((series or {}).items()))
        if alpha_value is not None:
            alpha_value = rational(alpha_value)
            if not beta or "alpha" in params:
                raise ValueError("alpha_value is only meaningful with beta and no alpha symbol")
        key = (params, series_items, bool(beta), alpha_value)
        hit = cls._cache.get(key)
        if hit is not None:
            return hit
        if beta and "alpha" not in params and alpha_value is None:
            raise ValueError("beta requires alpha (symbol or fixed value)")
        names = set(params) | {s for s, _ in series_items}
        if len(names) != len(params) + len(series_items):
            raise ValueError("a parameter cannot be both exact and series-truncated")
        if "beta" in names:
            raise ValueError("'beta' is reserved")
        for s, o in series_items:
            if o < 0:
                raise ValueError("series order must be non-negative")
        self = object.__new__(cls)
        self.params = params
        self.series_names = tuple(s for s, _ in series_items)
        self.orders = tuple(o for _, o in series_items)
        self.beta = bool(beta)
        self.ring = flint.fmpq_mpoly_ctx.get(params, "lex") if params else None
        self.key = key
        self._zero_e = (0,) * len(self.series_names)
        self.alpha_value = alpha_value
        if beta:
            if alpha_value is not None:
                self._beta_sq = self.base(1 - alpha_value * alpha_value)
            else:
                a = self.ring.gens()[params.index("alpha")]
                self._beta_sq = RatFunc(self.ring, 1 - a * a)
            if not self._beta_sq:
                raise ValueError("degenerate curve: beta = 0 (alpha = +-1)")
        cls._cache[key] = self
        return self

    def __repr__(self):
        return (f"Context(params={self.params}, series={dict(zip(self.series_names, self.orders))}, "
                f"beta={self.beta}, alpha_value={self.alpha_value})")

    def __reduce__(self):
        return (Context, (self.params, dict(zip(self.series_names, self.orders)), self.beta,
                          self.alpha_value))

    # coefficient helpers
    def base(self, q):
        """Coefficient-field element for an int/rational/RatFunc."""
        if isinstance(q, RatFunc):
            if self.ring is None or q.ring is not self.ring:
                raise ValueError("incompatible parameter declarations")
            return q
        q = rational(q)
        if self.ring is None:
            return q
        return RatFunc.const(self.ring, q)

    def zero(self) -> "ScalarExpr":
        return ScalarExpr(self, {})

    def one(self) -> "ScalarExpr":
        return self.const(1)

    def const(self, q) -> "ScalarExpr":
        c = self.base(q)
        return ScalarExpr(self, {(0, self._zero_e): c} if c else {})

    def symbol(self, name: str) -> "ScalarExpr":
        if name == "beta":
            if not self.beta:
                raise ValueError("beta not declared in this context")
            return ScalarExpr(self, {(1, self._zero_e): self.base(1)})
        if name in self.params:
            g = self.ring.gens()[self.params.index(name)]
            return ScalarExpr(self, {(0, self._zero_e): RatFunc(self.ring, g, None, True)})
        if name in self.series_names:
            i = self.series_names.index(name)
            if self.orders[i] < 1:
                return self.zero()
            e = tuple(1 if j == i else 0 for j in range(len(self.series_names)))
            return ScalarExpr(self, {(0, e): self.base(1)})
        raise ValueError(f"undeclared symbol {name!r}")

    def coerce(self, x) -> "ScalarExpr":
        if isinstance(x, ScalarExpr):
            if x.ctx is not self:
                return x.lift(self)
            return x
        return self.const(x)

    def parse(self, text: str) -> "ScalarExpr":
        return parse_scalar(text, self)


# ---------------------------------------------------------------------------
# scalar expressions


def _add_into(d, key, c):
    v = d.get(key)
    if v is None:
        if c:
            d[key] = c
    else:
        v = v + c
        if v:
            d[key] = v
        else:
            del d[key]


class ScalarExpr:
    """Exact scalar in a :class:`Context`.  Immutable."""

    __slots__ = ("ctx", "_d")

    def __init__(self, ctx: Context, d: dict):
        self.ctx = ctx
        self._d = d

    # -- coercion
    def _other(self, other):
        if isinstance(other, ScalarExpr):
            if other.ctx is self.ctx:
                return other
            return other.lift(self.ctx)
        if isinstance(other, (int, Rational, RatFunc)):
            return self.ctx.const(other)
        return None

    def lift(self, ctx: Context) -> "ScalarExpr":
        """Embed into a larger context (all declarations must be present)."""
        src = self.ctx
        if src is ctx:
            return self
        if src.beta and (not ctx.beta or src.alpha_value != ctx.alpha_value):
            raise ValueError("incompatible parameter declarations")
        for p in src.params:
            if p not in ctx.params:
                raise ValueError("incompatible parameter declarations")
        for s in src.series_names:
            if s not in ctx.series_names:
                raise ValueError("incompatible parameter declarations")
        out = {}
        for (b, e), c in self._d.items():
            ne = [0] * len(ctx.series_names)
            ok = True
            for s, k in zip(src.series_names, e):
                j = ctx.series_names.index(s)
                if k > ctx.orders[j]:
                    ok = False
                ne[j] = k
            if not ok:
                continue
            if isinstance(c, RatFunc):
                mapping = [ctx.params.index(p) for p in src.params]
                num = _remap_poly(c.num, mapping, ctx.ring)
                den = _remap_poly(c.den, mapping, ctx.ring)
                cc = RatFunc(ctx.ring, num, den)
            else:
                cc = ctx.base(c)
            _add_into(out, (b, tuple(ne)), cc)
        return ScalarExpr(ctx, out)

    # -- arithmetic
    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        d = dict(self._d)
        for k, c in o._d.items():
            _add_into(d, k, c)
        return ScalarExpr(self.ctx, d)

    __radd__ = __add__

    def __neg__(self):
        return ScalarExpr(self.ctx, {k: -c for k, c in self._d.items()})

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            if not other:
                return ScalarExpr(self.ctx, {})
            q = rational(other)
            return ScalarExpr(self.ctx, {k: c * q for k, c in self._d.items()})
        o = self._other(other)
        if o is None:
            return NotImplemented
        ctx = self.ctx
        orders = ctx.orders
        d: dict = {}
        for (b1, e1), c1 in self._d.items():
            for (b2, e2), c2 in o._d.items():
                if orders:
                    e = tuple(x + y for x, y in zip(e1, e2))
                    if any(x > m for x, m in zip(e, orders)):
                        continue
                else:
                    e = e1
                c = c1 * c2
                b = b1 + b2
                if b == 2:
                    b = 0
                    c = c * ctx._beta_sq
                _add_into(d, (b, e), c)
        return ScalarExpr(ctx, d)

    __rmul__ = __mul__

    def _series_inverse(self) -> "ScalarExpr":
        """Inverse of an element without beta part."""
        ctx = self.ctx
        c0 = self._d.get((0, ctx._zero_e))
        if not c0:
            if not self._d:
                raise ZeroDivisionError("division by the zero expression")
            raise ZeroDivisionError("pole at the expansion point (no constant term)")
        inv0 = 1 / c0 if isinstance(c0, RatFunc) else Rational(1) / c0
        if len(self._d) == 1:
            return ScalarExpr(ctx, {(0, ctx._zero_e): inv0})
        # 1/(c0 (1 + R)) = inv0 * sum (-R)^j
        r = self * inv0 - 1
        total = sum(ctx.orders)
        out = ctx.one()
        term = ctx.one()
        for _ in range(total):
            term = term * (-r)
            if not term._d:
                break
            out = out + term
        return out * inv0

    def inverse(self) -> "ScalarExpr":
        ctx = self.ctx
        if not ctx.beta or all(b == 0 for b, _ in self._d):
            return self._series_inverse()
        A = ScalarExpr(ctx, {k: c for k, c in self._d.items() if k[0] == 0})
        B = ScalarExpr(ctx, {(0, k[1]): c for k, c in self._d.items() if k[0] == 1})
        beta = ctx.symbol("beta")
        D = A * A - B * B * ScalarExpr(ctx, {(0, ctx._zero_e): ctx._beta_sq})
        return (A - B * beta) * D._series_inverse()

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers")
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ctx.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    # -- predicates
    def __bool__(self):
        return bool(self._d)

    def is_zero(self) -> bool:
        return not self._d

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.ctx is not self.ctx:
            raise ValueError("incompatible parameter declarations")
        return self._d == o._d

    def __hash__(self):
        return hash(self.to_str())

    def is_constant(self) -> bool:
        if not self._d:
            return True
        if set(self._d) != {(0, self.ctx._zero_e)}:
            return False
        c = self._d[(0, self.ctx._zero_e)]
        return not isinstance(c, RatFunc) or c.is_constant()

    def constant_value(self) -> Rational:
        if not self._d:
            return Rational(0)
        if not self.is_constant():
            raise ValueError("expression is not a rational constant")
        c = self._d[(0, self.ctx._zero_e)]
        return c.constant_value() if isinstance(c, RatFunc) else c

    # -- access
    def coefficient(self, series_exponents: dict | None = None, beta_power: int = 0):
        """Coefficient (a rational or RatFunc) of ``beta^b * prod t^e``."""
        e = [0] * len(self.ctx.series_names)
        for k, v in (series_exponents or {}).items():
            e[self.ctx.series_names.index(k)] = v
        c = self._d.get((beta_power, tuple(e)))
        return c if c is not None else self.ctx.base(0)

    def series_coefficients(self, name: str) -> list["ScalarExpr"]:
        """Split along one series parameter; coefficients stay in this context."""
        i = self.ctx.series_names.index(name)
        out = [dict() for _ in range(self.ctx.orders[i] + 1)]
        for (b, e), c in self._d.items():
            ne = e[:i] + (0,) + e[i + 1:]
            out[e[i]][(b, ne)] = c
        return [ScalarExpr(self.ctx, d) for d in out]

    def subs(self, values: Mapping[str, object]) -> "ScalarExpr":
        """Substitute rational values for exact parameters (context unchanged)."""
        out = {}
        for k, c in self._d.items():
            if isinstance(c, RatFunc):
                c = c.subs(values)
            if c:
                out[k] = c
        return ScalarExpr(self.ctx, out)

    def to_str(self) -> str:
        return format_scalar(self)

    __str__ = to_str

    def __repr__(self):
        return f"ScalarExpr({self.to_str()!r})"

    def __reduce__(self):
        return (_rebuild_scalar, (self.ctx, self.to_str()))


def _rebuild_scalar(ctx, text):
    return parse_scalar(text, ctx)


def _remap_poly(p, mapping, ring):
    out = {}
    n = ring.nvars()
    for mon, c in p.to_dict().items():
        m = [0] * n
        for i, e in enumerate(mon):
            m[mapping[i]] = e
        out[tuple(m)] = c
    return ring.from_dict(out)


def normalize(e: ScalarExpr) -> ScalarExpr:
    """Canonical form.  Values are kept canonical on construction, so this is a copy."""
    return ScalarExpr(e.ctx, dict(e._d))


def equals(a: ScalarExpr, b: ScalarExpr) -> bool:
    if isinstance(a, ScalarExpr) and isinstance(b, ScalarExpr) and a.ctx is not b.ctx:
        raise ValueError("incompatible parameter declarations")
    return (a - b).is_zero() if isinstance(a, ScalarExpr) else a == b


# ---------------------------------------------------------------------------
# text format


def format_scalar(e: ScalarExpr) -> str:
    ctx = e.ctx
    if not e._d:
        return "0"
    parts = []
    for (b, ex) in sorted(e._d, key=lambda k: (k[1], k[0])):
        c = e._d[(b, ex)]
        mono = []
        if b:
            mono.append("beta")
        for name, k in zip(ctx.series_names, ex):
            if k == 1:
                mono.append(name)
            elif k > 1:
                mono.append(f"{name}^{k}")
        cs = c.to_str() if isinstance(c, RatFunc) else str(c)
        if mono:
            if cs == "1":
                parts.append("*".join(mono))
            elif cs == "-1":
                parts.append("-" + "*".join(mono))
            elif " " in cs:
                parts.append(f"({cs})*" + "*".join(mono))
            else:
                parts.append(f"{cs}*" + "*".join(mono))
        else:
            parts.append(f"({cs})" if len(e._d) > 1 and " " in cs else cs)
    out = parts[0]
    for p in parts[1:]:
        out += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
    return out


def _eval_node(node, ctx: Context, extra):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, ctx, extra)
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return extra["const"](node.value)
    if isinstance(node, ast.Name):
        return extra["symbol"](node.id)
    if isinstance(node, ast.UnaryOp):
        v = _eval_node(node.operand, ctx, extra)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            exp = node.right
            sign = 1
            if isinstance(exp, ast.UnaryOp) and isinstance(exp.op, (ast.USub, ast.UAdd)):
                sign = -1 if isinstance(exp.op, ast.USub) else 1
                exp = exp.operand
            if not (isinstance(exp, ast.Constant) and isinstance(exp.value, int)):
                raise ValueError("exponents must be integer literals")
            return extra["pow"](_eval_node(node.left, ctx, extra), sign * exp.value)
        left = _eval_node(node.left, ctx, extra)
        right = _eval_node(node.right, ctx, extra)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            return extra["div"](left, right)
    raise ValueError(f"unsupported syntax in expression: {ast.dump(node)[:60]}")


def parse_expression(text: str, ctx: Context, symbol, const, div, pow_):
    """Shared recursive evaluator for scalar and form text."""
    src = text.replace("^", "**").strip()
    if not src:
        raise ValueError("empty expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}: {exc.msg}") from None
    return _eval_node(tree, ctx, {"symbol": symbol, "const": const, "div": div, "pow": pow_})


def parse_scalar(text: str, ctx: Context) -> ScalarExpr:
    """Parse the textual scalar syntax (``+ - * / ^``, ints, declared names)."""
    return parse_expression(
        text, ctx,
        symbol=ctx.symbol,
        const=ctx.const,
        div=lambda a, b: a / b,
        pow_=lambda a, k: a ** k,
    )


# ---------------------------------------------------------------------------
# one-parameter truncated series


def _scal_inv(c):
    if isinstance(c, (ScalarExpr, RatFunc)):
        return c.inverse()
    return Rational(1) / c


class TruncatedSeries:
    """``sum_{k<=order} c_k param^k``; coefficients are scalars of any kind."""

    __slots__ = ("param", "order", "coeffs")

    def __init__(self, param: str, order: int, coeffs):
        if order < 0:
            raise ValueError("order must be non-negative")
        coeffs = list(coeffs)[: order + 1]
        zero = coeffs[0] * 0 if coeffs else Rational(0)
        coeffs += [zero] * (order + 1 - len(coeffs))
        self.param = param
        self.order = order
        self.coeffs = coeffs

    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.param, self.order, [other])
        if other.param != self.param:
            raise ValueError("series in different parameters")
        return other

    def __add__(self, other):
        o = self._check(other)
        n = min(self.order, o.order)
        return TruncatedSeries(self.param, n, [a + b for a, b in zip(self.coeffs[: n + 1], o.coeffs[: n + 1])])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.param, self.order, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        o = self._check(other) if isinstance(other, TruncatedSeries) else None
        if o is None:
            return TruncatedSeries(self.param, self.order, [c * other for c in self.coeffs])
        n = min(self.order, o.order)
        out = []
        for k in range(n + 1):
            acc = self.coeffs[0] * o.coeffs[k]
            for j in range(1, k + 1):
                acc = acc + self.coeffs[j] * o.coeffs[k - j]
            out.append(acc)
        return TruncatedSeries(self.param, n, out)

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedSeries":
        c0 = self.coeffs[0]
        if not c0:
            raise ZeroDivisionError("pole at the expansion point")
        inv0 = _scal_inv(c0)
        out = [inv0]
        for k in range(1, self.order + 1):
            acc = self.coeffs[1] * out[k - 1]
            for j in range(2, k + 1):
                acc = acc + self.coeffs[j] * out[k - j]
            out.append(-acc * inv0)
        return TruncatedSeries(self.param, self.order, out)

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.param, min(order, self.order), self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.param, self.order) == (other.param, other.order) and all(
            not (a - b) for a, b in zip(self.coeffs, other.coeffs))

    def __repr__(self):
        return f"TruncatedSeries({self.param}, {self.order}, {[str(c) for c in self.coeffs]})"

    def to_scalar(self, ctx: Context) -> ScalarExpr:
        """Re-express as a series-mode ScalarExpr of ``ctx``."""
        t = ctx.symbol(self.param)
        out = ctx.zero()
        tk = ctx.one()
        for c in self.coeffs:
            out = out + tk * ctx.coerce(c)
            tk = tk * t
        return out


def series_truncate(e, param: str, order: int) -> TruncatedSeries:
    """Taylor coefficients of ``e`` at ``param = 0``.

    ``e`` is either a ScalarExpr whose context declares ``param`` (exact or
    series mode) or a plain rational.  The coefficients live in the context
    obtained by removing ``param``.
    """
    if not isinstance(e, ScalarExpr):
        return TruncatedSeries(param, order, [rational(e)])
    ctx = e.ctx
    if param in ctx.series_names:
        sub = Context(ctx.params, {s: o for s, o in zip(ctx.series_names, ctx.orders) if s != param},
                      ctx.beta, ctx.alpha_value)
        i = ctx.series_names.index(param)
        if order > ctx.orders[i]:
            raise ValueError("requested order exceeds the stored truncation")
        coeffs = []
        for piece in e.series_coefficients(param)[: order + 1]:
            d = {}
            for (b, ex), c in piece._d.items():
                d[(b, ex[:i] + ex[i + 1:])] = c
            coeffs.append(ScalarExpr(sub, d))
        return TruncatedSeries(param, order, coeffs)
    if param not in ctx.params:
        raise ValueError(f"undeclared symbol {param!r}")
    if ctx.beta and param == "alpha":
        raise ValueError("cannot expand in alpha while beta is adjoined")
    rest = tuple(p for p in ctx.params if p != param)
    sub = Context(rest, dict(zip(ctx.series_names, ctx.orders)), ctx.beta, ctx.alpha_value)
    idx = ctx.params.index(param)
    out = [sub.zero() for _ in range(order + 1)]
    for (b, ex), c in e._d.items():
        if not isinstance(c, RatFunc):
            out[0] = out[0] + ScalarExpr(sub, {(b, ex): c})
            continue
        num = _split_poly(c.num, idx, rest, sub)
        den = _split_poly(c.den, idx, rest, sub)
        d0 = den.get(0)
        if d0 is None or not d0:
            raise ZeroDivisionError(f"pole at {param} = 0")
        inv = d0.inverse()
        q = []
        for m in range(order + 1):
            acc = num.get(m, sub.zero())
            for j in range(1, m + 1):
                if j in den:
                    acc = acc - den[j] * q[m - j]
            q.append(acc * inv)
        unit = ScalarExpr(sub, {(b, ex): sub.base(1)})
        for m in range(order + 1):
            out[m] = out[m] + q[m] * unit
    return TruncatedSeries(param, order, out)


def _split_poly(p, idx, rest, sub: Context) -> dict:
    """Coefficients (in ``sub``) of powers of the variable at position ``idx``."""
    groups: dict = {}
    for mon, c in p.to_dict().items():
        k = mon[idx]
        m = mon[:idx] + mon[idx + 1:]
        groups.setdefault(k, {})[m] = c
    out = {}
    for k, d in groups.items():
        if sub.ring is None:
            val = sub.const(Rational(d[()]))
        else:
            val = ScalarExpr(sub, {(0, sub._zero_e): RatFunc(sub.ring, sub.ring.from_dict(d))})
        out[k] = val
    return out


def _rational_sqrt(q: Rational) -> Rational:
    if q <= 0:
        raise ValueError("constant term is not a positive square")
    p, r = int(q.p), int(q.q)
    sp, sr = flint.fmpz(p).isqrt(), flint.fmpz(r).isqrt()
    if sp * sp != p or sr * sr != r:
        raise ValueError("constant term is not a perfect square")
    return Rational(int(sp), int(sr))


def series_sqrt(s: TruncatedSeries, scaled: bool = False) -> TruncatedSeries:
    """Square root with constant term 1.

    With ``scaled=True`` a rational perfect-square constant term ``c`` is
    factored out first and ``sqrt(c)`` multiplied back in.
    """
    c0 = s.coeffs[0]
    one = c0 == 1
    if not one:
        if not scaled:
            raise ValueError("constant term must equal 1 (use scaled=True for a square constant)")
        if isinstance(c0, ScalarExpr):
            if not c0.is_constant():
                raise ValueError("constant term not normalizable to 1")
            cval = c0.constant_value()
        else:
            cval = rational(c0)
        if not cval:
            raise ValueError("constant term is zero")
        root = _rational_sqrt(cval)
        inner = series_sqrt(s * (Rational(1) / cval))
        return inner * root
    out = [c0]
    for m in range(1, s.order + 1):
        acc = s.coeffs[m]
        for j in range(1, m):
            acc = acc - out[j] * out[m - j]
        out.append(acc * Rational(1, 2))
    return TruncatedSeries(s.param, s.order, out)


def all_exponents(orders):
    """Exponent vectors with each entry within its order."""
    return itertools.product(*[range(o + 1) for o in orders])
