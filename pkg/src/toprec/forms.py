"""Rational differential forms in several variables.

A :class:`DiffForm` is a finite sum of terms

    c * prod_i b_i(z_i) * prod_{i<j} (z_i - z_j)^(-m_ij) * prod_i dz_i^(deg_i)

where each one-variable factor ``b_i`` is a partial-fraction basis element

* ``(0, k)``: ``z^(-k)`` for any integer ``k`` (polynomials and poles at 0),
* ``(q, k)``: ``(z - q)^(-k)`` for a nonzero rational ``q`` and ``k >= 1``.

Every variable carries a differential degree (1 for an ordinary form, 0 for a
function, 2 for a quadratic differential).  The separable part of a form is
a unique normal form; the coupled ``(z_i - z_j)`` factors only appear for
Bergman-type objects.

Local expansions are computed term by term against a :class:`Chart`
(``z = p + eps``, ``z = 1/(p + eps)`` or ``z = 1/eps``) and return a
:class:`LaurentSeries` whose coefficients are forms in the remaining
variables.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

import flint

from .algebra import Context, Rational, ScalarExpr, RatFunc, parse_expression, rational

__all__ = [
    "INF",
    "Chart",
    "FormVariable",
    "DiffForm",
    "LaurentSeries",
    "laurent",
    "residue",
    "involute",
    "partial_fractions",
    "primitive_from",
    "is_symmetric",
    "parse_form",
]


class _Infinity:
    __slots__ = ()

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_get_inf, ())


INF = _Infinity()


def _get_inf():
    return INF


ONE = (Rational(0), 0)  # basis element "1"


def _q(x):
    return rational(x)


@dataclass(frozen=True)
class FormVariable:
    name: str
    color: int = 1
    chart: str = "finite"


# ---------------------------------------------------------------------------
# scalar power series on coefficient lists


def _zero_like(c):
    return c * 0


def s_mul(a: Sequence, b: Sequence, n: int) -> list:
    out = []
    la, lb = len(a), len(b)
    for k in range(n):
        acc = None
        for i in range(max(0, k - lb + 1), min(k, la - 1) + 1):
            t = a[i] * b[k - i]
            acc = t if acc is None else acc + t
        out.append(acc if acc is not None else Rational(0))
    return out


def s_inv(a: Sequence, n: int) -> list:
    inv0 = a[0].inverse() if isinstance(a[0], (ScalarExpr, RatFunc)) else Rational(1) / a[0]
    out = [inv0]
    for k in range(1, n):
        acc = None
        for j in range(1, min(k, len(a) - 1) + 1):
            t = a[j] * out[k - j]
            acc = t if acc is None else acc + t
        out.append(-(acc * inv0) if acc is not None else Rational(0))
    return out


def s_pow(a: Sequence, k: int, n: int) -> list:
    """a^k truncated to n terms; a[0] must be invertible when k < 0."""
    if k < 0:
        a = s_inv(a, n)
        k = -k
    out = [Rational(1)] + [Rational(0)] * (n - 1)
    base = list(a[:n])
    while k:
        if k & 1:
            out = s_mul(out, base, n)
        k >>= 1
        if k:
            base = s_mul(base, base, n)
    return out


# ---------------------------------------------------------------------------
# charts


class Chart:
    """Local coordinate eps around a point.

    kind ``"shift"``: z = p + eps; ``"inv"``: z = 1/(p + eps) (the involution
    composed with the shift); ``"inf"``: z = 1/eps.
    """

    __slots__ = ("kind", "p", "_key")

    def __init__(self, kind: str, p=None):
        if kind not in ("shift", "inv", "inf"):
            raise ValueError(kind)
        self.kind = kind
        self.p = None if kind == "inf" else _q(p)
        if kind == "inv" and not self.p:
            raise ValueError("inv chart needs a nonzero point")
        self._key = (kind, self.p)

    @staticmethod
    def at(point) -> "Chart":
        return Chart("inf") if point is INF else Chart("shift", point)

    def __hash__(self):
        return hash(self._key)

    def __eq__(self, other):
        return isinstance(other, Chart) and self._key == other._key

    def __repr__(self):
        return f"Chart({self.kind}, {self.p})"

    @property
    def center(self):
        """Value of z at eps = 0."""
        if self.kind == "inf":
            return INF
        if self.kind == "shift":
            return self.p
        return 1 / self.p

    def phi(self, n: int) -> list:
        """First n Taylor coefficients of z(eps) (finite charts only)."""
        if self.kind == "shift":
            return ([self.p, Rational(1)] + [Rational(0)] * n)[:n]
        return _inv_phi(self.p, n)

    def dphi(self, n: int) -> tuple[int, list]:
        """(valuation, coefficients) of dz/deps."""
        if self.kind == "shift":
            return 0, [Rational(1)] + [Rational(0)] * (n - 1)
        if self.kind == "inf":
            return -2, [Rational(-1)] + [Rational(0)] * (n - 1)
        ph = _inv_phi(self.p, n + 1)
        return 0, [ph[j + 1] * (j + 1) for j in range(n)]


@lru_cache(maxsize=None)
def _inv_phi_t(p, n):
    # 1/(p+eps) = sum (-1)^j eps^j / p^(j+1)
    return tuple(Rational((-1) ** j) / p ** (j + 1) for j in range(n))


def _inv_phi(p, n):
    return list(_inv_phi_t(p, n))


@lru_cache(maxsize=None)
def _dphi_pow(chart: Chart, deg: int, n: int):
    if deg == 0:
        return 0, (Rational(1),) + (Rational(0),) * (n - 1)
    v, c = chart.dphi(n)
    return v * deg, tuple(s_pow(c, deg, n))


def basis_val(b, chart: Chart) -> int:
    """Valuation in eps of the basis function b at the chart."""
    q, k = b
    if chart.kind == "inf":
        return k
    center = chart.center
    if q == 0:
        return -k if center == 0 else 0
    return -k if center == q else 0


@lru_cache(maxsize=None)
def basis_series(b, chart: Chart, n: int) -> tuple:
    """First n coefficients (from the valuation on) of b(z(eps))."""
    q, k = b
    if n <= 0:
        return ()
    if chart.kind == "inf":
        if q == 0:
            return (Rational(1),) + (Rational(0),) * (n - 1)
        return tuple(Rational(comb(k + r - 1, r)) * q ** r for r in range(n))
    phi = chart.phi(n + 1)
    p = phi[0]
    if q == 0 and k == 0:
        return (Rational(1),) + (Rational(0),) * (n - 1)
    if (q == 0 and p == 0) or (q != 0 and p == q):
        u = phi[1:n + 1]
        return tuple(s_pow(u, -k, n))
    delta = list(phi[:n])
    delta[0] = delta[0] - q
    return tuple(s_pow(delta, -k, n))


# ---------------------------------------------------------------------------
# basis arithmetic in one variable


def _binom_neg(k, r):
    """Coefficient of x^r in (1+x)^(-k)."""
    return (-1) ** r * comb(k + r - 1, r)


def _poles(b):
    q, k = b
    if q == 0:
        return {Rational(0): k} if k > 0 else {}
    return {q: k}


@lru_cache(maxsize=None)
def basis_mul(b1, b2) -> tuple:
    """Partial-fraction decomposition of b1*b2 as a tuple of (basis, coeff)."""
    q1, k1 = b1
    q2, k2 = b2
    if q1 == 0 and k1 == 0:
        return ((b2, Rational(1)),)
    if q2 == 0 and k2 == 0:
        return ((b1, Rational(1)),)
    if q1 == 0 and q2 == 0:
        return (((Rational(0), k1 + k2), Rational(1)),)
    if q1 == q2:
        return (((q1, k1 + k2), Rational(1)),)
    out = {}
    poles = {}
    for b in (b1, b2):
        for q, m in _poles(b).items():
            poles[q] = poles.get(q, 0) + m
    for q, m in poles.items():
        ch = Chart("shift", q)
        v1, v2 = basis_val(b1, ch), basis_val(b2, ch)
        s = s_mul(basis_series(b1, ch, m), basis_series(b2, ch, m), m)
        # coefficient of eps^(v1+v2+j) = s[j]; keep negative exponents
        for j in range(m):
            e = v1 + v2 + j
            if e < 0 and s[j]:
                out[(q, -e)] = out.get((q, -e), Rational(0)) + s[j]
    deg = -(k1 + k2)  # total behaviour z^deg at infinity
    if deg >= 0:
        ch = Chart("inf")
        n = deg + 1
        v1, v2 = basis_val(b1, ch), basis_val(b2, ch)
        s = s_mul(basis_series(b1, ch, n), basis_series(b2, ch, n), n)
        for j in range(n):
            e = v1 + v2 + j  # eps^e = z^-e
            if e <= 0 and s[j]:
                key = (Rational(0), e)
                out[key] = out.get(key, Rational(0)) + s[j]
    return tuple((b, c) for b, c in sorted(out.items()) if c)


@lru_cache(maxsize=None)
def basis_involute(b, deg: int) -> tuple:
    """b(1/z) * (d(1/z)/dz)^deg = b(1/z) * (-1/z^2)^deg, decomposed."""
    q, k = b
    sign = Rational((-1) ** deg)
    if q == 0:
        return (((Rational(0), -k + 2 * deg), sign),)
    # (1/z - q)^-k = (-q)^-k z^k (z - 1/q)^-k
    c = sign * Rational(1) / (-q) ** k
    mono = (Rational(0), -k + 2 * deg)
    return tuple((bb, c * cc) for bb, cc in basis_mul(mono, (1 / q, k)))


def basis_derivative(b) -> tuple:
    q, k = b
    if q == 0 and k == 0:
        return ()
    return (((q, k + 1), Rational(-k)),)


def basis_primitive(b) -> tuple:
    q, k = b
    if k == 1:
        raise ValueError("simple pole: the primitive needs a logarithm")
    return (((q, k - 1), Rational(1) / (1 - k)),)


def basis_value(b, x):
    q, k = b
    if x is INF:
        if k > 0:
            return Rational(0)
        if k == 0:
            return Rational(1)
        raise ValueError("basis function has a pole at infinity")
    d = x - q
    if k > 0 and not d:
        raise ZeroDivisionError("evaluation at a pole")
    return d ** (-k) if k else Rational(1)


# ---------------------------------------------------------------------------
# forms


def _add(d, key, c):
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


def _pair_key(i, j, m):
    """Normalize a coupled factor to i<j; returns (sign, (i, j, m))."""
    if i < j:
        return 1, (i, j, m)
    return (-1) ** m, (j, i, m)


def _merge_pairs(pairs):
    acc = {}
    for i, j, m in pairs:
        acc[(i, j)] = acc.get((i, j), 0) + m
    return tuple(sorted((i, j, m) for (i, j), m in acc.items() if m))


class DiffForm:
    """Sum of partial-fraction terms times differentials (see module doc)."""

    __slots__ = ("vars", "degrees", "terms")

    def __init__(self, vars: Sequence[str], terms: dict | None = None, degrees: Sequence[int] | None = None):
        self.vars = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("variable names must be unique")
        self.degrees = tuple(degrees) if degrees is not None else (1,) * len(self.vars)
        self.terms = terms if terms is not None else {}

    # -- constructors
    @classmethod
    def zero(cls, vars=(), degrees=None) -> "DiffForm":
        return cls(vars, {}, degrees)

    @classmethod
    def scalar(cls, c) -> "DiffForm":
        return cls((), {((), ()): c} if c else {}, ())

    @classmethod
    def monomial(cls, var: str, power: int, coeff=1, degree: int = 1) -> "DiffForm":
        """coeff * z^power dz^degree."""
        c = coeff if not isinstance(coeff, int) else Rational(coeff)
        return cls((var,), {(((Rational(0), -power),), ()): c} if c else {}, (degree,))

    @classmethod
    def pole(cls, var: str, q, order: int, coeff=1, degree: int = 1) -> "DiffForm":
        """coeff * (z - q)^(-order) dz^degree."""
        q = _q(q)
        if q == 0:
            return cls.monomial(var, -order, coeff, degree)
        if order < 1:
            raise ValueError("pole order must be positive")
        c = coeff if not isinstance(coeff, int) else Rational(coeff)
        return cls((var,), {(((q, order),), ()): c} if c else {}, (degree,))

    @classmethod
    def coupled(cls, v1: str, v2: str, m: int, coeff=1, degrees=(1, 1)) -> "DiffForm":
        """coeff * (z1 - z2)^(-m) dz1 dz2."""
        c = coeff if not isinstance(coeff, int) else Rational(coeff)
        return cls((v1, v2), {((ONE, ONE), ((0, 1, m),)): c} if c else {}, degrees)

    # -- basic protocol
    @property
    def n(self) -> int:
        return len(self.vars)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def scalar_value(self):
        if self.vars:
            raise ValueError("form still has variables")
        return self.terms.get(((), ()), Rational(0))

    def _aligned(self, other: "DiffForm") -> "DiffForm":
        if other.vars == self.vars:
            if other.degrees != self.degrees and other.terms and self.terms:
                raise ValueError("differential degrees differ")
            return other
        if set(other.vars) != set(self.vars):
            if not other.terms:
                return DiffForm(self.vars, {}, self.degrees)
            raise ValueError(f"variable sets differ: {self.vars} vs {other.vars}")
        return other.reorder(self.vars)

    def __add__(self, other):
        if isinstance(other, DiffForm):
            if not self.terms and self.vars != other.vars:
                return other
            o = self._aligned(other)
            d = dict(self.terms)
            for k, c in o.terms.items():
                _add(d, k, c)
            degs = self.degrees if self.terms or not o.terms else o.degrees
            return DiffForm(self.vars, d, degs)
        if other == 0:
            return self
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return DiffForm(self.vars, {k: -c for k, c in self.terms.items()}, self.degrees)

    def __sub__(self, other):
        if isinstance(other, DiffForm):
            return self + (-other)
        if other == 0:
            return self
        return NotImplemented

    def scale(self, c) -> "DiffForm":
        if isinstance(c, int):
            c = Rational(c)
        if not c:
            return DiffForm(self.vars, {}, self.degrees)
        d = {}
        for k, v in self.terms.items():
            w = v * c
            if w:
                d[k] = w
        return DiffForm(self.vars, d, self.degrees)

    def __mul__(self, other):
        if isinstance(other, DiffForm):
            return self._mul_form(other)
        if isinstance(other, (int, Rational, ScalarExpr, RatFunc)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Rational, ScalarExpr, RatFunc)):
            return self.scale(other)
        return NotImplemented

    def _mul_form(self, other: "DiffForm") -> "DiffForm":
        shared = [v for v in other.vars if v in self.vars]
        if not shared:
            return self.tensor(other)
        new_vars = self.vars + tuple(v for v in other.vars if v not in self.vars)
        pos = {v: i for i, v in enumerate(new_vars)}
        omap = [pos[v] for v in other.vars]
        degs = list(self.degrees) + [0] * (len(new_vars) - self.n)
        for v, dg in zip(other.vars, other.degrees):
            degs[pos[v]] += dg
        n = len(new_vars)
        d: dict = {}
        for (b1, p1), c1 in self.terms.items():
            for (b2, p2), c2 in other.terms.items():
                slots = [[(b, Rational(1))] for b in b1] + [[(ONE, Rational(1))] for _ in range(n - self.n)]
                for idx, b in zip(omap, b2):
                    if b == ONE:
                        continue
                    cur = slots[idx]
                    if len(cur) == 1 and cur[0][0] == ONE:
                        slots[idx] = [(b, cur[0][1])]
                    else:
                        slots[idx] = [(bb, cc * c0) for b0, c0 in cur for bb, cc in basis_mul(b0, b)]
                sign = 1
                pairs = list(p1)
                for i, j, m in p2:
                    s, pk = _pair_key(omap[i], omap[j], m)
                    sign *= s
                    pairs.append(pk)
                pairs = _merge_pairs(pairs)
                c = c1 * c2
                if sign < 0:
                    c = -c
                for combo in itertools.product(*slots):
                    coeff = c
                    for _, cc in combo:
                        if cc != 1:
                            coeff = coeff * cc
                    _add(d, (tuple(b for b, _ in combo), pairs), coeff)
        return DiffForm(new_vars, d, degs)

    def tensor(self, other: "DiffForm") -> "DiffForm":
        if set(self.vars) & set(other.vars):
            raise ValueError("tensor product needs disjoint variables")
        off = self.n
        d: dict = {}
        for (b1, p1), c1 in self.terms.items():
            for (b2, p2), c2 in other.terms.items():
                pairs = p1 + tuple((i + off, j + off, m) for i, j, m in p2) if p2 else p1
                _add(d, (b1 + b2, pairs), c1 * c2)
        return DiffForm(self.vars + other.vars, d, self.degrees + other.degrees)

    def __pow__(self, k: int) -> "DiffForm":
        if k < 0:
            raise ValueError("negative powers of forms are not supported")
        out = DiffForm(self.vars, {(tuple(ONE for _ in self.vars), ()): Rational(1)},
                       tuple(0 for _ in self.vars))
        for _ in range(k):
            out = out._mul_form(self)
        return out

    def __eq__(self, other):
        if isinstance(other, DiffForm):
            if not self.terms and not other.terms:
                return True
            try:
                return (self - other).is_zero()
            except ValueError:
                return False
        if other == 0:
            return self.is_zero()
        return NotImplemented

    __hash__ = None

    # -- variable management
    def rename(self, mapping: dict) -> "DiffForm":
        return DiffForm(tuple(mapping.get(v, v) for v in self.vars), self.terms, self.degrees)

    def reorder(self, new_vars: Sequence[str]) -> "DiffForm":
        new_vars = tuple(new_vars)
        if new_vars == self.vars:
            return self
        if sorted(new_vars) != sorted(self.vars):
            raise ValueError("reorder needs a permutation of the variables")
        src = [self.vars.index(v) for v in new_vars]  # new position -> old
        inv = {o: i for i, o in enumerate(src)}
        d = {}
        for (b, p), c in self.terms.items():
            nb = tuple(b[o] for o in src)
            sign = 1
            np_ = []
            for i, j, m in p:
                s, pk = _pair_key(inv[i], inv[j], m)
                sign *= s
                np_.append(pk)
            d[(nb, tuple(sorted(np_)))] = -c if sign < 0 else c
        return DiffForm(new_vars, d, tuple(self.degrees[o] for o in src))

    def index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise ValueError(f"form has no variable {var!r}") from None

    def drop_var(self, var: str) -> "DiffForm":
        """Remove a variable on which no term depends."""
        i = self.index(var)
        d = {}
        for (b, p), c in self.terms.items():
            if b[i] != ONE or any(i in (a, e) for a, e, _ in p):
                raise ValueError("form depends on the variable")
            np_ = tuple((a - (a > i), e - (e > i), m) for a, e, m in p)
            d[(b[:i] + b[i + 1:], np_)] = c
        return DiffForm(self.vars[:i] + self.vars[i + 1:], d, self.degrees[:i] + self.degrees[i + 1:])

    def with_degree(self, var: str, degree: int) -> "DiffForm":
        i = self.index(var)
        degs = list(self.degrees)
        degs[i] = degree
        return DiffForm(self.vars, self.terms, degs)

    def has_coupling(self, var: str | None = None) -> bool:
        if var is None:
            return any(p for _, p in self.terms)
        i = self.index(var)
        return any(i in (a, e) for _, p in self.terms for a, e, _ in p)

    def map_coeffs(self, fn) -> "DiffForm":
        d = {}
        for k, c in self.terms.items():
            w = fn(c)
            if w:
                d[k] = w
        return DiffForm(self.vars, d, self.degrees)

    # -- one-variable global operations
    def involute(self, var: str) -> "DiffForm":
        """Substitute var -> 1/var including the Jacobian of the differential."""
        i = self.index(var)
        if self.has_coupling(var):
            raise NotImplementedError("involution of a coupled factor")
        deg = self.degrees[i]
        d = {}
        for (b, p), c in self.terms.items():
            for nb, cc in basis_involute(b[i], deg):
                _add(d, (b[:i] + (nb,) + b[i + 1:], p), c * cc)
        return DiffForm(self.vars, d, self.degrees)

    def merge(self, keep: str, drop: str) -> "DiffForm":
        """Restrict to the diagonal drop = keep (degrees add)."""
        i, j = self.index(keep), self.index(drop)
        d = {}
        for (b, p), c in self.terms.items():
            pairs = []
            sign = 1
            for a, e, m in p:
                if {a, e} == {i, j}:
                    raise ZeroDivisionError("coupled factor is singular on the diagonal")
                a2 = i if a == j else a
                e2 = i if e == j else e
                s, pk = _pair_key(a2, e2, m)
                sign *= s
                pairs.append(pk)
            pairs = [(a - (a > j), e - (e > j), m) for a, e, m in pairs]
            pairs = _merge_pairs(pairs)
            cc0 = -c if sign < 0 else c
            rest = b[:j] + b[j + 1:]
            ii = i - (i > j)
            for nb, cc in basis_mul(b[i], b[j]):
                _add(d, (rest[:ii] + (nb,) + rest[ii + 1:], pairs), cc0 * cc)
        degs = list(self.degrees)
        degs[i] += degs[j]
        del degs[j]
        vars_ = self.vars[:j] + self.vars[j + 1:]
        return DiffForm(vars_, d, degs)

    def evaluate(self, var: str, value) -> "DiffForm":
        """Set var to a rational value (or INF); the differential in var is dropped."""
        i = self.index(var)
        d = {}
        for (b, p), c in self.terms.items():
            val = basis_value(b[i], value)
            if not val:
                continue
            rest = list(b[:i] + (ONE,) + b[i + 1:])
            extra = []
            pairs = []
            for a, e, m in p:
                if i in (a, e):
                    if value is INF:
                        val = Rational(0)
                        break
                    other = e if a == i else a
                    # (value - z)^-m if var first else (z - value)^-m
                    sgn = (-1) ** m if a == i else 1
                    extra.append((other, (_q(value), m) if value != 0 else (Rational(0), m), sgn))
                else:
                    pairs.append((a, e, m))
            if not val:
                continue
            slots = [[(bb, Rational(1))] for bb in rest]
            coeff = c * val
            for other, bb, sgn in extra:
                if sgn < 0:
                    coeff = -coeff
                slots[other] = [(x, cc * c0) for b0, c0 in slots[other] for x, cc in basis_mul(b0, bb)]
            pairs = [(a - (a > i), e - (e > i), m) for a, e, m in pairs]
            slots = slots[:i] + slots[i + 1:]
            for combo in itertools.product(*slots):
                cf = coeff
                for _, cc in combo:
                    if cc != 1:
                        cf = cf * cc
                _add(d, (tuple(x for x, _ in combo), tuple(pairs)), cf)
        return DiffForm(self.vars[:i] + self.vars[i + 1:], d, self.degrees[:i] + self.degrees[i + 1:])

    def derivative(self, var: str) -> "DiffForm":
        """Exterior derivative in var of a function (degree 0 -> 1)."""
        i = self.index(var)
        if self.degrees[i] != 0:
            raise ValueError("derivative is defined on functions of the variable")
        if self.has_coupling(var):
            raise NotImplementedError("derivative of a coupled factor")
        d = {}
        for (b, p), c in self.terms.items():
            for nb, cc in basis_derivative(b[i]):
                _add(d, (b[:i] + (nb,) + b[i + 1:], p), c * cc)
        return self.__class__(self.vars, d, self.degrees).with_degree(var, 1)

    def primitive(self, var: str, basepoint) -> "DiffForm":
        """Antiderivative F in var (degree 1 -> 0) with F(basepoint) = 0."""
        i = self.index(var)
        if self.degrees[i] != 1:
            raise ValueError("primitive needs a one-form in the variable")
        d = {}
        for (b, p), c in self.terms.items():
            cpl = [t for t in p if i in t[:2]]
            if cpl:
                if len(cpl) > 1 or b[i] != ONE:
                    raise NotImplementedError("primitive of a mixed coupled term")
                a, e, m = cpl[0]
                if m == 1:
                    raise ValueError("simple pole: the primitive needs a logarithm")
                # d/dz_a (z_a - z_e)^(1-m) = (1-m)(..)^-m ; d/dz_e gives -(1-m)
                fac = Rational(1) / (1 - m) if a == i else Rational(1) / (m - 1)
                rest = tuple(t for t in p if t is not cpl[0]) + ((a, e, m - 1),) if m - 1 else \
                    tuple(t for t in p if t is not cpl[0])
                _add(d, (b, _merge_pairs(rest)), c * fac)
                continue
            for nb, cc in basis_primitive(b[i]):
                _add(d, (b[:i] + (nb,) + b[i + 1:], p), c * cc)
        F = DiffForm(self.vars, d, self.degrees[:i] + (0,) + self.degrees[i + 1:])
        if basepoint is None:
            return F
        const = F.evaluate(var, basepoint)
        return F - const.insert_var(var, i, 0)

    def insert_var(self, var: str, pos: int, degree: int = 0) -> "DiffForm":
        """Add a variable on which nothing depends."""
        d = {}
        for (b, p), c in self.terms.items():
            np_ = tuple((a + (a >= pos), e + (e >= pos), m) for a, e, m in p)
            d[(b[:pos] + (ONE,) + b[pos:], np_)] = c
        return DiffForm(self.vars[:pos] + (var,) + self.vars[pos:], d,
                        self.degrees[:pos] + (degree,) + self.degrees[pos:])

    # -- local analysis
    def expand(self, charts: dict, upto: int) -> "LaurentSeries":
        """Substitute every variable in ``charts`` by its chart in one common eps."""
        return local_expand(self, charts, upto)

    def laurent(self, var: str, point, window: tuple[int, int]) -> "LaurentSeries":
        lo, hi = window
        s = local_expand(self, {var: Chart.at(point)}, hi)
        s.lo = lo
        return s

    def residue(self, var: str, point) -> "DiffForm":
        return local_expand(self, {var: Chart.at(point)}, -1).coefficient(-1)

    def min_val(self, var: str, chart: Chart) -> int:
        """Lower bound for the eps-valuation of the expansion in var."""
        i = self.index(var)
        dv = chart.dphi(1)[0] * self.degrees[i]
        best = None
        for (b, p), _ in self.terms.items():
            v = basis_val(b[i], chart) + dv
            for a, e, m in p:
                if i in (a, e) and chart.kind == "inf":
                    v += m
            best = v if best is None else min(best, v)
        return best if best is not None else 0

    def poles(self, var: str) -> dict:
        """Finite poles in var (separable part) with maximal orders."""
        i = self.index(var)
        out = {}
        for (b, p), _ in self.terms.items():
            for q, k in _poles(b[i]).items():
                out[q] = max(out.get(q, 0), k)
        return out

    # -- printing
    def to_str(self) -> str:
        return format_form(self)

    __str__ = to_str

    def __repr__(self):
        return f"DiffForm({self.to_str()!r})"


# ---------------------------------------------------------------------------
# Laurent series with form coefficients


class LaurentSeries:
    """Truncated Laurent series in a local parameter.

    ``coeffs`` maps exponents to coefficients (DiffForm or scalars); every
    exponent ``<= upto`` not present is zero.  ``lo`` is the lower end of
    the reporting window (informational).
    """

    __slots__ = ("coeffs", "upto", "vars", "degrees", "lo")

    def __init__(self, coeffs: dict, upto: int, vars=(), degrees=()):
        self.coeffs = {k: v for k, v in coeffs.items() if k <= upto and v}
        self.upto = upto
        self.vars = tuple(vars)
        self.degrees = tuple(degrees)
        self.lo = None

    @property
    def val(self) -> int:
        return min(self.coeffs) if self.coeffs else self.upto + 1

    def coefficient(self, k: int) -> DiffForm:
        if k > self.upto:
            raise ValueError("exponent outside the computed window")
        c = self.coeffs.get(k)
        return c if c is not None else DiffForm(self.vars, {}, self.degrees)

    def window(self, lo: int, hi: int) -> dict:
        return {k: self.coefficient(k) for k in range(lo, hi + 1)}

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        d = dict(self.coeffs)
        for k, v in other.coeffs.items():
            d[k] = d[k] + v if k in d else v
        return LaurentSeries(d, min(self.upto, other.upto), self.vars or other.vars,
                             self.degrees or other.degrees)

    def __neg__(self):
        return LaurentSeries({k: -v for k, v in self.coeffs.items()}, self.upto, self.vars, self.degrees)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LaurentSeries":
        return LaurentSeries({k: v * c for k, v in self.coeffs.items()}, self.upto, self.vars, self.degrees)

    def mul(self, other: "LaurentSeries", upto: int | None = None) -> "LaurentSeries":
        prec = min(self.upto + other.val, other.upto + self.val)
        if upto is None or upto > prec:
            upto = prec
        d = {}
        for ka, va in self.coeffs.items():
            for kb, vb in other.coeffs.items():
                k = ka + kb
                if k > upto:
                    continue
                t = va * vb
                if k in d:
                    d[k] = d[k] + t
                else:
                    d[k] = t
        vars_ = (self.vars + other.vars)
        return LaurentSeries(d, upto, vars_, self.degrees + other.degrees)

    def residue_pairing(self, other: "LaurentSeries"):
        """Coefficient of eps^-1 of self*other (None when it vanishes)."""
        if self.coeffs and other.coeffs:
            if -1 - self.val > other.upto or -1 - other.val > self.upto:
                raise ValueError("insufficient precision for the residue")
        acc = None
        for ka, va in self.coeffs.items():
            vb = other.coeffs.get(-1 - ka)
            if vb is None:
                continue
            t = va * vb
            acc = t if acc is None else acc + t
        return acc

    def inverse(self, upto: int) -> "LaurentSeries":
        """Inverse of a scalar Laurent series, valid up to eps^upto."""
        v = self.val
        if not self.coeffs:
            raise ZeroDivisionError("inverse of a zero series")
        n = upto + v + 1
        if n <= 0:
            return LaurentSeries({}, upto)
        if self.upto - v + 1 < n:
            raise ValueError("insufficient precision for the inverse")
        a = [_scalar_of(self.coeffs.get(v + j, Rational(0))) for j in range(n)]
        inv = s_inv(a, n)
        return LaurentSeries({j - v: c for j, c in enumerate(inv)}, upto)

    def __repr__(self):
        return f"LaurentSeries(upto={self.upto}, {{{', '.join(f'{k}: {v}' for k, v in sorted(self.coeffs.items()))}}})"


def _scalar_of(c):
    if isinstance(c, DiffForm):
        return c.scalar_value()
    return c


def scalar_series(s: LaurentSeries) -> LaurentSeries:
    """Convert coefficients of a series over zero variables to plain scalars."""
    return LaurentSeries({k: _scalar_of(v) for k, v in s.coeffs.items()}, s.upto)


def local_expand(f: DiffForm, charts: dict, upto: int) -> LaurentSeries:
    """Series in eps of f with the variables in ``charts`` substituted.

    Coefficients are forms in the remaining variables (same relative order).
    All exponents up to and including ``upto`` are exact.
    """
    sub_idx = [f.index(v) for v in charts]
    sub_charts = [charts[v] for v in charts]
    sub_set = set(sub_idx)
    rem = [i for i in range(f.n) if i not in sub_set]
    rem_pos = {i: r for r, i in enumerate(rem)}
    rem_vars = tuple(f.vars[i] for i in rem)
    rem_degs = tuple(f.degrees[i] for i in rem)
    chart_of = dict(zip(sub_idx, sub_charts))
    dvals = {}
    for i, ch in zip(sub_idx, sub_charts):
        dvals[i] = ch.dphi(1)[0] * f.degrees[i]
    dv_total = sum(dvals.values())
    out: dict = {}
    cache: dict = {}

    for (b, p), c in f.terms.items():
        # valuations
        v = dv_total
        for i, ch in zip(sub_idx, sub_charts):
            v += basis_val(b[i], ch)
        cpl_scalar = []   # both ends substituted
        cpl_half = []     # one end substituted
        rest_pairs = []
        for a, e, m in p:
            ia, ie = a in sub_set, e in sub_set
            if ia and ie:
                cpl_scalar.append((a, e, m))
            elif ia or ie:
                cpl_half.append((a, e, m))
            else:
                rest_pairs.append((rem_pos[a], rem_pos[e], m))
        pv = []
        for a, e, m in cpl_scalar:
            vv, _ = _pair_scalar_val(chart_of[a], chart_of[e], m)
            pv.append(vv)
            v += vv
        for a, e, m in cpl_half:
            ch = chart_of[a] if a in sub_set else chart_of[e]
            v += m if ch.kind == "inf" else 0
        n = upto - v + 1
        if n <= 0:
            continue
        key = (tuple(b[i] for i in sub_idx), tuple(cpl_scalar), n)
        s = cache.get(key)
        if s is None:
            s = [Rational(1)] + [Rational(0)] * (n - 1)
            for i, ch in zip(sub_idx, sub_charts):
                bi = b[i]
                if not (bi[0] == 0 and bi[1] == 0 and ch.kind != "inf"):
                    s = s_mul(s, basis_series(bi, ch, n), n)
                if f.degrees[i]:
                    s = s_mul(s, _dphi_pow(ch, f.degrees[i], n)[1], n)
            for a, e, m in cpl_scalar:
                s = s_mul(s, _pair_scalar_series(chart_of[a], chart_of[e], m, n), n)
            cache[key] = s
        rest_b = tuple(b[i] for i in rem)
        rp = _merge_pairs(rest_pairs) if rest_pairs else ()
        if not cpl_half:
            for j in range(n):
                sj = s[j]
                if sj:
                    _add_series(out, v + j, (rest_b, rp), c * sj)
            continue
        # coupled factors with one free end: coefficient series in the other variable
        parts = [[(0, (), Rational(1))]]  # list of (exponent offset, ((pos, basis),...), coeff)
        for a, e, m in cpl_half:
            if a in sub_set:
                ch, other, sgn = chart_of[a], e, 1
            else:
                ch, other, sgn = chart_of[e], a, (-1) ** m
            parts.append([(off, ((rem_pos[other], bb),), cc * sgn)
                          for off, bb, cc in _pair_half_series(ch, m, n)])
        for combo in itertools.product(*parts):
            off = sum(x[0] for x in combo)
            cc = Rational(1)
            slots = [[(bb, Rational(1))] for bb in rest_b]
            for _, fac, cf in combo:
                cc = cc * cf
                for pos, bb in fac:
                    slots[pos] = [(x, y * z) for b0, z in slots[pos] for x, y in basis_mul(b0, bb)]
            for j in range(n - off):
                sj = s[j]
                if not sj:
                    continue
                for sc in itertools.product(*slots):
                    cf = c * sj * cc
                    for _, y in sc:
                        if y != 1:
                            cf = cf * y
                    _add_series(out, v + off + j, (tuple(x for x, _ in sc), rp), cf)
    res = {k: DiffForm(rem_vars, d, rem_degs) for k, d in out.items() if d}
    return LaurentSeries(res, upto, rem_vars, rem_degs)


def _add_series(out, k, key, c):
    d = out.get(k)
    if d is None:
        d = out[k] = {}
    _add(d, key, c)


def _chart_series(ch: Chart, n: int):
    """(valuation, coefficients) of z(eps)."""
    if ch.kind == "inf":
        return -1, [Rational(1)] + [Rational(0)] * (n - 1)
    return 0, ch.phi(n)


def _pair_scalar_val(ca: Chart, ce: Chart, m: int):
    d = _pair_delta(ca, ce, 8)
    return d[0] * -m, None


@lru_cache(maxsize=None)
def _pair_delta(ca: Chart, ce: Chart, n: int):
    """(valuation, normalized coefficients) of z_a(eps) - z_e(eps)."""
    va, sa = _chart_series(ca, n + 2)
    ve, se = _chart_series(ce, n + 2)
    if va == -1 and ve == -1:
        raise ZeroDivisionError("coupled factor singular at infinity on both ends")
    if va == -1:
        # 1/eps - ze = eps^-1 (1 - eps ze)
        return -1, tuple([Rational(1)] + [-x for x in se[: n + 1]])
    if ve == -1:
        return -1, tuple([Rational(-1)] + list(sa[: n + 1]))
    diff = [x - y for x, y in zip(sa, se)]
    k = 0
    while k < len(diff) and not diff[k]:
        k += 1
    if k >= len(diff) - 1:
        raise ZeroDivisionError("coupled factor vanishes identically")
    return k, tuple(diff[k:])


@lru_cache(maxsize=None)
def _pair_scalar_series(ca: Chart, ce: Chart, m: int, n: int):
    k, d = _pair_delta(ca, ce, n + 4)
    return tuple(s_pow(list(d), -m, n))


@lru_cache(maxsize=None)
def _pair_half_series(ch: Chart, m: int, n: int):
    """(z(eps) - w)^-m as a list of (exponent, basis in w, coeff) relative to its valuation."""
    out = []
    if ch.kind == "inf":
        # eps^m (1 - w eps)^-m = sum binom(m+r-1, r) w^r eps^(m+r); valuation m
        for r in range(n):
            out.append((r, (Rational(0), -r), Rational(comb(m + r - 1, r))))
        return tuple(out)
    phi = ch.phi(n + 1)
    p = phi[0]
    eta = [Rational(0)] + list(phi[1:n])
    # (p + eta - w)^-m = sum_r binom(m+r-1, r) (-1)^m eta^r (w - p)^(-m-r)
    eta_pow = [Rational(1)] + [Rational(0)] * (n - 1)
    for r in range(n):
        bb = (p, m + r) if p != 0 else (Rational(0), m + r)
        coef = Rational(comb(m + r - 1, r) * (-1) ** m)
        for j in range(n):
            if eta_pow[j]:
                out.append((j, bb, coef * eta_pow[j]))
        eta_pow = s_mul(eta_pow, eta, n)
    return tuple(out)


# ---------------------------------------------------------------------------
# functional interface


def _vname(v) -> str:
    return v.name if isinstance(v, FormVariable) else v


def laurent(f: DiffForm, v, point, window: tuple[int, int]) -> LaurentSeries:
    return f.laurent(_vname(v), point, window)


def residue(f: DiffForm, v, point) -> DiffForm:
    return f.residue(_vname(v), point)


def involute(f: DiffForm, v) -> DiffForm:
    return f.involute(_vname(v))


def partial_fractions(f: DiffForm, v):
    """Split along one variable.

    Returns ``(poles, polynomial)`` where ``poles`` is a sorted list of
    ``(pole, order, coefficient form)`` (the coefficient form keeps ``v`` so
    that it reads ``c * (v - pole)^-order dv``) and ``polynomial`` collects
    the non-negative powers of ``v``.
    """
    name = _vname(v)
    i = f.index(name)
    if f.has_coupling(name):
        raise NotImplementedError("partial fractions of a coupled factor")
    groups: dict = {}
    poly: dict = {}
    for (b, p), c in f.terms.items():
        q, k = b[i]
        if q == 0 and k <= 0:
            _add(poly, (b, p), c)
        else:
            _add(groups.setdefault((q, k), {}), (b, p), c)
    poles = [(q, k, DiffForm(f.vars, d, f.degrees)) for (q, k), d in sorted(groups.items())]
    return poles, DiffForm(f.vars, poly, f.degrees)


def primitive_from(f: DiffForm, v, basepoint) -> DiffForm:
    return f.primitive(_vname(v), basepoint)


def is_symmetric(f: DiffForm, permutation: Sequence[int], colors: Sequence[int] | None = None) -> bool:
    """Invariance under ``z_i -> z_perm[i]``.  Colors, if given, must be preserved."""
    perm = list(permutation)
    if sorted(perm) != list(range(f.n)):
        raise ValueError("not a permutation of the variables")
    if colors is not None:
        for i, j in enumerate(perm):
            if colors[i] != colors[j]:
                raise ValueError("permutation mixes colors")
    renamed = f.rename({f.vars[i]: f.vars[perm[i]] for i in range(f.n)})
    return renamed.reorder(f.vars) == f


# ---------------------------------------------------------------------------
# text format


def _fmt_coeff(c) -> str:
    s = str(c)
    return s


def _fmt_basis(var: str, b) -> str | None:
    q, k = b
    if q == 0:
        if k == 0:
            return None
        if k == -1:
            return var
        return f"{var}^{-k}"
    qs = f"{var} - {q}" if q > 0 else f"{var} + {-q}"
    return f"({qs})^{-k}"


def _term_sort_key(item):
    (b, p), _ = item
    return (tuple((bb[0], bb[1]) for bb in b), p)


def format_form(f: DiffForm) -> str:
    """Serialized form: ``(sum of terms)*dz1*dz2``; functions carry no marker."""
    pieces = []
    for (b, p), c in sorted(f.terms.items(), key=_term_sort_key):
        factors = [x for x in (_fmt_basis(v, bb) for v, bb in zip(f.vars, b)) if x]
        for i, j, m in p:
            factors.append(f"({f.vars[i]} - {f.vars[j]})^{-m}")
        cs = _fmt_coeff(c)
        if factors:
            if cs == "1":
                pieces.append("*".join(factors))
            elif cs == "-1":
                pieces.append("-" + "*".join(factors))
            elif " " in cs:
                pieces.append(f"({cs})*" + "*".join(factors))
            else:
                pieces.append(f"{cs}*" + "*".join(factors))
        else:
            pieces.append(f"({cs})" if " " in cs else cs)
    body = "0" if not pieces else pieces[0]
    for pc in pieces[1:]:
        body += (" - " + pc[1:]) if pc.startswith("-") else (" + " + pc)
    marks = []
    for v, d in zip(f.vars, f.degrees):
        marks += [f"d{v}"] * d
    head = f"[{','.join(f.vars)}] "
    if not marks or not pieces:
        return head + body
    return head + f"({body})*" + "*".join(marks)


class _Marker:
    __slots__ = ("var",)

    def __init__(self, var):
        self.var = var


def parse_form(text: str, ctx: Context | None = None) -> DiffForm:
    """Inverse of :func:`format_form`.

    The text starts with the bracketed variable list, followed by an
    expression in those variables (and the scalar parameters of ``ctx``)
    multiplied by ``dz`` markers.  Denominators must be products of powers
    of linear factors ``(z - q)`` or ``(z_i - z_j)``.
    """
    text = text.strip()
    if not text.startswith("["):
        raise ValueError("form text must start with the variable list")
    close = text.index("]")
    vars_ = tuple(v.strip() for v in text[1:close].split(",") if v.strip())
    body = text[close + 1:]
    ctx = ctx or Context()
    degrees = {v: 0 for v in vars_}

    def symbol(name):
        if name in vars_:
            return _Poly.var(vars_, name)
        if name.startswith("d") and name[1:] in vars_:
            degrees[name[1:]] += 1
            return _Poly.const(vars_, Rational(1))
        return _Poly.const(vars_, ctx.symbol(name))

    def const(v):
        return _Poly.const(vars_, Rational(v))

    res = parse_expression(body, ctx, symbol=symbol, const=const,
                           div=lambda a, b: a * b.inverse(), pow_=lambda a, k: a ** k)
    return res.to_form([degrees[v] for v in vars_])


class _Poly:
    """Intermediate for parsing: DiffForm of functions plus closure under division by linear factors."""

    __slots__ = ("vars", "form")

    def __init__(self, vars_, form):
        self.vars = vars_
        self.form = form

    @classmethod
    def const(cls, vars_, c):
        return cls(vars_, DiffForm(vars_, {(tuple(ONE for _ in vars_), ()): c} if c else {}, (0,) * len(vars_)))

    @classmethod
    def var(cls, vars_, name):
        i = vars_.index(name)
        b = tuple((Rational(0), -1) if j == i else ONE for j in range(len(vars_)))
        return cls(vars_, DiffForm(vars_, {(b, ()): Rational(1)}, (0,) * len(vars_)))

    def __add__(self, o):
        return _Poly(self.vars, self.form + o.form)

    def __sub__(self, o):
        return _Poly(self.vars, self.form - o.form)

    def __neg__(self):
        return _Poly(self.vars, -self.form)

    def __mul__(self, o):
        return _Poly(self.vars, self.form._mul_form(o.form))

    def __pow__(self, k):
        if k >= 0:
            out = _Poly.const(self.vars, Rational(1))
            for _ in range(k):
                out = out * self
            return out
        return self.inverse() ** (-k)

    def inverse(self):
        terms = self.form.terms
        n = len(self.vars)
        if len(terms) == 1:
            (b, p), c = next(iter(terms.items()))
            if p:
                raise ValueError("cannot invert a coupled factor product")
            inv_c = c.inverse() if isinstance(c, (ScalarExpr, RatFunc)) else Rational(1) / c
            nb = []
            for bb in b:
                q, k = bb
                if q != 0:
                    raise ValueError("cannot invert a pole factor")
                nb.append((Rational(0), -k))
            return _Poly(self.vars, DiffForm(self.vars, {(tuple(nb), ()): inv_c}, (0,) * n))
        # linear factor a*z + b or z_i - z_j
        used = {i for (b, p) in terms for i, bb in enumerate(b) if bb != ONE}
        if any(p for (_, p) in terms):
            raise ValueError("cannot invert a coupled expression")
        if len(used) == 1:
            i = used.pop()
            coeffs = {}
            for (b, _), c in terms.items():
                q, k = b[i]
                if q != 0 or k > 0:
                    raise ValueError("denominator is not a polynomial")
                coeffs[-k] = c
            if max(coeffs) != 1:
                return self._inverse_univariate(i, coeffs)
            a1 = coeffs[1]
            a0 = coeffs.get(0, Rational(0))
            a1v = _rat_const(a1)
            a0v = _rat_const(a0)
            root = -a0v / a1v
            b = tuple((root, 1) if j == i else ONE for j in range(n)) if root != 0 else \
                tuple((Rational(0), 1) if j == i else ONE for j in range(n))
            return _Poly(self.vars, DiffForm(self.vars, {(b, ()): Rational(1) / a1v}, (0,) * n))
        if len(used) == 2 and len(terms) == 2:
            i, j = sorted(used)
            cs = {}
            for (b, _), c in terms.items():
                idx = i if b[i] != ONE else j
                if b[idx] != (Rational(0), -1):
                    raise ValueError("unsupported denominator")
                cs[idx] = _rat_const(c)
            if cs[i] != -cs[j]:
                raise ValueError("unsupported denominator")
            b = tuple(ONE for _ in range(n))
            return _Poly(self.vars, DiffForm(self.vars, {(b, ((i, j, 1),)): Rational(1) / cs[i]}, (0,) * n))
        raise ValueError("unsupported denominator")

    def _inverse_univariate(self, i, coeffs):
        n = len(self.vars)
        deg = max(coeffs)
        poly = flint.fmpq_poly([_rat_const(coeffs.get(j, Rational(0))) for j in range(deg + 1)])
        lead, factors = poly.factor()
        out = _Poly.const(self.vars, Rational(1) / Rational(lead))
        for fac, mult in factors:
            if fac.degree() != 1:
                raise ValueError("irreducible factor of degree > 1 in a denominator")
            c0, c1 = Rational(fac[0]), Rational(fac[1])
            root = -c0 / c1
            b = tuple((root, mult) if j == i else ONE for j in range(n))
            inv = DiffForm(self.vars, {(b, ()): Rational(1) / c1 ** mult}, (0,) * n)
            out = out * _Poly(self.vars, inv)
        return out

    def to_form(self, degrees):
        return DiffForm(self.vars, self.form.terms, degrees)


def _rat_const(c):
    if isinstance(c, ScalarExpr):
        return c.constant_value()
    if isinstance(c, RatFunc):
        return c.constant_value()
    return c
