"""One-matrix models and the brute-force Wick-pairing oracle.

The oracle enumerates every perfect matching of the half-edges of a product
of traces (``Tr M^p`` is a cyclic vertex of degree ``p``), counts the faces
of the resulting fat graph from the cycles of ``gamma o sigma`` and sums
``N^(faces - edges)`` (propagator ``delta_il delta_jk / N``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import Context, Rational, ScalarExpr, TruncatedSeries, rational, series_sqrt
from .curve import BergmanTable, Component, SpectralCurve, joukowsky, simplify_scalar, standard_bergman
from .forms import DiffForm

__all__ = [
    "Potential",
    "WickResult",
    "BudgetExceeded",
    "gaussian_model",
    "quartic_formal_model",
    "wick_trace_moments",
    "pairing_sum",
    "connected_from_full",
    "set_partitions",
    "n_coefficients",
    "quartic_expectation",
    "quartic_connected",
    "DEFAULT_PAIRING_BUDGET",
]

DEFAULT_PAIRING_BUDGET = 3_000_000


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed its configured budget."""


@dataclass
class Potential:
    """V(x) = sum_p t_p x^p with the Gaussian block t_2 = 1/2."""

    coefficients: dict = field(default_factory=lambda: {2: Rational(1, 2)})

    def __post_init__(self):
        if 2 not in self.coefficients:
            raise ValueError("the t_2 block must be present")

    @property
    def p_max(self) -> int:
        return max(self.coefficients)

    def derivative_form(self, x: DiffForm) -> DiffForm:
        """V'(x(z)) as a function of z."""
        out = DiffForm(x.vars, {}, x.degrees)
        for p, t in self.coefficients.items():
            if p >= 1 and t:
                out = out + (x ** (p - 1)).scale(t * p)
        return out


@dataclass
class WickResult:
    value: ScalarExpr
    npoly: dict          # exponent of N -> coefficient (pairing sum only)
    pairings: int


# ---------------------------------------------------------------------------
# spectral curves


def gaussian_model() -> SpectralCurve:
    """x = z + 1/z, y = 1/z, omega_1^0 = y dx; cut [-2, 2]."""
    comp = joukowsky(2, -2)
    comp.y = DiffForm.monomial("z", -1, 1, 0)
    comp.omega10 = comp.y * comp.dx
    comp.a, comp.b = Rational(-2), Rational(2)
    return SpectralCurve([comp], BergmanTable({1: standard_bergman()}), {"cut": (Rational(-2), Rational(2))},
                         None, name="gaussian")


def quartic_gamma(order: int, t: str = "t"):
    """(ctx, Gamma, gamma) with Gamma + 12 t Gamma^2 = 1 and gamma^2 = Gamma as series in t."""
    ctx = Context(series={t: order})
    tt = ctx.symbol(t)
    G = ctx.one()
    for _ in range(order + 1):
        G = 1 - 12 * tt * G * G
    Gs = TruncatedSeries(t, order, [c for c in _coeffs(G, t, order)])
    gamma = series_sqrt(Gs).to_scalar(ctx)
    return ctx, G, gamma


def _coeffs(e: ScalarExpr, t: str, order: int):
    out = []
    for piece in e.series_coefficients(t):
        out.append(piece.coefficient())
    return out


def quartic_formal_model(order: int, t: str = "t") -> SpectralCurve:
    """V = x^2/2 + t x^4 around t = 0, truncated at t^order.

    x = gamma (z + 1/z) with cut [-2 gamma, 2 gamma]; W = (V'(x) - M(x) sqrt(...))/2
    where M(x) = 4 t x^2 + 1 + 8 t gamma^2 and gamma^2 solves Gamma + 12 t Gamma^2 = 1.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    ctx, G, gamma = quartic_gamma(order, t)
    tt = ctx.symbol(t)
    inv0 = gamma.series_coefficients(t)[0]
    if not inv0:
        raise ZeroDivisionError("series solver failed to invert at order 0")
    comp = joukowsky(2 * gamma, -2 * gamma)
    comp.x = comp.x.map_coeffs(simplify_scalar)
    x = comp.x
    V = Potential({2: Rational(1, 2), 4: tt})
    m0 = 1 + 8 * tt * G
    M = (x * x).scale(4 * tt) + DiffForm.monomial("z", 0, m0, 0)
    sq = DiffForm.monomial("z", 1, gamma, 0) - DiffForm.monomial("z", -1, gamma, 0)
    W = (V.derivative_form(x) - M * sq).scale(Rational(1, 2))
    comp.y = W.map_coeffs(simplify_scalar)
    comp.omega10 = (comp.y * comp.dx).map_coeffs(simplify_scalar)
    comp.a, comp.b = simplify_scalar(-2 * gamma), simplify_scalar(2 * gamma)
    return SpectralCurve([comp], BergmanTable({1: standard_bergman()}),
                         {"t": t, "order": order, "Gamma": G, "gamma": gamma, "M0": m0},
                         ctx, name=f"quartic(order={order})")


# ---------------------------------------------------------------------------
# Wick oracle


def _pairings_array(m: int) -> np.ndarray:
    """All perfect matchings of range(2m) as involution arrays, shape ((2m-1)!!, 2m)."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.int8)
    sig = np.array([[1, 0]], dtype=np.int8)
    for k in range(1, m):
        a, b = 2 * k, 2 * k + 1
        rows = sig.shape[0]
        out = np.empty(((2 * k + 1) * rows, 2 * k + 2), dtype=np.int8)
        base = np.concatenate([sig, np.zeros((rows, 2), dtype=np.int8)], axis=1)
        for j in range(2 * k + 1):
            blk = base.copy()
            if j == a:
                blk[:, a] = b
                blk[:, b] = a
            else:
                partner = blk[:, j].copy()
                blk[np.arange(rows), partner] = a
                blk[:, a] = partner
                blk[:, j] = b
                blk[:, b] = j
            out[j * rows:(j + 1) * rows] = blk
        sig = out
    return sig


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _face_counts(gamma: np.ndarray, sig: np.ndarray) -> np.ndarray:
    """Number of cycles of gamma o sigma per row."""
    L = gamma.shape[0]
    f = gamma[sig.astype(np.int64)]
    label = np.broadcast_to(np.arange(L), f.shape).copy()
    steps = max(1, int(np.ceil(np.log2(max(L, 2)))) + 1)
    for _ in range(steps):
        label = np.minimum(label, np.take_along_axis(label, f, axis=1))
        f = np.take_along_axis(f, f, axis=1)
    return (label == np.arange(L)).sum(axis=1)


@lru_cache(maxsize=4096)
def _pairing_sum_cached(powers: tuple, budget: int) -> tuple:
    lengths = [p for p in powers if p > 0]
    zeros = len(powers) - len(lengths)
    L = sum(lengths)
    if L % 2:
        return (), 0
    count = _double_factorial(L - 1)
    if count > budget:
        raise BudgetExceeded(f"{count} pairings exceed the budget {budget}")
    gamma = np.empty(L, dtype=np.int64)
    off = 0
    for p in lengths:
        for i in range(p):
            gamma[off + i] = off + (i + 1) % p
        off += p
    acc: dict = {}
    E = L // 2
    if L == 0:
        return ((zeros, 1),), 1
    sig_all = _pairings_array(E)
    chunk = 200_000
    for s in range(0, sig_all.shape[0], chunk):
        faces = _face_counts(gamma, sig_all[s:s + chunk])
        vals, cnts = np.unique(faces, return_counts=True)
        for v, c in zip(vals.tolist(), cnts.tolist()):
            acc[v - E + zeros] = acc.get(v - E + zeros, 0) + c
    return tuple(sorted(acc.items())), count


def pairing_sum(powers: Sequence[int], budget: int = DEFAULT_PAIRING_BUDGET) -> tuple[dict, int]:
    """Gaussian expectation of prod Tr M^p_i as {N-exponent: integer}, plus pairing count."""
    key = tuple(sorted(int(p) for p in powers))
    if any(p < 0 for p in key):
        raise ValueError("powers must be non-negative")
    poly, count = _pairing_sum_cached(key, budget)
    return {e: Rational(c) for e, c in poly}, count


def _n_context(extra: Iterable[str] = ()) -> Context:
    return Context(["N", *extra])


def npoly_to_scalar(poly: dict, ctx: Context) -> ScalarExpr:
    N = ctx.symbol("N")
    out = ctx.zero()
    for e, c in poly.items():
        out = out + (N ** int(e)) * c
    return out


def wick_trace_moments(powers: Sequence[int], vertex_insertions: Sequence = (), N: str = "N",
                       budget: int = DEFAULT_PAIRING_BUDGET) -> WickResult:
    """Gaussian expectation of prod_i Tr M^{p_i} times prod (-N c Tr M^q)^m / m!.

    ``vertex_insertions`` holds triples ``(q, coupling, m)``; a coupling is a
    rational or a parameter name.  Odd total degree gives 0.
    """
    if N != "N":
        raise ValueError("the oracle uses the parameter name 'N'")
    names = [c for _, c, _ in vertex_insertions if isinstance(c, str)]
    ctx = _n_context(names)
    full = list(powers)
    pref = ctx.one()
    Nsym = ctx.symbol("N")
    for q, coupling, m in vertex_insertions:
        full += [q] * m
        cval = ctx.symbol(coupling) if isinstance(coupling, str) else ctx.const(rational(coupling))
        pref = pref * (-Nsym * cval) ** m * Rational(1, factorial(m))
    poly, count = pairing_sum(full, budget)
    if not poly:
        return WickResult(ctx.zero(), {}, count)
    return WickResult(npoly_to_scalar(poly, ctx) * pref, poly, count)


def n_coefficients(e) -> dict:
    """Laurent coefficients in N of an expression whose denominator is a power of N."""
    if not isinstance(e, ScalarExpr):
        return {0: rational(e)} if e else {}
    if e.is_zero():
        return {}
    ctx = e.ctx
    if set(ctx.params) != {"N"} or ctx.series_names or ctx.beta:
        raise ValueError("expected a Laurent polynomial in N only")
    c = e.coefficient()
    if not hasattr(c, "num"):
        return {0: c}
    num = c.num.to_dict()
    den = c.den.to_dict()
    if len(den) != 1:
        raise ValueError("denominator is not a monomial in N")
    (dmon, dc), = den.items()
    out = {}
    for mon, v in num.items():
        out[int(mon[0]) - int(dmon[0])] = Rational(v) / Rational(dc)
    return out


def set_partitions(items: Sequence):
    """All set partitions of a list (as lists of blocks)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def connected_from_full(full: Callable | dict, powers: Sequence[int]):
    """Cumulant of the trace factors from full moments (Moebius over set partitions).

    ``full`` maps a sorted tuple of powers to the full moment (or is a
    callable doing so); values need only support ``+``, ``-`` and ``*``.
    """
    get = full if callable(full) else (lambda key: _lookup(full, key))
    idx = list(range(len(powers)))
    total = None
    for part in set_partitions(idx):
        k = len(part)
        coeff = (-1) ** (k - 1) * factorial(k - 1)
        prod = None
        for block in part:
            v = get(tuple(sorted(powers[i] for i in block)))
            prod = v if prod is None else prod * v
        term = prod * coeff
        total = term if total is None else total + term
    return total


def _lookup(table, key):
    if key not in table:
        raise KeyError(f"missing coarser moment for {key}")
    return table[key]


# ---------------------------------------------------------------------------
# quartic perturbation theory


@lru_cache(maxsize=None)
def quartic_expectation(powers: tuple, order: int, budget: int = DEFAULT_PAIRING_BUDGET) -> tuple:
    """<prod Tr M^p>_t = E[O e^{-N t Tr M^4}] / E[e^{-N t Tr M^4}] as N-Laurent series in t.

    Returns a tuple of ``order+1`` dicts {N-exponent: rational}.
    """
    ctx = _n_context()
    num = []
    den = []
    for m in range(order + 1):
        num.append(wick_trace_moments(list(powers), [(4, 1, m)], budget=budget).value)
        den.append(wick_trace_moments([], [(4, 1, m)], budget=budget).value)
    num_s = TruncatedSeries("t", order, [ctx.coerce(v) for v in num])
    den_s = TruncatedSeries("t", order, [ctx.coerce(v) for v in den])
    q = num_s * den_s.inverse()
    return tuple(n_coefficients(c) for c in q.coeffs)


def quartic_connected(powers: Sequence[int], order: int, budget: int = DEFAULT_PAIRING_BUDGET) -> list:
    """Connected correlator as a list (per t-order) of {N-exponent: rational}."""
    ctx = _n_context()

    def full(key):
        coeffs = quartic_expectation(tuple(key), order, budget)
        return TruncatedSeries("t", order, [npoly_to_scalar(c, ctx) for c in coeffs])

    res = connected_from_full(full, list(powers))
    return [n_coefficients(c) for c in res.coeffs]
