"""L_p operators acting on truncated formal partition functions.

Polynomials in the couplings are dicts ``{monomial: coefficient}`` where a
monomial is a sorted tuple of ``(index, exponent)`` pairs.  The partition
function is stored in shifted couplings ``s_p`` with ``t_2 = 1/2 + s_2`` and
``t_p = s_p`` otherwise; coefficients are Laurent polynomials in ``N``.

Two sign conventions are available for the transport term:
``"corrected"`` uses ``+ sum_k k t_k d/dt_{k-1+p}`` (the sign that follows from
``d/dt_k Z = -N <Tr M^k> Z``), ``"literal"`` uses the minus sign as displayed
in the usual form of the operator.  Only the corrected sign annihilates Z.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import factorial

from .algebra import Context, Rational, ScalarExpr, format_scalar
from .models import DEFAULT_PAIRING_BUDGET, BudgetExceeded, wick_trace_moments

__all__ = [
    "FormalPartition",
    "VirasoroOp",
    "Residual",
    "build_partition",
    "apply_L",
    "apply_poly",
    "check_annihilation",
    "check_commutators",
    "commutator",
    "monomial",
    "format_monomial",
    "N_CONTEXT",
    "SIGNS",
]

N_CONTEXT = Context(["N"])
SIGNS = ("corrected", "literal")
BASE = {2: Rational(1, 2)}


def monomial(exps: dict) -> tuple:
    return tuple(sorted((int(i), int(e)) for i, e in exps.items() if e))


def _mul_var(mon: tuple, i: int, k: int = 1) -> tuple:
    d = dict(mon)
    d[i] = d.get(i, 0) + k
    return monomial(d)


def _exp(mon: tuple, i: int) -> int:
    for j, e in mon:
        if j == i:
            return e
    return 0


def degree(mon: tuple) -> int:
    return sum(e for _, e in mon)


def max_index(mon: tuple) -> int:
    return max((i for i, _ in mon), default=-1)


def format_monomial(mon: tuple, name: str = "s") -> str:
    if not mon:
        return "1"
    return "*".join(f"{name}{i}" if e == 1 else f"{name}{i}^{e}" for i, e in mon)


def _add(poly: dict, mon: tuple, c) -> None:
    v = poly.get(mon)
    v = c if v is None else v + c
    if v == 0:
        poly.pop(mon, None)
    else:
        poly[mon] = v


def _derivative(mon: tuple, i: int):
    e = _exp(mon, i)
    if not e:
        return None, 0
    return _mul_var(mon, i, -1), e


@dataclass
class FormalPartition:
    """Normalized Z as a polynomial in the shifted couplings s_0 .. s_{p_max}."""

    p_max: int
    order: int
    coeffs: dict = field(default_factory=dict)

    def coefficient(self, mon) -> ScalarExpr:
        if isinstance(mon, dict):
            mon = monomial(mon)
        return self.coeffs.get(mon, N_CONTEXT.zero())

    def in_window(self, mon: tuple) -> bool:
        return degree(mon) <= self.order and max_index(mon) <= self.p_max

    def perturbed(self, mon, delta) -> "FormalPartition":
        if isinstance(mon, dict):
            mon = monomial(mon)
        new = dict(self.coeffs)
        _add(new, mon, N_CONTEXT.coerce(delta))
        return FormalPartition(self.p_max, self.order, new)

    def window(self):
        """All monomials of degree <= order in s_0 .. s_{p_max}."""
        n = self.p_max + 1
        for d in range(self.order + 1):
            for combo in itertools.combinations_with_replacement(range(n), d):
                e: dict = {}
                for i in combo:
                    e[i] = e.get(i, 0) + 1
                yield monomial(e)


def _z_coefficient(mon: tuple, budget: int) -> ScalarExpr:
    """prod_k (-N s_k Tr M^k)^{m_k} / m_k! under the normalized Gaussian measure."""
    ins = [(k, 1, e) for k, e in mon]
    return wick_trace_moments([], ins, budget=budget).value


def build_partition(p_max: int, order: int, budget: int = DEFAULT_PAIRING_BUDGET) -> FormalPartition:
    """Z up to total degree ``order`` in s_0 .. s_{p_max}, from the Wick oracle."""
    if p_max < 0 or order < 0:
        raise ValueError("p_max and order must be non-negative")
    if p_max * order > 2 * budget:
        raise BudgetExceeded("order * p_max exceeds the enumeration budget")
    Z = FormalPartition(p_max, order)
    for mon in Z.window():
        c = _z_coefficient(mon, budget)
        if c != 0:
            Z.coeffs[mon] = c
    return Z


class VirasoroOp:
    """L_p = (1/N^2) sum_{k<p} d_k d_{p-1-k} +- sum_{k>=1} k t_k d_{k-1+p}."""

    def __init__(self, p: int, sign: str = "corrected"):
        if p < 0:
            raise ValueError("p must be non-negative")
        if sign not in SIGNS:
            raise ValueError(f"sign must be one of {SIGNS}")
        self.p = p
        self.sign = sign
        self.eps = 1 if sign == "corrected" else -1

    def __repr__(self):
        return f"VirasoroOp({self.p}, {self.sign!r})"

    def apply(self, poly: dict, base: dict | None = None) -> dict:
        """Exact action on a polynomial; ``base`` holds constant shifts t_i = base_i + s_i."""
        base = base or {}
        p, out = self.p, {}
        inv_n2 = N_CONTEXT.symbol("N") ** -2
        for mon, c in poly.items():
            for k in range(p):
                m1, e1 = _derivative(mon, k)
                if m1 is None:
                    continue
                m2, e2 = _derivative(m1, p - 1 - k)
                if m2 is None:
                    continue
                _add(out, m2, c * inv_n2 * (e1 * e2))
            for j, e in mon:
                k = j + 1 - p          # d_j comes with k t_k, k = j + 1 - p
                if k < 1:
                    continue
                m1, _ = _derivative(mon, j)
                coef = c * (self.eps * k * e)
                _add(out, _mul_var(m1, k), coef)
                if k in base:
                    _add(out, m1, coef * base[k])
        return out

    def references(self, mon: tuple, base: dict | None = None) -> list:
        """Input monomials whose coefficients feed the output coefficient at ``mon``."""
        base = base or {}
        p, refs = self.p, []
        for k in range(p):
            refs.append(_mul_var(_mul_var(mon, k), p - 1 - k))
        for k, _ in mon:
            if k >= 1:
                refs.append(_mul_var(_mul_var(mon, k, -1), k - 1 + p))
        for k in base:
            if k >= 1:
                refs.append(_mul_var(mon, k - 1 + p))
        return refs


def apply_poly(p: int, poly: dict, sign: str = "corrected", base: dict | None = None) -> dict:
    return VirasoroOp(p, sign).apply(poly, base)


def apply_L(p: int, Z: FormalPartition, sign: str = "corrected") -> dict:
    """L_p Z as a polynomial in the s couplings (truncated input, exact arithmetic)."""
    return VirasoroOp(p, sign).apply(Z.coeffs, BASE)


@dataclass
class Residual:
    p: int
    monomial: tuple
    residual: ScalarExpr
    window_safe: bool

    def to_json(self) -> dict:
        return {"p": self.p, "monomial": format_monomial(self.monomial),
                "residual": format_scalar(self.residual), "window_safe": self.window_safe}


def _residuals_for(p: int, Z: FormalPartition, sign: str) -> list:
    op = VirasoroOp(p, sign)
    image = op.apply(Z.coeffs, BASE)
    out = []
    targets = list(Z.window())
    seen = set(targets)
    targets += sorted(m for m in image if m not in seen)
    for mon in targets:
        safe = Z.in_window(mon) and all(Z.in_window(r) for r in op.references(mon, BASE))
        out.append(Residual(p, mon, image.get(mon, N_CONTEXT.zero()), safe))
    return out


def check_annihilation(Z: FormalPartition, ps=None, sign: str = "corrected", parallel: bool = False) -> list:
    """Residual records of L_p Z for each p; window-unsafe records are kept but flagged."""
    ps = list(range(Z.p_max)) if ps is None else list(ps)
    if parallel:
        with ThreadPoolExecutor() as ex:
            chunks = list(ex.map(lambda p: _residuals_for(p, Z, sign), ps))
    else:
        chunks = [_residuals_for(p, Z, sign) for p in ps]
    return [r for chunk in chunks for r in chunk]


def max_safe_residual(records: list):
    """(number of window-safe records, list of nonzero safe residuals)."""
    safe = [r for r in records if r.window_safe]
    return len(safe), [r for r in safe if r.residual != 0]


def commutator(p: int, q: int, poly: dict, sign: str = "corrected") -> dict:
    Lp, Lq = VirasoroOp(p, sign), VirasoroOp(q, sign)
    a = Lp.apply(Lq.apply(poly))
    for mon, c in Lq.apply(Lp.apply(poly)).items():
        _add(a, mon, -c)
    return a


def basis_polynomials(max_degree: int, n_vars: int):
    """Monomials of degree <= max_degree in t_0 .. t_{n_vars-1}, as one-term polynomials."""
    for d in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(n_vars), d):
            e: dict = {}
            for i in combo:
                e[i] = e.get(i, 0) + 1
            yield {monomial(e): N_CONTEXT.one()}


def check_commutators(p: int, q: int, polys, shift: int = 0, factor=None, sign: str = "corrected") -> list:
    """Defect ([L_p, L_q] - factor L_{p+q-shift}) on each test polynomial.

    ``shift = 0`` and ``factor = p - q`` is the relation as usually written;
    returns the list of nonzero defect polynomials.
    """
    if factor is None:
        factor = p - q
    target = p + q - shift
    bad = []
    for poly in polys:
        d = commutator(p, q, poly, sign)
        if target >= 0:
            for mon, c in VirasoroOp(target, sign).apply(poly).items():
                _add(d, mon, -c * factor)
        if d:
            bad.append((poly, d))
    return bad
