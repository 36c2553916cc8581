"""Brute-force Wick oracle for the complex quartic melonic tensor model.

The Gaussian weight is ``exp(-N^(D-1) Tbar.T)`` (propagator ``N^-(D-1)``) and
the interaction is ``(lambda / 4) N^(D-1) sum_c Tr(A_c^2)`` with
``A_c = Tbar ._c T`` the N x N matrix obtained by contracting every index of
``Tbar`` and ``T`` except the colour-c one.  Observables are products of
``Tr(A_c^p)``.  A contraction is a bijection from the T's to the Tbar's; every
colour contributes ``N^(#cycles)``.

The intermediate-field relations below connect these expectations with the
moments of the colour matrices ``M'_c`` of the resummed multi-matrix model
with coupling ``alpha``.  With ``r = alpha_r^2 = -lambda/2`` and ``w = alpha_r alpha``
solving ``d w^2 - w + r = 0``:

    alpha^2 = w^2 / r
    <Tr M'^2> = N + N^(D-2) (r <Tr A^2> - 2 w <Tr A> + N alpha^2)
"""
from __future__ import annotations

import itertools
from math import factorial
from typing import Sequence

from ..algebra import Context, Rational, RatFunc, ScalarExpr, TruncatedSeries
from ..forms import s_inv, s_mul
from ..models import DEFAULT_PAIRING_BUDGET, BudgetExceeded, n_coefficients

__all__ = [
    "tensor_wick_oracle",
    "tensor_expectation",
    "alpha_squared_series",
    "second_moment_from_tensor",
    "first_moment_from_tensor",
    "resolvent_coefficient_in_lambda",
    "alpha_taylor",
    "second_moment_alpha_coefficients",
]

NCTX = Context(["N"])


def _bubble(color: int, power: int, d: int, t0: int):
    """Tr(A_color^power): T's t0..t0+p-1 and Tbar's with the same labels.

    Returns, per colour, the list of (T label, Tbar label) strands.
    """
    if power < 1:
        raise ValueError("trace powers must be positive")
    strands = {c: [] for c in range(1, d + 1)}
    for r in range(power):
        t = t0 + r
        for c in range(1, d + 1):
            if c == color:
                strands[c].append((t, t0 + (r + 1) % power))
            else:
                strands[c].append((t, t))
    return strands


def _contraction_sum(bubbles: list, d: int, budget: int) -> dict:
    """Sum over all T -> Tbar bijections of N^(faces - (D-1) props), as {exponent: count}."""
    n = sum(len(b[1]) for b in bubbles)
    if factorial(n) > budget:
        raise BudgetExceeded(f"{factorial(n)} contractions exceed the budget {budget}")
    # per colour: bubble map T -> Tbar
    beta = {c: [0] * n for c in range(1, d + 1)}
    for strands in bubbles:
        for c, lst in strands.items():
            for t, u in lst:
                beta[c][t] = u
    inv_beta = {c: [0] * n for c in beta}
    for c, b in beta.items():
        for t, u in enumerate(b):
            inv_beta[c][u] = t
    acc: dict = {}
    for pi in itertools.permutations(range(n)):
        faces = 0
        for c in range(1, d + 1):
            ib = inv_beta[c]
            seen = [False] * n
            for s in range(n):
                if seen[s]:
                    continue
                faces += 1
                x = s
                while not seen[x]:
                    seen[x] = True
                    x = ib[pi[x]]
        e = faces - (d - 1) * n
        acc[e] = acc.get(e, 0) + 1
    return acc


def _laurent(poly: dict) -> ScalarExpr:
    N = NCTX.symbol("N")
    out = NCTX.zero()
    for e, c in poly.items():
        out = out + (N ** e) * c
    return out


def _raw_term(d: int, observable: Sequence, m: int, budget: int) -> ScalarExpr:
    """lambda^m coefficient of E_0[O exp(-(lambda/4) N^(D-1) sum_c Tr A_c^2)] (unnormalized)."""
    total = NCTX.zero()
    N = NCTX.symbol("N")
    cache: dict = {}
    for colors in itertools.product(range(1, d + 1), repeat=m):
        # the sum only depends on which vertex colours coincide with the observable colours
        bubbles = []
        t0 = 0
        for c, p in observable:
            bubbles.append(_bubble(c, p, d, t0))
            t0 += p
        for c in colors:
            bubbles.append(_bubble(c, 2, d, t0))
            t0 += 2
        key = _shape_key(observable, colors)
        if key not in cache:
            cache[key] = _laurent(_contraction_sum(bubbles, d, budget))
        total = total + cache[key]
    pref = (-(N ** (d - 1)) * Rational(1, 4)) ** m * Rational(1, factorial(m)) if m else NCTX.one()
    return total * pref


def _shape_key(observable, colors):
    """Canonical relabelling of colours (the sum is invariant under colour permutations)."""
    seq = [c for c, _ in observable] + list(colors)
    relabel: dict = {}
    out = []
    for c in seq:
        if c not in relabel:
            relabel[c] = len(relabel)
        out.append(relabel[c])
    pows = tuple(p for _, p in observable)
    return pows, tuple(out)


def tensor_wick_oracle(d: int, observable: Sequence, m: int, N: str = "N",
                       budget: int = DEFAULT_PAIRING_BUDGET) -> list:
    """Normalized <prod Tr(A_c^p)> as a list of lambda^0..lambda^m coefficients (Laurent in N).

    ``observable`` is a list of ``(color, power)`` pairs; ``[(1, 1)]`` is ``Tbar.T``.
    An observable with unequal numbers of T and Tbar is not expressible
    in this format; use :func:`charge_imbalanced` for that case.
    """
    if N != "N":
        raise ValueError("the oracle uses the parameter name 'N'")
    if d < 1 or m < 0:
        raise ValueError("need d >= 1 and m >= 0")
    for c, p in observable:
        if not 1 <= c <= d:
            raise ValueError(f"colour {c} outside 1..{d}")
    num = [_raw_term(d, list(observable), j, budget) for j in range(m + 1)]
    den = [_raw_term(d, [], j, budget) for j in range(m + 1)]
    q = TruncatedSeries("lambda", m, num) * TruncatedSeries("lambda", m, den).inverse()
    return list(q.coeffs)


def charge_imbalanced(n_t: int, n_tbar: int):
    """Expectation of a monomial with n_t T's and n_tbar Tbar's: zero unless balanced."""
    if n_t != n_tbar:
        return NCTX.zero()
    raise ValueError("balanced monomials are handled by tensor_wick_oracle")


def tensor_expectation(d: int, observable: Sequence, m: int, budget: int = DEFAULT_PAIRING_BUDGET):
    return TruncatedSeries("lambda", m, tensor_wick_oracle(d, observable, m, budget=budget))


def _series(order: int, coeffs) -> TruncatedSeries:
    coeffs = [NCTX.coerce(c) for c in coeffs]
    coeffs += [NCTX.zero()] * (order + 1 - len(coeffs))
    return TruncatedSeries("lambda", order, coeffs[:order + 1])


def alpha_squared_series(d: int, order: int):
    """(r, w, alpha^2) as lambda-series: r = -lambda/2, d w^2 - w + r = 0, alpha^2 = w^2 / r."""
    r = _series(order + 1, [0, Rational(-1, 2)])
    w = _series(order + 1, [])
    for _ in range(order + 2):
        w = r + (w * w) * _series(order + 1, [d])
    # u = w / r is a genuine power series
    u = TruncatedSeries("lambda", order, [w.coeffs[j + 1] * Rational(-2) for j in range(order + 1)])
    r0 = _series(order, [0, Rational(-1, 2)])
    w0 = _series(order, w.coeffs[:order + 1])
    return r0, w0, r0 * u * u


def second_moment_from_tensor(d: int, m: int, budget: int = DEFAULT_PAIRING_BUDGET) -> TruncatedSeries:
    """<Tr M'_c^2> through lambda^(m+1), from tensor expectations with up to m vertices."""
    order = m + 1
    r, w, a2 = alpha_squared_series(d, order)
    A2 = _series(order, tensor_wick_oracle(d, [(1, 2)], m, budget=budget))
    A1 = _series(order, tensor_wick_oracle(d, [(1, 1)], m, budget=budget))
    Nn = _series(order, [NCTX.symbol("N")])
    Nd = _series(order, [NCTX.symbol("N") ** (d - 2)])
    two = _series(order, [2])
    bracket = r * A2 - two * w * A1 + Nn * a2
    # A2, A1 are only known through lambda^m; r and w are O(lambda) so the products are exact to m+1
    return Nn + Nd * bracket


def first_moment_from_tensor(d: int, m: int, budget: int = DEFAULT_PAIRING_BUDGET) -> TruncatedSeries:
    """alpha_r <Tr M'_c> = N^((D-2)/2) (r <Tr A> - N w) through lambda^(m+1)."""
    if d % 2:
        raise ValueError("the half-integer power of N needs an even dimension")
    order = m + 1
    r, w, _ = alpha_squared_series(d, order)
    A1 = _series(order, tensor_wick_oracle(d, [(1, 1)], m, budget=budget))
    Nn = _series(order, [NCTX.symbol("N")])
    pref = _series(order, [NCTX.symbol("N") ** ((d - 2) // 2)])
    return pref * (r * A1 - Nn * w)


def resolvent_coefficient_in_lambda(d: int, order: int, coefficient_of_alpha2) -> TruncatedSeries:
    """Substitute alpha^2(lambda) into a polynomial in alpha^2 given by its coefficients."""
    _, _, a2 = alpha_squared_series(d, order)
    out = _series(order, [])
    p = _series(order, [1])
    for c in coefficient_of_alpha2:
        out = out + p * _series(order, [c])
        p = p * a2
    return out


def leading_coefficients(s: TruncatedSeries) -> list:
    """Per lambda-order: {N-exponent: coefficient}."""
    return [n_coefficients(c) for c in s.coeffs]


def _poly_coeffs(p, n: int) -> list:
    out = [Rational(0)] * n
    for exps, c in p.to_dict().items():
        e = int(exps[0]) if exps else 0
        if e < n:
            out[e] = Rational(c)
    return out


def alpha_taylor(expr, order: int) -> list:
    """Taylor coefficients in alpha (degrees 0..order) of a rational function of alpha."""
    if isinstance(expr, (int, Rational)):
        return [Rational(expr)] + [Rational(0)] * order
    if expr.is_constant():
        return [expr.constant_value()] + [Rational(0)] * order
    c = expr.coefficient(beta_power=0)
    if len(expr.ctx.params) != 1 or not isinstance(c, RatFunc):
        raise ValueError("expected a rational function of alpha alone")
    n = order + 1
    num, den = _poly_coeffs(c.num, n), _poly_coeffs(c.den, n)
    if den[0] == 0:
        raise ZeroDivisionError("pole at alpha = 0")
    return s_mul(num, s_inv(den, n), n)


def _revert(a: list, n: int) -> list:
    """Compositional inverse of a(x) = a1 x + a2 x^2 + ... up to x^(n-1)."""
    lam = [Rational(0)] * n
    for _ in range(n):
        p = s_mul(lam, lam, n)
        acc = [Rational(0)] * n
        k = 2
        while k < len(a) and k < n:
            if a[k]:
                acc = [x + a[k] * y for x, y in zip(acc, p)]
            p = s_mul(p, lam, n)
            k += 1
        lam = [((1 if j == 1 else 0) - acc[j]) / a[1] for j in range(n)]
    return lam


def _compose(f: list, g: list, n: int) -> list:
    out = [Rational(0)] * n
    p = [Rational(1)] + [Rational(0)] * (n - 1)
    for c in f[:n]:
        if c:
            out = [x + c * y for x, y in zip(out, p)]
        p = s_mul(p, g, n)
    return out


def second_moment_alpha_coefficients(d: int, m: int, budget: int = DEFAULT_PAIRING_BUDGET) -> list:
    """Leading-N coefficient of <Tr M'^2>, re-expanded in alpha^2 (powers 0..m+1).

    The lambda-series from the tensor oracle is composed with the inverse of
    alpha^2(lambda).
    """
    s = second_moment_from_tensor(d, m, budget)
    n = m + 2
    lead = []
    for c in s.coeffs[:n]:
        cf = n_coefficients(c)
        if any(e > 1 for e in cf):
            raise ValueError("positive powers of N beyond the leading order")
        lead.append(Rational(cf.get(1, 0)))
    _, _, a2 = alpha_squared_series(d, m + 1)
    a = [NCTX.coerce(x).constant_value() for x in a2.coeffs[:n]]
    lam = _revert(a, n)
    return _compose(lead, lam, n)
