"""Colored base data, P/H projectors and normalized correlators of the tensor-model curve.

Colored correlators carry one group of variables per color; the variable
for leaf ``j`` of color ``c`` is named ``x{c}_{j}`` (see :func:`leaf_var`).
"""
from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field

from ..algebra import Context, Rational, TruncatedSeries, rational
from ..curve import BRANCH_POINTS, SpectralCurve, qmtm_constant, qmtm_context, qmtm_curve
from ..forms import INF, Chart, DiffForm, parse_form
from ..recursion import CorrelatorStore, omega, stable

__all__ = [
    "ColoredBase",
    "ColoredForm",
    "PhiProvider",
    "colored_base",
    "leaf_var",
    "leaf_of",
    "colored_vars",
    "leading_resolvent_series",
    "projector_P",
    "projector_H",
    "normalized_omega",
    "unit",
]

_LEAF = re.compile(r"^x(\d+)_(\d+)$")


def leaf_var(color: int, j: int) -> str:
    return f"x{color}_{j}"


def leaf_of(name: str):
    """(color, index) for a leaf variable name, or None."""
    m = _LEAF.match(name)
    return (int(m.group(1)), int(m.group(2))) if m else None


def colored_vars(k) -> tuple:
    """Canonical variable order for the colored index k: by color, then leaf index."""
    return tuple(leaf_var(c, j) for c, kc in enumerate(k, start=1) for j in range(1, kc + 1))


def unit(d: int, i: int, times: int = 1) -> tuple:
    return tuple(times if c == i else 0 for c in range(1, d + 1))


@dataclass
class ColoredForm:
    g: int
    k: tuple
    form: DiffForm

    def is_group_symmetric(self) -> bool:
        """Invariance under transpositions of adjacent leaves of the same color."""
        names = colored_vars(self.k)
        f = self.form.reorder(names)
        for c, kc in enumerate(self.k, start=1):
            for j in range(1, kc):
                a, b = leaf_var(c, j), leaf_var(c, j + 1)
                sw = f.rename({a: "_t"}).rename({b: a}).rename({"_t": b}).reorder(names)
                if sw != f:
                    return False
        return True


@dataclass(eq=False)
class ColoredBase:
    """omega^0_{e_i}, omega^0_{2e_i} and omega^0_{e_i+e_j} of the d-disc curve."""

    d: int
    alpha: object
    curve: SpectralCurve
    c: object
    _stores: dict = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def ctx(self) -> Context:
        return self.curve.ctx

    def _check(self, *colors):
        for i in colors:
            if not 1 <= i <= self.d:
                raise ValueError(f"color {i} outside 1..{self.d}")

    def omega_e(self, i: int) -> DiffForm:
        self._check(i)
        return self.curve.component(i).omega10

    def omega_2e(self, i: int) -> DiffForm:
        self._check(i)
        return self.curve.bergman.entry(i, i)

    def omega_eiej(self, i: int, j: int) -> DiffForm:
        self._check(i, j)
        if i == j:
            raise ValueError("use omega_2e for equal colors")
        return self.curve.bergman.entry(i, j)

    def entry(self, i: int, j: int) -> DiffForm:
        return self.omega_2e(i) if i == j else self.omega_eiej(i, j)

    def store(self, i: int, kernel_factor=Rational(1, 2)) -> CorrelatorStore:
        """Memo store of the normalized per-component recursion for color i."""
        self._check(i)
        key = (i, kernel_factor)
        with self._lock:
            st = self._stores.get(key)
            if st is None:
                st = CorrelatorStore(self.curve, component=i, kernel_factor=kernel_factor)
                self._stores[key] = st
        return st


def _degenerate(alpha) -> bool:
    if isinstance(alpha, str) and alpha.strip() == "alpha":
        return False
    a = rational(alpha)
    return a * a == 1


def colored_base(d: int, alpha) -> ColoredBase:
    """Base data of the d-disc curve at coupling alpha (a rational or the symbol 'alpha')."""
    if _degenerate(alpha):
        raise ValueError("degenerate coupling: alpha = +-1 makes beta vanish")
    curve = qmtm_curve(d, alpha)
    return ColoredBase(d, alpha, curve, curve.params["c"])


def leading_resolvent_series(alpha, d: int, order: int) -> dict:
    """Coefficients ``{m: w_m}`` of ``x^-m`` (m = 1..order) of the planar one-color resolvent.

    W solves ``W^2 - (1 - alpha^2) x W + (1 - alpha^2) = 0`` with ``W ~ 1/x``;
    multiplying by ``x^-1`` gives ``w_{m+1} = (sum_{a+b=m} w_a w_b) / (1 - alpha^2)``
    for m >= 2 and ``w_1 = 1``, ``w_2 = 0``.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    if d < 3:
        raise ValueError("tensor dimension must be at least 3")
    if _degenerate(alpha):
        raise ValueError("degenerate coupling: alpha = +-1")
    ctx = qmtm_context(alpha)
    a = ctx.alpha_value if ctx.alpha_value is not None else ctx.symbol("alpha")
    B = 1 - a * a
    inv_B = 1 / B
    w = {0: ctx.zero() if ctx.alpha_value is None else Rational(0)}
    for m in range(0, order):
        s = sum((w[i] * w[m - i] for i in range(1, m)), Rational(0))
        w[m + 1] = (s + (B if m == 0 else 0)) * inv_B
    return {m: w[m] for m in range(1, order + 1)}


def resolvent_as_series(alpha_coeffs: dict, order: int, param: str = "x") -> TruncatedSeries:
    """Package ``{m: w_m}`` as a truncated series in 1/x (coefficient list index m)."""
    coeffs = [Rational(0)] + [alpha_coeffs.get(m, Rational(0)) for m in range(1, order + 1)]
    return TruncatedSeries(param, order, coeffs)


# ---------------------------------------------------------------------------
# projectors

CONVENTIONS = ("idempotent", "literal")


def _projection_kernel(base: ColoredBase, color: int, convention: str) -> DiffForm:
    """G(z, z0) = +-int^z omega^0_{2e_i}(., z0), basepoint at infinity."""
    B = base.omega_2e(color)
    B = B.rename(dict(zip(B.vars, ("_z", "_z0"))))
    G = B.primitive("_z", INF)
    return G if convention == "idempotent" else -G


def projector_P(f: DiffForm, var: str, base: ColoredBase, color: int | None = None,
                convention: str = "idempotent") -> DiffForm:
    """P f = sum over z = +-1 of Res G(z, z0) f(z), renamed back to ``var``.

    ``convention="idempotent"`` integrates with a plus sign, which keeps the
    polar part at +-1; ``"literal"`` flips it.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    if var not in f.vars:
        raise ValueError(f"form has no variable {var!r}")
    lab = leaf_of(var)
    if color is None:
        if lab is None:
            raise ValueError("color needed for a non-leaf variable name")
        color = lab[0]
    elif lab is not None and lab[0] != color:
        raise ValueError(f"variable {var} belongs to color {lab[0]}, not {color}")
    if f.degrees[f.index(var)] != 1:
        raise ValueError("projector acts on one-forms in the chosen variable")
    G = _projection_kernel(base, color, convention)
    out = DiffForm(f.vars, {}, f.degrees)
    if not f.terms:
        return out
    for p in BRANCH_POINTS:
        ch = Chart("shift", p)
        vf = f.min_val(var, ch)
        if vf >= 0:
            continue
        sf = f.expand({var: ch}, -1)
        sg = G.expand({"_z": ch}, -1 - vf)
        r = sg.residue_pairing(sf)
        if r is None:
            continue
        out = out + r.rename({"_z0": var}).reorder(f.vars)
    return out


def projector_H(f: DiffForm, var: str, base: ColoredBase, color: int | None = None,
                convention: str = "idempotent") -> DiffForm:
    return f - projector_P(f, var, base, color, convention)


# ---------------------------------------------------------------------------
# normalized correlators


def normalized_omega(base: ColoredBase, g: int, n: int, color: int, kernel_factor=Rational(1, 2)) -> DiffForm:
    """Per-component recursion with omega^0_{e_i} and the full diagonal omega^0_{2e_i}.

    Variables are ``z1 .. zn``.
    """
    if g < 0 or n < 1 or not stable(g, n):
        raise ValueError(f"unstable request (g, n) = ({g}, {n})")
    return omega(base.store(color, kernel_factor), g, n)


# ---------------------------------------------------------------------------
# blob initial data


class PhiProvider:
    """Table (g, k) -> form; missing entries are zero.

    Forms use the variables of :func:`colored_vars` for their index and must
    be holomorphic at z = +-1 in every variable.
    """

    def __init__(self, table: dict | None = None):
        self.table = {}
        for (g, k), f in (table or {}).items():
            self.set(g, k, f)

    def set(self, g: int, k, form: DiffForm) -> None:
        k = tuple(k)
        names = colored_vars(k)
        if sorted(form.vars) != sorted(names):
            raise ValueError(f"phi_{k}^{g} must use the variables {names}")
        form = form.reorder(names)
        for v in names:
            for p in BRANCH_POINTS:
                if form.min_val(v, Chart("shift", p)) < 0 and form.expand({v: Chart("shift", p)}, -1).coeffs:
                    raise ValueError(f"phi_{k}^{g} has a pole at {v} = {p}")
        self.table[(g, k)] = form

    def get(self, g: int, k) -> DiffForm:
        k = tuple(k)
        f = self.table.get((g, k))
        if f is None:
            names = colored_vars(k)
            return DiffForm(names, {}, (1,) * len(names))
        return f

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.table.values())

    @classmethod
    def zero(cls) -> "PhiProvider":
        return cls()

    def dumps(self) -> str:
        lines = []
        for (g, k) in sorted(self.table):
            lines.append(f"{g} {','.join(map(str, k))} {self.table[(g, k)].to_str()}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def loads(cls, text: str, ctx: Context) -> "PhiProvider":
        """Records ``g k1,...,kd <form>``, one per line; '#' starts a comment."""
        prov = cls()
        for ln, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                g, ks, rest = line.split(None, 2)
                k = tuple(int(x) for x in ks.split(","))
                form = parse_form(rest, ctx)
            except (ValueError, SyntaxError) as exc:
                raise ValueError(f"line {ln}: {exc}") from None
            prov.set(int(g), k, form)
        return prov
