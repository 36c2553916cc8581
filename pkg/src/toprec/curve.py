"""Spectral curves built from genus-0 components.

Each component is uniformized by ``z`` with branch points at ``z = +-1`` and
local involution ``z -> 1/z``.  Functions of ``z`` (``x``, ``y``) and the
one-form ``omega_1^0`` are stored as :class:`DiffForm` objects in the single
variable ``"z"``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .algebra import Context, Rational, ScalarExpr, rational
from .forms import Chart, DiffForm, LaurentSeries, scalar_series

__all__ = [
    "Component",
    "BergmanTable",
    "SpectralCurve",
    "KernelForm",
    "joukowsky",
    "standard_bergman",
    "recursion_kernel",
    "qmtm_constant",
    "qmtm_curve",
    "qmtm_context",
    "DimensionWarning",
]

BRANCH_POINTS = (Rational(1), Rational(-1))


class DimensionWarning(UserWarning):
    """Raised for tensor dimensions without a topological 1/N expansion."""


def simplify_scalar(c):
    """Collapse constant ScalarExpr values to rationals (faster form arithmetic)."""
    if isinstance(c, ScalarExpr) and c.is_constant():
        return c.constant_value()
    return c


@dataclass(eq=False)
class Component:
    index: int
    x: DiffForm
    y: DiffForm | None = None
    omega10: DiffForm | None = None
    a: object = None
    b: object = None

    def check(self) -> None:
        """Validate the structural invariants; raises ValueError on failure."""
        if self.x.involute("z") != self.x:
            raise ValueError("x(1/z) != x(z)")
        dx = self.x.derivative("z")
        for p in BRANCH_POINTS:
            s = dx.expand({"z": Chart("shift", p)}, 1)
            if s.val != 1:
                raise ValueError(f"dx does not vanish simply at z = {p}")
        if self.omega10 is not None:
            bad = [q for q in self.omega10.poles("z") if q != 0]
            if bad:
                raise ValueError("omega_1^0 has poles away from 0 and infinity")

    @property
    def dx(self) -> DiffForm:
        return self.x.derivative("z")


@dataclass(eq=False)
class BergmanTable:
    diag: dict = field(default_factory=dict)   # color -> B_ii(z1, z2)
    off: dict = field(default_factory=dict)    # (i, j) with i != j -> B_ij(z1, z2)

    def entry(self, i: int, j: int) -> DiffForm:
        if i == j:
            return self.diag[i]
        if (i, j) in self.off:
            return self.off[(i, j)]
        if (j, i) in self.off:
            return self.off[(j, i)].rename({"z1": "_t"}).rename({"z2": "z1"}).rename({"_t": "z2"}).reorder(("z1", "z2"))
        return DiffForm(("z1", "z2"))

    def check_symmetry(self) -> bool:
        for i, B in self.diag.items():
            if B.rename({"z1": "_t", "z2": "z1"}).rename({"_t": "z2"}).reorder(("z1", "z2")) != B:
                return False
        for (i, j) in self.off:
            swapped = self.entry(j, i)
            back = swapped.rename({"z1": "_t", "z2": "z1"}).rename({"_t": "z2"}).reorder(("z1", "z2"))
            if back != self.off[(i, j)]:
                return False
        return True


@dataclass(eq=False)
class SpectralCurve:
    components: list
    bergman: BergmanTable
    params: dict = field(default_factory=dict)
    ctx: Context | None = None
    name: str = "curve"

    def component(self, i: int) -> Component:
        for c in self.components:
            if c.index == i:
                return c
        raise KeyError(f"no component with color {i}")

    @property
    def colors(self) -> list:
        return [c.index for c in self.components]


def _const_form(c, degree=0) -> DiffForm:
    return DiffForm.monomial("z", 0, c, degree)


def joukowsky(a, b, index: int = 1) -> Component:
    """Component with x(z) = (a+b)/2 + ((a-b)/4)(z + 1/z)."""
    if isinstance(a, int) or isinstance(a, str):
        a = rational(a)
    if isinstance(b, int) or isinstance(b, str):
        b = rational(b)
    if not (a - b):
        raise ValueError("degenerate cut: a = b")
    half = simplify_scalar((a + b) * Rational(1, 2))
    quarter = simplify_scalar((a - b) * Rational(1, 4))
    x = (DiffForm.monomial("z", 0, half, 0) + DiffForm.monomial("z", 1, quarter, 0)
         + DiffForm.monomial("z", -1, quarter, 0))
    return Component(index=index, x=x, a=a, b=b)


def standard_bergman(v1: str = "z1", v2: str = "z2") -> DiffForm:
    return DiffForm.coupled(v1, v2, 2)


class KernelForm:
    """Recursion kernel K(z0, z) of one component.

    ``K(z0, z) = factor * int_{1/z}^{z} B(z0, .) / (omega(z) - omega(1/z))``.
    It is handled through its Laurent expansions in ``z`` at the branch
    points; coefficients are one-forms in ``z0`` (variable name ``"z0"``).
    """

    def __init__(self, component: Component, B_diag: DiffForm, factor=Rational(1, 2)):
        if component.omega10 is None:
            raise ValueError("component has no omega_1^0")
        self.component = component
        self.factor = factor
        B = B_diag.rename({B_diag.vars[0]: "z0", B_diag.vars[1]: "w"})
        self.B = B
        self.F = B.primitive("w", None)  # function of w, form in z0
        self._cache = {}
        om = component.omega10
        for p in BRANCH_POINTS:
            d = self.delta(p, 4)
            if not d.coeffs:
                raise ValueError("omega(z) - omega(1/z) vanishes identically")

    def delta(self, p, upto: int) -> LaurentSeries:
        """omega(z) - omega(1/z) expanded at z = p + eps (scalar series)."""
        om = self.component.omega10
        s = om.expand({"z": Chart("shift", p)}, upto) - om.expand({"z": Chart("inv", p)}, upto)
        return scalar_series(s)

    def numerator(self, p, upto: int) -> LaurentSeries:
        """int_{1/z}^{z} B(z0, .) expanded at z = p + eps."""
        return (self.F.expand({"w": Chart("shift", p)}, upto)
                - self.F.expand({"w": Chart("inv", p)}, upto))

    def series(self, p, upto: int) -> LaurentSeries:
        key = (Rational(p), upto)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        d = self.delta(p, upto + 8)
        vd = d.val
        num = self.numerator(p, upto + vd)
        vn = num.val if num.coeffs else 1
        inv = d.inverse(upto - vn)
        k = num.mul(inv, upto).scale(self.factor)
        self._cache[key] = k
        return k


def recursion_kernel(c: Component, B_diag: DiffForm, factor=Rational(1, 2)) -> KernelForm:
    return KernelForm(c, B_diag, factor)


# ---------------------------------------------------------------------------
# quartic melonic tensor model curve


def qmtm_context(alpha) -> Context:
    """Context for the tensor-model curve: symbolic alpha or a fixed rational value."""
    if isinstance(alpha, str) and alpha.strip() == "alpha":
        return Context(["alpha"], beta=True)
    return Context(beta=True, alpha_value=rational(alpha))


def _alpha_scalar(ctx: Context):
    if ctx.alpha_value is not None:
        return ctx.alpha_value
    return ctx.symbol("alpha")


def qmtm_constant(d: int, alpha, ctx: Context | None = None):
    """c(d, alpha) = -alpha^2 (d-1) / (d(2 alpha^2 - alpha^4) + alpha^4 - alpha^2 - 1)."""
    if ctx is None:
        ctx = qmtm_context(alpha)
    a = _alpha_scalar(ctx)
    a2 = a * a
    a4 = a2 * a2
    c = -a2 * (d - 1) / (d * (2 * a2 - a4) + a4 - a2 - 1)
    return simplify_scalar(c)


def qmtm_curve(d: int, alpha) -> SpectralCurve:
    """d Gaussian-type discs coupled through the constant c(d, alpha)."""
    if d < 3:
        raise ValueError("tensor dimension must be at least 3")
    ctx = qmtm_context(alpha)
    if d % 4 != 2:
        warnings.warn(f"d = {d} is not of the form 4k+2: no topological 1/N expansion",
                      DimensionWarning, stacklevel=2)
    a = _alpha_scalar(ctx)
    beta = ctx.symbol("beta")
    inv_beta = simplify_scalar(1 / beta)
    c = qmtm_constant(d, alpha, ctx)
    comps = []
    for i in range(1, d + 1):
        x = DiffForm.monomial("z", 1, inv_beta, 0) + DiffForm.monomial("z", -1, inv_beta, 0)
        y = DiffForm.monomial("z", -1, simplify_scalar(beta), 0)
        om = (y * x.derivative("z")).map_coeffs(simplify_scalar)
        comps.append(Component(index=i, x=x, y=y, omega10=om,
                               a=simplify_scalar(2 * inv_beta), b=simplify_scalar(-2 * inv_beta)))
    cross = DiffForm.monomial("z1", -2).tensor(DiffForm.monomial("z2", -2)).scale(c)
    diag = {i: standard_bergman() + cross for i in range(1, d + 1)}
    off = {(i, j): cross for i in range(1, d + 1) for j in range(i + 1, d + 1)}
    label = "alpha" if ctx.alpha_value is None else str(ctx.alpha_value)
    return SpectralCurve(comps, BergmanTable(diag, off), {"d": d, "alpha": label, "c": c}, ctx,
                         name=f"qmtm(d={d}, alpha={label})")
