"""Residue recursion for the correlators of one curve component.

Correlators are stored as forms in the variables ``z1 .. zn``.  The
recursion is evaluated with local Laurent expansions at the branch points
``z = +-1``: for each branch point the kernel series and the series of the
recursion integrand are multiplied and the ``eps^-1`` coefficient is kept.
"""
from __future__ import annotations

import itertools
import threading
from typing import Callable

from .algebra import Rational
from .forms import INF, Chart, DiffForm, LaurentSeries, parse_form
from .curve import BRANCH_POINTS, KernelForm, SpectralCurve

__all__ = [
    "CorrelatorStore",
    "omega",
    "check_linear",
    "check_quadratic",
    "quadratic_series",
    "moments",
    "moment_of_form",
    "stable",
    "apply_moment",
    "MomentRecursion",
]


def stable(g: int, n: int) -> bool:
    return 2 * g - 2 + n > 0


def vnames(n: int, start: int = 1) -> tuple:
    return tuple(f"z{i}" for i in range(start, start + n))


class CorrelatorStore:
    """Memo table of correlators of one component of a curve.

    ``omega2`` overrides the diagonal Bergman kernel (the same object is used
    as the base correlator and inside the kernel); ``kernel_factor`` is the
    normalization in front of the kernel.
    """

    def __init__(self, curve: SpectralCurve, component: int | None = None,
                 kernel_factor=Rational(1, 2), omega2: DiffForm | None = None,
                 reverse_branch_order: bool = False):
        self.curve = curve
        self.color = curve.components[0].index if component is None else component
        comp = curve.component(self.color)
        if comp.omega10 is None:
            raise ValueError("missing base data: omega_1^0")
        B = omega2 if omega2 is not None else curve.bergman.diag.get(self.color)
        if B is None:
            raise ValueError("missing base data: omega_2^0")
        B = B.rename(dict(zip(B.vars, ("z1", "z2"))))
        self.comp = comp
        self.kernel = KernelForm(comp, B, kernel_factor)
        self._data: dict = {(0, 1): comp.omega10.rename({"z": "z1"}), (0, 2): B}
        self._lock = threading.Lock()
        self.reverse_branch_order = reverse_branch_order

    # -- storage
    def get(self, g: int, n: int) -> DiffForm | None:
        return self._data.get((g, n))

    def put(self, g: int, n: int, form: DiffForm) -> DiffForm:
        """First writer wins; a later differing value is an error."""
        with self._lock:
            cur = self._data.get((g, n))
            if cur is None:
                self._data[(g, n)] = form
                return form
        if cur != form:
            raise RuntimeError(f"conflicting values for omega_{n}^{g}")
        return cur

    def inject(self, g: int, n: int, form: DiffForm) -> None:
        """Overwrite an entry (negative controls)."""
        self._data[(g, n)] = form

    def keys(self):
        return sorted(self._data)

    def __contains__(self, key):
        return key in self._data

    def dump(self) -> str:
        lines = []
        for (g, n) in sorted(self._data):
            lines.append(f"{self.color} {g} {n} {self._data[(g, n)].to_str()}")
        return "\n".join(lines) + "\n"

    def load(self, text: str, ctx=None) -> None:
        for line in text.splitlines():
            if not line.strip():
                continue
            c, g, n, rest = line.split(" ", 3)
            if int(c) != self.color:
                continue
            self.put(int(g), int(n), parse_form(rest, ctx or self.curve.ctx))


def _expand_at(form: DiffForm, names: tuple, charts: dict, upto: int) -> LaurentSeries:
    f = form.rename(dict(zip(form.vars, names)))
    return f.expand(charts, upto)


def _min_val(form: DiffForm, var_index: int, chart: Chart) -> int:
    return form.min_val(form.vars[var_index], chart)


def recursion_integrand(store: CorrelatorStore, g: int, n: int, p, upto: int = 0,
                        include_omega10: bool = False) -> LaurentSeries:
    """Series at z = p + eps of the quadratic combination in z.

    Without ``omega_1^0`` factors this is the primed sum used by the
    recursion; with them it is the full quadratic loop-equation object.
    The free variables are ``z2 .. zn``.
    """
    J = vnames(n - 1, 2)
    shift, inv = Chart("shift", p), Chart("inv", p)
    total = None

    def acc(s):
        nonlocal total
        total = s if total is None else total + s

    if g >= 1:
        W = omega(store, g - 1, n + 1)
        acc(_expand_at(W, ("_a", "_b") + J, {"_a": shift, "_b": inv}, upto))
    for h in range(g + 1):
        for r in range(len(J) + 1):
            for I in itertools.combinations(J, r):
                rest = tuple(v for v in J if v not in I)
                k1, k2 = (h, len(I) + 1), (g - h, len(rest) + 1)
                if not include_omega10 and ((0, 1) in (k1, k2)):
                    continue
                A = omega(store, *k1)
                Bf = omega(store, *k2)
                va = _min_val(A, 0, shift)
                vb = _min_val(Bf, 0, inv)
                sa = _expand_at(A, ("_a",) + I, {"_a": shift}, upto - vb)
                sb = _expand_at(Bf, ("_b",) + rest, {"_b": inv}, upto - va)
                acc(sa.mul(sb, upto))
    if total is None:
        total = LaurentSeries({}, upto, J, (1,) * len(J))
    return total


def _tr_step(store: CorrelatorStore, g: int, n: int) -> DiffForm:
    target = vnames(n)
    result = DiffForm(target, {}, (1,) * n)
    points = BRANCH_POINTS[::-1] if store.reverse_branch_order else BRANCH_POINTS
    for p in points:
        Q = recursion_integrand(store, g, n, p, 0)
        if not Q.coeffs:
            continue
        vq = Q.val
        K = store.kernel.series(p, -1 - vq)
        res = K.residue_pairing(Q)
        if res is None:
            continue
        res = res.rename({"z0": "z1"}).reorder(target)
        result = result + res
    return result


def omega(store: CorrelatorStore, g: int, n: int, curve: SpectralCurve | None = None) -> DiffForm:
    """omega_n^g of the store's component (memoized)."""
    if curve is not None and curve is not store.curve:
        raise ValueError("store belongs to a different curve")
    if n < 1 or g < 0:
        raise ValueError("need g >= 0 and n >= 1")
    hit = store.get(g, n)
    if hit is not None:
        return hit
    if not stable(g, n):
        raise ValueError(f"unstable request (g, n) = ({g}, {n}) is not base data")
    return store.put(g, n, _tr_step(store, g, n))


def check_linear(f: DiffForm, v: str, stable_input: bool = True) -> DiffForm:
    """S f = f(v) + f(1/v) (with the differential transformed)."""
    if not stable_input:
        raise ValueError("linear loop check refuses unstable input")
    return f + f.involute(v)


def quadratic_series(store: CorrelatorStore, g: int, n: int, p, upto: int = 3) -> LaurentSeries:
    return recursion_integrand(store, g, n, p, upto, include_omega10=True)


def check_quadratic(store: CorrelatorStore, g: int, n: int, upto: int = 3) -> dict:
    """Vanishing order of the full quadratic combination at each branch point.

    The value ``upto + 1`` means "no nonzero coefficient found up to eps^upto".
    """
    out = {}
    for p in BRANCH_POINTS:
        s = quadratic_series(store, g, n, p, upto)
        out[p] = s.val
    return out


def apply_moment(f: DiffForm, var: str, x: DiffForm, p: int) -> DiffForm:
    """-Res_{var = inf} x(var)^p f: removes ``var`` from f."""
    if p <= 0:
        raise ValueError("power 0 (normalization term) is excluded")
    xp = (x ** p).rename({"z": var})
    ch = {var: Chart("inf")}
    vx = xp.min_val(var, Chart("inf"))
    vf = f.min_val(var, Chart("inf"))
    sf = f.expand(ch, -1 - vx)
    sx = xp.expand(ch, -1 - vf)
    r = sx.residue_pairing(sf)
    if r is None:
        return DiffForm(sf.vars, {}, sf.degrees)
    return -r


def moment_of_form(f: DiffForm, x: DiffForm, powers) -> object:
    """Iterated -Res_{z_i = inf} x(z_i)^{p_i} f, variables taken in order."""
    if len(powers) != f.n:
        raise ValueError("one power per variable")
    cur = f
    for var, p in zip(f.vars, powers):
        cur = apply_moment(cur, var, x, p)
    return cur.scalar_value() if cur.terms else Rational(0)


def moments(store: CorrelatorStore, g: int, powers, curve: SpectralCurve | None = None):
    """Connected correlator <prod Tr M^p_i>_c at genus g."""
    powers = list(powers)
    if any(p <= 0 for p in powers):
        raise ValueError("power 0 (normalization term) is excluded")
    f = omega(store, g, len(powers))
    return moment_of_form(f, store.comp.x, powers)


class MomentRecursion:
    """The recursion with moment functionals applied to the spectator variables.

    ``form(g, k, P)`` is omega_{k+|P|}^g with the last |P| variables replaced
    by their moments of powers P (a sorted tuple): a form in ``z1 .. zk``.
    The moment functionals act on variables other than the one recursed on,
    so they can be applied before the residue; only ``g + 1`` variables are
    ever kept symbolic.
    """

    def __init__(self, store: CorrelatorStore):
        self.store = store
        self.x = store.comp.x
        self._memo: dict = {}
        self._lock = threading.Lock()

    def form(self, g: int, k: int, P: tuple = ()) -> DiffForm:
        P = tuple(sorted(P))
        key = (g, k, P)
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit
        n = k + len(P)
        if not P or not stable(g, n):
            f = omega(self.store, g, n)
            for j, p in enumerate(P):
                f = apply_moment(f, f"z{k + 1 + j}", self.x, p)
        else:
            f = self._step(g, k, P)
        with self._lock:
            self._memo.setdefault(key, f)
        return f

    @staticmethod
    def _sub_multisets(P: tuple):
        """(P1, P2, multiplicity) over all subsets of positions, grouped."""
        counts: dict = {}
        for r in range(len(P) + 1):
            for idx in itertools.combinations(range(len(P)), r):
                P1 = tuple(P[i] for i in idx)
                P2 = tuple(P[i] for i in range(len(P)) if i not in idx)
                counts[(P1, P2)] = counts.get((P1, P2), 0) + 1
        return sorted(counts.items())

    def _integrand(self, g: int, k: int, P: tuple, p) -> LaurentSeries:
        J = vnames(k - 1, 2)
        shift, inv = Chart("shift", p), Chart("inv", p)
        total = None
        if g >= 1:
            W = self.form(g - 1, k + 1, P)
            total = _expand_at(W, ("_a", "_b") + J, {"_a": shift, "_b": inv}, 0)
        for h in range(g + 1):
            for r in range(len(J) + 1):
                for I in itertools.combinations(J, r):
                    rest = tuple(v for v in J if v not in I)
                    for (P1, P2), mult in self._sub_multisets(P):
                        if (h, len(I) + len(P1)) == (0, 0) or (g - h, len(rest) + len(P2)) == (0, 0):
                            continue
                        A = self.form(h, 1 + len(I), P1)
                        Bf = self.form(g - h, 1 + len(rest), P2)
                        va = _min_val(A, 0, shift)
                        vb = _min_val(Bf, 0, inv)
                        sa = _expand_at(A, ("_a",) + I, {"_a": shift}, -vb)
                        sb = _expand_at(Bf, ("_b",) + rest, {"_b": inv}, -va)
                        term = sa.mul(sb, 0)
                        if mult != 1:
                            term = term.scale(Rational(mult))
                        total = term if total is None else total + term
        if total is None:
            total = LaurentSeries({}, 0, J, (1,) * len(J))
        return total

    def _step(self, g: int, k: int, P: tuple) -> DiffForm:
        target = vnames(k)
        result = DiffForm(target, {}, (1,) * k)
        for p in BRANCH_POINTS:
            Q = self._integrand(g, k, P, p)
            if not Q.coeffs:
                continue
            K = self.store.kernel.series(p, -1 - Q.val)
            res = K.residue_pairing(Q)
            if res is None:
                continue
            result = result + res.rename({"z0": "z1"}).reorder(target)
        return result

    def moment(self, g: int, powers) -> object:
        """<prod Tr M^p_i>_c at genus g through the projected recursion."""
        powers = list(powers)
        if not powers or any(p <= 0 for p in powers):
            raise ValueError("positive powers required")
        first, rest = powers[0], tuple(powers[1:])
        f = self.form(g, 1, rest)
        return moment_of_form(f, self.x, [first])
