"""Weights of blob graphs and reconstruction of colored correlators.

The weight of a graph is the product of its vertex forms contracted along
its edges and bicolored leaves.  Every primitive in a contraction has its
basepoint at the branch point where the residue is taken.

* monocolored edge (omega side u, phi side y):
  ``sum_s Res_{u->s} W(u) int_s^u phi``
* bicolored edge (u of color i, w of color j):
  ``sum_{s,s'} Res_{u->s} Res_{w->s'} W(u, w) int_s^u int_{s'}^w omega^0_{e_i+e_j}``
* bicolored leaf (u of color i, free leaf x of color j):
  ``sum_s Res_{u->s} W(u) int_s^u omega^0_{e_i+e_j}(., x)``
"""
from __future__ import annotations

import itertools
import threading
from collections import Counter

from ..algebra import Rational
from ..curve import BRANCH_POINTS
from ..forms import Chart, DiffForm, LaurentSeries
from .colored import (ColoredBase, PhiProvider, colored_vars, leaf_var, normalized_omega,
                      projector_P, unit)
from .graphs import BlobGraph, all_splits, enumerate_blob_graphs

__all__ = [
    "evaluate_graph_weight",
    "assemble_HP",
    "reconstruct_omega",
    "ColoredTower",
    "P_recursion_check",
    "mono_pairing",
    "bicolored_edge_pairing",
    "bicolored_leaf_pairing",
]


def _zero_like(vars_, degrees) -> DiffForm:
    return DiffForm(vars_, {}, degrees)


def mono_pairing(T: DiffForm, u: str, y: str) -> DiffForm:
    """sum_s Res_{u->s} T(u, y) with y integrated from s to u.

    T is expanded in y at s (phi side must be holomorphic there); the term
    ``a_k (y - s)^k dy`` integrates to ``a_k (u - s)^(k+1) / (k+1)``, whose
    residue against the u-part is the coefficient of ``eps^(-k-2)``.
    """
    if T.has_coupling(y):
        raise NotImplementedError("coupled factor on the phi side of a monocolored edge")
    rest = tuple(v for v in T.vars if v not in (u, y))
    degs = tuple(dg for v, dg in zip(T.vars, T.degrees) if v not in (u, y))
    out = _zero_like(rest, degs)
    for s in BRANCH_POINTS:
        ch = Chart("shift", s)
        m = -T.min_val(u, ch)
        if m < 2:
            continue
        ser = T.expand({y: ch}, m - 2)
        if any(k < 0 for k in ser.coeffs):
            raise ValueError(f"phi has a pole at the branch point {s}")
        for k, Tk in ser.coeffs.items():
            r = Tk.expand({u: ch}, -k - 2).coefficient(-k - 2)
            if r:
                out = out + r.scale(Rational(1, k + 1)).reorder(rest)
    return out


def _residue(T: DiffForm, var: str, point) -> DiffForm:
    ch = Chart("shift", point)
    if T.min_val(var, ch) >= 0:
        rest = tuple(v for v in T.vars if v != var)
        return _zero_like(rest, tuple(dg for v, dg in zip(T.vars, T.degrees) if v != var))
    return T.residue(var, point)


def bicolored_edge_pairing(T: DiffForm, u: str, w: str, cross: DiffForm) -> DiffForm:
    """Double residue of T against the double primitive of ``cross`` (vars (u, w))."""
    rest = tuple(v for v in T.vars if v not in (u, w))
    degs = tuple(dg for v, dg in zip(T.vars, T.degrees) if v not in (u, w))
    E = cross.rename(dict(zip(cross.vars, (u, w))))
    out = _zero_like(rest, degs)
    for s in BRANCH_POINTS:
        Es = E.primitive(u, s)
        for s2 in BRANCH_POINTS:
            F = Es.primitive(w, s2)
            prod_ = T * F
            r = _residue(_residue(prod_, w, s2), u, s)
            out = out + r.reorder(rest)
    return out


def bicolored_leaf_pairing(T: DiffForm, u: str, x: str, cross: DiffForm) -> DiffForm:
    """Residue of T against the primitive of ``cross(u, x)`` in u; x becomes a free leaf."""
    E = cross.rename(dict(zip(cross.vars, (u, x))))
    out = None
    for s in BRANCH_POINTS:
        r = _residue(T * E.primitive(u, s), u, s)
        out = r if out is None else out + r
    return out


def _vertex_slots(G: BlobGraph):
    """Variable names per vertex slot and the list of contractions, lexicographic."""
    omega_vars = [[leaf_var(c, j) for c, j in v.bleaves] for v in G.omega]
    phi_vars = [[leaf_var(c, j) for c, j in f.leaves] for f in G.phi]
    phi_colors = [[c for c, _ in f.leaves] for f in G.phi]
    contractions = []
    for w, v in enumerate(G.omega):
        for c, j in v.aleaves:
            name = f"_a{c}_{j}"
            omega_vars[w].append(name)
            contractions.append(("leaf", name, leaf_var(c, j), v.color, c))
    for n, (w, j) in enumerate(G.mono_edges()):
        a, b = f"_m{n}o", f"_m{n}p"
        omega_vars[w].append(a)
        phi_vars[j].append(b)
        phi_colors[j].append(G.omega[w].color)
        contractions.append(("mono", a, b, None, None))
    for n, (a, b) in enumerate(G.bi_edges):
        x, y = f"_b{n}l", f"_b{n}r"
        omega_vars[a].append(x)
        omega_vars[b].append(y)
        contractions.append(("bi", x, y, G.omega[a].color, G.omega[b].color))
    return omega_vars, phi_vars, phi_colors, contractions


def evaluate_graph_weight(G: BlobGraph, phi: PhiProvider, base: ColoredBase,
                          order: list | None = None) -> DiffForm:
    """Contracted product of vertex weights (not divided by |Aut|).

    ``order`` optionally permutes the contraction sequence (the result does
    not depend on it).  Variables of the result follow :func:`colored_vars`
    restricted to the graph's leaves.
    """
    if G.aut < 1:
        raise ValueError("graph carries no automorphism order")
    omega_vars, phi_vars, phi_colors, contractions = _vertex_slots(G)
    leaves = colored_vars(G.k)
    zero = _zero_like(leaves, (1,) * len(leaves))
    T = DiffForm.scalar(Rational(1))
    for j, f in enumerate(G.phi):
        q = G.phi_index(j)
        form = phi.get(f.genus, q)
        if form.is_zero():
            return zero
        # slots of the provided form are grouped by color, then by position
        by_color: dict = {}
        for name, c in zip(phi_vars[j], phi_colors[j]):
            by_color.setdefault(c, []).append(name)
        names = [n for c in sorted(by_color) for n in by_color[c]]
        T = T.tensor(form.rename(dict(zip(colored_vars(q), names))))
    for w, v in enumerate(G.omega):
        n = len(omega_vars[w])
        W = normalized_omega(base, v.genus, n, v.color)
        T = T.tensor(W.rename({f"z{i}": name for i, name in enumerate(omega_vars[w], 1)}))
    seq = contractions if order is None else [contractions[i] for i in order]
    for kind, a, b, ci, cj in seq:
        if not T.terms:
            return zero
        if kind == "mono":
            T = mono_pairing(T, a, b)
        elif kind == "bi":
            T = bicolored_edge_pairing(T, a, b, base.entry(ci, cj))
        else:
            T = bicolored_leaf_pairing(T, a, b, base.entry(ci, cj))
    if not T.terms:
        return zero
    return T.reorder(leaves)


def assemble_HP(g: int, k, A, B, phi: PhiProvider, base: ColoredBase) -> DiffForm:
    """H_A P_B omega_k^g as the sum of graph weights over |Aut|."""
    k = tuple(k)
    names = colored_vars(k)
    out = _zero_like(names, (1,) * len(names))
    for G in enumerate_blob_graphs(g, k, A, B):
        w = evaluate_graph_weight(G, phi, base)
        if w.terms:
            out = out + w.scale(Rational(1, G.aut))
    return out


class ColoredTower:
    """Memo table of reconstructed colored correlators for fixed (base, phi)."""

    def __init__(self, base: ColoredBase, phi: PhiProvider | None = None):
        self.base = base
        self.phi = phi or PhiProvider.zero()
        self._data: dict = {}
        self._lock = threading.Lock()

    def get(self, g: int, k) -> DiffForm:
        k = tuple(k)
        if len(k) != self.base.d:
            raise ValueError(f"index must have {self.base.d} entries")
        with self._lock:
            hit = self._data.get((g, k))
        if hit is not None:
            return hit
        val = self.base_entry(g, k)
        if val is None:
            if 2 * g - 2 + sum(k) <= 0:
                raise ValueError(f"unstable colored request (g, k) = ({g}, {k})")
            names = colored_vars(k)
            val = _zero_like(names, (1,) * len(names))
            for A, B in all_splits(k):
                val = val + assemble_HP(g, k, A, B, self.phi, self.base)
        with self._lock:
            self._data.setdefault((g, k), val)
        return val

    def base_entry(self, g: int, k):
        """The unstable colored data omega^0_{e_i}, omega^0_{2e_i}, omega^0_{e_i+e_j}."""
        if g != 0 or sum(k) > 2:
            return None
        colors = [c for c, kc in enumerate(k, start=1) for _ in range(kc)]
        names = colored_vars(k)
        if len(colors) == 1:
            return self.base.omega_e(colors[0]).rename({"z": names[0]})
        if len(colors) == 2:
            E = self.base.entry(colors[0], colors[1])
            return E.rename(dict(zip(E.vars, names)))
        return None


def reconstruct_omega(g: int, k, phi: PhiProvider, base: ColoredBase, tower: ColoredTower | None = None) -> DiffForm:
    """omega_k^g = sum over A/B splits of H_A P_B omega_k^g."""
    tower = tower or ColoredTower(base, phi)
    return tower.get(g, k)


# ---------------------------------------------------------------------------
# recursion for the polar part


def _as_slots(form: DiffForm, k, first: str | None, color: int, free: list) -> DiffForm:
    """Rename a colored form of index k so that its first color-``color`` leaf is ``first``
    and the remaining leaves take the names in ``free`` (grouped by color)."""
    names = colored_vars(k)
    targets = []
    pool = {c: [n for n in free if _color_of(n) == c] for c in range(1, len(k) + 1)}
    for c, kc in enumerate(k, start=1):
        lst = list(pool[c])
        if first is not None and c == color:
            lst = [first] + lst
        if len(lst) != kc:
            raise ValueError("slot bookkeeping mismatch")
        targets += lst
    return form.rename(dict(zip(names, targets)))


def _color_of(name: str) -> int:
    return int(name[1:].split("_")[0])


def _index_of(names, d: int, extra_color: int | None = None, times: int = 1) -> tuple:
    cnt = Counter(_color_of(n) for n in names)
    if extra_color is not None:
        cnt[extra_color] += times
    return tuple(cnt.get(c, 0) for c in range(1, d + 1))


def colored_integrand(tower: ColoredTower, g: int, k, i: int, p, upto: int = 0) -> LaurentSeries:
    """Series at z = p + eps of the primed quadratic combination with first slot of color i.

    Free variables are the leaves of k (names from :func:`colored_vars`).
    """
    d = tower.base.d
    J = list(colored_vars(k))
    shift, inv = Chart("shift", p), Chart("inv", p)
    total = None

    def acc(s):
        nonlocal total
        total = s if total is None else total + s

    if g >= 1:
        kk = _index_of(J, d, i, 2)
        W = tower.get(g - 1, kk)
        names = colored_vars(kk)
        # the two extra color-i slots come first within color i
        order_i = [n for n in names if _color_of(n) == i]
        mapping = {order_i[0]: "_a", order_i[1]: "_b"}
        rest_i = [n for n in J if _color_of(n) == i]
        for src, dst in zip(order_i[2:], rest_i):
            mapping[src] = dst
        for c in range(1, d + 1):
            if c == i:
                continue
            src = [n for n in names if _color_of(n) == c]
            dst = [n for n in J if _color_of(n) == c]
            mapping.update(zip(src, dst))
        W = W.rename(mapping)
        acc(W.expand({"_a": shift, "_b": inv}, upto))
    for h in range(g + 1):
        for r in range(len(J) + 1):
            for I in itertools.combinations(J, r):
                rest = [v for v in J if v not in I]
                k1 = _index_of(I, d, i)
                k2 = _index_of(rest, d, i)
                if (h, k1) == (0, unit(d, i)) or (g - h, k2) == (0, unit(d, i)):
                    continue
                A = _as_slots(tower.get(h, k1), k1, "_a", i, list(I))
                Bf = _as_slots(tower.get(g - h, k2), k2, "_b", i, rest)
                va = A.min_val("_a", shift)
                vb = Bf.min_val("_b", inv)
                sa = A.expand({"_a": shift}, upto - vb)
                sb = Bf.expand({"_b": inv}, upto - va)
                acc(sa.mul(sb, upto))
    if total is None:
        total = LaurentSeries({}, upto, tuple(J), (1,) * len(J))
    return total


def P_recursion_check(g: int, k, i: int, phi: PhiProvider, base: ColoredBase,
                      kernel_factor=Rational(1, 2), tower: ColoredTower | None = None) -> DiffForm:
    """Residual P omega^g_{e_i+k}(z0, z_k) - sum_s Res K_i(z0, z) Qtilde(z; z_k).

    The colored correlators are reconstructed from ``phi``; the kernel uses
    ``kernel_factor`` (1/2 is the normalization of the recursion).
    """
    k = tuple(k)
    d = base.d
    if len(k) != d or not 1 <= i <= d:
        raise ValueError("index length or color out of range")
    full = tuple(kc + (c == i) for c, kc in enumerate(k, start=1))
    if 2 * g - 2 + sum(full) <= 0:
        raise ValueError(f"unstable colored request (g, k) = ({g}, {full})")
    tower = tower or ColoredTower(base, phi)
    J = list(colored_vars(k))
    z0 = "_z0"
    lhs = _as_slots(tower.get(g, full), full, z0, i, J)
    order = [z0] + J
    lhs = projector_P(lhs.reorder(order), z0, base, color=i)
    kernel = base.store(i, kernel_factor).kernel
    rhs = DiffForm(tuple(order), {}, (1,) * len(order))
    for p in BRANCH_POINTS:
        Q = colored_integrand(tower, g, k, i, p, 0)
        if not Q.coeffs:
            continue
        K = kernel.series(p, -1 - Q.val)
        res = K.residue_pairing(Q)
        if res is None:
            continue
        rhs = rhs + res.rename({"z0": z0}).reorder(order)
    return lhs - rhs
