"""Enumeration of blob graphs.

A blob graph has two kinds of vertices.  An omega vertex (color c, genus h)
carries the normalized correlator; a phi vertex (genus h) carries blob data.
Leaves are the variables of the colored index k.  B-leaves sit on omega
vertices of their own color.  A-leaves sit either on a phi vertex
(monocolored) or on an omega vertex of a different color (bicolored, free end).
Edges join an omega vertex to a phi vertex (monocolored, color of the omega
vertex) or two omega vertices of different colors (bicolored).

Omega vertices are told apart by their B-leaves and phi vertices with leaves
by their leaves, so the only automorphisms permute parallel edges and
interchangeable leafless phi vertices.
"""
from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import factorial, prod

from ..models import set_partitions

__all__ = [
    "OmegaVertex",
    "PhiVertex",
    "BlobGraph",
    "enumerate_blob_graphs",
    "format_graphs",
    "all_splits",
]


@dataclass(frozen=True, order=True)
class OmegaVertex:
    color: int
    genus: int
    bleaves: tuple           # ((color, j), ...) sorted
    aleaves: tuple = ()      # bicolored A-leaves with free end: ((color, j), ...)


@dataclass(frozen=True, order=True)
class PhiVertex:
    genus: int
    leaves: tuple            # monocolored A-leaves ((color, j), ...)
    edges: tuple             # omega-vertex indices of the monocolored edges (sorted, with repeats)


@dataclass(frozen=True)
class BlobGraph:
    g: int
    k: tuple
    omega: tuple
    phi: tuple
    bi_edges: tuple          # sorted pairs (a, b), a < b, omega-vertex indices
    aut: int

    @property
    def n_vertices(self) -> int:
        return len(self.omega) + len(self.phi)

    @property
    def n_edges(self) -> int:
        return len(self.bi_edges) + sum(len(f.edges) for f in self.phi)

    @property
    def b1(self) -> int:
        return self.n_edges - self.n_vertices + 1

    @property
    def genus_sum(self) -> int:
        return sum(v.genus for v in self.omega) + sum(f.genus for f in self.phi)

    def omega_degree(self, i: int) -> int:
        v = self.omega[i]
        mono = sum(f.edges.count(i) for f in self.phi)
        bi = sum((a == i) + (b == i) for a, b in self.bi_edges)
        return len(v.bleaves) + len(v.aleaves) + mono + bi

    def phi_index(self, j: int) -> tuple:
        """Colored index q of phi vertex j (leaves plus edge colors)."""
        f = self.phi[j]
        cnt = Counter(c for c, _ in f.leaves)
        for e in f.edges:
            cnt[self.omega[e].color] += 1
        return tuple(cnt.get(c, 0) for c in range(1, len(self.k) + 1))

    def mono_edges(self) -> list:
        """(omega index, phi index) per monocolored edge, lexicographic."""
        return sorted((e, j) for j, f in enumerate(self.phi) for e in f.edges)

    def is_stable(self) -> bool:
        for i, v in enumerate(self.omega):
            if 2 * v.genus - 2 + self.omega_degree(i) <= 0:
                return False
        for j, f in enumerate(self.phi):
            if 2 * f.genus - 2 + len(f.leaves) + len(f.edges) <= 0:
                return False
        return True

    def is_connected(self) -> bool:
        return _connected(len(self.omega), len(self.phi),
                          [(a, b) for a, b in self.bi_edges],
                          [(e, j) for j, f in enumerate(self.phi) for e in f.edges])

    def to_lines(self) -> list:
        k = ",".join(map(str, self.k))
        out = [f"graph g={self.g} k={k} aut={self.aut} b1={self.b1}"]
        for i, v in enumerate(self.omega):
            bl = ",".join(f"{c}:{j}" for c, j in v.bleaves)
            al = ",".join(f"{c}:{j}" for c, j in v.aleaves)
            out.append(f"v w{i} omega color={v.color} genus={v.genus} B={bl} A={al}")
        for j, f in enumerate(self.phi):
            q = ",".join(map(str, self.phi_index(j)))
            lv = ",".join(f"{c}:{i}" for c, i in f.leaves)
            out.append(f"v p{j} phi colors={q} genus={f.genus} A={lv}")
        for e, j in self.mono_edges():
            out.append(f"e mono w{e} p{j} color={self.omega[e].color}")
        for a, b in self.bi_edges:
            out.append(f"e bi w{a} w{b} colors={self.omega[a].color},{self.omega[b].color}")
        return out


def format_graphs(graphs) -> str:
    return "".join("\n".join(G.to_lines()) + "\n" for G in graphs)


def _connected(n_omega: int, n_phi: int, bi, mono) -> bool:
    n = n_omega + n_phi
    if n == 0:
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in bi:
        parent[find(a)] = find(b)
    for e, j in mono:
        parent[find(e)] = find(n_omega + j)
    root = find(0)
    return all(find(x) == root for x in range(n))


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _validate(g: int, k, A, B):
    k = tuple(int(x) for x in k)
    if g < 0 or any(x < 0 for x in k):
        raise ValueError("genus and index entries must be non-negative")
    d = len(k)
    if len(A) != d or len(B) != d:
        raise ValueError("A and B need one leaf set per color")
    A = tuple(frozenset(a) for a in A)
    B = tuple(frozenset(b) for b in B)
    for i in range(d):
        if A[i] & B[i] or (A[i] | B[i]) != frozenset(range(1, k[i] + 1)):
            raise ValueError(f"A and B do not split the leaves of color {i + 1}")
    return k, A, B


def _aut(omega_n: int, phi: tuple, bi_edges: tuple, n_leafy: int) -> int:
    a = prod(factorial(m) for m in Counter(bi_edges).values())
    for f in phi:
        a *= prod(factorial(m) for m in Counter(f.edges).values())
    leafless = Counter(phi[n_leafy:])
    a *= prod(factorial(m) for m in leafless.values())
    return a


def _graphs_for_blocks(g, k, blocks, a_leaves, chi):
    """All graphs with the given omega-vertex B-leaf blocks."""
    found = {}
    W = len(blocks)
    colors = [c for c, _ in blocks]
    options = []
    for leaf in a_leaves:
        opts = [None] + [w for w in range(W) if colors[w] != leaf[0]]
        options.append(opts)
    for choice in itertools.product(*options):
        on_phi = [leaf for leaf, ch in zip(a_leaves, choice) if ch is None]
        bic = [[] for _ in range(W)]
        for leaf, ch in zip(a_leaves, choice):
            if ch is not None:
                bic[ch].append(leaf)
        for phi_blocks in set_partitions(on_phi) if on_phi else [[]]:
            phi_blocks = sorted(tuple(sorted(b)) for b in phi_blocks)
            Pl = len(phi_blocks)
            for L0 in range(0, chi - W - Pl + 1):
                V = W + Pl + L0
                if V < 1:
                    continue
                n_phi = Pl + L0
                pairs = [("bi", a, b) for a in range(W) for b in range(a + 1, W) if colors[a] != colors[b]]
                pairs += [("mono", w, j) for w in range(W) for j in range(n_phi)]
                for b1 in range(0, g + 1):
                    E = b1 + V - 1
                    if E > 0 and not pairs:
                        continue
                    for edges in itertools.combinations_with_replacement(pairs, E):
                        bi = tuple(sorted((a, b) for t, a, b in edges if t == "bi"))
                        mono = [(a, b) for t, a, b in edges if t == "mono"]
                        # leafless phi vertices are interchangeable: keep non-decreasing edge lists
                        phi_edges = [tuple(sorted(w for w, j in mono if j == jj)) for jj in range(n_phi)]
                        tail = phi_edges[Pl:]
                        if tail != sorted(tail):
                            continue
                        if not _connected(W, n_phi, bi, mono):
                            continue
                        for gens in _compositions(g - b1, V):
                            omega = tuple(OmegaVertex(colors[w], gens[w], blocks[w][1], tuple(sorted(bic[w])))
                                          for w in range(W))
                            leafy = [PhiVertex(gens[W + j], phi_blocks[j], phi_edges[j]) for j in range(Pl)]
                            leafless = sorted(PhiVertex(gens[W + Pl + j], (), phi_edges[Pl + j]) for j in range(L0))
                            phi = tuple(leafy) + tuple(leafless)
                            G = BlobGraph(g, k, omega, phi, bi, 0)
                            if not G.is_stable():
                                continue
                            key = (omega, phi, bi)
                            if key not in found:
                                found[key] = BlobGraph(g, k, omega, phi, bi, _aut(W, phi, bi, Pl))
    return found


def enumerate_blob_graphs(g: int, k, A, B, parallel: bool = False) -> list:
    """Duplicate-free list of blob graphs for H_A P_B omega_k^g (each with |Aut|).

    ``A`` and ``B`` give, per color, the leaf indices (1-based) in each class.
    """
    k, A, B = _validate(g, k, A, B)
    chi = 2 * g - 2 + sum(k)
    if chi <= 0:
        return []
    d = len(k)
    b_parts = []
    for i in range(d):
        leaves = [(i + 1, j) for j in sorted(B[i])]
        if leaves:
            b_parts.append([[(i + 1, tuple(sorted(bl))) for bl in part] for part in set_partitions(leaves)])
    a_leaves = [(i + 1, j) for i in range(d) for j in sorted(A[i])]
    choices = []
    for combo in itertools.product(*b_parts) if b_parts else [()]:
        blocks = sorted((blk for part in combo for blk in part), key=lambda x: x[1][0])
        if len(blocks) <= chi:
            choices.append(blocks)
    if parallel:
        with ThreadPoolExecutor() as ex:
            parts = list(ex.map(lambda bl: _graphs_for_blocks(g, k, bl, a_leaves, chi), choices))
    else:
        parts = [_graphs_for_blocks(g, k, bl, a_leaves, chi) for bl in choices]
    found = {}
    for part in parts:
        found.update(part)
    return sorted(found.values(), key=lambda G: format_graphs([G]))


def all_splits(k):
    """Every (A, B) split of the leaves of k, A listed first."""
    per = []
    for kc in k:
        leaves = list(range(1, kc + 1))
        opts = []
        for r in range(kc + 1):
            for Bs in itertools.combinations(leaves, r):
                opts.append((frozenset(set(leaves) - set(Bs)), frozenset(Bs)))
        per.append(opts)
    for combo in itertools.product(*per):
        yield tuple(a for a, _ in combo), tuple(b for _, b in combo)
