import itertools

import pytest
from hypothesis import given, settings, strategies as st

from toprec.algebra import Rational, rational
from toprec.forms import Chart, DiffForm
from toprec.models import gaussian_model
from toprec.qmtm import (ColoredTower, P_recursion_check, PhiProvider, assemble_HP, colored_base, colored_vars,
                         enumerate_blob_graphs, evaluate_graph_weight, leading_resolvent_series, leaf_var,
                         projector_H, projector_P, reconstruct_omega, unit)
from toprec.qmtm.colored import ColoredForm, leaf_of
from toprec.qmtm.graphs import all_splits
from toprec.qmtm.weights import bicolored_edge_pairing, bicolored_leaf_pairing, mono_pairing
from toprec.recursion import CorrelatorStore, omega

D = 6


@pytest.fixture(scope="module")
def base13():
    return colored_base(D, "1/3")


@pytest.fixture(scope="module")
def base0():
    return colored_base(D, 0)


def split(k, A):
    """A as {color: leaves}; B is the complement."""
    As = tuple(frozenset(A.get(c, ())) for c in range(1, len(k) + 1))
    Bs = tuple(frozenset(range(1, kc + 1)) - a for kc, a in zip(k, As))
    return As, Bs


def cubic_phi():
    f = DiffForm.monomial("x1_1", 0).tensor(DiffForm.monomial("x1_2", 0)).tensor(DiffForm.monomial("x1_3", 0))
    g = DiffForm.monomial("x1_1", 1).tensor(DiffForm.monomial("x1_2", 1)).tensor(DiffForm.monomial("x1_3", 1))
    return PhiProvider({(0, unit(D, 1, 3)): f + g})


# -- variables and base data

def test_leaf_names():
    assert colored_vars((2, 0, 1)) == ("x1_1", "x1_2", "x3_1")
    assert leaf_of("x12_3") == (12, 3)
    assert leaf_of("z1") is None
    assert unit(4, 2, 3) == (0, 3, 0, 0)


def test_degenerate_coupling_rejected():
    for a in (1, -1, "1"):
        with pytest.raises(ValueError):
            colored_base(D, a)


def test_base_entries(base13):
    c = Rational(-45, 13)
    assert base13.c == c
    cross = DiffForm.monomial("z1", -2).tensor(DiffForm.monomial("z2", -2)).scale(c)
    assert base13.omega_eiej(1, 2) == cross
    with pytest.raises(ValueError):
        base13.omega_eiej(3, 3)
    with pytest.raises(ValueError):
        base13.omega_e(7)


def test_resolvent_at_zero_coupling_is_catalan():
    # coefficient of x^-(j+1) is the planar <Tr M^j>
    w = leading_resolvent_series(0, D, 9)
    assert [w[m] for m in range(1, 10)] == [1, 0, 1, 0, 2, 0, 5, 0, 14]


# -- projectors

fr = st.fractions(min_value=-6, max_value=6, max_denominator=4).map(rational)
terms = st.lists(st.tuples(st.sampled_from(["p1", "m1", "p2", "mono"]), st.integers(1, 4), fr),
                 min_size=1, max_size=5)


def build(ts, var="x1_1"):
    f = DiffForm.zero((var,))
    for kind, k, c in ts:
        if kind == "p1":
            f = f + DiffForm.pole(var, 1, k, c)
        elif kind == "m1":
            f = f + DiffForm.pole(var, -1, k, c)
        elif kind == "p2":
            f = f + DiffForm.pole(var, 3, k, c)
        else:
            f = f + DiffForm.monomial(var, k - 2, c)
    return f


@settings(max_examples=30, deadline=None)
@given(terms, st.booleans())
def test_projector_identities(ts, spectator):
    base = colored_base(D, "1/3")
    f = build(ts)
    if spectator:
        f = f.tensor(DiffForm.pole("x2_1", 1, 2) + DiffForm.monomial("x2_1", 3))
    P, H = projector_P(f, "x1_1", base), projector_H(f, "x1_1", base)
    assert P + H == f
    assert projector_P(P, "x1_1", base) == P
    assert projector_H(H, "x1_1", base) == H
    assert projector_P(H, "x1_1", base).is_zero()
    for p in (1, -1):
        assert H.min_val("x1_1", Chart("shift", p)) >= 0 or not H.expand({"x1_1": Chart("shift", p)}, -1).coeffs


def test_projector_keeps_polar_part_when_uncoupled(base0):
    polar = DiffForm.pole("x1_1", 1, 3) + DiffForm.pole("x1_1", -1, 2, Rational(5, 2))
    regular = DiffForm.monomial("x1_1", 2) + DiffForm.pole("x1_1", 4, 2)
    assert projector_P(polar + regular, "x1_1", base0) == polar
    assert projector_P(regular, "x1_1", base0).is_zero()


def test_projector_conventions(base13):
    f = DiffForm.pole("x1_1", 1, 3)
    lit = projector_P(f, "x1_1", base13, convention="literal")
    assert lit == -projector_P(f, "x1_1", base13)
    with pytest.raises(ValueError):
        projector_P(f, "x1_1", base13, convention="other")
    with pytest.raises(ValueError):
        projector_P(f, "x1_1", base13, color=2)


# -- blob data

def test_phi_provider_checks_and_round_trip(base13):
    with pytest.raises(ValueError):
        PhiProvider({(0, unit(D, 1, 1)): DiffForm.pole("x1_1", 1, 1)})
    with pytest.raises(ValueError):
        PhiProvider({(0, unit(D, 1, 1)): DiffForm.monomial("x2_1", 0)})
    phi = cubic_phi()
    again = PhiProvider.loads("# comment\n" + phi.dumps(), base13.ctx)
    assert again.get(0, unit(D, 1, 3)) == phi.get(0, unit(D, 1, 3))
    assert again.get(1, unit(D, 1, 1)).is_zero()
    with pytest.raises(ValueError):
        PhiProvider.loads("0 1,0 garbage(", base13.ctx)


# -- graphs

CASES = [(0, (3, 0, 0, 0, 0, 0)), (1, (1, 0, 0, 0, 0, 0)), (0, (2, 1, 0, 0, 0, 0)), (1, (1, 1, 0, 0, 0, 0)),
         (0, (2, 2, 0, 0, 0, 0)), (0, (1, 1, 1, 0, 0, 0))]


@pytest.mark.parametrize("g,k", CASES)
def test_graph_invariants(g, k):
    seen = set()
    for A, B in all_splits(k):
        graphs = enumerate_blob_graphs(g, k, A, B)
        for G in graphs:
            assert G.is_connected() and G.is_stable()
            assert G.b1 + G.genus_sum == g
            assert G.aut >= 1
            assert all(v.bleaves for v in G.omega)
            assert all(c == v.color for v in G.omega for c, _ in v.bleaves)
            assert all(c != v.color for v in G.omega for c, _ in v.aleaves)
            leaves = sorted([l for v in G.omega for l in v.bleaves + v.aleaves] + [l for f in G.phi for l in f.leaves])
            assert leaves == sorted((c, j) for c, kc in enumerate(k, 1) for j in range(1, kc + 1))
            text = "\n".join(G.to_lines())
            assert text not in seen
            seen.add(text)
        if not any(B):
            assert all(not G.omega for G in graphs)


def test_small_graph_counts():
    k = (2, 1, 0, 0, 0, 0)
    assert enumerate_blob_graphs(0, k, *split(k, {})) == []
    assert len(enumerate_blob_graphs(0, k, *split(k, {2: {1}}))) == 1
    k3 = (3, 0, 0, 0, 0, 0)
    assert len(enumerate_blob_graphs(0, k3, *split(k3, {}))) == 1
    assert enumerate_blob_graphs(0, (1, 1, 0, 0, 0, 0), *split((1, 1, 0, 0, 0, 0), {})) == []


def test_parallel_enumeration_matches():
    k = (1, 1, 1, 0, 0, 0)
    for A, B in list(all_splits(k))[:4]:
        assert enumerate_blob_graphs(0, k, A, B) == enumerate_blob_graphs(0, k, A, B, parallel=True)


def test_malformed_split():
    k = (2, 0, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        enumerate_blob_graphs(0, k, (frozenset({1}),) + (frozenset(),) * 5, (frozenset({1}),) + (frozenset(),) * 5)


# -- weights

def test_zero_blob_data_kills_phi_graphs(base13):
    k = (2, 1, 0, 0, 0, 0)
    for A, B in all_splits(k):
        for G in enumerate_blob_graphs(1, k, A, B):
            if G.phi:
                assert evaluate_graph_weight(G, PhiProvider.zero(), base13).is_zero()


def test_contraction_order_is_irrelevant(base13):
    phi = cubic_phi()
    k = (1, 1, 0, 0, 0, 0)
    checked = 0
    for A, B in all_splits(k):
        for G in enumerate_blob_graphs(1, k, A, B):
            ref = evaluate_graph_weight(G, phi, base13)
            n = len(G.mono_edges()) + len(G.bi_edges) + sum(len(v.aleaves) for v in G.omega)
            for perm in itertools.islice(itertools.permutations(range(n)), 1, 4):
                assert evaluate_graph_weight(G, phi, base13, order=list(perm)) == ref
                checked += 1
    assert checked > 0


def test_bicolored_pairings_are_linear_in_the_cross_term():
    T = (DiffForm.pole("u", 1, 3) + DiffForm.pole("u", -1, 2, 2)).tensor(DiffForm.pole("w", -1, 3) + DiffForm.pole("w", 1, 2))
    cross = DiffForm.monomial("a", -2).tensor(DiffForm.monomial("b", -2))
    e1 = bicolored_edge_pairing(T, "u", "w", cross)
    # the double primitive is (1/s - 1/u)(1/s' - 1/w); the u residues give -1 and 2, the w residues 1 and 1
    assert e1.scalar_value() == 2
    assert bicolored_edge_pairing(T, "u", "w", cross.scale(Rational(-7, 3))) == e1.scale(Rational(-7, 3))
    S = DiffForm.pole("u", 1, 3)
    l1 = bicolored_leaf_pairing(S, "u", "x2_1", cross)
    assert bicolored_leaf_pairing(S, "u", "x2_1", cross.scale(Rational(5))) == l1.scale(Rational(5))


def test_mono_pairing_of_holomorphic_side_is_zero():
    T = DiffForm.monomial("u", 2).tensor(DiffForm.monomial("y", 1))
    assert mono_pairing(T, "u", "y").is_zero()
    with pytest.raises(ValueError):
        mono_pairing(DiffForm.pole("u", 1, 3).tensor(DiffForm.pole("y", 1, 1)), "u", "y")


@pytest.mark.parametrize("g,k,A", [(0, (2, 1, 0, 0, 0, 0), {2: {1}}), (0, (2, 1, 0, 0, 0, 0), {1: {2}}),
                                   (1, (1, 1, 0, 0, 0, 0), {1: {1}})])
def test_split_pieces_are_in_the_right_image(base13, g, k, A):
    f = assemble_HP(g, k, *split(k, A), cubic_phi(), base13)
    for c, kc in enumerate(k, 1):
        for j in range(1, kc + 1):
            v = leaf_var(c, j)
            if j in A.get(c, ()):
                assert projector_P(f.reorder((v,) + tuple(x for x in f.vars if x != v)), v, base13).is_zero()
            else:
                g_ = f.reorder((v,) + tuple(x for x in f.vars if x != v))
                assert projector_P(g_, v, base13) == g_


def test_decoupled_tower_matches_one_matrix(base0):
    st_ = CorrelatorStore(gaussian_model())
    tower = ColoredTower(base0)
    ref = omega(st_, 0, 3).rename({"z1": "x2_1", "z2": "x2_2", "z3": "x2_3"})
    assert tower.get(0, unit(D, 2, 3)) == ref
    assert tower.get(0, (1, 1, 1, 0, 0, 0)).is_zero()


@pytest.mark.parametrize("alpha", ["0", "1/3"])
def test_polar_recursion_with_blob_data(alpha):
    base = colored_base(D, alpha)
    phi = cubic_phi()
    tower = ColoredTower(base, phi)
    # k is the index added to e_i
    for g, k, i in [(0, unit(D, 1, 2), 1), (0, (1, 1, 0, 0, 0, 0), 1), (1, unit(D, 1, 0), 1), (0, unit(D, 1, 2), 2)]:
        assert P_recursion_check(g, k, i, phi, base, tower=tower).is_zero()
    for k, i in [(unit(D, 2, 1), 1), (unit(D, 1, 0), 2)]:
        with pytest.raises(ValueError):
            P_recursion_check(0, k, i, phi, base, tower=tower)


def test_reconstruction_is_symmetric(base13):
    phi = cubic_phi()
    for g, k in [(0, unit(D, 1, 3)), (0, (2, 1, 0, 0, 0, 0)), (1, (1, 1, 0, 0, 0, 0))]:
        assert ColoredForm(g, k, reconstruct_omega(g, k, phi, base13)).is_group_symmetric()
    with pytest.raises(ValueError):
        ColoredTower(base13).get(0, (1, 0, 0, 0, 0))
