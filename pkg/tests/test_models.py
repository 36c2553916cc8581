from math import prod

import pytest
from hypothesis import given, settings, strategies as st

from toprec.algebra import Rational
from toprec.models import (BudgetExceeded, connected_from_full, gaussian_model, n_coefficients,
                           pairing_sum, quartic_connected, quartic_formal_model, set_partitions,
                           wick_trace_moments)


def dfact(n):
    return prod(range(n, 0, -2)) if n > 0 else 1


# Harer-Zagier numbers: <Tr M^2k> = sum_g eps_g(k) N^(1 - 2g)
HARER_ZAGIER = {1: [1], 2: [2, 1], 3: [5, 10], 4: [14, 70, 21], 5: [42, 420, 483]}


@pytest.mark.parametrize("k", sorted(HARER_ZAGIER))
def test_single_trace_genus_counts(k):
    coeffs = n_coefficients(wick_trace_moments([2 * k]).value)
    assert [coeffs.get(1 - 2 * g, 0) for g in range(len(HARER_ZAGIER[k]))] == HARER_ZAGIER[k]
    assert sum(coeffs.values()) == dfact(2 * k - 1)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=3))
def test_pairing_count(powers):
    poly, count = pairing_sum(powers)
    total = sum(powers)
    if total % 2:
        assert not poly
    else:
        assert count == dfact(total - 1)
        assert sum(poly.values()) == count


def test_odd_and_empty():
    assert wick_trace_moments([3]).value == 0
    assert wick_trace_moments([]).value == 1


def test_connected_two_point():
    full = lambda key: wick_trace_moments(list(key)).value
    # <Tr M Tr M> = 1 and <Tr M^2 Tr M^2>_c = 2 (both at N^0)
    assert n_coefficients(connected_from_full(full, [1, 1])) == {0: 1}
    assert n_coefficients(connected_from_full(full, [2, 2])) == {0: 2}


@pytest.mark.parametrize("n,bell", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15), (5, 52)])
def test_set_partition_counts(n, bell):
    assert sum(1 for _ in set_partitions(range(n))) == bell


def test_connected_requires_coarser_moments():
    with pytest.raises(KeyError):
        connected_from_full({(1, 1): 1}, [1, 1])


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        pairing_sum([10, 10], budget=1000)


def test_vertex_insertion_prefactor():
    # planar <Tr M^2 Tr M^4>_c counts 8 maps, entering with the vertex weight -N t
    conn = quartic_connected([2], 1)
    assert conn[0] == {1: 1}
    assert conn[1].get(1) == -8


def test_quartic_curve_context():
    cur = quartic_formal_model(2)
    assert cur.ctx.series_names == ("t",)
    cur.component(1).check()


def test_gaussian_model_cut():
    assert gaussian_model().params["cut"] == (Rational(-2), Rational(2))


@pytest.mark.parametrize("p", [2, 4, 6])
def test_gaussian_scaling_identity(p):
    # <Tr M^2 Tr M^p>_c = (p / N) <Tr M^p> for the Gaussian weight
    full = lambda key: wick_trace_moments(list(key)).value
    N = wick_trace_moments([2]).value
    assert connected_from_full(full, [2, p]) == wick_trace_moments([p]).value * p / N
