import itertools

import pytest

from toprec.algebra import Rational
from toprec.curve import BRANCH_POINTS
from toprec.forms import Chart, is_symmetric
from toprec.models import (connected_from_full, gaussian_model, n_coefficients, quartic_connected,
                           quartic_formal_model, wick_trace_moments)
from toprec.recursion import (CorrelatorStore, MomentRecursion, check_linear, check_quadratic, moments,
                              omega, stable)


def wick_conn(powers, g):
    full = lambda key: wick_trace_moments(list(key)).value
    return n_coefficients(connected_from_full(full, list(powers))).get(2 - 2 * g - len(powers), Rational(0))


def test_stability():
    assert not stable(0, 2) and not stable(0, 1)
    assert stable(0, 3) and stable(1, 1)


@pytest.mark.parametrize("g,powers", [(0, (1, 1, 2)), (0, (2, 2, 2)), (1, (2,)), (1, (4,)), (0, (3, 3, 2)),
                                      (1, (1, 1)), (1, (3, 1)), (2, (6,)), (0, (1, 1, 1, 1))])
def test_gaussian_moments_match_wick(gaussian_store, g, powers):
    assert moments(gaussian_store, g, powers) == wick_conn(powers, g)


def test_omega_is_symmetric_and_residueless(gaussian_store):
    w = omega(gaussian_store, 0, 4)
    for perm in itertools.permutations(range(4)):
        assert is_symmetric(w, perm)
    w11 = omega(gaussian_store, 1, 1)
    for p in BRANCH_POINTS:
        assert w11.residue("z1", p).is_zero()
        assert w.residue("z2", p).is_zero()
    assert set(w11.poles("z1")) <= set(BRANCH_POINTS)


def test_linear_and_quadratic_loop_equations(gaussian_store):
    for g, n in [(0, 3), (1, 1), (1, 2)]:
        w = omega(gaussian_store, g, n)
        assert all(check_linear(w, v).is_zero() for v in w.vars)
        assert min(check_quadratic(gaussian_store, g, n, 2).values()) >= 2
    with pytest.raises(ValueError):
        check_linear(omega(gaussian_store, 0, 3), "z1", stable_input=False)


def test_moment_recursion_agrees_with_full_forms(gaussian_store):
    mr = MomentRecursion(gaussian_store)
    for g, powers in [(0, (2, 2, 2)), (1, (2, 2)), (0, (1, 1, 3, 1)), (2, (4,)), (1, (3, 1, 2))]:
        assert mr.moment(g, powers) == moments(gaussian_store, g, powers)
    with pytest.raises(ValueError):
        mr.moment(0, (0, 2))


def test_quartic_planar_and_genus_one(quartic2_store):
    for g, powers in [(0, (2,)), (0, (4,)), (1, (2,)), (0, (1, 1, 2))]:
        got = moments(quartic2_store, g, powers)
        oracle = quartic_connected(list(powers), 2)
        for j in range(3):
            assert got.coefficient({"t": j}) == oracle[j].get(2 - 2 * g - len(powers), Rational(0))


def test_store_first_writer_wins():
    st = CorrelatorStore(gaussian_model())
    w = omega(st, 0, 3)
    assert st.put(0, 3, w) is w
    with pytest.raises(RuntimeError):
        st.put(0, 3, w.scale(Rational(2)))


def test_store_dump_load_round_trip(gaussian_store):
    omega(gaussian_store, 1, 1)
    fresh = CorrelatorStore(gaussian_model())
    fresh.load(gaussian_store.dump())
    assert fresh.get(1, 1) == gaussian_store.get(1, 1)
    assert fresh.get(0, 3) == gaussian_store.get(0, 3)


def test_wrong_kernel_factor_breaks_moments():
    st = CorrelatorStore(gaussian_model(), kernel_factor=Rational(1))
    assert moments(st, 0, (2, 2, 2)) != wick_conn((2, 2, 2), 0)


def test_missing_base_data():
    cur = gaussian_model()
    cur.components[0].omega10 = None
    with pytest.raises(ValueError):
        CorrelatorStore(cur)


def test_branch_order_does_not_matter():
    a = omega(CorrelatorStore(gaussian_model()), 1, 2)
    b = omega(CorrelatorStore(gaussian_model(), reverse_branch_order=True), 1, 2)
    assert a == b
