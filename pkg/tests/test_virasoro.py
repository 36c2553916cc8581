import pytest

from toprec.algebra import Rational
from toprec.virasoro import (N_CONTEXT, VirasoroOp, apply_poly, basis_polynomials, build_partition,
                             check_annihilation, check_commutators, max_safe_residual, monomial)

N = N_CONTEXT.symbol("N")


@pytest.fixture(scope="module")
def Z():
    return build_partition(4, 3)


def test_partition_coefficients(Z):
    # Z = <exp(-N sum s_k Tr M^k)>: s1^2 gives N^2 <(Tr M)^2> / 2 = N^2/2, s2 gives -N <Tr M^2> = -N^2
    assert Z.coefficient({}) == 1
    assert Z.coefficient({1: 2}) == N ** 2 / 2
    assert Z.coefficient({2: 1}) == -(N ** 2)
    assert Z.coefficient({1: 1}) == 0


def test_annihilation_corrected_sign(Z):
    recs = check_annihilation(Z, range(4))
    n, bad = max_safe_residual(recs)
    assert n > 0 and not bad


def test_literal_sign_does_not_annihilate(Z):
    _, bad = max_safe_residual(check_annihilation(Z, range(4), sign="literal"))
    assert bad


def test_perturbation_is_detected(Z):
    pert = Z.perturbed({0: 1, 1: 1}, Rational(1, 5))
    _, bad = max_safe_residual(check_annihilation(pert, range(4)))
    assert bad


def test_parallel_matches_serial(Z):
    a = check_annihilation(Z, range(4))
    b = check_annihilation(Z, range(4), parallel=True)
    assert [(r.p, r.monomial, r.residual) for r in a] == [(r.p, r.monomial, r.residual) for r in b]


@pytest.mark.parametrize("p,q", [(0, 1), (1, 2), (0, 3), (2, 3), (3, 1)])
def test_commutator_closes_with_index_shift(p, q):
    polys = list(basis_polynomials(3, 5))
    assert not check_commutators(p, q, polys, shift=1, factor=p - q)


def test_operator_action_on_monomials():
    # L_0 = sum_{k>=1} k t_k d_{k-1}: t_1 d_0 + 2 t_2 d_1 on t_0 t_1 gives t_1^2 + 2 t_0 t_2
    out = apply_poly(0, {monomial({0: 1, 1: 1}): N_CONTEXT.one()})
    assert out == {monomial({1: 2}): N_CONTEXT.one(), monomial({0: 1, 2: 1}): 2 * N_CONTEXT.one()}
    # L_2 on t_0 t_1: (2/N^2) d_0 d_1
    out = apply_poly(2, {monomial({0: 1, 1: 1}): N_CONTEXT.one()})
    assert out == {(): 2 * N ** -2}


def test_invalid_operator():
    with pytest.raises(ValueError):
        VirasoroOp(-1)
    with pytest.raises(ValueError):
        VirasoroOp(1, sign="other")
    with pytest.raises(ValueError):
        build_partition(-1, 2)
