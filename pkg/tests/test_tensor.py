import pytest

from toprec.algebra import Rational
from toprec.models import BudgetExceeded, n_coefficients
from toprec.qmtm import alpha_squared_series, second_moment_alpha_coefficients, tensor_wick_oracle
from toprec.qmtm.tensor import charge_imbalanced, first_moment_from_tensor


def coeffs(e):
    return n_coefficients(e)


@pytest.mark.parametrize("d", [3, 4, 6])
def test_free_expectations(d):
    # <Tbar.T> = N^d N^-(d-1); <Tr A^2>: identity pairing N^(1+2(d-1)), swap N^(2+(d-1)), over N^(2(d-1))
    assert coeffs(tensor_wick_oracle(d, [(1, 1)], 0)[0]) == {1: 1}
    assert coeffs(tensor_wick_oracle(d, [(2, 2)], 0)[0]) == {1: 1, 3 - d: 1}


def test_colors_are_interchangeable():
    a = tensor_wick_oracle(4, [(1, 2), (2, 1)], 1)
    b = tensor_wick_oracle(4, [(3, 2), (4, 1)], 1)
    assert a == b


def test_charge_imbalance():
    assert charge_imbalanced(3, 1) == 0
    with pytest.raises(ValueError):
        charge_imbalanced(2, 2)


def test_alpha_squared_map():
    # d w^2 - w + r = 0, r = -lambda/2: alpha^2 = r + 2 d r^2 + ... = -lambda/2 + d lambda^2 / 2 + ...
    d = 6
    _, _, a2 = alpha_squared_series(d, 2)
    assert [c.constant_value() for c in a2.coeffs] == [0, Rational(-1, 2), Rational(d, 2)]


def test_leading_order_matches_geometric_series():
    # leading N coefficient of <Tr M'^2> is 1/(1 - alpha^2)
    assert second_moment_alpha_coefficients(6, 1) == [1, 1, 1]


def test_first_moment_needs_even_dimension():
    with pytest.raises(ValueError):
        first_moment_from_tensor(5, 0)


def test_bad_requests():
    with pytest.raises(ValueError):
        tensor_wick_oracle(6, [(7, 1)], 0)
    with pytest.raises(ValueError):
        tensor_wick_oracle(6, [(1, 0)], 0)
    with pytest.raises(BudgetExceeded):
        tensor_wick_oracle(6, [(1, 4)], 3, budget=100)
