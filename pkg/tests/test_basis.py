import math

import numpy as np
import pytest

from lagexp.basis import (
    BasisKind,
    calibrate_odd_relation,
    hermite_fn,
    hermite_fn_table,
    hermite_laguerre_relation,
    hermite_poly,
    laguerre_fn,
    laguerre_fn_derivative,
    laguerre_fn_table,
    laguerre_poly,
)
from lagexp.exceptions import DomainError, InvalidArgumentError
from lagexp.quadrature import gauss_hermite_rule, gauss_laguerre_rule


@pytest.mark.parametrize(
    "n, gamma, x, expected",
    [
        (0, 0.0, 5.0, 1.0),
        (1, 0.0, 2.0, -1.0),
        (2, 0.0, 2.0, -1.0),
        (1, -0.5, 1.0, -0.5),
    ],
)
def test_laguerre_poly(n, gamma, x, expected):
    assert float(laguerre_poly(n, gamma, x)) == pytest.approx(expected, abs=1e-14)


def test_laguerre_poly_rejects_bad_order():
    with pytest.raises(InvalidArgumentError):
        laguerre_poly(2, -1.0, 1.0)
    with pytest.raises(InvalidArgumentError):
        laguerre_poly(-1, 0.0, 1.0)


def test_laguerre_fn_examples():
    assert laguerre_fn(0, 0.0) == pytest.approx(1.0)
    assert laguerre_fn(1, 2.0) == pytest.approx(-math.exp(-1.0), rel=1e-14)
    assert laguerre_fn((1, 1), (2.0, 2.0)) == pytest.approx(math.exp(-2.0), rel=1e-14)

    with pytest.raises(DomainError):
        laguerre_fn(1, -0.5)


def test_laguerre_fn_on_several_points():
    values = laguerre_fn(2, np.array([0.0, 2.0, 4.0]))
    x = np.array([0.0, 2.0, 4.0])
    np.testing.assert_allclose(values, (x ** 2 - 4 * x + 2) / 2 * np.exp(-x / 2))


def test_hermite_fn_examples():
    assert hermite_fn(0, 0.0) == pytest.approx(math.pi ** -0.25)
    assert hermite_fn(1, 0.0) == 0.0
    assert hermite_fn(2, 1.0) == pytest.approx(0.3221473, abs=1e-7)


def test_laguerre_table_stays_finite_far_out():
    table = laguerre_fn_table(200, np.array([1000.0, 3000.0]))

    assert np.all(np.isfinite(table))
    assert np.max(np.abs(table)) <= 1.0


@pytest.mark.parametrize("family", ["laguerre", "hermite"])
def test_gram_matrix_is_identity(family):
    if family == "laguerre":
        rule = gauss_laguerre_rule(120)
        table = laguerre_fn_table(40, rule.nodes)
    else:
        rule = gauss_hermite_rule(120)
        table = hermite_fn_table(40, rule.nodes)

    gram = (table * rule.lifted_weights) @ table.T
    np.testing.assert_allclose(gram, np.eye(41), atol=1e-10)


def test_pointwise_bound():
    x = np.logspace(-3, np.log10(200.0), 300)
    table = np.abs(laguerre_fn_table(30, x))
    for k in range(4):
        for n in range(31):
            bound = 4.0 ** k * math.prod(range(n + 1, n + k + 1))
            assert np.all(x ** k * table[n] <= bound)


@pytest.mark.parametrize("n", [0, 1, 3, 7])
def test_laguerre_derivative_matches_differences(n):
    x = np.linspace(0.5, 10.0, 20)
    step = 1e-5
    differences = (laguerre_fn(n, x + step) - laguerre_fn(n, x - step)) / (2 * step)

    np.testing.assert_allclose(laguerre_fn_derivative(n, x), differences, atol=1e-8)


def test_hermite_poly():
    assert float(hermite_poly(2, 1.0)) == 2.0
    assert float(hermite_poly(2, 2.0)) == 14.0
    assert float(hermite_poly(3, 1.0)) == -4.0


@pytest.mark.parametrize(
    "n, x, expected", [(0, 3.0, 1.0), (1, 1.0, 2.0), (1, 2.0, 14.0)]
)
def test_even_relation_examples(n, x, expected):
    lhs, rhs = hermite_laguerre_relation(n, x, "even")

    assert lhs == pytest.approx(expected)
    assert rhs == pytest.approx(expected)


def test_odd_relation_is_calibrated():
    assert calibrate_odd_relation() == pytest.approx(2.0)
    for n in range(6):
        for x in (-1.5, 0.3, 2.0):
            lhs, rhs = hermite_laguerre_relation(n, x, "odd")
            assert rhs == pytest.approx(lhs, rel=1e-10, abs=1e-10)


def test_relation_rejects_bad_arguments():
    with pytest.raises(InvalidArgumentError):
        hermite_laguerre_relation(1, 1.0, "neither")
    with pytest.raises(InvalidArgumentError):
        hermite_laguerre_relation(-1, 1.0, "even")


def test_basis_kind():
    assert BasisKind("laguerre-poly").evaluate(2, [2.0]) == pytest.approx(-1.0)
    assert BasisKind("laguerre").evaluate(1, [2.0]) == pytest.approx(-math.exp(-1.0))
    assert BasisKind("hermite").evaluate((0, 0), [0.0, 0.0]) == pytest.approx(
        math.pi ** -0.5
    )

    with pytest.raises(InvalidArgumentError):
        BasisKind("chebyshev")
    with pytest.raises(InvalidArgumentError):
        BasisKind("laguerre-poly", gamma=-1.0)
    with pytest.raises(InvalidArgumentError):
        BasisKind("laguerre-poly").evaluate((1, 1), [1.0, 1.0])
