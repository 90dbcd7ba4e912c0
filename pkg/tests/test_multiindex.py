import math
from fractions import Fraction

import numpy as np
import pytest

from lagexp.exceptions import InvalidArgumentError
from lagexp.multiindex import (
    as_multiindex,
    degree,
    enumerate_box,
    enumerate_upto,
    factorial,
    graded_key,
    half_binom,
    log_factorial,
    log_half_binom,
    log_multi_factorial,
    log_shifted_binom_table,
    shell_size,
)


def test_as_multiindex():
    assert as_multiindex(3) == (3,)
    assert as_multiindex([1, 2]) == (1, 2)
    assert as_multiindex(np.int64(4)) == (4,)

    with pytest.raises(InvalidArgumentError):
        as_multiindex([1, -1])
    with pytest.raises(InvalidArgumentError):
        as_multiindex([])


def test_enumerate_upto_examples():
    assert enumerate_upto(1, 2) == [(0,), (1,), (2,)]
    assert enumerate_upto(2, 1) == [(0, 0), (0, 1), (1, 0)]
    assert len(enumerate_upto(2, 2)) == 6


@pytest.mark.parametrize("d, max_degree", [(1, 7), (2, 5), (3, 4), (4, 3)])
def test_enumerate_upto_count_and_order(d, max_degree):
    indices = enumerate_upto(d, max_degree)

    assert len(indices) == math.comb(max_degree + d, d)
    keys = [graded_key(n) for n in indices]
    assert all(a < b for a, b in zip(keys, keys[1:]))
    assert all(degree(n) <= max_degree for n in indices)


def test_enumerate_upto_rejects_bad_arguments():
    with pytest.raises(InvalidArgumentError):
        enumerate_upto(0, 3)
    with pytest.raises(InvalidArgumentError):
        enumerate_upto(2, -1)


def test_enumerate_box_is_row_major():
    assert enumerate_box([1, 2]) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]


def test_shell_size():
    assert shell_size(1, 5) == 1
    assert shell_size(2, 3) == 4
    assert shell_size(3, 2) == 6
    assert shell_size(2, -1) == 0
    assert sum(shell_size(3, s) for s in range(5)) == len(enumerate_upto(3, 4))


def test_half_binom_examples():
    assert half_binom(-0.5, 0) == 1.0
    assert half_binom(-0.5, 1) == -0.5
    assert half_binom(-1.5, 2) == pytest.approx(15.0 / 8.0, rel=1e-15)
    assert half_binom(0.5, 3) == pytest.approx(1.0 / 16.0, rel=1e-15)


@pytest.mark.parametrize("gamma", [Fraction(1, 2), Fraction(-1, 2), Fraction(3, 2)])
def test_half_binom_matches_rationals(gamma):
    exact = Fraction(1)
    for m in range(21):
        if m > 0:
            exact *= (gamma - m + 1) / m
        assert half_binom(float(gamma), m) == pytest.approx(float(exact), rel=1e-12)


def test_half_binom_vanishes_and_rejects_negative_integers():
    assert half_binom(2.0, 3) == 0.0
    assert log_half_binom(2.0, 3) == (0.0, float("-inf"))

    with pytest.raises(InvalidArgumentError):
        half_binom(-1.0, 2)


def test_half_binom_multi_index():
    assert half_binom([0.5, -0.5], (1, 1)) == pytest.approx(-0.25)
    # A scalar gamma applies to every coordinate
    assert half_binom(-0.5, (1, 1)) == pytest.approx(0.25)

    with pytest.raises(InvalidArgumentError):
        half_binom([0.5, 0.5, 0.5], (1, 1))


def test_log_factorial():
    assert log_factorial(0) == 0.0
    assert log_factorial(1) == 0.0
    assert log_factorial(10) == pytest.approx(15.104412573, abs=1e-9)
    np.testing.assert_allclose(
        log_factorial(np.array([2, 3])), [math.log(2), math.log(6)]
    )

    for n in range(21):
        assert math.exp(log_factorial(n)) == pytest.approx(math.factorial(n), rel=1e-13)

    with pytest.raises(InvalidArgumentError):
        log_factorial(-1)


def test_multi_factorials():
    assert factorial((2, 3)) == 12
    assert log_multi_factorial((2, 3)) == pytest.approx(math.log(12))


def test_log_shifted_binom_table():
    signs, logs = log_shifted_binom_table(0.5, 4)
    np.testing.assert_allclose(signs * np.exp(logs), [1.0, 0.5, 0.375, 0.3125])

    signs, logs = log_shifted_binom_table(1.5, 3)
    np.testing.assert_allclose(signs * np.exp(logs), [1.0, -0.5, -0.125])

    with pytest.raises(InvalidArgumentError):
        log_shifted_binom_table(1.0, 3)
