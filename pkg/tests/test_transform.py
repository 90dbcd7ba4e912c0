import logging
import math

import numpy as np
import pytest

from lagexp.catalog import parse_catalog
from lagexp.exceptions import DomainError, InvalidArgumentError, ParityError
from lagexp.expansion import CoefficientArray, hermite_coeffs, laguerre_coeffs
from lagexp.transform import (
    TransformOptions,
    compose_v,
    compose_w,
    even_part_check,
    hul,
    hul_report,
    luh,
    luh_report,
)

LAGUERRE = CoefficientArray.LAGUERRE
HERMITE = CoefficientArray.HERMITE
PI_QUARTER = math.pi ** 0.25


def test_luh_of_basis_functions():
    b = luh(CoefficientArray.delta(LAGUERRE, 4, 0))
    assert b.basis == HERMITE
    assert b.caps == (8,)
    assert b[0] == pytest.approx(PI_QUARTER, rel=1e-14)
    np.testing.assert_array_equal(b.values[1:], 0.0)

    b = luh(CoefficientArray.delta(LAGUERRE, 4, 1))
    expected = np.zeros(9)
    expected[0], expected[2] = PI_QUARTER / 2.0, -PI_QUARTER / math.sqrt(2.0)
    np.testing.assert_allclose(b.values, expected, atol=1e-14)


def test_luh_in_two_dimensions():
    b = luh(CoefficientArray.delta(LAGUERRE, (2, 2), (0, 0)))

    assert b.caps == (4, 4)
    assert b[(0, 0)] == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert b.max_odd_entry() == 0.0


def test_zero_maps_to_zero():
    assert not np.any(luh(CoefficientArray.zeros(LAGUERRE, 5)).values)
    assert not np.any(hul(CoefficientArray.zeros(HERMITE, 6)).values)


def test_hul_of_basis_function():
    a = hul(CoefficientArray.delta(HERMITE, 8, 0))

    assert a.basis == LAGUERRE
    assert a.caps == (4,)
    assert a[0] == pytest.approx(1.0 / PI_QUARTER, rel=1e-14)
    np.testing.assert_array_equal(a.values[1:], 0.0)


@pytest.mark.parametrize("n", range(6))
def test_round_trip_on_deltas(n):
    a = CoefficientArray.delta(LAGUERRE, 6, n)

    np.testing.assert_allclose(hul(luh(a)).values, a.values, atol=1e-10)


def test_round_trip_on_geometric_sequence():
    a = CoefficientArray.from_degrees(LAGUERRE, 24, lambda s: 2.0 ** -s)

    np.testing.assert_allclose(hul(luh(a)).values, a.values, atol=1e-8)


def test_hul_requires_even_input():
    b = CoefficientArray(HERMITE, np.array([1.0, 0.1, 0.0, 0.0, 0.0]))

    assert even_part_check(b) == (False, 0.1)
    with pytest.raises(ParityError):
        hul(b)


def test_transforms_check_the_basis():
    with pytest.raises(InvalidArgumentError):
        luh(CoefficientArray.delta(HERMITE, 4, 0))
    with pytest.raises(InvalidArgumentError):
        hul(CoefficientArray.delta(LAGUERRE, 4, 0))
    with pytest.raises(InvalidArgumentError):
        luh(CoefficientArray(LAGUERRE, np.array([1.0 + 1.0j, 0.0])))


@pytest.mark.parametrize(
    "kwargs", [{"K_tail": 4}, {"eps_tail": 1e-3}, {"eps_tail": 0.0}]
)
def test_transform_options_validation(kwargs):
    with pytest.raises(InvalidArgumentError):
        TransformOptions(**kwargs)


def test_out_caps():
    a = CoefficientArray.delta(LAGUERRE, 4, 0)

    assert luh(a, TransformOptions(out_caps=3)).caps == (3,)
    assert hul(luh(a), TransformOptions(out_caps=[2])).caps == (2,)
    with pytest.raises(InvalidArgumentError):
        luh(a, TransformOptions(out_caps=[2, 2]))


def test_luh_matches_hermite_expansion_of_composition():
    f = parse_catalog("x*exp(-x/2)")
    b = luh(laguerre_coeffs(f, 6))
    oracle = hermite_coeffs(compose_v(f), b.caps)

    np.testing.assert_allclose(b.values, oracle.values, atol=1e-8)


def test_hul_matches_laguerre_expansion_of_composition():
    g = parse_catalog("exp(-x^2/2)")
    a = hul(hermite_coeffs(g, 8))
    oracle = laguerre_coeffs(compose_w(g), a.caps)

    np.testing.assert_allclose(a.values, oracle.values, atol=1e-8)
    assert a[0] == pytest.approx(1.0, abs=1e-8)


def test_compositions():
    f = parse_catalog("x*exp(-x/2)")
    assert compose_v(f)(np.array([-2.0]))[0] == pytest.approx(4.0 * math.exp(-2.0))

    g = parse_catalog("exp(-x^2/2)")
    assert compose_w(g)(np.array([4.0]))[0] == pytest.approx(math.exp(-2.0))
    with pytest.raises(DomainError):
        compose_w(g)(np.array([-1.0]))


def test_reports_count_entries():
    a = CoefficientArray.delta(LAGUERRE, 4, 2)
    b, report = luh_report(a)
    assert report.entries == 5
    assert report.truncated == 0

    _, report = hul_report(b)
    assert report.entries == 5
    assert report.to_dict()["truncated"] == 0


def test_short_cutoff_is_reported(caplog):
    a = CoefficientArray.from_degrees(LAGUERRE, 40, lambda s: 2.0 ** -s)

    with caplog.at_level(logging.WARNING, logger="lagexp.transform"):
        _, report = luh_report(a, TransformOptions(K_tail=8))

    assert report.truncated > 0
    assert report.max_shells == 9
    assert "did not reach the tail tolerance" in caplog.text
