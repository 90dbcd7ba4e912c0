import json
import math

import numpy as np
import pytest

from lagexp.catalog import (
    FunctionHandle,
    damped_polynomial,
    hermite_handle,
    laguerre_combination,
    laguerre_handle,
    load_samples,
    parse_catalog,
    power_exponential,
    sampled,
)
from lagexp.exceptions import DomainError, InvalidArgumentError


@pytest.mark.parametrize(
    "spec, x, expected",
    [
        ("l:1", 2.0, -math.exp(-1.0)),
        ("x*exp(-x/2)", 2.0, 2.0 * math.exp(-1.0)),
        ("3*x^2*exp(-0.5*x)", 1.0, 3.0 * math.exp(-0.5)),
        ("exp(-x)", 1.0, math.exp(-1.0)),
        ("x**3*exp(-2*x)", 1.0, math.exp(-2.0)),
        ("poly:1,-1", 2.0, -math.exp(-1.0)),
        ("lin:1,0,0.5", 0.0, 1.5),
    ],
)
def test_parse_catalog_orthant(spec, x, expected):
    f = parse_catalog(spec)

    assert f.domain == FunctionHandle.ORTHANT
    assert f.evaluate(np.array([x]))[0] == pytest.approx(expected, rel=1e-12)


def test_parse_catalog_real_line():
    gaussian = parse_catalog("exp(-x^2/2)")
    assert gaussian.domain == FunctionHandle.REAL
    assert gaussian.evaluate(np.array([-1.0]))[0] == pytest.approx(math.exp(-0.5))

    combination = parse_catalog("hlin:0,1")
    assert combination.evaluate(np.array([0.0]))[0] == pytest.approx(0.0, abs=1e-15)


def test_parse_catalog_multi_index():
    f = parse_catalog("l:1,1")

    assert f.dimension == 2
    assert f.evaluate(np.array([[2.0, 2.0]]))[0] == pytest.approx(math.exp(-2.0))


@pytest.mark.parametrize("spec", ["sin(x)", "l:a", "lin:", "exp(+x)", "missing.json"])
def test_parse_catalog_rejects(spec):
    with pytest.raises(InvalidArgumentError):
        parse_catalog(spec)


def test_orthant_domain_is_enforced():
    with pytest.raises(DomainError):
        laguerre_handle([0]).evaluate(np.array([-1.0]))

    # Hermite functions accept the whole line
    assert hermite_handle([0]).evaluate(np.array([-1.0]))[0] > 0


def test_evaluate_checks_shape():
    with pytest.raises(InvalidArgumentError):
        laguerre_handle([0, 0]).evaluate(np.array([[1.0, 2.0, 3.0]]))


def test_combinations():
    x = np.array([0.5, 3.0])
    expected = laguerre_handle([0])(x) + 0.5 * laguerre_handle([2])(x)
    np.testing.assert_allclose(laguerre_combination([1.0, 0.0, 0.5])(x), expected)

    np.testing.assert_allclose(
        damped_polynomial([0.0, 1.0])(x), x * np.exp(-x / 2.0)
    )


def test_power_exponential_validation():
    with pytest.raises(InvalidArgumentError):
        power_exponential(power=-1)
    with pytest.raises(InvalidArgumentError):
        power_exponential(rate=0.0)


def test_sampled_interpolates_inside_hull():
    grid = np.linspace(0.0, 10.0, 101)
    f = sampled([grid], np.exp(-grid / 2.0))

    value = f.evaluate(np.array([2.55]))[0]
    assert value == pytest.approx(math.exp(-1.275), rel=1e-3)
    with pytest.raises(DomainError):
        f.evaluate(np.array([10.5]))


def test_sampled_two_dimensional():
    axis = np.linspace(0.0, 4.0, 41)
    values = np.exp(-np.add.outer(axis, axis) / 2.0)
    f = sampled([axis, axis], values)

    assert f.dimension == 2
    assert f.evaluate(np.array([[1.0, 2.0]]))[0] == pytest.approx(
        math.exp(-1.5), rel=1e-6
    )


def test_sampled_validation():
    with pytest.raises(InvalidArgumentError):
        sampled([[0.0, 1.0]], np.zeros(3))
    with pytest.raises(InvalidArgumentError):
        sampled([[0.0, 2.0, 1.0]], np.zeros(3))
    with pytest.raises(InvalidArgumentError):
        sampled([[-1.0, 0.0, 1.0]], np.zeros(3))


def test_load_samples(tmp_path):
    grid = np.linspace(0.0, 5.0, 51)
    path = tmp_path / "samples.json"
    path.write_text(
        json.dumps({"grid": grid.tolist(), "values": np.exp(-grid).tolist()})
    )

    f = parse_catalog(str(path))
    assert f.name == "samples"
    assert f.evaluate(np.array([1.0]))[0] == pytest.approx(math.exp(-1.0))

    path.write_text(json.dumps({"grid": grid.tolist()}))
    with pytest.raises(InvalidArgumentError):
        load_samples(path)
