"""
Function handles and the catalog grammar of the command line.

A :class:`FunctionHandle` evaluates a function on an (M, d) array of points. Handles
come from the built-in catalog (basis functions, finite combinations of them,
damped polynomials and the ``x^k exp(-c x)`` / ``exp(-c x^2)`` families) or from
samples on a grid, interpolated with monotone cubic (PCHIP) splines.

Grammar accepted by :func:`parse_catalog`::

    l:<n>[,<m>...]          Laguerre function l_n (tensor product for d > 1)
    h:<n>[,<m>...]          Hermite function h_n
    lin:<c0>,<c1>,...       sum_k c_k l_k (1d)
    hlin:<c0>,<c1>,...      sum_k c_k h_k (1d)
    poly:<p0>,<p1>,...      exp(-x/2) sum_k p_k x^k (1d)
    [a*][x[^k]*]exp(-[c*]x[^2][/b])
"""
from __future__ import annotations

import json
import logging
import re
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator, RegularGridInterpolator

from lagexp.basis import hermite_fn, hermite_fn_table, laguerre_fn, laguerre_fn_table
from lagexp.exceptions import DomainError, InvalidArgumentError
from lagexp.multiindex import as_multiindex


logger = logging.getLogger(__name__)
"""lagexp.catalog log object"""

_NUMBER = r"\d+(?:\.\d*)?(?:[eE][-+]?\d+)?"
_POWER = r"\s*(?:\^|\*\*)\s*"
_EXPRESSION = re.compile(
    rf"""^\s*
    (?:(?P<scale>{_NUMBER})\s*\*\s*)?
    (?:x(?:{_POWER}(?P<power>\d+))?\s*\*\s*)?
    exp\(\s*-\s*(?:(?P<rate>{_NUMBER})\s*\*\s*)?x(?:{_POWER}(?P<square>2))?
    (?:\s*/\s*(?P<denominator>{_NUMBER}))?\s*\)
    \s*$""",
    re.VERBOSE,
)


class FunctionHandle(object):
    """
    A function on the orthant ``[0, inf)^d`` or on ``R^d``

    Args:
        name (str): Human readable name, the catalog expression when parsed from one
        dimension (int): d
        domain (str): :attr:`ORTHANT` or :attr:`REAL`
        evaluator (Callable[[np.ndarray], np.ndarray]): Maps (M, d) points to M
            values
        parameters (Optional[Dict[str, Any]]) = None: Catalog parameters
    """

    ORTHANT = "orthant"
    REAL = "real"

    def __init__(
        self,
        name: str,
        dimension: int,
        domain: str,
        evaluator: Callable[[np.ndarray], np.ndarray],
        parameters: Optional[Dict[str, Any]] = None,
    ) -> None:
        if domain not in (self.ORTHANT, self.REAL):
            raise InvalidArgumentError(f"unknown domain: {domain}")
        self.name = name
        self.dimension = int(dimension)
        self.domain = domain
        self.parameters = parameters or {}
        self._evaluator = evaluator

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """
        Evaluate at every point

        Args:
            points (np.ndarray): (M, d) array, or a 1d array of M points when d = 1

        Returns:
            np.ndarray: M values

        Raises:
            DomainError: If a point lies outside the domain of the handle
        """
        arr = np.asarray(points, dtype=float)
        if arr.ndim == 1 and self.dimension == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[1] != self.dimension:
            raise InvalidArgumentError(
                f"{self.name} takes points of dimension {self.dimension}, "
                f"got shape {arr.shape}"
            )
        if self.domain == self.ORTHANT and np.any(arr < 0):
            raise DomainError(f"{self.name} is only defined on the closed orthant")
        return np.asarray(self._evaluator(arr))

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.evaluate(points)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "domain": self.domain,
            "parameters": self.parameters,
        }

    def __repr__(self) -> str:
        return (
            f'FunctionHandle<name: "{self.name}", dimension: {self.dimension}, '
            f"domain: {self.domain}>"
        )


def laguerre_handle(n: Sequence[int]) -> FunctionHandle:
    """The Laguerre function l_n"""
    index = as_multiindex(n)
    return FunctionHandle(
        f"l:{','.join(map(str, index))}",
        len(index),
        FunctionHandle.ORTHANT,
        lambda points: np.atleast_1d(laguerre_fn(index, points)),
        {"n": list(index)},
    )


def hermite_handle(n: Sequence[int]) -> FunctionHandle:
    """The Hermite function h_n"""
    index = as_multiindex(n)
    return FunctionHandle(
        f"h:{','.join(map(str, index))}",
        len(index),
        FunctionHandle.REAL,
        lambda points: np.atleast_1d(hermite_fn(index, points)),
        {"n": list(index)},
    )


def laguerre_combination(coefficients: Sequence[float]) -> FunctionHandle:
    """``sum_k c_k l_k`` in one dimension"""
    values = np.asarray(coefficients, dtype=float)
    return FunctionHandle(
        "lin:" + ",".join(repr(float(v)) for v in values),
        1,
        FunctionHandle.ORTHANT,
        lambda points: values @ laguerre_fn_table(values.size - 1, points[:, 0]),
        {"coefficients": values.tolist()},
    )


def hermite_combination(coefficients: Sequence[float]) -> FunctionHandle:
    """``sum_k c_k h_k`` in one dimension"""
    values = np.asarray(coefficients, dtype=float)
    return FunctionHandle(
        "hlin:" + ",".join(repr(float(v)) for v in values),
        1,
        FunctionHandle.REAL,
        lambda points: values @ hermite_fn_table(values.size - 1, points[:, 0]),
        {"coefficients": values.tolist()},
    )


def damped_polynomial(coefficients: Sequence[float]) -> FunctionHandle:
    """``exp(-x/2) sum_k p_k x^k`` in one dimension"""
    values = np.asarray(coefficients, dtype=float)

    def evaluator(points: np.ndarray) -> np.ndarray:
        x = points[:, 0]
        # Polynomial.polyval wants increasing order, same as the coefficient list
        return np.polynomial.polynomial.polyval(x, values) * np.exp(-x / 2.0)

    return FunctionHandle(
        "poly:" + ",".join(repr(float(v)) for v in values),
        1,
        FunctionHandle.ORTHANT,
        evaluator,
        {"coefficients": values.tolist()},
    )


def power_exponential(
    power: int = 0, rate: float = 1.0, quadratic: bool = False, scale: float = 1.0
) -> FunctionHandle:
    """
    ``scale x^power exp(-rate x)`` on the half line, or
    ``scale x^power exp(-rate x^2)`` on the real line when ``quadratic``

    Args:
        power (int) = 0: Non-negative exponent k
        rate (float) = 1.0: Decay rate c, > 0
        quadratic (bool) = False: Gaussian instead of exponential decay
        scale (float) = 1.0: Constant factor
    """
    if power < 0:
        raise InvalidArgumentError(f"power must be >= 0, got {power}")
    if not rate > 0:
        raise InvalidArgumentError(f"rate must be > 0, got {rate}")

    def evaluator(points: np.ndarray) -> np.ndarray:
        x = points[:, 0]
        exponent = x * x if quadratic else x
        with np.errstate(under="ignore"):
            return scale * x ** power * np.exp(-rate * exponent)

    variable = "x^2" if quadratic else "x"
    return FunctionHandle(
        f"{scale!r}*x^{power}*exp(-{rate!r}*{variable})",
        1,
        FunctionHandle.REAL if quadratic else FunctionHandle.ORTHANT,
        evaluator,
        {"power": power, "rate": rate, "quadratic": quadratic, "scale": scale},
    )


def sampled(
    grid: Sequence[Sequence[float]],
    values: np.ndarray,
    domain: str = FunctionHandle.ORTHANT,
) -> FunctionHandle:
    """
    Handle interpolating samples on a rectilinear grid with PCHIP splines

    Evaluation outside the hull of the grid raises instead of extrapolating.

    Args:
        grid (Sequence[Sequence[float]]): One increasing coordinate list per axis
        values (np.ndarray): Samples, shape ``(len(grid[0]), ..., len(grid[-1]))``
        domain (str) = "orthant": Domain the samples come from
    """
    axes = [np.asarray(axis, dtype=float) for axis in grid]
    samples = np.asarray(values, dtype=float)
    if samples.shape != tuple(axis.size for axis in axes):
        raise InvalidArgumentError(
            f"samples have shape {samples.shape}, the grid needs "
            f"{tuple(axis.size for axis in axes)}"
        )
    if any(np.any(np.diff(axis) <= 0) for axis in axes):
        raise InvalidArgumentError("grid coordinates must be strictly increasing")
    if domain == FunctionHandle.ORTHANT and any(axis[0] < 0 for axis in axes):
        raise InvalidArgumentError("orthant samples cannot have negative coordinates")

    if len(axes) == 1:
        interpolant = PchipInterpolator(axes[0], samples, extrapolate=False)

        def interpolate(points: np.ndarray) -> np.ndarray:
            return interpolant(points[:, 0])

    else:
        grid_interpolant = RegularGridInterpolator(axes, samples, method="pchip")

        def interpolate(points: np.ndarray) -> np.ndarray:
            return grid_interpolant(points)

    lower = np.array([axis[0] for axis in axes])
    upper = np.array([axis[-1] for axis in axes])

    def evaluator(points: np.ndarray) -> np.ndarray:
        outside = np.any((points < lower) | (points > upper), axis=1)
        if np.any(outside):
            raise DomainError(
                f"point {points[outside][0].tolist()} lies outside the sample hull "
                f"[{lower.tolist()}, {upper.tolist()}]"
            )
        return interpolate(points)

    return FunctionHandle(
        "samples",
        len(axes),
        domain,
        evaluator,
        {"lower": lower.tolist(), "upper": upper.tolist()},
    )


def load_samples(path: Path) -> FunctionHandle:
    """
    Read a samples file, JSON with ``grid`` (list of axes, or a single axis),
    ``values`` and an optional ``domain``
    """
    logger.info(f"Reading samples from {path}")
    data = json.loads(path.read_text())
    try:
        grid = data["grid"]
        values = data["values"]
    except KeyError as err:
        raise InvalidArgumentError(f"samples file {path} lacks {err}") from err
    if grid and not isinstance(grid[0], list):
        grid = [grid]
    return sampled(grid, np.asarray(values), data.get("domain", FunctionHandle.ORTHANT))


def _numbers(text: str) -> List[float]:
    try:
        return [float(entry) for entry in text.split(",") if entry.strip()]
    except ValueError as err:
        raise InvalidArgumentError(f"bad number list: {text!r}") from err


def _indices(text: str) -> List[int]:
    try:
        return [int(entry) for entry in text.split(",")]
    except ValueError as err:
        raise InvalidArgumentError(f"bad multi-index: {text!r}") from err


def parse_catalog(spec: str) -> FunctionHandle:
    """
    Build a handle from a catalog spec (see the module docstring)

    Args:
        spec (str): Catalog spec, or the path of a samples JSON file

    Returns:
        :class:`.FunctionHandle`: Parsed handle

    Raises:
        InvalidArgumentError: If the spec does not match the grammar
    """
    text = spec.strip()
    prefix, _, rest = text.partition(":")

    if rest and prefix == "l":
        return laguerre_handle(_indices(rest))
    if rest and prefix == "h":
        return hermite_handle(_indices(rest))
    if rest and prefix in ("lin", "hlin", "poly"):
        coefficients = _numbers(rest)
        if not coefficients:
            raise InvalidArgumentError(f"{prefix} needs at least one coefficient")
        if prefix == "lin":
            return laguerre_combination(coefficients)
        if prefix == "hlin":
            return hermite_combination(coefficients)
        return damped_polynomial(coefficients)

    match = _EXPRESSION.match(text)
    if match is not None:
        power = match.group("power")
        has_x = re.match(rf"^\s*(?:{_NUMBER}\s*\*\s*)?x", text) is not None
        rate = float(match.group("rate") or 1.0) / float(
            match.group("denominator") or 1.0
        )
        handle = power_exponential(
            power=int(power) if power is not None else int(has_x),
            rate=rate,
            quadratic=match.group("square") is not None,
            scale=float(match.group("scale") or 1.0),
        )
        handle.name = text
        return handle

    if text.endswith(".json") and Path(text).exists():
        return load_samples(Path(text))

    raise InvalidArgumentError(f"cannot parse function spec: {spec!r}")
