"""
Laguerre polynomials, Laguerre functions and Hermite functions.

Everything is evaluated by three-term recurrences. Laguerre functions run the
recurrence on the damped values ``L_k(x) e^{-x/2}`` with a per-point log scale,
so nothing overflows or underflows for x up to several thousand. Hermite
functions use the L2-normalized recurrence, which stays O(1) in the oscillatory
region.
"""
import logging
from typing import Sequence, Tuple, Union

import numpy as np

from lagexp.exceptions import DomainError, InvalidArgumentError
from lagexp.multiindex import as_multiindex, log_factorial


logger = logging.getLogger(__name__)
"""lagexp.basis log object"""

PI_QUARTER = np.pi ** -0.25
"""pi^{-1/4}, the value of h_0 at the origin"""

ODD_RELATION_CALIBRATION_POINT = 1.0
"""Point at which the odd Hermite-Laguerre constant is calibrated"""

_RESCALE_ABOVE = 1e150
_RESCALE_BELOW = 1e-150


class BasisKind(object):
    """
    Which family a basis index refers to.

    Args:
        tag (str): One of :attr:`LAGUERRE_POLY`, :attr:`LAGUERRE`, :attr:`HERMITE`
        gamma (float) = 0.0: Order of the Laguerre polynomial, only used with
            :attr:`LAGUERRE_POLY`. Must be > -1.
    """

    LAGUERRE_POLY = "laguerre-poly"
    """Laguerre polynomial L_n^gamma"""
    LAGUERRE = "laguerre"
    """Laguerre function l_n on the orthant"""
    HERMITE = "hermite"
    """Hermite function h_n on R^d"""

    TAGS = (LAGUERRE_POLY, LAGUERRE, HERMITE)
    """Every accepted tag"""

    def __init__(self, tag: str, gamma: float = 0.0) -> None:
        if tag not in self.TAGS:
            raise InvalidArgumentError(f"unknown basis kind: {tag}")
        if tag == self.LAGUERRE_POLY:
            _check_gamma(gamma)
        self.tag = tag
        self.gamma = float(gamma)

    def evaluate(self, n: Union[int, Sequence[int]], x: Sequence[float]) -> float:
        """
        Evaluate the basis element ``n`` at the point ``x``

        Args:
            n (Union[int, Sequence[int]]): Degree (polynomials) or multi-index
            x (Sequence[float]): Point

        Returns:
            float: Value
        """
        if self.tag == self.LAGUERRE_POLY:
            index = as_multiindex(n)
            point = np.atleast_1d(np.asarray(x, dtype=float))
            if len(index) != 1 or point.size != 1:
                raise InvalidArgumentError("Laguerre polynomials are one dimensional")
            return float(laguerre_poly(index[0], self.gamma, point[0]))
        if self.tag == self.LAGUERRE:
            return float(laguerre_fn(n, x))
        return float(hermite_fn(n, x))

    def __repr__(self) -> str:
        return f"BasisKind<tag: {self.tag}, gamma: {self.gamma}>"


def _check_gamma(gamma: float) -> None:
    if not gamma > -1.0:
        raise InvalidArgumentError(f"Laguerre order gamma must be > -1, got {gamma}")


def laguerre_log_table(
    max_degree: int, x: np.ndarray, gamma: float = 0.0, damped: bool = True
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Signs and log-magnitudes of ``L_k^gamma(x)`` (times ``e^{-x/2}`` when damped)
    for ``k = 0 .. max_degree`` at every point of ``x``.

    The recurrence
    ``(k+1) L_{k+1} = (2k+1+gamma-x) L_k - (k+gamma) L_{k-1}`` is run on rescaled
    values; the scale is kept as a per-point logarithm.

    Args:
        max_degree (int): Largest degree N
        x (np.ndarray): 1d array of points, x >= 0 for the damped functions
        gamma (float) = 0.0: Laguerre order, > -1
        damped (bool) = True: Multiply by ``e^{-x/2}``

    Returns:
        Tuple[np.ndarray, np.ndarray]: Arrays of shape ``(N + 1, len(x))``
    """
    _check_gamma(gamma)
    points = np.atleast_1d(np.asarray(x, dtype=float))
    signs = np.zeros((max_degree + 1, points.size))
    logs = np.full((max_degree + 1, points.size), -np.inf)

    scale = -points / 2.0 if damped else np.zeros(points.size)
    previous = np.zeros(points.size)
    current = np.ones(points.size)
    signs[0] = 1.0
    logs[0] = scale

    with np.errstate(divide="ignore"):
        for k in range(max_degree):
            following = (
                (2 * k + 1 + gamma - points) * current - (k + gamma) * previous
            ) / (k + 1)
            previous, current = current, following

            big = np.maximum(np.abs(previous), np.abs(current))
            rescale = (big > _RESCALE_ABOVE) | ((big < _RESCALE_BELOW) & (big > 0))
            if np.any(rescale):
                previous[rescale] /= big[rescale]
                current[rescale] /= big[rescale]
                scale[rescale] += np.log(big[rescale])

            signs[k + 1] = np.sign(current)
            logs[k + 1] = np.log(np.abs(current)) + scale

    return signs, logs


def laguerre_poly_table(
    max_degree: int, gamma: float, x: np.ndarray, damped: bool = False
) -> np.ndarray:
    """Values of ``L_k^gamma`` (optionally damped) for k = 0 .. max_degree"""
    signs, logs = laguerre_log_table(max_degree, x, gamma=gamma, damped=damped)
    with np.errstate(over="ignore", under="ignore"):
        return signs * np.exp(logs)


def laguerre_poly(n: int, gamma: float, x: Union[float, np.ndarray]) -> np.ndarray:
    """
    The Laguerre polynomial ``L_n^gamma(x)``

    Args:
        n (int): Degree, >= 0
        gamma (float): Order, > -1
        x (Union[float, np.ndarray]): Point(s)

    Returns:
        np.ndarray: Value(s), a 0-d array for scalar input

    Raises:
        InvalidArgumentError: If gamma <= -1 or n < 0
    """
    if n < 0:
        raise InvalidArgumentError(f"degree must be >= 0, got {n}")
    values = laguerre_poly_table(n, gamma, np.atleast_1d(x))[n]
    return values.reshape(np.shape(x))


def laguerre_fn_table(max_degree: int, x: np.ndarray) -> np.ndarray:
    """
    One dimensional Laguerre functions ``l_k(x) = L_k(x) e^{-x/2}``

    Args:
        max_degree (int): Largest degree N
        x (np.ndarray): 1d array of points in [0, inf)

    Returns:
        np.ndarray: Shape ``(N + 1, len(x))``
    """
    return laguerre_poly_table(max_degree, 0.0, x, damped=True)


def hermite_fn_table(max_degree: int, x: np.ndarray) -> np.ndarray:
    """
    One dimensional Hermite functions ``h_k``, unit L2 norm

    Args:
        max_degree (int): Largest degree N
        x (np.ndarray): 1d array of points

    Returns:
        np.ndarray: Shape ``(N + 1, len(x))``
    """
    points = np.atleast_1d(np.asarray(x, dtype=float))
    table = np.zeros((max_degree + 1, points.size))
    with np.errstate(under="ignore"):
        table[0] = PI_QUARTER * np.exp(-(points ** 2) / 2.0)
    if max_degree >= 1:
        table[1] = np.sqrt(2.0) * points * table[0]
    for k in range(1, max_degree):
        table[k + 1] = (
            points * np.sqrt(2.0 / (k + 1)) * table[k]
            - np.sqrt(k / (k + 1)) * table[k - 1]
        )
    return table


def _points(x: Union[Sequence[float], np.ndarray], d: int) -> Tuple[np.ndarray, bool]:
    """Coerce x into an (M, d) array, remembering if a single point was given"""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim <= 1
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1) if d > 1 or arr.size == 1 else arr.reshape(-1, 1)
        single = arr.shape[0] == 1
    if arr.shape[1] != d:
        raise InvalidArgumentError(
            f"points have dimension {arr.shape[1]} but the index has {d} entries"
        )
    return arr, single


def _tensor_eval(table_fn, n: Sequence[int], x) -> Union[float, np.ndarray]:
    index = as_multiindex(n)
    points, single = _points(x, len(index))
    values = np.ones(points.shape[0])
    for axis, k in enumerate(index):
        values = values * table_fn(k, points[:, axis])[k]
    return float(values[0]) if single else values


def laguerre_fn(
    n: Union[int, Sequence[int]], x: Union[float, Sequence[float], np.ndarray]
) -> Union[float, np.ndarray]:
    """
    Tensor-product Laguerre function ``l_n(x) = prod_j L_{n_j}(x_j) e^{-x_j/2}``

    Args:
        n (Union[int, Sequence[int]]): Multi-index
        x: A point of the closed orthant, or an (M, d) array of points

    Returns:
        Union[float, np.ndarray]: Value at a single point or values at M points
    """
    index = as_multiindex(n)
    points, _ = _points(x, len(index))
    if np.any(points < 0):
        raise DomainError("Laguerre functions live on the closed orthant x >= 0")
    return _tensor_eval(laguerre_fn_table, index, x)


def hermite_fn(
    n: Union[int, Sequence[int]], x: Union[float, Sequence[float], np.ndarray]
) -> Union[float, np.ndarray]:
    """
    Tensor-product Hermite function ``h_n(x) = prod_j h_{n_j}(x_j)``

    Args:
        n (Union[int, Sequence[int]]): Multi-index
        x: A point of R^d, or an (M, d) array of points

    Returns:
        Union[float, np.ndarray]: Value at a single point or values at M points
    """
    return _tensor_eval(hermite_fn_table, n, x)


def laguerre_fn_derivative(n: int, x: Union[float, np.ndarray]) -> np.ndarray:
    """
    Derivative of the one dimensional Laguerre function,
    ``l_n'(x) = -(L^{(1)}_{n-1}(x) + L_n(x) / 2) e^{-x/2}``

    Args:
        n (int): Degree
        x (Union[float, np.ndarray]): Point(s) in [0, inf)

    Returns:
        np.ndarray: Value(s)
    """
    points = np.atleast_1d(np.asarray(x, dtype=float))
    result = -0.5 * laguerre_fn_table(n, points)[n]
    if n >= 1:
        result -= laguerre_poly_table(n - 1, 1.0, points, damped=True)[n - 1]
    return result.reshape(np.shape(x))


def hermite_poly(n: int, x: Union[float, np.ndarray]) -> np.ndarray:
    """Physicists' Hermite polynomial ``H_n`` by ``H_{k+1} = 2x H_k - 2k H_{k-1}``"""
    points = np.asarray(x, dtype=float)
    previous = np.zeros_like(points)
    current = np.ones_like(points)
    for k in range(n):
        previous, current = current, 2.0 * points * current - 2.0 * k * previous
    return current


def _relation_rhs(n: int, x: float, odd: bool) -> float:
    """Right hand side of the Hermite-Laguerre relation as printed, no calibration"""
    gamma = 0.5 if odd else -0.5
    log_prefactor = 2 * n * np.log(2.0) + log_factorial(n)
    value = (-1) ** n * np.exp(log_prefactor) * float(laguerre_poly(n, gamma, x * x))
    return value * x if odd else value


def calibrate_odd_relation(x: float = ODD_RELATION_CALIBRATION_POINT) -> float:
    """
    Factor that makes the odd-index relation
    ``H_{2n+1}(x) = c (-1)^n 2^{2n} n! L_n^{1/2}(x^2) x`` exact at ``n = 0``.

    The printed relation has ``c = 1``; the Rodrigues definition gives
    ``H_1(x) = 2x``, so the calibration returns 2.

    Returns:
        float: Calibrated factor
    """
    factor = float(hermite_poly(1, x)) / _relation_rhs(0, x, odd=True)
    logger.debug(f"Odd Hermite-Laguerre factor calibrated at x={x}: {factor}")
    return factor


def hermite_laguerre_relation(n: int, x: float, parity: str) -> Tuple[float, float]:
    """
    Both sides of the Hermite-Laguerre relation

    * even: ``H_{2n}(x) = (-1)^n 2^{2n} n! L_n^{-1/2}(x^2)``
    * odd: ``H_{2n+1}(x) = c (-1)^n 2^{2n} n! L_n^{1/2}(x^2) x`` with ``c`` from
      :func:`calibrate_odd_relation`

    Args:
        n (int): Index, >= 0
        x (float): Point
        parity (str): "even" or "odd"

    Returns:
        Tuple[float, float]: ``(lhs, rhs)``
    """
    if parity not in ("even", "odd"):
        raise InvalidArgumentError(f"parity must be 'even' or 'odd', got {parity}")
    if n < 0:
        raise InvalidArgumentError(f"index must be >= 0, got {n}")

    if parity == "even":
        return float(hermite_poly(2 * n, x)), _relation_rhs(n, x, odd=False)
    factor = calibrate_odd_relation()
    return float(hermite_poly(2 * n + 1, x)), factor * _relation_rhs(n, x, odd=True)
