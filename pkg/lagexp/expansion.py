"""
Laguerre expansions on the orthant and Hermite expansions on R^d.

Coefficients are stored densely in a :class:`CoefficientArray`, row-major over the
box ``[0..D_1] x ... x [0..D_d]``. They are computed by tensor-product Gauss
quadrature: the integrand is sampled once on the full grid and contracted axis by
axis against the table of basis functions at the nodes.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from lagexp.basis import hermite_fn_table, laguerre_fn_table
from lagexp.catalog import FunctionHandle
from lagexp.exceptions import DomainError, InvalidArgumentError
from lagexp.multiindex import MultiIndex, as_multiindex, enumerate_box
from lagexp.quadrature import (
    QUAD_MARGIN,
    QuadratureRule,
    check_lifted,
    check_order_for,
    gauss_hermite_rule,
    gauss_laguerre_rule,
    tensor_rule,
)


logger = logging.getLogger(__name__)
"""lagexp.expansion log object"""

Caps = Union[int, Sequence[int]]

CHOP_FACTOR = 1e2
"""
Computed coefficients below ``CHOP_FACTOR * eps * sum_i W_i |f(x_i)|``, the
rounding level of the quadrature sum, are set to exactly 0
"""

TAIL_RUN = 5
"""
Consecutive non-empty indices ending at a cap that mark the array as the truncation of
an infinite sequence (fewer when the axis stores fewer indices, never fewer than 2)
"""


class CoefficientArray(object):
    """
    Expansion coefficients of one function in the Laguerre or Hermite basis.

    The values are read-only once constructed.

    Args:
        basis (str): :attr:`LAGUERRE` or :attr:`HERMITE`
        values (np.ndarray): Array of shape ``(D_1 + 1, ..., D_d + 1)``, real or
            complex
        meta (Optional[Dict[str, Any]]) = None: Free-form provenance, stored in
            coefficient files (``quad_order``, ``source``)

    Raises:
        InvalidArgumentError: On an unknown basis or a non-finite value
    """

    LAGUERRE = "laguerre"
    HERMITE = "hermite"

    def __init__(
        self, basis: str, values: np.ndarray, meta: Optional[Dict[str, Any]] = None
    ) -> None:
        if basis not in (self.LAGUERRE, self.HERMITE):
            raise InvalidArgumentError(f"unknown basis: {basis}")
        data = np.array(values)
        if data.dtype.kind not in "fc":
            data = data.astype(float)
        if data.ndim == 0:
            raise InvalidArgumentError("coefficient arrays need at least one axis")
        if not np.all(np.isfinite(data)):
            raise InvalidArgumentError("coefficient values must be finite")
        data.flags.writeable = False

        self.basis = basis
        self.values = data
        self.meta = dict(meta or {})

    @property
    def dimension(self) -> int:
        return self.values.ndim

    @property
    def caps(self) -> MultiIndex:
        return tuple(size - 1 for size in self.values.shape)

    @property
    def is_complex(self) -> bool:
        return self.values.dtype.kind == "c"

    def __getitem__(self, n: Union[int, Sequence[int]]) -> Union[float, complex]:
        index = as_multiindex(n)
        if len(index) != self.dimension:
            raise InvalidArgumentError(
                f"index {index} does not match dimension {self.dimension}"
            )
        if any(k > cap for k, cap in zip(index, self.caps)):
            return 0.0
        return self.values[index].item()

    def degrees(self) -> np.ndarray:
        """``|n|`` for every stored entry, same shape as :attr:`values`"""
        return np.indices(self.values.shape).sum(axis=0)

    def log_magnitudes(self) -> np.ndarray:
        """``ln |c_n|``, ``-inf`` on zero entries"""
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.values))

    def shell_max(self, log: bool = True) -> np.ndarray:
        """
        Largest ``|c_n|`` over each shell ``|n| = s``, ``s = 0 .. sum(caps)``

        Args:
            log (bool) = True: Return ``ln`` of the maxima (``-inf`` for zero shells)
        """
        degrees = self.degrees().ravel()
        logs = self.log_magnitudes().ravel()
        shells = np.full(int(sum(self.caps)) + 1, -np.inf)
        np.maximum.at(shells, degrees, logs)
        if log:
            return shells
        return np.exp(shells)

    def complete_shells(self) -> int:
        """Largest s such that every n with ``|n| <= s`` is stored"""
        return int(min(self.caps))

    def support_degree(self) -> int:
        """Largest ``|n|`` with a non-zero entry, -1 for the zero array"""
        nonzero = self.values != 0
        if not np.any(nonzero):
            return -1
        return int(self.degrees()[nonzero].max())

    def is_finitely_supported(self) -> bool:
        """
        False when the array reads as the truncation of an infinite sequence

        That is the case when, along some axis, the non-empty indices end in a run
        of :data:`TAIL_RUN` consecutive indices reaching the cap (the whole axis
        when it stores fewer, but at least 2). A basis function stored at its
        own cap, or a few isolated entries, stay finitely supported.
        """
        nonzero = self.values != 0
        if not np.any(nonzero):
            return True
        for axis, cap in enumerate(self.caps):
            other = tuple(k for k in range(self.dimension) if k != axis)
            used = np.any(nonzero, axis=other) if other else nonzero
            run = min(TAIL_RUN, cap + 1)
            if run >= 2 and np.all(used[cap - run + 1 :]):
                return False
        return True

    def is_hermite_even(self, tolerance: float = 0.0) -> bool:
        """True when every entry with an odd component is at most ``tolerance``"""
        return self.max_odd_entry() <= tolerance

    def max_odd_entry(self) -> float:
        """Largest ``|c_n|`` over multi-indices with at least one odd component"""
        odd = np.any(np.indices(self.values.shape) % 2 == 1, axis=0)
        if not np.any(odd):
            return 0.0
        return float(np.max(np.abs(self.values[odd])))

    def with_values(
        self, values: np.ndarray, meta: Optional[Dict[str, Any]] = None
    ) -> CoefficientArray:
        """New array in the same basis"""
        return CoefficientArray(self.basis, values, self.meta if meta is None else meta)

    def truncated(self, caps: Caps) -> CoefficientArray:
        """The entries with ``n <= caps``"""
        limits = _caps(caps, self.dimension)
        window = tuple(slice(0, cap + 1) for cap in limits)
        return self.with_values(self.values[window])

    @classmethod
    def zeros(cls, basis: str, caps: Caps, dimension: int = 1) -> CoefficientArray:
        limits = _caps(caps, dimension)
        return cls(basis, np.zeros(tuple(cap + 1 for cap in limits)))

    @classmethod
    def delta(
        cls, basis: str, caps: Caps, n: Union[int, Sequence[int]], value: float = 1.0
    ) -> CoefficientArray:
        """The array with a single entry ``value`` at ``n``"""
        index = as_multiindex(n)
        limits = _caps(caps, len(index))
        if any(k > cap for k, cap in zip(index, limits)):
            raise InvalidArgumentError(f"index {index} exceeds caps {limits}")
        values = np.zeros(tuple(cap + 1 for cap in limits))
        values[index] = value
        return cls(basis, values)

    @classmethod
    def from_sequence(
        cls,
        basis: str,
        caps: Caps,
        fn: Callable[[MultiIndex], float],
        dimension: int = 1,
    ) -> CoefficientArray:
        """Array with ``c_n = fn(n)`` for every n in the box"""
        limits = _caps(caps, dimension)
        values = np.array([fn(n) for n in enumerate_box(limits)])
        return cls(basis, values.reshape(tuple(cap + 1 for cap in limits)))

    @classmethod
    def from_degrees(
        cls, basis: str, caps: Caps, fn: Callable[[int], float], dimension: int = 1
    ) -> CoefficientArray:
        """Array with ``c_n = fn(|n|)``"""
        return cls.from_sequence(basis, caps, lambda n: fn(sum(n)), dimension)

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert to the coefficient file schema

        Returns:
            Dict[str, Any]: ``basis``, ``dimension``, ``caps``, ``values`` (flat,
                row-major, ``[re, im]`` pairs when complex) and ``meta``
        """
        flat = self.values.ravel()
        if self.is_complex:
            values = [[float(v.real), float(v.imag)] for v in flat]
        else:
            values = [float(v) for v in flat]
        return {
            "basis": self.basis,
            "dimension": self.dimension,
            "caps": list(self.caps),
            "values": values,
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> CoefficientArray:
        try:
            caps = [int(cap) for cap in data["caps"]]
            raw = data["values"]
            basis = data["basis"]
        except KeyError as err:
            raise InvalidArgumentError(f"coefficient data lacks {err}") from err
        if int(data.get("dimension", len(caps))) != len(caps):
            raise InvalidArgumentError("dimension does not match the number of caps")

        if raw and isinstance(raw[0], list):
            values = np.array([complex(re, im) for re, im in raw])
        else:
            values = np.array(raw, dtype=float)
        shape = tuple(cap + 1 for cap in caps)
        if values.size != int(np.prod(shape)):
            raise InvalidArgumentError(
                f"{values.size} values stored but caps {caps} need "
                f"{int(np.prod(shape))}"
            )
        return cls(basis, values.reshape(shape), data.get("meta", {}))

    def save(self, path: Path, force: bool = False) -> bool:
        """
        Write the coefficient file

        Returns:
            bool: False if the file exists and ``force`` is not set
        """
        if path.exists() and not force:
            logger.error(f'File "{path}" not written. Please use `-f` to overwrite it')
            return False
        logger.info(f"Writing: {path}")
        path.write_text(self.to_json())
        return True

    @classmethod
    def load(cls, path: Path) -> CoefficientArray:
        logger.info(f"Reading: {path}")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as err:
            message = f"{path} is not a coefficient file: {err}"
            raise InvalidArgumentError(message) from err
        return cls.from_json(data)

    def __repr__(self) -> str:
        return (
            f"CoefficientArray<basis: {self.basis}, dimension: {self.dimension}, "
            f"caps: {list(self.caps)}, support_degree: {self.support_degree()}>"
        )


def _caps(caps: Caps, dimension: int) -> MultiIndex:
    if isinstance(caps, (int, np.integer)):
        return (int(caps),) * dimension
    limits = tuple(int(cap) for cap in caps)
    if not limits or any(cap < 0 for cap in limits):
        raise InvalidArgumentError(f"caps must be non-negative, got {list(limits)}")
    return limits


def _coefficients(
    f: FunctionHandle, caps: Caps, rule: QuadratureRule, basis: str
) -> CoefficientArray:
    limits = _caps(caps, f.dimension)
    if len(limits) != f.dimension:
        raise InvalidArgumentError(
            f"{len(limits)} caps given for a function of dimension {f.dimension}"
        )
    points, weights = tensor_rule(rule, f.dimension)
    values = np.asarray(f.evaluate(points))
    check_lifted(values, points, rule)

    grid = (weights * values).reshape((rule.order,) * f.dimension)
    for axis, cap in enumerate(limits):
        table = rule.basis_table(cap)
        grid = np.moveaxis(np.tensordot(grid, table, axes=([axis], [1])), -1, axis)

    scale = float(np.sum(weights * np.abs(values)))
    noise_floor = CHOP_FACTOR * np.finfo(float).eps * scale
    grid = np.where(np.abs(grid) <= noise_floor, 0.0, grid)

    logger.debug(f"Expanded {f.name} in the {basis} basis up to caps {list(limits)}")
    meta = {"quad_order": rule.order, "source": f.name, "noise_floor": noise_floor}
    return CoefficientArray(basis, grid, meta)


def default_order(caps: Caps, margin: int = QUAD_MARGIN) -> int:
    """Rule order used when none is given: ``max(caps) + margin``"""
    limits = caps if isinstance(caps, (int, np.integer)) else max(caps)
    return int(limits) + margin


def laguerre_coeffs(
    f: FunctionHandle, caps: Caps, m: Optional[int] = None, margin: int = QUAD_MARGIN
) -> CoefficientArray:
    """
    Laguerre coefficients ``a_n = integral f l_n dx`` for all ``n <= caps``

    Args:
        f (:class:`.FunctionHandle`): Function on the orthant
        caps (Caps): Per-axis maximum degree, an int applies to every axis
        m (Optional[int]) = None: Quadrature order, defaults to
            ``max(caps) + margin``
        margin (int) = QUAD_MARGIN: Required nodes beyond the largest degree

    Returns:
        :class:`.CoefficientArray`: Laguerre coefficients

    Raises:
        InvalidArgumentError: If ``m`` is too small for ``caps``
        QuadratureOverflowError: If ``f`` does not decay like ``e^{-x/2}``
    """
    limits = _caps(caps, f.dimension)
    rule = gauss_laguerre_rule(m or default_order(limits, margin))
    check_order_for(rule, max(limits), margin)
    return _coefficients(f, limits, rule, CoefficientArray.LAGUERRE)


def hermite_coeffs(
    f: FunctionHandle, caps: Caps, m: Optional[int] = None, margin: int = QUAD_MARGIN
) -> CoefficientArray:
    """
    Hermite coefficients ``b_n = integral f h_n dx`` for all ``n <= caps``

    Same arguments and errors as :func:`laguerre_coeffs`, with the Gauss-Hermite
    rule and the ``e^{x^2/2}`` lift.
    """
    limits = _caps(caps, f.dimension)
    rule = gauss_hermite_rule(m or default_order(limits, margin))
    check_order_for(rule, max(limits), margin)
    return _coefficients(f, limits, rule, CoefficientArray.HERMITE)


def expand(
    f: FunctionHandle,
    basis: str,
    caps: Caps,
    m: Optional[int] = None,
    margin: int = QUAD_MARGIN,
) -> CoefficientArray:
    """Dispatch to :func:`laguerre_coeffs` or :func:`hermite_coeffs`"""
    if basis == CoefficientArray.LAGUERRE:
        return laguerre_coeffs(f, caps, m, margin)
    if basis == CoefficientArray.HERMITE:
        return hermite_coeffs(f, caps, m, margin)
    raise InvalidArgumentError(f"unknown basis: {basis}")


def _as_points(x: Any, d: int) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return arr.reshape(1, 1), True
    if arr.ndim == 1:
        if d == 1 and arr.size > 1:
            return arr.reshape(-1, 1), False
        return arr.reshape(1, -1), True
    return arr, False


def reconstruct(c: CoefficientArray, x: Any) -> Union[float, complex, np.ndarray]:
    """
    Partial sum ``sum_{n <= caps} c_n b_n(x)``

    Args:
        c (:class:`.CoefficientArray`): Coefficients
        x: A point, or an (M, d) array of points (a 1d array of points when d = 1)

    Returns:
        The value at a single point, or an array of M values

    Raises:
        DomainError: For negative coordinates in the Laguerre basis
    """
    points, single = _as_points(x, c.dimension)
    if points.shape[1] != c.dimension:
        raise InvalidArgumentError(
            f"points have dimension {points.shape[1]}, coefficients {c.dimension}"
        )
    if c.basis == CoefficientArray.LAGUERRE and np.any(points < 0):
        raise DomainError("Laguerre expansions live on the closed orthant x >= 0")

    table_fn = (
        laguerre_fn_table if c.basis == CoefficientArray.LAGUERRE else hermite_fn_table
    )
    # Contract one axis at a time, the point axis stays in front
    result = np.einsum("a...,am->m...", c.values, table_fn(c.caps[0], points[:, 0]))
    for axis in range(1, c.dimension):
        table = table_fn(c.caps[axis], points[:, axis])
        result = np.einsum("ma...,am->m...", result, table)
    if single:
        return result[0].item()
    return result


def series_handle(c: CoefficientArray) -> FunctionHandle:
    """Handle evaluating the partial sum of ``c``"""
    domain = (
        FunctionHandle.ORTHANT
        if c.basis == CoefficientArray.LAGUERRE
        else FunctionHandle.REAL
    )
    return FunctionHandle(
        f"series({c.basis}, caps={list(c.caps)})",
        c.dimension,
        domain,
        lambda points: np.atleast_1d(reconstruct(c, points)),
    )


def _residual_rule(
    c: CoefficientArray, rule: Optional[QuadratureRule]
) -> QuadratureRule:
    if rule is not None:
        return rule
    order = default_order(c.caps)
    if c.basis == CoefficientArray.LAGUERRE:
        return gauss_laguerre_rule(order)
    return gauss_hermite_rule(order)


def truncation_residual(
    f: FunctionHandle, c: CoefficientArray, rule: Optional[QuadratureRule] = None
) -> float:
    """
    Quadrature estimate of ``||f - sum_n c_n b_n||_{L^2}``

    Args:
        f (:class:`.FunctionHandle`): The expanded function
        c (:class:`.CoefficientArray`): Its coefficients
        rule (Optional[:class:`.QuadratureRule`]) = None: Defaults to a rule of
            order ``max(caps) + QUAD_MARGIN`` in the basis of ``c``

    Returns:
        float: Non-negative residual
    """
    rule = _residual_rule(c, rule)
    points, weights = tensor_rule(rule, c.dimension)
    values = np.asarray(f.evaluate(points))
    check_lifted(values, points, rule)
    difference = values - reconstruct(c, points)
    return float(np.sqrt(max(np.sum(weights * np.abs(difference) ** 2), 0.0)))


def parseval_residual(
    f: FunctionHandle, c: CoefficientArray, rule: Optional[QuadratureRule] = None
) -> float:
    """``||f||^2_{L^2} - sum_n |c_n|^2``, the squared norm the truncation misses"""
    rule = _residual_rule(c, rule)
    points, weights = tensor_rule(rule, c.dimension)
    values = np.asarray(f.evaluate(points))
    check_lifted(values, points, rule)
    norm_squared = float(np.sum(weights * np.abs(values) ** 2))
    return norm_squared - float(np.sum(np.abs(c.values) ** 2))
