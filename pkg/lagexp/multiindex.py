"""
Multi-index enumeration and the factorial / binomial combinatorics shared by the
expansions, weights and transforms.

A multi-index is a plain tuple of non-negative ints. All factorials and binomials
are carried as logarithms (with a separate sign where needed) so that products
like ``sqrt((2n)!) / (2^|n| n!)`` never overflow.
"""
import itertools
import logging
import math
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
from scipy.special import comb, gammaln

from lagexp.exceptions import InvalidArgumentError


logger = logging.getLogger(__name__)
"""lagexp.multiindex log object"""

MultiIndex = Tuple[int, ...]
"""Tuple of d non-negative ints"""


def as_multiindex(n: Union[int, Iterable[int]]) -> MultiIndex:
    """
    Normalize an int or a sequence of ints into a :data:`MultiIndex`

    Args:
        n (Union[int, Iterable[int]]): Single degree or sequence of degrees

    Returns:
        MultiIndex: Tuple of ints

    Raises:
        InvalidArgumentError: If an entry is negative
    """
    if isinstance(n, (int, np.integer)):
        entries: MultiIndex = (int(n),)
    else:
        entries = tuple(int(k) for k in n)
    if len(entries) == 0:
        raise InvalidArgumentError("multi-index must have at least one entry")
    if any(k < 0 for k in entries):
        raise InvalidArgumentError(f"multi-index entries must be >= 0, got {entries}")
    return entries


def degree(n: Sequence[int]) -> int:
    """|n|, the sum of the entries"""
    return int(sum(n))


def graded_key(n: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Sort key of the graded lexicographic order: total degree, then lex"""
    return (degree(n), tuple(n))


def enumerate_upto(d: int, max_degree: int) -> List[MultiIndex]:
    """
    All multi-indices of length ``d`` with ``|n| <= max_degree`` in graded
    lexicographic order.

    Args:
        d (int): Dimension, at least 1
        max_degree (int): Largest total degree D, at least 0

    Returns:
        List[MultiIndex]: ``C(D + d, d)`` multi-indices, ascending by ``|n|`` and
            lexicographically within a degree
    """
    if d < 1:
        raise InvalidArgumentError(f"dimension must be >= 1, got {d}")
    if max_degree < 0:
        raise InvalidArgumentError(f"max degree must be >= 0, got {max_degree}")

    indices = [
        n
        for n in itertools.product(range(max_degree + 1), repeat=d)
        if sum(n) <= max_degree
    ]
    return sorted(indices, key=graded_key)


def enumerate_box(caps: Sequence[int]) -> List[MultiIndex]:
    """
    All multi-indices of the box ``[0..D_1] x ... x [0..D_d]`` in row-major order,
    which is the storage order of coefficient arrays.
    """
    return list(itertools.product(*(range(int(c) + 1) for c in caps)))


def shell_size(d: int, s: int) -> int:
    """Number of multi-indices of length ``d`` with ``|n| = s``"""
    if s < 0:
        return 0
    return int(comb(s + d - 1, d - 1, exact=True))


def log_factorial(n: Union[int, np.ndarray]) -> Union[float, np.ndarray]:
    """
    ln(n!) through the log-gamma function

    Args:
        n (Union[int, np.ndarray]): Non-negative int or array of them

    Returns:
        Union[float, np.ndarray]: ln(n!)
    """
    if np.any(np.asarray(n) < 0):
        raise InvalidArgumentError(f"factorial argument must be >= 0, got {n}")
    result = gammaln(np.asarray(n, dtype=float) + 1.0)
    return float(result) if np.ndim(result) == 0 else result


def log_multi_factorial(n: Sequence[int]) -> float:
    """ln(n!) for a multi-index, where n! = n_1! ... n_d!"""
    return float(sum(log_factorial(k) for k in n))


def _gamma_vector(gamma: Union[float, Sequence[float]], d: int) -> np.ndarray:
    values = np.atleast_1d(np.asarray(gamma, dtype=float))
    if values.size == 1 and d > 1:
        values = np.full(d, values[0])
    if values.size != d:
        raise InvalidArgumentError(
            f"gamma has {values.size} entries but the multi-index has {d}"
        )
    negative_integer = (values < 0) & (values == np.round(values))
    if np.any(negative_integer):
        raise InvalidArgumentError(
            f"gamma entries must not be negative integers, got {values.tolist()}"
        )
    return values


def log_half_binom(
    gamma: Union[float, Sequence[float]], m: Union[int, Sequence[int]]
) -> Tuple[float, float]:
    """
    Signed log-magnitude of the generalized binomial ``(gamma choose m)``, the
    product over coordinates of
    ``gamma_j (gamma_j - 1) ... (gamma_j - m_j + 1) / m_j!``.

    Args:
        gamma (Union[float, Sequence[float]]): Upper entries, no negative integers.
            A scalar is broadcast over every coordinate.
        m (Union[int, Sequence[int]]): Lower multi-index

    Returns:
        Tuple[float, float]: ``(sign, log|value|)``; sign is 0.0 and the log is
            ``-inf`` when the binomial vanishes

    Raises:
        InvalidArgumentError: If some gamma entry is a negative integer
    """
    index = as_multiindex(m)
    values = _gamma_vector(gamma, len(index))

    sign = 1.0
    log_abs = 0.0
    for g, k in zip(values, index):
        factors = g - np.arange(k, dtype=float)
        if np.any(factors == 0.0):
            return 0.0, float("-inf")
        sign *= float(np.prod(np.sign(factors)))
        log_abs += float(np.sum(np.log(np.abs(factors)))) - float(gammaln(k + 1.0))
    return sign, log_abs


def half_binom(
    gamma: Union[float, Sequence[float]], m: Union[int, Sequence[int]]
) -> float:
    """
    Generalized binomial ``(gamma choose m)`` for half-integer (or any
    non-negative-integer-free) upper entries.
    """
    sign, log_abs = log_half_binom(gamma, m)
    return sign * float(np.exp(log_abs)) if sign != 0.0 else 0.0


def log_shifted_binom_table(shift: float, size: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Signs and log-magnitudes of ``(k - shift choose k)`` for ``k = 0 .. size - 1``.

    Built from the ratio ``(k + 1 - shift) / (k + 1)`` between consecutive entries,
    which is the product formula of :func:`log_half_binom` taken one factor at a
    time. ``shift`` must not be a positive integer, the upper entry ``k - shift``
    would then hit a negative integer.

    Args:
        shift (float): 1/2 and 3/2 are the values the transforms use
        size (int): Number of entries

    Returns:
        Tuple[np.ndarray, np.ndarray]: ``(signs, log_magnitudes)``
    """
    if shift > 0 and float(shift).is_integer():
        raise InvalidArgumentError(f"shift must not be a positive integer, got {shift}")

    k = np.arange(1, size, dtype=float)
    ratios = (k - shift) / k
    signs = np.ones(size)
    logs = np.zeros(size)
    if size > 1:
        signs[1:] = np.cumprod(np.sign(ratios))
        logs[1:] = np.cumsum(np.log(np.abs(ratios)))
    return signs, logs


def factorial(n: Sequence[int]) -> int:
    """n! = n_1! ... n_d! as an exact int"""
    return math.prod(math.factorial(k) for k in as_multiindex(n))
