"""
Isomorphisms between Laguerre coefficients of ``f`` on the orthant and the even
Hermite coefficients of ``f o v`` on R^d, where ``v(x) = (x_1^2, ..., x_d^2)``.

:func:`luh` maps ``a`` to ``b`` with

    b_{2n} = (-1)^{|n|} pi^{d/4} sqrt((2n)!) / (2^{|n|} n!)
             sum_k a_{k+n} (k - 1/2 choose k)

and :func:`hul` inverts it:

    a_n = (-1)^{|n|} 2^{|n|} / pi^{d/4}
          sum_k (k - 3/2 choose k) (-1)^{|k|} 2^{|k|}
                (k+n)! b_{2(k+n)} / sqrt((2(k+n))!)

Every factorial and binomial enters as a signed log-magnitude, so a term is only
exponentiated once its factors are combined. The inner sums run over k-shells and
stop once the absolute sum of the remaining stored terms falls below
``eps_tail`` times the partial sum.
"""
import logging
import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln

from lagexp.catalog import FunctionHandle
from lagexp.exceptions import DomainError, InvalidArgumentError, ParityError
from lagexp.expansion import CoefficientArray
from lagexp.multiindex import enumerate_box, log_shifted_binom_table


logger = logging.getLogger(__name__)
"""lagexp.transform log object"""

PARITY_TOLERANCE = 1e-12
"""Largest odd Hermite entry :func:`hul` accepts"""

LOG_PI = math.log(math.pi)
LOG_2 = math.log(2.0)


class TransformOptions(object):
    """
    Truncation of the inner sums

    Args:
        K_tail (int) = 256: Largest k-shell summed, at least 8
        eps_tail (float) = 1e-10: Relative size of the dropped remainder, in
            (0, 1e-4]
        out_caps (Optional[Sequence[int]]) = None: Caps of the produced array.
            :func:`luh` defaults to twice the input caps, :func:`hul` to half.
    """

    def __init__(
        self,
        K_tail: int = 256,
        eps_tail: float = 1e-10,
        out_caps: Optional[Union[int, Sequence[int]]] = None,
    ) -> None:
        if K_tail < 8:
            raise InvalidArgumentError(f"K_tail must be >= 8, got {K_tail}")
        if not 0 < eps_tail <= 1e-4:
            raise InvalidArgumentError(f"eps_tail must be in (0, 1e-4], got {eps_tail}")
        self.K_tail = int(K_tail)
        self.eps_tail = float(eps_tail)
        self.out_caps = out_caps

    def caps_for(self, dimension: int, default: Sequence[int]) -> Tuple[int, ...]:
        if self.out_caps is None:
            return tuple(default)
        if isinstance(self.out_caps, (int, np.integer)):
            return (int(self.out_caps),) * dimension
        caps = tuple(int(cap) for cap in self.out_caps)
        if len(caps) != dimension or any(cap < 0 for cap in caps):
            raise InvalidArgumentError(
                f"out_caps {list(caps)} do not fit dimension {dimension}"
            )
        return caps

    def __repr__(self) -> str:
        return (
            f"TransformOptions<K_tail: {self.K_tail}, eps_tail: {self.eps_tail}, "
            f"out_caps: {self.out_caps}>"
        )


class TransformReport(object):
    """
    What the truncated inner sums did

    Args:
        entries (int): Output entries computed
        max_shells (int): Most k-shells used by one entry
        max_tail_ratio (float): Largest remainder estimate relative to its sum
        truncated (int): Entries whose sum had not met ``eps_tail`` at the cutoff
    """

    def __init__(
        self, entries: int, max_shells: int, max_tail_ratio: float, truncated: int
    ) -> None:
        self.entries = entries
        self.max_shells = max_shells
        self.max_tail_ratio = max_tail_ratio
        self.truncated = truncated

    def to_dict(self) -> dict:
        return {
            "entries": self.entries,
            "max_shells": self.max_shells,
            "max_tail_ratio": self.max_tail_ratio,
            "truncated": self.truncated,
        }

    def __repr__(self) -> str:
        return (
            f"TransformReport<entries: {self.entries}, max_shells: {self.max_shells}, "
            f"max_tail_ratio: {self.max_tail_ratio:.3g}, truncated: {self.truncated}>"
        )


class _ShellSum(object):
    """Truncated sum of one output entry"""

    def __init__(
        self, value: float, shells: int, ratio: float, truncated: bool
    ) -> None:
        self.value = value
        self.shells = shells
        self.ratio = ratio
        self.truncated = truncated


def _shell_sum(
    signs: np.ndarray,
    logs: np.ndarray,
    opts: TransformOptions,
    input_truncated: bool,
) -> _ShellSum:
    """
    Sum signed terms given over a box of k, shell by shell in ``|k|``

    Args:
        signs (np.ndarray): Term signs, 0 where the term vanishes
        logs (np.ndarray): ln of the term magnitudes
        opts (:class:`.TransformOptions`): Truncation
        input_truncated (bool): The data behind the last stored shells is cut off
    """
    degrees = np.indices(logs.shape).sum(axis=0).ravel()
    with np.errstate(over="ignore", under="ignore"):
        terms = (signs * np.exp(logs)).ravel()
    size = int(degrees.max()) + 1
    signed = np.zeros(size)
    absolute = np.zeros(size)
    np.add.at(signed, degrees, terms)
    np.add.at(absolute, degrees, np.abs(terms))

    partial = np.cumsum(signed)
    remainder = np.concatenate([np.cumsum(absolute[::-1])[::-1][1:], [0.0]])
    limit = min(size, opts.K_tail + 1)
    for s in range(limit):
        if remainder[s] <= opts.eps_tail * abs(partial[s]):
            ratio = remainder[s] / abs(partial[s]) if partial[s] else 0.0
            return _ShellSum(float(partial[s]), s + 1, ratio, False)

    last = limit - 1
    scale = abs(partial[last])
    if limit < size:
        # K_tail reached with stored terms left
        ratio = remainder[last] / scale if scale else math.inf
        return _ShellSum(float(partial[last]), limit, ratio, True)
    ratio = absolute[last] / scale if scale else 0.0
    truncated = input_truncated and ratio > opts.eps_tail
    return _ShellSum(float(partial[last]), limit, ratio, truncated)


def _summarize(name: str, sums: Sequence[_ShellSum]) -> TransformReport:
    truncated = sum(1 for s in sums if s.truncated)
    finite_ratios = [s.ratio for s in sums if math.isfinite(s.ratio)]
    report = TransformReport(
        len(sums),
        max((s.shells for s in sums), default=0),
        max(finite_ratios, default=0.0),
        truncated,
    )
    if truncated:
        logger.warning(
            f"{name}: {truncated} of {len(sums)} inner sums did not reach the tail "
            f"tolerance at the cutoff (largest remainder ratio "
            f"{report.max_tail_ratio:.3g})"
        )
    logger.debug(f"{name}: {report!r}")
    return report


def _binomial_logs(shift: float, shape: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """Signs and logs of ``prod_j (k_j - shift choose k_j)`` over a box of k"""
    signs = np.ones(tuple(shape))
    logs = np.zeros(tuple(shape))
    for axis, size in enumerate(shape):
        axis_signs, axis_logs = log_shifted_binom_table(shift, size)
        view = [1] * len(shape)
        view[axis] = size
        signs = signs * axis_signs.reshape(view)
        logs = logs + axis_logs.reshape(view)
    return signs, logs


def _log_abs(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values))


def _scaled(n: Sequence[int], log_prefactor: float, value: float) -> float:
    """``(-1)^{|n|} e^{log_prefactor} value``, combined in log space"""
    sign = -1.0 if sum(n) % 2 else 1.0
    magnitude = math.exp(log_prefactor + math.log(abs(value)))
    return sign * math.copysign(magnitude, value)


def luh_report(
    a: CoefficientArray, opts: Optional[TransformOptions] = None
) -> Tuple[CoefficientArray, TransformReport]:
    """
    :func:`luh` together with its :class:`TransformReport`

    Args:
        a (:class:`.CoefficientArray`): Laguerre coefficients
        opts (Optional[TransformOptions]) = None: Truncation, defaults apply

    Returns:
        Tuple[CoefficientArray, TransformReport]: Even Hermite coefficients (odd
            entries exactly 0) and the report
    """
    if a.basis != CoefficientArray.LAGUERRE:
        raise InvalidArgumentError(f"luh takes Laguerre coefficients, got {a.basis}")
    if a.is_complex:
        raise InvalidArgumentError("luh takes real coefficients")
    opts = opts or TransformOptions()
    d = a.dimension
    out_caps = opts.caps_for(d, [2 * cap for cap in a.caps])
    half_caps = tuple(cap // 2 for cap in out_caps)

    signs_a = np.sign(a.values)
    logs_a = _log_abs(a.values)
    binom_signs, binom_logs = _binomial_logs(0.5, [cap + 1 for cap in a.caps])
    input_truncated = not a.is_finitely_supported()

    out = np.zeros(tuple(cap + 1 for cap in out_caps))
    sums = []
    for n in enumerate_box(half_caps):
        if any(k > cap for k, cap in zip(n, a.caps)):
            continue
        window = tuple(slice(k, None) for k in n)
        box = tuple(slice(0, cap - k + 1) for k, cap in zip(n, a.caps))
        inner = _shell_sum(
            signs_a[window] * binom_signs[box],
            logs_a[window] + binom_logs[box],
            opts,
            input_truncated,
        )
        sums.append(inner)
        if inner.value == 0.0:
            continue
        n_arr = np.asarray(n, dtype=float)
        log_prefactor = (
            d / 4.0 * LOG_PI
            + 0.5 * float(np.sum(gammaln(2.0 * n_arr + 1.0)))
            - sum(n) * LOG_2
            - float(np.sum(gammaln(n_arr + 1.0)))
        )
        out[tuple(2 * k for k in n)] = _scaled(n, log_prefactor, inner.value)

    report = _summarize("luh", sums)
    meta = {"transform": "luh", "source": a.meta.get("source")}
    return CoefficientArray(CoefficientArray.HERMITE, out, meta), report


def luh(
    a: CoefficientArray, opts: Optional[TransformOptions] = None
) -> CoefficientArray:
    """
    Laguerre coefficients of ``f`` to the Hermite coefficients of ``f o v``

    Examples::

        luh(delta_0) == pi^{1/4} delta_0
        luh(delta_1) == (pi^{1/4}/2, 0, -pi^{1/4}/sqrt(2))
    """
    return luh_report(a, opts)[0]


def even_part_check(
    c: CoefficientArray, tolerance: float = PARITY_TOLERANCE
) -> Tuple[bool, float]:
    """
    Whether every Hermite entry with an odd component is negligible

    Returns:
        Tuple[bool, float]: ``(even, largest odd entry)``
    """
    largest = c.max_odd_entry()
    return largest <= tolerance, largest


def hul_report(
    b: CoefficientArray, opts: Optional[TransformOptions] = None
) -> Tuple[CoefficientArray, TransformReport]:
    """
    :func:`hul` together with its :class:`TransformReport`

    Raises:
        InvalidArgumentError: For non-Hermite input
        ParityError: If an odd entry exceeds :data:`PARITY_TOLERANCE`
    """
    if b.basis != CoefficientArray.HERMITE:
        raise InvalidArgumentError(f"hul takes Hermite coefficients, got {b.basis}")
    even, largest = even_part_check(b)
    if not even:
        raise ParityError(
            f"odd Hermite entries up to {largest:.3g} exceed {PARITY_TOLERANCE:g}: "
            "the function is not even in every coordinate"
        )
    if b.is_complex:
        raise InvalidArgumentError("hul takes real coefficients")
    opts = opts or TransformOptions()
    d = b.dimension
    even_caps = tuple(cap // 2 for cap in b.caps)
    out_caps = opts.caps_for(d, even_caps)

    # e_m = b_{2m}, with the factorial ratio m! / sqrt((2m)!) folded in
    e = b.values[tuple(slice(0, 2 * cap + 1, 2) for cap in even_caps)]
    m = np.indices(e.shape).astype(float)
    log_ratio = np.sum(gammaln(m + 1.0) - 0.5 * gammaln(2.0 * m + 1.0), axis=0)
    signs_e = np.sign(e)
    logs_e = _log_abs(e) + log_ratio

    binom_signs, binom_logs = _binomial_logs(1.5, e.shape)
    k = np.indices(e.shape)
    binom_logs = binom_logs + k.sum(axis=0) * LOG_2
    binom_signs = binom_signs * np.where(k.sum(axis=0) % 2, -1.0, 1.0)
    input_truncated = any(
        np.any(np.take(e, [-1], axis=axis) != 0) for axis in range(d)
    )

    out = np.zeros(tuple(cap + 1 for cap in out_caps))
    sums = []
    for n in enumerate_box(out_caps):
        if any(k_j > cap for k_j, cap in zip(n, even_caps)):
            continue
        window = tuple(slice(k_j, None) for k_j in n)
        box = tuple(slice(0, cap - k_j + 1) for k_j, cap in zip(n, even_caps))
        inner = _shell_sum(
            signs_e[window] * binom_signs[box],
            logs_e[window] + binom_logs[box],
            opts,
            input_truncated,
        )
        sums.append(inner)
        if inner.value == 0.0:
            continue
        log_prefactor = sum(n) * LOG_2 - d / 4.0 * LOG_PI
        out[n] = _scaled(n, log_prefactor, inner.value)

    report = _summarize("hul", sums)
    meta = {"transform": "hul", "source": b.meta.get("source")}
    return CoefficientArray(CoefficientArray.LAGUERRE, out, meta), report


def hul(
    b: CoefficientArray, opts: Optional[TransformOptions] = None
) -> CoefficientArray:
    """
    Even Hermite coefficients of ``g`` to the Laguerre coefficients of ``g o w``,
    ``w(x) = (sqrt(x_1), ..., sqrt(x_d))``; the inverse of :func:`luh`
    """
    return hul_report(b, opts)[0]


def compose_v(f: FunctionHandle) -> FunctionHandle:
    """``x -> f(x_1^2, ..., x_d^2)`` on R^d, even in every coordinate"""
    return FunctionHandle(
        f"({f.name}) o v",
        f.dimension,
        FunctionHandle.REAL,
        lambda points: f.evaluate(np.square(points)),
        {"composed": "v", "inner": f.to_dict()},
    )


def compose_w(f: FunctionHandle) -> FunctionHandle:
    """
    ``x -> f(sqrt(x_1), ..., sqrt(x_d))`` on the closed orthant

    The returned handle raises :class:`~lagexp.exceptions.DomainError` for
    negative coordinates.
    """

    def evaluator(points: np.ndarray) -> np.ndarray:
        if np.any(points < 0):
            raise DomainError("compose_w is defined on the closed orthant only")
        return f.evaluate(np.sqrt(points))

    return FunctionHandle(
        f"({f.name}) o w",
        f.dimension,
        FunctionHandle.ORTHANT,
        evaluator,
        {"composed": "w", "inner": f.to_dict()},
    )
