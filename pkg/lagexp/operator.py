"""
The Laguerre operator E and the Hermite operator H applied spectrally, the
eta norm ``sup_N ||E^N f|| / (h^N N!^alpha)`` and L^p norms of iterates.

Suprema over N are scanned in log space. The scan is *converged* once the last
:data:`ETA_WINDOW` supremands decrease and sit at least ``e^ETA_GAP`` below the
running maximum. Every truncated sequence eventually gives a converging scan, so
an array that reads as a truncated infinite sequence (see
:meth:`.CoefficientArray.is_finitely_supported`) must also pass a
truncation-stability test: dropping the top quarter of its degree shells may not
move the supremum.
"""
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import linregress

from lagexp.basis import laguerre_fn_table
from lagexp.catalog import FunctionHandle
from lagexp.exceptions import BoundaryProximityError, InvalidArgumentError
from lagexp.expansion import CoefficientArray, laguerre_coeffs, reconstruct
from lagexp.multiindex import as_multiindex
from lagexp.quadrature import (
    QUAD_MARGIN,
    QuadratureRule,
    gauss_laguerre_rule,
    lp_norm_on_rule,
    tensor_rule,
)


logger = logging.getLogger(__name__)
"""lagexp.operator log object"""

ETA_WINDOW = 5
"""Number of trailing supremands that must decrease"""

ETA_GAP = 5.0
"""Required ln-gap between the maximum and the last supremand"""

ETA_N_MAX = 60
"""Default last N of the scan"""

ETA_SCAN_LIMIT = 5000
"""Hard stop when a finitely supported array keeps the scan going"""

STABILITY_TOLERANCE = 1e-3
"""Relative change of the supremum allowed when the top degree shells are dropped"""

LogNorm = Callable[[int], float]


class EtaResult(object):
    """
    Result of an eta norm (or L^p analogue) scan

    Args:
        value (float): The supremum, ``inf`` when the scan does not certify it
        achieved_at (int): N at which the largest supremand was seen
        converged (bool): The supremands decayed over the trailing window
        finite (bool): Converged and stable under truncation of the top shells
        log_supremands (np.ndarray): ln of every scanned supremand
        observed (float): Largest supremand seen, even when not finite
    """

    def __init__(
        self,
        value: float,
        achieved_at: int,
        converged: bool,
        finite: bool,
        log_supremands: np.ndarray,
        observed: float,
    ) -> None:
        self.value = value
        self.achieved_at = achieved_at
        self.converged = converged
        self.finite = finite
        self.log_supremands = log_supremands
        self.observed = observed

    def to_dict(self) -> dict:
        return {
            "value": self.value if self.finite else "inf",
            "achieved_at": self.achieved_at,
            "converged": self.converged,
            "finite": self.finite,
            "observed": self.observed,
            "scanned": int(self.log_supremands.size),
        }

    def __repr__(self) -> str:
        return (
            f"EtaResult<value: {self.value}, achieved_at: {self.achieved_at}, "
            f"converged: {self.converged}, finite: {self.finite}>"
        )


def _check_power(N: int) -> None:
    if N < 0:
        raise InvalidArgumentError(f"operator power must be >= 0, got {N}")


def _require_basis(c: CoefficientArray, basis: str) -> None:
    if c.basis != basis:
        raise InvalidArgumentError(f"expected {basis} coefficients, got {c.basis}")


def apply_E_power(c: CoefficientArray, N: int) -> CoefficientArray:
    """
    ``E^N`` on Laguerre coefficients: ``c_n -> |n|^N c_n`` (``0^0 = 1``)

    Args:
        c (:class:`.CoefficientArray`): Laguerre coefficients
        N (int): Power, >= 0

    Returns:
        :class:`.CoefficientArray`: Coefficients of ``E^N f``
    """
    _require_basis(c, CoefficientArray.LAGUERRE)
    _check_power(N)
    factors = np.power(c.degrees().astype(float), N)
    return c.with_values(c.values * factors, {**c.meta, "operator": f"E^{N}"})


def apply_H_power(c: CoefficientArray, N: int) -> CoefficientArray:
    """``H^N`` on Hermite coefficients: ``c_n -> (2|n| + d)^N c_n``"""
    _require_basis(c, CoefficientArray.HERMITE)
    _check_power(N)
    factors = np.power(2.0 * c.degrees() + c.dimension, N)
    return c.with_values(c.values * factors, {**c.meta, "operator": f"H^{N}"})


def apply_E_finite_difference(
    f: FunctionHandle, grid: np.ndarray, step: float = 1e-3
) -> np.ndarray:
    """
    ``E f = -sum_j (x_j f_jj + f_j - x_j f / 4 + f / 2)`` by second order central
    differences

    Args:
        f (:class:`.FunctionHandle`): Function on the orthant
        grid (np.ndarray): (M, d) points, or M points in 1d
        step (float) = 1e-3: Difference step

    Returns:
        np.ndarray: M values

    Raises:
        BoundaryProximityError: If some ``x_j < 2 step``
    """
    points = np.asarray(grid, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if not step > 0:
        raise InvalidArgumentError(f"step must be > 0, got {step}")
    if np.any(points < 2.0 * step):
        raise BoundaryProximityError(
            f"grid reaches within {2.0 * step} of the boundary x_j = 0"
        )

    center = f.evaluate(points)
    total = np.zeros_like(center)
    for axis in range(points.shape[1]):
        shift = np.zeros_like(points)
        shift[:, axis] = step
        forward = f.evaluate(points + shift)
        backward = f.evaluate(points - shift)
        second = (forward - 2.0 * center + backward) / step ** 2
        first = (forward - backward) / (2.0 * step)
        x = points[:, axis]
        total += x * second + first - x * center / 4.0 + center / 2.0
    return -total


def _l2_log_norms(c: CoefficientArray) -> LogNorm:
    """``N -> ln ||E^N f||_{L^2} = ln (sum_n |c_n|^2 |n|^{2N})^{1/2}``"""
    nonzero = c.values != 0
    log_values = np.log(np.abs(c.values[nonzero]))
    degrees = c.degrees()[nonzero]
    positive = degrees > 0
    log_degrees = np.log(degrees[positive].astype(float))

    def log_norm(N: int) -> float:
        if N == 0:
            return 0.5 * float(logsumexp(2.0 * log_values))
        if not np.any(positive):
            return -np.inf
        terms = 2.0 * log_values[positive] + 2.0 * N * log_degrees
        return 0.5 * float(logsumexp(terms))

    return log_norm


def _settled(logs: List[float]) -> bool:
    if len(logs) < ETA_WINDOW:
        return False
    tail = logs[-ETA_WINDOW:]
    decreasing = all(
        math.isinf(b) and b < 0 or b < a for a, b in zip(tail[:-1], tail[1:])
    )
    return decreasing and max(logs) - tail[-1] >= ETA_GAP


def _scan(
    log_norm: LogNorm, h: float, alpha: float, n_max: int, extend: bool
) -> Tuple[np.ndarray, bool]:
    """Supremands for N = 0 .. n_max, continued up to the scan limit when extending"""
    logs: List[float] = []
    limit = max(ETA_SCAN_LIMIT, n_max) if extend else n_max
    log_h = math.log(h)
    for N in range(limit + 1):
        logs.append(log_norm(N) - N * log_h - alpha * float(gammaln(N + 1.0)))
        if N >= n_max and (not extend or _settled(logs)):
            break
    return np.array(logs), _settled(logs)


def _supremum(
    c: CoefficientArray,
    make_log_norm: Callable[[CoefficientArray], LogNorm],
    h: float,
    alpha: float,
    n_max: int,
    label: str,
) -> EtaResult:
    if not h > 0 or not alpha > 0:
        raise InvalidArgumentError(f"h and alpha must be > 0, got h={h}, alpha={alpha}")
    if n_max < 10:
        raise InvalidArgumentError(f"N_max must be >= 10, got {n_max}")
    if not np.any(c.values != 0):
        return EtaResult(0.0, 0, True, True, np.array([-np.inf]), 0.0)

    finite_support = c.is_finitely_supported()
    logs, converged = _scan(make_log_norm(c), h, alpha, n_max, finite_support)
    achieved = int(np.argmax(logs))
    peak = float(logs[achieved])

    stable = True
    if converged and not finite_support:
        top = int(sum(c.caps))
        keep = (3 * top) // 4
        shortened = c.with_values(np.where(c.degrees() <= keep, c.values, 0))
        # nothing left below the cut to compare against
        if keep < top and np.any(shortened.values != 0):
            short_logs, _ = _scan(make_log_norm(shortened), h, alpha, n_max, False)
            change = abs(math.expm1(float(np.max(short_logs)) - peak))
            stable = change <= STABILITY_TOLERANCE

    finite = converged and stable
    with np.errstate(over="ignore"):
        observed = float(np.exp(peak))
    if not converged:
        logger.warning(
            f"{label} supremum still growing at N={logs.size - 1} "
            f"(h={h}, alpha={alpha}): reported as infinite"
        )
    elif not stable:
        logger.warning(
            f"{label} supremum depends on the truncation degree (h={h}, "
            f"alpha={alpha}): reported as infinite"
        )
    return EtaResult(
        observed if finite else math.inf, achieved, converged, finite, logs, observed
    )


def eta_norm(
    c: CoefficientArray, h: float, alpha: float, N_max: int = ETA_N_MAX
) -> EtaResult:
    """
    ``sup_{N >= 0} (sum_n |c_n|^2 |n|^{2N})^{1/2} / (h^N N!^alpha)``

    N runs over the non-negative integers, so ``eta(l_0) = 1``.

    Args:
        c (:class:`.CoefficientArray`): Laguerre coefficients
        h (float): > 0
        alpha (float): > 0
        N_max (int) = 60: Last N scanned, >= 10. Finitely supported arrays are
            scanned further until the supremands decay.

    Returns:
        :class:`.EtaResult`: Value, maximizing N and convergence flags
    """
    _require_basis(c, CoefficientArray.LAGUERRE)
    return _supremum(c, _l2_log_norms, h, alpha, N_max, "eta")


def _laguerre_rule(rule: QuadratureRule) -> None:
    if rule.kind != QuadratureRule.LAGUERRE:
        raise InvalidArgumentError(f"a laguerre rule is required, got {rule.kind}")


def _lp_of_series(c: CoefficientArray, p: float, rule: QuadratureRule) -> float:
    if rule.order <= max(c.caps):
        raise InvalidArgumentError(
            f"rule order {rule.order} cannot resolve degree {max(c.caps)}"
        )
    points, weights = tensor_rule(rule, c.dimension)
    values = np.asarray(reconstruct(c, points))
    if np.isinf(p):
        origin = reconstruct(c, np.zeros((1, c.dimension)))
        return float(max(np.max(np.abs(values)), np.max(np.abs(origin))))
    return lp_norm_on_rule(values, weights, p)


def _as_laguerre(
    f: Union[FunctionHandle, CoefficientArray], rule: QuadratureRule
) -> CoefficientArray:
    if isinstance(f, CoefficientArray):
        _require_basis(f, CoefficientArray.LAGUERRE)
        return f
    caps = rule.order - QUAD_MARGIN
    if caps < 0:
        raise InvalidArgumentError(
            f"rule order {rule.order} leaves no degrees after the {QUAD_MARGIN} margin"
        )
    return laguerre_coeffs(f, caps, m=rule.order)


def lp_iterate_norm(
    f: Union[FunctionHandle, CoefficientArray], N: int, p: float, rule: QuadratureRule
) -> float:
    """
    ``||E^N f||_{L^p}`` by spectral application followed by quadrature of
    ``|.|^p``, or a sup over the nodes and the origin when ``p = inf``

    Args:
        f (Union[FunctionHandle, CoefficientArray]): Function, expanded up to
            degree ``rule.order - QUAD_MARGIN``, or its Laguerre coefficients
        N (int): Power of E
        p (float): In [1, inf]
        rule (:class:`.QuadratureRule`): Gauss-Laguerre rule
    """
    _laguerre_rule(rule)
    if p < 1:
        raise InvalidArgumentError(f"p must be >= 1, got {p}")
    return _lp_of_series(apply_E_power(_as_laguerre(f, rule), N), p, rule)


def lp_basis_norm(
    n: Union[int, Sequence[int]], p: float, rule: QuadratureRule
) -> float:
    """
    ``||l_n||_{L^p}`` as the product of the one dimensional norms

    The sup norm is taken over the nodes and the origin, where ``|l_k(0)| = 1``.
    """
    _laguerre_rule(rule)
    if p < 1:
        raise InvalidArgumentError(f"p must be >= 1, got {p}")
    norm = 1.0
    for k in as_multiindex(n):
        values = np.abs(laguerre_fn_table(k, rule.nodes)[k])
        if np.isinf(p):
            norm *= max(1.0, float(np.max(values)))
        else:
            norm *= float(np.sum(rule.lifted_weights * values ** p) ** (1.0 / p))
    return norm


def _lp_log_norms(
    p: float, rule: QuadratureRule
) -> Callable[[CoefficientArray], LogNorm]:
    def make(c: CoefficientArray) -> LogNorm:
        def log_norm(N: int) -> float:
            iterate = apply_E_power(c, N)
            scale = float(np.max(np.abs(iterate.values)))
            if scale == 0:
                return -np.inf
            norm = _lp_of_series(iterate.with_values(iterate.values / scale), p, rule)
            return math.log(norm) + math.log(scale) if norm > 0 else -np.inf

        return log_norm

    return make


def lp_eta_verdict(
    c: CoefficientArray,
    h: float,
    alpha: float,
    p: float,
    rule: Optional[QuadratureRule] = None,
    N_max: int = ETA_N_MAX,
) -> EtaResult:
    """
    ``sup_N ||E^N f||_{L^p} / (h^N N!^alpha)``, the L^p form of :func:`eta_norm`,
    scanned with the same convergence and truncation-stability rules

    Args:
        c (:class:`.CoefficientArray`): Laguerre coefficients of f
        h (float): > 0
        alpha (float): > 0
        p (float): In [1, inf]; ``p = 2`` uses Parseval
        rule (Optional[:class:`.QuadratureRule`]) = None: Gauss-Laguerre rule,
            defaults to order ``max(caps) + QUAD_MARGIN``
        N_max (int) = 60: Last N scanned
    """
    _require_basis(c, CoefficientArray.LAGUERRE)
    if p < 1:
        raise InvalidArgumentError(f"p must be >= 1, got {p}")
    if p == 2:
        return eta_norm(c, h, alpha, N_max)
    if rule is None:
        rule = gauss_laguerre_rule(max(c.caps) + QUAD_MARGIN)
    _laguerre_rule(rule)
    return _supremum(c, _lp_log_norms(p, rule), h, alpha, N_max, f"L^{p} eta")


def log_gs2_sup(s: float, alpha: float, N_max: Optional[int] = None) -> float:
    """
    ``ln sup_{0 <= n <= N_max} s^n / n!^alpha``

    Args:
        s (float): >= 0
        alpha (float): > 0
        N_max (Optional[int]) = None: Defaults to ``2 s^{1/alpha} + 10``, past the
            maximizer ``n ~ s^{1/alpha}``
    """
    if s < 0 or not alpha > 0:
        raise InvalidArgumentError(
            f"need s >= 0 and alpha > 0, got s={s}, alpha={alpha}"
        )
    if s == 0:
        return 0.0
    if N_max is None:
        N_max = int(math.ceil(2.0 * s ** (1.0 / alpha))) + 10
    n = np.arange(N_max + 1, dtype=float)
    return float(np.max(n * math.log(s) - alpha * gammaln(n + 1.0)))


def gs2_sup(s: float, alpha: float, N_max: Optional[int] = None) -> float:
    """``sup_n s^n / n!^alpha`` (may overflow to ``inf``, see :func:`log_gs2_sup`)"""
    with np.errstate(over="ignore"):
        return float(np.exp(log_gs2_sup(s, alpha, N_max)))


def gs2_exponent_fit(
    alpha: float, s_values: Optional[np.ndarray] = None
) -> Tuple[float, float, float]:
    """
    Regress ``ln gs2_sup(s, alpha)`` on ``s^{1/alpha}``

    Args:
        alpha (float): > 0
        s_values (Optional[np.ndarray]) = None: Defaults to 100 points evenly spaced
            in [1, 100]

    Returns:
        Tuple[float, float, float]: ``(slope, intercept, r^2)``
    """
    s = np.linspace(1.0, 100.0, 100) if s_values is None else np.asarray(s_values)
    logs = np.array([log_gs2_sup(float(v), alpha) for v in s])
    fit = linregress(s ** (1.0 / alpha), logs)
    logger.debug(f"GS2 fit alpha={alpha}: slope {fit.slope:.6g}, r {fit.rvalue:.8f}")
    return float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2)
