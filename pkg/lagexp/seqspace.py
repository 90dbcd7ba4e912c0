"""
Weighted sequence spaces of expansion coefficients.

A :class:`WeightSpec` describes ``theta(n)``: the power weights
``e^{h |n|^{1/(2 alpha)}}``, the flat weights ``h^{|n|} (n!)^{1/(2 sigma)}``, the
polynomial weights ``(1 + |n|)^k`` of rapidly decreasing sequences, or no weight
at all for finitely supported sequences. Membership of a truncated sequence can
only be observed, never proven: every verdict here is a diagnostic computed from
the per-shell envelope ``max_{|n| = s} |c_n| theta(n)`` over the complete shells.
"""
from __future__ import annotations

import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from lxml import etree
from lxml.builder import E
from scipy.special import gammaln, logsumexp
from scipy.stats import linregress

from lagexp.exceptions import DegenerateFitError, DivergenceError, InvalidArgumentError
from lagexp.expansion import CoefficientArray
from lagexp.multiindex import as_multiindex


logger = logging.getLogger(__name__)
"""lagexp.seqspace log object"""

ROUMIEU_LADDER = (0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0)
"""h values tried for Roumieu targets, the largest passing one is the witness"""

BEURLING_LADDER = (1.0, 2.0, 4.0, 8.0)
"""h values that must all pass for Beurling targets"""

FLAT_LADDER = (1.0, 2.0, 4.0, 8.0)
"""
h values for flat targets. Rungs below 1 are left out: at desk caps the factor
``h^{|n|}`` would hide the factorial growth of the weight.
"""

SCHWARTZ_POWERS = (1, 2, 4, 8, 16)
"""Polynomial weight exponents that must all pass for the Schwartz target"""

TAIL_WINDOW = 5
"""Number of trailing shells inspected by the tail tests"""

MONOTONE_RUN = 10
"""Consecutive non-increasing entries that mark the start of a fitted tail"""

MIN_FIT_POINTS = 20
"""Fewest tail points a decay fit accepts"""

BEURLING_ALPHA_RATIO = 0.9
"""A Beurling(alpha) member must fit a decay exponent below this fraction of alpha"""

DIVERGENCE_SLOPE = -1e-3
"""Largest fitted log-slope of the pairing tail that still counts as summable"""


def _tolerance(values: np.ndarray) -> float:
    finite = values[np.isfinite(values)]
    scale = float(np.max(np.abs(finite))) if finite.size else 0.0
    return 1e-9 * max(1.0, scale)


class WeightSpec(object):
    """
    A weight family with its parameters

    Use the constructors :meth:`power`, :meth:`flat`, :meth:`polynomial` and
    :meth:`finite_support`.

    Args:
        family (str): One of :attr:`FAMILIES`
        h (float) = 1.0: Scale parameter
        alpha (Optional[float]) = None: Power weight exponent parameter
        sigma (Optional[float]) = None: Flat weight parameter
        k (Optional[float]) = None: Polynomial weight exponent
    """

    POWER = "power"
    FLAT = "flat"
    POLYNOMIAL = "polynomial"
    FINITE_SUPPORT = "finite_support"
    FAMILIES = (POWER, FLAT, POLYNOMIAL, FINITE_SUPPORT)

    def __init__(
        self,
        family: str,
        h: float = 1.0,
        alpha: Optional[float] = None,
        sigma: Optional[float] = None,
        k: Optional[float] = None,
    ) -> None:
        if family not in self.FAMILIES:
            raise InvalidArgumentError(f"unknown weight family: {family}")
        if not h > 0:
            raise InvalidArgumentError(f"h must be > 0, got {h}")
        for name, value in (("alpha", alpha), ("sigma", sigma)):
            if value is not None and not value > 0:
                raise InvalidArgumentError(f"{name} must be > 0, got {value}")
        if family == self.POWER and alpha is None:
            raise InvalidArgumentError("power weights need alpha")
        if family == self.FLAT and sigma is None:
            raise InvalidArgumentError("flat weights need sigma")
        if family == self.POLYNOMIAL and (k is None or k < 0):
            raise InvalidArgumentError(f"polynomial weights need k >= 0, got {k}")

        self.family = family
        self.h = float(h)
        self.alpha = alpha
        self.sigma = sigma
        self.k = k

    @classmethod
    def power(cls, alpha: float, h: float) -> WeightSpec:
        return cls(cls.POWER, h=h, alpha=alpha)

    @classmethod
    def flat(cls, sigma: float, h: float) -> WeightSpec:
        return cls(cls.FLAT, h=h, sigma=sigma)

    @classmethod
    def polynomial(cls, k: float) -> WeightSpec:
        return cls(cls.POLYNOMIAL, k=k)

    @classmethod
    def finite_support(cls) -> WeightSpec:
        return cls(cls.FINITE_SUPPORT)

    def log_weights(self, shape: Sequence[int]) -> np.ndarray:
        """``ln theta(n)`` for every n of a box of the given shape"""
        indices = np.indices(tuple(shape))
        degrees = indices.sum(axis=0).astype(float)
        if self.family == self.POWER:
            return self.h * degrees ** (1.0 / (2.0 * self.alpha))
        if self.family == self.FLAT:
            log_factorials = gammaln(indices + 1.0).sum(axis=0)
            return degrees * math.log(self.h) + log_factorials / (2.0 * self.sigma)
        if self.family == self.POLYNOMIAL:
            return self.k * np.log1p(degrees)
        return np.zeros(degrees.shape)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"family": self.family}
        if self.family in (self.POWER, self.FLAT):
            data["h"] = self.h
        for name in ("alpha", "sigma", "k"):
            if getattr(self, name) is not None:
                data[name] = getattr(self, name)
        return data

    def __repr__(self) -> str:
        params = ", ".join(f"{k}: {v}" for k, v in self.to_dict().items())
        return f"WeightSpec<{params}>"


def weight_value(spec: WeightSpec, n: Union[int, Sequence[int]]) -> float:
    """
    ``theta(n)`` computed from its logarithm

    Args:
        spec (:class:`.WeightSpec`): Weight family
        n (Union[int, Sequence[int]]): Multi-index

    Returns:
        float: The weight, ``inf`` past the largest double
    """
    index = as_multiindex(n)
    logs = spec.log_weights(tuple(k + 1 for k in index))
    with np.errstate(over="ignore"):
        return float(np.exp(logs[index]))


def _weighted_logs(c: CoefficientArray, spec: WeightSpec, inverse: bool) -> np.ndarray:
    sign = -1.0 if inverse else 1.0
    return c.log_magnitudes() + sign * spec.log_weights(c.values.shape)


def _complete_shell_max(c: CoefficientArray, logs: np.ndarray) -> np.ndarray:
    shells = np.full(c.complete_shells() + 1, -np.inf)
    degrees = c.degrees()
    inside = degrees <= c.complete_shells()
    np.maximum.at(shells, degrees[inside], logs[inside])
    return shells


class RungResult(object):
    """
    Outcome of one weighted-norm test

    Args:
        spec (:class:`.WeightSpec`): Weight tested
        log_norm (float): ln of the weighted ell^p norm over the stored entries
        infinite (bool): The weighted terms grow at the caps
        passed (bool): Finite with a non-increasing weighted tail
        tail (np.ndarray): ln of the weighted shell maxima over the tail window
    """

    def __init__(
        self,
        spec: WeightSpec,
        log_norm: float,
        infinite: bool,
        passed: bool,
        tail: np.ndarray,
    ) -> None:
        self.spec = spec
        self.log_norm = log_norm
        self.infinite = infinite
        self.passed = passed
        self.tail = tail

    @property
    def tail_slope(self) -> float:
        """Mean change of the log-envelope per shell over the tail window"""
        finite = self.tail[np.isfinite(self.tail)]
        if finite.size < 2:
            return -math.inf
        return float((finite[-1] - finite[0]) / (finite.size - 1))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weight": self.spec.to_dict(),
            "log_norm": self.log_norm if not self.infinite else "inf",
            "passed": self.passed,
            "tail_slope": self.tail_slope,
        }

    def __repr__(self) -> str:
        return (
            f"RungResult<spec: {self.spec!r}, passed: {self.passed}, "
            f"infinite: {self.infinite}>"
        )


def _rung(
    c: CoefficientArray, spec: WeightSpec, p: float = math.inf, inverse: bool = False
) -> RungResult:
    if p < 1:
        raise InvalidArgumentError(f"p must be >= 1, got {p}")
    logs = _weighted_logs(c, spec, inverse)
    finite_entries = logs[np.isfinite(logs)]
    if finite_entries.size == 0:
        log_norm = -math.inf
    elif math.isinf(p):
        log_norm = float(np.max(finite_entries))
    else:
        log_norm = float(logsumexp(p * finite_entries)) / p

    if c.is_finitely_supported():
        return RungResult(spec, log_norm, False, True, np.array([-np.inf]))

    shells = _complete_shell_max(c, logs)
    tail = shells[-TAIL_WINDOW:]
    tolerance = _tolerance(shells)
    increasing = tail[-1] > tail[0] + tolerance
    infinite = bool(
        increasing and int(np.argmax(shells)) >= shells.size - TAIL_WINDOW
    )
    non_increasing = bool(np.all(tail[1:] <= tail[:-1] + tolerance))
    return RungResult(spec, log_norm, infinite, non_increasing and not infinite, tail)


def weighted_norm(
    c: CoefficientArray, spec: WeightSpec, p: float = math.inf, inverse: bool = False
) -> float:
    """
    ``||{|c_n| theta(n)^{+-1}}||_{ell^p}`` over the stored indices

    Args:
        c (:class:`.CoefficientArray`): Coefficients
        spec (:class:`.WeightSpec`): Weight
        p (float) = inf: Exponent in [1, inf]
        inverse (bool) = False: Divide by the weight instead (dual spaces)

    Returns:
        float: The norm, or ``inf`` when the weighted terms still grow at the caps
    """
    rung = _rung(c, spec, p, inverse)
    if rung.infinite:
        return math.inf
    with np.errstate(over="ignore"):
        return float(np.exp(rung.log_norm))


def is_member_at(
    c: CoefficientArray, spec: WeightSpec, p: float = math.inf
) -> RungResult:
    """
    Test one weight: finite weighted norm and a non-increasing weighted tail over
    the last :data:`TAIL_WINDOW` complete shells
    """
    return _rung(c, spec, p)


class NormEquivalence(object):
    """
    Constants of ``C1 ||c||_{inf,h1} <= ||c||_{2,h} <= C2 ||c||_{inf,h2}`` at the
    stored truncation

    Args:
        h (float): The middle parameter
        h1 (float): Lower-side parameter
        h2 (float): Upper-side parameter
        c1 (float): Lower-side constant
        c2 (float): Upper-side constant
        norms (Tuple[float, float, float]): The three norms, lower to upper
        conclusive (bool): False when the sequence lacks the decay to compare
        message (str): Explanation
    """

    def __init__(
        self,
        h: float,
        h1: float,
        h2: float,
        c1: float,
        c2: float,
        norms: Tuple[float, float, float],
        conclusive: bool,
        message: str,
    ) -> None:
        self.h = h
        self.h1 = h1
        self.h2 = h2
        self.c1 = c1
        self.c2 = c2
        self.norms = norms
        self.conclusive = conclusive
        self.message = message

    @property
    def holds(self) -> bool:
        """Both inequalities hold (up to rounding) at the truncation"""
        lower, middle, upper = self.norms
        slack = 1e-12 * max(1.0, middle)
        return (
            self.conclusive
            and self.c1 * lower <= middle + slack
            and middle <= self.c2 * upper + slack
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "h": self.h,
            "h1": self.h1,
            "h2": self.h2,
            "c1": self.c1,
            "c2": self.c2,
            "norms": list(self.norms),
            "conclusive": self.conclusive,
            "holds": self.holds,
            "message": self.message,
        }

    def __repr__(self) -> str:
        return (
            f"NormEquivalence<h1: {self.h1}, h2: {self.h2}, c1: {self.c1}, "
            f"c2: {self.c2}, conclusive: {self.conclusive}>"
        )


def norm_equivalence_check(
    c: CoefficientArray, alpha: float, h: float
) -> NormEquivalence:
    """
    Find parameters and constants comparing the ell^2 and ell^inf power-weighted
    norms of ``c``

    The lower side takes ``h1 = h`` and ``C1 = 1``. The upper side takes the first
    ``h2`` in ``h * (1.25, 1.5, 2)`` with a finite ell^inf norm and
    ``C2 = (sum_n e^{-2 (h2 - h) |n|^{1/(2 alpha)}})^{1/2}`` over the stored n.

    Args:
        c (:class:`.CoefficientArray`): Coefficients
        alpha (float): Power weight parameter
        h (float): Middle parameter

    Returns:
        :class:`.NormEquivalence`: Inconclusive when ``c`` lacks decay
    """
    middle_spec = WeightSpec.power(alpha, h)
    middle = weighted_norm(c, middle_spec, p=2)
    lower = weighted_norm(c, middle_spec, p=math.inf)

    if c.is_finitely_supported():
        support = int(np.count_nonzero(c.values))
        return NormEquivalence(
            h, h, h, 1.0, math.sqrt(max(support, 1)), (lower, middle, lower), True,
            "finitely supported: any h works",
        )
    if math.isinf(middle):
        return NormEquivalence(
            h, h, h, 1.0, math.inf, (lower, middle, math.inf), False,
            "the ell^2 norm at h is not finite at the truncation",
        )

    degrees = c.degrees().astype(float) ** (1.0 / (2.0 * alpha))
    for factor in (1.25, 1.5, 2.0):
        h2 = h * factor
        upper = weighted_norm(c, WeightSpec.power(alpha, h2), p=math.inf)
        if math.isinf(upper):
            continue
        c2 = math.sqrt(float(np.sum(np.exp(-2.0 * (h2 - h) * degrees))))
        return NormEquivalence(
            h, h, h2, 1.0, c2, (lower, middle, upper), True,
            f"ell^inf norm finite at h2 = {h2}",
        )
    logger.warning(f"No h2 > {h} keeps the ell^inf norm finite: inconclusive")
    return NormEquivalence(
        h, h, math.inf, 1.0, math.inf, (lower, middle, math.inf), False,
        "no tested h2 > h keeps the ell^inf norm finite",
    )


class DecayProfile(object):
    """
    Fitted decay ``|a_n| ~ e^{-h |n|^{1/(2 alpha)}}``

    Args:
        alpha_hat (float): Fitted alpha
        h_hat (float): Fitted h
        fit_quality (float): r^2 of the regression
        tail_start (int): First degree used
        points (int): Number of degrees used
    """

    def __init__(
        self,
        alpha_hat: float,
        h_hat: float,
        fit_quality: float,
        tail_start: int,
        points: int,
    ) -> None:
        self.alpha_hat = alpha_hat
        self.h_hat = h_hat
        self.fit_quality = fit_quality
        self.tail_start = tail_start
        self.points = points

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha_hat": self.alpha_hat,
            "h_hat": self.h_hat,
            "fit_quality": self.fit_quality,
            "tail_start": self.tail_start,
            "points": self.points,
        }

    def to_xml(self) -> etree:
        return E.profile(
            *[E(key, str(value)) for key, value in self.to_dict().items()]
        )

    def __repr__(self) -> str:
        return (
            f"DecayProfile<alpha_hat: {self.alpha_hat:.6g}, h_hat: {self.h_hat:.6g}, "
            f"fit_quality: {self.fit_quality:.6g}, tail_start: {self.tail_start}>"
        )


def _tail_start(degrees: np.ndarray, logs: np.ndarray) -> int:
    tolerance = _tolerance(logs)
    usable = (degrees >= 1) & np.isfinite(logs) & (logs < 0)
    for start in range(degrees.size - MONOTONE_RUN + 1):
        window = slice(start, start + MONOTONE_RUN)
        if not np.all(usable[window]):
            continue
        if np.all(np.diff(logs[window]) <= tolerance):
            return int(degrees[start])
    raise DegenerateFitError(
        f"no run of {MONOTONE_RUN} non-increasing magnitudes below 1"
    )


def fit_decay_profile(
    degrees: Sequence[float],
    log_magnitudes: Sequence[float],
    tail_start: Optional[int] = None,
) -> DecayProfile:
    """
    Fit ``ln ln (1/|a|)`` against ``ln |n|``: the slope is ``1/(2 alpha)`` and the
    intercept ``ln h``

    Args:
        degrees (Sequence[float]): Increasing degrees
        log_magnitudes (Sequence[float]): ``ln |a|`` at each degree
        tail_start (Optional[int]) = None: First degree used, found from the first
            run of :data:`MONOTONE_RUN` non-increasing entries when not given

    Returns:
        :class:`.DecayProfile`: Fitted parameters

    Raises:
        DegenerateFitError: With fewer than 20 usable points, a non-monotone tail
            or a non-decaying fit
    """
    deg = np.asarray(degrees, dtype=float)
    logs = np.asarray(log_magnitudes, dtype=float)
    if deg.shape != logs.shape:
        raise InvalidArgumentError("degrees and magnitudes differ in length")

    start = _tail_start(deg, logs) if tail_start is None else int(tail_start)
    selected = (deg >= max(start, 1)) & np.isfinite(logs)
    if np.any(logs[selected] >= 0):
        raise DegenerateFitError("tail magnitudes must be below 1")
    if np.count_nonzero(selected) < MIN_FIT_POINTS:
        raise DegenerateFitError(
            f"{np.count_nonzero(selected)} tail points, need {MIN_FIT_POINTS}"
        )
    tail = logs[selected]
    if np.any(np.diff(tail) > _tolerance(tail)):
        raise DegenerateFitError("tail magnitudes are not monotone")

    fit = linregress(np.log(deg[selected]), np.log(-tail))
    if not fit.slope > 0:
        raise DegenerateFitError(f"fitted slope {fit.slope} shows no decay")
    profile = DecayProfile(
        1.0 / (2.0 * fit.slope),
        math.exp(fit.intercept),
        float(fit.rvalue ** 2),
        start,
        int(np.count_nonzero(selected)),
    )
    logger.debug(f"Fitted {profile!r}")
    return profile


def fit_decay(c: CoefficientArray, tail_start: Optional[int] = None) -> DecayProfile:
    """
    :func:`fit_decay_profile` on the per-shell envelope ``max_{|n| = s} |c_n|``
    over the complete shells

    Raises:
        DegenerateFitError: For finitely supported arrays and every condition of
            :func:`fit_decay_profile`
    """
    if c.is_finitely_supported():
        raise DegenerateFitError("finitely supported coefficients have no decay rate")
    shells = c.shell_max()[: c.complete_shells() + 1]
    return fit_decay_profile(np.arange(shells.size), shells, tail_start)


def classify_growth(
    u: CoefficientArray, tail_start: Optional[int] = None
) -> DecayProfile:
    """
    Growth profile of dual-side coefficients: ``|u_n| ~ e^{h |n|^{1/(2 alpha)}}``,
    fitted as the decay of ``1/|u_n|``
    """
    shells = u.shell_max()[: u.complete_shells() + 1]
    return fit_decay_profile(np.arange(shells.size), -shells, tail_start)


class Target(object):
    """
    A classification target

    Args:
        kind (str): One of :attr:`KINDS`
        parameter (Optional[float]) = None: alpha or sigma where the kind has one
    """

    ROUMIEU = "roumieu"
    BEURLING = "beurling"
    FLAT_ROUMIEU = "flat-r"
    FLAT_BEURLING = "flat-b"
    SCHWARTZ = "schwartz"
    FINITE = "finite"
    KINDS = (ROUMIEU, BEURLING, FLAT_ROUMIEU, FLAT_BEURLING, SCHWARTZ, FINITE)
    PARAMETRIZED = (ROUMIEU, BEURLING, FLAT_ROUMIEU, FLAT_BEURLING)

    def __init__(self, kind: str, parameter: Optional[float] = None) -> None:
        if kind not in self.KINDS:
            raise InvalidArgumentError(f"unknown target: {kind}")
        if kind in self.PARAMETRIZED and (parameter is None or not parameter > 0):
            raise InvalidArgumentError(f"{kind} needs a positive parameter")
        self.kind = kind
        self.parameter = float(parameter) if kind in self.PARAMETRIZED else None

    @classmethod
    def parse(cls, text: str) -> Target:
        """Parse ``roumieu:0.5``, ``flat-b:1``, ``schwartz`` or ``finite``"""
        kind, _, value = text.strip().partition(":")
        if kind in cls.PARAMETRIZED:
            try:
                return cls(kind, float(value))
            except ValueError as err:
                raise InvalidArgumentError(f"bad target parameter: {text!r}") from err
        if value:
            raise InvalidArgumentError(f"{kind} takes no parameter: {text!r}")
        return cls(kind)

    def weight(self, h: float) -> WeightSpec:
        if self.kind in (self.ROUMIEU, self.BEURLING):
            return WeightSpec.power(self.parameter, h)
        return WeightSpec.flat(self.parameter, h)

    def __str__(self) -> str:
        if self.parameter is None:
            return self.kind
        return f"{self.kind}:{self.parameter:g}"

    def __repr__(self) -> str:
        return f"Target<kind: {self.kind}, parameter: {self.parameter}>"


class Decision(object):
    """
    A membership verdict at the stored truncation

    Args:
        target (:class:`.Target`): What was tested
        member (str): :attr:`YES`, :attr:`NO` or :attr:`INCONCLUSIVE`
        witness_h (Optional[float]): Largest passing h for parametrized targets
        diagnostics (str): Human readable explanation
        rungs (List[:class:`.RungResult`]): Every weight tested
        profile (Optional[:class:`.DecayProfile`]) = None: Fitted decay, if any
    """

    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"

    def __init__(
        self,
        target: Target,
        member: str,
        witness_h: Optional[float],
        diagnostics: str,
        rungs: List[RungResult],
        profile: Optional[DecayProfile] = None,
    ) -> None:
        self.target = target
        self.member = member
        self.witness_h = witness_h
        self.diagnostics = diagnostics
        self.rungs = rungs
        self.profile = profile

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": str(self.target),
            "member": self.member,
            "witness_h": self.witness_h,
            "diagnostics": self.diagnostics,
            "residuals": [rung.to_dict() for rung in self.rungs],
            "profile": self.profile.to_dict() if self.profile else None,
        }

    def to_xml(self) -> etree:
        """
        Convert to an XML tree

        Returns:
            :class:`lxml.etree`: Decision as XML tree
        """
        residuals = [
            E.rung(
                str(rung.passed).lower(),
                weight=rung.spec.family,
                h=str(rung.spec.h),
                tail_slope=str(rung.tail_slope),
            )
            for rung in self.rungs
        ]
        children = [
            E.target(str(self.target)),
            E.member(self.member),
            E.diagnostics(self.diagnostics),
            E.residuals(*residuals),
        ]
        if self.witness_h is not None:
            children.insert(2, E.witness_h(str(self.witness_h)))
        if self.profile is not None:
            children.append(self.profile.to_xml())
        return E.decision(*children)

    def summary(self) -> str:
        witness = "" if self.witness_h is None else f" (witness h = {self.witness_h:g})"
        return f"{self.target}: {self.member}{witness}. {self.diagnostics}"

    def __repr__(self) -> str:
        return (
            f"Decision<target: {self.target}, member: {self.member}, "
            f"witness_h: {self.witness_h}>"
        )


def _profile_or_none(c: CoefficientArray) -> Tuple[Optional[DecayProfile], str]:
    try:
        return fit_decay(c), ""
    except DegenerateFitError as err:
        return None, f" Decay fit unavailable: {err}."


def classify(c: CoefficientArray, target: Union[Target, str]) -> Decision:
    """
    Decide membership of ``c`` in the sequence space of ``target``

    * Roumieu / flat Roumieu: some rung of the ladder passes
      (:func:`is_member_at`); the witness is the largest passing h.
    * Beurling: every rung of :data:`BEURLING_LADDER` passes and, when a decay
      fit is possible, the fitted alpha is below ``0.9 alpha``.
    * Flat Beurling: every rung of :data:`FLAT_LADDER` passes and the top rung's
      tail strictly decreases.
    * Schwartz: every polynomial weight of :data:`SCHWARTZ_POWERS` passes.
    * Finite support: the support stays strictly inside the caps.

    Finitely supported arrays are members of every target.

    Args:
        c (:class:`.CoefficientArray`): Coefficients
        target (Union[Target, str]): Target or its textual form

    Returns:
        :class:`.Decision`: Verdict with per-rung residuals
    """
    goal = Target.parse(target) if isinstance(target, str) else target

    if c.is_finitely_supported():
        witness = None
        if goal.kind in (Target.ROUMIEU, Target.BEURLING):
            witness = ROUMIEU_LADDER[-1]
        elif goal.kind in (Target.FLAT_ROUMIEU, Target.FLAT_BEURLING):
            witness = FLAT_LADDER[-1]
        return Decision(
            goal, Decision.YES, witness,
            f"finitely supported, support degree {c.support_degree()}", [],
        )
    if goal.kind == Target.FINITE:
        return Decision(goal, Decision.NO, None, "tail runs up to the caps", [])
    if c.complete_shells() + 1 < TAIL_WINDOW:
        return Decision(
            goal, Decision.INCONCLUSIVE, None,
            f"only {c.complete_shells() + 1} complete shells stored", [],
        )

    profile, note = _profile_or_none(c)

    if goal.kind == Target.SCHWARTZ:
        rungs = [is_member_at(c, WeightSpec.polynomial(k)) for k in SCHWARTZ_POWERS]
        failed = [rung.spec.k for rung in rungs if not rung.passed]
        if failed:
            return Decision(
                goal, Decision.NO, None, f"polynomial weights {failed} fail.{note}",
                rungs, profile,
            )
        return Decision(
            goal, Decision.YES, None, f"every polynomial weight passes.{note}",
            rungs, profile,
        )

    ladder = ROUMIEU_LADDER if goal.kind == Target.ROUMIEU else FLAT_LADDER
    if goal.kind == Target.BEURLING:
        ladder = BEURLING_LADDER
    rungs = [is_member_at(c, goal.weight(h)) for h in ladder]
    passing = [rung.spec.h for rung in rungs if rung.passed]

    if goal.kind in (Target.ROUMIEU, Target.FLAT_ROUMIEU):
        if passing:
            return Decision(
                goal, Decision.YES, max(passing),
                f"weighted tail non-increasing for h in {passing}.{note}",
                rungs, profile,
            )
        return Decision(
            goal, Decision.NO, None, f"no h in {list(ladder)} passes.{note}",
            rungs, profile,
        )

    if len(passing) < len(ladder):
        failed = [h for h in ladder if h not in passing]
        return Decision(
            goal, Decision.NO, max(passing) if passing else None,
            f"h in {failed} fail.{note}", rungs, profile,
        )

    if goal.kind == Target.FLAT_BEURLING:
        top = rungs[-1].tail
        if np.all(np.diff(top) < 0):
            return Decision(
                goal, Decision.YES, ladder[-1],
                f"every h passes and the top rung still decreases.{note}",
                rungs, profile,
            )
        return Decision(
            goal, Decision.INCONCLUSIVE, ladder[-1],
            f"every h passes but the top rung tail is flat.{note}", rungs, profile,
        )

    bound = BEURLING_ALPHA_RATIO * goal.parameter
    if profile is not None and profile.alpha_hat >= bound:
        return Decision(
            goal, Decision.INCONCLUSIVE, ladder[-1],
            f"every h passes but the fitted alpha {profile.alpha_hat:.4g} does not "
            f"extrapolate below {goal.parameter:g}.{note}",
            rungs, profile,
        )
    return Decision(
        goal, Decision.YES, ladder[-1], f"every h in {list(ladder)} passes.{note}",
        rungs, profile,
    )


class Pairing(object):
    """
    Value of ``sum_n u_n f_n`` at the stored truncation

    Args:
        value (Union[float, complex]): The sum over the common index box
        tail_estimate (float): Geometric estimate of ``sum |u_n f_n|`` beyond the
            caps, 0 when the terms vanish before the caps
    """

    def __init__(self, value: Union[float, complex], tail_estimate: float) -> None:
        self.value = value
        self.tail_estimate = tail_estimate

    def to_dict(self) -> Dict[str, Any]:
        value: Any = self.value
        if isinstance(value, complex):
            value = [value.real, value.imag]
        return {"value": value, "tail_estimate": self.tail_estimate}

    def __repr__(self) -> str:
        return f"Pairing<value: {self.value}, tail_estimate: {self.tail_estimate:.3g}>"


def pairing_with_tail(u: CoefficientArray, f: CoefficientArray) -> Pairing:
    """
    ``sum_n u_n f_n`` over the common index box, with a convergence guard

    The shell sums ``A_s = sum_{|n| = s} |u_n f_n|`` over the last half of the
    complete shells must fall geometrically: their fitted log-slope has to be
    below :data:`DIVERGENCE_SLOPE`. The fitted ratio also extrapolates the
    remainder beyond the caps. A product that vanishes before the caps passes
    with a zero remainder.

    Raises:
        InvalidArgumentError: For different bases or dimensions
        DivergenceError: When the tail does not decay
    """
    if u.basis != f.basis or u.dimension != f.dimension:
        raise InvalidArgumentError(
            f"cannot pair {u.basis}/{u.dimension}d with {f.basis}/{f.dimension}d"
        )
    caps = tuple(min(a, b) for a, b in zip(u.caps, f.caps))
    product = u.truncated(caps).values * f.truncated(caps).values
    total = np.sum(product)
    remainder = 0.0

    terms = CoefficientArray(u.basis, product)
    if not terms.is_finitely_supported():
        degrees = terms.degrees()
        complete = terms.complete_shells()
        inside = degrees <= complete
        sums = np.zeros(complete + 1)
        np.add.at(sums, degrees[inside], np.abs(product[inside]))
        shells = np.arange(complete // 2, complete + 1)
        tail = sums[shells]
        usable = tail > 0
        if np.count_nonzero(usable) >= 3:
            fit = linregress(shells[usable], np.log(tail[usable]))
            if not fit.slope < DIVERGENCE_SLOPE:
                raise DivergenceError(
                    f"pairing terms do not decay: fitted log-slope {fit.slope:.3g}"
                )
            ratio = math.exp(fit.slope)
            remainder = float(tail[usable][-1] * ratio / (1.0 - ratio))
            logger.debug(f"Pairing tail beyond the caps estimated at {remainder:.3g}")

    value = total.item()
    return Pairing(value if isinstance(value, complex) else float(value), remainder)


def dual_pairing(
    u: CoefficientArray, f: CoefficientArray
) -> Union[float, complex]:
    """
    The value of :func:`pairing_with_tail`

    Raises:
        InvalidArgumentError: For different bases or dimensions
        DivergenceError: When the tail does not decay
    """
    return pairing_with_tail(u, f).value


class InclusionReport(object):
    """
    Membership matrix of canonical sequences across targets laid out in inclusion
    order (each space is contained in the ones to its right)

    Args:
        columns (List[str]): Targets, smallest space first
        rows (Dict[str, List[str]]): Sequence name to verdicts per column
        decisions (Dict[str, List[Decision]]): The full decisions
    """

    def __init__(
        self,
        columns: List[str],
        rows: Dict[str, List[str]],
        decisions: Dict[str, List[Decision]],
    ) -> None:
        self.columns = columns
        self.rows = rows
        self.decisions = decisions

    @property
    def monotone(self) -> bool:
        """No row has a yes followed by a no"""
        for verdicts in self.rows.values():
            seen_yes = False
            for verdict in verdicts:
                if verdict == Decision.YES:
                    seen_yes = True
                elif verdict == Decision.NO and seen_yes:
                    return False
        return True

    @property
    def strict_witness(self) -> bool:
        """``e^{-n}`` is in the alpha = 1/2 space and in no flat space"""
        row = dict(zip(self.columns, self.rows[EXPONENTIAL_WITNESS]))
        flats = [col for col in self.columns if col.startswith(Target.FLAT_ROUMIEU)]
        return row["roumieu:0.5"] == Decision.YES and all(
            row[col] == Decision.NO for col in flats
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "columns": self.columns,
            "rows": self.rows,
            "monotone": self.monotone,
            "strict_witness": self.strict_witness,
        }

    def table(self) -> str:
        """Plain text rendering of the matrix"""
        width = max(len(name) for name in self.rows) + 2
        lines = [" " * width + " ".join(f"{col:>12}" for col in self.columns)]
        for name, verdicts in self.rows.items():
            lines.append(
                f"{name:<{width}}" + " ".join(f"{v:>12}" for v in verdicts)
            )
        return "\n".join(lines)

    def __repr__(self) -> str:
        return (
            f"InclusionReport<rows: {len(self.rows)}, monotone: {self.monotone}, "
            f"strict_witness: {self.strict_witness}>"
        )


EXPONENTIAL_WITNESS = "exp(-n)"
"""Row name of the sequence separating the flat spaces from alpha = 1/2"""

INCLUSION_COLUMNS = (
    Target(Target.ROUMIEU, 0.25),
    Target(Target.FLAT_ROUMIEU, 0.5),
    Target(Target.FLAT_ROUMIEU, 1.0),
    Target(Target.FLAT_ROUMIEU, 2.0),
    Target(Target.ROUMIEU, 0.5),
    Target(Target.ROUMIEU, 1.0),
    Target(Target.ROUMIEU, 2.0),
)
"""Targets of the inclusion demo, smallest space first"""


def inclusion_witnesses(caps: int = 64) -> Dict[str, CoefficientArray]:
    """The canonical sequences of the inclusion demo, one dimensional"""
    laguerre = CoefficientArray.LAGUERRE

    def factorial_decay(s: int) -> float:
        return math.exp(s * math.log(0.5) - float(gammaln(s + 1.0)))

    return {
        "(1/2)^n/n!": CoefficientArray.from_degrees(laguerre, caps, factorial_decay),
        EXPONENTIAL_WITNESS: CoefficientArray.from_degrees(
            laguerre, caps, lambda s: math.exp(-s)
        ),
        "exp(-sqrt(n))": CoefficientArray.from_degrees(
            laguerre, caps, lambda s: math.exp(-math.sqrt(s))
        ),
    }


def flat_inclusion_demo(
    caps: int = 64, witnesses: Optional[Dict[str, CoefficientArray]] = None
) -> InclusionReport:
    """
    Classify the canonical sequences against every target of
    :data:`INCLUSION_COLUMNS`

    Args:
        caps (int) = 64: Truncation of the built-in witnesses
        witnesses (Optional[Dict[str, CoefficientArray]]) = None: Replace the
            built-in sequences

    Returns:
        :class:`.InclusionReport`: The membership matrix
    """
    sequences = witnesses if witnesses is not None else inclusion_witnesses(caps)
    columns = [str(target) for target in INCLUSION_COLUMNS]
    rows: Dict[str, List[str]] = {}
    decisions: Dict[str, List[Decision]] = {}
    for name, c in sequences.items():
        verdicts = [classify(c, target) for target in INCLUSION_COLUMNS]
        decisions[name] = verdicts
        rows[name] = [decision.member for decision in verdicts]
        logger.info(f"{name}: {rows[name]}")
    report = InclusionReport(columns, rows, decisions)
    if not report.monotone:
        logger.warning("Membership matrix is not monotone along the inclusion order")
    return report
