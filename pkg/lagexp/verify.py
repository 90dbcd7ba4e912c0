"""
Registry of numerical invariants run by ``lagexp verify``.

Each check computes one measured value and compares it with a fixed threshold.
Checks are grouped in suites (``basis`` also carries the multiindex, quadrature,
expansion and file-format checks) and reported as CSV rows sorted by id.
"""
import csv
import json
import logging
import math
import operator as op
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, TextIO

import numpy as np
from scipy.stats import linregress

from lagexp.basis import (
    hermite_fn_table,
    hermite_laguerre_relation,
    laguerre_fn_derivative,
    laguerre_fn_table,
)
from lagexp.catalog import (
    hermite_combination,
    hermite_handle,
    laguerre_combination,
    laguerre_handle,
    parse_catalog,
)
from lagexp.exceptions import DivergenceError, LagexpError
from lagexp.expansion import (
    CoefficientArray,
    hermite_coeffs,
    laguerre_coeffs,
    parseval_residual,
    reconstruct,
    series_handle,
)
from lagexp.multiindex import enumerate_upto, graded_key, half_binom, log_factorial
from lagexp.operator import (
    apply_E_finite_difference,
    apply_E_power,
    eta_norm,
    gs2_exponent_fit,
    gs2_sup,
    lp_basis_norm,
    lp_eta_verdict,
)
from lagexp.quadrature import gauss_hermite_rule, gauss_laguerre_rule, rule_moment
from lagexp.seqspace import (
    Decision,
    Target,
    WeightSpec,
    classify,
    dual_pairing,
    fit_decay_profile,
    flat_inclusion_demo,
    weighted_norm,
)
from lagexp.transform import compose_v, compose_w, hul, luh


logger = logging.getLogger(__name__)
"""lagexp.verify log object"""

SUITES = ("basis", "operator", "transform", "seqspace")
"""Every suite, ``all`` runs them together"""

REPORT_COLUMNS = (
    "suite",
    "invariant_id",
    "paper_anchor",
    "measured",
    "threshold",
    "pass",
)
"""Fixed CSV header of the report"""

ETA_LADDER = (0.5, 1.0, 2.0)
"""h values tried for eta verdicts: h^{1/alpha} stays well below the caps"""

_COMPARISONS: Dict[str, Callable[[float, float], bool]] = {
    "<": op.lt,
    "<=": op.le,
    ">": op.gt,
    ">=": op.ge,
    "==": op.eq,
}

_SUITE_OF_MODULE = {
    "multiindex": "basis",
    "basis": "basis",
    "quadrature": "basis",
    "expansion": "basis",
    "cli": "basis",
    "operator": "operator",
    "transform": "transform",
    "seqspace": "seqspace",
}


class Row(object):
    """
    One line of the verification report

    Args:
        suite (str): Suite the check belongs to
        invariant_id (str): Stable identifier, ``<module>.<name>``
        anchor (str): Statement the check exercises
        measured (float): Measured value, ``nan`` when the check raised
        threshold (float): Bound compared against
        passed (bool): Outcome
    """

    def __init__(
        self,
        suite: str,
        invariant_id: str,
        anchor: str,
        measured: float,
        threshold: float,
        passed: bool,
    ) -> None:
        self.suite = suite
        self.invariant_id = invariant_id
        self.anchor = anchor
        self.measured = measured
        self.threshold = threshold
        self.passed = passed

    def to_list(self) -> List[str]:
        return [
            self.suite,
            self.invariant_id,
            self.anchor,
            f"{self.measured:.6g}",
            f"{self.threshold:g}",
            "pass" if self.passed else "fail",
        ]

    def __repr__(self) -> str:
        return (
            f"Row<invariant_id: {self.invariant_id}, measured: {self.measured:.6g}, "
            f"passed: {self.passed}>"
        )


class Check(object):
    """
    A registered invariant

    Args:
        invariant_id (str): ``<module>.<name>``
        anchor (str): Statement the check exercises
        threshold (float): Bound
        comparison (str): One of ``<``, ``<=``, ``>``, ``>=``, ``==``; the check
            passes when ``measured <comparison> threshold``
        measure (Callable[[], float]): Computes the measured value
    """

    def __init__(
        self,
        invariant_id: str,
        anchor: str,
        threshold: float,
        comparison: str,
        measure: Callable[[], float],
    ) -> None:
        self.invariant_id = invariant_id
        self.suite = _SUITE_OF_MODULE[invariant_id.split(".")[0]]
        self.anchor = anchor
        self.threshold = threshold
        self.comparison = comparison
        self.measure = measure

    def run(self) -> Row:
        logger.debug(f"Running {self.invariant_id}")
        try:
            measured = float(self.measure())
        except LagexpError as err:
            logger.error(f"{self.invariant_id} raised {type(err).__name__}: {err}")
            measured = math.nan
        passed = not math.isnan(measured) and _COMPARISONS[self.comparison](
            measured, self.threshold
        )
        if not passed:
            logger.warning(
                f"{self.invariant_id} failed: {measured:.6g} {self.comparison} "
                f"{self.threshold:g} does not hold"
            )
        return Row(
            self.suite, self.invariant_id, self.anchor, measured, self.threshold, passed
        )

    def __repr__(self) -> str:
        return (
            f"Check<invariant_id: {self.invariant_id}, "
            f"threshold: {self.comparison} {self.threshold:g}>"
        )


REGISTRY: Dict[str, Check] = {}
"""Every check by invariant id"""


def invariant(
    invariant_id: str, anchor: str, threshold: float, comparison: str = "<"
) -> Callable[[Callable[[], float]], Callable[[], float]]:
    """Register the decorated function as the measurement of a check"""

    def register(measure: Callable[[], float]) -> Callable[[], float]:
        if invariant_id in REGISTRY:
            raise ValueError(f"duplicate invariant id: {invariant_id}")
        REGISTRY[invariant_id] = Check(
            invariant_id, anchor, threshold, comparison, measure
        )
        return measure

    return register


def checks_for(suite: str = "all") -> List[Check]:
    """Checks of one suite, or of every suite for ``all``, sorted by id"""
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite: {suite}")
    selected = [c for c in REGISTRY.values() if suite in ("all", c.suite)]
    return sorted(selected, key=lambda check: check.invariant_id)


def run_suite(suite: str = "all", jobs: int = 1) -> List[Row]:
    """
    Run every check of a suite

    Args:
        suite (str) = "all": One of :data:`SUITES` or ``all``
        jobs (int) = 1: Worker threads, rows come back sorted by id regardless

    Returns:
        List[Row]: One row per check
    """
    checks = checks_for(suite)
    logger.info(f"Running {len(checks)} checks of suite {suite} with {jobs} job(s)")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(Check.run, checks))
    else:
        rows = [check.run() for check in checks]
    return sorted(rows, key=lambda row: row.invariant_id)


def write_report(rows: Sequence[Row], stream: TextIO) -> None:
    """Write the CSV report with the :data:`REPORT_COLUMNS` header"""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow(row.to_list())


# Shared fixtures


def _laguerre_sequence(caps: int, fn: Callable[[int], float]) -> CoefficientArray:
    return CoefficientArray.from_degrees(CoefficientArray.LAGUERRE, caps, fn)


def characterization_catalog() -> Dict[str, CoefficientArray]:
    """
    Sequences spanning members and non-members of the alpha = 1/2 and 1 classes
    """
    sparse = np.zeros(65)
    sparse[3], sparse[5] = 1.0, 0.5
    return {
        "exp(-n)": _laguerre_sequence(64, lambda s: math.exp(-s)),
        "exp(-n^2/4)": _laguerre_sequence(40, lambda s: math.exp(-s * s / 4.0)),
        "exp(-sqrt(n))": _laguerre_sequence(64, lambda s: math.exp(-math.sqrt(s))),
        "1/(1+n)^2": _laguerre_sequence(64, lambda s: 1.0 / (1.0 + s) ** 2),
        "delta_3+0.5delta_5": CoefficientArray(CoefficientArray.LAGUERRE, sparse),
        "2^(-n)": _laguerre_sequence(64, lambda s: 2.0 ** -s),
    }


def _eta_finite(c: CoefficientArray, alpha: float) -> bool:
    return any(eta_norm(c, h, alpha).finite for h in ETA_LADDER)


def _roumieu_member(c: CoefficientArray, alpha: float) -> bool:
    return classify(c, Target(Target.ROUMIEU, alpha)).member == Decision.YES


# multiindex


@invariant(
    "multiindex.graded_order",
    "enumeration strictly increasing in graded-lex order",
    0,
    "==",
)
def _graded_order() -> float:
    violations = 0
    for d, s in ((1, 10), (2, 8), (3, 6)):
        keys = [graded_key(n) for n in enumerate_upto(d, s)]
        violations += sum(1 for a, b in zip(keys, keys[1:]) if not a < b)
    return violations


@invariant(
    "multiindex.half_binom_exact",
    "generalized binomials against rational products",
    1e-12,
)
def _half_binom_exact() -> float:
    worst = 0.0
    for gamma in (Fraction(1, 2), Fraction(-1, 2), Fraction(3, 2), Fraction(-3, 2)):
        exact = Fraction(1)
        for m in range(21):
            if m > 0:
                exact *= (gamma - m + 1) / m
            value = half_binom(float(gamma), m)
            if exact == 0:
                worst = max(worst, abs(value))
            else:
                worst = max(worst, abs(value - float(exact)) / abs(float(exact)))
    return worst


@invariant(
    "multiindex.log_factorial_exact",
    "exp(log n!) against exact factorials",
    1e-13,
)
def _log_factorial_exact() -> float:
    return max(
        abs(math.exp(log_factorial(n)) - math.factorial(n)) / math.factorial(n)
        for n in range(21)
    )


# basis


def _gram_deviation(table: np.ndarray, weights: np.ndarray) -> float:
    gram = (table * weights) @ table.T
    return float(np.max(np.abs(gram - np.eye(table.shape[0]))))


@invariant(
    "basis.laguerre_orthonormality",
    "Laguerre functions form an orthonormal basis",
    1e-10,
)
def _laguerre_orthonormality() -> float:
    rule = gauss_laguerre_rule(120)
    return _gram_deviation(laguerre_fn_table(40, rule.nodes), rule.lifted_weights)


@invariant(
    "basis.hermite_orthonormality",
    "Hermite functions form an orthonormal basis",
    1e-10,
)
def _hermite_orthonormality() -> float:
    rule = gauss_hermite_rule(120)
    return _gram_deviation(hermite_fn_table(40, rule.nodes), rule.lifted_weights)


_BOUND_GRID = np.logspace(-3.0, math.log10(200.0), 600)


@invariant(
    "basis.pointwise_bound",
    "|x^k l_n(x)| <= 4^k (n+1)...(n+k)",
    1.0,
    "<=",
)
def _pointwise_bound() -> float:
    table = np.abs(laguerre_fn_table(40, _BOUND_GRID))
    worst = 0.0
    for k in range(6):
        for n in range(41):
            bound = 4.0 ** k * math.prod(range(n + 1, n + k + 1))
            worst = max(worst, float(np.max(_BOUND_GRID ** k * table[n])) / bound)
    return worst


@invariant(
    "basis.derivative_bound",
    "|x^k l_n'(x)| <= C_k (1+n)^{k+1}, C_k = 4^k",
    1.0,
    "<=",
)
def _derivative_bound() -> float:
    worst = 0.0
    for n in range(41):
        derivative = np.abs(laguerre_fn_derivative(n, _BOUND_GRID))
        for k in range(4):
            scale = 4.0 ** k * (1.0 + n) ** (k + 1)
            worst = max(worst, float(np.max(_BOUND_GRID ** k * derivative)) / scale)
    return worst


def _relation_error(parity: str) -> float:
    grid = np.linspace(-5.0, 5.0, 201)
    worst = 0.0
    for n in range(9):
        sides = np.array([hermite_laguerre_relation(n, x, parity) for x in grid])
        scale = float(np.max(np.abs(sides[:, 0])))
        worst = max(worst, float(np.max(np.abs(sides[:, 0] - sides[:, 1]))) / scale)
    return worst


@invariant(
    "basis.hermite_laguerre_even",
    "H_2n(x) = (-1)^n 2^2n n! L_n^{-1/2}(x^2)",
    1e-10,
)
def _hermite_laguerre_even() -> float:
    return _relation_error("even")


@invariant(
    "basis.hermite_laguerre_odd",
    "H_2n+1(x) = c (-1)^n 2^2n n! L_n^{1/2}(x^2) x with calibrated c",
    1e-10,
)
def _hermite_laguerre_odd() -> float:
    return _relation_error("odd")


# quadrature


@invariant(
    "quadrature.exactness",
    "m-point Gauss-Laguerre integrates x^k e^-x exactly for k <= 2m-1",
    1e-12,
)
def _quadrature_exactness() -> float:
    worst = 0.0
    for m in (5, 20, 80):
        rule = gauss_laguerre_rule(m)
        for k in range(2 * m):
            exact = float(math.factorial(k))
            worst = max(worst, abs(rule_moment(rule, k) - exact) / exact)
    return worst


_PLATEAU_CATALOG = ("exp(-x)", "x*exp(-x/2)", "x^2*exp(-x)", "lin:1,0,0.5")


@invariant(
    "quadrature.node_plateau",
    "coefficients settle once m >= n + 40",
    1e-10,
)
def _node_plateau() -> float:
    worst = 0.0
    for spec in _PLATEAU_CATALOG:
        f = parse_catalog(spec)
        low = laguerre_coeffs(f, 20, m=60).values
        high = laguerre_coeffs(f, 20, m=80).values
        worst = max(worst, float(np.max(np.abs(low - high))))
    return worst


# expansion


@invariant(
    "expansion.parseval",
    "sum |a_n|^2 = ||f||^2 for finite expansions",
    1e-10,
)
def _parseval() -> float:
    residuals = [
        parseval_residual(f, laguerre_coeffs(f, 8))
        for f in map(parse_catalog, ("l:3", "lin:1,0,0.5", "x*exp(-x/2)"))
    ]
    residuals += [
        parseval_residual(f, hermite_coeffs(f, 8))
        for f in map(parse_catalog, ("h:2", "hlin:1,0,0.3"))
    ]
    return max(abs(r) for r in residuals)


@invariant(
    "expansion.idempotence",
    "expanding a partial sum returns its coefficients",
    1e-10,
)
def _idempotence() -> float:
    one = _laguerre_sequence(10, lambda s: (-0.7) ** s)
    two = CoefficientArray.from_degrees(
        CoefficientArray.LAGUERRE, (4, 4), lambda s: 0.5 ** s, dimension=2
    )
    worst = 0.0
    for c in (one, two):
        again = laguerre_coeffs(series_handle(c), c.caps)
        worst = max(worst, float(np.max(np.abs(again.values - c.values))))
    return worst


@invariant(
    "expansion.rapid_decay",
    "E^N f in L^2 for all N gives |a_n| <= C_N (1+n)^-N, fitted order >= 6",
    6.0,
    ">=",
)
def _rapid_decay() -> float:
    c = laguerre_coeffs(parse_catalog("x^2*exp(-x)"), 25)
    n = np.arange(5, 26)
    fit = linregress(np.log1p(n), np.log(np.abs(c.values[5:26])))
    return -float(fit.slope)


# file format


@invariant(
    "cli.file_roundtrip",
    "coefficient files round-trip byte for byte",
    0,
    "==",
)
def _file_roundtrip() -> float:
    real = laguerre_coeffs(parse_catalog("exp(-x)"), 16)
    imag = CoefficientArray(
        CoefficientArray.HERMITE, np.array([1.0 + 0.5j, -0.25j, 1e-300 + 0j])
    )
    changed = 0
    for c in (real, imag):
        text = c.to_json()
        again = CoefficientArray.from_json(json.loads(text)).to_json()
        changed += int(text != again)
    return changed


@invariant(
    "cli.deterministic",
    "identical inputs give identical outputs",
    0,
    "==",
)
def _deterministic() -> float:
    f = parse_catalog("x*exp(-x^2/2)")
    first = hermite_coeffs(f, 12).to_json()
    second = hermite_coeffs(f, 12).to_json()
    a = _laguerre_sequence(12, lambda s: 2.0 ** -s)
    return int(first != second) + int(luh(a).to_json() != luh(a).to_json())


# operator


@invariant(
    "operator.spectral_vs_fd",
    "E applied spectrally agrees with the differential expression",
    1e-4,
)
def _spectral_vs_fd() -> float:
    c = _laguerre_sequence(10, lambda s: 1.0 / (s + 1.0))
    grid = np.linspace(0.5, 20.0, 40)
    spectral = np.asarray(reconstruct(apply_E_power(c, 1), grid))
    difference = apply_E_finite_difference(series_handle(c), grid, step=1e-3)
    return float(np.max(np.abs(difference - spectral)) / np.max(np.abs(spectral)))


@invariant(
    "operator.eigenrelation",
    "E^N l_n = |n|^N l_n",
    1e-5,
)
def _eigenrelation() -> float:
    grid = np.linspace(0.5, 20.0, 80)
    table = laguerre_fn_table(10, grid)
    worst = 0.0
    for n in range(11):
        difference = apply_E_finite_difference(laguerre_handle([n]), grid, step=1e-3)
        scale = max(n, 1) * float(np.max(np.abs(table[n])))
        worst = max(worst, float(np.max(np.abs(difference - n * table[n]))) / scale)
    return worst


@invariant(
    "operator.eta_members",
    "e^{-h|n|^{1/alpha}} coefficients give a finite eta norm for some h",
    0,
    "==",
)
def _eta_members() -> float:
    members = {
        0.5: _laguerre_sequence(40, lambda s: math.exp(-s * s / 4.0)),
        1.0: _laguerre_sequence(64, lambda s: math.exp(-s)),
    }
    return sum(1 for alpha, c in members.items() if not _eta_finite(c, alpha))


@invariant(
    "operator.eta_polynomial",
    "polynomially decaying coefficients give no finite eta norm, alpha <= 2",
    0,
    "==",
)
def _eta_polynomial() -> float:
    c = _laguerre_sequence(64, lambda s: 1.0 / (1.0 + s) ** 2)
    return sum(
        1
        for alpha in (0.5, 1.0, 1.5, 2.0)
        for h in ETA_LADDER
        if eta_norm(c, h, alpha).finite
    )


@invariant(
    "operator.eta_classify_agreement",
    "eta finiteness at alpha matches sequence space membership at alpha/2",
    0,
    "==",
)
def _eta_classify_agreement() -> float:
    disagreements = 0
    for name, c in characterization_catalog().items():
        for alpha in (0.5, 1.0):
            eta, member = _eta_finite(c, alpha), _roumieu_member(c, alpha / 2.0)
            if eta != member:
                logger.info(f"{name}, alpha={alpha}: eta {eta}, classify {member}")
                disagreements += 1
    return disagreements


@invariant(
    "operator.lp_equivalence",
    "finiteness of sup_N ||E^N f||_p / (h^N N!^alpha) does not depend on p",
    0,
    "==",
)
def _lp_equivalence() -> float:
    disagreements = 0
    for name, c in characterization_catalog().items():
        for alpha in (0.5, 1.0):
            verdicts = [
                any(lp_eta_verdict(c, h, alpha, p).finite for h in ETA_LADDER)
                for p in (1.0, 2.0, math.inf)
            ]
            if len(set(verdicts)) > 1:
                logger.info(f"{name}, alpha={alpha}: p = 1, 2, inf give {verdicts}")
                disagreements += 1
    return disagreements


@invariant(
    "operator.lp_basis_bound",
    "||l_n||_p <= C n^2 with C fitted on n <= 10",
    1.0,
    "<=",
)
def _lp_basis_bound() -> float:
    rule = gauss_laguerre_rule(200)
    worst = 0.0
    for p in (1.0, 2.0, 4.0, math.inf):
        norms = {n: lp_basis_norm(n, p, rule) for n in range(1, 61)}
        constant = max(norms[n] / n ** 2 for n in range(1, 11))
        worst = max(
            worst, max(norms[n] / (constant * n ** 2) for n in range(11, 61))
        )
    return worst


@invariant(
    "operator.gs2_fit",
    "ln sup_n s^n / n!^alpha is linear in s^{1/alpha}",
    0.999,
    ">",
)
def _gs2_fit() -> float:
    return min(gs2_exponent_fit(alpha)[2] for alpha in (0.5, 1.0, 2.0))


@invariant(
    "operator.gs2_examples",
    "sup_n s^n / n!^alpha at s = 0, 1, 2",
    1e-12,
)
def _gs2_examples() -> float:
    cases = ((0.0, 1.0, 1.0), (2.0, 1.0, 2.0), (1.0, 0.5, 1.0), (1.0, 3.0, 1.0))
    return max(abs(gs2_sup(s, alpha) - expected) for s, alpha, expected in cases)


# transform


_PI_QUARTER = math.pi ** 0.25


@invariant(
    "transform.luh_delta0",
    "luh of l_0 is pi^{1/4} h_0",
    1e-12,
)
def _luh_delta0() -> float:
    b = luh(CoefficientArray.delta(CoefficientArray.LAGUERRE, 4, 0))
    expected = np.zeros(b.values.shape)
    expected[0] = _PI_QUARTER
    return float(np.max(np.abs(b.values - expected)))


@invariant(
    "transform.luh_delta1",
    "luh of l_1 is pi^{1/4} (h_0 / 2 - h_2 / sqrt 2)",
    1e-10,
)
def _luh_delta1() -> float:
    b = luh(CoefficientArray.delta(CoefficientArray.LAGUERRE, 4, 1))
    expected = np.zeros(b.values.shape)
    expected[0], expected[2] = _PI_QUARTER / 2.0, -_PI_QUARTER / math.sqrt(2.0)
    return float(np.max(np.abs(b.values - expected)))


@invariant(
    "transform.hul_delta0",
    "hul of h_0 is pi^{-1/4} l_0",
    1e-12,
)
def _hul_delta0() -> float:
    a = hul(CoefficientArray.delta(CoefficientArray.HERMITE, 8, 0))
    expected = np.zeros(a.values.shape)
    expected[0] = 1.0 / _PI_QUARTER
    return float(np.max(np.abs(a.values - expected)))


@invariant(
    "transform.oracle_luh",
    "luh of the Laguerre coefficients of f equals the Hermite coefficients of f o v",
    1e-8,
)
def _oracle_luh() -> float:
    functions = [laguerre_handle([n]) for n in range(3)]
    functions.append(laguerre_combination([1.0, 0.0, 0.0, 0.5]))
    worst = 0.0
    for f in functions:
        b = luh(laguerre_coeffs(f, 8))
        oracle = hermite_coeffs(compose_v(f), b.caps)
        worst = max(worst, float(np.max(np.abs(b.values - oracle.values))))
    return worst


@invariant(
    "transform.oracle_hul",
    "hul of the Hermite coefficients of even g equals the Laguerre coefficients "
    "of g o w",
    1e-8,
)
def _oracle_hul() -> float:
    functions = [
        hermite_handle([0]),
        hermite_handle([2]),
        hermite_combination([1.0, 0.0, 0.0, 0.0, 0.3]),
    ]
    worst = 0.0
    for g in functions:
        a = hul(hermite_coeffs(g, 8))
        oracle = laguerre_coeffs(compose_w(g), a.caps)
        worst = max(worst, float(np.max(np.abs(a.values - oracle.values))))
    return worst


@invariant(
    "transform.round_trip_geometric",
    "hul o luh is the identity on 2^-n",
    1e-8,
)
def _round_trip_geometric() -> float:
    a = _laguerre_sequence(24, lambda s: 2.0 ** -s)
    return float(np.max(np.abs(hul(luh(a)).values - a.values)))


@invariant(
    "transform.round_trip_finite",
    "hul o luh is the identity on finitely supported sequences",
    1e-8,
)
def _round_trip_finite() -> float:
    worst = 0.0
    lag = CoefficientArray.LAGUERRE
    inputs = [CoefficientArray.delta(lag, 13, k) for k in range(13)]
    inputs.append(_laguerre_sequence(13, lambda s: (-0.8) ** s if s <= 12 else 0.0))
    for a in inputs:
        worst = max(worst, float(np.max(np.abs(hul(luh(a)).values - a.values))))
    return worst


def _fitted_alpha(degrees: np.ndarray, magnitudes: np.ndarray) -> float:
    return fit_decay_profile(degrees, np.log(magnitudes), tail_start=10).alpha_hat


@invariant(
    "transform.decay_preservation",
    "luh keeps the decay class of its input",
    0.15,
)
def _decay_preservation() -> float:
    models: List[Callable[[int], float]] = [
        lambda s, a=alpha: math.exp(-8.0 * s ** (1.0 / (2.0 * a)))
        for alpha in (0.5, 1.0, 2.0)
    ]
    models += [
        lambda s, sigma=sigma: math.exp(-math.lgamma(s + 1.0) / (2.0 * sigma))
        for sigma in (0.5, 1.0)
    ]
    n = np.arange(61)
    worst = 0.0
    for model in models:
        a = _laguerre_sequence(120, model)
        b = luh(a)
        before = _fitted_alpha(n, np.abs(a.values[:61]))
        after = _fitted_alpha(n, np.abs(b.values[: 2 * 61 : 2]))
        worst = max(worst, abs(after - before) / before)
    return worst


@invariant(
    "transform.parity",
    "luh output is even: odd entries are exactly zero",
    0,
    "==",
)
def _parity() -> float:
    largest = 0.0
    for a in characterization_catalog().values():
        largest = max(largest, luh(a).max_odd_entry())
    return largest


# seqspace


_MONOTONE_ALPHAS = (0.25, 0.5, 1.0, 2.0)


@invariant(
    "seqspace.monotone_targets",
    "membership in Roumieu(alpha) implies membership for every beta > alpha",
    0,
    "==",
)
def _monotone_targets() -> float:
    violations = 0
    for c in characterization_catalog().values():
        verdicts = [_roumieu_member(c, alpha) for alpha in _MONOTONE_ALPHAS]
        violations += sum(1 for a, b in zip(verdicts, verdicts[1:]) if a and not b)
    return violations


@invariant(
    "seqspace.norm_family_verdict",
    "ell^2 and ell^inf weighted norms give the same verdict up to the choice of h",
    0,
    "==",
)
def _norm_family_verdict() -> float:
    disagreements = 0
    ladder = (0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0)
    for c in characterization_catalog().values():
        for alpha in (0.5, 1.0):
            verdicts = [
                any(
                    math.isfinite(weighted_norm(c, WeightSpec.power(alpha, h), p))
                    for h in ladder
                )
                for p in (2.0, math.inf)
            ]
            disagreements += int(verdicts[0] != verdicts[1])
    return disagreements


def _model_fit_errors() -> List[float]:
    n = np.arange(100, 2001, dtype=float)
    errors = []
    for alpha, h in ((0.25, 0.5), (0.5, 1.0), (1.0, 2.0), (2.0, 3.0)):
        profile = fit_decay_profile(n, -h * n ** (1.0 / (2.0 * alpha)))
        alpha_error = abs(profile.alpha_hat / alpha - 1.0)
        errors.append((alpha_error, abs(profile.h_hat / h - 1.0)))
    return errors


@invariant(
    "seqspace.fit_alpha",
    "decay fit recovers alpha of model sequences",
    0.10,
)
def _fit_alpha() -> float:
    return max(error for error, _ in _model_fit_errors())


@invariant(
    "seqspace.fit_h",
    "decay fit recovers h of model sequences",
    0.15,
)
def _fit_h() -> float:
    return max(error for _, error in _model_fit_errors())


@invariant(
    "seqspace.pairing_bilinear",
    "the dual pairing is bilinear",
    1e-12,
)
def _pairing_bilinear() -> float:
    u = _laguerre_sequence(60, lambda s: 1.1 ** s)
    f = _laguerre_sequence(60, lambda s: math.exp(-s))
    g = _laguerre_sequence(60, lambda s: (-1.0) ** s * math.exp(-s / 2.0))
    scale = 2.5
    combined = f.with_values(scale * f.values + g.values)
    expected = scale * dual_pairing(u, f) + dual_pairing(u, g)
    return abs(dual_pairing(u, combined) - expected)


@invariant(
    "seqspace.pairing_value",
    "sum_n n e^-n = e / (e - 1)^2",
    1e-10,
)
def _pairing_value() -> float:
    u = _laguerre_sequence(60, float)
    f = _laguerre_sequence(60, lambda s: math.exp(-s))
    return abs(dual_pairing(u, f) - math.e / (math.e - 1.0) ** 2)


@invariant(
    "seqspace.divergence_guard",
    "pairing e^n with e^-n is rejected",
    1,
    "==",
)
def _divergence_guard() -> float:
    u = _laguerre_sequence(60, lambda s: math.exp(s))
    f = _laguerre_sequence(60, lambda s: math.exp(-s))
    try:
        dual_pairing(u, f)
    except DivergenceError:
        return 1
    return 0


_ALL_TARGETS = (
    "roumieu:0.5",
    "beurling:1",
    "flat-r:1",
    "flat-b:0.5",
    "schwartz",
    "finite",
)


@invariant(
    "seqspace.finite_combinations",
    "finite combinations of Laguerre functions belong to every space",
    0,
    "==",
)
def _finite_combinations() -> float:
    failures = 0
    for spec in ("lin:1,0,0.5,0.25", "l:2", "poly:1,-1"):
        c = laguerre_coeffs(parse_catalog(spec), 10)
        failures += sum(
            1 for target in _ALL_TARGETS if classify(c, target).member != Decision.YES
        )
    return failures


@invariant(
    "seqspace.flat_inclusion",
    "flat spaces sit strictly between alpha < 1/2 and alpha = 1/2",
    0,
    "==",
)
def _flat_inclusion() -> float:
    report = flat_inclusion_demo()
    return int(not report.monotone) + int(not report.strict_witness)
