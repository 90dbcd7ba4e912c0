"""
Gauss-Laguerre and Gauss-Hermite rules.

Nodes are the eigenvalues of the Jacobi matrix (Golub-Welsch). Weights come from
the Christoffel formula ``w_i = 1 / sum_k p_k(x_i)^2`` over the orthonormal
polynomials. Evaluating that sum with the damped basis functions (``l_k`` or
``h_k``) instead of the polynomials gives the *lifted* weights
``W_i = w_i e^{x_i}`` (Laguerre) or ``W_i = w_i e^{x_i^2}`` (Hermite) directly, so
``integral of F`` is ``sum_i W_i F(x_i)`` and the exponential lift never has to be
formed at a node.
"""
import functools
import logging
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import logsumexp

from lagexp.basis import hermite_fn_table, laguerre_fn_table, laguerre_log_table
from lagexp.exceptions import InvalidArgumentError, QuadratureOverflowError
from lagexp.multiindex import as_multiindex


logger = logging.getLogger(__name__)
"""lagexp.quadrature log object"""

MAX_ORDER = 500
"""Largest rule order accepted"""

QUAD_MARGIN = 40
"""Default number of nodes beyond the largest degree integrated against"""

LOG_MAX_FLOAT = float(np.log(np.finfo(float).max))
"""ln of the largest double"""


class QuadratureRule(object):
    """
    An m-point Gauss rule for the native weight of its kind, ``e^{-x}`` on
    ``[0, inf)`` or ``e^{-x^2}`` on R.

    Args:
        kind (str): "laguerre" or "hermite"
        nodes (np.ndarray): Increasing nodes
        log_weights (np.ndarray): ln of the Gauss weights
        lifted_weights (np.ndarray): Weights for integrals against dx
    """

    LAGUERRE = "laguerre"
    HERMITE = "hermite"

    def __init__(
        self,
        kind: str,
        nodes: np.ndarray,
        log_weights: np.ndarray,
        lifted_weights: np.ndarray,
    ) -> None:
        self.kind = kind
        self.order = int(nodes.size)
        self.nodes = _frozen(nodes)
        self.log_weights = _frozen(log_weights)
        with np.errstate(under="ignore"):
            self.weights = _frozen(np.exp(log_weights))
        self.lifted_weights = _frozen(lifted_weights)

    def basis_table(self, max_degree: int) -> np.ndarray:
        """
        Basis functions of this rule's family at the nodes

        Returns:
            np.ndarray: Shape ``(max_degree + 1, order)``
        """
        if self.kind == self.LAGUERRE:
            return laguerre_fn_table(max_degree, self.nodes)
        return hermite_fn_table(max_degree, self.nodes)

    def log_lift(self, points: np.ndarray) -> np.ndarray:
        """ln of the factor a damped integrand is multiplied by to integrate it"""
        if self.kind == self.LAGUERRE:
            return np.sum(points, axis=1) / 2.0
        return np.sum(points ** 2, axis=1) / 2.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "order": self.order,
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
        }

    def __repr__(self) -> str:
        return (
            f"QuadratureRule<kind: {self.kind}, order: {self.order}, "
            f"span: [{self.nodes[0]:.6g}, {self.nodes[-1]:.6g}]>"
        )


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float)
    values.flags.writeable = False
    return values


def _check_order(m: int) -> None:
    if not 1 <= m <= MAX_ORDER:
        raise InvalidArgumentError(f"rule order must be in [1, {MAX_ORDER}], got {m}")


@functools.lru_cache(maxsize=None)
def gauss_laguerre_rule(m: int) -> QuadratureRule:
    """
    m-point rule for ``integral_0^inf g(x) e^{-x} dx``

    Args:
        m (int): Order in [1, 500]

    Returns:
        :class:`.QuadratureRule`: Rule with strictly positive, increasing nodes
    """
    _check_order(m)
    k = np.arange(1, m, dtype=float)
    nodes = eigh_tridiagonal(2.0 * np.arange(m) + 1.0, k, eigvals_only=True)
    nodes = np.sort(nodes)

    _, logs = laguerre_log_table(m - 1, nodes, damped=True)
    log_lifted = -logsumexp(2.0 * logs, axis=0)
    log_weights = log_lifted - nodes
    logger.debug(f"Built {m}-point Gauss-Laguerre rule, largest node {nodes[-1]:.6g}")
    with np.errstate(under="ignore"):
        return QuadratureRule(
            QuadratureRule.LAGUERRE, nodes, log_weights, np.exp(log_lifted)
        )


@functools.lru_cache(maxsize=None)
def gauss_hermite_rule(m: int) -> QuadratureRule:
    """
    m-point rule for ``integral_R g(x) e^{-x^2} dx``

    Args:
        m (int): Order in [1, 500]

    Returns:
        :class:`.QuadratureRule`: Rule with nodes symmetric about 0
    """
    _check_order(m)
    k = np.arange(1, m, dtype=float)
    nodes = np.sort(eigh_tridiagonal(np.zeros(m), np.sqrt(k / 2.0), eigvals_only=True))
    nodes = (nodes - nodes[::-1]) / 2.0

    table = hermite_fn_table(m - 1, nodes)
    lifted = 1.0 / np.sum(table ** 2, axis=0)
    lifted = (lifted + lifted[::-1]) / 2.0
    log_weights = np.log(lifted) - nodes ** 2
    logger.debug(f"Built {m}-point Gauss-Hermite rule, largest node {nodes[-1]:.6g}")
    return QuadratureRule(QuadratureRule.HERMITE, nodes, log_weights, lifted)


def rule_for(kind: str, m: int) -> QuadratureRule:
    """Rule of the given kind ("laguerre" or "hermite") and order"""
    if kind == QuadratureRule.LAGUERRE:
        return gauss_laguerre_rule(m)
    if kind == QuadratureRule.HERMITE:
        return gauss_hermite_rule(m)
    raise InvalidArgumentError(f"unknown quadrature kind: {kind}")


def tensor_rule(rule: QuadratureRule, d: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes and lifted weights of the d-fold tensor product rule, row-major

    Returns:
        Tuple[np.ndarray, np.ndarray]: ``(points, weights)`` of shapes
            ``(m^d, d)`` and ``(m^d,)``
    """
    if d < 1:
        raise InvalidArgumentError(f"dimension must be >= 1, got {d}")
    grids = np.meshgrid(*([rule.nodes] * d), indexing="ij")
    points = np.stack(grids, axis=-1).reshape(-1, d)
    weights = functools.reduce(np.multiply.outer, [rule.lifted_weights] * d)
    return points, np.asarray(weights).ravel()


def check_lifted(values: np.ndarray, points: np.ndarray, rule: QuadratureRule) -> None:
    """
    Raise if the integrand, once lifted by the rule's exponential, is not
    representable at some node

    Raises:
        QuadratureOverflowError: If a value is not finite, or ``|f| e^{lift}``
            overflows (f does not decay like the basis)
    """
    if not np.all(np.isfinite(values)):
        bad = points[~np.isfinite(values)][0]
        raise QuadratureOverflowError(f"integrand is not finite at node {bad.tolist()}")

    with np.errstate(divide="ignore"):
        lifted = np.log(np.abs(values)) + rule.log_lift(points)
    if np.any(lifted > LOG_MAX_FLOAT):
        bad = points[np.argmax(lifted)]
        raise QuadratureOverflowError(
            f"lifted integrand overflows at node {bad.tolist()}: the function does "
            f"not decay like the {rule.kind} basis"
        )


def integrate_against_basis(
    f: Callable[[np.ndarray], np.ndarray],
    n: Sequence[int],
    rule: QuadratureRule,
    margin: int = QUAD_MARGIN,
) -> float:
    """
    ``integral f b_n dx`` where ``b_n`` is ``l_n`` (Laguerre rule) or ``h_n``
    (Hermite rule), over the tensor grid of the rule

    Args:
        f (Callable[[np.ndarray], np.ndarray]): Maps an (M, d) array of points to M
            values
        n (Sequence[int]): Multi-index
        rule (:class:`.QuadratureRule`): One dimensional rule
        margin (int) = QUAD_MARGIN: Required extra nodes beyond ``max(n)``

    Returns:
        float: The integral

    Raises:
        InvalidArgumentError: If the rule is too short for ``n``
        QuadratureOverflowError: If the lifted integrand is not representable
    """
    index = as_multiindex(n)
    check_order_for(rule, max(index), margin)

    points, weights = tensor_rule(rule, len(index))
    values = np.asarray(f(points), dtype=float)
    check_lifted(values, points, rule)

    basis = np.ones(points.shape[0])
    for axis, k in enumerate(index):
        table = rule.basis_table(k)
        basis = basis * table[k][_axis_positions(rule.order, len(index), axis)]
    return float(np.sum(weights * values * basis))


def check_order_for(rule: QuadratureRule, max_degree: int, margin: int) -> None:
    """Raise if ``rule.order < max_degree + margin``"""
    if rule.order < max_degree + margin:
        raise InvalidArgumentError(
            f"rule order {rule.order} is below degree {max_degree} + margin {margin}"
        )


def _axis_positions(m: int, d: int, axis: int) -> np.ndarray:
    """Index into the 1d nodes of each row-major tensor grid point along ``axis``"""
    return np.indices((m,) * d).reshape(d, -1)[axis]


def integrate(values: np.ndarray, weights: np.ndarray) -> float:
    """Sum of lifted weights times integrand values (numpy pairwise summation)"""
    return float(np.sum(weights * values))


def rule_moment(rule: QuadratureRule, k: int) -> float:
    """
    ``sum_i w_i x_i^k`` evaluated in log space, the rule's value of the k-th moment
    of its native weight
    """
    with np.errstate(divide="ignore"):
        logs = rule.log_weights + k * np.log(np.abs(rule.nodes))
    if rule.kind == QuadratureRule.LAGUERRE or k == 0:
        return float(np.exp(logsumexp(logs)))
    signs = np.sign(rule.nodes) ** k
    value, sign = logsumexp(logs, b=signs, return_sign=True)
    return float(sign * np.exp(value))


def lp_norm_on_rule(values: np.ndarray, weights: np.ndarray, p: float) -> float:
    """
    ``(sum_i W_i |g_i|^p)^{1/p}``; for ``p = inf`` the largest ``|g_i|``

    Args:
        values (np.ndarray): Integrand values at the tensor nodes
        weights (np.ndarray): Lifted weights of the tensor rule
        p (float): Exponent in [1, inf]
    """
    if p < 1:
        raise InvalidArgumentError(f"p must be >= 1, got {p}")
    magnitudes = np.abs(values)
    if np.isinf(p):
        return float(np.max(magnitudes))
    return float(np.sum(weights * magnitudes ** p) ** (1.0 / p))
