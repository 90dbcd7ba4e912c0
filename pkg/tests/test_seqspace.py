import math

import numpy as np
import pytest

from lagexp.exceptions import DegenerateFitError, DivergenceError, InvalidArgumentError
from lagexp.expansion import CoefficientArray
from lagexp.seqspace import (
    Decision,
    Target,
    WeightSpec,
    classify,
    classify_growth,
    dual_pairing,
    fit_decay,
    fit_decay_profile,
    flat_inclusion_demo,
    is_member_at,
    norm_equivalence_check,
    pairing_with_tail,
    weight_value,
    weighted_norm,
)

LAGUERRE = CoefficientArray.LAGUERRE


def sequence(fn, caps=64):
    return CoefficientArray.from_degrees(LAGUERRE, caps, fn)


def test_weight_values():
    assert weight_value(WeightSpec.power(0.5, 1.0), 0) == 1.0
    assert weight_value(WeightSpec.power(0.5, 1.0), 4) == pytest.approx(math.exp(4))
    assert weight_value(WeightSpec.power(1.0, 2.0), 9) == pytest.approx(math.exp(6))
    assert weight_value(WeightSpec.flat(0.5, 2.0), 3) == pytest.approx(48.0)
    assert weight_value(WeightSpec.polynomial(2), (1, 2)) == pytest.approx(16.0)
    assert weight_value(WeightSpec.finite_support(), 7) == 1.0


def test_weight_spec_validation():
    with pytest.raises(InvalidArgumentError):
        WeightSpec("gevrey")
    with pytest.raises(InvalidArgumentError):
        WeightSpec.power(0.5, 0.0)
    with pytest.raises(InvalidArgumentError):
        WeightSpec.flat(-1.0, 1.0)
    with pytest.raises(InvalidArgumentError):
        WeightSpec.polynomial(-2)


def test_weighted_norm():
    delta0 = CoefficientArray.delta(LAGUERRE, 4, 0)
    assert weighted_norm(delta0, WeightSpec.power(0.5, 3.0)) == 1.0

    geometric = sequence(lambda n: math.exp(-n))
    assert weighted_norm(geometric, WeightSpec.power(0.5, 1.0)) == pytest.approx(1.0)
    assert weighted_norm(geometric, WeightSpec.power(0.5, 2.0)) == math.inf
    assert weighted_norm(
        geometric, WeightSpec.power(0.5, 0.5), p=2
    ) == pytest.approx(1.0 / math.sqrt(1.0 - math.exp(-1.0)))

    # Dual side: the inverse weight damps growing sequences
    growing = sequence(lambda n: math.exp(n / 2.0))
    assert weighted_norm(growing, WeightSpec.power(0.5, 1.0), inverse=True) == 1.0


def test_is_member_at():
    geometric = sequence(lambda n: math.exp(-n))

    assert is_member_at(geometric, WeightSpec.power(0.5, 0.5)).passed
    rung = is_member_at(geometric, WeightSpec.power(0.5, 2.0))
    assert not rung.passed
    assert rung.infinite
    assert rung.tail_slope == pytest.approx(1.0)
    assert rung.to_dict()["log_norm"] == "inf"


def test_norm_equivalence_check():
    finite = norm_equivalence_check(CoefficientArray.delta(LAGUERRE, 6, 2), 0.5, 1.0)
    assert finite.holds

    decaying = norm_equivalence_check(sequence(lambda n: math.exp(-2 * n)), 0.5, 1.0)
    assert decaying.conclusive
    assert decaying.holds
    assert decaying.h2 == 1.25
    lower, middle, upper = decaying.norms
    assert lower <= middle <= decaying.c2 * upper

    flat = norm_equivalence_check(sequence(lambda n: 1.0), 0.5, 1.0)
    assert not flat.conclusive
    assert not flat.holds


def test_fit_decay_recovers_parameters():
    stretched = sequence(lambda n: math.exp(-3.0 * math.sqrt(n)), caps=2000)
    profile = fit_decay(stretched)
    assert profile.alpha_hat == pytest.approx(1.0, rel=1e-6)
    assert profile.h_hat == pytest.approx(3.0, rel=1e-6)
    assert profile.fit_quality > 0.999

    geometric = fit_decay(sequence(lambda n: 2.0 ** -n))
    assert geometric.alpha_hat == pytest.approx(0.5, rel=1e-6)
    assert geometric.h_hat == pytest.approx(math.log(2.0), rel=1e-6)
    assert geometric.tail_start == 1


def test_fit_decay_degenerate_cases():
    with pytest.raises(DegenerateFitError):
        fit_decay(CoefficientArray.delta(LAGUERRE, 40, 3))
    with pytest.raises(DegenerateFitError):
        fit_decay(sequence(lambda n: math.exp(-n), caps=12))
    with pytest.raises(DegenerateFitError):
        fit_decay_profile(np.arange(40), np.where(np.arange(40) % 2, -1.0, -2.0))
    with pytest.raises(InvalidArgumentError):
        fit_decay_profile([1, 2, 3], [-1.0, -2.0])


def test_classify_growth():
    profile = classify_growth(sequence(lambda n: math.exp(2.0 * math.sqrt(n)), 400))

    assert profile.alpha_hat == pytest.approx(1.0, rel=1e-6)
    assert profile.h_hat == pytest.approx(2.0, rel=1e-6)


def test_classify_roumieu():
    decision = classify(sequence(lambda n: math.exp(-n)), "roumieu:0.5")

    assert decision.member == Decision.YES
    assert decision.witness_h == 1.0
    assert decision.summary().startswith("roumieu:0.5: yes (witness h = 1)")
    assert decision.profile is not None
    assert decision.to_xml().tag == "decision"
    assert decision.to_dict()["residuals"]


@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
def test_geometric_decay_is_not_flat(sigma):
    decision = classify(sequence(lambda n: math.exp(-n)), Target("flat-r", sigma))

    assert decision.member == Decision.NO


def test_classify_beurling():
    geometric = sequence(lambda n: math.exp(-n))

    assert classify(geometric, "beurling:0.5").member == Decision.NO
    decision = classify(geometric, "beurling:1")
    assert decision.member == Decision.YES
    assert decision.witness_h == 8.0


def test_classify_schwartz_and_finite():
    geometric = sequence(lambda n: math.exp(-n))
    algebraic = sequence(lambda n: 1.0 / (1.0 + n) ** 2)

    assert classify(geometric, "schwartz").member == Decision.YES
    assert classify(algebraic, "schwartz").member == Decision.NO
    assert classify(geometric, "finite").member == Decision.NO


@pytest.mark.parametrize(
    "target",
    ["roumieu:0.5", "beurling:2", "flat-r:1", "flat-b:0.5", "schwartz", "finite"],
)
def test_finitely_supported_arrays_belong_everywhere(target):
    c = CoefficientArray.delta(LAGUERRE, 10, 3, 2.0)

    assert classify(c, target).member == Decision.YES


@pytest.mark.parametrize(
    "target", ["finite", "roumieu:0.5", "beurling:1", "flat-b:1", "schwartz"]
)
def test_basis_function_stored_at_its_caps_belongs_everywhere(target):
    c = CoefficientArray.delta(LAGUERRE, 3, 3)

    assert classify(c, target).member == Decision.YES


def test_flat_witness_sits_on_the_boundary():
    # h^n n! (1/2)^n / n! = (h/2)^n stays bounded up to h = 2
    c = sequence(lambda n: 0.5 ** n / math.factorial(n))
    decision = classify(c, "flat-r:0.5")

    assert decision.member == Decision.YES
    assert decision.witness_h == 2.0


def test_short_arrays_are_inconclusive():
    c = sequence(lambda n: math.exp(-n), caps=3)

    assert classify(c, "roumieu:1").member == Decision.INCONCLUSIVE


@pytest.mark.parametrize("text", ["roumieu", "roumieu:-1", "schwartz:1", "bogus"])
def test_target_parse_rejects(text):
    with pytest.raises(InvalidArgumentError):
        Target.parse(text)


def test_dual_pairing():
    u = CoefficientArray.delta(LAGUERRE, 4, 2, 3.0)
    f = CoefficientArray.delta(LAGUERRE, 6, 2, 0.5)
    assert dual_pairing(u, f) == pytest.approx(1.5)

    linear = sequence(lambda n: float(n))
    geometric = sequence(lambda n: math.exp(-n))
    e = math.e
    assert dual_pairing(linear, geometric) == pytest.approx(e / (e - 1.0) ** 2)


def test_pairing_with_tail():
    finite = pairing_with_tail(
        CoefficientArray.delta(LAGUERRE, 4, 2, 3.0),
        CoefficientArray.delta(LAGUERRE, 6, 2, 0.5),
    )
    assert finite.value == pytest.approx(1.5)
    assert finite.tail_estimate == 0.0

    linear = sequence(lambda n: float(n))
    geometric = sequence(lambda n: math.exp(-n))
    truncated = pairing_with_tail(linear, geometric)
    assert truncated.value == dual_pairing(linear, geometric)
    assert 0.0 < truncated.tail_estimate < 1e-20
    assert truncated.to_dict()["tail_estimate"] == truncated.tail_estimate


def test_dual_pairing_guards():
    growing = sequence(lambda n: math.exp(n))
    geometric = sequence(lambda n: math.exp(-n))
    with pytest.raises(DivergenceError):
        dual_pairing(growing, geometric)

    hermite = CoefficientArray.delta(CoefficientArray.HERMITE, 4, 0)
    with pytest.raises(InvalidArgumentError):
        dual_pairing(hermite, geometric)


def test_flat_inclusion_demo():
    report = flat_inclusion_demo()

    assert report.monotone
    assert report.strict_witness
    assert report.columns[0] == "roumieu:0.25"
    assert "exp(-n)" in report.table()
    assert report.to_dict()["monotone"] is True
