import numpy as np
import pytest

from modelcomp.analyzer import (
    COMPACT,
    INCONCLUSIVE,
    NON_COMPACT,
    analyze,
    classify_trend,
    essential_norm,
    indicator,
    kernel_composition_norm,
    one_component_status,
    pw_ratio,
    sparse_kernel_ratios,
    sweep,
    verdict,
)
from modelcomp.errors import HypothesisViolated
from modelcomp.inner import InnerFunction
from modelcomp.maps import Identity, Polynomial, Scale, map_from_json
from modelcomp.scenarios import SCENARIOS

from conftest import TANGENT, random_disk

Z = InnerFunction.from_zeros([0])
Z2 = InnerFunction.from_zeros([0, 0])


def _pw_identity(r):
    return np.log(1 / r) * (1 - np.exp(-2 * (1 + r) / (1 - r))) / (1 - r * r)


def test_indicator_examples(theta1):
    assert indicator(Scale(0.5), theta1, 0.75).q == 0
    for k in range(6, 17):
        r = 1 - 2.0**-k
        assert abs(indicator(Identity(), theta1, r).q - _pw_identity(r)) < 1e-10
    assert abs(indicator(Identity(), Z, 0.9).q - np.log(1 / 0.9)) < 1e-12


def test_indicator_recombines(theta1, rng):
    for w in random_disk(rng, 20, 0.99, 0.05):
        s = indicator(TANGENT, theta1, w)
        assert s.q >= 0
        if s.n_value:
            assert abs(s.q - s.n_value * (1 - s.theta_mod**2) / (1 - abs(w) ** 2)) <= 1e-12 * s.q


def test_theta_monotone(rng):
    # |w^2| < |w| in the disk, so Q can only grow
    for w in random_disk(rng, 30, 0.99, 0.05):
        assert indicator(TANGENT, Z2, w).q >= indicator(TANGENT, Z, w).q


def test_sweep_examples(theta1):
    res = sweep(Scale(0.5), theta1, 64, 12)
    assert all(v == 0 for v in res.suprema.values())
    res = sweep(TANGENT, theta1, 64, 14)
    last = [res.suprema[k] for k in (12, 13, 14)]
    assert all(abs(v - 1 / 3) < 0.05 / 3 for v in last)
    res = sweep(Identity(), theta1, 64, 14)
    assert abs(res.suprema[14] - 0.5) < 1e-3


def test_sweep_scale_monotone(theta1):
    for c in (0.3, 0.6, 0.8):
        res = sweep(Scale(c), theta1, 32, 10)
        for k, v in res.suprema.items():
            if 1 - 2.0**-k > c:
                assert v == 0


def test_trend_classification():
    base = {k: 1.0 for k in range(2, 15)}
    assert classify_trend(base).kind == "plateau"
    assert classify_trend({k: 2.0**-k for k in range(2, 15)}).kind == "decaying"
    assert classify_trend({k: 0.0 for k in range(2, 15)}).kind == "decaying"
    assert classify_trend({k: 1.5**k for k in range(2, 15)}).kind == "growing"
    wobble = {k: (1.0 if k % 2 else 0.3) for k in range(2, 15)}
    assert classify_trend(wobble).kind == "inconclusive"


def test_essential_norm_examples():
    assert abs(essential_norm(Polynomial([0, 0, 1])) - 1) < 1e-9
    assert essential_norm(Scale(0.5)) == 0
    assert abs(essential_norm(Identity()) - 1) < 1e-9


def test_pw_ratio_examples():
    assert pw_ratio(Scale(0.5), 0.999) == 0
    r = 1 - 2.0**-16
    assert abs(pw_ratio(Identity(), r) - 0.5) < 1e-4
    w = TANGENT.value(r)
    assert abs(pw_ratio(TANGENT, w) - 1 / 3) < 1e-3


def test_kernel_composition_norm_examples(rng):
    for lam in random_disk(rng, 5, 0.99):
        assert abs(kernel_composition_norm(Identity(), lam) - 1) < 1e-9
    assert abs(kernel_composition_norm(Scale(0.5), 0) - 1) < 1e-12
    a = kernel_composition_norm(TANGENT, 0.6)
    b = kernel_composition_norm(TANGENT, 0.6, n=2**16)
    assert abs(a - b) < 1e-6 and abs(a - 0.8615384615) < 1e-8
    for lam in random_disk(rng, 20, 0.999):
        assert kernel_composition_norm(TANGENT, lam) <= 1 + 1e-9


def test_kernel_composition_norm_near_circle():
    # the adaptive rule must agree with a resolved trapezoid rule
    lam = 0.999 * np.exp(0.01j)
    a = kernel_composition_norm(TANGENT, lam, method="adaptive")
    b = kernel_composition_norm(TANGENT, lam, n=2**20, method="trapezoid")
    assert abs(a - b) < 1e-8


def test_sparse_ratios():
    theta = InnerFunction.from_json(SCENARIOS["sparse-blaschke"]["theta"])
    ratios = sparse_kernel_ratios(TANGENT, theta)
    vals = np.array([r.ratio for r in ratios])
    assert vals.size == 20 and np.all(np.isfinite(vals)) and np.all(vals > 0)
    assert np.all(np.diff(vals[-5:]) <= 0)
    with pytest.raises(ValueError):
        sparse_kernel_ratios(TANGENT, Z)


def test_one_component(theta1):
    assert one_component_status(theta1).status == "one-component"
    theta = InnerFunction.from_json(SCENARIOS["sparse-blaschke"]["theta"])
    assert one_component_status(theta).status == "not-one-component"


def test_verdict_requires_origin(theta1):
    phi = Polynomial([0.1, 0.5])
    res = sweep(phi, theta1, 8, 8)
    with pytest.raises(HypothesisViolated):
        verdict(phi, theta1, res, [])


EXPECTED = {"paley-wiener-small": COMPACT, "tangent-disk": NON_COMPACT,
            "sparse-blaschke": COMPACT}


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenario_verdicts(name):
    cfg = SCENARIOS[name]
    phi = map_from_json(cfg["phi"])
    theta = InnerFunction.from_json(cfg["theta"])
    res = analyze(phi, theta)
    assert res.verdict.classification == EXPECTED[name]
    # stability under doubled angles and two extra annuli
    fine = analyze(phi, theta, angles=128, depth=16)
    assert fine.verdict.classification == EXPECTED[name]


def test_tangent_criterion_s(theta1):
    res = analyze(TANGENT, theta1)
    (alpha, mass), = res.verdict.criterion_s
    assert abs(alpha - 1) < 1e-9 and abs(mass - 2 / 3) < 2e-2
    assert abs(res.verdict.trend.level - 1 / 3) < 0.05


def test_identity_plateau(theta1):
    res = analyze(Identity(), theta1)
    assert res.verdict.trend.kind == "plateau"
    assert abs(res.verdict.trend.level - 0.5) < 1e-2
    assert res.verdict.classification in (NON_COMPACT, INCONCLUSIVE)
