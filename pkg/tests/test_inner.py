import json

import numpy as np
import pytest

from modelcomp.errors import PointOutsideDomain, TruncationBudgetExceeded
from modelcomp.inner import (
    InnerFunction,
    carleson_separation,
    eval_inner,
    one_component_probe,
    spectrum_estimate,
)

from conftest import random_disk


def test_zero_at_origin_convention():
    assert abs(eval_inner(InnerFunction.from_zeros([0]), 0.5).value - 0.5) < 1e-15


def test_two_zeros_at_origin():
    assert abs(eval_inner(InnerFunction.from_zeros([0.5, -0.5]), 0).value - 0.25) < 1e-15


def test_paley_wiener_values(theta1):
    assert abs(eval_inner(theta1, 0).value - np.exp(-1)) < 1e-15
    assert abs(eval_inner(theta1, -0.5).value - np.exp(-1 / 3)) < 1e-15
    z = random_disk(np.random.default_rng(5), 100, 0.99)
    assert np.allclose(theta1.evaluate(z)[0], np.exp((z + 1) / (z - 1)), atol=1e-14)


def test_derivative_closed_form(theta1):
    r = eval_inner(theta1, 0)
    assert abs(r.derivative + 2 * np.exp(-1)) < 1e-15


def test_modulus_bounded(rng):
    theta = InnerFunction.from_zeros(random_disk(rng, 10, 0.95), atoms=[(1j, 0.3)])
    z = random_disk(rng, 2000, 0.999)
    assert np.max(np.abs(theta.evaluate(z)[0])) <= 1 + 1e-12


def test_outside_raises(theta1):
    with pytest.raises(PointOutsideDomain):
        eval_inner(theta1, 1.2)


def test_truncation_budget():
    theta = InnerFunction.radial_geometric(count=5)
    with pytest.raises(TruncationBudgetExceeded):
        theta.evaluate(np.array([0.99]))
    assert np.isnan(theta.evaluate(np.array([0.99]), strict=False)[0][0])
    fine = InnerFunction.radial_geometric(count=40)
    assert eval_inner(fine, 0.9).condition_estimate <= 1e-8


def test_truncation_error_bound_holds():
    full = InnerFunction.radial_geometric(count=40)
    short = InnerFunction.radial_geometric(count=12, truncation_budget=1.0)
    z = np.array([0.3, -0.5j, 0.7])
    gap = np.abs(full.evaluate(z)[0] - short.evaluate(z)[0])
    assert np.all(gap <= short.tail_error(z))


def test_sparse_family_depths_exact():
    sp = InnerFunction.sparse_tangential()
    m = np.arange(1, 21)
    x = 0.5**m * (0.5**m) ** 3
    assert np.allclose(sp.one_minus_mod_sq, x, rtol=1e-14, atol=0)


def test_carleson_examples():
    assert carleson_separation([0.5]) == 1.0
    assert abs(carleson_separation([0, 0.5]) - 0.5) < 1e-15
    assert carleson_separation([0.3, 0.3]) == 0.0


def test_carleson_invariance(rng):
    pts = random_disk(rng, 8, 0.9)
    d = carleson_separation(pts)
    assert abs(carleson_separation(pts[::-1]) - d) < 1e-12
    assert abs(carleson_separation(pts * np.exp(0.7j)) - d) < 1e-12


def test_sparse_families_interpolating():
    assert carleson_separation(InnerFunction.sparse_tangential()) > 0.9
    assert carleson_separation(InnerFunction.sparse_tangential(alpha_ratio=1.0)) > 0.9


def test_spectrum_paley_wiener(theta1):
    spec = spectrum_estimate(theta1)
    assert len(spec.arcs) == 1 and spec.contains(1.0)
    probes = dict(spec.probes)
    assert probes[1 + 0j] < 1e-3


def test_spectrum_finite_blaschke():
    spec = spectrum_estimate(InnerFunction.from_zeros([0.5, -0.5]))
    assert spec.arcs == []
    assert min(est for _, est in spec.probes) >= 0.99


def test_spectrum_radial_family():
    spec = spectrum_estimate(InnerFunction.radial_geometric())
    assert len(spec.arcs) == 1 and spec.contains(1.0)


def test_spectrum_outside_arcs_near_unimodular():
    theta = InnerFunction.from_zeros([0.5, 0.3j, -0.6 + 0.2j])
    spec = spectrum_estimate(theta)
    alphas = np.exp(2j * np.pi * np.arange(64) / 64)
    assert np.all(theta.modulus((1 - 1e-4) * alphas) >= 1 - 1e-3)
    assert not any(spec.contains(a) for a in alphas)


def test_one_component_examples(theta1):
    r = one_component_probe(InnerFunction.from_zeros([0]), 0.5, 256)
    assert r.connected and r.component_count == 1
    r = one_component_probe(InnerFunction.from_zeros([0.9, -0.9]), 0.05, 512)
    assert r.component_count == 2 and not r.connected
    assert one_component_probe(theta1, 0.9, 512).connected


def test_one_component_invalid_level(theta1):
    with pytest.raises(ValueError):
        one_component_probe(theta1, 1.5)


@pytest.mark.parametrize("theta", [
    InnerFunction.paley_wiener(),
    InnerFunction.from_zeros([0.5, -0.2j], atoms=[(1j, 0.5)]),
    InnerFunction.sparse_tangential(),
])
def test_json_roundtrip(theta):
    back = InnerFunction.from_json(json.loads(json.dumps(theta.to_json())))
    z = np.array([0.1, 0.5j, -0.7 + 0.1j])
    assert np.allclose(back.evaluate(z)[0], theta.evaluate(z)[0], atol=1e-15)


def test_invalid_construction():
    with pytest.raises(ValueError):
        InnerFunction.from_zeros([1.2])
    with pytest.raises(ValueError):
        InnerFunction.singular([(0.5, 1.0)])
    with pytest.raises(ValueError):
        InnerFunction.singular([(1.0, -1.0)])
