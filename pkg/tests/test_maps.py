import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modelcomp.errors import (
    CompositionTooDeep,
    EvaluationAtEssentialSingularity,
    NotContained,
    NotSelfMap,
    NotTangent,
    PointOutsideDomain,
    ZeroNotInterior,
)
from modelcomp.geometry import HyperbolicDisk, in_hyperbolic_disk, pseudo_distance
from modelcomp.inner import InnerFunction
from modelcomp.maps import (
    MAX_COMPOSE_DEPTH,
    Compose,
    Identity,
    InnerMap,
    Moebius,
    Polynomial,
    Rational,
    Scale,
    conformal_onto_disk,
    eval_map,
    map_from_json,
    schwarz_pick_defect,
)

from conftest import TANGENT, random_disk, shipped_maps


def test_identity_eval():
    r = eval_map(Identity(), 0.3)
    assert r.value == 0.3 and r.derivative == 1
    assert r.condition_estimate >= 0


def test_moebius_at_origin():
    r = eval_map(TANGENT, 0)
    assert abs(r.value) < 1e-15
    assert abs(r.derivative - 2 / 3) < 1e-15
    h = 1e-6
    fd = (TANGENT.value(np.array([h]))[0] - TANGENT.value(np.array([-h]))[0]) / (2 * h)
    assert abs(fd - 2 / 3) < 1e-9


def test_compose_on_boundary():
    r = eval_map(Compose(Polynomial([0, 0, 1]), Scale(0.5)), 1)
    assert abs(r.value - 0.25) < 1e-15 and abs(r.derivative - 0.5) < 1e-15


def test_outside_domain():
    with pytest.raises(PointOutsideDomain):
        eval_map(Identity(), 1.5)


def test_essential_singularity_guard():
    phi = InnerMap(InnerFunction.paley_wiener())
    with pytest.raises(EvaluationAtEssentialSingularity):
        eval_map(phi, 1.0)
    assert np.isnan(phi.boundary_values(np.array([1.0]))[0])


def test_not_self_map():
    with pytest.raises(NotSelfMap):
        Rational([0, 1], [1, -2])  # pole at 1/2
    with pytest.raises(NotSelfMap):
        Polynomial([0, 1.5])
    with pytest.raises(NotSelfMap):
        Scale(1.2)


def test_compose_depth_cap():
    phi = Identity()
    with pytest.raises(CompositionTooDeep):
        for _ in range(MAX_COMPOSE_DEPTH + 1):
            phi = Compose(phi, Identity())


def test_conformal_onto_disk_tangent():
    phi = conformal_onto_disk(0.25, 0.75)
    assert abs(phi.phi0) < 1e-15
    assert abs(phi.value(np.array([1.0]))[0] - 1) < 1e-15
    xi = np.exp(2j * np.pi * np.arange(32) / 32)
    assert np.max(np.abs(np.abs(phi.value(xi) - 0.25) - 0.75)) < 1e-10
    z = random_disk(np.random.default_rng(1), 50, 0.99)
    assert np.allclose(phi.value(z), TANGENT.value(z), atol=1e-14)


def test_conformal_onto_disk_identity_and_errors():
    assert np.allclose(conformal_onto_disk(0, 1).value(np.array([0.3 + 0.2j])), 0.3 + 0.2j)
    with pytest.raises(ZeroNotInterior):
        conformal_onto_disk(0.5, 0.2)
    with pytest.raises(NotTangent):
        conformal_onto_disk(0.1, 0.5)
    with pytest.raises(NotContained):
        conformal_onto_disk(0.3, 0.9)


def test_schwarz_pick_examples():
    assert abs(schwarz_pick_defect(Identity(), 0.4 + 0.3j)) < 1e-15
    assert abs(schwarz_pick_defect(Scale(0.5), 0) - 0.5) < 1e-15
    th = InnerMap(InnerFunction.paley_wiener())
    expected = (1 - np.exp(-2)) - 2 * np.exp(-1)
    assert abs(schwarz_pick_defect(th, 0) - expected) < 1e-14


def test_schwarz_pick_zero_for_automorphism():
    auto = Moebius(1, -0.4, -0.4, 1)
    z = random_disk(np.random.default_rng(2), 200, 0.95)
    assert np.max(np.abs(schwarz_pick_defect(auto, z))) < 1e-12


def test_hyperbolic_disk():
    d = HyperbolicDisk(0, 0.5)
    assert in_hyperbolic_disk(d, 0.3) and not in_hyperbolic_disk(d, 0.6)
    assert in_hyperbolic_disk(HyperbolicDisk(0.7j, 0.1), 0.7j)
    assert in_hyperbolic_disk(HyperbolicDisk(0.9, 0.5), 0.95)
    pts = HyperbolicDisk(0.6 + 0.2j, 0.3).sample()
    assert pts.size == 32
    assert np.all(pseudo_distance(pts, 0.6 + 0.2j) < 0.3)


@pytest.mark.parametrize("name", list(shipped_maps()))
def test_json_roundtrip(name):
    phi = shipped_maps()[name]
    doc = json.loads(json.dumps(phi.to_json()))
    back = map_from_json(doc)
    z = random_disk(np.random.default_rng(3), 20, 0.9)
    assert np.allclose(back.value(z), phi.value(z), rtol=0, atol=1e-14)


@pytest.mark.parametrize("name", list(shipped_maps()))
def test_derivative_matches_finite_difference(name):
    phi = shipped_maps()[name]
    z = random_disk(np.random.default_rng(4), 200, 0.95)
    h = 1e-6
    val, der = phi(z)
    fd = (phi.value(z + h) - phi.value(z - h)) / (2 * h)
    big = np.abs(der) > 1e-4 * np.maximum(1, np.abs(val))
    assert np.all(np.abs(fd - der)[big] <= 1e-5 * np.abs(der)[big])


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 0.999), st.floats(0, 2 * np.pi))
def test_schwarz_pick_property(r, t):
    z = np.array([r * np.exp(1j * t)])
    for phi in shipped_maps().values():
        assert schwarz_pick_defect(phi, z)[0] >= -1e-9


@settings(max_examples=40, deadline=None)
@given(st.complex_numbers(max_magnitude=0.9), st.floats(0.05, 1.0))
def test_moebius_disk_maps_are_self_maps(a, s):
    # phi(z) = s * (z - a) / (1 - conj(a) z)
    phi = Moebius(s, -s * a, -np.conj(a), 1)
    z = np.array([0.3, -0.7j, 0.5 + 0.5j])
    assert np.all(np.abs(phi.value(z)) < 1 + 1e-12)
