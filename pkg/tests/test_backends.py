import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import ndimage

from modelcomp import _core, _fallback

try:
    from modelcomp import _kernels
except ImportError:  # extension not built
    _kernels = None

from conftest import random_disk

needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")


def _direct_blaschke(zeros, z):
    val = np.ones_like(z)
    for lam in zeros:
        if lam == 0:
            val = val * z
        else:
            val = val * (abs(lam) / lam) * (lam - z) / (1 - np.conj(lam) * z)
    return val


def test_backend_reported():
    assert _core.BACKEND in ("compiled", "python")


@pytest.mark.parametrize("impl", [_fallback, pytest.param(_kernels, marks=needs_ext)])
def test_blaschke_matches_direct_product(impl, rng):
    zeros = np.concatenate([[0], random_disk(rng, 7, 0.95)])
    z = random_disk(rng, 500, 0.999)
    val, der = impl.blaschke_eval(zeros.astype(complex), z)
    assert np.allclose(val, _direct_blaschke(zeros, z), atol=1e-13)
    h = 1e-6
    fd = (_direct_blaschke(zeros, z + h) - _direct_blaschke(zeros, z - h)) / (2 * h)
    assert np.allclose(der, fd, rtol=1e-5, atol=1e-6)


@needs_ext
def test_blaschke_parity(rng):
    zeros = random_disk(rng, 20, 0.99)
    z = random_disk(rng, 1000)
    a = _fallback.blaschke_eval(zeros, z)
    b = _kernels.blaschke_eval(zeros, z)
    assert np.allclose(a[0], b[0], atol=1e-13) and np.allclose(a[1], b[1], rtol=1e-12, atol=1e-12)


def test_core_wrapper_shapes():
    val, der = _core.blaschke_eval(np.array([0.5]), 0.25)
    assert val.shape == () and der.shape == ()
    val, der = _core.blaschke_eval(np.array([0.5]), np.zeros((3, 4)))
    assert val.shape == (3, 4)


@pytest.mark.parametrize("impl", [_fallback, pytest.param(_kernels, marks=needs_ext)])
def test_labels_match_scipy(impl, rng):
    for _ in range(5):
        mask = (rng.uniform(size=(64, 80)) < 0.55).astype(np.uint8)
        labels, count = impl.label_components(mask)
        ref, ref_count = ndimage.label(mask)
        assert count == ref_count
        # same partition up to relabelling
        pairs = {(a, b) for a, b in zip(np.asarray(labels).ravel(), ref.ravel())}
        assert len(pairs) == ref_count + 1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_label_count_property(h, w, seed):
    mask = (np.random.default_rng(seed).uniform(size=(h, w)) < 0.5).astype(np.uint8)
    assert _core.label_components(mask)[1] == ndimage.label(mask)[1]
