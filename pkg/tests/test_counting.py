import csv

import numpy as np
import pytest

from modelcomp.counting import (
    boundary_winding,
    counting_checks,
    counting_sweep,
    nevanlinna,
    nevanlinna_grid,
    preimages,
    write_counting_csv,
)
from modelcomp.errors import TargetEqualsPhiOfZero
from modelcomp.inner import InnerFunction
from modelcomp.maps import Identity, InnerMap, Polynomial, Scale

from conftest import TANGENT, random_disk

ENGINES = ["rational-exact", "argument-principle"]


def _roots(pre):
    return sorted(((round(z.real, 9), round(z.imag, 9)), m) for z, m in pre.roots)


@pytest.mark.parametrize("method", ENGINES)
def test_preimage_examples(method):
    z2 = Polynomial([0, 0, 1])
    assert _roots(preimages(z2, 0.25, method=method)) == [((-0.5, 0.0), 1), ((0.5, 0.0), 1)]
    pre = preimages(TANGENT, 0.5, method=method)
    assert len(pre.roots) == 1 and abs(pre.roots[0][0] - 0.6) < 1e-10
    pre = preimages(z2, 0, method=method)
    assert pre.total_multiplicity == 2 and all(abs(z) < 1e-6 for z, _ in pre.roots)


@pytest.mark.parametrize("method", ENGINES)
def test_nevanlinna_examples(method):
    tol = 1e-10 if method == "rational-exact" else 1e-6
    assert abs(nevanlinna(Identity(), 0.5, method).value - np.log(2)) < tol
    assert abs(nevanlinna(Polynomial([0, 0, 1]), 0.25, method).value - 2 * np.log(2)) < tol
    assert abs(nevanlinna(TANGENT, 0.5, method).value + np.log(0.6)) < tol
    assert nevanlinna(Scale(0.5), 0.75, method).value == 0


def test_target_equals_phi0():
    with pytest.raises(TargetEqualsPhiOfZero):
        nevanlinna(TANGENT, 0)


def test_engines_agree_on_blaschke_map(rng):
    phi = InnerMap(InnerFunction.from_zeros([0, 0.5, -0.3j]))
    for w in random_disk(rng, 10, 0.95, 0.05):
        a = nevanlinna(phi, w, "rational-exact").value
        b = nevanlinna(phi, w, "argument-principle").value
        assert abs(a - b) <= 1e-6 * max(abs(a), 1e-12)


def test_argument_principle_on_singular_map():
    # theta1 = w has infinitely many roots accumulating at 1; a coarse
    # boundary cut leaves finitely many
    phi = InnerMap(InnerFunction.paley_wiener())
    pre = preimages(phi, 0.2, method="argument-principle", delta_bd=1e-2)
    zs = np.array([z for z, _ in pre.roots])
    # roots solve (1 + z)/(1 - z) = log 5 + 2 pi i k
    k = np.arange(-3, 4)
    s = np.log(5) + 2j * np.pi * k
    exact = (s - 1) / (s + 1)
    exact = exact[np.abs(exact) <= 1 - 1e-2]
    assert zs.size == exact.size
    assert np.max(np.abs(np.sort_complex(zs) - np.sort_complex(exact))) < 1e-9


def test_fiber_count_equals_winding(rng):
    for phi in [Polynomial([0, 0, 0.5, 0.5]), TANGENT, InnerMap(InnerFunction.from_zeros([0.2, 0.5j]))]:
        for w in random_disk(rng, 5, 0.9):
            pre = preimages(phi, w)
            assert pre.total_multiplicity + len(pre.boundary_roots) == boundary_winding(phi, w)


def test_monotone_truncation(rng):
    phi = Polynomial([0, 0, 1])
    ws = random_disk(rng, 50, 0.999, 0.99)
    small, _ = nevanlinna_grid(phi, ws, delta_bd=1e-6)
    large, _ = nevanlinna_grid(phi, ws, delta_bd=1e-2)
    assert np.all(large <= small + 1e-15)


def test_counting_checks_examples():
    c = counting_checks(Identity(), 0.3 + 0.4j, 0.2)
    assert c.littlewood_ok and abs(c.slack) < 1e-12
    c = counting_checks(Scale(0.5), 0.4, 0.2)
    assert abs(c.slack - np.log(2)) < 1e-12
    c = counting_checks(Polynomial([0, 0, 1]), 0.25, 0.2)
    assert c.sub_mean_ok and c.littlewood_ok


def test_counting_csv(tmp_path):
    rows = counting_sweep(TANGENT, [0.25, 0.5], 8)
    path = tmp_path / "n.csv"
    write_counting_csv(rows, path)
    with open(path) as fh:
        data = list(csv.DictReader(fh))
    assert list(data[0]) == ["w_re", "w_im", "N", "slack", "flags"]
    assert len(data) == 16
    assert all(float(r["slack"]) >= -1e-9 for r in data)
