import numpy as np
import pytest

from modelcomp.inner import InnerFunction
from modelcomp.maps import Compose, Identity, InnerMap, Moebius, Polynomial, Scale

TANGENT = Moebius(2, 0, -1, 3)


def shipped_maps():
    """Maps used by the scenarios and examples, with a short label."""
    return {
        "identity": Identity(),
        "scale-half": Scale(0.5),
        "z2": Polynomial([0, 0, 1]),
        "tangent-disk": TANGENT,
        "compose": Compose(Polynomial([0, 0, 1]), TANGENT),
        "blaschke": InnerMap(InnerFunction.from_zeros([0, 0.5, -0.3j])),
        "theta1": InnerMap(InnerFunction.paley_wiener()),
    }


def random_disk(rng, n, rmax=1.0, rmin=0.0):
    r = np.sqrt(rng.uniform(rmin**2, rmax**2, n))
    return r * np.exp(2j * np.pi * rng.uniform(size=n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def theta1():
    return InnerFunction.paley_wiener()
