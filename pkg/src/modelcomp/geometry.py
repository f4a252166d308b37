"""Small shared value types: evaluation results and hyperbolic disks."""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EvalResult:
    """A value, its complex derivative, and a bound on the evaluation error."""

    value: complex
    derivative: complex
    condition_estimate: float = 0.0

    def __post_init__(self):
        if not self.condition_estimate >= 0:
            raise ValueError("condition_estimate must be non-negative")


@dataclass(frozen=True)
class HyperbolicDisk:
    """Pseudo-hyperbolic disk ``{z : |z - w| < eps |1 - conj(z) w|}``."""

    center: complex
    radius: float

    def __post_init__(self):
        if not abs(self.center) < 1:
            raise ValueError("center must lie in the open unit disk")
        if not 0 < self.radius < 1:
            raise ValueError("radius must lie in (0, 1)")

    def contains(self, zeta):
        return in_hyperbolic_disk(self, zeta)

    def euclidean(self):
        """Euclidean (center, radius) of the same set."""
        w, eps = complex(self.center), self.radius
        s = 1.0 - eps**2 * abs(w) ** 2
        return w * (1.0 - eps**2) / s, eps * (1.0 - abs(w) ** 2) / s

    def inscribed_radius(self):
        """Radius of the largest Euclidean disk centred at ``center`` inside the set."""
        w, eps = complex(self.center), self.radius
        return eps * (1.0 - abs(w) ** 2) / (1.0 + eps * abs(w))

    def sample(self, n_radii=4, n_angles=8):
        """Points of the disk obtained by moving a polar grid of radius < eps
        with the automorphism sending 0 to the center."""
        w = complex(self.center)
        radii = self.radius * np.arange(1, n_radii + 1) / n_radii * (1 - 1e-9)
        angles = 2 * np.pi * np.arange(n_angles) / n_angles
        u = (radii[:, None] * np.exp(1j * angles[None, :])).ravel()
        return (w + u) / (1 + np.conj(w) * u)


def in_hyperbolic_disk(disk, zeta):
    zeta = complex(zeta)
    w = complex(disk.center)
    return abs(zeta - w) < disk.radius * abs(1 - zeta.conjugate() * w)


def pseudo_distance(z, w):
    """Pseudo-hyperbolic distance ``|z - w| / |1 - conj(w) z|``."""
    return np.abs(z - w) / np.abs(1 - np.conj(w) * z)
