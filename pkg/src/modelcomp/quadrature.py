"""Polar product quadrature for the normalized area measure on the disk.

Radially a composite Gauss-Legendre rule on panels graded geometrically
toward both ends of [0, 1); angularly the trapezoid rule. Weights already
include the Jacobian, so ``sum(weights * f(nodes))`` approximates
``int_D f dA`` with ``A(D) = 1``.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np


def _panel_edges(n_inner, n_outer):
    inner = [0.0] + [0.5 * 2.0 ** -(n_inner - 1 - j) for j in range(n_inner)]
    outer = [1.0 - 2.0 ** -(j + 1) for j in range(1, n_outer)] + [1.0]
    return np.array(inner + outer)


@dataclass(frozen=True)
class QuadratureGrid:
    nodes_per_panel: int = 16
    inner_panels: int = 6
    outer_panels: int = 10
    n_angles: int = 1024

    @cached_property
    def _radial(self):
        edges = _panel_edges(self.inner_panels, self.outer_panels)
        x, w = np.polynomial.legendre.leggauss(self.nodes_per_panel)
        a, b = edges[:-1, None], edges[1:, None]
        r = (0.5 * (b - a) * (x[None, :] + 1) + a).ravel()
        wr = (0.5 * (b - a) * w[None, :]).ravel()
        return r, wr

    @property
    def radii(self):
        return self._radial[0]

    @property
    def radial_weights(self):
        """Weights for ``int_0^1 g(r) dr``."""
        return self._radial[1]

    @property
    def angles(self):
        return 2 * np.pi * np.arange(self.n_angles) / self.n_angles

    @cached_property
    def nodes(self):
        return self.radii[:, None] * np.exp(1j * self.angles[None, :])

    @cached_property
    def weights(self):
        """Area weights: ``2 r w_r / n_angles`` at each node."""
        w = 2 * self.radii * self.radial_weights / self.n_angles
        return np.repeat(w[:, None], self.n_angles, axis=1)

    @property
    def size(self):
        return self.radii.size * self.n_angles

    def integrate(self, values):
        """Pairwise-summed ``sum(weights * values)``."""
        return np.sum(self.weights * values)

    def refine(self):
        """Both radial and angular node counts doubled."""
        return QuadratureGrid(
            2 * self.nodes_per_panel, self.inner_panels, self.outer_panels, 2 * self.n_angles
        )

    def describe(self):
        return {
            "radial_nodes": int(self.radii.size),
            "angles": self.n_angles,
            "nodes": int(self.size),
        }


DEFAULT_GRID = QuadratureGrid()


def boundary_points(n):
    return np.exp(2j * np.pi * np.arange(n) / n)


def boundary_mean(values):
    """Trapezoid rule for the normalized arc-length mean over the circle."""
    return np.mean(values)
