"""Numerical laboratory for composition operators from model spaces K_theta
into the Hardy space H^2 of the unit disk."""
from ._core import BACKEND
from .analyzer import analyze, indicator, sweep, verdict
from .clark import atom_mass, clark_density, clark_masses
from .counting import nevanlinna, preimages
from .inner import InnerFunction, carleson_separation, spectrum_estimate
from .kernels import KernelSpec, TestFunction, composition_norm, h2_norm
from .maps import Compose, Identity, InnerMap, Moebius, Polynomial, Rational, Scale
from .quadrature import QuadratureGrid

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Compose",
    "Identity",
    "InnerFunction",
    "InnerMap",
    "KernelSpec",
    "Moebius",
    "Polynomial",
    "QuadratureGrid",
    "Rational",
    "Scale",
    "TestFunction",
    "analyze",
    "atom_mass",
    "carleson_separation",
    "clark_density",
    "clark_masses",
    "composition_norm",
    "h2_norm",
    "indicator",
    "nevanlinna",
    "preimages",
    "spectrum_estimate",
    "sweep",
    "verdict",
]
