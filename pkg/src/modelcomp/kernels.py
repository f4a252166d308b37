"""Reproducing kernels, H^2 norms, the Stanton-type identities and the
weighted energy on model spaces.

Normalizations: ``dA`` is area measure of total mass 1 and ``dm`` is
arc length of total mass 1. With these, the Littlewood-Paley identity is
``||f||^2 = LP_CONSTANT * int |f'|^2 log(1/|z|^2) dA + |f(0)|^2`` with
``LP_CONSTANT = 1``, and composing with ``phi`` turns ``log(1/|z|^2)``
into ``2 N_phi``.
"""
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .counting import DELTA_BD, nevanlinna_grid
from .errors import GridTooCoarse, HypothesisViolated
from .geometry import HyperbolicDisk
from .inner import InnerFunction
from .quadrature import DEFAULT_GRID, boundary_points

LP_CONSTANT = 1.0
METHOD_TOL = 1e-4


def _theta_at(theta, z):
    z = np.asarray(z, dtype=complex)
    # boundary points are evaluated leniently: NaN at atoms or past budget
    strict = not np.any(np.abs(z) >= 1)
    val, der, _ = theta.evaluate(z, strict=strict)
    return val, der


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Kernel at ``anchor`` for H^2 (``theta is None``) or for K_theta."""

    anchor: complex
    theta: InnerFunction = None
    normalized: bool = False

    def __post_init__(self):
        if not abs(self.anchor) < 1:
            raise ValueError("kernel anchor must lie in the open disk")

    @property
    def theta_at_anchor(self):
        if self.theta is None:
            return 0j
        return complex(_theta_at(self.theta, np.array([self.anchor]))[0][0])


def kernel_norm_sq(spec):
    w = complex(spec.anchor)
    if spec.theta is None:
        return 1.0 / (1.0 - abs(w) ** 2)
    return (1.0 - abs(spec.theta_at_anchor) ** 2) / (1.0 - abs(w) ** 2)


def kernel_norm(spec):
    return float(np.sqrt(kernel_norm_sq(spec)))


def kernel_value(spec, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    w = complex(spec.anchor)
    out = 1.0 / (1.0 - np.conj(w) * zeta)
    if spec.theta is not None:
        tz, _ = _theta_at(spec.theta, zeta)
        out = out * (1.0 - np.conj(spec.theta_at_anchor) * tz)
    if spec.normalized:
        out = out / kernel_norm(spec)
    return complex(out) if out.ndim == 0 else out


def kernel_derivative(spec, zeta):
    """d/dzeta of the kernel."""
    zeta = np.asarray(zeta, dtype=complex)
    w = complex(spec.anchor)
    den = 1.0 - np.conj(w) * zeta
    if spec.theta is None:
        out = np.conj(w) / den**2
    else:
        tw = np.conj(spec.theta_at_anchor)
        tz, dtz = _theta_at(spec.theta, zeta)
        out = -dtz * tw / den + np.conj(w) * (1.0 - tw * tz) / den**2
    if spec.normalized:
        out = out / kernel_norm(spec)
    return complex(out) if out.ndim == 0 else out


class TestFunction:
    """Finite combination ``sum_j c_j K_{w_j}`` of H^2 or K_theta kernels."""

    __test__ = False  # not a pytest class

    def __init__(self, anchors, coeffs, theta=None):
        self.anchors = np.atleast_1d(np.asarray(anchors, dtype=complex))
        self.coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if self.anchors.shape != self.coeffs.shape:
            raise ValueError("anchors and coefficients must have equal length")
        if np.any(np.abs(self.anchors) >= 1):
            raise ValueError("anchors must lie in the open disk")
        self.theta = theta
        self._specs = [KernelSpec(w, theta) for w in self.anchors]

    @classmethod
    def kernel(cls, anchor, theta=None):
        return cls([anchor], [1.0], theta)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for c, spec in zip(self.coeffs, self._specs):
            out = out + c * kernel_value(spec, z)
        return out

    def deriv_values(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for c, spec in zip(self.coeffs, self._specs):
            out = out + c * kernel_derivative(spec, z)
        return out

    def gram(self):
        """``G[i, j] = K_{w_j}(w_i) = <K_{w_j}, K_{w_i}>``."""
        cols = [np.atleast_1d(kernel_value(spec, self.anchors)) for spec in self._specs]
        return np.stack(cols, axis=1)

    def norm_sq(self):
        c = self.coeffs
        return float(np.real(np.conj(c) @ self.gram() @ c))

    def pairing(self, w):
        """``<f, K_w>`` from the Gram entries ``<K_{w_j}, K_w> = conj(K_w(w_j))``."""
        kw = np.atleast_1d(kernel_value(KernelSpec(w, self.theta), self.anchors))
        return complex(np.sum(self.coeffs * np.conj(kw)))


def _values(f, z):
    if isinstance(f, Polynomial):
        return f(z), f.deriv()(z)
    return f(z), f.deriv_values(z)


def inner_product(f, g, n=4096):
    """``<f, g>`` in H^2 by the trapezoid rule on the circle."""
    xi = boundary_points(n)
    return complex(np.nanmean(_values(f, xi)[0] * np.conj(_values(g, xi)[0])))


def _boundary_samples_needed(f, base):
    if isinstance(f, TestFunction) and f.anchors.size:
        reach = float(np.max(np.abs(f.anchors)))
        return max(base, int(2 ** np.ceil(np.log2(40.0 / (1.0 - reach)))))
    return base


def lp_integral(f, grid=DEFAULT_GRID):
    """``int |f'|^2 log(1/|z|^2) dA``."""
    z = grid.nodes
    _, df = _values(f, z)
    weight = -2.0 * np.log(np.abs(z))
    return float(grid.integrate(np.abs(df) ** 2 * weight))


def calibrate_lp_constant(grid=DEFAULT_GRID):
    """The constant making the Littlewood-Paley formula exact on f(z) = z."""
    return 1.0 / lp_integral(Polynomial([0, 1]), grid)


def h2_norm(f, method="coefficients", grid=DEFAULT_GRID, crosscheck=False, tol=METHOD_TOL):
    """H^2 norm by Taylor coefficients, boundary values, or Littlewood-Paley."""
    if method == "coefficients":
        if not isinstance(f, Polynomial):
            raise ValueError("coefficient method needs a polynomial")
        value = float(np.sqrt(np.sum(np.abs(f.coef) ** 2)))
    elif method == "boundary":
        n = _boundary_samples_needed(f, grid.n_angles)
        value = float(np.sqrt(np.nanmean(np.abs(_values(f, boundary_points(n))[0]) ** 2)))
    elif method == "littlewood-paley":
        f0 = _values(f, np.zeros(1))[0][0]
        value = float(np.sqrt(LP_CONSTANT * lp_integral(f, grid) + abs(f0) ** 2))
    else:
        raise ValueError(f"unknown method {method!r}")
    if crosscheck:
        other = "littlewood-paley" if method != "littlewood-paley" else "boundary"
        ref = h2_norm(f, other, grid)
        if abs(ref - value) > 10 * tol * max(abs(value), 1e-300):
            raise GridTooCoarse(f"{method} gives {value}, {other} gives {ref}")
    return value


def composition_norm(f, phi, method="boundary", grid=DEFAULT_GRID, delta_bd=DELTA_BD):
    """``||f o phi||`` in H^2.

    ``boundary`` averages ``|f(phi(xi))|^2`` over the circle; ``counting``
    evaluates ``2 LP_CONSTANT int |f'|^2 N_phi dA + |f(phi(0))|^2``.
    """
    if method == "boundary":
        n = max(grid.n_angles, 4096)
        vals = phi.boundary_values(boundary_points(n))
        ok = np.isfinite(vals)
        fv = _values(f, vals[ok])[0]
        return float(np.sqrt(np.mean(np.abs(fv) ** 2)))
    if method == "counting":
        z = grid.nodes
        n_vals, _ = nevanlinna_grid(phi, z, delta_bd=delta_bd)
        _, df = _values(f, z)
        area = grid.integrate(np.abs(df) ** 2 * n_vals)
        f0 = _values(f, np.array([phi.phi0]))[0][0]
        return float(np.sqrt(2.0 * LP_CONSTANT * area + abs(f0) ** 2))
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class CohnEnergy:
    energy: float
    norm_sq: float
    ratio: float
    excluded_bound: float = 0.0


def _norm_sq(f):
    if isinstance(f, Polynomial):
        return float(np.sum(np.abs(f.coef) ** 2))
    return f.norm_sq()


def cohn_energy(f, theta, p, grid=DEFAULT_GRID):
    """``int |f'|^2 (1 - |z|) / (1 - |theta(z)|)^p dA`` and its ratio to ``||f||^2``.

    ``p = 0`` gives the limiting weight ``1 - |z|``. Nodes where ``theta``
    cannot be evaluated within its truncation budget are dropped; their
    contribution is bounded by the unweighted-by-theta integral over them.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    z = grid.nodes
    _, df = _values(f, z)
    mod = theta.modulus(z)
    known = np.isfinite(mod)
    base = np.abs(df) ** 2 * (1.0 - np.abs(z))
    weight = np.where(known, (1.0 - np.where(known, mod, 0.0)) ** -p if p else 1.0, 0.0)
    energy = float(grid.integrate(base * weight))
    excluded = float(grid.integrate(np.where(known, 0.0, base)))
    nsq = _norm_sq(f)
    return CohnEnergy(energy, nsq, energy / nsq if nsq else float("nan"), excluded)


@dataclass(frozen=True)
class KernelProbeReport:
    anchors: np.ndarray
    theta_moduli: np.ndarray
    pairings: np.ndarray
    derivative_constants: np.ndarray


def kernel_probes(theta, ws, a, eps, test_fns, n_radii=4, n_angles=8):
    """Numerical probes along a sequence ``w_n`` with ``|theta(w_n)| < a``.

    ``pairings[n]`` is ``max_f |<normalized K_{w_n}, f>|`` over the test
    functions; ``derivative_constants[n]`` is the minimum over a 32-point
    sample of ``D_eps(w_n)`` of ``|K'_{w_n}(zeta)| (1 - |w_n|^2)^2``.
    """
    ws = np.asarray(ws, dtype=complex)
    mods = np.abs(_theta_at(theta, ws)[0])
    if np.any(mods >= a):
        bad = int(np.argmax(mods >= a))
        raise HypothesisViolated(f"|theta(w_{bad})| = {mods[bad]:.6g} >= a = {a}")
    pairings = np.empty(ws.size)
    consts = np.empty(ws.size)
    for n, w in enumerate(ws):
        spec = KernelSpec(w, theta)
        norm = kernel_norm(spec)
        pairings[n] = max(abs(f(np.array([w]))[0]) / norm for f in test_fns) if test_fns else 0.0
        pts = HyperbolicDisk(w, eps).sample(n_radii, n_angles)
        consts[n] = float(np.min(np.abs(kernel_derivative(spec, pts)))) * (1 - abs(w) ** 2) ** 2
    return KernelProbeReport(ws, mods, pairings, consts)
