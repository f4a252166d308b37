"""Aleksandrov-Clark measures of a self-map: boundary densities, the
absolutely continuous / singular split, atoms via the Poisson quotient, and
the pullback of arc length under the boundary map.
"""
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BoundaryValueUnavailable, DensityPole, NonConvergent
from .quadrature import boundary_points

DEFAULT_BOUNDARY_GRID = 4096
EXCISION_FACTOR = 4
CANDIDATE_RADIUS = 1 - 1e-4
CANDIDATE_TOL = 1e-2
CONTACT_TOL = 1e-9
POLE_TOL = 1e-14
ATOM_RADII = 1 - 2.0 ** -np.arange(8, 21)
RICHARDSON_TOL = 1e-3
ATOM_FLOOR = 1e-6


def _unimodular(alpha):
    alpha = complex(alpha)
    if abs(abs(alpha) - 1) > 1e-12:
        raise ValueError("alpha must be unimodular")
    return alpha


def clark_density(phi, alpha, xi):
    """``h_alpha(xi) = (1 - |phi(xi)|^2) / |alpha - phi(xi)|^2``.

    Scalar input raises on an unavailable boundary value or a pole; array
    input returns NaN at such points.
    """
    alpha = _unimodular(alpha)
    xi_arr = np.asarray(xi, dtype=complex)
    vals = phi.boundary_values(np.atleast_1d(xi_arr))
    gap = np.abs(alpha - vals) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.maximum(1.0 - np.abs(vals) ** 2, 0.0) / gap
    if xi_arr.ndim == 0:
        if not np.isfinite(vals[0]):
            raise BoundaryValueUnavailable(f"no boundary value of phi at {complex(xi_arr)}")
        if gap[0] < POLE_TOL:
            raise DensityPole(f"phi({complex(xi_arr)}) = alpha")
        return float(h[0])
    h = np.where(np.isfinite(vals) & (gap >= POLE_TOL), h, np.nan)
    return h.reshape(xi_arr.shape)


@dataclass(frozen=True)
class Atom:
    zeta: complex
    mass: float
    error: float
    curve: tuple = ()


@dataclass(frozen=True)
class ClarkReport:
    alpha: complex
    xi: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    total_mass: float = 1.0
    ac_mass: float = 0.0
    singular_mass: float = 0.0
    atoms: tuple = ()
    excision_bound: float = 0.0
    unavailable: int = 0

    def to_row(self):
        return {
            "alpha_re": self.alpha.real,
            "alpha_im": self.alpha.imag,
            "total_mass": self.total_mass,
            "ac_mass": self.ac_mass,
            "singular_mass": self.singular_mass,
            "excision_bound": self.excision_bound,
            "atoms": json.dumps([[a.zeta.real, a.zeta.imag, a.mass] for a in self.atoms]),
        }


def total_mass(phi, alpha):
    """``Re((alpha + phi(0)) / (alpha - phi(0)))``."""
    alpha = _unimodular(alpha)
    p0 = phi.phi0
    return float((1 - abs(p0) ** 2) / abs(alpha - p0) ** 2)


def _quotient(phi, alpha, zeta, radii):
    radii = np.asarray(radii, dtype=float)
    vals = phi(radii * zeta)[0]
    return (1 - radii) / (1 + radii) * (1 - np.abs(vals) ** 2) / np.abs(alpha - vals) ** 2


def atom_mass(phi, alpha, zeta, radii=ATOM_RADII, return_error=False):
    """``mu_alpha({zeta})`` as the radial limit of the Poisson quotient.

    The quotient uses the exact inverse Poisson factor ``(1-r)/(1+r)``.
    Richardson extrapolation assumes an error linear in ``1 - r`` on radii
    halving their distance to the circle.
    """
    alpha = _unimodular(alpha)
    zeta = complex(zeta) / abs(complex(zeta))
    q = _quotient(phi, alpha, zeta, radii)
    rich = 2 * q[1:] - q[:-1]
    if rich.size >= 2:
        err = float(abs(rich[-1] - rich[-2]))
    else:
        err = float("inf")
    value = float(rich[-1]) if rich.size else float(q[-1])
    if not np.all(np.isfinite(q)) or err > RICHARDSON_TOL:
        raise NonConvergent(
            f"quotient at {zeta} does not settle (last extrapolants differ by {err:.3g})",
            [(float(r), float(v)) for r, v in zip(radii, q)],
        )
    if abs(value) < max(ATOM_FLOOR, err):
        value = 0.0
    return (value, err) if return_error else value


def _candidates(phi, alpha, xi, extra=()):
    """Boundary points where ``phi`` comes close to ``alpha``, refined to
    the exact contact angle by a bounded 1-D minimization."""
    n = xi.size
    near = np.abs(alpha - phi.boundary_values(CANDIDATE_RADIUS * xi)) < CANDIDATE_TOL
    found = []
    if np.any(near):
        # split the flagged indices into cyclic runs
        idx = np.flatnonzero(near)
        if near.all():
            runs = [idx]
        else:
            start = int(np.flatnonzero(~near)[0])
            order = (np.arange(n) + start) % n
            runs, cur = [], []
            for i in order:
                if near[i]:
                    cur.append(i)
                elif cur:
                    runs.append(np.array(cur))
                    cur = []
            if cur:
                runs.append(np.array(cur))
        step = 2 * np.pi / n
        for run in runs:
            gaps = np.abs(alpha - phi.boundary_values(xi[run]))
            gaps = np.where(np.isfinite(gaps), gaps, np.inf)
            t0 = 2 * np.pi * run[int(np.argmin(gaps))] / n

            def gap(t):
                v = phi.boundary_values(np.array([np.exp(1j * t)]))[0]
                return abs(alpha - v) if np.isfinite(v) else np.inf

            res = minimize_scalar(gap, bounds=(t0 - 2 * step, t0 + 2 * step),
                                  method="bounded", options={"xatol": 1e-13})
            t = res.x if res.fun <= gap(t0) else t0
            if gap(t) < CONTACT_TOL:
                found.append(complex(np.exp(1j * t)))
    # extra points count only where the density may blow up there
    for z in extra:
        z = complex(z) / abs(complex(z))
        v = phi.boundary_values(np.array([z]))[0]
        close = not np.isfinite(v) or abs(alpha - v) < CANDIDATE_TOL
        if close and all(abs(z - f) > 1e-9 for f in found):
            found.append(z)
    return found


def clark_masses(phi, alpha, boundary_grid=DEFAULT_BOUNDARY_GRID, extra_candidates=()):
    """Mass decomposition of the Clark measure ``mu_alpha``.

    ``ac_mass`` is the trapezoid sum of ``h_alpha`` with arcs of half-width
    ``4 * 2 pi / boundary_grid`` removed around contact points; the
    removed density mass is reported as ``excision_bound``.
    """
    alpha = _unimodular(alpha)
    n = int(boundary_grid)
    xi = boundary_points(n)
    h = clark_density(phi, alpha, xi)
    unavailable = int(np.sum(~np.isfinite(phi.boundary_values(xi))))
    contacts = _candidates(phi, alpha, xi, extra_candidates)
    half = EXCISION_FACTOR * 2 * np.pi / n
    angles = np.angle(xi)
    excised = np.zeros(n, dtype=bool)
    for z in contacts:
        d = np.abs(np.angle(np.exp(1j * (angles - np.angle(z)))))
        excised |= d <= half
    usable = np.isfinite(h) & ~excised
    ac = float(np.sum(np.where(usable, h, 0.0)) / n)
    # excised arcs are bounded using the density at their edges
    bound = 0.0
    if np.any(excised) and np.any(usable):
        edges = usable & (np.roll(excised, 1) | np.roll(excised, -1))
        edge_h = float(np.max(h[edges])) if np.any(edges) else 0.0
        bound = edge_h * float(np.sum(excised)) / n
    atoms = []
    for z in contacts:
        try:
            mass, err = atom_mass(phi, alpha, z, return_error=True)
        except NonConvergent as exc:
            atoms.append(Atom(z, float("nan"), float("inf"), tuple(exc.curve)))
            continue
        if mass > 0:
            atoms.append(Atom(z, mass, err, tuple(_quotient(phi, alpha, z, ATOM_RADII))))
    tot = total_mass(phi, alpha)
    return ClarkReport(alpha, xi, h, tot, ac, tot - ac, tuple(atoms), bound, unavailable)


def poisson_balance(phi, alpha, radii, boundary_grid=DEFAULT_BOUNDARY_GRID):
    """Pairs ``(A_n, B_n)`` for each radius ``r_n``.

    ``A_n = Re((alpha + r phi(0)) / (alpha - r phi(0)))`` and
    ``B_n = int r^2 (1 - |phi|^2) / |alpha - r phi|^2 dm``.
    """
    alpha = _unimodular(alpha)
    p0 = phi.phi0
    out = []
    for r in np.asarray(radii, dtype=float):
        if not 0 < r < 1:
            raise ValueError("radii must lie in (0, 1)")
        n = max(int(boundary_grid), int(2 ** np.ceil(np.log2(64.0 / (1.0 - r)))))
        vals = phi.boundary_values(boundary_points(n))
        ok = np.isfinite(vals)
        v = vals[ok]
        b = np.sum(r**2 * (1 - np.abs(v) ** 2) / np.abs(alpha - r * v) ** 2) / n
        a = ((alpha + r * p0) / (alpha - r * p0)).real
        out.append((float(a), float(b)))
    return out


@dataclass(frozen=True)
class PushforwardHistogram:
    radial_edges: np.ndarray
    angular_edges: np.ndarray
    masses: np.ndarray
    values: np.ndarray = field(repr=False)
    excluded: int = 0

    def integrate(self, g):
        """Empirical ``int g d nu_phi`` from the stored boundary values."""
        return float(np.mean(g(self.values)))

    def to_json(self):
        return {
            "radial_edges": self.radial_edges.tolist(),
            "angular_edges": self.angular_edges.tolist(),
            "masses": self.masses.tolist(),
            "excluded": self.excluded,
        }

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)


def pushforward_histogram(phi, boundary_samples=4096, bins=(16, 32)):
    """Histogram of ``m o (phi^*)^{-1}`` over radial x angular bins of the closed disk."""
    nr, na = bins
    vals = phi.boundary_values(boundary_points(int(boundary_samples)))
    ok = np.isfinite(vals)
    v = vals[ok]
    r_edges = np.linspace(0.0, 1.0, nr + 1)
    a_edges = np.linspace(-np.pi, np.pi, na + 1)
    counts, _, _ = np.histogram2d(np.minimum(np.abs(v), 1.0), np.angle(v),
                                  bins=(r_edges, a_edges))
    masses = counts / max(v.size, 1)
    return PushforwardHistogram(r_edges, a_edges, masses, v, int(np.sum(~ok)))
