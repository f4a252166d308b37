"""Inner functions: Blaschke products times atomic singular inner factors.

An :class:`InnerFunction` stores its zeros through their angles and their
depths ``1 - |lambda|``. Keeping the depth separately matters for the
tangential families used in the examples, whose zeros sit closer to the
circle than double precision can resolve from ``|lambda|`` alone.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .errors import (
    EvaluationAtEssentialSingularity,
    PointOutsideDomain,
    TruncationBudgetExceeded,
)
from .geometry import EvalResult

ATOM_GUARD = 1e-12
DEFAULT_BUDGET = 1e-8
_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class InnerFunction:
    """theta = B_Lambda * exp(-sum_j omega_j (xi_j + z) / (xi_j - z)).

    Parameters
    ----------
    angles, depths : arrays
        Zero ``m`` is ``(1 - depths[m]) * exp(1j * angles[m])``.
    atoms : tuple of (xi, omega)
        Point masses of the singular measure, ``|xi| = 1``, ``omega > 0``.
    tail_bound : float
        Upper bound for the sum of ``1 - |lambda|`` over zeros dropped by
        truncation of an infinite family.
    accumulation_points : tuple of complex
        Declared limit points on the circle of the full zero set.
    """

    angles: np.ndarray
    depths: np.ndarray
    atoms: tuple = ()
    tail_bound: float = 0.0
    truncation_budget: float = DEFAULT_BUDGET
    accumulation_points: tuple = ()
    family: dict = field(default=None, repr=False)

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float).ravel()
        depths = np.asarray(self.depths, dtype=float).ravel()
        if angles.shape != depths.shape:
            raise ValueError("angles and depths must have equal length")
        if np.any(depths <= 0) or np.any(depths > 1):
            raise ValueError("zeros must lie in the open unit disk")
        atoms = []
        for xi, omega in self.atoms:
            xi = complex(xi)
            if abs(abs(xi) - 1) > 1e-12:
                raise ValueError(f"atom {xi} is not on the unit circle")
            if not omega > 0:
                raise ValueError("atom masses must be positive")
            atoms.append((xi / abs(xi), float(omega)))
        if self.tail_bound < 0 or self.truncation_budget < 0:
            raise ValueError("tail_bound and truncation_budget must be non-negative")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "depths", depths)
        object.__setattr__(self, "atoms", tuple(atoms))
        object.__setattr__(
            self, "accumulation_points", tuple(complex(p) for p in self.accumulation_points)
        )

    # -- constructors -------------------------------------------------
    @classmethod
    def from_zeros(cls, zeros, atoms=(), **kwargs):
        zeros = np.atleast_1d(np.asarray(zeros, dtype=complex))
        mod = np.abs(zeros)
        if np.any(mod >= 1):
            raise ValueError("zeros must lie in the open unit disk")
        angles = np.where(mod > 0, np.angle(zeros), 0.0)
        return cls(angles, 1.0 - mod, atoms=atoms, **kwargs)

    @classmethod
    def singular(cls, atoms, **kwargs):
        return cls(np.empty(0), np.empty(0), atoms=atoms, **kwargs)

    @classmethod
    def paley_wiener(cls):
        """exp((z + 1) / (z - 1)): one atom of mass 1 at z = 1."""
        return cls.singular([(1.0, 1.0)])

    @classmethod
    def sparse_tangential(cls, count=20, t_ratio=0.5, alpha_ratio=0.5, **kwargs):
        """Zeros ``(1 - a_m t_m**3)**0.5 * exp(1j t_m)`` with ``t_m = t_ratio**m``
        and ``a_m = alpha_ratio**m``, ``m = 1..count``."""
        m = np.arange(1, count + 1, dtype=float)
        t = t_ratio**m
        x = alpha_ratio**m * t**3
        depths = x / (1.0 + np.sqrt(1.0 - x))
        q = alpha_ratio * t_ratio**3
        tail = q ** (count + 1) / (1.0 - q)
        params = {"count": count, "t_ratio": t_ratio, "alpha_ratio": alpha_ratio}
        return cls(
            t,
            depths,
            tail_bound=tail,
            accumulation_points=(1.0,),
            family={"name": "sparse-tangential", "params": params},
            **kwargs,
        )

    @classmethod
    def radial_geometric(cls, count=20, ratio=0.5, **kwargs):
        """Zeros ``1 - ratio**m``, ``m = 1..count``."""
        m = np.arange(1, count + 1, dtype=float)
        depths = ratio**m
        tail = ratio ** (count + 1) / (1.0 - ratio)
        return cls(
            np.zeros(count),
            depths,
            tail_bound=tail,
            accumulation_points=(1.0,),
            family={"name": "radial-geometric", "params": {"count": count, "ratio": ratio}},
            **kwargs,
        )

    # -- derived data -------------------------------------------------
    @property
    def zeros(self):
        return (1.0 - self.depths) * np.exp(1j * self.angles)

    @property
    def one_minus_mod_sq(self):
        """``1 - |lambda|**2`` computed without cancellation."""
        return self.depths * (2.0 - self.depths)

    @property
    def is_finite_blaschke(self):
        return not self.atoms and self.tail_bound == 0.0

    def tail_error(self, z):
        """Bound for ``|theta(z) - theta_truncated(z)|`` from the dropped zeros."""
        if self.tail_bound == 0.0:
            return np.zeros(np.shape(z))
        with np.errstate(divide="ignore"):
            return 2.0 * self.tail_bound / (1.0 - np.abs(z))

    def evaluate(self, z, strict=True):
        """Vectorised value, derivative and truncation bound.

        With ``strict=False`` points that cannot be evaluated (outside the
        disk, inside the atom guard band, or over the truncation budget)
        come back as NaN instead of raising.
        """
        z = np.asarray(z, dtype=complex)
        mod = np.abs(z)
        bad = mod > 1 + 1e-12
        if strict and np.any(bad):
            raise PointOutsideDomain("inner function evaluated outside the closed disk")
        val, der = _core.blaschke_eval(self.zeros, z)
        if self.atoms:
            expo = np.zeros_like(z)
            dexpo = np.zeros_like(z)
            for xi, omega in self.atoms:
                diff = xi - z
                near = np.abs(diff) < ATOM_GUARD
                if np.any(near):
                    if strict:
                        raise EvaluationAtEssentialSingularity(
                            f"evaluation within {ATOM_GUARD} of the atom at {xi}"
                        )
                    bad = bad | near
                    diff = np.where(near, 1.0, diff)
                expo = expo - omega * (xi + z) / diff
                dexpo = dexpo - omega * 2 * xi / diff**2
            s = np.exp(expo)
            der = der * s + val * s * dexpo
            val = val * s
        err = self.tail_error(z)
        over = err > self.truncation_budget
        if strict and np.any(over):
            raise TruncationBudgetExceeded(
                f"tail bound {np.max(err):.3g} exceeds budget {self.truncation_budget:.3g}"
            )
        bad = bad | over
        if np.any(bad):
            val = np.where(bad, np.nan, val)
            der = np.where(bad, np.nan, der)
        return val, der, err

    def modulus(self, z):
        """``|theta(z)|`` with NaN where evaluation is refused."""
        return np.abs(self.evaluate(z, strict=False)[0])

    # -- serialization -------------------------------------------------
    def to_json(self):
        if self.family is not None:
            doc = {"family": dict(self.family)}
        else:
            doc = {"zeros": [[float(z.real), float(z.imag)] for z in self.zeros]}
        doc["atoms"] = [
            {"xi": [xi.real, xi.imag], "omega": omega} for xi, omega in self.atoms
        ]
        return doc

    @classmethod
    def from_json(cls, doc):
        atoms = [(complex(*a["xi"]), a["omega"]) for a in doc.get("atoms", [])]
        if "family" in doc:
            fam = doc["family"]
            builders = {
                "sparse-tangential": cls.sparse_tangential,
                "radial-geometric": cls.radial_geometric,
            }
            if fam["name"] not in builders:
                raise ValueError(f"unknown zero family {fam['name']!r}")
            base = builders[fam["name"]](**fam.get("params", {}))
            if atoms:
                base = cls(
                    base.angles, base.depths, atoms=atoms, tail_bound=base.tail_bound,
                    accumulation_points=base.accumulation_points, family=base.family,
                )
            return base
        zeros = [complex(*p) for p in doc.get("zeros", [])]
        return cls.from_zeros(zeros, atoms=atoms)


def eval_inner(theta, z):
    """Evaluate ``theta`` at a single point of the open disk."""
    z = complex(z)
    if abs(z) >= 1:
        raise PointOutsideDomain("eval_inner requires |z| < 1")
    val, der, err = theta.evaluate(np.array([z]))
    cond = float(err[0]) + (len(theta.depths) + len(theta.atoms) + 1) * _EPS
    return EvalResult(complex(val[0]), complex(der[0]), cond)


def carleson_separation(points):
    """Separation constant ``inf_m prod_{k != m} |b_{lambda_k}(lambda_m)|``.

    ``points`` is an :class:`InnerFunction` (its zeros are used with their
    exact depths) or a sequence of points in the disk. Returns 0 when a
    point is repeated.
    """
    if isinstance(points, InnerFunction):
        angles, depths = points.angles, points.depths
    else:
        pts = np.atleast_1d(np.asarray(points, dtype=complex))
        if np.any(np.abs(pts) >= 1):
            raise ValueError("points must lie in the open unit disk")
        angles = np.where(pts != 0, np.angle(pts), 0.0)
        depths = 1.0 - np.abs(pts)
    n = len(depths)
    if n <= 1:
        return 1.0
    rho = 1.0 - depths
    one_minus_sq = depths * (2.0 - depths)
    # 1 - conj(l_k) l_m = (1 - rho_k rho_m) + rho_k rho_m (1 - e^{i(t_m - t_k)})
    dk, dm = depths[None, :], depths[:, None]
    rr = rho[None, :] * rho[:, None]
    delta = angles[:, None] - angles[None, :]
    gap = (dk + dm - dk * dm) - rr * np.expm1(1j * delta)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = one_minus_sq[:, None] * one_minus_sq[None, :] / np.abs(gap) ** 2
    x = np.where(np.isfinite(x), np.minimum(x, 1.0), 1.0)
    np.fill_diagonal(x, 0.0)
    with np.errstate(divide="ignore"):
        logs = 0.5 * np.log1p(-x)
    worst = np.min(np.sum(logs, axis=1))
    return float(np.exp(worst)) if np.isfinite(worst) else 0.0


@dataclass(frozen=True)
class Arc:
    start: float
    end: float
    point: complex

    def contains(self, alpha, slack=0.0):
        t = np.angle(alpha)
        width = (self.end - self.start) % (2 * np.pi)
        return (t - self.start + slack) % (2 * np.pi) <= width + 2 * slack


@dataclass(frozen=True)
class SpectrumEstimate:
    arcs: list
    probes: list

    def flagged(self, level=0.99):
        return [alpha for alpha, est in self.probes if est < level]

    def contains(self, alpha):
        return any(arc.contains(alpha) for arc in self.arcs)

    def points(self):
        return [arc.point for arc in self.arcs]


def _liminf_estimate(theta, alpha, radial_grid, tail=3):
    mods = theta.modulus(np.asarray(radial_grid, dtype=float) * alpha)
    mods = mods[np.isfinite(mods)]
    return float(np.min(mods[-tail:])) if mods.size else float("nan")


def spectrum_estimate(theta, arc_resolution=256, radial_grid=None):
    """Arcs covering the spectrum of ``theta`` plus radial liminf probes.

    Declared accumulation points of a zero family are used as given. For a
    plain zero list, a zero is attributed to the circle when its depth is
    below the arc width, i.e. it sits in the Carleson box over its arc.
    The radial liminf is estimated by the minimum over the last three
    evaluable radii.
    """
    if radial_grid is None:
        radial_grid = 1.0 - np.logspace(-1, -6, 21)
    width = 2 * np.pi / arc_resolution
    flags = np.zeros(arc_resolution, dtype=bool)
    reps = {}

    def bin_of(t):
        return int(np.round(t / width)) % arc_resolution

    def mark(t, point, priority):
        k = bin_of(t)
        for j in (k - 1, k, k + 1):
            flags[j % arc_resolution] = True
        if k not in reps or reps[k][0] < priority:
            reps[k] = (priority, point)

    for xi, _ in theta.atoms:
        mark(np.angle(xi), xi, 3)
    for p in theta.accumulation_points:
        mark(np.angle(p), p / abs(p), 2)
    near = theta.depths < width
    if theta.accumulation_points:
        near[:] = False
    order = np.argsort(-theta.depths[near])
    for t in theta.angles[near][order]:
        mark(t, np.exp(1j * t), 1)

    arcs = []
    if flags.all():
        point = next(iter(reps.values()))[1] if reps else 1.0
        arcs.append(Arc(-np.pi, np.pi, point))
    elif flags.any():
        start = int(np.argmin(flags))  # an unflagged bin
        run = []
        for step in range(arc_resolution + 1):
            idx = (start + step) % arc_resolution
            if flags[idx] and step < arc_resolution:
                run.append(idx)
            elif run:
                lo, hi = run[0], run[-1]
                cands = [reps[j] for j in run if j in reps]
                point = max(cands, key=lambda c: c[0])[1] if cands else np.exp(
                    1j * width * (lo + hi) / 2
                )
                arcs.append(Arc((lo - 0.5) * width, (hi + 0.5) * width, complex(point)))
                run = []

    alphas = [np.exp(2j * np.pi * k / arc_resolution) for k in range(arc_resolution)]
    alphas += [arc.point for arc in arcs]
    probes = [(complex(a), _liminf_estimate(theta, a, radial_grid)) for a in alphas]
    return SpectrumEstimate(arcs, probes)


@dataclass(frozen=True)
class OneComponentReport:
    level: float
    grid_size: int
    component_count: int
    connected: bool
    unknown_cells: int = 0


def one_component_probe(theta, r, grid_size=512):
    """Count 4-connected components of ``{|theta| < r}`` on a Cartesian grid.

    Heuristic evidence only: components thinner than a grid cell, or
    sitting inside the boundary margin, are invisible.
    """
    if not 0 < r < 1:
        raise ValueError("level r must lie in (0, 1)")
    margin = 2.0 / grid_size
    xs = -1.0 + (np.arange(grid_size) + 0.5) * 2.0 / grid_size
    z = xs[None, :] + 1j * xs[:, None]
    inside = np.abs(z) <= 1.0 - margin
    mods = np.full(z.shape, np.nan)
    mods[inside] = theta.modulus(z[inside])
    unknown = inside & ~np.isfinite(mods)
    mask = inside & np.isfinite(mods) & (mods < r)
    _, count = _core.label_components(mask)
    return OneComponentReport(r, grid_size, count, count <= 1, int(unknown.sum()))
