"""Compactness diagnostics for composition operators from model spaces.

The indicator ``Q(w) = N_phi(w) (1 - |theta(w)|^2) / (1 - |w|^2)`` is
sampled on circles ``|w| = 1 - 2^-k``; its annulus suprema give the trend
used for criterion (N). Criterion (S) is read from the singular mass of
Clark measures at spectrum points.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .clark import clark_masses
from .counting import DELTA_BD, nevanlinna, nevanlinna_grid
from .errors import HypothesisViolated
from .inner import one_component_probe, spectrum_estimate

DECAY_FACTOR = 0.05
DECAY_FLOOR = 1e-6
PLATEAU_BAND = 0.20
SINGULAR_THRESHOLD = 0.05
MIN_VERDICT_DEPTH = 8
NOT_ONE_COMPONENT_LEVEL = 0.99
ONE_COMPONENT_LEVELS = (0.5, 0.25, 0.1)

COMPACT = "COMPACT-evidence"
NON_COMPACT = "NON-COMPACT-evidence"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class IndicatorSample:
    w: complex
    q: float
    n_value: float
    theta_mod: float
    annulus: int = -1
    flags: tuple = ()


def _one_minus_abs_sq(w, one_minus_r=None):
    if one_minus_r is None:
        return 1.0 - abs(w) ** 2
    return one_minus_r * (2.0 - one_minus_r)


def _combine(n_value, theta_mod, one_minus_w_sq):
    if n_value == 0:
        return 0.0
    return n_value * (1.0 - theta_mod**2) / one_minus_w_sq


def indicator(phi, theta, w, delta_bd=DELTA_BD):
    """One sample of ``Q(w)``."""
    w = complex(w)
    if not abs(w) < 1:
        raise ValueError("w must lie in the open disk")
    sample = nevanlinna(phi, w, delta_bd=delta_bd)
    mod = float(theta.modulus(np.array([w]))[0])
    q = _combine(sample.value, mod, _one_minus_abs_sq(w))
    return IndicatorSample(w, q, sample.value, mod, flags=sample.flags)


@dataclass(frozen=True)
class SweepResult:
    samples: list
    suprema: dict
    depth: int
    angles: int
    partial: bool = False
    notes: tuple = ()


def sweep(phi, theta, angles=64, depth=14, k_min=2, delta_bd=DELTA_BD, theta_free=False):
    """Indicator samples at ``1 - 2^-k`` (k = k_min..depth) times equispaced angles.

    Only samples with a nonempty fiber are kept; annulus suprema are 0 when
    no fiber meets the circle. With ``theta_free`` the sampled quantity is
    ``N_phi(w) / log(1/|w|)`` instead of ``Q``.
    """
    ts = 2 * np.pi * np.arange(angles) / angles
    unit = np.exp(1j * ts)
    active = np.ones(angles, dtype=bool)
    samples, suprema, notes = [], {}, []
    partial = False
    for k in range(k_min, depth + 1):
        eps = 2.0**-k
        r = 1.0 - eps
        ws = r * unit[active]
        idx = np.flatnonzero(active)
        n_vals, edge = nevanlinna_grid(phi, ws, delta_bd=delta_bd)
        if np.any(edge):
            partial = True
            notes.append(f"annulus {k}: {int(np.sum(edge))} boundary-root flags")
        if not phi.is_rational and k == k_min:
            # costly engines: later circles only revisit angles hit here
            active[idx[n_vals == 0]] = False
        hit = n_vals > 0
        if theta_free:
            mods = np.zeros(ws.size)
            denom = -np.log1p(-eps)
        else:
            mods = theta.modulus(ws) if np.any(hit) else np.zeros(ws.size)
            denom = eps * (2.0 - eps)
        sup = 0.0
        for j in np.flatnonzero(hit):
            flags = ("boundary-root",) if edge[j] else ()
            if theta_free:
                q = float(n_vals[j] / denom)
            elif not np.isfinite(mods[j]):
                flags += ("theta-unavailable",)
                partial = True
                q = float("nan")
            else:
                q = _combine(float(n_vals[j]), float(mods[j]), denom)
            samples.append(IndicatorSample(complex(ws[j]), q, float(n_vals[j]),
                                           float(mods[j]), k, flags))
            if np.isfinite(q):
                sup = max(sup, q)
        suprema[k] = sup
    return SweepResult(samples, suprema, depth, angles, partial, tuple(notes))


@dataclass(frozen=True)
class Trend:
    kind: str
    level: float = float("nan")
    slope: float = float("nan")


def classify_trend(suprema):
    """Decaying, plateau(level), growing or inconclusive from annulus suprema."""
    ks = sorted(suprema)
    vals = np.array([suprema[k] for k in ks])
    last = vals[-3:]
    ref = suprema.get(4, vals[0])
    tail = np.array([k for k in ks if k >= ks[len(ks) // 2]])
    tv = np.array([suprema[k] for k in tail])
    slope = float("nan")
    if np.all(tv > 0) and tv.size >= 2:
        slope = float(np.polyfit(tail, np.log(tv), 1)[0])
    top = float(np.max(last))
    if top < DECAY_FLOOR or top < DECAY_FACTOR * ref:
        return Trend("decaying", top, slope)
    mean = float(np.mean(last))
    if mean > 0 and np.all(np.abs(last - mean) <= PLATEAU_BAND * mean):
        return Trend("plateau", mean, slope)
    if np.isfinite(slope) and slope > 0:
        return Trend("growing", top, slope)
    return Trend("inconclusive", top, slope)


def essential_norm(phi, theta=None, sweep_result=None, angles=64, depth=14):
    """Supremum over the last three annuli of ``N/log(1/|w|)`` (no theta)
    or of ``Q`` (with theta)."""
    if sweep_result is None:
        sweep_result = sweep(phi, theta, angles, depth, theta_free=theta is None)
    ks = sorted(sweep_result.suprema)[-3:]
    return float(max(sweep_result.suprema[k] for k in ks))


def pw_ratio(phi, w, delta_bd=DELTA_BD):
    """``N_phi(w) / max(1 - |w|^2, |1 - w|^2)``."""
    w = complex(w)
    n_value = nevanlinna(phi, w, delta_bd=delta_bd).value
    return n_value / max(1.0 - abs(w) ** 2, abs(1.0 - w) ** 2)


def _lambda_parts(lam, angle, depth):
    """``(lambda, 1 - |lambda|^2, 1 - conj(lambda))`` to full precision."""
    if angle is None:
        lam = complex(lam)
        r = abs(lam)
        angle = float(np.angle(lam)) if r > 0 else 0.0
        depth = 1.0 - r
    lam = (1.0 - depth) * np.exp(1j * angle)
    one_minus_sq = depth * (2.0 - depth)
    one_minus_bar = -np.expm1(-1j * angle) + depth * np.exp(-1j * angle)
    return lam, one_minus_sq, one_minus_bar


def kernel_composition_norm(phi, lam=None, angle=None, depth=None, n=2**14, method="auto"):
    """``||C_phi k~_lambda||^2 = (1 - |lambda|^2) int |1 - conj(lambda) phi|^-2 dm``.

    ``lambda`` may be given by ``angle`` and ``depth = 1 - |lambda|`` for
    points too close to the circle to store as a complex number. The
    trapezoid rule is used when the kernel peak is resolved by ``n``
    points; otherwise an adaptive rule with breakpoints graded around the
    peak.
    """
    lam, one_minus_sq, one_minus_bar = _lambda_parts(lam, angle, depth)
    if one_minus_sq == 0:
        raise ValueError("lambda must lie in the open disk")

    def integrand(tau):
        gap = phi.kernel_gap(lam, one_minus_bar, tau)
        return one_minus_sq / np.abs(gap) ** 2

    if method == "auto":
        method = "trapezoid" if one_minus_sq > 64 * 2 * np.pi / n else "adaptive"
    if method == "trapezoid":
        vals = integrand(2 * np.pi * np.arange(n) / n)
        ok = np.isfinite(vals)
        return float(np.sum(vals[ok]) / np.sum(ok))
    if method != "adaptive":
        raise ValueError(f"unknown method {method!r}")

    coarse = 2 * np.pi * np.arange(4096) / 4096 - np.pi
    gaps = np.abs(phi.kernel_gap(lam, one_minus_bar, coarse))
    j = int(np.nanargmin(gaps))
    step = coarse[1] - coarse[0]

    def gap_sq(t):
        return float(np.abs(phi.kernel_gap(lam, one_minus_bar, np.array([t])))[0] ** 2)

    res = minimize_scalar(gap_sq, bounds=(coarse[j] - step, coarse[j] + step),
                          method="bounded", options={"xatol": 1e-16})
    peak = float(res.x)
    width = max(np.sqrt(gap_sq(peak)), 1e-300)
    offsets = [0.0]
    s = width
    while s < np.pi:
        offsets.append(s)
        s *= 4.0
    offsets.append(np.pi)
    total = 0.0
    for lo, hi in zip(offsets[:-1], offsets[1:]):
        for sign in (1.0, -1.0):
            a, b = sorted((peak + sign * lo, peak + sign * hi))
            val, _ = quad(lambda t: float(integrand(np.array([t]))[0]), a, b,
                          epsabs=0.0, epsrel=1e-11, limit=200)
            total += val
    return total / (2 * np.pi)


@dataclass(frozen=True)
class SparseRatio:
    m: int
    angle: float
    depth: float
    alpha: float
    norm_sq: float

    @property
    def ratio(self):
        return self.norm_sq / self.alpha


def sparse_kernel_ratios(phi, theta):
    """``||C_phi k~_{lambda_m}||^2 / alpha_m`` along a sparse tangential family."""
    fam = theta.family or {}
    if fam.get("name") != "sparse-tangential":
        raise ValueError("inner function is not a sparse tangential family")
    a_ratio = fam["params"]["alpha_ratio"]
    out = []
    for m, (t, d) in enumerate(zip(theta.angles, theta.depths), start=1):
        out.append(SparseRatio(m, float(t), float(d), a_ratio**m,
                               kernel_composition_norm(phi, angle=t, depth=d)))
    return out


@dataclass(frozen=True)
class ComponentStatus:
    status: str  # "one-component", "not-one-component" or "unknown"
    evidence: str


def one_component_status(theta, spectrum=None):
    """Certificate or grid evidence for whether ``theta`` is one-component.

    For a one-component inner function the radial liminf of ``|theta|``
    vanishes at every spectrum point, so a spectrum point with radial
    liminf near 1 certifies the opposite. Otherwise sublevel sets are
    checked for connectivity on a grid.
    """
    if spectrum is None:
        spectrum = spectrum_estimate(theta)
    probes = dict(spectrum.probes)
    for point in spectrum.points():
        est = probes.get(complex(point), float("nan"))
        if np.isfinite(est) and est >= NOT_ONE_COMPONENT_LEVEL:
            return ComponentStatus(
                "not-one-component",
                f"radial liminf of |theta| at spectrum point {point:.6g} is {est:.4f}")
    for level in ONE_COMPONENT_LEVELS:
        rep = one_component_probe(theta, level)
        if rep.component_count >= 1 and rep.connected:
            return ComponentStatus("one-component",
                                   f"{{|theta| < {level}}} connected on a {rep.grid_size} grid")
    return ComponentStatus("unknown", "no connected sublevel set found on the probe grid")


@dataclass(frozen=True)
class CompactnessVerdict:
    annulus_suprema: dict
    trend: Trend
    criterion_s: list
    classification: str
    essential_norm: float
    one_component: ComponentStatus = None
    caveats: list = field(default_factory=list)

    def to_json(self, scenario=None):
        return {
            "scenario": scenario,
            "annulus_suprema": [[int(k), float(v)] for k, v in sorted(self.annulus_suprema.items())],
            "trend": {"kind": self.trend.kind, "level": _num(self.trend.level),
                      "slope": _num(self.trend.slope)},
            "criterion_s": [[[a.real, a.imag], float(m)] for a, m in self.criterion_s],
            "classification": self.classification,
            "essential_norm": float(self.essential_norm),
            "one_component": None if self.one_component is None else {
                "status": self.one_component.status, "evidence": self.one_component.evidence},
            "caveats": list(self.caveats),
        }


def _num(x):
    return None if x is None or not np.isfinite(x) else float(x)


def verdict(phi, theta, sweep_result, clark_reports, spectrum=None, component=None):
    """Combine the indicator trend with criterion (S).

    (S) always implies compactness; the converse is only available for
    one-component ``theta``. A decaying indicator with (S) failing is
    therefore consistent (compact) for other ``theta`` and contradictory
    for one-component ``theta``.
    """
    if abs(phi.phi0) > 1e-12:
        raise HypothesisViolated("verdicts require phi(0) = 0")
    caveats = []
    if sweep_result.depth < MIN_VERDICT_DEPTH:
        caveats.append(f"sweep depth {sweep_result.depth} below {MIN_VERDICT_DEPTH}")
    if sweep_result.partial:
        caveats.append("sweep contains flagged samples: " + "; ".join(sweep_result.notes))
    if spectrum is None:
        spectrum = spectrum_estimate(theta)
    if component is None:
        component = one_component_status(theta, spectrum)
    trend = classify_trend(sweep_result.suprema)
    crit = [(complex(r.alpha), float(r.singular_mass)) for r in clark_reports]
    s_fails = any(m > SINGULAR_THRESHOLD for _, m in crit)
    s_holds = bool(crit) and not s_fails
    if not crit:
        caveats.append("no Clark reports at spectrum points; criterion (S) not evaluated")
    one = component.status == "one-component"

    if trend.kind == "decaying":
        if s_holds or not crit:
            cls = COMPACT
        elif one:
            cls = INCONCLUSIVE
            caveats.append("indicator decays but (S) fails for a one-component theta")
        else:
            cls = COMPACT
            caveats.append("(S) fails, which does not contradict compactness: "
                           f"theta is {component.status} ({component.evidence})")
    elif trend.kind in ("plateau", "growing"):
        if s_holds:
            cls = INCONCLUSIVE
            caveats.append("indicator does not decay although (S) holds")
        else:
            cls = NON_COMPACT
    elif s_holds:
        cls = COMPACT
        caveats.append("indicator trend inconclusive; (S) alone implies compactness")
    elif s_fails and one:
        cls = NON_COMPACT
        caveats.append("indicator trend inconclusive; (S) fails for a one-component theta")
    else:
        cls = INCONCLUSIVE
    if cls == NON_COMPACT and s_fails:
        caveats.append(f"theta one-component status: {component.status} ({component.evidence})")
    ks = sorted(sweep_result.suprema)[-3:]
    ess = float(max(sweep_result.suprema[k] for k in ks))
    return CompactnessVerdict(dict(sweep_result.suprema), trend, crit, cls, ess,
                              component, caveats)


@dataclass(frozen=True)
class Analysis:
    sweep: SweepResult
    spectrum: object
    clark_reports: list
    verdict: CompactnessVerdict


def analyze(phi, theta, angles=64, depth=14, alphas=(), boundary_grid=4096):
    """Sweep, spectrum, Clark reports at spectrum points and verdict."""
    sw = sweep(phi, theta, angles, depth)
    spec = spectrum_estimate(theta)
    points = [complex(p) for p in spec.points()]
    targets = points + [complex(a) for a in alphas if all(abs(complex(a) - p) > 1e-12
                                                          for p in points)]
    reports = [clark_masses(phi, a, boundary_grid, extra_candidates=points) for a in targets]
    return Analysis(sw, spec, reports, verdict(phi, theta, sw, reports, spec))
