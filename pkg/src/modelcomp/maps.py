"""Holomorphic self-maps of the unit disk.

Every map is an immutable expression node that evaluates value and
derivative on numpy arrays. Rational nodes also expose their numerator and
denominator (ascending coefficients), which the exact counting engine uses.
"""
import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    CompositionTooDeep,
    EvaluationAtEssentialSingularity,
    NotContained,
    NotSelfMap,
    NotTangent,
    PointOutsideDomain,
    ZeroNotInterior,
)
from .geometry import EvalResult
from .inner import InnerFunction

MAX_COMPOSE_DEPTH = 16
SELF_MAP_SAMPLES = 512
SELF_MAP_TOL = 1e-9
DOMAIN_TOL = 1e-12
_EPS = np.finfo(float).eps


def _cplx(v):
    if isinstance(v, (list, tuple)):
        re, im = v
        return complex(re, im)
    return complex(v)


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


class MapExpr:
    """Base class of the expression tree."""

    kind = None
    depth = 1

    def __call__(self, z):
        """Vectorised ``(value, derivative)`` at points of the closed disk."""
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) > 1 + DOMAIN_TOL):
            raise PointOutsideDomain("map evaluated outside the closed unit disk")
        return self._eval(z)

    def _eval(self, z):
        raise NotImplementedError

    def value(self, z):
        return self(z)[0]

    @property
    def phi0(self):
        return complex(self._eval(np.zeros(1, dtype=complex))[0][0])

    def rational_form(self):
        """``(num, den)`` ascending coefficient arrays, or None."""
        return None

    @property
    def is_rational(self):
        return self.rational_form() is not None

    def boundary_values(self, xi):
        """Boundary values with NaN where the radial limit is not computable."""
        xi = np.asarray(xi, dtype=complex)
        try:
            return self._eval_lenient(xi)[0]
        except EvaluationAtEssentialSingularity:
            return np.full(xi.shape, np.nan + 0j)

    def _eval_lenient(self, z):
        return self._eval(z)

    def _check_self_map(self):
        xi = np.exp(2j * np.pi * np.arange(SELF_MAP_SAMPLES) / SELF_MAP_SAMPLES)
        vals = self._eval_lenient(xi)[0]
        worst = np.nanmax(np.abs(vals)) if np.any(np.isfinite(vals)) else 0.0
        if worst > 1 + SELF_MAP_TOL:
            raise NotSelfMap(f"|phi| reaches {worst:.6g} on the unit circle")

    def kernel_gap(self, lam, one_minus_lam_bar, tau):
        """``1 - conj(lam) * phi(exp(i tau))`` from boundary values."""
        return 1 - np.conj(lam) * self.boundary_values(np.exp(1j * np.asarray(tau)))

    def to_json(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()})"


class Identity(MapExpr):
    kind = "identity"

    def _eval(self, z):
        return z.copy(), np.ones_like(z)

    def rational_form(self):
        return np.array([0, 1], dtype=complex), np.array([1], dtype=complex)

    def to_json(self):
        return {"kind": "identity"}


class Scale(MapExpr):
    kind = "scale"

    def __init__(self, c):
        c = complex(c)
        if abs(c) > 1 + SELF_MAP_TOL:
            raise NotSelfMap(f"scale factor {c} has modulus > 1")
        self.c = c

    def _eval(self, z):
        return self.c * z, np.full_like(z, self.c)

    def rational_form(self):
        return np.array([0, self.c], dtype=complex), np.array([1], dtype=complex)

    def to_json(self):
        return {"kind": "scale", "c": _pair(self.c)}


class Moebius(MapExpr):
    """(a z + b) / (c z + d).

    Coefficients are kept exactly as given (no rescaling), so that maps
    with exact fixed points such as 2z / (3 - z) keep them in floating point.
    """

    kind = "moebius"

    def __init__(self, a, b, c, d, check=True):
        coeffs = np.array([a, b, c, d], dtype=complex)
        big = np.max(np.abs(coeffs))
        if big == 0:
            raise ValueError("all Moebius coefficients vanish")
        self.a, self.b, self.c, self.d = (complex(x) for x in coeffs)
        det = self.a * self.d - self.b * self.c
        if abs(det) < 1e-14 * big**2:
            raise ValueError("degenerate Moebius map (ad - bc = 0)")
        if self.c != 0 and abs(self.d / self.c) <= 1 + DOMAIN_TOL:
            raise NotSelfMap("Moebius pole lies in the closed unit disk")
        if check:
            self._check_self_map()

    @property
    def coefficients(self):
        return self.a, self.b, self.c, self.d

    def _eval(self, z):
        den = self.c * z + self.d
        val = (self.a * z + self.b) / den
        der = (self.a * self.d - self.b * self.c) / den**2
        return val, der

    def rational_form(self):
        return np.array([self.b, self.a]), np.array([self.d, self.c])

    def kernel_gap(self, lam, one_minus_lam_bar, tau):
        """``1 - conj(lam) * phi(exp(i tau))`` without cancellation near 1.

        Expands the numerator about ``xi = 1`` using ``1 - conj(lam)`` and
        ``1 - xi = -expm1(i tau)`` supplied to full relative precision.
        """
        xi = np.exp(1j * tau)
        one_minus_xi = -np.expm1(1j * tau)
        lb = np.conj(lam)
        fixed = (self.c + self.d) - (self.a + self.b)
        num = fixed + one_minus_lam_bar * (self.a + self.b) - (self.c - lb * self.a) * one_minus_xi
        return num / (self.c * xi + self.d)

    def to_json(self):
        return {"kind": "moebius", "a": _pair(self.a), "b": _pair(self.b),
                "c": _pair(self.c), "d": _pair(self.d)}


class Rational(MapExpr):
    """num(z) / den(z), ascending coefficients."""

    kind = "rational"

    def __init__(self, num, den, check=True):
        self.num = np.trim_zeros(np.asarray(num, dtype=complex), "b")
        self.den = np.trim_zeros(np.asarray(den, dtype=complex), "b")
        if self.den.size == 0:
            raise ValueError("zero denominator")
        if self.num.size == 0:
            self.num = np.zeros(1, dtype=complex)
        if self.den.size > 1:
            poles = P.polyroots(self.den)
            if np.any(np.abs(poles) <= 1 + DOMAIN_TOL):
                raise NotSelfMap("denominator vanishes in the closed unit disk")
        self._dnum = P.polyder(self.num)
        self._dden = P.polyder(self.den)
        if check:
            self._check_self_map()

    def _eval(self, z):
        n, d = P.polyval(z, self.num), P.polyval(z, self.den)
        dn, dd = P.polyval(z, self._dnum), P.polyval(z, self._dden)
        return n / d, (dn * d - n * dd) / d**2

    def rational_form(self):
        return self.num.copy(), self.den.copy()

    def to_json(self):
        return {"kind": "rational", "num": [_pair(c) for c in self.num],
                "den": [_pair(c) for c in self.den]}


class Polynomial(Rational):
    kind = "polynomial"

    def __init__(self, coeffs, check=True):
        super().__init__(coeffs, [1.0], check=check)

    def to_json(self):
        return {"kind": "polynomial", "coeffs": [_pair(c) for c in self.num]}


class InnerMap(MapExpr):
    """An inner function used as a self-map (Blaschke or singular inner)."""

    def __init__(self, theta):
        self.theta = theta
        self.kind = "singularInner" if theta.atoms else "blaschke"

    def _eval(self, z):
        val, der, _ = self.theta.evaluate(z, strict=True)
        return val, der

    def _eval_lenient(self, z):
        val, der, _ = self.theta.evaluate(z, strict=False)
        return val, der

    def rational_form(self):
        if not self.theta.is_finite_blaschke:
            return None
        num = np.array([1], dtype=complex)
        den = np.array([1], dtype=complex)
        for lam in self.theta.zeros:
            if lam == 0:
                num = P.polymul(num, [0, 1])
            else:
                u = abs(lam) / lam
                num = P.polymul(num, [u * lam, -u])
                den = P.polymul(den, [1, -np.conj(lam)])
        return num, den

    def to_json(self):
        doc = {"kind": self.kind}
        doc.update(self.theta.to_json())
        return doc


class Compose(MapExpr):
    """outer(inner(z))."""

    kind = "compose"

    def __init__(self, outer, inner):
        self.outer, self.inner = outer, inner
        self.depth = max(outer.depth, inner.depth) + 1
        if self.depth > MAX_COMPOSE_DEPTH:
            raise CompositionTooDeep(f"composition depth {self.depth} > {MAX_COMPOSE_DEPTH}")

    def _eval(self, z):
        w, dw = self.inner._eval(z)
        v, dv = self.outer._eval(w)
        return v, dv * dw

    def _eval_lenient(self, z):
        w, dw = self.inner._eval_lenient(z)
        v, dv = self.outer._eval_lenient(w)
        return v, dv * dw

    def rational_form(self):
        fo, fi = self.outer.rational_form(), self.inner.rational_form()
        if fo is None or fi is None:
            return None
        (p, q), (r, s) = fo, fi
        n = max(len(p), len(q)) - 1

        def lift(coeffs):
            out = np.zeros(1, dtype=complex)
            for k, ck in enumerate(coeffs):
                term = P.polymul(P.polypow(r, k), P.polypow(s, n - k))
                out = P.polyadd(out, ck * term)
            return out

        return lift(p), lift(q)

    def to_json(self):
        return {"kind": "compose", "outer": self.outer.to_json(),
                "inner": self.inner.to_json()}


def map_from_json(doc):
    kind = doc.get("kind")
    if kind == "identity":
        return Identity()
    if kind == "scale":
        return Scale(_cplx(doc["c"]))
    if kind == "moebius":
        return Moebius(*(_cplx(doc[k]) for k in "abcd"))
    if kind == "polynomial":
        return Polynomial([_cplx(c) for c in doc["coeffs"]])
    if kind == "rational":
        return Rational([_cplx(c) for c in doc["num"]], [_cplx(c) for c in doc["den"]])
    if kind in ("blaschke", "singularInner"):
        theta = InnerFunction.from_json({k: v for k, v in doc.items() if k != "kind"})
        return InnerMap(theta)
    if kind == "compose":
        return Compose(map_from_json(doc["outer"]), map_from_json(doc["inner"]))
    raise ValueError(f"unknown map kind {kind!r}")


def eval_map(phi, z):
    """Value, derivative and an error bound of ``phi`` at one point."""
    z = complex(z)
    if abs(z) > 1 + DOMAIN_TOL:
        raise PointOutsideDomain(f"|z| = {abs(z)} > 1")
    val, der = phi(np.array([z]))
    val, der = complex(val[0]), complex(der[0])
    if isinstance(phi, InnerMap):
        cond = float(phi.theta.tail_error(np.array([z]))[0])
    else:
        cond = 0.0
    cond += 8 * phi.depth * _EPS * max(1.0, abs(val))
    return EvalResult(val, der, cond)


def conformal_onto_disk(center, radius, tol=1e-12):
    """Moebius map of the unit disk onto ``{|w - center| < radius}`` fixing 0
    and the point where that disk touches the unit circle."""
    center = complex(center)
    radius = float(radius)
    if not abs(center) < radius:
        raise ZeroNotInterior(f"0 is not inside the disk |w - {center}| < {radius}")
    reach = abs(center) + radius
    if reach > 1 + tol:
        raise NotContained("target disk is not contained in the unit disk")
    if reach < 1 - tol:
        raise NotTangent("target disk does not touch the unit circle")
    if abs(center) <= tol:
        return Moebius(1, 0, 0, 1)
    # w = center + radius * (z + beta) / (1 + conj(beta) z), beta = -center / radius
    beta = -center / radius
    return Moebius(center * np.conj(beta) + radius, center + radius * beta, np.conj(beta), 1)


def schwarz_pick_defect(phi, z):
    """``(1 - |phi(z)|^2) - |phi'(z)| (1 - |z|^2)``; non-negative for self-maps."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise PointOutsideDomain("schwarz_pick_defect requires |z| < 1")
    val, der = phi(z)
    out = (1 - np.abs(val) ** 2) - np.abs(der) * (1 - np.abs(z) ** 2)
    return float(out) if out.ndim == 0 else out
