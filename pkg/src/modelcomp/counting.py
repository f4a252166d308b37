"""Nevanlinna counting function ``N_phi(w) = sum_{phi(z) = w} -log|z|``.

Two independent engines compute the fiber ``phi^{-1}(w)``:

* ``rational-exact``: eigenvalues of the companion matrix of
  ``num(z) - w den(z)``, Newton-polished.
* ``argument-principle``: winding numbers of ``phi - w`` on an adaptive
  polar quadtree over ``|z| <= 1 - delta_bd``; leaf cells are resolved
  with contour power sums and Newton polishing.

Roots in the annulus ``1 - delta_bd < |z| < 1`` are not counted; each one
would contribute at most ``-log(1 - delta_bd)``, which is reported as an
additive uncertainty.
"""
import csv
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import NoConvergence, TargetEqualsPhiOfZero
from .geometry import HyperbolicDisk

DELTA_BD = 1e-6
CLUSTER_TOL = 1e-8
POLISH_TOL = 1e-12
INITIAL_DEPTH = 4
MAX_DEPTH = 24
CELL_BUDGET = 100_000
LEAF_DIAMETER = 0.05
CLUSTER_DIAMETER = 1e-4
WINDING_SAMPLES = 64
MAX_CONTOUR_SAMPLES = 2**18
MAX_INCREMENT = np.pi / 4
LITTLEWOOD_TOL = 1e-9

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


@dataclass(frozen=True)
class PreimageSet:
    """Solutions of ``phi(z) = w`` in the retained disk, with multiplicities."""

    target: complex
    roots: tuple
    method: str
    residual_bound: float
    boundary_roots: tuple = ()
    partial: bool = False
    delta_bd: float = DELTA_BD
    notes: tuple = ()

    @property
    def total_multiplicity(self):
        return sum(m for _, m in self.roots)

    @property
    def boundary_uncertainty(self):
        count = sum(m for _, m in self.boundary_roots)
        return count * -np.log1p(-self.delta_bd)


@dataclass(frozen=True)
class CountingSample:
    w: complex
    value: float
    littlewood_slack: float
    uncertainty: float = 0.0
    partial: bool = False
    flags: tuple = field(default=())


# ---------------------------------------------------------------- rational


def _fiber_poly(phi, w):
    num, den = phi.rational_form()
    return P.polysub(num, w * den)


def _trim(poly, rel=1e-14):
    poly = np.asarray(poly, dtype=complex)
    scale = np.max(np.abs(poly)) if poly.size else 0.0
    keep = np.nonzero(np.abs(poly) > rel * scale)[0]
    if keep.size == 0:
        return poly[:0]
    return poly[: keep[-1] + 1]


def _newton_poly(poly, z, mult=1, iters=50):
    dpoly = P.polyder(poly)
    for _ in range(iters):
        f = P.polyval(z, poly)
        df = P.polyval(z, dpoly)
        if df == 0:
            break
        step = mult * f / df
        z = z - step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return z


def cluster_roots(zs, tol=CLUSTER_TOL):
    """Merge points closer than ``tol``; returns [(centre, multiplicity)]."""
    out = []
    for z in sorted(zs, key=lambda c: (round(c.real, 12), round(c.imag, 12))):
        for i, (c, m) in enumerate(out):
            if abs(z - c) < tol:
                out[i] = ((c * m + z) / (m + 1), m + 1)
                break
        else:
            out.append((z, 1))
    return out


def _rational_preimages(phi, w, delta_bd, tol):
    poly = _trim(_fiber_poly(phi, w))
    if poly.size <= 1:
        return PreimageSet(w, (), "rational-exact", 0.0, delta_bd=delta_bd)
    raw = np.roots(poly[::-1])
    polished = [_newton_poly(poly, complex(z)) for z in raw]
    clusters = cluster_roots(polished, tol)
    roots, edge = [], []
    for z, m in clusters:
        if m > 1:
            z = _newton_poly(poly, z, mult=m)
        if abs(z) <= 1 - delta_bd:
            roots.append((z, m))
        elif abs(z) < 1:
            edge.append((z, m))
    zs = np.array([z for z, _ in roots], dtype=complex)
    resid = float(np.max(np.abs(phi.value(zs) - w))) if zs.size else 0.0
    return PreimageSet(
        w, tuple(roots), "rational-exact", resid, tuple(edge), bool(edge), delta_bd
    )


def _batch_fiber_roots(phi, ws):
    """All roots of ``num - w den`` for each w: array (len(ws), degree), NaN-padded."""
    num, den = phi.rational_form()
    deg = max(len(num), len(den)) - 1
    num = np.pad(num, (0, deg + 1 - len(num)))
    den = np.pad(den, (0, deg + 1 - len(den)))
    ws = np.asarray(ws, dtype=complex).ravel()
    coeffs = num[None, :] - ws[:, None] * den[None, :]  # ascending
    out = np.full((ws.size, max(deg, 1)), np.nan + 0j)
    if deg == 0:
        return out
    lead = coeffs[:, -1]
    scale = np.max(np.abs(coeffs), axis=1)
    full = np.abs(lead) > 1e-14 * np.maximum(scale, 1e-300)
    if deg == 1:
        out[full, 0] = -coeffs[full, 0] / coeffs[full, 1]
    elif np.any(full):
        c = coeffs[full] / lead[full, None]
        comp = np.zeros((c.shape[0], deg, deg), dtype=complex)
        comp[:, 0, :] = -c[:, -2::-1]
        comp[:, np.arange(1, deg), np.arange(deg - 1)] = 1.0
        out[full] = np.linalg.eigvals(comp)
        # one Newton step per root against the original polynomial
        dc = coeffs[full][:, 1:] * np.arange(1, deg + 1)[None, :]
        z = out[full]
        powers = z[..., None] ** np.arange(deg + 1)
        f = np.einsum("nk,nrk->nr", coeffs[full], powers)
        df = np.einsum("nk,nrk->nr", dc, powers[..., :deg])
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(np.abs(df) > 0, f / df, 0)
        out[full] = np.where(np.abs(step) < 1e-6, z - step, z)
    for i in np.nonzero(~full)[0]:
        r = np.roots(_trim(coeffs[i])[::-1])
        out[i, : r.size] = r
    return out


def nevanlinna_grid(phi, ws, delta_bd=DELTA_BD, method="auto"):
    """``N_phi`` at many targets. Returns (values, boundary_root_counts)."""
    ws = np.asarray(ws, dtype=complex)
    shape = ws.shape
    flat = ws.ravel()
    if method == "auto":
        method = "rational-exact" if phi.is_rational else "argument-principle"
    if method == "rational-exact":
        roots = _batch_fiber_roots(phi, flat)
        mod = np.abs(roots)
        keep = np.isfinite(mod) & (mod <= 1 - delta_bd)
        edge = np.isfinite(mod) & (mod > 1 - delta_bd) & (mod < 1)
        with np.errstate(divide="ignore"):
            contrib = np.where(keep, -np.log(np.where(keep, mod, 1.0)), 0.0)
        vals = contrib.sum(axis=1)
        nedge = edge.sum(axis=1)
    else:
        vals = np.empty(flat.size)
        nedge = np.zeros(flat.size, dtype=int)
        for i, w in enumerate(flat):
            pre = preimages(phi, w, delta_bd=delta_bd, method=method)
            vals[i] = sum(-m * np.log(abs(z)) for z, m in pre.roots)
            nedge[i] = sum(m for _, m in pre.boundary_roots)
    return vals.reshape(shape), nedge.reshape(shape)


# ---------------------------------------------------- argument principle


def _arg_increments(f):
    return np.angle(np.roll(f, -1, axis=-1) / f)


def _adaptive_winding(func, param, n0=WINDING_SAMPLES, nmax=MAX_CONTOUR_SAMPLES):
    """Winding number of ``func(param(s))`` for s in [0, 1), refined locally
    until every argument increment is below ``MAX_INCREMENT``."""
    s = np.arange(n0) / n0
    f = func(param(s))
    while True:
        if not np.all(np.isfinite(f)) or np.any(f == 0):
            raise NoConvergence("function vanishes or is undefined on the contour")
        inc = _arg_increments(f)
        bad = np.abs(inc) > MAX_INCREMENT
        if not bad.any():
            wind = inc.sum() / (2 * np.pi)
            k = int(np.rint(wind))
            if abs(wind - k) > 1e-6:
                raise NoConvergence(f"winding sum {wind} is not an integer")
            return k, s.size
        if s.size + bad.sum() > nmax:
            raise NoConvergence("contour sampling budget exhausted")
        nxt = np.append(s[1:], 1.0)
        mids = 0.5 * (s[bad] + nxt[bad])
        fm = func(param(mids))
        s = np.concatenate([s, mids])
        f = np.concatenate([f, fm])
        order = np.argsort(s, kind="stable")
        s, f = s[order], f[order]


def _sector_param(cell):
    r0, r1, t0, t1 = cell

    def param(s):
        s = np.asarray(s, dtype=float) * 4.0
        edge = np.minimum(s.astype(int), 3)
        u = s - edge
        r = np.select([edge == 0, edge == 1, edge == 2], [r1, r1 + (r0 - r1) * u, r0],
                      r0 + (r1 - r0) * u)
        t = np.select([edge == 0, edge == 1, edge == 2], [t0 + (t1 - t0) * u, t1,
                      t1 + (t0 - t1) * u], t0)
        return r * np.exp(1j * t)

    return param


def _circle_param(radius):
    return lambda s: radius * np.exp(2j * np.pi * np.asarray(s, dtype=float))


def _sector_windings(phi, w, cells):
    """Winding numbers for many sector cells at once, falling back to the
    adaptive routine for cells whose uniform sampling is too coarse."""
    n = WINDING_SAMPLES
    s = np.arange(n) / n
    pts = np.stack([_sector_param(c)(s) for c in cells])
    f = phi.value(pts.ravel()).reshape(pts.shape) - w
    out = np.empty(len(cells), dtype=int)
    inc = _arg_increments(f)
    ok = np.all(np.isfinite(f), axis=1) & np.all(np.abs(inc) <= MAX_INCREMENT, axis=1)
    wind = inc.sum(axis=1) / (2 * np.pi)
    out[ok] = np.rint(wind[ok]).astype(int)
    for i in np.nonzero(~ok)[0]:
        out[i] = _adaptive_winding(lambda z: phi.value(z) - w, _sector_param(cells[i]))[0]
    return out


def _contour_power_sums(phi, w, points_fn, m):
    """``s_k = (1/2 pi i) oint z^k phi'/(phi - w) dz`` for k = 1..m by
    Gauss-Legendre on each contour piece."""
    z, dz = points_fn()
    val, der = phi(z)
    g = der / (val - w) * dz
    return np.array([np.sum(z**k * g) for k in range(1, m + 1)]) / (2j * np.pi)


def _sector_quadrature(cell):
    r0, r1, t0, t1 = cell
    x = 0.5 * (_GL_NODES + 1)
    wts = 0.5 * _GL_WEIGHTS
    zs, dzs = [], []
    # outer arc, ccw
    t = t0 + (t1 - t0) * x
    zs.append(r1 * np.exp(1j * t)); dzs.append(1j * r1 * np.exp(1j * t) * (t1 - t0) * wts)
    # radial edge at t1, inward
    r = r1 + (r0 - r1) * x
    zs.append(r * np.exp(1j * t1)); dzs.append(np.exp(1j * t1) * (r0 - r1) * wts)
    # inner arc, cw
    t = t1 + (t0 - t1) * x
    zs.append(r0 * np.exp(1j * t)); dzs.append(1j * r0 * np.exp(1j * t) * (t0 - t1) * wts)
    # radial edge at t0, outward
    r = r0 + (r1 - r0) * x
    zs.append(r * np.exp(1j * t0)); dzs.append(np.exp(1j * t0) * (r1 - r0) * wts)
    return np.concatenate(zs), np.concatenate(dzs)


def _circle_quadrature(radius, n=256):
    t = 2 * np.pi * np.arange(n) / n
    z = radius * np.exp(1j * t)
    return z, 1j * z * (2 * np.pi / n)


def _roots_from_power_sums(s):
    """Roots of the monic polynomial with power sums ``s`` (Newton identities)."""
    m = len(s)
    e = [1.0 + 0j]
    for k in range(1, m + 1):
        acc = sum((-1) ** (i - 1) * e[k - i] * s[i - 1] for i in range(1, k + 1))
        e.append(acc / k)
    coeffs = [(-1) ** k * e[k] for k in range(m + 1)]  # descending
    return np.roots(coeffs)


def _newton_map(phi, w, z, mult=1, iters=60):
    if not np.isfinite(z):
        z = 0j
    if abs(z) > 1:
        z = z / abs(z) * (1 - 1e-15)
    for _ in range(iters):
        val, der = phi(np.array([z]))
        f, df = val[0] - w, der[0]
        if df == 0 or not np.isfinite(df):
            break
        step = mult * f / df
        if abs(step) > 0.1:
            step *= 0.1 / abs(step)
        z = z - step
        if abs(z) > 1:
            z = z / abs(z) * (1 - 1e-15)
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return complex(z)


def _polish(phi, w, z, mult, reach):
    """Newton step from ``z``, kept only if it stays within ``reach``."""
    out = _newton_map(phi, w, z, mult)
    return out if abs(out - z) <= reach else z


def _cell_centre(cell):
    r0, r1, t0, t1 = cell
    return 0.5 * (r0 + r1) * np.exp(0.5j * (t0 + t1))


def _in_leaf(z, kind, geom, pad):
    if not np.isfinite(z):
        return False
    if kind == "disk":
        return abs(z) <= geom + pad
    r0, r1, t0, t1 = geom
    r = abs(z)
    if not r0 - pad <= r <= r1 + pad:
        return False
    dt = (np.angle(z) - t0) % (2 * np.pi)
    return r * (dt - (t1 - t0)) <= pad or r * (2 * np.pi - dt) <= pad


def _cell_diameter(cell):
    r0, r1, t0, t1 = cell
    return max(r1 - r0, r1 * (t1 - t0))


def _split(cell):
    r0, r1, t0, t1 = cell
    rm, tm = 0.5 * (r0 + r1), 0.5 * (t0 + t1)
    return [(r0, rm, t0, tm), (rm, r1, t0, tm), (r0, rm, tm, t1), (rm, r1, tm, t1)]


def _ap_once(phi, w, delta_bd, r_c, t_off):
    R = 1.0 - delta_bd
    f = lambda z: phi.value(z) - w  # noqa: E731
    notes = []
    leaves = []  # (kind, geometry, count)
    central, _ = _adaptive_winding(f, _circle_param(r_c))
    if central:
        leaves.append(("disk", r_c, central))
    nside = 2**INITIAL_DEPTH
    redges = np.linspace(r_c, R, nside + 1)
    tedges = t_off + 2 * np.pi * np.arange(nside + 1) / nside
    cells = [(redges[i], redges[i + 1], tedges[j], tedges[j + 1])
             for j in range(nside) for i in range(nside)]
    depth = INITIAL_DEPTH
    processed = len(cells)
    partial = False
    while cells:
        counts = _sector_windings(phi, w, cells)
        nxt = []
        for cell, cnt in zip(cells, counts):
            if cnt < 0:
                raise NoConvergence("negative winding number on a cell")
            if cnt == 0:
                continue
            diam = _cell_diameter(cell)
            if (cnt == 1 and diam < LEAF_DIAMETER) or diam < CLUSTER_DIAMETER:
                leaves.append(("sector", cell, int(cnt)))
            elif depth >= MAX_DEPTH or processed + 4 > CELL_BUDGET:
                leaves.append(("sector", cell, int(cnt)))
                partial = True
            else:
                nxt.extend(_split(cell))
        processed += len(nxt)
        cells = nxt
        depth += 1
    if partial:
        notes.append("cell budget or depth limit reached")

    roots = []
    for kind, geom, cnt in leaves:
        quad = (lambda g=geom: _circle_quadrature(g)) if kind == "disk" else (
            lambda g=geom: _sector_quadrature(g))
        sums = _contour_power_sums(phi, w, quad, cnt)
        est = _roots_from_power_sums(sums)
        diam = 2 * geom if kind == "disk" else _cell_diameter(geom)
        # near-edge roots spoil the quadrature; restart those from the centre
        centre = 0j if kind == "disk" else _cell_centre(geom)
        est = [z if _in_leaf(z, kind, geom, 0.25 * diam) else centre for z in est]
        single = [_polish(phi, w, complex(z), 1, 2 * diam) for z in est]
        distinct = len(cluster_roots(single, CLUSTER_TOL)) == cnt
        if cnt > 1 and diam < CLUSTER_DIAMETER and not distinct:
            roots.append((_polish(phi, w, complex(np.mean(est)), cnt, 2 * diam), cnt))
        else:
            roots.extend((z, 1) for z in single)
    merged = []
    for z, m in roots:
        hit = next((i for i, (c, _) in enumerate(merged) if abs(z - c) < CLUSTER_TOL), None)
        if hit is None:
            merged.append((z, m))
        else:
            merged[hit] = (merged[hit][0], merged[hit][1] + m)
    merged = [(z, m) for z, m in merged if abs(z) <= R]
    zs = np.array([z for z, _ in merged], dtype=complex)
    resid = float(np.max(np.abs(phi.value(zs) - w))) if zs.size else 0.0
    total = sum(cnt for _, _, cnt in leaves)
    if sum(m for _, m in merged) != total:
        notes.append(f"root count {sum(m for _, m in merged)} != winding count {total}")
        partial = True
    return merged, resid, partial, notes


def _outer_ring_count(phi, w, delta_bd):
    """Roots with ``1 - delta_bd < |z| < 1 - delta_bd/10``; None if unresolved."""
    f = lambda z: phi.value(z) - w  # noqa: E731
    try:
        inner = _adaptive_winding(f, _circle_param(1 - delta_bd))[0]
        outer = _adaptive_winding(f, _circle_param(1 - delta_bd / 10))[0]
    except NoConvergence:
        return None
    return outer - inner


def _ap_preimages(phi, w, delta_bd):
    attempts = [(0.2371, 0.1234567), (0.2213, 0.3141), (0.2531, 0.0577)]
    last = None
    for r_c, t_off in attempts:
        try:
            merged, resid, partial, notes = _ap_once(phi, w, delta_bd, r_c, t_off)
            break
        except NoConvergence as exc:
            last = exc
    else:
        raise NoConvergence(f"argument-principle engine failed: {last}")
    ring = _outer_ring_count(phi, w, delta_bd)
    edge = ()
    notes = list(notes)
    if ring is None:
        notes.append("boundary annulus unresolved")
        partial = True
    elif ring > 0:
        edge = ((complex(np.nan, np.nan), ring),)
        partial = True
    merged.sort(key=lambda zm: (round(zm[0].real, 12), round(zm[0].imag, 12)))
    return PreimageSet(w, tuple(merged), "argument-principle", resid, edge, partial,
                       delta_bd, tuple(notes))


def preimages(phi, w, tol=CLUSTER_TOL, delta_bd=DELTA_BD, method="auto"):
    """The fiber ``phi^{-1}(w)`` inside ``|z| <= 1 - delta_bd``."""
    w = complex(w)
    if not abs(w) < 1:
        raise ValueError("target must lie in the open unit disk")
    if method == "auto":
        method = "rational-exact" if phi.is_rational else "argument-principle"
    if method == "rational-exact":
        if not phi.is_rational:
            raise ValueError("rational-exact engine needs a rational map")
        return _rational_preimages(phi, w, delta_bd, tol)
    if method == "argument-principle":
        return _ap_preimages(phi, w, delta_bd)
    raise ValueError(f"unknown method {method!r}")


def boundary_winding(phi, w, radius=1.0):
    """Winding number of ``phi - w`` around the circle of the given radius."""
    return _adaptive_winding(lambda z: phi.value(z) - w, _circle_param(radius))[0]


def _check_target(phi, w):
    if abs(w - phi.phi0) < 1e-12:
        raise TargetEqualsPhiOfZero("N_phi is infinite at phi(0)")


def nevanlinna(phi, w, method="auto", delta_bd=DELTA_BD):
    """``N_phi(w)`` with the Littlewood slack ``-log|w| - N``."""
    w = complex(w)
    _check_target(phi, w)
    pre = preimages(phi, w, delta_bd=delta_bd, method=method)
    value = float(sum(-m * np.log(abs(z)) for z, m in pre.roots))
    slack = -np.log(abs(w)) - value if w != 0 else np.inf
    flags = ("partial",) if pre.partial else ()
    return CountingSample(w, value, float(slack), pre.boundary_uncertainty, pre.partial, flags)


@dataclass(frozen=True)
class CountingChecks:
    littlewood_ok: bool
    slack: float
    sub_mean_ok: bool
    sub_mean_gap: float
    quadrature_tolerance: float


def _disk_average(phi, center, radius, n_r, n_t, delta_bd):
    x, wts = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * radius * (x + 1)
    wr = 0.5 * radius * wts * 2 * r / radius**2
    t = 2 * np.pi * (np.arange(n_t) + 0.5) / n_t
    pts = center + r[:, None] * np.exp(1j * t[None, :])
    vals, _ = nevanlinna_grid(phi, pts, delta_bd=delta_bd)
    return float(np.sum(wr[:, None] * vals) / n_t)


def counting_checks(phi, w, eps, delta_bd=DELTA_BD):
    """Littlewood bound and sub-mean-value inequality at ``w``.

    The average is taken over the Euclidean disk centred at ``w`` inscribed
    in the pseudo-hyperbolic disk ``D_eps(w)``, capped at ``|w|/2`` so that
    it stays away from ``phi(0) = 0`` where ``N_phi`` is not subharmonic.
    """
    w = complex(w)
    if abs(phi.phi0) > 1e-12:
        raise ValueError("counting_checks requires phi(0) = 0")
    if w == 0:
        raise ValueError("counting_checks requires w != 0")
    sample = nevanlinna(phi, w, delta_bd=delta_bd)
    slack = sample.littlewood_slack
    radius = min(HyperbolicDisk(w, eps).inscribed_radius(), 0.5 * abs(w))
    coarse = _disk_average(phi, w, radius, 8, 32, delta_bd)
    fine = _disk_average(phi, w, radius, 16, 64, delta_bd)
    qtol = abs(fine - coarse) + 1e-9
    gap = coarse - sample.value
    return CountingChecks(slack >= -LITTLEWOOD_TOL, slack, gap >= -qtol, gap, qtol)


def counting_sweep(phi, radii, n_angles, delta_bd=DELTA_BD):
    """Rows ``(w_re, w_im, N, slack, flags)`` on a polar target grid."""
    rows = []
    radii = np.asarray(radii, dtype=float)
    t = 2 * np.pi * np.arange(n_angles) / n_angles
    ws = radii[:, None] * np.exp(1j * t[None, :])
    vals, nedge = nevanlinna_grid(phi, ws, delta_bd=delta_bd)
    phi0 = phi.phi0
    for w, n, e in zip(ws.ravel(), vals.ravel(), nedge.ravel()):
        flags = []
        if abs(w - phi0) < 1e-12:
            rows.append((w.real, w.imag, float("inf"), float("-inf"), "phi0"))
            continue
        if e:
            flags.append("boundary")
        slack = -np.log(abs(w)) - n if w != 0 else float("inf")
        rows.append((w.real, w.imag, float(n), float(slack), ";".join(flags)))
    return rows


def write_counting_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["w_re", "w_im", "N", "slack", "flags"])
        for w_re, w_im, n, slack, flags in rows:
            writer.writerow([repr(float(w_re)), repr(float(w_im)), repr(float(n)),
                             repr(float(slack)), flags])
