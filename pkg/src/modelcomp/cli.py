"""Command-line front end.

``modelcomp --scenario NAME`` or ``modelcomp --config PATH`` runs the
sweep, spectrum, Clark and verdict pipeline and writes ``verdict.json``,
``samples.csv`` and ``clark.csv``. ``modelcomp counting`` dumps counting
function values on a polar target grid.
"""
import argparse
import csv
import hashlib
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from . import __version__, analyzer, clark, counting, inner
from ._core import BACKEND
from .errors import ConfigError, ModelcompError
from .inner import InnerFunction, carleson_separation
from .maps import map_from_json
from .scenarios import SCENARIOS, scenario_config

log = logging.getLogger("modelcomp")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 3
DEFAULT_ANGLES = 64
DEFAULT_DEPTH = 14
DEFAULT_BOUNDARY_GRID = 4096


def _load_schema(name):
    text = resources.files("modelcomp").joinpath("schemas", name).read_text()
    return json.loads(text)


def _validator():
    schemas = {n: _load_schema(n) for n in ("map.schema.json", "inner.schema.json",
                                             "config.schema.json")}
    registry = Registry().with_resources(
        (n, Resource.from_contents(s)) for n, s in schemas.items())
    return Draft202012Validator(schemas["config.schema.json"], registry=registry)


def validate_config(config):
    """Raise :class:`ConfigError` carrying a JSON pointer to the first problem."""
    errors = sorted(_validator().iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        err = min(errors, key=lambda e: (-len(e.absolute_path), str(e.absolute_path)))
        pointer = "".join(f"/{p}" for p in err.absolute_path)
        raise ConfigError(err.message, pointer)
    return config


def config_hash(config):
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _tolerances():
    return {
        "delta_bd": counting.DELTA_BD,
        "cluster_tol": counting.CLUSTER_TOL,
        "decay_factor": analyzer.DECAY_FACTOR,
        "decay_floor": analyzer.DECAY_FLOOR,
        "plateau_band": analyzer.PLATEAU_BAND,
        "singular_threshold": analyzer.SINGULAR_THRESHOLD,
        "not_one_component_level": analyzer.NOT_ONE_COMPONENT_LEVEL,
        "excision_factor": clark.EXCISION_FACTOR,
        "richardson_tol": clark.RICHARDSON_TOL,
        "truncation_budget": inner.DEFAULT_BUDGET,
    }


def _settings(config, depth=None, angles=None, refine=False):
    sw = config.get("sweep", {})
    cl = config.get("clark", {})
    angles = angles or sw.get("angles", DEFAULT_ANGLES)
    grid = cl.get("boundary_grid", DEFAULT_BOUNDARY_GRID)
    if refine:
        angles, grid = 2 * angles, 2 * grid
    return {
        "depth": depth or sw.get("depth", DEFAULT_DEPTH),
        "angles": angles,
        "boundary_grid": grid,
        "alphas": [complex(*a) for a in cl.get("alphas", [])],
    }


def _extras(phi, theta):
    """Scenario-specific diagnostics attached to the verdict."""
    out = {}
    fam = theta.family or {}
    if fam.get("name") == "sparse-tangential":
        ratios = analyzer.sparse_kernel_ratios(phi, theta)
        vals = [r.ratio for r in ratios]
        params = dict(fam["params"], alpha_ratio=1.0)
        zeta = InnerFunction.sparse_tangential(**params)
        out["sparse_ratios"] = [[r.m, r.norm_sq, r.alpha, r.ratio] for r in ratios]
        out["sparse_ratio_max"] = float(max(vals))
        out["sparse_ratio_max_over_min"] = float(max(vals) / min(vals))
        out["carleson_lambda"] = carleson_separation(theta)
        out["carleson_zeta"] = carleson_separation(zeta)
    if len(theta.atoms) == 1 and theta.atoms[0][0] == 1 and not theta.depths.size:
        # approach to 1 along phi of the real radius
        ws = phi.value(1 - 2.0 ** -np.arange(6, 17))
        out["pw_ratio"] = [float(analyzer.pw_ratio(phi, w)) for w in ws
                           if abs(w - phi.phi0) > 1e-12]
    return out


def run_analyze(config, out_dir=None, depth=None, angles=None, refine=False,
                json_only=False, threads=None):
    """Validate, analyze and write the report bundle. Returns (document, exit code)."""
    validate_config(config)
    phi = map_from_json(config["phi"])
    theta = InnerFunction.from_json(config["theta"])
    opts = _settings(config, depth, angles, refine)
    result = analyzer.analyze(phi, theta, opts["angles"], opts["depth"], opts["alphas"],
                              opts["boundary_grid"])
    v = result.verdict
    doc = v.to_json(config.get("name"))
    doc["spectrum_points"] = [[p.real, p.imag] for p in map(complex, result.spectrum.points())]
    doc.update(_extras(phi, theta))
    doc["provenance"] = {
        "config_hash": config_hash(config),
        "tool_version": __version__,
        "backend": BACKEND,
        "sweep": {"depth": opts["depth"], "angles": opts["angles"]},
        "clark_boundary_grid": opts["boundary_grid"],
        "refine": bool(refine),
        "threads": threads,
        "tolerances": _tolerances(),
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verdict.json").write_text(json.dumps(doc, indent=2) + "\n")
        if not json_only:
            write_samples_csv(result.sweep.samples, out / "samples.csv")
            write_clark_csv(result.clark_reports, out / "clark.csv")
            (out / "config.json").write_text(json.dumps(config, indent=2, sort_keys=True) + "\n")
    code = EXIT_INCONCLUSIVE if v.classification == analyzer.INCONCLUSIVE else EXIT_OK
    return doc, code


def write_samples_csv(samples, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["w_re", "w_im", "N", "theta_mod", "Q", "annulus"])
        for s in samples:
            w.writerow([repr(s.w.real), repr(s.w.imag), repr(s.n_value), repr(s.theta_mod),
                        repr(s.q), s.annulus])


def write_clark_csv(reports, path):
    cols = ["alpha_re", "alpha_im", "total_mass", "ac_mass", "singular_mass",
            "excision_bound", "atoms"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in reports:
            row = r.to_row()
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def _analyze_parser():
    p = argparse.ArgumentParser(prog="modelcomp", description=__doc__.splitlines()[0])
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="scenario configuration JSON")
    src.add_argument("--scenario", choices=sorted(SCENARIOS), help="preset scenario")
    p.add_argument("--depth", type=int, help="deepest annulus index K")
    p.add_argument("--angles", type=int, help="sweep angles per circle")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--refine", action="store_true", help="double all grids")
    p.add_argument("--json-only", action="store_true", help="write verdict.json only")
    p.add_argument("--threads", type=int, help="worker cap (recorded; runs single-process)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _counting_parser():
    p = argparse.ArgumentParser(prog="modelcomp counting",
                                description="N_phi on a polar target grid as CSV")
    p.add_argument("--map", required=True, help="map JSON (inline or @path)")
    p.add_argument("--radii", required=True, help="comma-separated radii in (0, 1)")
    p.add_argument("--angles", type=int, default=16)
    p.add_argument("--out", type=Path, default=Path("counting.csv"))
    return p


def _read_json_arg(text):
    if text.startswith("@"):
        return json.loads(Path(text[1:]).read_text())
    return json.loads(text)


def _run_counting(argv):
    args = _counting_parser().parse_args(argv)
    phi = map_from_json(_read_json_arg(args.map))
    radii = [float(r) for r in args.radii.split(",")]
    rows = counting.counting_sweep(phi, radii, args.angles)
    counting.write_counting_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if argv[:1] == ["counting"]:
            return _run_counting(argv[1:])
        args = _analyze_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        if args.config is not None:
            try:
                config = json.loads(args.config.read_text())
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON: {exc}") from exc
        else:
            config = scenario_config(args.scenario)
        doc, code = run_analyze(config, args.out, args.depth, args.angles, args.refine,
                                args.json_only, args.threads)
    except (ModelcompError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"{doc.get('scenario') or 'config'}: {doc['classification']} "
          f"(trend {doc['trend']['kind']}, essential norm {doc['essential_norm']:.4g})")
    return code
