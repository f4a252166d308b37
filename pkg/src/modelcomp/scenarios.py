"""Preset configurations for the three worked examples."""
import copy

TANGENT_DISK_MAP = {"kind": "moebius", "a": [2, 0], "b": [0, 0], "c": [-1, 0], "d": [3, 0]}
PALEY_WIENER = {"atoms": [{"xi": [1.0, 0.0], "omega": 1.0}]}
SPARSE_FAMILY = {"family": {"name": "sparse-tangential",
                            "params": {"count": 20, "t_ratio": 0.5, "alpha_ratio": 0.5}}}

_BASE = {"sweep": {"angles": 64, "depth": 14}, "clark": {"alphas": [], "boundary_grid": 4096}}

SCENARIOS = {
    "paley-wiener-small": {
        "name": "paley-wiener-small",
        "phi": {"kind": "scale", "c": [0.5, 0.0]},
        "theta": PALEY_WIENER,
        **_BASE,
    },
    "tangent-disk": {
        "name": "tangent-disk",
        "phi": TANGENT_DISK_MAP,
        "theta": PALEY_WIENER,
        **_BASE,
    },
    "sparse-blaschke": {
        "name": "sparse-blaschke",
        "phi": TANGENT_DISK_MAP,
        "theta": SPARSE_FAMILY,
        **_BASE,
    },
}


def scenario_config(name):
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    return copy.deepcopy(SCENARIOS[name])
