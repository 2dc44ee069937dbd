"""Python front end to the lbmo_euler core: norms, Biot-Savart, the solver and scenarios."""

import json as _json
from pathlib import Path as _Path

from ._lbmo import (  # noqa: F401
    Domain,
    GridSpec,
    LbmoError,
    NumericalError,
    g_of,
    g_psi,
    known_scenarios,
    lbmo_estimate,
    lbmo_example,
    linear_map_star,
    ll_norm_estimate,
    lp_norm,
    max_admissible_j_max,
    mollify,
    phi,
    solve,
    taylor_green,
    velocity,
)
from . import _lbmo


def default_config(scenario, seed=0):
    """Default config of a scenario as a dict (name, scenario, seed, out_dir, params)."""
    return _json.loads(_lbmo._default_config(scenario, seed))


def run_scenario(config):
    """Run a config dict; returns the report dict also written to out_dir/report.json."""
    return _json.loads(_lbmo._run_scenario(_json.dumps(config)))


def recompute_report(out_dir):
    """Rebuild a report from the run.json and CSV files in out_dir."""
    return _json.loads(_lbmo._recompute_report(_Path(out_dir)))
