"""Strichartz-constant laboratory on rectangular tori.

Thin Python layer over the C++ core. Experiment configs are plain dicts with
the same schema as the command-line tool's JSON configs.
"""

import json

from ._core import (
    ConfigError,
    badness_sum,
    dirichlet_approx,
    eisenstein_triple_count,
    kernel_sup,
    nearest_int_dist,
    sample_generic_beta,
    set_worker_count,
    theta_exponents,
    weyl_sum,
    worker_count,
    x_count,
)
from . import _core

__all__ = [
    "ConfigError",
    "badness_sum",
    "catalog",
    "config_hash",
    "defaults",
    "dirichlet_approx",
    "eisenstein_triple_count",
    "kernel_sup",
    "nearest_int_dist",
    "run",
    "sample_generic_beta",
    "set_worker_count",
    "theta_exponents",
    "validate",
    "verify",
    "weyl_sum",
    "worker_count",
    "x_count",
]


def catalog():
    """Experiment catalog: name, description, parameters, tolerances, defaults."""
    return json.loads(_core._catalog_json())


def defaults(name):
    """Default config of one catalog entry."""
    for entry in catalog():
        if entry["name"] == name:
            return entry["defaults"]
    raise ConfigError(f"unknown experiment '{name}'")


def validate(config):
    _core._validate(json.dumps(config))


def config_hash(config):
    return _core._config_hash(json.dumps(config))


def run(config, write=False):
    """Runs an experiment and returns its JSON report as a dict.

    With write=True the artifacts also go to config["output_dir"].
    """
    return json.loads(_core._run_json(json.dumps(config), write))


def verify(directory):
    return json.loads(_core._verify_json(str(directory)))
