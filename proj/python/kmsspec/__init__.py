"""Python access to the KMS spectrum library."""

import json

from . import _core
from ._core import (
    ClosedSet,
    FractionPair,
    KmsError,
    approximate_unit_D,
    classify_preset,
    classify_spectrum,
    closure_order,
    fraction_pair,
    mobius,
    sl2_order,
    sphere_sizes,
    target_phi,
    verify,
)


def solve_spectrum(phi, R=10.0, tol=1e-6, grid_n=10000):
    return json.loads(_core.solve_spectrum(phi, R, tol, grid_n))


def run(config):
    """Run a config given as a dict (reals as decimal strings); returns the report dict."""
    return json.loads(_core.run(json.dumps(config)))


def run_to_dir(config, directory):
    return _core.run_to_dir(json.dumps(config), str(directory))


__all__ = [
    "ClosedSet",
    "FractionPair",
    "KmsError",
    "approximate_unit_D",
    "classify_preset",
    "classify_spectrum",
    "closure_order",
    "fraction_pair",
    "mobius",
    "run",
    "run_to_dir",
    "sl2_order",
    "solve_spectrum",
    "sphere_sizes",
    "target_phi",
    "verify",
]
