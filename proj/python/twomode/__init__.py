"""Two two-level atoms coupled to two field modes.

Configs are JSON texts or plain dicts with the schema documented in the README.
"""

import json as _json

from . import _core
from ._core import (
    NumericalError,
    TruncationError,
    concurrence,
    eof,
    hamiltonian,
    negativity_atoms,
    propagator_djc,
    propagator_smsc,
    small_squeezing_negativities,
)

__all__ = [
    "NumericalError",
    "TruncationError",
    "concurrence",
    "eof",
    "hamiltonian",
    "negativity_atoms",
    "normalize_config",
    "propagator_djc",
    "propagator_smsc",
    "simulate",
    "small_squeezing_negativities",
    "sweep",
    "table1",
    "verify",
]


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def normalize_config(config):
    """Config with all defaults materialized, as a dict."""
    return _json.loads(_core.normalize_config(_text(config)))


def simulate(config):
    """Time series of one scenario: dict with columns, data (ndarray), classification, csv."""
    return _core.simulate(_text(config))


def sweep(config, threads=1):
    """Rows of a one-parameter sweep; returns (parameter path, list of row dicts)."""
    return _core.sweep(_text(config), threads)


def verify(config):
    """Largest atomic trace distance between the two-mode model and its reduced model."""
    return _core.verify(_text(config))


def table1(only=None, threads=1, t_max=25.0, samples=2001):
    """Classification table report as a dict."""
    return _json.loads(_core.table1_json(only or "", threads, t_max, samples))
