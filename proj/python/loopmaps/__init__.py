"""Harmonic maps into U(n) and Grassmannians from holomorphic potentials."""

import json

from ._core import (
    ConfigError,
    NumericalError,
    harmonic_map as _harmonic_map,
    iwasawa,
    run_command as _run_command,
    schema_version,
    simple_factor,
)

__all__ = [
    "ConfigError",
    "NumericalError",
    "harmonic_map",
    "iwasawa",
    "run",
    "schema_version",
    "simple_factor",
]


def _as_text(config):
    return config if isinstance(config, str) else json.dumps(config)


def run(command, config, want_fields=False):
    """Run a command on a config (dict or JSON text).

    Returns (exit_code, report, files) with the report parsed and files mapping
    names to bytes. Config problems raise ConfigError.
    """
    code, report, files = _run_command(command, _as_text(config), want_fields)
    return code, json.loads(report), files


def harmonic_map(config):
    """phi = Phi(-1) on the config grid as an array indexed [j, i, row, col]."""
    return _harmonic_map(_as_text(config))
