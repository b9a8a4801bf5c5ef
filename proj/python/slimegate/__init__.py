"""Optically coupled slime-mould logic gate simulator."""

import json

from ._core import (
    ConfigError,
    ExperimentError,
    GateError,
    NetlistError,
    RecordError,
    __version__,
    calibration_digest,
    cascade,
    default_calibration,
    downsample,
    gate_scene,
    network_resistance,
    z_test,
)
from . import _core


def parse_record(record):
    """Rows of a JSON-lines record."""
    return [json.loads(line) for line in record.splitlines() if line.strip()]


def run(gate, inputs, seed=1, budget=None, script=None, scene=None, calibration=None):
    """Runs one gate. Returns (outcome dict, record text)."""
    record = _core.run(gate, dict(inputs), seed, budget, script, scene, calibration)
    return parse_record(record)[-1]["outcome"], record


def replay(record):
    """True when the record re-executes to the same final summary."""
    match, _, _ = _core.replay(record)
    return match


def campaign(name, trials=40, seed=1, gate="pnot", budget=None, variable="gap", levels=(), calibration=None):
    """Runs a campaign. Returns (summary row dict, record text)."""
    record, _ = _core.campaign(name, trials, seed, gate, budget, variable, list(levels), calibration)
    return parse_record(record)[-1], record


__all__ = [
    "ConfigError",
    "ExperimentError",
    "GateError",
    "NetlistError",
    "RecordError",
    "__version__",
    "calibration_digest",
    "campaign",
    "cascade",
    "default_calibration",
    "downsample",
    "gate_scene",
    "network_resistance",
    "parse_record",
    "replay",
    "run",
    "z_test",
]
