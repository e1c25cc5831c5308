"""Regularity classification and sampled-data control synthesis."""

import json as _json

from . import _core
from ._core import ControlSignal, ControlSystem, Partition, endpoint, nnls, scenario_names, subset_sum_gap_uniform

SCHEMA = _core.SCHEMA

__all__ = [
    "ControlSignal",
    "ControlSystem",
    "Partition",
    "SCHEMA",
    "average_project",
    "classify",
    "endpoint",
    "estimate_threshold",
    "load_system",
    "nnls",
    "run_scenario",
    "scenario_names",
    "subset_sum_gap_uniform",
    "synthesize",
]


def load_system(config, control=None):
    """Build (system, control) from dicts; control defaults to config["control"]."""
    system = ControlSystem(_json.dumps(config))
    if control is None:
        control = config["control"]
    return system, ControlSignal(system, _json.dumps(control))


def classify(system, control, kind="weak-U", **kwargs):
    return _json.loads(_core.classify(system, control, kind, **kwargs))


def synthesize(system, control, target, partition, method="conic", **kwargs):
    if isinstance(partition, int):
        partition = Partition.uniform(system.T, partition)
    return _json.loads(_core.synthesize(system, control, list(target), partition, method, **kwargs))


def estimate_threshold(system, control, target, n_max, method="conic", seed=0):
    return _json.loads(_core.estimate_threshold(system, control, list(target), n_max, method, seed))


def average_project(control, partition):
    return [list(v) for v in _core.average_project(control, partition)]


def run_scenario(name, seed=0):
    return _json.loads(_core.run_scenario(name, seed))
