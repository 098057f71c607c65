"""Estimators that extend randomized-trial treatment effects to the
population of trial non-participants."""

import json as _json

from ._core import (
    StudyDataset,
    TransportError,
    __version__,
    choose_knots,
    make_dataset,
    rcs_basis,
)
from . import _core as _impl

__all__ = [
    "StudyDataset",
    "TransportError",
    "__version__",
    "analyze",
    "choose_knots",
    "generate_cohort",
    "make_dataset",
    "rcs_basis",
    "read_dataset",
    "run_grid",
]


def analyze(data, config):
    """Runs the full pipeline; config is a dict, the report comes back as one."""
    return _json.loads(_impl.analyze_json(data, _json.dumps(config)))


def read_dataset(path, schema):
    """Reads a CSV per a schema dict; returns (StudyDataset, ingestion log dict)."""
    data, log = _impl.read_dataset_json(str(path), _json.dumps(schema))
    return data, _json.loads(log)


def run_grid(grid, threads=0):
    """Runs a factorial simulation grid (dict); returns the summary CSV text."""
    return _impl.run_grid_json(_json.dumps(grid), threads)


def generate_cohort(scenario, replicate=0):
    """Draws one simulated cohort from a scenario dict."""
    return _impl.generate_cohort(_json.dumps(scenario), replicate)
