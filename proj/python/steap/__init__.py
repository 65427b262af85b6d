"""Sparse factor-graph trajectory estimation and planning."""

import csv
import io
import json

from . import _steap
from ._steap import (
    WorldGenerationError,
    gp_interp_coeffs,
    process_noise_cov,
    se2_exp,
    se2_log,
    transition_matrix,
)

__all__ = [
    "WorldGenerationError",
    "bench",
    "default_bench_config",
    "default_problem",
    "generate_world",
    "gp_interp_coeffs",
    "process_noise_cov",
    "render_svg",
    "run",
    "se2_exp",
    "se2_log",
    "transition_matrix",
]


def _dump(obj):
    return "" if obj is None else json.dumps(obj)


def default_problem():
    return json.loads(_steap.default_problem())


def default_bench_config():
    return json.loads(_steap.default_bench_config())


def generate_world(seed, problem=None):
    return json.loads(_steap.generate_world(seed, _dump(problem)))


def run(mode="STEAP", problem=None, seed=1, n_dyn=0.0, n_cam=0.0, **sim):
    """Runs one episode. Returns {"metrics": ..., "record": ...}."""
    sim = dict(sim, seed=seed, n_dyn=n_dyn, n_cam=n_cam)
    return json.loads(_steap.run(mode, _dump(problem), json.dumps(sim)))


def bench(config=None):
    """Runs a benchmark grid. Returns the three CSV tables as lists of dicts."""
    out = json.loads(_steap.bench(_dump(config)))
    return {k: list(csv.DictReader(io.StringIO(v))) for k, v in out.items()}


def render_svg(record, snapshot=-1):
    return _steap.render_svg(json.dumps(record), snapshot)
