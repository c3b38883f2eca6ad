"""Consensus design for linear interconnected multi-agent systems."""

import json

from . import _core
from ._core import (
    LimasError,
    Model,
    closed_loop_matrix,
    gain_is_sound,
    laplacian,
    reduced_closed_loop_matrix,
    simulate_discrete,
    simultaneous_stabilization,
)

__all__ = [
    "LimasError",
    "Model",
    "analytic_sufficient_test",
    "closed_loop_matrix",
    "design_gain",
    "example_config",
    "gain_is_sound",
    "laplacian",
    "lp_sufficient_test",
    "model_from_config",
    "necessary_test",
    "reduced_closed_loop_matrix",
    "scalar_test",
    "simulate_discrete",
    "simultaneous_stabilization",
]


def example_config(name):
    return json.loads(_core.example_config(name))


def model_from_config(config):
    """Build a Model from a run-config dict (same schema as the CLI)."""
    return _core.model_from_config(json.dumps(config))


def scalar_test(model):
    return json.loads(_core.scalar_test(model))


def lp_sufficient_test(model, min_margin=1e-9):
    return json.loads(_core.lp_sufficient_test(model, min_margin))


def analytic_sufficient_test(model):
    return json.loads(_core.analytic_sufficient_test(model))


def necessary_test(model):
    return json.loads(_core.necessary_test(model))


def design_gain(model, tests=()):
    """Returns {"summary": report, "reports": [report, ...]}."""
    return json.loads(_core.design_gain(model, list(tests)))
