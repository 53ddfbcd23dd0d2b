"""Stability analysis and simulation of P2P swarms."""

from ._core import (
    Scenario,
    ScenarioError,
    analyze,
    branching_moments,
    delta,
    find_consts,
    kingman_bound,
    mginfty_bound,
    sample_top_layer_z,
    simulate,
)

__all__ = [
    "Scenario",
    "ScenarioError",
    "analyze",
    "branching_moments",
    "delta",
    "find_consts",
    "kingman_bound",
    "mginfty_bound",
    "sample_top_layer_z",
    "simulate",
]
