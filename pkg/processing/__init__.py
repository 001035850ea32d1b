"""
Processing module for dimension-sweep experiments and exponent fitting
"""

from .experiment_runner import (
    ExperimentConfig,
    ExperimentRunner,
    RatioSeries,
    Scenario,
    run_ratio_experiment,
    scenario_presets,
    unit_vector_probe,
)
from .fitting import ExponentFit, Verdict, VerificationReport, fit_exponent, verify_against_bounds

__all__ = [
    'ExperimentConfig',
    'ExperimentRunner',
    'RatioSeries',
    'Scenario',
    'run_ratio_experiment',
    'scenario_presets',
    'unit_vector_probe',
    'ExponentFit',
    'Verdict',
    'VerificationReport',
    'fit_exponent',
    'verify_against_bounds',
]
