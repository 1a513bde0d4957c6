"""Correlation factor estimates, convergence tables and sensitivity checks."""

from tracercorr.evaluator.base import AbstractEvaluator
from tracercorr.evaluator.convergence import COLUMNS, convergence_table
from tracercorr.evaluator.corrfactor import (
    CorrelationEstimate,
    average_cosine,
    correlation_factor,
    estimate,
    per_step_cosine,
)
from tracercorr.evaluator.coverage import trajectory_coverage
from tracercorr.evaluator.dropout import DropoutReport, dropout_sensitivity
from tracercorr.evaluator.evaluator import TrajectoryEvaluator

__all__ = [
    "COLUMNS",
    "AbstractEvaluator",
    "CorrelationEstimate",
    "DropoutReport",
    "TrajectoryEvaluator",
    "average_cosine",
    "convergence_table",
    "correlation_factor",
    "dropout_sensitivity",
    "estimate",
    "per_step_cosine",
    "trajectory_coverage",
]
