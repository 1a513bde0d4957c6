"""Engines computing first-arrival tables."""

from hydra.utils import get_class

from tracercorr.engines.base import AbstractEngine, check_setup
from tracercorr.engines.crw import (
    FirstPassageTally,
    RandomWalkEngine,
    WalkConfig,
    simulate,
    tally_to_arrivals,
)
from tracercorr.engines.mu import (
    FieldState,
    MatrixUpdateEngine,
    init_field,
    propagate_step,
    run,
)
from tracercorr.engines.oracle import EnumerationEngine, enumerate_trajectories
from tracercorr.engines.result import (
    PropagationResult,
    TrajectoryRecord,
    aggregate_trajectories,
)
from tracercorr.errors import ConfigurationError

ENGINES = {
    "mu": "tracercorr.engines.mu.MatrixUpdateEngine",
    "crw": "tracercorr.engines.crw.RandomWalkEngine",
    "anneal": "tracercorr.ising.sampler.AnnealEngine",
    "oracle": "tracercorr.engines.oracle.EnumerationEngine",
}


def get_engine(name: str, **kwargs) -> AbstractEngine:
    r"""Instantiate an engine by name.

    Parameters
    ----------
    name : str
        One of ``mu``, ``crw``, ``anneal`` or ``oracle``.
    **kwargs : dict
        Engine parameters.

    Returns
    -------
    AbstractEngine
        The engine.

    Raises
    ------
    ConfigurationError
        If the name is unknown.
    """
    if name not in ENGINES:
        raise ConfigurationError(f"Invalid engine {name}")
    return get_class(ENGINES[name])(**kwargs)


__all__ = [
    "ENGINES",
    "AbstractEngine",
    "EnumerationEngine",
    "FieldState",
    "FirstPassageTally",
    "MatrixUpdateEngine",
    "PropagationResult",
    "RandomWalkEngine",
    "TrajectoryRecord",
    "WalkConfig",
    "aggregate_trajectories",
    "check_setup",
    "enumerate_trajectories",
    "get_engine",
    "init_field",
    "propagate_step",
    "run",
    "simulate",
    "tally_to_arrivals",
]
