"""Binary quadratic encoding of vacancy trajectories."""

from tracercorr.ising.io import (
    QuboSidecar,
    export_qubo,
    read_qubo,
    read_samples,
    read_sidecar,
)
from tracercorr.ising.problem import (
    VIOLATIONS,
    DecodedTrajectory,
    IsingProblem,
    brute_force_ground,
    build,
    calibration_bound,
    decode,
    default_penalty,
    encode,
    energy,
    path_weight,
)
from tracercorr.ising.sampler import (
    AnnealEngine,
    AnnealSchedule,
    anneal,
    complete_paths,
)

__all__ = [
    "VIOLATIONS",
    "AnnealEngine",
    "AnnealSchedule",
    "DecodedTrajectory",
    "IsingProblem",
    "QuboSidecar",
    "anneal",
    "brute_force_ground",
    "build",
    "calibration_bound",
    "complete_paths",
    "decode",
    "default_penalty",
    "encode",
    "energy",
    "export_qubo",
    "path_weight",
    "read_qubo",
    "read_samples",
    "read_sidecar",
]
