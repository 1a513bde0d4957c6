"""TracerCorr: correlation factors of vacancy-mediated tracer diffusion."""

# Import submodules
from . import (
    engines,
    errors,
    evaluator,
    ising,
    lattice,
    utils,
)

__all__ = [
    "engines",
    "errors",
    "evaluator",
    "ising",
    "lattice",
    "utils",
]


__version__ = "0.1.0"
