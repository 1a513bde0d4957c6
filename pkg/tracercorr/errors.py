"""Exception hierarchy and process exit codes."""

from hydra.errors import HydraException
from omegaconf.errors import OmegaConfBaseException


class TracerCorrError(Exception):
    r"""Base class for all errors raised by the package."""

    exit_code = 1


class ConfigurationError(TracerCorrError, ValueError):
    r"""Invalid configuration: unknown names, missing barriers, bad files."""

    exit_code = 2


class SampleFormatError(ConfigurationError):
    r"""Malformed line in an externally produced sample file.

    Parameters
    ----------
    message : str
        Description of the problem.
    line : int
        1-based line number of the offending sample.
    """

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class DomainError(TracerCorrError, ValueError):
    r"""Arguments outside the domain of an operation."""

    exit_code = 2


class DivergenceError(DomainError):
    r"""The correlation factor diverges (average cosine equal to one)."""


class LatticeBoundsError(TracerCorrError, IndexError):
    r"""A site or trajectory left the lattice extent.

    Under auto-sizing this is unreachable, so it signals a sizing bug.
    """

    exit_code = 1


class EngineInfeasibleError(TracerCorrError, RuntimeError):
    r"""The requested engine run exceeds its feasibility guard."""

    exit_code = 3


def exit_code(exc: BaseException) -> int:
    r"""Map an exception onto the process exit code.

    Parameters
    ----------
    exc : BaseException
        The exception that ended the run.

    Returns
    -------
    int
        2 for configuration and domain errors, including Hydra composition
        and OmegaConf errors, 3 for engine infeasibility, 1 for anything
        else.
    """
    if isinstance(exc, TracerCorrError):
        return exc.exit_code
    if isinstance(exc, HydraException | OmegaConfBaseException):
        return ConfigurationError.exit_code
    return 1
