"""Abstract class for arrival engines."""

from abc import ABC, abstractmethod

from tracercorr.engines.result import PropagationResult
from tracercorr.errors import DomainError
from tracercorr.lattice.base import HopModel, LatticeSpec, SiteRef
from tracercorr.lattice.geometry import neighbors


class AbstractEngine(ABC):
    r"""Abstract class for engines producing first-arrival tables.

    Parameters
    ----------
    **kwargs : dict
        Engine parameters, kept for ``__repr__`` and run manifests.
    """

    name: str = "abstract"

    def __init__(self, **kwargs):
        self.parameters = kwargs

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.parameters})"

    @abstractmethod
    def arrivals(
        self,
        spec: LatticeSpec,
        model: HopModel,
        start: SiteRef,
        tracer: SiteRef,
        n_max: int,
    ) -> PropagationResult:
        r"""Compute first-arrival masses for trajectory lengths up to ``n_max``.

        Parameters
        ----------
        spec : LatticeSpec
            The lattice.
        model : HopModel
            Barriers and temperature.
        start : SiteRef
            Vacancy start site S.
        tracer : SiteRef
            Tracer site T.
        n_max : int
            Maximum trajectory length N.
        """


def check_setup(
    spec: LatticeSpec, start: SiteRef, tracer: SiteRef, n_max: int
) -> None:
    r"""Validate the start/tracer pair and the horizon shared by all engines.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    start : SiteRef
        Vacancy start site S.
    tracer : SiteRef
        Tracer site T.
    n_max : int
        Maximum trajectory length N.

    Raises
    ------
    DomainError
        If ``n_max < 2`` or S is not a neighbor of T.
    LatticeBoundsError
        If T lies outside the extent.
    """
    if n_max < 2:
        raise DomainError(f"Invalid n_max {n_max}")
    if start not in [neighbor.site for neighbor in neighbors(spec, tracer)]:
        raise DomainError(
            f"Start site {start} is not adjacent to the tracer {tracer}"
        )
