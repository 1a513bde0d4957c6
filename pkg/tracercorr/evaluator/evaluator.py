"""Evaluator accumulating explicit trajectories into a correlation factor."""

from collections.abc import Iterable

from tracercorr.engines.result import TrajectoryRecord, aggregate_trajectories
from tracercorr.evaluator.base import AbstractEvaluator
from tracercorr.evaluator.corrfactor import CorrelationEstimate, estimate
from tracercorr.lattice.base import LatticeSpec, SiteRef


class TrajectoryEvaluator(AbstractEvaluator):
    r"""Correlation factor of a deduplicated trajectory table.

    Trajectories are keyed by their site sequence, so updating with a
    trajectory already seen has no effect.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    n_max : int
        Largest trajectory length taken into account.
    tracer : SiteRef, optional
        Tracer site (default: the lattice's tracer).
    engine : str, optional
        Name recorded in the estimate (default: "table").
    """

    def __init__(
        self,
        spec: LatticeSpec,
        n_max: int,
        tracer: SiteRef | None = None,
        engine: str = "table",
    ):
        self.spec = spec
        self.n_max = n_max
        self.tracer = spec.tracer if tracer is None else tracer
        self.engine = engine
        self.records: dict[tuple[SiteRef, ...], TrajectoryRecord] = {}

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(lattice={self.spec.name!r}, "
            f"n_max={self.n_max}, trajectories={len(self.records)})"
        )

    def update(self, records: Iterable[TrajectoryRecord]) -> int:
        r"""Add trajectories, ignoring duplicates.

        Parameters
        ----------
        records : Iterable[TrajectoryRecord]
            Trajectories to add.

        Returns
        -------
        int
            Number of trajectories that were new.
        """
        added = 0
        for record in records:
            if record.sites not in self.records:
                self.records[record.sites] = record
                added += 1
        return added

    def compute(self) -> CorrelationEstimate:
        r"""Compute the correlation factor of the current table.

        Returns
        -------
        CorrelationEstimate
            Estimate over the distinct trajectories.
        """
        table = aggregate_trajectories(
            self.records.values(), self.n_max, engine=self.engine
        )
        result = estimate(table, self.spec, self.tracer)
        result.metadata["trajectories"] = len(self.records)
        return result

    def reset(self):
        """Forget every trajectory."""
        self.records = {}
