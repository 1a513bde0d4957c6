"""Abstract class for the evaluator class."""

from abc import ABC, abstractmethod


class AbstractEvaluator(ABC):
    r"""Abstract class for evaluators accumulating trajectories."""

    @abstractmethod
    def update(self, records):
        r"""Add trajectories to the evaluator.

        Parameters
        ----------
        records : Iterable[TrajectoryRecord]
            Trajectories to add.
        """

    @abstractmethod
    def compute(self):
        r"""Compute the estimate."""

    @abstractmethod
    def reset(self):
        """Reset the evaluator."""
