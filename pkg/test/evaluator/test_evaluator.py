"""Unit tests for the trajectory evaluator."""

import pytest

from tracercorr.engines import enumerate_trajectories
from tracercorr.evaluator import TrajectoryEvaluator


class TestTrajectoryEvaluator:
    """Test accumulation of trajectory tables."""

    def test_update_compute_reset(self, square_spec, uniform_model):
        """Duplicates are ignored and the estimate matches the exact value.

        Parameters
        ----------
        square_spec : LatticeSpec
            Auto-sized square lattice.
        uniform_model : HopModel
            Hop model without barriers.
        """
        spec = square_spec
        records = enumerate_trajectories(
            spec, uniform_model, spec.start, spec.tracer, 4
        )
        evaluator = TrajectoryEvaluator(spec, 4, engine="anneal")
        assert evaluator.update(records[:3]) == 3
        assert evaluator.update(records) == len(records) - 3
        assert evaluator.update(records) == 0
        assert "trajectories=6" in repr(evaluator)

        est = evaluator.compute()
        assert est.f == pytest.approx(45 / 83)
        assert est.engine == "anneal"
        assert est.metadata["trajectories"] == 6

        evaluator.reset()
        assert evaluator.compute().f == 1.0

    def test_truncation(self, square_spec, uniform_model):
        """Trajectories longer than n_max are left out.

        Parameters
        ----------
        square_spec : LatticeSpec
            Auto-sized square lattice.
        uniform_model : HopModel
            Hop model without barriers.
        """
        spec = square_spec
        records = enumerate_trajectories(
            spec, uniform_model, spec.start, spec.tracer, 4
        )
        evaluator = TrajectoryEvaluator(spec, 2)
        evaluator.update(records)
        assert evaluator.compute().f == pytest.approx(0.6)
