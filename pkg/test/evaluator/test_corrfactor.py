"""Unit tests for the correlation factor."""

import math

import numpy as np
import pytest

from tracercorr.engines import PropagationResult, run
from tracercorr.errors import DivergenceError, DomainError
from tracercorr.evaluator import (
    average_cosine,
    correlation_factor,
    estimate,
    per_step_cosine,
)


class TestCorrelationFactor:
    """Test the map from average cosine to correlation factor."""

    @pytest.mark.parametrize(
        ("avg_cos", "expected"),
        [(-1.0, 0.0), (0.0, 1.0), (-0.25, 0.6), (0.5, 3.0)],
    )
    def test_values(self, avg_cos, expected):
        """Test known values.

        Parameters
        ----------
        avg_cos : float
            Average cosine.
        expected : float
            Correlation factor.
        """
        assert correlation_factor(avg_cos) == pytest.approx(expected)

    def test_divergence(self):
        """An average cosine of one diverges."""
        with pytest.raises(DivergenceError):
            correlation_factor(1.0)

    @pytest.mark.parametrize("avg_cos", [1.5, -1.01, math.nan])
    def test_out_of_range(self, avg_cos):
        """Values outside [-1, 1] are rejected.

        Parameters
        ----------
        avg_cos : float
            Average cosine.
        """
        with pytest.raises(DomainError):
            correlation_factor(avg_cos)


class TestEstimate:
    """Test estimates of arrival tables."""

    def test_square(self, square_spec, uniform_model):
        """Test the per-length contributions of the square lattice.

        Parameters
        ----------
        square_spec : LatticeSpec
            Auto-sized square lattice.
        uniform_model : HopModel
            Hop model without barriers.
        """
        spec = square_spec
        result = run(spec, uniform_model, spec.start, spec.tracer, 4)
        per_n = per_step_cosine(result, spec, spec.tracer, spec.flow)
        assert per_n[2] == pytest.approx(-0.25)
        assert per_n[3] == 0.0
        assert per_n[4] == pytest.approx(-3 / 64)
        est = estimate(result, spec)
        assert est.avg_cos == average_cosine(result, spec, spec.tracer, spec.flow)
        assert est.f == pytest.approx(45 / 83)
        assert est.stderr_f is None
        assert est.captured_mass == pytest.approx(0.25 + 5 / 64)
        data = est.to_dict()
        assert data["engine"] == "mu"
        assert set(data["per_n"]) == {"2", "3", "4"}

    def test_empty(self, square_spec):
        """A table without arrivals gives an uncorrelated tracer.

        Parameters
        ----------
        square_spec : LatticeSpec
            Auto-sized square lattice.
        """
        est = estimate(PropagationResult({2: {}, 3: {}}, 3), square_spec)
        assert est.avg_cos == 0.0
        assert est.f == 1.0

    def test_flow_override(self, square_spec, uniform_model):
        """A flow perpendicular to every arrival direction gives zero.

        Parameters
        ----------
        square_spec : LatticeSpec
            Auto-sized square lattice.
        uniform_model : HopModel
            Hop model without barriers.
        """
        spec = square_spec
        result = run(spec, uniform_model, spec.start, spec.tracer, 2)
        est = estimate(result, spec, flow=np.array([1.0, 0.0]))
        assert est.avg_cos == pytest.approx(0.0, abs=1e-12)

    def test_sampled_stderr(self, square_spec):
        """Sampled tables carry a standard error of f.

        Parameters
        ----------
        square_spec : LatticeSpec
            Auto-sized square lattice.
        """
        spec = square_spec
        table = PropagationResult(
            {2: {spec.start: 0.25}}, 2, engine="crw", stderr={2: {}}, walkers=10_000
        )
        est = estimate(table, spec)
        se_c = math.sqrt((0.25 - 0.0625) / 10_000)
        assert est.stderr_f == pytest.approx(2 * se_c / 1.25**2)
