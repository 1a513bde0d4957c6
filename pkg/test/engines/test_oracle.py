"""Unit tests for the enumeration oracle and arrival tables."""

import pytest

from tracercorr.engines import (
    ENGINES,
    EnumerationEngine,
    MatrixUpdateEngine,
    PropagationResult,
    RandomWalkEngine,
    TrajectoryRecord,
    aggregate_trajectories,
    enumerate_trajectories,
    get_engine,
)
from tracercorr.errors import ConfigurationError, EngineInfeasibleError
from tracercorr.ising import AnnealEngine
from tracercorr.lattice import SiteRef


def _sites(*subs):
    return tuple(SiteRef((0, 0), s) for s in subs)


class TestEnumeration:
    """Test exhaustive trajectory enumeration."""

    def test_four_cycle(self, four_cycle, uniform_model):
        """Test the trajectory list of the four-site ring.

        Parameters
        ----------
        four_cycle : LatticeSpec
            Four-site ring.
        uniform_model : HopModel
            Hop model without barriers.
        """
        records = enumerate_trajectories(
            four_cycle, uniform_model, four_cycle.start, four_cycle.tracer, 4
        )
        assert {r.sites for r in records} == {
            _sites(1, 0),
            _sites(1, 2, 3, 0),
            _sites(1, 2, 1, 0),
        }
        by_sites = {r.sites: r for r in records}
        assert by_sites[_sites(1, 0)].weight == 0.5
        assert by_sites[_sites(1, 2, 3, 0)].weight == 0.125
        assert by_sites[_sites(1, 2, 3, 0)].final_neighbor == SiteRef((0, 0), 3)
        assert by_sites[_sites(1, 2, 3, 0)].theta_cos == pytest.approx(0.0, abs=1e-12)
        assert by_sites[_sites(1, 2, 1, 0)].theta_cos == pytest.approx(-1.0)

    def test_triangle(self, triangle, uniform_model):
        """Odd-length trajectories exist on the triangle.

        Parameters
        ----------
        triangle : LatticeSpec
            Three-site ring.
        uniform_model : HopModel
            Hop model without barriers.
        """
        records = enumerate_trajectories(
            triangle, uniform_model, triangle.start, triangle.tracer, 3
        )
        assert sorted(r.sites for r in records) == [_sites(1, 0), _sites(1, 2, 0)]
        assert [r.n_steps for r in records if r.weight == 0.25] == [3]

    def test_square_n4(self, square_spec, uniform_model):
        """The square lattice has one trajectory of length 2 and five of length 4.

        Parameters
        ----------
        square_spec : LatticeSpec
            Auto-sized square lattice.
        uniform_model : HopModel
            Hop model without barriers.
        """
        records = enumerate_trajectories(
            square_spec, uniform_model, square_spec.start, square_spec.tracer, 4
        )
        lengths = sorted(r.n_steps for r in records)
        assert lengths == [2, 4, 4, 4, 4, 4]
        for record in records:
            assert record.sites[0] == square_spec.start
            assert record.sites[-1] == square_spec.tracer
            assert square_spec.tracer not in record.sites[:-1]
            assert record.weight == 0.25 ** (record.n_steps - 1)

    def test_guard(self, square_spec, uniform_model):
        """Enumerations above the guard are refused.

        Parameters
        ----------
        square_spec : LatticeSpec
            Auto-sized square lattice.
        uniform_model : HopModel
            Hop model without barriers.
        """
        engine = EnumerationEngine(guard=64)
        spec = square_spec
        with pytest.raises(EngineInfeasibleError, match="guard"):
            engine.arrivals(spec, uniform_model, spec.start, spec.tracer, 5)
        result = engine.arrivals(spec, uniform_model, spec.start, spec.tracer, 4)
        assert result.per_step_arrivals[4][spec.start] == pytest.approx(3 / 64)


class TestPropagationResult:
    """Test arrival tables."""

    def setup_method(self):
        """Setup the test."""
        self.a, self.b = SiteRef((1, 0)), SiteRef((0, 1))
        self.result = PropagationResult(
            per_step_arrivals={2: {self.a: 0.25}, 3: {}, 4: {self.a: 0.05, self.b: 0.02}},
            n_max=4,
            stderr={2: {self.a: 0.01}, 3: {}, 4: {self.a: 0.01, self.b: 0.01}},
            walkers=1000,
            metadata={"seed": 1},
        )

    def test_truncate(self):
        """Truncation drops longer trajectories and keeps sample data."""
        short = self.result.truncate(3)
        assert short.n_max == 3
        assert set(short.per_step_arrivals) == {2, 3}
        assert short.captured_mass == 0.25
        assert short.stochastic
        assert short.metadata == {"seed": 1}
        assert self.result.captured_mass == pytest.approx(0.32)

    def test_to_dict(self, square_spec):
        """Tables are keyed by length and neighbor label.

        Parameters
        ----------
        square_spec : LatticeSpec
            Auto-sized square lattice.
        """
        data = self.result.to_dict(square_spec)
        assert data["n_max"] == 4
        assert data["walkers"] == 1000
        assert set(data["arrivals"]) == {"2", "3", "4"}

    def test_aggregate(self):
        """Trajectory weights are summed by length and final neighbor."""
        records = [
            TrajectoryRecord((self.a, self.b), 0.5, self.a, -1.0),
            TrajectoryRecord((self.a, self.a, self.a, self.b), 0.1, self.a, -1.0),
            TrajectoryRecord((self.a, self.b, self.b, self.b), 0.2, self.a, -1.0),
            TrajectoryRecord((self.a,) * 5 + (self.b,), 0.9, self.a, -1.0),
        ]
        result = aggregate_trajectories(records, 4, engine="anneal")
        assert result.engine == "anneal"
        assert result.per_step_arrivals[2] == {self.a: 0.5}
        assert result.per_step_arrivals[4] == {self.a: pytest.approx(0.3)}
        assert result.per_step_arrivals[3] == {}
        assert 6 not in result.per_step_arrivals


class TestRegistry:
    """Test engine lookup by name."""

    def test_names(self):
        """Every engine is reachable by name."""
        assert set(ENGINES) == {"mu", "crw", "anneal", "oracle"}
        assert isinstance(get_engine("mu", mode="count"), MatrixUpdateEngine)
        assert isinstance(get_engine("crw", num_walkers=10), RandomWalkEngine)
        assert isinstance(get_engine("anneal"), AnnealEngine)
        assert isinstance(get_engine("oracle"), EnumerationEngine)

    def test_unknown(self):
        """Unknown names are configuration errors."""
        with pytest.raises(ConfigurationError, match="Invalid engine"):
            get_engine("exact")
