"""Unit tests for the annealing sampler."""

import pytest

from tracercorr.engines import MatrixUpdateEngine, enumerate_trajectories
from tracercorr.errors import ConfigurationError, DomainError, EngineInfeasibleError
from tracercorr.evaluator import estimate
from tracercorr.ising import (
    AnnealEngine,
    AnnealSchedule,
    anneal,
    build,
    complete_paths,
)
from tracercorr.lattice import HopModel, SiteRef, build_builtin


class TestSchedule:
    """Test annealing schedules."""

    def test_temperatures(self):
        """Temperatures fall geometrically from hot to cold."""
        temps = AnnealSchedule(t_hot=8.0, t_cold=0.5, sweeps=5).temperatures()
        assert temps[0] == pytest.approx(8.0)
        assert temps[-1] == pytest.approx(0.5)
        assert temps[1] / temps[0] == pytest.approx(temps[2] / temps[1])

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"t_hot": 1.0, "t_cold": 2.0},
            {"t_hot": 1.0, "t_cold": 0.0},
            {"sweeps": 0},
        ],
    )
    def test_invalid(self, kwargs):
        """Test invalid schedules.

        Parameters
        ----------
        kwargs : dict
            Schedule fields.
        """
        with pytest.raises(DomainError):
            AnnealSchedule(**kwargs)


class TestAnneal:
    """Test trajectory recovery by annealing."""

    def setup_method(self):
        """Setup the test."""
        self.schedule = AnnealSchedule(sweeps=100)

    def test_four_cycle(self, four_cycle, uniform_model):
        """Both length-4 returns on the ring are found.

        Parameters
        ----------
        four_cycle : LatticeSpec
            Four-site ring.
        uniform_model : HopModel
            Hop model without barriers.
        """
        problem = build(four_cycle, uniform_model, four_cycle.start, four_cycle.tracer, 4)
        found = anneal(problem, self.schedule, restarts=64, seed=1, window=32, batch=16)
        assert all(t.valid for t in found)
        assert {t.sites for t in found} == {
            tuple(SiteRef((0, 0), s) for s in (1, 2, 3, 0)),
            tuple(SiteRef((0, 0), s) for s in (1, 2, 1, 0)),
        }

    def test_reproducible(self, uniform_model):
        """The found set does not depend on the number of workers.

        Parameters
        ----------
        uniform_model : HopModel
            Hop model without barriers.
        """
        spec = build_builtin("square", 4)
        problem = build(spec, uniform_model, spec.start, spec.tracer, 4)
        kwargs = {"restarts": 48, "seed": 9, "window": 1000, "batch": 16}
        serial = anneal(problem, AnnealSchedule(sweeps=30), **kwargs)
        parallel = anneal(problem, AnnealSchedule(sweeps=30), n_jobs=2, **kwargs)
        assert [t.sites for t in serial] == [t.sites for t in parallel]

    def test_limits(self, uniform_model):
        """Test argument checks and the variable limit.

        Parameters
        ----------
        uniform_model : HopModel
            Hop model without barriers.
        """
        spec = build_builtin("square", 2)
        problem = build(spec, uniform_model, spec.start, spec.tracer, 2)
        with pytest.raises(DomainError, match="restarts"):
            anneal(problem, restarts=0)
        with pytest.raises(DomainError, match="window"):
            anneal(problem, window=0)
        with pytest.raises(EngineInfeasibleError, match="limit of 10"):
            anneal(problem, max_variables=10)


class TestAnnealEngine:
    """Test arrival tables from annealed trajectory sets."""

    def setup_method(self):
        """Setup the test."""
        self.engine = AnnealEngine(restarts=256, window=128, sweeps=100, seed=7, batch=64)

    def test_square_matches_enumeration(self, uniform_model):
        """Annealing recovers every square trajectory up to N=4.

        Parameters
        ----------
        uniform_model : HopModel
            Hop model without barriers.
        """
        spec = build_builtin("square", 4)
        records = self.engine.trajectories(
            spec, uniform_model, spec.start, spec.tracer, 4
        )
        reference = enumerate_trajectories(
            spec, uniform_model, spec.start, spec.tracer, 4
        )
        assert sorted(r.sites for r in records) == sorted(r.sites for r in reference)
        by_sites = {r.sites: r for r in reference}
        for record in records:
            assert record.weight == pytest.approx(by_sites[record.sites].weight)
            assert record.theta_cos == pytest.approx(by_sites[record.sites].theta_cos)

    def test_arrivals(self, uniform_model):
        """Recovered trajectories give the exact truncated correlation factor.

        Parameters
        ----------
        uniform_model : HopModel
            Hop model without barriers.
        """
        spec = build_builtin("square", 2)
        result = self.engine.arrivals(spec, uniform_model, spec.start, spec.tracer, 2)
        assert result.engine == "anneal"
        assert result.metadata["trajectories"] == 1
        assert estimate(result, spec).f == pytest.approx(0.6)

    def test_triangle_odd_length(self, uniform_model):
        """Odd lengths are annealed on lattices with odd cycles.

        Parameters
        ----------
        uniform_model : HopModel
            Hop model without barriers.
        """
        spec = build_builtin("triangular", 3)
        records = self.engine.trajectories(
            spec, uniform_model, spec.start, spec.tracer, 3
        )
        reference = enumerate_trajectories(
            spec, uniform_model, spec.start, spec.tracer, 3
        )
        assert sorted(r.sites for r in records) == sorted(r.sites for r in reference)
        assert {r.n_steps for r in records} == {2, 3}


class TestCompletion:
    """Test closure of trajectory sets under local relocations."""

    def setup_method(self):
        """Setup the test."""
        self.spec = build_builtin("square", 6)
        self.model = HopModel()
        self.problem = build(
            self.spec, self.model, self.spec.start, self.spec.tracer, 6
        )
        self.paths = {
            tuple(self.spec.flat_index(s) for s in record.sites)
            for record in enumerate_trajectories(
                self.spec, self.model, self.spec.start, self.spec.tracer, 6
            )
            if record.n_steps == 6
        }

    def test_single_seed(self):
        """One trajectory of length 6 reaches all 44 others."""
        assert len(self.paths) == 44
        for seed in sorted(self.paths)[:: len(self.paths) // 4]:
            assert complete_paths(self.problem, {seed}) == self.paths

    def test_known_paths_skipped(self):
        """Trajectories already known are neither returned nor expanded."""
        seed = min(self.paths)
        assert complete_paths(self.problem, {seed}, known=self.paths) == set()

    def test_four_cycle(self, four_cycle, uniform_model):
        """The two returns of length 4 on the ring are linked.

        Parameters
        ----------
        four_cycle : LatticeSpec
            Four-site ring.
        uniform_model : HopModel
            Hop model without barriers.
        """
        problem = build(
            four_cycle, uniform_model, four_cycle.start, four_cycle.tracer, 4
        )
        assert complete_paths(problem, {(1, 2, 3, 0)}) == {
            (1, 2, 3, 0),
            (1, 2, 1, 0),
        }


class TestFlipMoves:
    """Test single-bit-flip annealing."""

    def test_four_cycle(self, four_cycle, uniform_model):
        """Flip annealing finds only valid returns on the ring.

        Parameters
        ----------
        four_cycle : LatticeSpec
            Four-site ring.
        uniform_model : HopModel
            Hop model without barriers.
        """
        problem = build(
            four_cycle, uniform_model, four_cycle.start, four_cycle.tracer, 4
        )
        both = {
            tuple(SiteRef((0, 0), s) for s in (1, 2, 3, 0)),
            tuple(SiteRef((0, 0), s) for s in (1, 2, 1, 0)),
        }
        kwargs = {
            "restarts": 64,
            "seed": 1,
            "window": 64,
            "batch": 16,
            "move": "flip",
        }
        raw = anneal(problem, AnnealSchedule(sweeps=100), complete=False, **kwargs)
        assert raw
        assert all(t.valid for t in raw)
        assert {t.sites for t in raw} <= both
        completed = anneal(problem, AnnealSchedule(sweeps=100), **kwargs)
        assert {t.sites for t in completed} == both

    def test_invalid_move(self, four_cycle, uniform_model):
        """Test unknown move kinds.

        Parameters
        ----------
        four_cycle : LatticeSpec
            Four-site ring.
        uniform_model : HopModel
            Hop model without barriers.
        """
        problem = build(
            four_cycle, uniform_model, four_cycle.start, four_cycle.tracer, 4
        )
        with pytest.raises(ConfigurationError, match="Invalid move"):
            anneal(problem, move="swap")
        with pytest.raises(ConfigurationError, match="Invalid move"):
            AnnealEngine(move="swap")


@pytest.mark.parametrize("seed", [0, 3, 7, 10, 13])
def test_square_defaults(seed, uniform_model):
    """Default settings recover every square trajectory up to N=6.

    Parameters
    ----------
    seed : int
        Stream key.
    uniform_model : HopModel
        Hop model without barriers.
    """
    spec = build_builtin("square", 6)
    records = AnnealEngine(seed=seed).trajectories(
        spec, uniform_model, spec.start, spec.tracer, 6
    )
    reference = enumerate_trajectories(
        spec, uniform_model, spec.start, spec.tracer, 6
    )
    assert {r.sites for r in records} == {r.sites for r in reference}

    result = AnnealEngine(seed=seed).arrivals(
        spec, uniform_model, spec.start, spec.tracer, 6
    )
    exact = MatrixUpdateEngine().arrivals(
        spec, uniform_model, spec.start, spec.tracer, 6
    )
    for n_max, expected in ((2, 0.600), (4, 0.542), (6, 0.519)):
        f = estimate(result.truncate(n_max), spec).f
        assert f == pytest.approx(estimate(exact.truncate(n_max), spec).f, abs=1e-12)
        assert f == pytest.approx(expected, abs=1e-3)
