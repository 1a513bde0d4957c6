"""Unit tests for the exact propagation engine."""

import pytest

from tracercorr.engines import (
    EnumerationEngine,
    MatrixUpdateEngine,
    init_field,
    propagate_step,
    run,
)
from tracercorr.errors import ConfigurationError, DomainError, LatticeBoundsError
from tracercorr.evaluator import estimate
from tracercorr.lattice import (
    REFERENCE_F,
    HopModel,
    LatticeSpec,
    SiteRef,
    StencilEntry,
    build_builtin,
)

# truncated correlation factors of the square lattice, uniform hopping
SQUARE_F = [
    (2, 0.600),
    (4, 0.542),
    (6, 0.519),
    (8, 0.507),
    (10, 0.499),
    (12, 0.494),
    (14, 0.491),
]


class TestMatrixUpdate:
    """Test field propagation on the square lattice."""

    def setup_method(self):
        """Setup the test."""
        self.spec = build_builtin("square", 14)
        self.model = HopModel()
        self.start = self.spec.start
        self.tracer = self.spec.tracer
        self.left = self.tracer.shifted((-1, 0), 0)
        self.right = self.tracer.shifted((1, 0), 0)

    def test_first_step(self):
        """One hop sends a quarter of the mass into the tracer."""
        field = init_field(self.spec, self.start)
        field, arrivals = propagate_step(field, self.model, self.tracer)
        assert arrivals == {self.start: 0.25}
        assert field.total() == pytest.approx(0.75)
        assert field.mass_at(self.tracer) == 0.0
        assert field.step == 1

    def test_exact_counts(self):
        """Count mode enumerates first-passage trajectories exactly."""
        result = run(self.spec, self.model, self.start, self.tracer, 4, mode="count")
        assert result.per_step_arrivals[2] == {self.start: 1}
        assert result.per_step_arrivals[3] == {}
        assert result.per_step_arrivals[4] == {
            self.start: 3,
            self.left: 1,
            self.right: 1,
        }
        weights = result.as_weights(4)
        assert weights.mode == "weight"
        assert weights.per_step_arrivals[4][self.start] == 3 / 64

    def test_count_needs_uniform_hops(self):
        """Counts cannot carry barriers, so count mode refuses them."""
        model = HopModel(barriers={"+x": 0.0, "-x": 0.0, "+y": 1.0, "-y": 1.0})
        with pytest.raises(ConfigurationError, match="barriers"):
            run(self.spec, model, self.start, self.tracer, 6, mode="count")
        with pytest.raises(ConfigurationError, match="barriers"):
            MatrixUpdateEngine(mode="count").arrivals(
                self.spec, model, self.start, self.tracer, 6
            )
        weighted = run(self.spec, model, self.start, self.tracer, 6)
        uniform = run(self.spec, self.model, self.start, self.tracer, 6)
        assert estimate(weighted, self.spec).f != pytest.approx(
            estimate(uniform, self.spec).f, abs=1e-3
        )

    def test_count_needs_single_coordination(self):
        """Count mode refuses lattices whose sublattices differ in Z."""
        stencil = (
            (
                StencilEntry((0, 0), 1, "+x"),
                StencilEntry((-1, 0), 1, "-x"),
                StencilEntry((0, 0), 2, "+y"),
                StencilEntry((0, -1), 2, "-y"),
            ),
            (StencilEntry((0, 0), 0, "-x"), StencilEntry((1, 0), 0, "+x")),
            (StencilEntry((0, 0), 0, "-y"), StencilEntry((0, 1), 0, "+y")),
        )
        lieb = LatticeSpec(
            name="lieb",
            dimension=2,
            basis_vectors=((1.0, 0.0), (0.0, 1.0)),
            sublattice_offsets=((0.0, 0.0), (0.5, 0.0), (0.0, 0.5)),
            stencil=stencil,
            extent=(9, 9),
            boundary="open",
        )
        assert lieb.coordination == (4, 2, 2)
        with pytest.raises(ConfigurationError, match="coordinations"):
            run(lieb, self.model, lieb.start, lieb.tracer, 4, mode="count")
        weights = run(lieb, self.model, lieb.start, lieb.tracer, 4)
        assert weights.per_step_arrivals[2] == {lieb.start: pytest.approx(0.5)}

    def test_average_cosine(self):
        """Test the average cosine at the two smallest horizons."""
        for n_max, avg_cos in ((2, -0.25), (4, -19 / 64)):
            result = run(self.spec, self.model, self.start, self.tracer, n_max)
            est = estimate(result, self.spec)
            assert est.avg_cos == pytest.approx(avg_cos, abs=1e-15)

    def test_convergence_values(self):
        """Truncated correlation factors approach the known limit from above."""
        result = run(self.spec, self.model, self.start, self.tracer, 14)
        previous = 1.0
        for n_max, expected in SQUARE_F:
            f = estimate(result.truncate(n_max), self.spec).f
            assert f == pytest.approx(expected, abs=5e-4)
            assert f < previous
            previous = f

    def test_odd_lengths_empty(self):
        """Bipartite lattices have no odd-length trajectories."""
        result = run(self.spec, self.model, self.start, self.tracer, 9)
        for n in (3, 5, 7, 9):
            assert result.per_step_arrivals[n] == {}

    def test_log_mode(self):
        """Log-mass propagation agrees with direct propagation."""
        model = HopModel(barriers={"+y": 0.3, "-y": 0.1, "*": 0.0})
        direct = run(self.spec, model, self.start, self.tracer, 8)
        logged = run(self.spec, model, self.start, self.tracer, 8, mode="log")
        for n, entries in direct.per_step_arrivals.items():
            assert set(entries) == set(logged.per_step_arrivals[n])
            for k, p in entries.items():
                assert logged.per_step_arrivals[n][k] == pytest.approx(p, rel=1e-12)

    def test_mass_balance(self):
        """Captured and pruned mass never exceed the initial unit mass."""
        result = run(self.spec, self.model, self.start, self.tracer, 12)
        assert 0.0 < result.captured_mass < 1.0
        assert result.captured_mass + result.pruned_mass <= 1.0 + 1e-12
        shorter = run(self.spec, self.model, self.start, self.tracer, 6)
        assert shorter.captured_mass < result.captured_mass

    def test_boundary(self, square_3x3, uniform_model):
        """Mass reaching the edge of an open lattice is an error.

        Parameters
        ----------
        square_3x3 : LatticeSpec
            Open 3x3 square patch.
        uniform_model : HopModel
            Hop model without barriers.
        """
        with pytest.raises(LatticeBoundsError, match="boundary"):
            run(square_3x3, uniform_model, square_3x3.start, square_3x3.tracer, 6)

    def test_invalid_setup(self):
        """Test invalid horizons, start sites and modes."""
        with pytest.raises(DomainError, match="Invalid n_max"):
            run(self.spec, self.model, self.start, self.tracer, 1)
        far = self.tracer.shifted((2, 0), 0)
        with pytest.raises(DomainError):
            run(self.spec, self.model, far, self.tracer, 4)
        with pytest.raises(ConfigurationError, match="Invalid mode"):
            MatrixUpdateEngine(mode="linear")


class TestSmallGraphs:
    """Test propagation on hand-checkable rings."""

    def test_four_cycle(self, four_cycle, uniform_model):
        """Every return path on the four-site ring is found.

        Parameters
        ----------
        four_cycle : LatticeSpec
            Four-site ring.
        uniform_model : HopModel
            Hop model without barriers.
        """
        result = MatrixUpdateEngine().arrivals(
            four_cycle, uniform_model, four_cycle.start, four_cycle.tracer, 4
        )
        site_1, site_3 = SiteRef((0, 0), 1), SiteRef((0, 0), 3)
        assert result.per_step_arrivals[2] == {site_1: 0.5}
        assert result.per_step_arrivals[3] == {}
        assert result.per_step_arrivals[4] == {site_1: 0.125, site_3: 0.125}
        est = estimate(result, four_cycle)
        assert est.avg_cos == pytest.approx(-0.625)
        assert est.f == pytest.approx(0.375 / 1.625)

    def test_triangle(self, triangle, uniform_model):
        """The triangle returns at odd lengths too.

        Parameters
        ----------
        triangle : LatticeSpec
            Three-site ring.
        uniform_model : HopModel
            Hop model without barriers.
        """
        result = run(triangle, uniform_model, triangle.start, triangle.tracer, 3)
        assert result.per_step_arrivals[2] == {SiteRef((0, 0), 1): 0.5}
        assert result.per_step_arrivals[3] == {SiteRef((0, 0), 2): 0.25}


@pytest.mark.parametrize(
    ("name", "n_max"),
    [
        ("square", 8),
        ("honeycomb", 8),
        ("triangular", 6),
        ("diamond", 6),
        ("sc", 6),
        ("bcc", 5),
        ("fcc", 4),
    ],
)
def test_agrees_with_enumeration(name, n_max):
    """Propagation and exhaustive enumeration give the same arrivals.

    Parameters
    ----------
    name : str
        Lattice family.
    n_max : int
        Maximum trajectory length.
    """
    spec = build_builtin(name, n_max)
    model = HopModel()
    exact = MatrixUpdateEngine().arrivals(
        spec, model, spec.start, spec.tracer, n_max
    )
    listed = EnumerationEngine().arrivals(
        spec, model, spec.start, spec.tracer, n_max
    )
    for n in range(2, n_max + 1):
        assert set(exact.per_step_arrivals[n]) == set(listed.per_step_arrivals[n])
        for k, p in exact.per_step_arrivals[n].items():
            assert listed.per_step_arrivals[n][k] == pytest.approx(p, rel=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize(
    "name", ["square", "honeycomb", "triangular", "diamond", "sc", "bcc", "fcc"]
)
def test_agrees_with_enumeration_n8(name):
    """Propagation matches enumeration up to N=8 on every family.

    Parameters
    ----------
    name : str
        Lattice family.
    """
    spec = build_builtin(name, 8)
    model = HopModel()
    exact = run(spec, model, spec.start, spec.tracer, 8)
    listed = EnumerationEngine().arrivals(spec, model, spec.start, spec.tracer, 8)
    for n in range(2, 9):
        for k, p in exact.per_step_arrivals[n].items():
            assert listed.per_step_arrivals[n][k] == pytest.approx(p, rel=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize(("n_max", "expected"), [(32, 0.477), (492, 0.468)])
def test_square_long_horizons(n_max, expected):
    """Long square-lattice horizons.

    Parameters
    ----------
    n_max : int
        Maximum trajectory length.
    expected : float
        Correlation factor to three decimals.
    """
    spec = build_builtin("square", n_max)
    result = run(spec, HopModel(), spec.start, spec.tracer, n_max)
    assert estimate(result, spec).f == pytest.approx(expected, abs=5e-4)


@pytest.mark.slow
def test_square_limit():
    """The square lattice approaches its known limit at N_max=500."""
    spec = build_builtin("square", 500)
    result = run(spec, HopModel(), spec.start, spec.tracer, 500)
    assert 0.466 <= estimate(result, spec).f <= 0.470


@pytest.mark.slow
@pytest.mark.parametrize(
    ("name", "n_max"),
    [
        ("honeycomb", 200),
        ("triangular", 200),
        ("sc", 100),
        ("bcc", 100),
        ("fcc", 100),
        ("diamond", 100),
    ],
)
def test_reference_trends(name, n_max):
    """Long horizons come within 2% of the tabulated correlation factors.

    Parameters
    ----------
    name : str
        Lattice family.
    n_max : int
        Maximum trajectory length.
    """
    spec = build_builtin(name, n_max)
    result = run(spec, HopModel(), spec.start, spec.tracer, n_max)
    series = [
        estimate(result.truncate(n), spec).f
        for n in (n_max // 4, n_max // 2, n_max)
    ]
    assert series[0] >= series[1] >= series[2]
    assert series[2] == pytest.approx(REFERENCE_F[name][0], rel=0.02)


@pytest.mark.slow
@pytest.mark.parametrize("name", list(REFERENCE_F))
def test_truncation_monotone(name):
    """Longer horizons never raise the correlation factor.

    Parameters
    ----------
    name : str
        Lattice family.
    """
    spec = build_builtin(name, 32)
    result = run(spec, HopModel(), spec.start, spec.tracer, 32)
    previous = 1.0
    for n_max in range(2, 33):
        f = estimate(result.truncate(n_max), spec).f
        assert f <= previous + 1e-12
        previous = f
