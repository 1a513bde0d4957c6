"""Arrival tables shared by every engine."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction

from tracercorr.lattice.base import LatticeSpec, SiteRef


@dataclass(frozen=True)
class TrajectoryRecord:
    r"""An explicit vacancy path with its statistical weight.

    Parameters
    ----------
    sites : tuple[SiteRef, ...]
        Positions at time steps 1..N; starts at S and ends at T.
    weight : float
        Product of the hop probabilities along the path.
    final_neighbor : SiteRef
        Position at step N-1, the neighbor through which T is reached.
    theta_cos : float
        Cosine of that neighbor's direction against the flow axis.
    """

    sites: tuple[SiteRef, ...]
    weight: float
    final_neighbor: SiteRef
    theta_cos: float

    @property
    def n_steps(self) -> int:
        r"""Trajectory length N (number of positions).

        Returns
        -------
        int
            Length of ``sites``.
        """
        return len(self.sites)


@dataclass
class PropagationResult:
    r"""First-arrival masses per trajectory length and tracer neighbor.

    Parameters
    ----------
    per_step_arrivals : dict[int, dict[SiteRef, float]]
        ``per_step_arrivals[N][k]`` is the mass of trajectories first
        reaching the tracer at step N through neighbor k.
    n_max : int
        Largest N covered.
    mode : str, optional
        ``"weight"``, ``"count"`` or ``"log"``. Log-mode results hold
        exponentiated masses; count-mode results hold exact integers.
    engine : str, optional
        Engine that produced the table.
    stderr : dict[int, dict[SiteRef, float]], optional
        Standard error per entry, for stochastic engines.
    walkers : int, optional
        Sample size behind a stochastic estimate.
    pruned_mass : float, optional
        Mass removed because it could no longer return within ``n_max``.
    """

    per_step_arrivals: dict[int, dict[SiteRef, float]]
    n_max: int
    mode: str = "weight"
    engine: str = "mu"
    stderr: dict[int, dict[SiteRef, float]] | None = None
    walkers: int | None = None
    pruned_mass: float = 0.0
    metadata: dict = field(default_factory=dict)

    @property
    def captured_mass(self) -> float:
        r"""Total first-arrival mass over all N and neighbors.

        Returns
        -------
        float
            Sum of every entry.
        """
        return sum(
            sum(entries.values()) for entries in self.per_step_arrivals.values()
        )

    @property
    def stochastic(self) -> bool:
        r"""Whether the table is a sampled estimate.

        Returns
        -------
        bool
            True if a sample size is attached.
        """
        return self.walkers is not None

    def truncate(self, n_max: int) -> PropagationResult:
        r"""Restrict the table to trajectory lengths ``N <= n_max``.

        Parameters
        ----------
        n_max : int
            New horizon.

        Returns
        -------
        PropagationResult
            The truncated table.
        """
        keep = {n: dict(v) for n, v in self.per_step_arrivals.items() if n <= n_max}
        stderr = None
        if self.stderr is not None:
            stderr = {n: dict(v) for n, v in self.stderr.items() if n <= n_max}
        return PropagationResult(
            per_step_arrivals=keep,
            n_max=min(n_max, self.n_max),
            mode=self.mode,
            engine=self.engine,
            stderr=stderr,
            walkers=self.walkers,
            metadata=dict(self.metadata),
        )

    def as_weights(self, coordination: int) -> PropagationResult:
        r"""Convert count-mode arrivals to probability weights.

        Valid for uniform hopping: a trajectory of length N has weight
        ``coordination ** -(N - 1)``.

        Parameters
        ----------
        coordination : int
            Coordination number Z.

        Returns
        -------
        PropagationResult
            Weight-mode copy; other modes are returned unchanged.
        """
        if self.mode != "count":
            return self
        converted = {
            n: {
                k: float(Fraction(int(c), coordination ** (n - 1)))
                for k, c in entries.items()
            }
            for n, entries in self.per_step_arrivals.items()
        }
        return PropagationResult(
            per_step_arrivals=converted,
            n_max=self.n_max,
            mode="weight",
            engine=self.engine,
            metadata=dict(self.metadata),
        )

    def to_dict(self, spec: LatticeSpec) -> dict:
        r"""JSON-ready form keyed by N and tracer-neighbor label.

        Parameters
        ----------
        spec : LatticeSpec
            Lattice used to label the tracer neighbors.

        Returns
        -------
        dict
            Arrivals, standard errors and summary fields.
        """

        def _label(table):
            return {
                str(n): {
                    spec.tracer_neighbor_label(k): v
                    for k, v in sorted(entries.items())
                }
                for n, entries in sorted(table.items())
            }

        data = {
            "engine": self.engine,
            "mode": self.mode,
            "n_max": self.n_max,
            "captured_mass": float(self.captured_mass),
            "pruned_mass": float(self.pruned_mass),
            "arrivals": _label(self.per_step_arrivals),
        }
        if self.stderr is not None:
            data["stderr"] = _label(self.stderr)
            data["walkers"] = self.walkers
        return data


def aggregate_trajectories(
    records: Iterable[TrajectoryRecord],
    n_max: int,
    engine: str = "oracle",
) -> PropagationResult:
    r"""Sum trajectory weights by length and final neighbor.

    Parameters
    ----------
    records : Iterable[TrajectoryRecord]
        Trajectories, each counted once.
    n_max : int
        Horizon of the resulting table; longer trajectories are ignored.
    engine : str, optional
        Engine name to record.

    Returns
    -------
    PropagationResult
        Arrival table with an entry list for every N in ``2..n_max``.
    """
    table: dict[int, dict[SiteRef, float]] = {
        n: defaultdict(float) for n in range(2, n_max + 1)
    }
    for record in records:
        if record.n_steps <= n_max:
            table[record.n_steps][record.final_neighbor] += record.weight
    return PropagationResult(
        per_step_arrivals={n: dict(v) for n, v in table.items()},
        n_max=n_max,
        engine=engine,
    )
