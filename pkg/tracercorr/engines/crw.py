"""Random-walk engine: Monte Carlo estimate of first-arrival probabilities."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from tracercorr.engines.base import AbstractEngine, check_setup
from tracercorr.engines.result import PropagationResult
from tracercorr.errors import DomainError
from tracercorr.lattice.base import HopModel, LatticeSpec, SiteRef
from tracercorr.lattice.geometry import hop_table
from tracercorr.utils.pylogger import RankedLogger

log = RankedLogger(__name__, rank_zero_only=True)


@dataclass(frozen=True)
class WalkConfig:
    r"""Random-walk run parameters.

    Parameters
    ----------
    n_max : int
        Maximum trajectory length N.
    num_walkers : int
        Number of simulated vacancies.
    seed : int
        Key of the counter-based random streams.
    batch : int, optional
        Walkers per random stream (default: 100000). Results depend on the
        batch size but not on the number of workers.
    """

    n_max: int
    num_walkers: int
    seed: int
    batch: int = 100_000

    def __post_init__(self) -> None:
        if self.n_max < 2:
            raise DomainError(f"Invalid n_max {self.n_max}")
        if self.num_walkers < 1:
            raise DomainError(f"Invalid num_walkers {self.num_walkers}")
        if self.batch < 1:
            raise DomainError(f"Invalid batch {self.batch}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"Invalid seed {self.seed}")

    @property
    def n_batches(self) -> int:
        r"""Number of random streams.

        Returns
        -------
        int
            ``ceil(num_walkers / batch)``.
        """
        return math.ceil(self.num_walkers / self.batch)

    def batch_size(self, index: int) -> int:
        r"""Walkers in batch ``index``; only the last batch may be short.

        Parameters
        ----------
        index : int
            Batch index.

        Returns
        -------
        int
            Batch size.
        """
        return min(self.batch, self.num_walkers - index * self.batch)


@dataclass
class FirstPassageTally:
    r"""Counts of first arrivals at the tracer.

    Parameters
    ----------
    hits : dict[tuple[int, SiteRef], int]
        Walkers reaching the tracer at step N through neighbor k.
    walkers : int
        Total walkers.
    censored : int
        Walkers that did not return within ``n_max``.
    config : WalkConfig
        Run parameters, for auditing.
    """

    hits: dict[tuple[int, SiteRef], int]
    walkers: int
    censored: int
    config: WalkConfig

    @property
    def captured_fraction(self) -> float:
        r"""Fraction of walkers that returned.

        Returns
        -------
        float
            ``1 - censored / walkers``.
        """
        return 1.0 - self.censored / self.walkers

    def to_dict(self, spec: LatticeSpec) -> dict:
        r"""JSON-ready form including the run parameters.

        Parameters
        ----------
        spec : LatticeSpec
            Lattice used to label the tracer neighbors.

        Returns
        -------
        dict
            Hits keyed by ``"<N>:<label>"``, totals and config.
        """
        return {
            "hits": {
                f"{n}:{spec.tracer_neighbor_label(k)}": count
                for (n, k), count in sorted(self.hits.items())
            },
            "walkers": self.walkers,
            "censored": self.censored,
            "config": asdict(self.config),
        }


@dataclass(frozen=True)
class _WalkTables:
    offsets: np.ndarray  # (n_sub, Zmax, d)
    targets: np.ndarray  # (n_sub, Zmax)
    cumulative: np.ndarray  # (n_sub, Zmax)
    arrival_slot: np.ndarray  # (n_sub, Zmax) -> tracer-neighbor slot or -1
    start_cell: np.ndarray  # (d,), relative to the tracer cell
    start_sub: int
    tracer_sub: int
    reach: int


def _walk_tables(
    spec: LatticeSpec,
    model: HopModel,
    start: SiteRef,
    tracer: SiteRef,
) -> tuple[_WalkTables, list[SiteRef]]:
    zmax = spec.max_coordination
    offsets = np.zeros((spec.n_sublattices, zmax, spec.dimension), dtype=np.int64)
    targets = np.zeros((spec.n_sublattices, zmax), dtype=np.int64)
    for s, entries in enumerate(spec.stencil):
        for e, entry in enumerate(entries):
            offsets[s, e] = entry.offset
            targets[s, e] = entry.target
    cumulative = np.cumsum(hop_table(spec, model), axis=1)
    for s, z in enumerate(spec.coordination):
        cumulative[s, z - 1 :] = 1.0

    # a hop (s, e) lands on the tracer from the neighbor at -offset
    slots: list[SiteRef] = []
    arrival_slot = np.full((spec.n_sublattices, zmax), -1, dtype=np.int64)
    for s, entries in enumerate(spec.stencil):
        for e, entry in enumerate(entries):
            if entry.target != tracer.sublattice:
                continue
            origin = SiteRef(
                tuple(c - o for c, o in zip(tracer.cell, entry.offset)), s
            )
            if origin not in slots:
                slots.append(origin)
            arrival_slot[s, e] = slots.index(origin)

    tables = _WalkTables(
        offsets=offsets,
        targets=targets,
        cumulative=cumulative,
        arrival_slot=arrival_slot,
        start_cell=np.asarray(start.cell) - np.asarray(tracer.cell),
        start_sub=start.sublattice,
        tracer_sub=tracer.sublattice,
        reach=spec.reach,
    )
    return tables, slots


def _walk_batch(
    tables: _WalkTables,
    n_slots: int,
    n_max: int,
    size: int,
    seed: int,
    index: int,
) -> np.ndarray:
    # batch index in the top counter word keeps streams disjoint
    rng = np.random.Generator(np.random.Philox(key=seed, counter=index << 192))
    hits = np.zeros((n_max + 1, n_slots), dtype=np.int64)
    cell = np.tile(tables.start_cell, (size, 1))
    sub = np.full(size, tables.start_sub, dtype=np.int64)

    for hop in range(1, n_max):
        if not len(sub):
            break
        u = rng.random(len(sub))
        choice = (u[:, None] >= tables.cumulative[sub]).sum(axis=1)
        slot = tables.arrival_slot[sub, choice]
        cell = cell + tables.offsets[sub, choice]
        sub = tables.targets[sub, choice]

        cheb = np.abs(cell).max(axis=1)
        arrived = (cheb == 0) & (sub == tables.tracer_sub)
        if arrived.any():
            hits[hop + 1] += np.bincount(slot[arrived], minlength=n_slots)

        # walkers that can no longer return in the hops left are censored
        bound = -(-cheb // tables.reach)
        bound = np.where((bound == 0) & ~arrived, 1, bound)
        alive = ~arrived & (bound <= n_max - 1 - hop)
        cell, sub = cell[alive], sub[alive]
    return hits


def simulate(
    spec: LatticeSpec,
    model: HopModel,
    start: SiteRef,
    tracer: SiteRef,
    config: WalkConfig,
    n_jobs: int | None = None,
    progress: bool = False,
) -> FirstPassageTally:
    r"""Simulate vacancy walks from S until first contact with T.

    Each walker hops with the lattice's hop probabilities and stops at its
    first arrival on the tracer or after ``n_max - 1`` hops. Batches of
    walkers draw from independent Philox streams keyed by ``seed`` and
    offset by the batch index, and are merged by integer addition in batch
    order, so the tally does not depend on ``n_jobs``.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice; the walk itself is not bounded by the extent.
    model : HopModel
        Barriers and temperature.
    start : SiteRef
        Vacancy start site S, adjacent to the tracer.
    tracer : SiteRef
        Tracer site T.
    config : WalkConfig
        Run parameters.
    n_jobs : int, optional
        Worker processes (default: 1).
    progress : bool, optional
        Show a progress bar over batches.

    Returns
    -------
    FirstPassageTally
        Hits per (N, neighbor), walkers and censored count.
    """
    check_setup(spec, start, tracer, config.n_max)
    tables, slots = _walk_tables(spec, model, start, tracer)
    log.info(
        f"Simulating {config.num_walkers} walkers on {spec.name} in "
        f"{config.n_batches} batches (n_jobs={n_jobs or 1})"
    )
    jobs = (
        delayed(_walk_batch)(
            tables,
            len(slots),
            config.n_max,
            config.batch_size(index),
            config.seed,
            index,
        )
        for index in range(config.n_batches)
    )
    batches = Parallel(n_jobs=n_jobs or 1, return_as="generator")(jobs)
    total = np.zeros((config.n_max + 1, len(slots)), dtype=np.int64)
    for hits in tqdm(
        batches,
        total=config.n_batches,
        desc="walker batches",
        disable=not progress,
    ):
        total += hits

    tally = {
        (n, slots[k]): int(total[n, k])
        for n in range(2, config.n_max + 1)
        for k in range(len(slots))
        if total[n, k]
    }
    censored = config.num_walkers - int(total.sum())
    return FirstPassageTally(
        hits=tally,
        walkers=config.num_walkers,
        censored=censored,
        config=config,
    )


def tally_to_arrivals(tally: FirstPassageTally) -> PropagationResult:
    r"""Convert hit counts into estimated arrival probabilities.

    Parameters
    ----------
    tally : FirstPassageTally
        Simulation counts.

    Returns
    -------
    PropagationResult
        ``hits / walkers`` per entry with binomial standard errors
        ``sqrt(p (1 - p) / walkers)``.

    Raises
    ------
    DomainError
        If the tally holds no walkers.
    """
    if tally.walkers < 1:
        raise DomainError(f"Invalid walkers {tally.walkers}")
    n_max = tally.config.n_max
    per_step: dict[int, dict[SiteRef, float]] = {
        n: {} for n in range(2, n_max + 1)
    }
    stderr: dict[int, dict[SiteRef, float]] = {
        n: {} for n in range(2, n_max + 1)
    }
    for (n, k), count in tally.hits.items():
        p = count / tally.walkers
        per_step[n][k] = p
        stderr[n][k] = math.sqrt(p * (1.0 - p) / tally.walkers)
    return PropagationResult(
        per_step_arrivals=per_step,
        n_max=n_max,
        engine="crw",
        stderr=stderr,
        walkers=tally.walkers,
        metadata={"seed": tally.config.seed, "batch": tally.config.batch},
    )


class RandomWalkEngine(AbstractEngine):
    r"""Monte Carlo engine.

    Parameters
    ----------
    num_walkers : int, optional
        Walkers per run (default: 10**7).
    batch : int, optional
        Walkers per random stream (default: 100000).
    seed : int, optional
        Stream key (default: 42).
    n_jobs : int, optional
        Worker processes (default: 1).
    progress : bool, optional
        Show a progress bar (default: False).
    **kwargs : dict
        Ignored extra parameters.
    """

    name = "crw"

    def __init__(
        self,
        num_walkers: int = 10_000_000,
        batch: int = 100_000,
        seed: int = 42,
        n_jobs: int | None = None,
        progress: bool = False,
        **kwargs,
    ):
        super().__init__(
            num_walkers=num_walkers, batch=batch, seed=seed, **kwargs
        )
        self.num_walkers = int(num_walkers)
        self.batch = int(batch)
        self.seed = int(seed)
        self.n_jobs = n_jobs
        self.progress = progress

    def arrivals(
        self,
        spec: LatticeSpec,
        model: HopModel,
        start: SiteRef,
        tracer: SiteRef,
        n_max: int,
    ) -> PropagationResult:
        r"""Simulate and convert the tally to estimated arrivals.

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

        Returns
        -------
        PropagationResult
            Estimated arrivals with standard errors.
        """
        config = WalkConfig(
            n_max=n_max,
            num_walkers=self.num_walkers,
            seed=self.seed,
            batch=self.batch,
        )
        tally = simulate(
            spec,
            model,
            start,
            tracer,
            config,
            n_jobs=self.n_jobs,
            progress=self.progress,
        )
        return tally_to_arrivals(tally)
