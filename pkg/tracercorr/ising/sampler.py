"""Simulated annealing over trajectory encodings."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from tracercorr.engines.base import AbstractEngine, check_setup
from tracercorr.engines.result import (
    PropagationResult,
    TrajectoryRecord,
    aggregate_trajectories,
)
from tracercorr.errors import (
    ConfigurationError,
    DomainError,
    EngineInfeasibleError,
)
from tracercorr.ising.problem import (
    DecodedTrajectory,
    IsingProblem,
    build,
    decode_positions,
    path_weight,
)
from tracercorr.lattice.base import HopModel, LatticeSpec, SiteRef
from tracercorr.lattice.geometry import cos_theta, is_bipartite, neighbor_table
from tracercorr.utils.pylogger import RankedLogger

log = RankedLogger(__name__, rank_zero_only=True)

MAX_VARIABLES = 4096


@dataclass(frozen=True)
class AnnealSchedule:
    r"""Geometric temperature schedule.

    Parameters
    ----------
    t_hot : float, optional
        Initial temperature (default: 10.0).
    t_cold : float, optional
        Final temperature (default: 0.05).
    sweeps : int, optional
        Number of sweeps; a sweep proposes one move per time step
        (default: 200).
    """

    t_hot: float = 10.0
    t_cold: float = 0.05
    sweeps: int = 200

    def __post_init__(self) -> None:
        if not self.t_hot > self.t_cold > 0:
            raise DomainError(
                f"Invalid schedule {self.t_hot} -> {self.t_cold}: "
                "temperatures must decrease and stay positive"
            )
        if self.sweeps < 1:
            raise DomainError(f"Invalid sweeps {self.sweeps}")

    def temperatures(self) -> np.ndarray:
        r"""Temperature of every sweep.

        Returns
        -------
        np.ndarray
            Geometric sequence from ``t_hot`` to ``t_cold``.
        """
        return np.geomspace(self.t_hot, self.t_cold, self.sweeps)


@dataclass(frozen=True)
class _Couplings:
    linear: np.ndarray  # (nv,)
    dense: np.ndarray  # (nv, nv), symmetric, zero diagonal
    shell: np.ndarray  # (n_sites, K) sites within two hops, padded with -1
    shell_size: np.ndarray  # (n_sites,)
    n_sites: int
    n_steps: int


def _couplings(problem: IsingProblem) -> _Couplings:
    nv = problem.num_variables
    order = list(range(nv))
    linear, (rows, cols, values), _ = problem.bqm.to_numpy_vectors(
        variable_order=order
    )
    dense = np.zeros((nv, nv))
    np.add.at(dense, (rows, cols), values)
    dense = dense + dense.T

    table = neighbor_table(problem.spec)
    shells = []
    for a in range(problem.n_sites):
        first = table[a][table[a] >= 0]
        second = table[first].ravel()
        shells.append(np.unique(np.concatenate([first, second[second >= 0]])))
    width = max(len(s) for s in shells)
    shell = np.full((problem.n_sites, width), -1, dtype=np.int64)
    for a, s in enumerate(shells):
        shell[a, : len(s)] = s
    return _Couplings(
        linear=np.asarray(linear, dtype=float),
        dense=dense,
        shell=shell,
        shell_size=np.array([len(s) for s in shells], dtype=np.int64),
        n_sites=problem.n_sites,
        n_steps=problem.n_steps,
    )


MOVES = ("relocate", "flip")


def _collect(
    seen: list[set[tuple[int, ...]]], positions: np.ndarray
) -> None:
    for r, row in enumerate(positions):
        seen[r].add(tuple(int(p) for p in row))


def _relocate_batch(
    couplings: _Couplings,
    temperatures: np.ndarray,
    size: int,
    rng: np.random.Generator,
    far_move_rate: float,
    tail: int,
) -> list[set[tuple[int, ...]]]:
    n_sites, n_steps = couplings.n_sites, couplings.n_steps
    base = np.arange(n_steps) * n_sites
    replicas = np.arange(size)

    positions = rng.integers(0, n_sites, size=(size, n_steps))
    state = np.zeros((size, n_sites * n_steps))
    state[replicas[:, None], base + positions] = 1.0
    field = couplings.linear + state @ couplings.dense

    seen: list[set[tuple[int, ...]]] = [set() for _ in range(size)]
    first_tail = len(temperatures) - tail
    for sweep, temperature in enumerate(temperatures):
        for step in rng.permutation(n_steps):
            here = positions[:, step]
            far = rng.random(size) < far_move_rate
            pick = rng.integers(0, np.iinfo(np.int64).max, size=size)
            near = couplings.shell[here, pick % couplings.shell_size[here]]
            there = np.where(far, pick % n_sites, near)

            u = base[step] + here
            v = base[step] + there
            delta = field[replicas, v] - field[replicas, u]
            delta -= couplings.dense[u, v]
            accept = (delta <= 0) | (
                rng.random(size) < np.exp(-np.maximum(delta, 0) / temperature)
            )
            accept &= u != v
            if accept.any():
                rows = replicas[accept]
                field[rows] += couplings.dense[v[accept]] - couplings.dense[
                    u[accept]
                ]
                positions[rows, step] = there[accept]

        if sweep >= first_tail:
            _collect(seen, positions)
    return seen


def _flip_batch(
    couplings: _Couplings,
    temperatures: np.ndarray,
    size: int,
    rng: np.random.Generator,
    tail: int,
) -> list[set[tuple[int, ...]]]:
    n_sites, n_steps = couplings.n_sites, couplings.n_steps
    state = rng.integers(0, 2, size=(size, n_sites * n_steps)).astype(float)
    field = couplings.linear + state @ couplings.dense

    seen: list[set[tuple[int, ...]]] = [set() for _ in range(size)]
    first_tail = len(temperatures) - tail
    for sweep, temperature in enumerate(temperatures):
        for var in rng.permutation(n_sites * n_steps):
            sign = 1.0 - 2.0 * state[:, var]
            delta = sign * field[:, var]
            accept = (delta <= 0) | (
                rng.random(size) < np.exp(-np.maximum(delta, 0) / temperature)
            )
            if accept.any():
                state[accept, var] += sign[accept]
                field[accept] += sign[accept, None] * couplings.dense[var]

        if sweep >= first_tail:
            bits = state.reshape(size, n_steps, n_sites)
            one_hot = (bits.sum(axis=2) == 1).all(axis=1)
            for r in np.flatnonzero(one_hot):
                seen[r].add(tuple(int(p) for p in bits[r].argmax(axis=1)))
    return seen


def _anneal_batch(
    couplings: _Couplings,
    temperatures: np.ndarray,
    size: int,
    seed: int,
    index: int,
    far_move_rate: float,
    tail: int,
    move: str = "relocate",
) -> list[set[tuple[int, ...]]]:
    rng = np.random.Generator(np.random.Philox(key=seed, counter=index << 192))
    if move == "flip":
        return _flip_batch(couplings, temperatures, size, rng, tail)
    return _relocate_batch(
        couplings, temperatures, size, rng, far_move_rate, tail
    )


def _valid_paths(
    problem: IsingProblem, configs: set[tuple[int, ...]]
) -> set[tuple[int, ...]]:
    return {c for c in configs if decode_positions(problem, c).valid}


def _relocations(
    adjacency: np.ndarray, t_flat: int, path: tuple[int, ...]
) -> Iterator[tuple[int, ...]]:
    # endpoints stay; interior steps never visit the tracer
    n = len(path)
    for i in range(1, n - 1):
        for y in np.flatnonzero(adjacency[path[i - 1]] & adjacency[path[i + 1]]):
            if y != t_flat and y != path[i]:
                yield (*path[:i], int(y), *path[i + 1 :])
    for i in range(1, n - 2):
        for y in np.flatnonzero(adjacency[path[i - 1]]):
            if y == t_flat:
                continue
            for z in np.flatnonzero(adjacency[y] & adjacency[path[i + 2]]):
                if z != t_flat and (y, z) != path[i : i + 2]:
                    yield (*path[:i], int(y), int(z), *path[i + 2 :])


def complete_paths(
    problem: IsingProblem,
    seeds: set[tuple[int, ...]],
    known: set[tuple[int, ...]] | None = None,
) -> set[tuple[int, ...]]:
    r"""Close a set of trajectories under one- and two-step relocations.

    Starting from ``seeds``, every valid trajectory that differs from a
    collected one in the sites of one step, or of two consecutive steps,
    is collected until nothing new turns up. The result does not depend
    on the order of the seeds.

    Parameters
    ----------
    problem : IsingProblem
        The encoding.
    seeds : set[tuple[int, ...]]
        Valid trajectories as flat site indices.
    known : set[tuple[int, ...]], optional
        Trajectories already collected; they are not expanded again.

    Returns
    -------
    set[tuple[int, ...]]
        Trajectories reached from ``seeds`` that are not in ``known``.
    """
    known = known or set()
    adjacency = problem.adjacency
    t_flat = problem.spec.flat_index(problem.tracer)
    added = {path for path in seeds if path not in known}
    frontier = sorted(added)
    while frontier:
        path = frontier.pop()
        for other in _relocations(adjacency, t_flat, path):
            if other not in known and other not in added:
                added.add(other)
                frontier.append(other)
    return added


def anneal(
    problem: IsingProblem,
    schedule: AnnealSchedule | None = None,
    restarts: int = 1000,
    seed: int = 0,
    window: int = 50,
    batch: int = 64,
    n_jobs: int | None = None,
    far_move_rate: float = 0.1,
    tail: int = 10,
    max_variables: int = MAX_VARIABLES,
    move: str = "relocate",
    complete: bool = True,
) -> list[DecodedTrajectory]:
    r"""Collect distinct valid trajectories from annealed configurations.

    With ``move="relocate"`` every restart anneals one configuration with
    Metropolis moves that relocate the occupied site of a time step, so
    each step stays one-hot. Relocations land within two hops of the
    current site, or anywhere with probability ``far_move_rate``. With
    ``move="flip"`` restarts start from random bits and propose single-bit
    flips. Configurations reached in the last ``tail`` sweeps are decoded
    and valid trajectories are kept. How often a trajectory is found
    carries no weight; only the distinct set is returned.

    With ``complete`` set, every new trajectory is expanded through
    :func:`complete_paths` before the next restart is counted, so restarts
    only need to land once in each family of trajectories linked by local
    relocations.

    Restarts run in batches of ``batch`` replicas, each batch on its own
    Philox stream keyed by ``seed``. Sampling stops once ``window``
    consecutive restarts, counted in restart order, add no new trajectory;
    results of later restarts are discarded, so the output does not depend
    on ``n_jobs``.

    Parameters
    ----------
    problem : IsingProblem
        The encoding.
    schedule : AnnealSchedule, optional
        Temperature schedule (default: ``AnnealSchedule()``).
    restarts : int, optional
        Maximum number of restarts (default: 1000).
    seed : int, optional
        Stream key (default: 0).
    window : int, optional
        Saturation window in restarts (default: 50).
    batch : int, optional
        Replicas annealed together (default: 64).
    n_jobs : int, optional
        Worker processes (default: 1).
    far_move_rate : float, optional
        Probability of a relocation anywhere on the lattice (default: 0.1).
    tail : int, optional
        Cold sweeps whose configurations are decoded (default: 10).
    max_variables : int, optional
        Largest admissible problem size (default: 4096).
    move : str, optional
        ``"relocate"`` (default) or ``"flip"``.
    complete : bool, optional
        Expand found trajectories by local relocations (default: True).

    Returns
    -------
    list[DecodedTrajectory]
        Distinct valid trajectories in lexicographic site order.

    Raises
    ------
    DomainError
        If ``restarts`` or ``window`` is below 1.
    ConfigurationError
        If ``move`` is unknown.
    EngineInfeasibleError
        If the problem has more than ``max_variables`` variables.
    """
    schedule = schedule or AnnealSchedule()
    if restarts < 1:
        raise DomainError(f"Invalid restarts {restarts}")
    if window < 1:
        raise DomainError(f"Invalid window {window}")
    if move not in MOVES:
        raise ConfigurationError(f"Invalid move {move}")
    if problem.num_variables > max_variables:
        raise EngineInfeasibleError(
            f"Annealing a {problem.num_variables}-variable problem "
            f"(N={problem.n_steps} on {problem.spec.name}) exceeds the "
            f"limit of {max_variables} variables; use the mu engine"
        )
    tail = max(1, min(tail, schedule.sweeps))
    couplings = _couplings(problem)
    temperatures = schedule.temperatures()
    n_batches = -(-restarts // batch)
    workers = n_jobs or 1

    found: set[tuple[int, ...]] = set()
    last_new, used = -1, 0
    saturated = False
    with Parallel(n_jobs=workers) as parallel:
        for first in range(0, n_batches, workers):
            indices = range(first, min(first + workers, n_batches))
            rounds = parallel(
                delayed(_anneal_batch)(
                    couplings,
                    temperatures,
                    min(batch, restarts - index * batch),
                    seed,
                    index,
                    far_move_rate,
                    tail,
                    move,
                )
                for index in indices
            )
            for configs in (c for r in rounds for c in r):
                new = _valid_paths(problem, configs) - found
                if new and complete:
                    new = complete_paths(problem, new, found)
                if new:
                    found |= new
                    last_new = used
                used += 1
                if used - 1 - last_new >= window:
                    saturated = True
                    break
            if saturated:
                break

    log.info(
        f"Annealing N={problem.n_steps} found {len(found)} trajectories "
        f"in {used} restarts" + (" (saturated)" if saturated else "")
    )
    return [decode_positions(problem, path) for path in sorted(found)]


def _recentre(
    spec: LatticeSpec, site: SiteRef, source: LatticeSpec
) -> SiteRef:
    shift = tuple(a - b for a, b in zip(spec.center, source.center))
    return site.shifted(shift, site.sublattice)


class AnnealEngine(AbstractEngine):
    r"""Arrival tables from annealed trajectory sets.

    One encoding is built and annealed per trajectory length; odd lengths
    are skipped on bipartite lattices. Each distinct trajectory contributes
    its path probability.

    Parameters
    ----------
    restarts : int, optional
        Maximum restarts per trajectory length (default: 1000).
    window : int, optional
        Saturation window (default: 50).
    t_hot : float, optional
        Initial temperature (default: 10.0).
    t_cold : float, optional
        Final temperature (default: 0.05).
    sweeps : int, optional
        Sweeps per restart (default: 200).
    seed : int, optional
        Stream key (default: 42).
    penalty : float, optional
        Constraint weight; defaults to the calibration bound plus one.
    batch : int, optional
        Replicas annealed together (default: 64).
    n_jobs : int, optional
        Worker processes (default: 1).
    move : str, optional
        ``"relocate"`` (default) or ``"flip"``.
    complete : bool, optional
        Expand found trajectories by local relocations (default: True).
    **kwargs : dict
        Ignored extra parameters.
    """

    name = "anneal"

    def __init__(
        self,
        restarts: int = 1000,
        window: int = 50,
        t_hot: float = 10.0,
        t_cold: float = 0.05,
        sweeps: int = 200,
        seed: int = 42,
        penalty: float | None = None,
        batch: int = 64,
        n_jobs: int | None = None,
        move: str = "relocate",
        complete: bool = True,
        **kwargs,
    ):
        if move not in MOVES:
            raise ConfigurationError(f"Invalid move {move}")
        super().__init__(
            restarts=restarts,
            window=window,
            t_hot=t_hot,
            t_cold=t_cold,
            sweeps=sweeps,
            seed=seed,
            penalty=penalty,
            move=move,
            complete=complete,
            **kwargs,
        )
        self.restarts = int(restarts)
        self.window = int(window)
        self.schedule = AnnealSchedule(t_hot, t_cold, int(sweeps))
        self.seed = int(seed)
        self.penalty = penalty
        self.batch = int(batch)
        self.n_jobs = n_jobs
        self.move = move
        self.complete = bool(complete)

    def trajectories(
        self,
        spec: LatticeSpec,
        model: HopModel,
        start: SiteRef,
        tracer: SiteRef,
        n_max: int,
    ) -> list[TrajectoryRecord]:
        r"""Annealed trajectories of every length up to ``n_max``.

        Auto-sized lattices are shrunk to the size each length needs;
        returned sites are expressed in the coordinates of ``spec``.

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
        list[TrajectoryRecord]
            Trajectories weighted by their path probability.
        """
        check_setup(spec, start, tracer, n_max)
        flow = spec.cartesian(tracer) - spec.cartesian(start)
        flow = flow / np.linalg.norm(flow)
        bipartite = is_bipartite(spec)
        records = []
        for n in range(2, n_max + 1):
            if bipartite and n % 2:
                continue
            local = spec.sized_for(n) if spec.boundary == "auto-sized" else spec
            problem = build(
                local,
                model,
                _recentre(local, start, spec),
                _recentre(local, tracer, spec),
                n,
                penalty=self.penalty,
            )
            found = anneal(
                problem,
                self.schedule,
                restarts=self.restarts,
                seed=self.seed + n,
                window=self.window,
                batch=self.batch,
                n_jobs=self.n_jobs,
                move=self.move,
                complete=self.complete,
            )
            for trajectory in found:
                weight = path_weight(problem, trajectory.sites)
                sites = tuple(
                    _recentre(spec, s, local) for s in trajectory.sites
                )
                final = sites[-2]
                records.append(
                    TrajectoryRecord(
                        sites, weight, final, cos_theta(spec, tracer, final, flow)
                    )
                )
        return records

    def arrivals(
        self,
        spec: LatticeSpec,
        model: HopModel,
        start: SiteRef,
        tracer: SiteRef,
        n_max: int,
    ) -> PropagationResult:
        r"""Sum the weights of annealed trajectories by length and neighbor.

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
            Arrivals over the recovered trajectories.
        """
        records = self.trajectories(spec, model, start, tracer, n_max)
        result = aggregate_trajectories(records, n_max, engine=self.name)
        result.metadata["trajectories"] = len(records)
        return result
