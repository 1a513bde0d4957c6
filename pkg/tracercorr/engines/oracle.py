"""Exhaustive trajectory enumeration for small trajectory lengths."""

from __future__ import annotations

from collections.abc import Iterator

import numpy as np

from tracercorr.engines.base import AbstractEngine, check_setup
from tracercorr.engines.result import PropagationResult, TrajectoryRecord
from tracercorr.errors import EngineInfeasibleError, LatticeBoundsError
from tracercorr.lattice.base import HopModel, LatticeSpec, SiteRef
from tracercorr.lattice.geometry import (
    cos_theta,
    hop_distances,
    hop_table,
    neighbor_table,
)
from tracercorr.utils.pylogger import RankedLogger

log = RankedLogger(__name__, rank_zero_only=True)

DEFAULT_GUARD = 4**15


def check_guard(spec: LatticeSpec, n_max: int, guard: int) -> None:
    r"""Refuse enumerations whose naive path count exceeds ``guard``.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    n_max : int
        Maximum trajectory length N.
    guard : int
        Largest admissible ``Z ** (n_max - 1)``.

    Raises
    ------
    EngineInfeasibleError
        If the naive path count exceeds the guard.
    """
    cost = spec.max_coordination ** (n_max - 1)
    if cost > guard:
        raise EngineInfeasibleError(
            f"Enumerating {spec.name} trajectories up to N={n_max} means "
            f"up to Z^(N-1) = {spec.max_coordination}^{n_max - 1} = {cost:.3e} "
            f"paths, above the guard of {guard:.3e}; use the mu engine"
        )


def iter_paths(
    spec: LatticeSpec,
    model: HopModel,
    start: SiteRef,
    tracer: SiteRef,
    n_max: int,
) -> Iterator[tuple[list[int], float]]:
    r"""Yield every first-passage path from S to T with at most ``n_max`` sites.

    Paths are flat site indices; branches that cannot reach the tracer in
    the remaining hops are cut.

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

    Yields
    ------
    tuple[list[int], float]
        Flat site indices of the path and its probability weight.

    Raises
    ------
    LatticeBoundsError
        If a returnable branch leaves the extent.
    """
    table = neighbor_table(spec)
    probs = hop_table(spec, model)
    dist = hop_distances(spec, tracer)
    sublattice = np.repeat(np.arange(spec.n_sublattices), spec.n_cells)
    target = spec.flat_index(tracer)
    # nearest exit from the extent, in hops
    margin = min(
        min(c, n - 1 - c) for c, n in zip(tracer.cell, spec.extent)
    )
    edge = -(-(margin + 1) // spec.reach)

    path = [spec.flat_index(start)]
    stack = [(1.0, 0)]
    while stack:
        weight, entry = stack.pop()
        here = path[-1]
        hops_left = n_max - len(path)
        sub = sublattice[here]
        if entry >= spec.coordination[sub] or hops_left < 1:
            path.pop()
            continue
        stack.append((weight, entry + 1))
        nxt = table[here, entry]
        p = probs[sub, entry]
        if p == 0.0:
            continue
        if nxt < 0:
            if edge <= hops_left - 1:
                raise LatticeBoundsError(
                    f"Trajectory on lattice {spec.name!r} left the extent "
                    f"{spec.extent} with {hops_left} hops to spare"
                )
            continue
        if nxt == target:
            yield [*path, nxt], weight * p
        elif dist[nxt] <= hops_left - 1:
            path.append(nxt)
            stack.append((weight * p, 0))


def enumerate_trajectories(
    spec: LatticeSpec,
    model: HopModel,
    start: SiteRef,
    tracer: SiteRef,
    n_max: int,
    guard: int = DEFAULT_GUARD,
) -> list[TrajectoryRecord]:
    r"""List every valid trajectory of length ``N <= n_max``.

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
    guard : int, optional
        Largest admissible ``Z ** (n_max - 1)`` (default: 4**15).

    Returns
    -------
    list[TrajectoryRecord]
        Trajectories in depth-first order.

    Raises
    ------
    EngineInfeasibleError
        If the enumeration is above the guard.
    """
    check_setup(spec, start, tracer, n_max)
    check_guard(spec, n_max, guard)
    flow = spec.cartesian(tracer) - spec.cartesian(start)
    flow = flow / np.linalg.norm(flow)
    cosines: dict[SiteRef, float] = {}
    records = []
    for path, weight in iter_paths(spec, model, start, tracer, n_max):
        sites = tuple(spec.site_at(i) for i in path)
        final = sites[-2]
        if final not in cosines:
            cosines[final] = cos_theta(spec, tracer, final, flow)
        records.append(TrajectoryRecord(sites, weight, final, cosines[final]))
    return records


class EnumerationEngine(AbstractEngine):
    r"""Brute-force oracle engine.

    Parameters
    ----------
    guard : int, optional
        Largest admissible ``Z ** (n_max - 1)`` (default: 4**15).
    **kwargs : dict
        Ignored extra parameters.
    """

    name = "oracle"

    def __init__(self, guard: int = DEFAULT_GUARD, **kwargs):
        super().__init__(guard=guard, **kwargs)
        self.guard = int(guard)

    def arrivals(
        self,
        spec: LatticeSpec,
        model: HopModel,
        start: SiteRef,
        tracer: SiteRef,
        n_max: int,
    ) -> PropagationResult:
        r"""Enumerate trajectories and sum their weights.

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
            Exact arrivals.
        """
        check_setup(spec, start, tracer, n_max)
        check_guard(spec, n_max, self.guard)
        per_step: dict[int, dict[SiteRef, float]] = {
            n: {} for n in range(2, n_max + 1)
        }
        count = 0
        for path, weight in iter_paths(spec, model, start, tracer, n_max):
            entries = per_step[len(path)]
            final = spec.site_at(path[-2])
            entries[final] = entries.get(final, 0.0) + weight
            count += 1
        log.info(f"Enumerated {count} {spec.name} trajectories up to N={n_max}")
        return PropagationResult(
            per_step_arrivals=per_step, n_max=n_max, engine=self.name
        )

    def trajectories(
        self,
        spec: LatticeSpec,
        model: HopModel,
        start: SiteRef,
        tracer: SiteRef,
        n_max: int,
    ) -> list[TrajectoryRecord]:
        r"""Every trajectory up to ``n_max`` as an explicit table.

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
            Trajectories in depth-first order.
        """
        return enumerate_trajectories(
            spec, model, start, tracer, n_max, guard=self.guard
        )
