"""Coverage of recovered trajectory sets against a reference table."""

from collections import Counter
from collections.abc import Iterable

from tracercorr.engines.result import TrajectoryRecord
from tracercorr.lattice.base import SiteRef


def trajectory_coverage(
    found: Iterable[tuple[SiteRef, ...]],
    reference: Iterable[TrajectoryRecord],
) -> dict[int, float]:
    r"""Fraction of reference trajectories recovered, per length.

    Parameters
    ----------
    found : Iterable[tuple[SiteRef, ...]]
        Recovered site sequences.
    reference : Iterable[TrajectoryRecord]
        Complete trajectory table, typically from the enumeration oracle.

    Returns
    -------
    dict[int, float]
        Coverage in ``[0, 1]`` for every length present in the reference.
    """
    found = set(found)
    total: Counter[int] = Counter()
    hit: Counter[int] = Counter()
    for record in reference:
        total[record.n_steps] += 1
        if record.sites in found:
            hit[record.n_steps] += 1
    return {n: hit[n] / total[n] for n in sorted(total)}
