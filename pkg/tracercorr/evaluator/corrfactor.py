"""Average cosine and correlation factor of arrival tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from tracercorr.engines.result import PropagationResult
from tracercorr.errors import DivergenceError, DomainError
from tracercorr.lattice.base import LatticeSpec, SiteRef
from tracercorr.lattice.geometry import cos_theta


@dataclass
class CorrelationEstimate:
    r"""Correlation factor of a truncated arrival table.

    Parameters
    ----------
    avg_cos : float
        Average cosine over the captured arrivals.
    f : float
        Correlation factor ``(1 + avg_cos) / (1 - avg_cos)``.
    per_n : dict[int, float]
        Contribution of every trajectory length to ``avg_cos``.
    captured_mass : float
        Total arrival mass up to ``n_max``.
    engine : str
        Engine behind the table.
    n_max : int
        Truncation horizon.
    stderr_f : float, optional
        Standard error of ``f`` for sampled tables.
    """

    avg_cos: float
    f: float
    per_n: dict[int, float]
    captured_mass: float
    engine: str
    n_max: int
    stderr_f: float | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        r"""JSON-ready form.

        Returns
        -------
        dict
            Every field, ``per_n`` keyed by string.
        """
        return {
            "engine": self.engine,
            "n_max": self.n_max,
            "f": self.f,
            "avg_cos": self.avg_cos,
            "captured_mass": self.captured_mass,
            "stderr_f": self.stderr_f,
            "per_n": {str(n): c for n, c in sorted(self.per_n.items())},
            **self.metadata,
        }


def neighbor_cosines(
    spec: LatticeSpec,
    tracer: SiteRef,
    flow: np.ndarray,
    sites,
) -> dict[SiteRef, float]:
    r"""Cosine of every tracer neighbor in ``sites``.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    tracer : SiteRef
        Tracer site.
    flow : np.ndarray
        Unit flow vector.
    sites : Iterable[SiteRef]
        Tracer neighbors.

    Returns
    -------
    dict[SiteRef, float]
        Cosine per neighbor.
    """
    return {k: cos_theta(spec, tracer, k, flow) for k in set(sites)}


def per_step_cosine(
    arrivals: PropagationResult,
    spec: LatticeSpec,
    tracer: SiteRef,
    flow: np.ndarray,
) -> dict[int, float]:
    r"""Contribution of every trajectory length to the average cosine.

    Parameters
    ----------
    arrivals : PropagationResult
        Arrival table.
    spec : LatticeSpec
        The lattice.
    tracer : SiteRef
        Tracer site.
    flow : np.ndarray
        Unit flow vector.

    Returns
    -------
    dict[int, float]
        ``sum_k P_k^(N) cos(theta_k)`` per N.
    """
    cosines = neighbor_cosines(
        spec,
        tracer,
        flow,
        (k for entries in arrivals.per_step_arrivals.values() for k in entries),
    )
    return {
        n: math.fsum(p * cosines[k] for k, p in entries.items())
        for n, entries in sorted(arrivals.per_step_arrivals.items())
    }


def average_cosine(
    arrivals: PropagationResult,
    spec: LatticeSpec,
    tracer: SiteRef,
    flow: np.ndarray,
) -> float:
    r"""Average cosine of the tracer's next exchange direction.

    Parameters
    ----------
    arrivals : PropagationResult
        Arrival table; an empty table gives 0.
    spec : LatticeSpec
        The lattice.
    tracer : SiteRef
        Tracer site.
    flow : np.ndarray
        Unit flow vector.

    Returns
    -------
    float
        ``sum_N sum_k P_k^(N) cos(theta_k)``.
    """
    return math.fsum(per_step_cosine(arrivals, spec, tracer, flow).values())


def correlation_factor(avg_cos: float) -> float:
    r"""Correlation factor ``(1 + c) / (1 - c)``.

    Parameters
    ----------
    avg_cos : float
        Average cosine in ``[-1, 1)``.

    Returns
    -------
    float
        The correlation factor; 0 at ``c = -1`` and 1 at ``c = 0``.

    Raises
    ------
    DivergenceError
        If ``avg_cos`` equals 1.
    DomainError
        If ``avg_cos`` lies outside ``[-1, 1]``.
    """
    if not -1.0 - 1e-12 <= avg_cos <= 1.0 + 1e-12:
        raise DomainError(f"Invalid average cosine {avg_cos}")
    if avg_cos >= 1.0:
        raise DivergenceError(
            "The correlation factor diverges for an average cosine of 1"
        )
    avg_cos = max(avg_cos, -1.0)
    return (1.0 + avg_cos) / (1.0 - avg_cos)


def sampled_stderr(
    arrivals: PropagationResult,
    spec: LatticeSpec,
    tracer: SiteRef,
    flow: np.ndarray,
) -> float | None:
    r"""Standard error of the correlation factor of a sampled table.

    Every walker contributes the cosine of its arrival neighbor, or 0 when
    it does not return, so ``se_c = sqrt((sum P cos^2 - c^2) / W)`` and
    ``se_f = 2 se_c / (1 - c)^2``.

    Parameters
    ----------
    arrivals : PropagationResult
        Sampled arrival table.
    spec : LatticeSpec
        The lattice.
    tracer : SiteRef
        Tracer site.
    flow : np.ndarray
        Unit flow vector.

    Returns
    -------
    float or None
        Standard error, or None for exact tables.
    """
    if not arrivals.stochastic:
        return None
    cosines = neighbor_cosines(
        spec,
        tracer,
        flow,
        (k for entries in arrivals.per_step_arrivals.values() for k in entries),
    )
    first = second = 0.0
    for entries in arrivals.per_step_arrivals.values():
        for k, p in entries.items():
            first += p * cosines[k]
            second += p * cosines[k] ** 2
    variance = max(second - first**2, 0.0) / arrivals.walkers
    return 2.0 * math.sqrt(variance) / (1.0 - first) ** 2


def estimate(
    arrivals: PropagationResult,
    spec: LatticeSpec,
    tracer: SiteRef | None = None,
    flow: np.ndarray | None = None,
) -> CorrelationEstimate:
    r"""Correlation factor of an arrival table.

    Uncaptured mass is left out of the average cosine, so the estimate
    converges from above as ``n_max`` grows.

    Parameters
    ----------
    arrivals : PropagationResult
        Arrival table from any engine.
    spec : LatticeSpec
        The lattice.
    tracer : SiteRef, optional
        Tracer site (default: the lattice's tracer).
    flow : np.ndarray, optional
        Unit flow vector (default: from S toward T).

    Returns
    -------
    CorrelationEstimate
        The estimate.
    """
    tracer = spec.tracer if tracer is None else tracer
    flow = spec.flow if flow is None else np.asarray(flow, dtype=float)
    per_n = per_step_cosine(arrivals, spec, tracer, flow)
    avg_cos = math.fsum(per_n.values())
    return CorrelationEstimate(
        avg_cos=avg_cos,
        f=correlation_factor(avg_cos),
        per_n=per_n,
        captured_mass=float(arrivals.captured_mass),
        engine=arrivals.engine,
        n_max=arrivals.n_max,
        stderr_f=sampled_stderr(arrivals, spec, tracer, flow),
    )
