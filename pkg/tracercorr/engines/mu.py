"""Matrix-updating engine: exact step-by-step propagation of vacancy mass."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from tracercorr.engines.base import AbstractEngine, check_setup
from tracercorr.engines.result import PropagationResult
from tracercorr.errors import ConfigurationError, LatticeBoundsError
from tracercorr.lattice.base import HopModel, LatticeSpec, SiteRef
from tracercorr.lattice.geometry import distance_bound, hop_table
from tracercorr.utils.pylogger import RankedLogger

log = RankedLogger(__name__, rank_zero_only=True)

MODES = ("weight", "count", "log")

_EMPTY = {"weight": 0.0, "count": 0, "log": -np.inf}
_UNIT = {"weight": 1.0, "count": 1, "log": 0.0}


def _empty_array(shape: tuple[int, ...], mode: str) -> np.ndarray:
    if mode == "count":
        return np.zeros(shape, dtype=object)
    return np.full(shape, _EMPTY[mode], dtype=float)


def _to_weight(value, mode: str):
    if mode == "log":
        return float(np.exp(value))
    if mode == "count":
        return int(value)
    return float(value)


def _total(values: np.ndarray, mode: str):
    if mode == "log":
        return float(np.exp(logsumexp(values))) if values.size else 0.0
    if mode == "count":
        return int(values.sum()) if values.size else 0
    return float(values.sum())


@dataclass
class FieldState:
    r"""Per-site trajectory mass at a given step.

    Parameters
    ----------
    spec : LatticeSpec
        Lattice the field lives on.
    masses : np.ndarray
        Dense array of shape ``spec.shape``: probability mass (weight),
        exact trajectory counts (count) or log-mass (log).
    step : int, optional
        Number of hops taken so far.
    mode : str, optional
        ``"weight"``, ``"count"`` or ``"log"``.
    absorbed : float, optional
        Mass absorbed at the tracer so far.
    pruned : float, optional
        Mass removed because it can no longer return within ``horizon``.
    horizon : int, optional
        Maximum trajectory length N; enables pruning when set.
    """

    spec: LatticeSpec
    masses: np.ndarray
    step: int = 0
    mode: str = "weight"
    absorbed: float = 0.0
    pruned: float = 0.0
    horizon: int | None = None
    bound: np.ndarray | None = field(default=None, repr=False)

    def mass_at(self, site: SiteRef):
        r"""Mass stored at a site, in the field's representation.

        Parameters
        ----------
        site : SiteRef
            A site inside the extent.

        Returns
        -------
        float or int
            The stored value.
        """
        return self.masses[(site.sublattice, *site.cell)]

    def total(self) -> float:
        r"""Total field mass as a weight (or count in count mode).

        Returns
        -------
        float or int
            Sum over all sites.
        """
        return _total(self.masses.ravel(), self.mode)

    def occupied(self) -> np.ndarray:
        r"""Boolean mask of sites holding mass.

        Returns
        -------
        np.ndarray
            Mask of shape ``spec.shape``.
        """
        if self.mode == "log":
            return self.masses > -np.inf
        return self.masses != 0


def init_field(
    spec: LatticeSpec,
    start: SiteRef,
    mode: str = "weight",
    horizon: int | None = None,
) -> FieldState:
    r"""Field with unit mass at ``start`` and nothing elsewhere.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    start : SiteRef
        Initial vacancy position.
    mode : str, optional
        ``"weight"`` (default), ``"count"`` or ``"log"``.
    horizon : int, optional
        Maximum trajectory length N, enabling light-cone pruning.

    Returns
    -------
    FieldState
        The field at step 0.

    Raises
    ------
    ConfigurationError
        If the mode is unknown.
    LatticeBoundsError
        If ``start`` lies outside the extent.
    """
    if mode not in MODES:
        raise ConfigurationError(f"Invalid mode {mode}")
    if not spec.contains(start):
        raise LatticeBoundsError(
            f"Start site {start} lies outside the extent {spec.extent}"
        )
    masses = _empty_array(spec.shape, mode)
    masses[(start.sublattice, *start.cell)] = _UNIT[mode]
    return FieldState(
        spec=spec,
        masses=masses,
        mode=mode,
        absorbed=0 if mode == "count" else 0.0,
        pruned=0 if mode == "count" else 0.0,
        horizon=horizon,
    )


def _support_box(occupied: np.ndarray) -> tuple[slice, ...] | None:
    cells = occupied.any(axis=0)
    if not cells.any():
        return None
    box = []
    for axis in range(cells.ndim):
        others = tuple(a for a in range(cells.ndim) if a != axis)
        idx = np.flatnonzero(cells.any(axis=others) if others else cells)
        box.append(slice(int(idx[0]), int(idx[-1]) + 1))
    return tuple(box)


def _shift(
    box: tuple[slice, ...], offset: tuple[int, ...], extent: tuple[int, ...]
) -> tuple[tuple[slice, ...], tuple[slice, ...]]:
    src, dst = [], []
    for sl, o, n in zip(box, offset, extent):
        lo, hi = max(sl.start, -o), min(sl.stop, n - o)
        if hi < lo:
            hi = lo
        src.append(slice(lo, hi))
        dst.append(slice(lo + o, hi + o))
    return tuple(src), tuple(dst)


def _advance(
    state: FieldState, probs: np.ndarray, tracer: SiteRef
) -> tuple[FieldState, dict[SiteRef, float]]:
    spec, mode = state.spec, state.mode
    old = state.masses
    occupied = state.occupied()
    box = _support_box(occupied)
    new = _empty_array(spec.shape, mode)
    arrivals: dict[SiteRef, float] = {}

    if box is not None:
        for s, entries in enumerate(spec.stencil):
            for e, entry in enumerate(entries):
                p = probs[s, e]
                if p == 0.0:
                    continue
                src, dst = _shift(box, entry.offset, spec.extent)
                if np.count_nonzero(occupied[(s, *src)]) != np.count_nonzero(
                    occupied[(s, *box)]
                ):
                    raise LatticeBoundsError(
                        f"Vacancy mass on lattice {spec.name!r} reached the "
                        f"boundary of extent {spec.extent} at step "
                        f"{state.step}"
                    )
                target = new[(entry.target, *dst)]
                source = old[(s, *src)]
                if mode == "weight":
                    target += p * source
                elif mode == "count":
                    target += source
                else:
                    np.logaddexp(target, source + np.log(p), out=target)

                # mass hopping from the tracer's neighbor into the tracer
                if entry.target != tracer.sublattice:
                    continue
                origin = tuple(
                    c - o for c, o in zip(tracer.cell, entry.offset)
                )
                if not all(0 <= c < n for c, n in zip(origin, spec.extent)):
                    continue
                mass = old[(s, *origin)]
                if mass == _EMPTY[mode]:
                    continue
                site = SiteRef(origin, s)
                if mode == "weight":
                    arrivals[site] = arrivals.get(site, 0.0) + p * mass
                elif mode == "count":
                    arrivals[site] = arrivals.get(site, 0) + mass
                else:
                    arrivals[site] = np.logaddexp(
                        arrivals.get(site, -np.inf), mass + np.log(p)
                    )

    new[(tracer.sublattice, *tracer.cell)] = _EMPTY[mode]
    absorbed = state.absorbed + sum(
        _to_weight(v, mode) for v in arrivals.values()
    )
    pruned = state.pruned
    step = state.step + 1
    if state.horizon is not None:
        bound = state.bound
        if bound is None:
            bound = distance_bound(spec, tracer)
        mask = bound > state.horizon - 1 - step
        pruned = pruned + _total(new[mask], mode)
        new[mask] = _EMPTY[mode]
    else:
        bound = state.bound

    return (
        dataclasses.replace(
            state,
            masses=new,
            step=step,
            absorbed=absorbed,
            pruned=pruned,
            bound=bound,
        ),
        arrivals,
    )


def propagate_step(
    field: FieldState, model: HopModel, tracer: SiteRef
) -> tuple[FieldState, dict[SiteRef, float]]:
    r"""Advance the field by one hop and absorb mass at the tracer.

    New mass at a site is the sum over its neighbors of their old mass
    times the probability of hopping into the site. The mass each tracer
    neighbor sends into the tracer is reported as an arrival, then the
    tracer site is zeroed. Count mode ignores the hop probabilities and
    counts trajectories.

    Parameters
    ----------
    field : FieldState
        Current field.
    model : HopModel
        Barriers and temperature.
    tracer : SiteRef
        Absorbing tracer site.

    Returns
    -------
    tuple[FieldState, dict[SiteRef, float]]
        The field one step later and the arrival mass per tracer
        neighbor, in the field's representation.

    Raises
    ------
    LatticeBoundsError
        If mass would hop out of the extent.
    """
    return _advance(field, hop_table(field.spec, model), tracer)


def _check_countable(spec: LatticeSpec, model: HopModel) -> None:
    # counts convert to weights through a single factor Z^-(N-1)
    if not model.uniform:
        raise ConfigurationError(
            "Invalid mode count with hop barriers; counts carry no hop "
            "probabilities, use mode weight or log"
        )
    if len(set(spec.coordination)) > 1:
        raise ConfigurationError(
            f"Invalid mode count on {spec.name!r}: sublattice coordinations "
            f"{spec.coordination} differ, use mode weight or log"
        )


def run(
    spec: LatticeSpec,
    model: HopModel,
    start: SiteRef,
    tracer: SiteRef,
    n_max: int,
    mode: str = "weight",
) -> PropagationResult:
    r"""First-arrival masses for every trajectory length ``2..n_max``.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    model : HopModel
        Barriers and temperature.
    start : SiteRef
        Vacancy start site S, adjacent to the tracer.
    tracer : SiteRef
        Tracer site T.
    n_max : int
        Maximum trajectory length N (at least 2).
    mode : str, optional
        ``"weight"`` (default), ``"count"`` or ``"log"``.

    Returns
    -------
    PropagationResult
        ``per_step_arrivals[N][k]`` for N in ``2..n_max``; log-mode masses
        are exponentiated.

    Raises
    ------
    DomainError
        If S is not adjacent to T or ``n_max < 2``.
    ConfigurationError
        If count mode is asked for non-uniform hop probabilities.
    """
    check_setup(spec, start, tracer, n_max)
    if mode == "count":
        _check_countable(spec, model)
    probs = hop_table(spec, model)
    state = init_field(spec, start, mode=mode, horizon=n_max)
    per_step: dict[int, dict[SiteRef, float]] = {}
    for n in range(2, n_max + 1):
        state, arrivals = _advance(state, probs, tracer)
        per_step[n] = {
            k: _to_weight(v, mode)
            for k, v in arrivals.items()
            if _to_weight(v, mode) != 0
        }

    if mode != "count":
        balance = state.total() + state.absorbed + state.pruned
        if abs(balance - 1.0) > 1e-9:
            log.warning(f"Mass balance off by {balance - 1.0:.3e}")

    return PropagationResult(
        per_step_arrivals=per_step,
        n_max=n_max,
        mode=mode,
        engine="mu",
        pruned_mass=state.pruned,
    )


class MatrixUpdateEngine(AbstractEngine):
    r"""Exact propagation engine.

    Parameters
    ----------
    mode : str, optional
        ``"weight"`` (default), ``"count"`` or ``"log"``.
    **kwargs : dict
        Ignored extra parameters.
    """

    name = "mu"

    def __init__(self, mode: str = "weight", **kwargs):
        if mode not in MODES:
            raise ConfigurationError(f"Invalid mode {mode}")
        super().__init__(mode=mode, **kwargs)
        self.mode = mode

    def arrivals(
        self,
        spec: LatticeSpec,
        model: HopModel,
        start: SiteRef,
        tracer: SiteRef,
        n_max: int,
    ) -> PropagationResult:
        r"""Propagate the field up to ``n_max``.

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
            Exact arrivals, converted to weights in count mode.
        """
        log.info(
            f"Propagating {spec.name} field up to N={n_max} in {self.mode} mode"
        )
        result = run(spec, model, start, tracer, n_max, mode=self.mode)
        if self.mode == "count":
            result = result.as_weights(spec.max_coordination)
        return result
