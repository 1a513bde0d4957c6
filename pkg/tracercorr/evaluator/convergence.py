"""Convergence tables of the correlation factor over truncation horizons."""

from collections.abc import Sequence

import numpy as np
import pandas as pd

from tracercorr.engines.base import AbstractEngine
from tracercorr.engines.result import PropagationResult
from tracercorr.errors import DomainError, EngineInfeasibleError
from tracercorr.evaluator.corrfactor import estimate
from tracercorr.lattice.base import HopModel, LatticeSpec, SiteRef
from tracercorr.lattice.geometry import is_bipartite
from tracercorr.utils.pylogger import RankedLogger

log = RankedLogger(__name__, rank_zero_only=True)

COLUMNS = ["n_max", "engine", "f", "captured_mass", "stderr", "note"]


def _row(
    result: PropagationResult,
    n: int,
    spec: LatticeSpec,
    tracer: SiteRef,
    flow: np.ndarray,
) -> dict:
    est = estimate(result.truncate(n), spec, tracer, flow)
    return {
        "n_max": n,
        "engine": result.engine,
        "f": est.f,
        "captured_mass": est.captured_mass,
        "stderr": est.stderr_f,
        "note": None,
    }


def _empty_row(n: int, engine: str, note: str) -> dict:
    return {
        "n_max": n,
        "engine": engine,
        "f": None,
        "captured_mass": None,
        "stderr": None,
        "note": note,
    }


def convergence_table(
    spec: LatticeSpec,
    model: HopModel,
    start: SiteRef,
    tracer: SiteRef,
    flow: np.ndarray,
    engine: AbstractEngine,
    n_list: Sequence[int],
) -> pd.DataFrame:
    r"""Correlation factor for every truncation horizon in ``n_list``.

    The engine runs once at the largest horizon and smaller horizons are
    read from the truncated table. If that run is infeasible every horizon
    is run on its own, and the ones that stay infeasible are reported with
    the refusal message. Odd horizons on bipartite lattices carry no new
    arrivals and are left empty.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice, sized for the largest horizon.
    model : HopModel
        Barriers and temperature.
    start : SiteRef
        Vacancy start site S.
    tracer : SiteRef
        Tracer site T.
    flow : np.ndarray
        Unit flow vector.
    engine : AbstractEngine
        Engine producing the arrival tables.
    n_list : Sequence[int]
        Truncation horizons.

    Returns
    -------
    pd.DataFrame
        One row per horizon with columns ``n_max, engine, f,
        captured_mass, stderr, note``.

    Raises
    ------
    DomainError
        If ``n_list`` is empty or holds a horizon below 2.
    """
    horizons = sorted(set(int(n) for n in n_list))
    if not horizons:
        raise DomainError("Invalid n_list: no horizons given")
    if horizons[0] < 2:
        raise DomainError(f"Invalid n_max {horizons[0]}")
    bipartite = is_bipartite(spec)

    def parity(n: int) -> bool:
        return bipartite and n % 2 == 1

    rows = []
    try:
        result = engine.arrivals(spec, model, start, tracer, horizons[-1])
    except EngineInfeasibleError as ex:
        log.warning(f"{ex}; running each horizon on its own")
        for n in horizons:
            if parity(n):
                rows.append(_empty_row(n, engine.name, "parity"))
                continue
            try:
                result = engine.arrivals(spec, model, start, tracer, n)
            except EngineInfeasibleError as row_ex:
                rows.append(_empty_row(n, engine.name, str(row_ex)))
                continue
            rows.append(_row(result, n, spec, tracer, flow))
    else:
        for n in horizons:
            if parity(n):
                rows.append(_empty_row(n, result.engine, "parity"))
            else:
                rows.append(_row(result, n, spec, tracer, flow))
    return pd.DataFrame(rows, columns=COLUMNS)
