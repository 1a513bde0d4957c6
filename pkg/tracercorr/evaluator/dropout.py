"""Sensitivity of the correlation factor to missing trajectories."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from tracercorr.engines.result import TrajectoryRecord
from tracercorr.errors import DomainError
from tracercorr.evaluator.corrfactor import correlation_factor


@dataclass(frozen=True)
class DropoutReport:
    r"""Relative bias of the correlation factor under random dropout.

    Parameters
    ----------
    rate : float
        Probability of dropping each trajectory.
    trials : int
        Number of repetitions.
    reference_f : float
        Correlation factor of the full table.
    mean_bias : float
        Mean relative bias with survivors renormalized per length.
    spread : float
        Standard deviation of the renormalized relative bias.
    raw_mean_bias : float
        Mean relative bias without renormalization.
    raw_spread : float
        Standard deviation without renormalization.
    """

    rate: float
    trials: int
    reference_f: float
    mean_bias: float
    spread: float
    raw_mean_bias: float
    raw_spread: float


def _factor(avg_cos: np.ndarray) -> np.ndarray:
    return (1.0 + avg_cos) / (1.0 - avg_cos)


def dropout_sensitivity(
    trajectories: Sequence[TrajectoryRecord],
    rate: float,
    seed: int = 0,
    trials: int = 100,
) -> DropoutReport:
    r"""Drop trajectories at random and measure the shift of ``f``.

    In every trial each trajectory is removed independently with
    probability ``rate``. The renormalized estimate rescales the survivors
    of every length to the full mass of that length before recomputing the
    average cosine; the raw estimate uses the survivors as they are. A
    length whose trajectories are all dropped in a trial keeps them, since a
    sampler always returns at least one ground state of every length.

    A lone surviving trajectory with ``cos = -1`` carries the full mass of
    its length in the renormalized estimate and pulls ``f`` toward 0. Over
    many trials these shifts largely cancel, and near ``rate = 1`` most
    lengths are lost and kept whole, so ``mean_bias`` stays close to zero
    (about ``-1e-3`` on the square lattice at 0.99). Only its sign is
    meaningful there. The raw estimate loses mass instead, which moves the
    average cosine toward zero and ``f`` toward 1 when all cosines are
    negative.

    Parameters
    ----------
    trajectories : Sequence[TrajectoryRecord]
        Full trajectory table.
    rate : float
        Dropout probability in ``[0, 1)``.
    seed : int, optional
        Key of the Philox stream (default: 0).
    trials : int, optional
        Number of repetitions (default: 100).

    Returns
    -------
    DropoutReport
        Biases relative to the full-table correlation factor.

    Raises
    ------
    DomainError
        If the table is empty, the rate is outside ``[0, 1)`` or
        ``trials < 1``.
    """
    if not trajectories:
        raise DomainError("Invalid trajectory table: empty")
    if not 0.0 <= rate < 1.0:
        raise DomainError(f"Invalid dropout rate {rate}")
    if trials < 1:
        raise DomainError(f"Invalid trials {trials}")

    weights = np.array([t.weight for t in trajectories])
    cosines = np.array([t.theta_cos for t in trajectories])
    lengths = np.array([t.n_steps for t in trajectories])
    groups, group = np.unique(lengths, return_inverse=True)
    full_mass = np.bincount(group, weights=weights, minlength=len(groups))
    reference = correlation_factor(float(weights @ cosines))

    rng = np.random.Generator(np.random.Philox(key=seed))
    keep = rng.random((trials, len(trajectories))) >= rate
    lost = np.stack(
        [np.bincount(group, weights=row, minlength=len(groups)) for row in keep]
    ) == 0
    keep |= lost[:, group]
    kept = keep * weights

    raw = _factor(kept @ cosines)

    survived = np.stack(
        [np.bincount(group, weights=row, minlength=len(groups)) for row in kept]
    )
    scale = np.divide(
        full_mass, survived, out=np.zeros_like(survived), where=survived > 0
    )
    renormalized = _factor((kept * scale[:, group]) @ cosines)

    bias = renormalized / reference - 1.0
    raw_bias = raw / reference - 1.0
    return DropoutReport(
        rate=rate,
        trials=trials,
        reference_f=reference,
        mean_bias=float(bias.mean()),
        spread=float(bias.std()),
        raw_mean_bias=float(raw_bias.mean()),
        raw_spread=float(raw_bias.std()),
    )
