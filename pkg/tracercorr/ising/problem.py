"""Binary quadratic encoding of fixed-length vacancy trajectories.

Variable ``q(a, i)`` is 1 when the vacancy sits on site ``a`` at time step
``i`` (1-based). The energy is

    sum_i sum_(a->b) t(a->b) q(a, i) q(b, i + 1)
    + L * [ sum_i (sum_a q(a, i) - 1)^2 + (q(S, 1) - 1)^2
            + (sum_(1<i<N) q(T, i))^2 + (q(T, N) - 1)^2 ]

with ``t(a->b) = ln p(b|a)`` and a single penalty weight ``L``.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import dimod
import numpy as np

from tracercorr.engines.base import check_setup
from tracercorr.errors import DomainError, EngineInfeasibleError
from tracercorr.lattice.base import HopModel, LatticeSpec, SiteRef
from tracercorr.lattice.geometry import hop_table, neighbor_table
from tracercorr.utils.pylogger import RankedLogger

log = RankedLogger(__name__, rank_zero_only=True)

VIOLATIONS = (
    "multi-occupancy",
    "empty-step",
    "bad-endpoint",
    "early-coalescence",
    "non-adjacent-hop",
)


@dataclass(frozen=True, eq=False)
class IsingProblem:
    r"""Trajectory encoding for a fixed length N.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice; every site inside its extent gets N variables.
    model : HopModel
        Barriers and temperature behind the hop couplings.
    start : SiteRef
        Vacancy start site S.
    tracer : SiteRef
        Tracer site T.
    n_steps : int
        Trajectory length N.
    bqm : dimod.BinaryQuadraticModel
        Binary model over integer variables ``0..num_variables-1``.
    penalty : float
        Weight of every constraint term.
    hop_coeffs : dict[tuple[int, int], float]
        ``t(a->b)`` per ordered pair of flat site indices.
    """

    spec: LatticeSpec
    model: HopModel
    start: SiteRef
    tracer: SiteRef
    n_steps: int
    bqm: dimod.BinaryQuadraticModel
    penalty: float
    hop_coeffs: dict[tuple[int, int], float] = field(repr=False)

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(lattice={self.spec.name!r}, "
            f"n_steps={self.n_steps}, num_variables={self.num_variables}, "
            f"penalty={self.penalty:.6g})"
        )

    @property
    def n_sites(self) -> int:
        r"""Number of lattice sites encoded per step.

        Returns
        -------
        int
            Sites inside the extent.
        """
        return self.spec.n_sites

    @property
    def num_variables(self) -> int:
        r"""Number of binary variables, sites times steps.

        Returns
        -------
        int
            Variable count.
        """
        return self.n_sites * self.n_steps

    def var_index(self, site: SiteRef, step: int) -> int:
        r"""Variable id of ``q(site, step)``.

        Parameters
        ----------
        site : SiteRef
            A site inside the extent.
        step : int
            Time step, 1-based.

        Returns
        -------
        int
            Variable id.
        """
        return (step - 1) * self.n_sites + self.spec.flat_index(site)

    def variable(self, var: int) -> tuple[SiteRef, int]:
        r"""Inverse of :meth:`var_index`.

        Parameters
        ----------
        var : int
            Variable id.

        Returns
        -------
        tuple[SiteRef, int]
            Site and 1-based step.
        """
        step, flat = divmod(int(var), self.n_sites)
        return self.spec.site_at(flat), step + 1

    @property
    def linear(self) -> dict[int, float]:
        r"""Linear coefficients per variable.

        Returns
        -------
        dict[int, float]
            Bias of every variable.
        """
        return {int(v): float(b) for v, b in self.bqm.linear.items()}

    @property
    def quadratic(self) -> dict[tuple[int, int], float]:
        r"""Quadratic coefficients keyed by ordered pairs ``(u, v)``, u < v.

        Returns
        -------
        dict[tuple[int, int], float]
            Coupling per pair.
        """
        return {
            (min(int(u), int(v)), max(int(u), int(v))): float(b)
            for (u, v), b in self.bqm.quadratic.items()
        }

    @property
    def constant_offset(self) -> float:
        r"""Constant term of the expansion.

        Returns
        -------
        float
            Offset of the binary model.
        """
        return float(self.bqm.offset)

    @property
    def max_hop(self) -> float:
        r"""Largest ``|t|`` over hop couplings.

        Returns
        -------
        float
            Maximum absolute hop coefficient.
        """
        return max((abs(t) for t in self.hop_coeffs.values()), default=0.0)

    @property
    def calibration_bound(self) -> float:
        r"""Penalty weight above which invalid configs never win, ``2 N max|t|``.

        Returns
        -------
        float
            The bound.
        """
        return calibration_bound(self.n_steps, self.max_hop)

    @cached_property
    def adjacency(self) -> np.ndarray:
        r"""Boolean site adjacency inside the extent.

        Returns
        -------
        np.ndarray
            Matrix of shape ``(n_sites, n_sites)``.
        """
        adj = np.zeros((self.n_sites, self.n_sites), dtype=bool)
        for a, b in self.hop_coeffs:
            adj[a, b] = True
        return adj


def calibration_bound(n_steps: int, max_hop: float) -> float:
    r"""Penalty separation bound ``2 N max|t|``.

    Parameters
    ----------
    n_steps : int
        Trajectory length N.
    max_hop : float
        Largest absolute hop coefficient.

    Returns
    -------
    float
        The bound.
    """
    return 2.0 * n_steps * max_hop


def default_penalty(n_steps: int, max_hop: float) -> float:
    r"""Default penalty weight, one unit above the calibration bound.

    Parameters
    ----------
    n_steps : int
        Trajectory length N.
    max_hop : float
        Largest absolute hop coefficient.

    Returns
    -------
    float
        ``2 N max|t| + 1``.
    """
    return calibration_bound(n_steps, max_hop) + 1.0


def hop_couplings(
    spec: LatticeSpec, model: HopModel
) -> dict[tuple[int, int], float]:
    r"""``t(a->b) = ln p(b|a)`` for every neighbor pair inside the extent.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    model : HopModel
        Barriers and temperature.

    Returns
    -------
    dict[tuple[int, int], float]
        Coefficient per ordered pair of flat indices; impossible hops are
        left out.
    """
    table = neighbor_table(spec)
    probs = hop_table(spec, model)
    sublattice = np.repeat(np.arange(spec.n_sublattices), spec.n_cells)
    couplings: dict[tuple[int, int], float] = {}
    for a in range(spec.n_sites):
        s = sublattice[a]
        for e in range(spec.coordination[s]):
            b = table[a, e]
            if b >= 0 and probs[s, e] > 0.0:
                couplings[(a, int(b))] = float(np.log(probs[s, e]))
    return couplings


def build(
    spec: LatticeSpec,
    model: HopModel,
    start: SiteRef,
    tracer: SiteRef,
    n: int,
    penalty: float | None = None,
) -> IsingProblem:
    r"""Build the trajectory encoding for length ``n``.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    model : HopModel
        Barriers and temperature.
    start : SiteRef
        Vacancy start site S, adjacent to T.
    tracer : SiteRef
        Tracer site T.
    n : int
        Trajectory length N (at least 2).
    penalty : float, optional
        Constraint weight; defaults to ``2 N max|t| + 1``.

    Returns
    -------
    IsingProblem
        The encoding.

    Raises
    ------
    DomainError
        If ``n < 2`` or S is not adjacent to T.
    """
    if n < 2:
        raise DomainError(f"Invalid trajectory length {n}")
    check_setup(spec, start, tracer, n)

    couplings = hop_couplings(spec, model)
    max_hop = max((abs(t) for t in couplings.values()), default=0.0)
    if penalty is None:
        penalty = default_penalty(n, max_hop)
    elif penalty <= calibration_bound(n, max_hop):
        log.warning(
            f"Penalty {penalty} is at or below the calibration bound "
            f"{calibration_bound(n, max_hop):.6g}; invalid configurations "
            "may reach the ground state"
        )

    n_sites = spec.n_sites
    bqm = dimod.BinaryQuadraticModel("BINARY")
    bqm.add_variables_from((v, 0.0) for v in range(n_sites * n))

    def var(flat: int, step: int) -> int:
        return (step - 1) * n_sites + flat

    for step in range(1, n):
        bqm.add_quadratic_from(
            (var(a, step), var(b, step + 1), t)
            for (a, b), t in couplings.items()
        )

    for step in range(1, n + 1):
        bqm.add_linear_equality_constraint(
            [(var(a, step), 1.0) for a in range(n_sites)],
            lagrange_multiplier=penalty,
            constant=-1.0,
        )

    s_flat, t_flat = spec.flat_index(start), spec.flat_index(tracer)
    bqm.add_linear_equality_constraint(
        [(var(s_flat, 1), 1.0)], lagrange_multiplier=penalty, constant=-1.0
    )
    if n > 2:
        bqm.add_linear_equality_constraint(
            [(var(t_flat, step), 1.0) for step in range(2, n)],
            lagrange_multiplier=penalty,
            constant=0.0,
        )
    bqm.add_linear_equality_constraint(
        [(var(t_flat, n), 1.0)], lagrange_multiplier=penalty, constant=-1.0
    )

    return IsingProblem(
        spec=spec,
        model=model,
        start=start,
        tracer=tracer,
        n_steps=n,
        bqm=bqm,
        penalty=float(penalty),
        hop_coeffs=couplings,
    )


def as_bits(
    problem: IsingProblem, config: Mapping[int, int] | Sequence[int] | np.ndarray
) -> np.ndarray:
    r"""Dense 0/1 vector of a configuration.

    Parameters
    ----------
    problem : IsingProblem
        The encoding.
    config : Mapping[int, int] or sequence of int
        Bits by variable id.

    Returns
    -------
    np.ndarray
        Array of length ``num_variables``.

    Raises
    ------
    DomainError
        If a variable is missing or a value is not 0 or 1.
    """
    nv = problem.num_variables
    if isinstance(config, Mapping):
        missing = [v for v in range(nv) if v not in config]
        if missing:
            raise DomainError(
                f"Configuration misses {len(missing)} variables, "
                f"first {missing[0]}"
            )
        bits = np.array([config[v] for v in range(nv)])
    else:
        bits = np.asarray(config)
        if bits.shape != (nv,):
            raise DomainError(
                f"Configuration has {bits.size} bits, expected {nv}"
            )
    if not np.isin(bits, (0, 1)).all():
        raise DomainError("Configuration bits must be 0 or 1")
    return bits.astype(np.int8)


def energy(
    problem: IsingProblem, config: Mapping[int, int] | Sequence[int]
) -> float:
    r"""Energy of a configuration.

    Parameters
    ----------
    problem : IsingProblem
        The encoding.
    config : Mapping[int, int] or sequence of int
        Bits by variable id.

    Returns
    -------
    float
        Binary quadratic energy, offset included.

    Raises
    ------
    DomainError
        If the configuration is incomplete.
    """
    bits = as_bits(problem, config)
    return float(
        problem.bqm.energies((bits[None, :], range(problem.num_variables)))[0]
    )


@dataclass(frozen=True)
class DecodedTrajectory:
    r"""Readout of a configuration.

    Parameters
    ----------
    valid : bool
        Whether the configuration is a valid trajectory.
    sites : tuple[SiteRef, ...]
        One site per step when valid, empty otherwise.
    violation : str, optional
        First violated rule when invalid.
    """

    valid: bool
    sites: tuple[SiteRef, ...] = ()
    violation: str | None = None


def decode_positions(
    problem: IsingProblem, positions: Sequence[int]
) -> DecodedTrajectory:
    r"""Decode a one-site-per-step configuration given as flat site indices.

    Parameters
    ----------
    problem : IsingProblem
        The encoding.
    positions : Sequence[int]
        Flat site index occupied at each step.

    Returns
    -------
    DecodedTrajectory
        The readout.
    """
    spec = problem.spec
    s_flat = spec.flat_index(problem.start)
    t_flat = spec.flat_index(problem.tracer)
    if positions[0] != s_flat or positions[-1] != t_flat:
        return DecodedTrajectory(False, violation="bad-endpoint")
    if any(p == t_flat for p in positions[1:-1]):
        return DecodedTrajectory(False, violation="early-coalescence")
    adjacency = problem.adjacency
    if not all(
        adjacency[a, b] for a, b in zip(positions[:-1], positions[1:])
    ):
        return DecodedTrajectory(False, violation="non-adjacent-hop")
    return DecodedTrajectory(
        True, sites=tuple(spec.site_at(p) for p in positions)
    )


def decode(
    problem: IsingProblem, config: Mapping[int, int] | Sequence[int]
) -> DecodedTrajectory:
    r"""Read a trajectory out of a configuration and validate it.

    A configuration is valid when exactly one site is occupied per step,
    step 1 holds S, step N holds T, T is empty in between, and consecutive
    sites are neighbors.

    Parameters
    ----------
    problem : IsingProblem
        The encoding.
    config : Mapping[int, int] or sequence of int
        Bits by variable id.

    Returns
    -------
    DecodedTrajectory
        The readout; invalid configurations name the violated rule.
    """
    bits = as_bits(problem, config).reshape(problem.n_steps, problem.n_sites)
    occupancy = bits.sum(axis=1)
    if (occupancy > 1).any():
        return DecodedTrajectory(False, violation="multi-occupancy")
    if (occupancy == 0).any():
        return DecodedTrajectory(False, violation="empty-step")
    return decode_positions(problem, bits.argmax(axis=1).tolist())


def encode(problem: IsingProblem, sites: Sequence[SiteRef]) -> np.ndarray:
    r"""Configuration of a site sequence.

    Parameters
    ----------
    problem : IsingProblem
        The encoding.
    sites : Sequence[SiteRef]
        One site per step.

    Returns
    -------
    np.ndarray
        0/1 vector of length ``num_variables``.

    Raises
    ------
    DomainError
        If the sequence length differs from N.
    """
    if len(sites) != problem.n_steps:
        raise DomainError(
            f"Expected {problem.n_steps} sites, got {len(sites)}"
        )
    bits = np.zeros(problem.num_variables, dtype=np.int8)
    for step, site in enumerate(sites, start=1):
        bits[problem.var_index(site, step)] = 1
    return bits


def path_weight(problem: IsingProblem, sites: Sequence[SiteRef]) -> float:
    r"""Probability weight of a trajectory, ``exp`` of its hop energy.

    Parameters
    ----------
    problem : IsingProblem
        The encoding.
    sites : Sequence[SiteRef]
        A valid trajectory.

    Returns
    -------
    float
        Product of hop probabilities.
    """
    flat = [problem.spec.flat_index(s) for s in sites]
    return float(
        np.exp(sum(problem.hop_coeffs[(a, b)] for a, b in zip(flat[:-1], flat[1:])))
    )


BRUTE_FORCE_LIMIT = 24


def brute_force_ground(
    problem: IsingProblem, atol: float = 1e-9
) -> tuple[float, list[np.ndarray]]:
    r"""Exact ground energy and every ground configuration.

    Parameters
    ----------
    problem : IsingProblem
        The encoding, at most 24 variables.
    atol : float, optional
        Energy tolerance when collecting degenerate ground states.

    Returns
    -------
    tuple[float, list[np.ndarray]]
        Minimum energy and the 0/1 vectors reaching it.

    Raises
    ------
    EngineInfeasibleError
        If the problem has more than 24 variables.
    """
    if problem.num_variables > BRUTE_FORCE_LIMIT:
        raise EngineInfeasibleError(
            f"Exhaustive search over {problem.num_variables} variables means "
            f"2^{problem.num_variables} configurations, above the limit of "
            f"2^{BRUTE_FORCE_LIMIT}"
        )
    sampleset = dimod.ExactSolver().sample(problem.bqm)
    lowest = sampleset.lowest(rtol=0.0, atol=atol)
    configs = [
        as_bits(problem, {int(v): int(b) for v, b in sample.items()})
        for sample in lowest.samples()
    ]
    return float(lowest.first.energy), configs
