"""Lattice topology types: sites, stencils, lattice specs and hop models."""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from tracercorr.errors import ConfigurationError

BOUNDARY_POLICIES = ("open", "auto-sized")


@dataclass(frozen=True, order=True)
class SiteRef:
    r"""A lattice site: integer cell coordinates plus a sublattice index.

    Parameters
    ----------
    cell : tuple[int, ...]
        Cell coordinates in units of the basis vectors.
    sublattice : int, optional
        0-based sublattice index (default: 0).
    """

    cell: tuple[int, ...]
    sublattice: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "cell", tuple(int(c) for c in self.cell))
        object.__setattr__(self, "sublattice", int(self.sublattice))

    def shifted(self, offset: Sequence[int], sublattice: int) -> SiteRef:
        r"""Return the site reached by a cell offset into a sublattice.

        Parameters
        ----------
        offset : Sequence[int]
            Cell offset.
        sublattice : int
            Target sublattice.

        Returns
        -------
        SiteRef
            The shifted site.
        """
        cell = tuple(c + o for c, o in zip(self.cell, offset, strict=True))
        return SiteRef(cell, sublattice)

    @property
    def label(self) -> str:
        r"""Compact text label, e.g. ``(2,1)`` or ``(0,0)/1``.

        Returns
        -------
        str
            The label.
        """
        text = "(" + ",".join(str(c) for c in self.cell) + ")"
        return text if self.sublattice == 0 else f"{text}/{self.sublattice}"

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class StencilEntry:
    r"""One neighbor relation of a sublattice.

    Parameters
    ----------
    offset : tuple[int, ...]
        Cell offset from the origin site to the neighbor.
    target : int
        Sublattice of the neighbor.
    label : str
        Direction label, used to look up hop barriers.
    """

    offset: tuple[int, ...]
    target: int
    label: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "offset", tuple(int(o) for o in self.offset))
        object.__setattr__(self, "target", int(self.target))


@dataclass(frozen=True)
class LatticeSpec:
    r"""Lattice topology.

    Cartesian positions are ``(cell + sublattice_offset) @ basis_vectors``,
    with sublattice offsets in fractional coordinates. The tracer sits on
    ``tracer_sublattice`` in the center cell of the extent; the vacancy
    starts at the tracer neighbor given by ``stencil[tracer_sublattice]
    [start_entry]``.

    Parameters
    ----------
    name : str
        Lattice name.
    dimension : int
        Spatial dimension (2 or 3).
    basis_vectors : tuple[tuple[float, ...], ...]
        One basis vector per row.
    sublattice_offsets : tuple[tuple[float, ...], ...]
        Fractional position of every sublattice inside the cell.
    stencil : tuple[tuple[StencilEntry, ...], ...]
        Neighbor entries, one tuple per sublattice.
    extent : tuple[int, ...]
        Number of cells per axis.
    boundary : str, optional
        Boundary policy, ``"auto-sized"`` or ``"open"``.
    tracer_sublattice : int, optional
        Sublattice of the tracer site.
    start_entry : int, optional
        Stencil entry of the tracer sublattice locating the vacancy start.
    """

    name: str
    dimension: int
    basis_vectors: tuple[tuple[float, ...], ...]
    sublattice_offsets: tuple[tuple[float, ...], ...]
    stencil: tuple[tuple[StencilEntry, ...], ...]
    extent: tuple[int, ...]
    boundary: str = "auto-sized"
    tracer_sublattice: int = 0
    start_entry: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "basis_vectors",
            tuple(tuple(float(x) for x in v) for v in self.basis_vectors),
        )
        object.__setattr__(
            self,
            "sublattice_offsets",
            tuple(tuple(float(x) for x in v) for v in self.sublattice_offsets),
        )
        object.__setattr__(
            self, "stencil", tuple(tuple(entries) for entries in self.stencil)
        )
        object.__setattr__(self, "extent", tuple(int(n) for n in self.extent))
        self._validate()

    def _validate(self) -> None:
        d = self.dimension
        if d not in (2, 3):
            raise ConfigurationError(f"Invalid dimension {d}")
        if len(self.basis_vectors) != d or any(
            len(v) != d for v in self.basis_vectors
        ):
            raise ConfigurationError(
                f"Lattice {self.name!r} needs {d} basis vectors of length {d}"
            )
        if abs(np.linalg.det(np.asarray(self.basis_vectors))) < 1e-12:
            raise ConfigurationError(
                f"Lattice {self.name!r} has degenerate basis vectors"
            )
        if not self.sublattice_offsets or any(
            len(v) != d for v in self.sublattice_offsets
        ):
            raise ConfigurationError(
                f"Lattice {self.name!r} has invalid sublattice offsets"
            )
        if len(self.stencil) != self.n_sublattices:
            raise ConfigurationError(
                f"Lattice {self.name!r} needs one stencil per sublattice"
            )
        if len(self.extent) != d or min(self.extent) < 1:
            raise ConfigurationError(f"Invalid extent {self.extent}")
        if self.boundary not in BOUNDARY_POLICIES:
            raise ConfigurationError(f"Invalid boundary {self.boundary}")
        for s, entries in enumerate(self.stencil):
            if len(entries) < 2:
                raise ConfigurationError(
                    f"Sublattice {s} of {self.name!r} has coordination "
                    f"{len(entries)} < 2"
                )
            labels = [entry.label for entry in entries]
            if len(set(labels)) != len(labels):
                raise ConfigurationError(
                    f"Sublattice {s} of {self.name!r} has duplicate labels"
                )
            for entry in entries:
                if len(entry.offset) != d:
                    raise ConfigurationError(
                        f"Invalid stencil offset {entry.offset}"
                    )
                if not 0 <= entry.target < self.n_sublattices:
                    raise ConfigurationError(
                        f"Invalid stencil target {entry.target}"
                    )
                if not self._has_reverse(s, entry):
                    raise ConfigurationError(
                        f"Stencil of {self.name!r} is not symmetric: "
                        f"{s} -> {entry.target} via {entry.label} "
                        "has no reverse entry"
                    )
        if not 0 <= self.tracer_sublattice < self.n_sublattices:
            raise ConfigurationError(
                f"Invalid tracer sublattice {self.tracer_sublattice}"
            )
        if not 0 <= self.start_entry < len(
            self.stencil[self.tracer_sublattice]
        ):
            raise ConfigurationError(
                f"Invalid start entry {self.start_entry}"
            )

    def _has_reverse(self, source: int, entry: StencilEntry) -> bool:
        back = tuple(-o for o in entry.offset)
        return any(
            other.offset == back and other.target == source
            for other in self.stencil[entry.target]
        )

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(name={self.name!r}, "
            f"dimension={self.dimension}, sublattices={self.n_sublattices}, "
            f"coordination={self.coordination}, extent={self.extent})"
        )

    @property
    def n_sublattices(self) -> int:
        r"""Number of sublattices.

        Returns
        -------
        int
            Number of sublattices.
        """
        return len(self.sublattice_offsets)

    @property
    def coordination(self) -> tuple[int, ...]:
        r"""Coordination number Z of every sublattice.

        Returns
        -------
        tuple[int, ...]
            Stencil length per sublattice.
        """
        return tuple(len(entries) for entries in self.stencil)

    @property
    def max_coordination(self) -> int:
        r"""Largest coordination number over sublattices.

        Returns
        -------
        int
            Maximum stencil length.
        """
        return max(self.coordination)

    @cached_property
    def reach(self) -> int:
        r"""Largest per-axis cell displacement of a single hop.

        Returns
        -------
        int
            At least 1.
        """
        return max(
            1,
            max(
                abs(o)
                for entries in self.stencil
                for entry in entries
                for o in entry.offset
            ),
        )

    @cached_property
    def basis(self) -> np.ndarray:
        r"""Basis vectors as a ``(d, d)`` array, one vector per row.

        Returns
        -------
        np.ndarray
            The basis matrix.
        """
        return np.asarray(self.basis_vectors, dtype=float)

    @property
    def center(self) -> tuple[int, ...]:
        r"""Center cell of the extent.

        Returns
        -------
        tuple[int, ...]
            Cell coordinates of the tracer.
        """
        return tuple(n // 2 for n in self.extent)

    @property
    def tracer(self) -> SiteRef:
        r"""Tracer site T.

        Returns
        -------
        SiteRef
            The tracer site at the center cell.
        """
        return SiteRef(self.center, self.tracer_sublattice)

    @property
    def start(self) -> SiteRef:
        r"""Vacancy start site S, the tracer's previous position.

        Returns
        -------
        SiteRef
            The start site.
        """
        entry = self.stencil[self.tracer_sublattice][self.start_entry]
        return self.tracer.shifted(entry.offset, entry.target)

    @property
    def flow(self) -> np.ndarray:
        r"""Unit flow vector pointing from S toward T.

        Returns
        -------
        np.ndarray
            Unit vector.
        """
        step = self.cartesian(self.tracer) - self.cartesian(self.start)
        return step / np.linalg.norm(step)

    @property
    def n_cells(self) -> int:
        r"""Number of cells inside the extent.

        Returns
        -------
        int
            Product of the extent.
        """
        return math.prod(self.extent)

    @property
    def n_sites(self) -> int:
        r"""Number of sites inside the extent.

        Returns
        -------
        int
            Cells times sublattices.
        """
        return self.n_cells * self.n_sublattices

    @property
    def shape(self) -> tuple[int, ...]:
        r"""Shape of dense per-site arrays, ``(n_sublattices, *extent)``.

        Returns
        -------
        tuple[int, ...]
            Array shape.
        """
        return (self.n_sublattices, *self.extent)

    def cartesian(self, site: SiteRef) -> np.ndarray:
        r"""Cartesian position of a site.

        Parameters
        ----------
        site : SiteRef
            The site.

        Returns
        -------
        np.ndarray
            Position vector.
        """
        frac = np.asarray(site.cell, dtype=float) + np.asarray(
            self.sublattice_offsets[site.sublattice]
        )
        return frac @ self.basis

    def contains(self, site: SiteRef) -> bool:
        r"""Check whether a site lies inside the extent.

        Parameters
        ----------
        site : SiteRef
            The site.

        Returns
        -------
        bool
            True if the site is inside.
        """
        return (
            len(site.cell) == self.dimension
            and 0 <= site.sublattice < self.n_sublattices
            and all(0 <= c < n for c, n in zip(site.cell, self.extent))
        )

    def flat_index(self, site: SiteRef) -> int:
        r"""Row-major index of a site in a ``shape``-shaped array.

        Parameters
        ----------
        site : SiteRef
            A site inside the extent.

        Returns
        -------
        int
            Flat index.
        """
        return int(np.ravel_multi_index((site.sublattice, *site.cell), self.shape))

    def site_at(self, index: int) -> SiteRef:
        r"""Inverse of :meth:`flat_index`.

        Parameters
        ----------
        index : int
            Flat index.

        Returns
        -------
        SiteRef
            The site.
        """
        sub, *cell = np.unravel_index(int(index), self.shape)
        return SiteRef(tuple(int(c) for c in cell), int(sub))

    def tracer_neighbor_label(self, site: SiteRef) -> str:
        r"""Label of the tracer stencil entry leading to ``site``.

        Parameters
        ----------
        site : SiteRef
            A neighbor of the tracer.

        Returns
        -------
        str
            Direction label.
        """
        for entry in self.stencil[self.tracer_sublattice]:
            if self.tracer.shifted(entry.offset, entry.target) == site:
                return entry.label
        return site.label

    def with_extent(self, extent: Sequence[int]) -> LatticeSpec:
        r"""Copy of the lattice with another extent.

        Parameters
        ----------
        extent : Sequence[int]
            Cells per axis.

        Returns
        -------
        LatticeSpec
            The resized spec.
        """
        return dataclasses.replace(self, extent=tuple(extent))

    def sized_for(self, n_max: int) -> LatticeSpec:
        r"""Copy of the lattice auto-sized for trajectories up to ``n_max``.

        Parameters
        ----------
        n_max : int
            Maximum trajectory length N.

        Returns
        -------
        LatticeSpec
            The resized spec.
        """
        side = auto_side(n_max, self.reach)
        return dataclasses.replace(
            self, extent=(side,) * self.dimension, boundary="auto-sized"
        )


def auto_side(n_max: int, reach: int = 1) -> int:
    r"""Side length of an auto-sized extent.

    Returning trajectories of at most ``n_max - 1`` hops stay within
    ``reach * n_max / 2`` cells of the tracer, so a side of
    ``reach * n_max + 3`` keeps them off the boundary. The side is odd so
    the tracer sits exactly in the middle.

    Parameters
    ----------
    n_max : int
        Maximum trajectory length N.
    reach : int, optional
        Largest per-axis cell displacement of a hop (default: 1).

    Returns
    -------
    int
        Odd side length.
    """
    side = reach * n_max + 3
    return side if side % 2 else side + 1


@dataclass(frozen=True)
class HopModel:
    r"""Hop barriers and temperature.

    Parameters
    ----------
    barriers : Mapping[str, float], optional
        Barrier energy per direction label; ``"*"`` is a wildcard.
    temperature : float, optional
        Temperature in the barrier energy units (default: 1.0).
    uniform : bool, optional
        Equal hop probabilities regardless of barriers. Defaults to True
        exactly when no barriers are given.
    """

    barriers: Mapping[str, float] = field(default_factory=dict)
    temperature: float = 1.0
    uniform: bool | None = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "barriers",
            {str(k): float(v) for k, v in dict(self.barriers).items()},
        )
        object.__setattr__(self, "temperature", float(self.temperature))
        if self.uniform is None:
            object.__setattr__(self, "uniform", not self.barriers)
        if not self.temperature > 0:
            raise ConfigurationError(
                f"Invalid temperature {self.temperature}"
            )

    def barrier(self, label: str) -> float:
        r"""Barrier energy of a direction.

        Parameters
        ----------
        label : str
            Direction label.

        Returns
        -------
        float
            Barrier energy.

        Raises
        ------
        ConfigurationError
            If neither the label nor the wildcard has a barrier.
        """
        if label in self.barriers:
            return self.barriers[label]
        if "*" in self.barriers:
            return self.barriers["*"]
        raise ConfigurationError(f"Missing barrier for direction {label}")

    def to_dict(self) -> dict:
        r"""Plain-dict form for manifests and JSON files.

        Returns
        -------
        dict
            Barriers, temperature and the uniform flag.
        """
        return {
            "barriers": dict(self.barriers),
            "temperature": self.temperature,
            "uniform": self.uniform,
        }
