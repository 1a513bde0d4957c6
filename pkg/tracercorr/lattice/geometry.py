"""Neighbor relations, hop probabilities and geometric projections."""

from __future__ import annotations

from typing import NamedTuple

import networkx as nx
import numpy as np
from scipy.special import softmax

from tracercorr.errors import DomainError, LatticeBoundsError
from tracercorr.lattice.base import HopModel, LatticeSpec, SiteRef


class Neighbor(NamedTuple):
    r"""A neighbor of a site: the site, unit direction and label."""

    site: SiteRef
    direction: np.ndarray
    label: str


def _check_inside(spec: LatticeSpec, site: SiteRef) -> None:
    if not spec.contains(site):
        raise LatticeBoundsError(
            f"Site {site} lies outside the extent {spec.extent} "
            f"of lattice {spec.name!r}"
        )


def neighbors(spec: LatticeSpec, site: SiteRef) -> list[Neighbor]:
    r"""List the neighbors of a site in stencil order.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    site : SiteRef
        A site inside the extent.

    Returns
    -------
    list[Neighbor]
        One entry per stencil entry of the site's sublattice, with unit
        Cartesian direction vectors.

    Raises
    ------
    LatticeBoundsError
        If the site lies outside the extent.
    """
    _check_inside(spec, site)
    origin = spec.cartesian(site)
    result = []
    for entry in spec.stencil[site.sublattice]:
        other = site.shifted(entry.offset, entry.target)
        step = spec.cartesian(other) - origin
        result.append(
            Neighbor(other, step / np.linalg.norm(step), entry.label)
        )
    return result


def hop_distribution(
    spec: LatticeSpec, model: HopModel, sublattice: int
) -> np.ndarray:
    r"""Next-hop probabilities of a sublattice, in stencil order.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    model : HopModel
        Barriers and temperature.
    sublattice : int
        Origin sublattice.

    Returns
    -------
    np.ndarray
        Probabilities ``exp(-dE/T)`` normalized over the stencil.
    """
    entries = spec.stencil[sublattice]
    if model.uniform:
        return np.full(len(entries), 1.0 / len(entries))
    energies = np.array([model.barrier(entry.label) for entry in entries])
    return softmax(-energies / model.temperature)


def hop_table(spec: LatticeSpec, model: HopModel) -> np.ndarray:
    r"""Hop probabilities of every sublattice, padded with zeros.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    model : HopModel
        Barriers and temperature.

    Returns
    -------
    np.ndarray
        Array of shape ``(n_sublattices, max_coordination)``.
    """
    table = np.zeros((spec.n_sublattices, spec.max_coordination))
    for s in range(spec.n_sublattices):
        probs = hop_distribution(spec, model, s)
        table[s, : len(probs)] = probs
    return table


def hop_probabilities(
    spec: LatticeSpec, model: HopModel, site: SiteRef
) -> dict[str, float]:
    r"""Next-hop distribution of a vacancy at ``site``.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    model : HopModel
        Barriers and temperature.
    site : SiteRef
        Origin site.

    Returns
    -------
    dict[str, float]
        Probability per neighbor label; sums to 1.

    Raises
    ------
    ConfigurationError
        If a direction has no barrier and there is no wildcard.
    """
    probs = hop_distribution(spec, model, site.sublattice)
    return {
        entry.label: float(p)
        for entry, p in zip(spec.stencil[site.sublattice], probs, strict=True)
    }


def cos_theta(
    spec: LatticeSpec,
    tracer: SiteRef,
    vacancy_neighbor: SiteRef,
    flow: np.ndarray,
) -> float:
    r"""Projection of the tracer-to-vacancy direction onto the flow axis.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    tracer : SiteRef
        Tracer site.
    vacancy_neighbor : SiteRef
        The neighbor of the tracer holding the vacancy.
    flow : np.ndarray
        Unit flow vector.

    Returns
    -------
    float
        Cosine in [-1, 1].

    Raises
    ------
    DomainError
        If the sites are not neighbors or ``flow`` is not a unit vector.
    """
    flow = np.asarray(flow, dtype=float)
    if abs(np.linalg.norm(flow) - 1.0) > 1e-9:
        raise DomainError(f"Invalid flow vector {flow}: not unit length")
    for neighbor in neighbors(spec, tracer):
        if neighbor.site == vacancy_neighbor:
            return float(np.clip(flow @ neighbor.direction, -1.0, 1.0))
    raise DomainError(
        f"Site {vacancy_neighbor} is not a neighbor of the tracer {tracer}"
    )


def neighbor_table(spec: LatticeSpec) -> np.ndarray:
    r"""Flat neighbor indices of every site inside the extent.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.

    Returns
    -------
    np.ndarray
        Integer array of shape ``(n_sites, max_coordination)``; -1 marks a
        neighbor outside the extent or a padded entry.
    """
    extent = np.asarray(spec.extent)
    cells = np.indices(spec.extent).reshape(spec.dimension, -1).T
    table = np.full((spec.n_sites, spec.max_coordination), -1, dtype=np.int64)
    for s, entries in enumerate(spec.stencil):
        rows = slice(s * spec.n_cells, (s + 1) * spec.n_cells)
        for e, entry in enumerate(entries):
            target = cells + np.asarray(entry.offset)
            inside = np.all((target >= 0) & (target < extent), axis=1)
            flat = np.full(len(cells), -1, dtype=np.int64)
            flat[inside] = entry.target * spec.n_cells + np.ravel_multi_index(
                target[inside].T, spec.extent
            )
            table[rows, e] = flat
    return table


def lattice_graph(spec: LatticeSpec) -> nx.Graph:
    r"""Neighbor graph of the sites inside the extent.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.

    Returns
    -------
    nx.Graph
        Graph over flat site indices.
    """
    table = neighbor_table(spec)
    graph = nx.Graph()
    graph.add_nodes_from(range(spec.n_sites))
    rows, cols = np.nonzero(table >= 0)
    graph.add_edges_from(zip(rows.tolist(), table[rows, cols].tolist()))
    return graph


def hop_distances(
    spec: LatticeSpec, tracer: SiteRef | None = None
) -> np.ndarray:
    r"""Hop distance from every site to the tracer inside the extent.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    tracer : SiteRef, optional
        Tracer site (default: the lattice's tracer).

    Returns
    -------
    np.ndarray
        Distances per flat index; sites that cannot reach the tracer get
        ``n_sites``.
    """
    lengths = nx.single_source_shortest_path_length(
        lattice_graph(spec), spec.flat_index(spec.tracer if tracer is None else tracer)
    )
    dist = np.full(spec.n_sites, spec.n_sites, dtype=np.int64)
    dist[list(lengths)] = list(lengths.values())
    return dist


def distance_bound(
    spec: LatticeSpec, tracer: SiteRef | None = None
) -> np.ndarray:
    r"""Lower bound on the hop distance to the tracer for every site.

    The bound is the Chebyshev cell distance divided by the lattice reach,
    and at least one for every site other than the tracer.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    tracer : SiteRef, optional
        Tracer site (default: the lattice's tracer).

    Returns
    -------
    np.ndarray
        Integer array of shape ``spec.shape``.
    """
    tracer = spec.tracer if tracer is None else tracer
    grids = np.indices(spec.extent)
    center = np.asarray(tracer.cell).reshape((-1,) + (1,) * spec.dimension)
    cheb = np.abs(grids - center).max(axis=0)
    bound = -(-cheb // spec.reach)
    bounds = np.repeat(bound[None], spec.n_sublattices, axis=0)
    bounds[(slice(None), *tracer.cell)] = 1
    bounds[(tracer.sublattice, *tracer.cell)] = 0
    return bounds


def is_bipartite(spec: LatticeSpec) -> bool:
    r"""Check whether the lattice graph is two-colorable.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice; a small auto-sized copy is inspected.

    Returns
    -------
    bool
        True if every closed walk has even length.
    """
    return nx.is_bipartite(lattice_graph(spec.sized_for(4)))
