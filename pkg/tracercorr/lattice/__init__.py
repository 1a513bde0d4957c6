"""Lattice topologies, neighbor relations and hop probabilities."""

from tracercorr.lattice.base import (
    HopModel,
    LatticeSpec,
    SiteRef,
    StencilEntry,
    auto_side,
)
from tracercorr.lattice.builtin import (
    BUILTIN_LATTICES,
    REFERENCE_F,
    build_builtin,
)
from tracercorr.lattice.geometry import (
    Neighbor,
    cos_theta,
    distance_bound,
    hop_distances,
    hop_probabilities,
    hop_table,
    is_bipartite,
    lattice_graph,
    neighbor_table,
    neighbors,
)
from tracercorr.lattice.io import (
    dump_lattice,
    load_barriers,
    load_lattice,
    spec_from_dict,
    spec_to_dict,
)
from tracercorr.lattice.loaders import (
    AbstractLatticeLoader,
    BuiltinLatticeLoader,
    JSONLatticeLoader,
)

__all__ = [
    "BUILTIN_LATTICES",
    "REFERENCE_F",
    "AbstractLatticeLoader",
    "BuiltinLatticeLoader",
    "HopModel",
    "JSONLatticeLoader",
    "LatticeSpec",
    "Neighbor",
    "SiteRef",
    "StencilEntry",
    "auto_side",
    "build_builtin",
    "cos_theta",
    "distance_bound",
    "dump_lattice",
    "hop_distances",
    "hop_probabilities",
    "hop_table",
    "is_bipartite",
    "lattice_graph",
    "load_barriers",
    "load_lattice",
    "neighbor_table",
    "neighbors",
    "spec_from_dict",
    "spec_to_dict",
]
