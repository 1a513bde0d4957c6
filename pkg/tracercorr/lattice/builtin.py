"""Built-in lattice families."""

import math

import numpy as np

from tracercorr.errors import ConfigurationError, DomainError
from tracercorr.lattice.base import LatticeSpec, StencilEntry, auto_side

SQRT3 = math.sqrt(3.0)

# Known large-N limits of f for uniform hopping. bcc carries two values.
REFERENCE_F = {
    "honeycomb": (1.0 / 3.0,),
    "square": (0.467,),
    "triangular": (0.56006,),
    "diamond": (0.5,),
    "sc": (0.6531,),
    "bcc": (0.7272, 0.72149),
    "fcc": (0.7815,),
}

_FCC_BASIS = ((0.0, 0.5, 0.5), (0.5, 0.0, 0.5), (0.5, 0.5, 0.0))

# name -> basis, sublattice offsets, per-sublattice (offset, target) lists,
# start entry of sublattice 0.
_FAMILIES = {
    "square": (
        ((1.0, 0.0), (0.0, 1.0)),
        ((0.0, 0.0),),
        [[((-1, 0), 0), ((1, 0), 0), ((0, -1), 0), ((0, 1), 0)]],
        2,
    ),
    "triangular": (
        ((1.0, 0.0), (0.5, SQRT3 / 2)),
        ((0.0, 0.0),),
        [
            [
                ((-1, 0), 0),
                ((1, 0), 0),
                ((0, -1), 0),
                ((0, 1), 0),
                ((1, -1), 0),
                ((-1, 1), 0),
            ]
        ],
        0,
    ),
    "honeycomb": (
        ((1.5, SQRT3 / 2), (1.5, -SQRT3 / 2)),
        ((0.0, 0.0), (1.0 / 3.0, 1.0 / 3.0)),
        [
            [((0, 0), 1), ((0, -1), 1), ((-1, 0), 1)],
            [((0, 0), 0), ((0, 1), 0), ((1, 0), 0)],
        ],
        0,
    ),
    "sc": (
        ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
        ((0.0, 0.0, 0.0),),
        [
            [
                ((-1, 0, 0), 0),
                ((1, 0, 0), 0),
                ((0, -1, 0), 0),
                ((0, 1, 0), 0),
                ((0, 0, -1), 0),
                ((0, 0, 1), 0),
            ]
        ],
        0,
    ),
    "bcc": (
        ((-0.5, 0.5, 0.5), (0.5, -0.5, 0.5), (0.5, 0.5, -0.5)),
        ((0.0, 0.0, 0.0),),
        [
            [
                ((1, 1, 1), 0),
                ((-1, -1, -1), 0),
                ((1, 0, 0), 0),
                ((-1, 0, 0), 0),
                ((0, 1, 0), 0),
                ((0, -1, 0), 0),
                ((0, 0, 1), 0),
                ((0, 0, -1), 0),
            ]
        ],
        1,
    ),
    "fcc": (
        _FCC_BASIS,
        ((0.0, 0.0, 0.0),),
        [
            [
                ((1, 0, 0), 0),
                ((-1, 0, 0), 0),
                ((0, 1, 0), 0),
                ((0, -1, 0), 0),
                ((0, 0, 1), 0),
                ((0, 0, -1), 0),
                ((1, -1, 0), 0),
                ((-1, 1, 0), 0),
                ((0, 1, -1), 0),
                ((0, -1, 1), 0),
                ((1, 0, -1), 0),
                ((-1, 0, 1), 0),
            ]
        ],
        1,
    ),
    "diamond": (
        _FCC_BASIS,
        ((0.0, 0.0, 0.0), (0.25, 0.25, 0.25)),
        [
            [
                ((0, 0, 0), 1),
                ((-1, 0, 0), 1),
                ((0, -1, 0), 1),
                ((0, 0, -1), 1),
            ],
            [
                ((0, 0, 0), 0),
                ((1, 0, 0), 0),
                ((0, 1, 0), 0),
                ((0, 0, 1), 0),
            ],
        ],
        0,
    ),
}

BUILTIN_LATTICES = tuple(REFERENCE_F)


def direction_label(vector: np.ndarray) -> str:
    r"""Name a direction by the signs of its Cartesian components.

    Parameters
    ----------
    vector : np.ndarray
        Direction vector.

    Returns
    -------
    str
        Label such as ``"+x"`` or ``"-x+y"``.
    """
    parts = [
        ("+" if x > 0 else "-") + axis
        for x, axis in zip(vector, "xyz")
        if abs(x) > 1e-9
    ]
    return "".join(parts)


def build_builtin(name: str, n_max: int) -> LatticeSpec:
    r"""Build a built-in lattice auto-sized for trajectories up to ``n_max``.

    Parameters
    ----------
    name : str
        One of honeycomb, square, triangular, diamond, sc, bcc, fcc.
    n_max : int
        Maximum trajectory length N (at least 2).

    Returns
    -------
    LatticeSpec
        The lattice spec, with an odd side of ``n_max + 3`` cells or more.

    Raises
    ------
    ConfigurationError
        If the family is unknown.
    DomainError
        If ``n_max < 2``.
    """
    if name not in _FAMILIES:
        raise ConfigurationError(f"Invalid lattice {name}")
    if n_max < 2:
        raise DomainError(f"Invalid n_max {n_max}")

    basis, offsets, raw_stencil, start_entry = _FAMILIES[name]
    basis_arr = np.asarray(basis)
    offsets_arr = np.asarray(offsets)
    stencil = []
    for s, entries in enumerate(raw_stencil):
        row = []
        for offset, target in entries:
            vector = (
                np.asarray(offset) + offsets_arr[target] - offsets_arr[s]
            ) @ basis_arr
            row.append(StencilEntry(offset, target, direction_label(vector)))
        stencil.append(tuple(row))

    dimension = len(basis)
    return LatticeSpec(
        name=name,
        dimension=dimension,
        basis_vectors=basis,
        sublattice_offsets=offsets,
        stencil=tuple(stencil),
        extent=(auto_side(n_max),) * dimension,
        boundary="auto-sized",
        tracer_sublattice=0,
        start_entry=start_entry,
    )
