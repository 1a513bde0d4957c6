"""Configuration file for pytest."""
import math

import pytest

from tracercorr.lattice import (
    HopModel,
    LatticeSpec,
    StencilEntry,
    build_builtin,
)


def _ring(name, size, positions):
    """Build a single-cell ring of ``size`` sites.

    Parameters
    ----------
    name : str
        Lattice name.
    size : int
        Number of sites on the ring.
    positions : list[tuple[float, float]]
        Fractional position of every site in a 2x2 cell.

    Returns
    -------
    LatticeSpec
        Ring with the tracer on site 0 and the vacancy starting on site 1.
    """
    stencil = [
        (
            StencilEntry((0, 0), (s + 1) % size, "cw"),
            StencilEntry((0, 0), (s - 1) % size, "ccw"),
        )
        for s in range(size)
    ]
    return LatticeSpec(
        name=name,
        dimension=2,
        basis_vectors=((2.0, 0.0), (0.0, 2.0)),
        sublattice_offsets=positions,
        stencil=stencil,
        extent=(1, 1),
        boundary="open",
        tracer_sublattice=0,
        start_entry=0,
    )


@pytest.fixture
def mocker_fixture(mocker):
    """Return pytest mocker, used when one want to use mocker in setup_method.

    Parameters
    ----------
    mocker : pytest_mock.plugin.MockerFixture
        A pytest mocker.

    Returns
    -------
    pytest_mock.plugin.MockerFixture
        A pytest mocker.
    """
    return mocker


@pytest.fixture
def uniform_model():
    """Uniform hopping.

    Returns
    -------
    HopModel
        Hop model without barriers.
    """
    return HopModel()


@pytest.fixture
def square_spec():
    """Square lattice sized for trajectories up to N=8.

    Returns
    -------
    LatticeSpec
        The auto-sized square lattice.
    """
    return build_builtin("square", 8)


@pytest.fixture
def square_3x3():
    """Open 3x3 square patch around the tracer.

    Returns
    -------
    LatticeSpec
        Square lattice with 9 sites.
    """
    return build_builtin("square", 2).with_extent((3, 3))


@pytest.fixture
def four_cycle():
    """Four sites on a square ring, tracer on site 0 and S on site 1.

    Returns
    -------
    LatticeSpec
        Bipartite ring lattice.
    """
    return _ring(
        "four_cycle",
        4,
        [(0.0, 0.0), (0.5, 0.0), (0.5, 0.5), (0.0, 0.5)],
    )


@pytest.fixture
def triangle():
    """Three mutually adjacent sites, tracer on site 0 and S on site 1.

    Returns
    -------
    LatticeSpec
        Smallest lattice with a closed walk of odd length.
    """
    return _ring(
        "triangle",
        3,
        [(0.0, 0.0), (0.5, 0.0), (0.25, math.sqrt(3.0) / 4.0)],
    )
