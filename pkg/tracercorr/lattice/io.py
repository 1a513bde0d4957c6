"""JSON form of lattice specs and hop models."""

import json
from pathlib import Path
from typing import Any

from tracercorr.errors import ConfigurationError
from tracercorr.lattice.base import HopModel, LatticeSpec, StencilEntry
from tracercorr.utils.io_utils import dump_json


def spec_to_dict(spec: LatticeSpec, model: HopModel | None = None) -> dict:
    r"""Convert a lattice spec (and optional hop model) to a plain dict.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    model : HopModel, optional
        Barriers and temperature to embed.

    Returns
    -------
    dict
        JSON-ready mapping.
    """
    data: dict[str, Any] = {
        "name": spec.name,
        "dimension": spec.dimension,
        "basis_vectors": [list(v) for v in spec.basis_vectors],
        "sublattice_offsets": [list(v) for v in spec.sublattice_offsets],
        "stencil": [
            [
                {
                    "offset": list(entry.offset),
                    "target": entry.target,
                    "label": entry.label,
                }
                for entry in entries
            ]
            for entries in spec.stencil
        ],
        "extent": list(spec.extent),
        "boundary": spec.boundary,
        "tracer_sublattice": spec.tracer_sublattice,
        "start_entry": spec.start_entry,
    }
    if model is not None:
        data["barriers"] = dict(model.barriers)
        data["temperature"] = model.temperature
    return data


def spec_from_dict(
    data: dict, n_max: int | None = None
) -> tuple[LatticeSpec, HopModel | None]:
    r"""Build a lattice spec (and hop model, if present) from a dict.

    Parameters
    ----------
    data : dict
        Mapping in the :func:`spec_to_dict` layout.
    n_max : int, optional
        If given and the boundary is auto-sized, re-size the extent.

    Returns
    -------
    tuple[LatticeSpec, HopModel or None]
        The lattice and the embedded hop model.

    Raises
    ------
    ConfigurationError
        If a required field is missing or malformed.
    """
    try:
        stencil = tuple(
            tuple(
                StencilEntry(
                    tuple(entry["offset"]),
                    int(entry["target"]),
                    str(entry["label"]),
                )
                for entry in entries
            )
            for entries in data["stencil"]
        )
        dimension = int(data["dimension"])
        boundary = data.get("boundary", "auto-sized")
        extent = data.get("extent") or [1] * dimension
        spec = LatticeSpec(
            name=str(data["name"]),
            dimension=dimension,
            basis_vectors=data["basis_vectors"],
            sublattice_offsets=data.get(
                "sublattice_offsets", [[0.0] * dimension]
            ),
            stencil=stencil,
            extent=tuple(extent),
            boundary=boundary,
            tracer_sublattice=int(data.get("tracer_sublattice", 0)),
            start_entry=int(data.get("start_entry", 0)),
        )
    except (KeyError, TypeError, ValueError) as ex:
        raise ConfigurationError(f"Invalid lattice definition: {ex}") from ex

    if n_max is not None and spec.boundary == "auto-sized":
        spec = spec.sized_for(n_max)

    model = None
    if "barriers" in data or "temperature" in data:
        model = HopModel(
            barriers=data.get("barriers") or {},
            temperature=data.get("temperature", 1.0),
        )
    return spec, model


def dump_lattice(
    spec: LatticeSpec, path: str | Path, model: HopModel | None = None
) -> Path:
    r"""Write a lattice spec to a JSON file.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice.
    path : str or Path
        Destination file.
    model : HopModel, optional
        Barriers and temperature to embed.

    Returns
    -------
    Path
        The written file.
    """
    return dump_json(spec_to_dict(spec, model), path)


def load_lattice(
    path: str | Path, n_max: int | None = None
) -> tuple[LatticeSpec, HopModel | None]:
    r"""Read a lattice spec from a JSON file.

    Parameters
    ----------
    path : str or Path
        Source file.
    n_max : int, optional
        Re-size auto-sized lattices for this trajectory length.

    Returns
    -------
    tuple[LatticeSpec, HopModel or None]
        The lattice and the embedded hop model.

    Raises
    ------
    ConfigurationError
        If the file is missing or not valid JSON.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as ex:
        raise ConfigurationError(f"Invalid lattice path {path}") from ex
    except json.JSONDecodeError as ex:
        raise ConfigurationError(f"Invalid lattice file {path}: {ex}") from ex
    return spec_from_dict(data, n_max=n_max)


def load_barriers(path: str | Path) -> dict[str, float]:
    r"""Read a barrier mapping ``{label: energy}`` from a JSON file.

    Parameters
    ----------
    path : str or Path
        Source file; either the mapping itself or an object with a
        ``"barriers"`` key.

    Returns
    -------
    dict[str, float]
        Barrier per direction label.

    Raises
    ------
    ConfigurationError
        If the file is missing or malformed.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as ex:
        raise ConfigurationError(f"Invalid barriers path {path}") from ex
    except json.JSONDecodeError as ex:
        raise ConfigurationError(f"Invalid barriers file {path}: {ex}") from ex
    if isinstance(data, dict) and "barriers" in data:
        data = data["barriers"]
    if not isinstance(data, dict):
        raise ConfigurationError(f"Invalid barriers file {path}")
    return {str(k): float(v) for k, v in data.items()}
