"""QUBO text files, JSON sidecars and sample files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import dimod
import numpy as np

from tracercorr.errors import ConfigurationError, SampleFormatError
from tracercorr.ising.problem import IsingProblem, build
from tracercorr.lattice.base import HopModel, LatticeSpec, SiteRef
from tracercorr.lattice.io import spec_from_dict, spec_to_dict
from tracercorr.utils.io_utils import atomic_write_text, dump_json


def site_to_dict(site: SiteRef) -> dict:
    r"""JSON form of a site.

    Parameters
    ----------
    site : SiteRef
        The site.

    Returns
    -------
    dict
        Cell and sublattice.
    """
    return {"cell": list(site.cell), "sublattice": site.sublattice}


def site_from_dict(data: dict) -> SiteRef:
    r"""Inverse of :func:`site_to_dict`.

    Parameters
    ----------
    data : dict
        Cell and sublattice.

    Returns
    -------
    SiteRef
        The site.
    """
    return SiteRef(tuple(data["cell"]), int(data.get("sublattice", 0)))


def qubo_text(problem: IsingProblem) -> str:
    r"""Coefficient file content.

    The header ``p qubo 0 <variables> <linear> <quadratic>`` is followed by
    ``i i value`` lines for linear terms and ``i j value`` lines (i < j)
    for quadratic terms, values at 17 significant digits. The constant
    offset is kept in the sidecar.

    Parameters
    ----------
    problem : IsingProblem
        The encoding.

    Returns
    -------
    str
        File content.
    """
    linear = sorted(
        (v, b) for v, b in problem.linear.items() if b != 0.0
    )
    quadratic = sorted(problem.quadratic.items())
    lines = [
        f"p qubo 0 {problem.num_variables} {len(linear)} {len(quadratic)}"
    ]
    lines += [f"{v} {v} {b:.17g}" for v, b in linear]
    lines += [f"{u} {v} {b:.17g}" for (u, v), b in quadratic]
    return "\n".join(lines) + "\n"


def sidecar_dict(problem: IsingProblem, manifest: dict | None = None) -> dict:
    r"""Sidecar content: variable map, penalty, offset and lattice.

    Parameters
    ----------
    problem : IsingProblem
        The encoding.
    manifest : dict, optional
        Run manifest to embed.

    Returns
    -------
    dict
        JSON-ready mapping.
    """
    variables = []
    for var in range(problem.num_variables):
        site, step = problem.variable(var)
        variables.append([site.label, step])
    data = {
        "lattice": problem.spec.name,
        "n_steps": problem.n_steps,
        "num_variables": problem.num_variables,
        "penalty": problem.penalty,
        "offset": problem.constant_offset,
        "start": site_to_dict(problem.start),
        "tracer": site_to_dict(problem.tracer),
        "spec": spec_to_dict(problem.spec),
        "model": problem.model.to_dict(),
        "variables": variables,
    }
    if manifest is not None:
        data["manifest"] = manifest
    return data


def export_qubo(
    problem: IsingProblem,
    path: str | Path,
    manifest: dict | None = None,
) -> tuple[Path, Path]:
    r"""Write the coefficient file and its JSON sidecar.

    Parameters
    ----------
    problem : IsingProblem
        The encoding.
    path : str or Path
        Coefficient file; the sidecar gets the ``.json`` suffix.
    manifest : dict, optional
        Run manifest to embed in the sidecar.

    Returns
    -------
    tuple[Path, Path]
        Paths of the coefficient file and the sidecar.
    """
    path = Path(path)
    qubo = atomic_write_text(path, qubo_text(problem))
    sidecar = dump_json(
        sidecar_dict(problem, manifest), path.with_suffix(".json")
    )
    return qubo, sidecar


def read_qubo(path: str | Path, offset: float = 0.0) -> dimod.BinaryQuadraticModel:
    r"""Parse a coefficient file back into a binary quadratic model.

    Parameters
    ----------
    path : str or Path
        Coefficient file.
    offset : float, optional
        Constant offset, usually taken from the sidecar.

    Returns
    -------
    dimod.BinaryQuadraticModel
        Model over variables ``0..num_variables-1``.

    Raises
    ------
    ConfigurationError
        If the header is missing or a line is malformed.
    """
    bqm = dimod.BinaryQuadraticModel("BINARY")
    bqm.offset = offset
    header = None
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("c"):
                continue
            tokens = line.split()
            if tokens[0] == "p":
                if len(tokens) != 6 or tokens[1] != "qubo":
                    raise ConfigurationError(
                        f"Invalid QUBO header on line {number}: {line}"
                    )
                header = [int(t) for t in tokens[3:]]
                bqm.add_variables_from((v, 0.0) for v in range(header[0]))
                continue
            if header is None or len(tokens) != 3:
                raise ConfigurationError(
                    f"Invalid QUBO line {number}: {line}"
                )
            try:
                u, v, value = int(tokens[0]), int(tokens[1]), float(tokens[2])
            except ValueError as ex:
                raise ConfigurationError(
                    f"Invalid QUBO line {number}: {line}"
                ) from ex
            if u == v:
                bqm.add_linear(u, value)
            else:
                bqm.add_quadratic(u, v, value)
    if header is None:
        raise ConfigurationError(f"Missing QUBO header in {path}")
    if bqm.num_variables != header[0]:
        raise ConfigurationError(
            f"QUBO file {path} declares {header[0]} variables but uses "
            f"{bqm.num_variables}"
        )
    return bqm


@dataclass
class QuboSidecar:
    r"""Contents of a sidecar file.

    Parameters
    ----------
    lattice : str
        Lattice name.
    n_steps : int
        Trajectory length N.
    penalty : float
        Constraint weight.
    offset : float
        Constant offset of the encoding.
    spec : LatticeSpec
        The lattice the problem was built on.
    model : HopModel
        Barriers and temperature.
    start : SiteRef
        Vacancy start site S.
    tracer : SiteRef
        Tracer site T.
    variables : list[tuple[str, int]]
        Site label and step of every variable.
    manifest : dict, optional
        Embedded run manifest.
    """

    lattice: str
    n_steps: int
    penalty: float
    offset: float
    spec: LatticeSpec
    model: HopModel
    start: SiteRef
    tracer: SiteRef
    variables: list[tuple[str, int]]
    manifest: dict[str, Any] = field(default_factory=dict)

    @property
    def num_variables(self) -> int:
        r"""Number of binary variables.

        Returns
        -------
        int
            Length of the variable map.
        """
        return len(self.variables)

    def problem(self) -> IsingProblem:
        r"""Rebuild the encoding the sidecar describes.

        Returns
        -------
        IsingProblem
            Encoding with the stored penalty.
        """
        return build(
            self.spec,
            self.model,
            self.start,
            self.tracer,
            self.n_steps,
            penalty=self.penalty,
        )


def read_sidecar(path: str | Path) -> QuboSidecar:
    r"""Load a sidecar file.

    Parameters
    ----------
    path : str or Path
        Sidecar JSON file.

    Returns
    -------
    QuboSidecar
        Parsed content.

    Raises
    ------
    ConfigurationError
        If the file is not a valid sidecar.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        spec, _ = spec_from_dict(data["spec"])
        model_data = data.get("model", {})
        model = HopModel(
            barriers=model_data.get("barriers") or {},
            temperature=model_data.get("temperature", 1.0),
            uniform=model_data.get("uniform"),
        )
        return QuboSidecar(
            lattice=str(data["lattice"]),
            n_steps=int(data["n_steps"]),
            penalty=float(data["penalty"]),
            offset=float(data["offset"]),
            spec=spec,
            model=model,
            start=site_from_dict(data["start"]),
            tracer=site_from_dict(data["tracer"]),
            variables=[(str(label), int(step)) for label, step in data["variables"]],
            manifest=data.get("manifest", {}),
        )
    except (KeyError, TypeError, ValueError) as ex:
        raise ConfigurationError(f"Invalid sidecar {path}: {ex}") from ex


def read_samples(path: str | Path, num_variables: int) -> list[np.ndarray]:
    r"""Read one 0/1 string per line.

    Blank lines and lines starting with ``#`` are skipped.

    Parameters
    ----------
    path : str or Path
        Sample file.
    num_variables : int
        Expected string length.

    Returns
    -------
    list[np.ndarray]
        Bit vectors in file order.

    Raises
    ------
    SampleFormatError
        If a line has the wrong length or characters other than 0 and 1.
    """
    samples = []
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if len(line) != num_variables:
                raise SampleFormatError(
                    f"expected {num_variables} bits, got {len(line)}", number
                )
            if set(line) - {"0", "1"}:
                raise SampleFormatError("bits must be 0 or 1", number)
            samples.append(np.frombuffer(line.encode(), dtype=np.uint8) - 48)
    return samples
