"""Run manifests written beside every artifact."""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from omegaconf import DictConfig, OmegaConf

from tracercorr.utils.io_utils import dump_json, ensure_serializable


# keys that only place or label a run; identical reruns must hash equal
RUN_LOCAL_KEYS = ("hydra", "paths", "extras", "tags", "qubo_prefix")


def config_hash(cfg: DictConfig | dict) -> str:
    r"""SHA-256 of the resolved configuration, keys sorted.

    Output locations, tags and display options (``RUN_LOCAL_KEYS``) are
    left out, so reruns of the same computation share a hash.

    Parameters
    ----------
    cfg : DictConfig or dict
        Configuration.

    Returns
    -------
    str
        Hex digest.
    """
    data = {}
    for key in cfg:
        if key in RUN_LOCAL_KEYS:
            continue
        value = cfg[key]
        if OmegaConf.is_config(value):
            value = OmegaConf.to_container(value, resolve=True)
        data[str(key)] = value
    text = json.dumps(ensure_serializable(data), sort_keys=True)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class RunManifest:
    r"""Provenance of one command run.

    Parameters
    ----------
    command : str
        Command name.
    lattice : str
        Lattice name or JSON path.
    engine : str, optional
        Engine name, when the command runs one.
    n_max : int, optional
        Truncation horizon.
    seed : int, optional
        Random stream key.
    model : dict, optional
        Hop model parameters.
    version : str, optional
        Package version.
    timestamp : str, optional
        UTC time of the run, ISO 8601.
    config_hash : str, optional
        Digest of the resolved configuration.
    """

    command: str
    lattice: str
    engine: str | None = None
    n_max: int | None = None
    seed: int | None = None
    model: dict[str, Any] = field(default_factory=dict)
    version: str = ""
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )
    config_hash: str | None = None

    @classmethod
    def from_config(cls, cfg: DictConfig, **overrides) -> "RunManifest":
        r"""Build a manifest from a composed run configuration.

        Parameters
        ----------
        cfg : DictConfig
            Configuration composed by Hydra.
        **overrides : dict
            Fields that replace the ones read from ``cfg``.

        Returns
        -------
        RunManifest
            The manifest.
        """
        from tracercorr import __version__

        lattice = cfg.get("lattice", {}) or {}
        loader = lattice.get("loader", {}) or {}
        parameters = loader.get("parameters", {}) or {}
        engine = cfg.get("engine", {}) or {}
        hop_model = cfg.get("hop_model", {}) or {}
        data = {
            "command": str(cfg.get("command")),
            "lattice": str(parameters.get("path") or parameters.get("name")),
            "engine": engine.get("_target_"),
            "n_max": cfg.get("n_max"),
            "seed": cfg.get("seed"),
            "model": OmegaConf.to_container(hop_model, resolve=True)
            if isinstance(hop_model, DictConfig)
            else dict(hop_model),
            "version": __version__,
            "config_hash": config_hash(cfg),
        }
        data.update(overrides)
        return cls(**data)

    def to_dict(self) -> dict:
        r"""JSON-ready form.

        Returns
        -------
        dict
            Every field.
        """
        return ensure_serializable(asdict(self))

    def write_beside(self, artifact: str | Path) -> Path:
        r"""Write ``<artifact>.manifest.json``.

        Parameters
        ----------
        artifact : str or Path
            Path of the artifact the manifest describes.

        Returns
        -------
        Path
            Path of the manifest file.
        """
        artifact = Path(artifact)
        return dump_json(
            self.to_dict(),
            artifact.with_name(artifact.name + ".manifest.json"),
        )
