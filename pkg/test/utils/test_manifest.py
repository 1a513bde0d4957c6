"""Unit tests for run manifests and file helpers."""

import json
import math
from unittest.mock import patch

import numpy as np
import pytest
from omegaconf import DictConfig

from tracercorr import __version__
from tracercorr.utils import (
    RunManifest,
    atomic_write_text,
    config_hash,
    dump_json,
    ensure_serializable,
    log_manifest,
)


class TestManifest:
    """Test run manifests."""

    def setup_method(self):
        """Setup the test."""
        self.cfg = DictConfig(
            {
                "command": "compute",
                "n_max": 8,
                "seed": 42,
                "lattice": {"loader": {"parameters": {"name": "square"}}},
                "engine": {"_target_": "tracercorr.engines.mu.MatrixUpdateEngine"},
                "hop_model": {"temperature": 1.0, "barriers": {}},
            }
        )

    def test_config_hash(self):
        """The hash ignores key order and tracks values."""
        same = DictConfig(dict(reversed(list(self.cfg.items()))))
        assert config_hash(self.cfg) == config_hash(same)
        changed = self.cfg.copy()
        changed.n_max = 10
        assert config_hash(changed) != config_hash(self.cfg)
        assert len(config_hash(self.cfg)) == 64

    def test_config_hash_ignores_run_location(self):
        """Reruns into other output directories share a hash."""
        hashes = set()
        for stamp in ("2026-01-01_10-00-00", "2026-01-02_11-30-00"):
            cfg = self.cfg.copy()
            cfg.paths = {
                "output_dir": f"/runs/{stamp}",
                "work_dir": f"/home/{stamp}",
            }
            cfg.qubo_prefix = "${paths.output_dir}/problem"
            cfg.tags = [stamp]
            cfg.extras = {"print_config": stamp.endswith("00")}
            hashes.add(config_hash(cfg))
        assert len(hashes) == 1
        assert hashes == {config_hash(self.cfg)}

    def test_from_config(self):
        """Fields are read from the config and overrides win."""
        manifest = RunManifest.from_config(self.cfg, engine="mu")
        assert manifest.command == "compute"
        assert manifest.lattice == "square"
        assert manifest.engine == "mu"
        assert manifest.n_max == 8
        assert manifest.seed == 42
        assert manifest.model == {"temperature": 1.0, "barriers": {}}
        assert manifest.version == __version__
        assert manifest.config_hash == config_hash(self.cfg)

    def test_write_beside(self, tmp_path):
        """The manifest lands next to its artifact.

        Parameters
        ----------
        tmp_path : Path
            Temporary directory.
        """
        manifest = RunManifest(command="table", lattice="square", n_max=4)
        path = manifest.write_beside(tmp_path / "table.csv")
        assert path.name == "table.csv.manifest.json"
        data = json.loads(path.read_text())
        assert data["command"] == "table"
        assert data["engine"] is None

    def test_log_manifest(self):
        """Test log_manifest."""
        manifest = RunManifest(command="qubo", lattice="square")
        with patch("tracercorr.utils.logging_utils.log.info") as mock_info:
            log_manifest(manifest)
        message = mock_info.call_args[0][0]
        assert message.startswith("Run manifest: ")
        assert "command=qubo" in message


class TestIOUtils:
    """Test file helpers."""

    def test_atomic_write(self, tmp_path):
        """Files are written whole and parents are created.

        Parameters
        ----------
        tmp_path : Path
            Temporary directory.
        """
        path = atomic_write_text(tmp_path / "a" / "b.txt", "content\n")
        assert path.read_text() == "content\n"
        assert [p.name for p in path.parent.iterdir()] == ["b.txt"]

    def test_failed_write(self, tmp_path):
        """A failed write leaves no temporary file.

        Parameters
        ----------
        tmp_path : Path
            Temporary directory.
        """
        with (
            patch("tracercorr.utils.io_utils.os.replace", side_effect=OSError),
            pytest.raises(OSError),
        ):
            atomic_write_text(tmp_path / "c.txt", "content")
        assert list(tmp_path.iterdir()) == []

    def test_ensure_serializable(self):
        """Numpy values, tuples, sets and NaN become JSON types."""
        data = {
            1: np.int64(3),
            "x": np.array([0.5, np.nan]),
            "t": (1, 2),
            "s": {4},
            "nan": math.nan,
        }
        assert ensure_serializable(data) == {
            "1": 3,
            "x": [0.5, None],
            "t": [1, 2],
            "s": [4],
            "nan": None,
        }

    def test_dump_json(self, tmp_path):
        """Floats keep full precision.

        Parameters
        ----------
        tmp_path : Path
            Temporary directory.
        """
        path = dump_json({"f": 45 / 83}, tmp_path / "f.json")
        assert json.loads(path.read_text())["f"] == 45 / 83
