"""Unit tests for coefficient, sidecar and sample files."""

import numpy as np
import pytest

from tracercorr.errors import ConfigurationError, SampleFormatError
from tracercorr.ising import (
    build,
    decode,
    encode,
    energy,
    export_qubo,
    read_qubo,
    read_samples,
    read_sidecar,
)


class TestQuboFiles:
    """Test export and parsing of coefficient files."""

    def test_export(self, square_3x3, uniform_model, tmp_path):
        """Exported coefficients reproduce the energies of the encoding.

        Parameters
        ----------
        square_3x3 : LatticeSpec
            Open 3x3 square patch.
        uniform_model : HopModel
            Hop model without barriers.
        tmp_path : Path
            Temporary directory.
        """
        spec = square_3x3
        problem = build(spec, uniform_model, spec.start, spec.tracer, 2)
        qubo, sidecar = export_qubo(problem, tmp_path / "square.qubo", {"seed": 1})
        assert sidecar == tmp_path / "square.json"
        header = qubo.read_text().splitlines()[0].split()
        assert header[:4] == ["p", "qubo", "0", "18"]

        side = read_sidecar(sidecar)
        bqm = read_qubo(qubo, offset=side.offset)
        rng = np.random.default_rng(0)
        configs = [encode(problem, (spec.start, spec.tracer))]
        configs += list(rng.integers(0, 2, size=(5, 18)))
        for bits in configs:
            parsed = bqm.energy(dict(enumerate(int(b) for b in bits)))
            assert parsed == pytest.approx(energy(problem, bits), abs=1e-9)

    def test_sidecar(self, square_3x3, uniform_model, tmp_path):
        """The sidecar rebuilds an equivalent encoding.

        Parameters
        ----------
        square_3x3 : LatticeSpec
            Open 3x3 square patch.
        uniform_model : HopModel
            Hop model without barriers.
        tmp_path : Path
            Temporary directory.
        """
        spec = square_3x3
        problem = build(spec, uniform_model, spec.start, spec.tracer, 2, penalty=9.0)
        _, path = export_qubo(problem, tmp_path / "p.qubo", {"seed": 1})
        side = read_sidecar(path)
        assert side.n_steps == 2
        assert side.num_variables == 18
        assert side.penalty == 9.0
        assert side.manifest == {"seed": 1}
        assert side.variables[0][1] == 1
        rebuilt = side.problem()
        bits = encode(rebuilt, (spec.start, spec.tracer))
        assert decode(rebuilt, bits).sites == (spec.start, spec.tracer)
        assert energy(rebuilt, bits) == pytest.approx(energy(problem, bits))

    @pytest.mark.parametrize(
        ("content", "match"),
        [
            ("p qubo 0 2\n0 0 1.0\n", "header"),
            ("0 0 1.0\n", "line 1"),
            ("p qubo 0 2 1 0\n0 0 one\n", "line 2"),
            ("c comment only\n", "Missing QUBO header"),
            ("p qubo 0 2 1 1\n0 0 1.0\n0 2 1.0\n", "declares 2 variables"),
        ],
    )
    def test_malformed(self, tmp_path, content, match):
        """Malformed coefficient files are rejected.

        Parameters
        ----------
        tmp_path : Path
            Temporary directory.
        content : str
            File content.
        match : str
            Expected message fragment.
        """
        path = tmp_path / "bad.qubo"
        path.write_text(content)
        with pytest.raises(ConfigurationError, match=match):
            read_qubo(path)

    def test_invalid_sidecar(self, tmp_path):
        """Sidecars with missing fields are rejected.

        Parameters
        ----------
        tmp_path : Path
            Temporary directory.
        """
        path = tmp_path / "bad.json"
        path.write_text('{"lattice": "square"}')
        with pytest.raises(ConfigurationError, match="Invalid sidecar"):
            read_sidecar(path)


class TestSamples:
    """Test sample files."""

    def test_read(self, tmp_path):
        """Comments and blank lines are skipped.

        Parameters
        ----------
        tmp_path : Path
            Temporary directory.
        """
        path = tmp_path / "samples.txt"
        path.write_text("# solver output\n0110\n\n1000\n")
        samples = read_samples(path, 4)
        assert [s.tolist() for s in samples] == [[0, 1, 1, 0], [1, 0, 0, 0]]

    @pytest.mark.parametrize(
        ("content", "line", "match"),
        [
            ("0110\n011\n", 2, "expected 4 bits, got 3"),
            ("# header\n01a0\n", 2, "0 or 1"),
        ],
    )
    def test_malformed(self, tmp_path, content, line, match):
        """Errors carry the offending line number.

        Parameters
        ----------
        tmp_path : Path
            Temporary directory.
        content : str
            File content.
        line : int
            Expected line number.
        match : str
            Expected message fragment.
        """
        path = tmp_path / "samples.txt"
        path.write_text(content)
        with pytest.raises(SampleFormatError, match=match) as info:
            read_samples(path, 4)
        assert info.value.line == line
        assert str(info.value).startswith(f"line {line}:")
