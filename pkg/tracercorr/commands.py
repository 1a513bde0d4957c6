"""Commands dispatched by the ``command`` config key."""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from omegaconf import DictConfig, OmegaConf

from tracercorr.engines.oracle import enumerate_trajectories
from tracercorr.engines.result import TrajectoryRecord, aggregate_trajectories
from tracercorr.errors import (
    ConfigurationError,
    DomainError,
    EngineInfeasibleError,
)
from tracercorr.evaluator import (
    COLUMNS,
    TrajectoryEvaluator,
    convergence_table,
    dropout_sensitivity,
    estimate,
    trajectory_coverage,
)
from tracercorr.ising import (
    build,
    decode,
    export_qubo,
    path_weight,
    read_samples,
    read_sidecar,
)
from tracercorr.lattice import (
    BUILTIN_LATTICES,
    REFERENCE_F,
    HopModel,
    LatticeSpec,
    build_builtin,
    cos_theta,
    dump_lattice,
    is_bipartite,
    load_barriers,
)
from tracercorr.utils import (
    RankedLogger,
    RunManifest,
    atomic_write_text,
    dump_json,
    instantiate_engine,
    instantiate_loader,
    log_manifest,
    print_table,
)
from tracercorr.utils.config_resolvers import nmax_range

log = RankedLogger(__name__, rank_zero_only=True)


@dataclass
class Setup:
    r"""Lattice and hop model of a run.

    Parameters
    ----------
    spec : LatticeSpec
        The lattice, sized for the run's horizon.
    model : HopModel
        Barriers and temperature.
    source : str
        Lattice name or path.
    """

    spec: LatticeSpec
    model: HopModel
    source: str


def hop_model_from_config(
    cfg: DictConfig, embedded: HopModel | None = None
) -> HopModel:
    r"""Hop model from ``cfg.hop_model``, falling back to the lattice's own.

    Barriers come from ``hop_model.barriers_path`` or the
    ``hop_model.barriers`` mapping; without either, a hop model embedded in
    the lattice file is used, and otherwise hopping is uniform.

    Parameters
    ----------
    cfg : DictConfig
        Run configuration.
    embedded : HopModel, optional
        Hop model read from the lattice file.

    Returns
    -------
    HopModel
        The hop model.
    """
    section = cfg.get("hop_model") or {}
    temperature = section.get("temperature", 1.0)
    if section.get("barriers_path"):
        barriers = load_barriers(section.barriers_path)
        return HopModel(barriers=barriers, temperature=temperature)
    barriers = section.get("barriers")
    if barriers:
        barriers = OmegaConf.to_container(barriers, resolve=True)
        return HopModel(barriers=barriers, temperature=temperature)
    if embedded is not None:
        return embedded
    return HopModel(temperature=temperature)


def load_setup(cfg: DictConfig, n_max: int) -> Setup:
    r"""Instantiate the lattice loader and build the hop model.

    Parameters
    ----------
    cfg : DictConfig
        Run configuration.
    n_max : int
        Horizon the lattice is sized for.

    Returns
    -------
    Setup
        Lattice, hop model and source.
    """
    loader = instantiate_loader(cfg.lattice.loader)
    spec, embedded = loader.load(n_max)
    model = hop_model_from_config(cfg, embedded)
    log.info(f"Loaded {spec!r} with {model}")
    return Setup(spec=spec, model=model, source=loader.source)


def horizons(cfg: DictConfig) -> list[int]:
    r"""Truncation horizons of a table run.

    Parameters
    ----------
    cfg : DictConfig
        Run configuration; ``n_list`` wins over ``n_upto``, which wins over
        ``n_max``.

    Returns
    -------
    list[int]
        Sorted distinct horizons.

    Raises
    ------
    DomainError
        If a horizon is below 2.
    """
    if cfg.get("n_list"):
        values = [int(n) for n in cfg.n_list]
    elif cfg.get("n_upto"):
        values = nmax_range(cfg.n_upto)
    else:
        values = [int(cfg.n_max)]
    if not values or min(values) < 2:
        raise DomainError(f"Invalid n_max list {values}")
    return sorted(set(values))


def output_path(cfg: DictConfig, suffix: str) -> Path:
    r"""Destination of the command's main artifact.

    Parameters
    ----------
    cfg : DictConfig
        Run configuration.
    suffix : str
        File suffix used when no path is configured.

    Returns
    -------
    Path
        ``output.path`` or ``<output_dir>/<command>.<suffix>``.
    """
    section = cfg.get("output") or {}
    if section.get("path"):
        return Path(section.path)
    return Path(cfg.paths.output_dir) / f"{cfg.command}.{suffix}"


def output_format(cfg: DictConfig) -> str:
    r"""Validated output format.

    Parameters
    ----------
    cfg : DictConfig
        Run configuration.

    Returns
    -------
    str
        ``json`` or ``csv``.

    Raises
    ------
    ConfigurationError
        If the format is unknown.
    """
    fmt = (cfg.get("output") or {}).get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigurationError(f"Invalid output format {fmt}")
    return fmt


def write_frame(
    frame: pd.DataFrame,
    cfg: DictConfig,
    manifest: RunManifest,
    extra: dict | None = None,
) -> Path:
    r"""Write a result table as CSV or JSON with its manifest.

    CSV keeps full precision with '.' decimals and empty cells for missing
    values; JSON embeds the manifest.

    Parameters
    ----------
    frame : pd.DataFrame
        Result rows.
    cfg : DictConfig
        Run configuration.
    manifest : RunManifest
        Provenance of the run.
    extra : dict, optional
        Additional JSON fields.

    Returns
    -------
    Path
        The written artifact.
    """
    fmt = output_format(cfg)
    path = output_path(cfg, fmt)
    if fmt == "csv":
        atomic_write_text(path, frame.to_csv(index=False, float_format="%.17g"))
    else:
        rows = frame.astype(object).where(frame.notna(), None)
        data = {"rows": rows.to_dict(orient="records"), **(extra or {})}
        data["manifest"] = manifest.to_dict()
        dump_json(data, path)
    manifest.write_beside(path)
    log.info(f"Wrote {path}")
    return path


def _trajectory_table(engine, setup: Setup, n_max: int):
    trajectories = getattr(engine, "trajectories", None)
    if trajectories is None:
        return None
    spec = setup.spec
    return trajectories(spec, setup.model, spec.start, spec.tracer, n_max)


def cmd_compute(cfg: DictConfig) -> tuple[dict[str, Any], dict[str, Any]]:
    r"""Correlation factor of one lattice, engine and horizon.

    Parameters
    ----------
    cfg : DictConfig
        Run configuration.

    Returns
    -------
    tuple[dict[str, Any], dict[str, Any]]
        The report and the objects created by the run.
    """
    n_max = int(cfg.n_max)
    setup = load_setup(cfg, n_max)
    spec = setup.spec
    engine = instantiate_engine(cfg.engine)
    manifest = RunManifest.from_config(
        cfg, lattice=setup.source, engine=engine.name, model=setup.model.to_dict()
    )
    log_manifest(manifest)

    rate = float((cfg.get("dropout") or {}).get("rate", 0.0))
    records = _trajectory_table(engine, setup, n_max) if rate > 0 else None
    if records is not None:
        result = aggregate_trajectories(records, n_max, engine=engine.name)
    else:
        if rate > 0:
            log.warning(
                f"Dropout needs an explicit trajectory table; engine "
                f"{engine.name} has none, skipping"
            )
        result = engine.arrivals(spec, setup.model, spec.start, spec.tracer, n_max)

    est = estimate(result, spec)
    report = {
        "lattice": spec.name,
        "reference_f": list(REFERENCE_F.get(spec.name, ())),
        **est.to_dict(),
    }
    if records is not None:
        dropout = dropout_sensitivity(
            records, rate, seed=int(cfg.seed), trials=int(cfg.dropout.trials)
        )
        report["dropout"] = asdict(dropout)
        log.info(
            f"Dropout at rate {rate}: mean relative bias "
            f"{dropout.mean_bias:.3e} +/- {dropout.spread:.3e}"
        )

    frame = pd.DataFrame(
        [
            {
                "n_max": n_max,
                "engine": engine.name,
                "f": est.f,
                "captured_mass": est.captured_mass,
                "stderr": est.stderr_f,
                "note": None,
            }
        ],
        columns=COLUMNS,
    )
    print_table(frame, title=f"{spec.name} correlation factor")
    log.info(f"f = {est.f:.6f} (avg cos {est.avg_cos:.6f}) at N_max={n_max}")
    path = write_frame(
        frame,
        cfg,
        manifest,
        extra={"estimate": report, "arrivals": result.to_dict(spec)},
    )
    return report, {"setup": setup, "engine": engine, "result": result, "path": path}


def cmd_table(cfg: DictConfig) -> tuple[dict[str, Any], dict[str, Any]]:
    r"""Convergence table of the correlation factor over horizons.

    Parameters
    ----------
    cfg : DictConfig
        Run configuration.

    Returns
    -------
    tuple[dict[str, Any], dict[str, Any]]
        The report and the objects created by the run.
    """
    values = horizons(cfg)
    setup = load_setup(cfg, values[-1])
    spec = setup.spec
    engine = instantiate_engine(cfg.engine)
    manifest = RunManifest.from_config(
        cfg,
        lattice=setup.source,
        engine=engine.name,
        n_max=values[-1],
        model=setup.model.to_dict(),
    )
    log_manifest(manifest)
    frame = convergence_table(
        spec, setup.model, spec.start, spec.tracer, spec.flow, engine, values
    )
    print_table(frame, title=f"{spec.name} convergence ({engine.name})")
    path = write_frame(frame, cfg, manifest)
    report = {"lattice": spec.name, "rows": frame.to_dict(orient="records")}
    return report, {"setup": setup, "engine": engine, "table": frame, "path": path}


def cmd_qubo(cfg: DictConfig) -> tuple[dict[str, Any], dict[str, Any]]:
    r"""Export one trajectory encoding per length ``2..n_max``.

    Files are named ``<prefix>_N<n>.qubo`` with a ``.json`` sidecar.

    Parameters
    ----------
    cfg : DictConfig
        Run configuration.

    Returns
    -------
    tuple[dict[str, Any], dict[str, Any]]
        The report and the objects created by the run.
    """
    n_max = int(cfg.n_max)
    setup = load_setup(cfg, n_max)
    prefix = (cfg.get("output") or {}).get("path") or cfg.qubo_prefix
    manifest = RunManifest.from_config(
        cfg, lattice=setup.source, engine=None, model=setup.model.to_dict()
    )
    log_manifest(manifest)
    penalty = cfg.get("penalty")
    rows, problems = [], []
    for n in range(2, n_max + 1):
        spec = (
            setup.spec.sized_for(n)
            if setup.spec.boundary == "auto-sized"
            else setup.spec
        )
        problem = build(
            spec,
            setup.model,
            spec.start,
            spec.tracer,
            n,
            penalty=None if penalty is None else float(penalty),
        )
        qubo, sidecar = export_qubo(
            problem, f"{prefix}_N{n}.qubo", manifest=manifest.to_dict()
        )
        manifest.write_beside(qubo)
        log.info(f"Wrote {problem!r} to {qubo}")
        problems.append(problem)
        rows.append(
            {
                "n": n,
                "variables": problem.num_variables,
                "penalty": problem.penalty,
                "calibration_bound": problem.calibration_bound,
                "qubo": str(qubo),
                "sidecar": str(sidecar),
            }
        )
    print_table(pd.DataFrame(rows), title="exported problems")
    return {"problems": rows}, {"setup": setup, "problems": problems}


def cmd_decode(cfg: DictConfig) -> tuple[dict[str, Any], dict[str, Any]]:
    r"""Decode external samples and estimate the correlation factor.

    Valid trajectories are deduplicated and weighted by their path
    probability. When the enumeration oracle is feasible the report also
    gives the fraction of trajectories the samples recovered.

    Parameters
    ----------
    cfg : DictConfig
        Run configuration with ``sidecar`` and ``samples`` paths.

    Returns
    -------
    tuple[dict[str, Any], dict[str, Any]]
        The report and the objects created by the run.

    Raises
    ------
    ConfigurationError
        If either path is missing.
    """
    if not cfg.get("sidecar") or not cfg.get("samples"):
        raise ConfigurationError(
            "Invalid decode setup: set both sidecar and samples"
        )
    sidecar = read_sidecar(cfg.sidecar)
    problem = sidecar.problem()
    spec, tracer = problem.spec, problem.tracer
    samples = read_samples(cfg.samples, problem.num_variables)
    manifest = RunManifest.from_config(
        cfg,
        lattice=sidecar.lattice,
        engine="decode",
        n_max=problem.n_steps,
        model=problem.model.to_dict(),
    )
    log_manifest(manifest)

    flow = spec.cartesian(tracer) - spec.cartesian(problem.start)
    flow = flow / np.linalg.norm(flow)
    evaluator = TrajectoryEvaluator(
        spec, problem.n_steps, tracer=tracer, engine="decode"
    )
    violations: Counter[str] = Counter()
    for bits in samples:
        decoded = decode(problem, bits)
        if not decoded.valid:
            violations[decoded.violation] += 1
            continue
        final = decoded.sites[-2]
        evaluator.update(
            [
                TrajectoryRecord(
                    decoded.sites,
                    path_weight(problem, decoded.sites),
                    final,
                    cos_theta(spec, tracer, final, flow),
                )
            ]
        )

    report: dict[str, Any] = {
        "lattice": sidecar.lattice,
        "n_steps": problem.n_steps,
        "samples": len(samples),
        "valid": len(samples) - sum(violations.values()),
        "distinct": len(evaluator.records),
        "violations": dict(violations),
        "coverage": None,
    }
    if not evaluator.records:
        log.warning("No valid trajectories among the samples")
        report["f"] = None
    else:
        est = evaluator.compute()
        report.update({"f": est.f, "avg_cos": est.avg_cos, "captured_mass": est.captured_mass})
        try:
            reference = [
                r
                for r in enumerate_trajectories(
                    spec, problem.model, problem.start, tracer, problem.n_steps
                )
                if r.n_steps == problem.n_steps
            ]
        except EngineInfeasibleError as ex:
            log.info(f"Skipping coverage: {ex}")
        else:
            coverage = trajectory_coverage(evaluator.records, reference)
            report["coverage"] = coverage.get(problem.n_steps, 0.0)
            log.info(
                f"Recovered {report['coverage']:.2%} of the "
                f"{len(reference)} trajectories of length {problem.n_steps}"
            )

    frame = pd.DataFrame(
        [{k: v for k, v in report.items() if k != "violations"}]
    )
    print_table(frame, title="decoded samples", digits=4)
    path = output_path(cfg, "json")
    dump_json({**report, "manifest": manifest.to_dict()}, path)
    manifest.write_beside(path)
    return report, {"problem": problem, "evaluator": evaluator, "path": path}


def cmd_lattices(cfg: DictConfig) -> tuple[dict[str, Any], dict[str, Any]]:
    r"""List the built-in lattices or emit one as JSON.

    Parameters
    ----------
    cfg : DictConfig
        Run configuration; ``emit`` names the lattice to write.

    Returns
    -------
    tuple[dict[str, Any], dict[str, Any]]
        The report and the objects created by the run.
    """
    emit = cfg.get("emit")
    if emit:
        spec = build_builtin(str(emit), int(cfg.get("n_max") or 2))
        section = cfg.get("output") or {}
        path = Path(
            section.get("path")
            or Path(cfg.paths.output_dir) / f"{spec.name}.json"
        )
        dump_lattice(spec, path)
        RunManifest.from_config(cfg, lattice=spec.name, engine=None).write_beside(
            path
        )
        log.info(f"Wrote {spec.name} lattice to {path}")
        return {"lattice": spec.name, "path": str(path)}, {"spec": spec}

    rows = []
    for name in BUILTIN_LATTICES:
        spec = build_builtin(name, 2)
        rows.append(
            {
                "name": name,
                "Z": spec.max_coordination,
                "sublattices": spec.n_sublattices,
                "bipartite": is_bipartite(spec),
                "reference_f": " / ".join(f"{f:.5g}" for f in REFERENCE_F[name]),
            }
        )
    frame = pd.DataFrame(rows)
    print_table(frame, title="built-in lattices")
    return {"lattices": rows}, {"table": frame}


COMMANDS = {
    "compute": cmd_compute,
    "table": cmd_table,
    "qubo": cmd_qubo,
    "decode": cmd_decode,
    "lattices": cmd_lattices,
}
