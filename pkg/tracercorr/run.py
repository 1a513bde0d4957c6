"""Main entry point for correlation factor runs."""

from typing import Any

import hydra
import rootutils
from omegaconf import DictConfig, OmegaConf

from tracercorr.commands import COMMANDS
from tracercorr.errors import ConfigurationError, exit_code
from tracercorr.utils import RankedLogger, extras, task_wrapper
from tracercorr.utils.config_resolvers import (
    get_coordination,
    get_reference_f,
    get_thread_count,
    nmax_range,
)

rootutils.setup_root(__file__, indicator=".project-root", pythonpath=True)
# ------------------------------------------------------------------------------------ #
# the setup_root above:
# - adds the project root dir to PYTHONPATH
# - sets the PROJECT_ROOT environment variable
#       (used as a base for paths in "configs/paths/default.yaml")
# - loads environment variables from ".env" in root dir
#
# more info: https://github.com/ashleve/rootutils
# ------------------------------------------------------------------------------------ #


OmegaConf.register_new_resolver(
    "get_reference_f", get_reference_f, replace=True
)
OmegaConf.register_new_resolver(
    "get_coordination", get_coordination, replace=True
)
OmegaConf.register_new_resolver(
    "get_thread_count", get_thread_count, replace=True
)
OmegaConf.register_new_resolver("nmax_range", nmax_range, replace=True)


def initialize_hydra() -> DictConfig:
    """Initialize Hydra when main is not an option (e.g. tests).

    Returns
    -------
    DictConfig
        A DictConfig object containing the config tree.
    """
    hydra.initialize(
        version_base="1.3", config_path="../configs", job_name="run"
    )
    cfg = hydra.compose(config_name="run.yaml")
    return cfg


log = RankedLogger(__name__, rank_zero_only=True)


@task_wrapper
def run(cfg: DictConfig) -> tuple[dict[str, Any], dict[str, Any]]:
    """Run the configured command.

    This method is wrapped in optional @task_wrapper decorator, that controls
    the behavior during failure.

    Parameters
    ----------
    cfg : DictConfig
        Configuration composed by Hydra.

    Returns
    -------
    tuple[dict[str, Any], dict[str, Any]]
        The command's report and dict with all instantiated objects.

    Raises
    ------
    ConfigurationError
        If the command is unknown.
    """
    command = cfg.get("command")
    if command not in COMMANDS:
        raise ConfigurationError(f"Invalid command {command}")
    log.info(f"Running command <{command}>")
    return COMMANDS[command](cfg)


@hydra.main(
    version_base="1.3", config_path="../configs", config_name="run.yaml"
)
def main(cfg: DictConfig) -> None:
    """Main entry point.

    Failures end the process with exit code 2 for configuration and domain
    errors, 3 for infeasible engine runs and 1 otherwise.

    Parameters
    ----------
    cfg : DictConfig
        Configuration composed by Hydra.

    Raises
    ------
    SystemExit
        If the command fails.
    """
    try:
        # apply extra utilities
        # (e.g. ask for tags if none are provided in cfg, print cfg tree, etc.)
        extras(cfg)
        run(cfg)
    except Exception as ex:
        raise SystemExit(exit_code(ex)) from ex


def cli() -> None:
    """Console entry point.

    Hydra reports failures to compose the configuration, such as an unknown
    lattice or engine name, by exiting with status 1. They are configuration
    errors and end the process with status 2 instead.

    Raises
    ------
    SystemExit
        With the exit code of the run.
    """
    try:
        main()
    except SystemExit as ex:
        failure = ex.__cause__ or ex.__context__
        if ex.code == 1 and isinstance(failure, Exception):
            raise SystemExit(exit_code(failure)) from failure
        raise
    except Exception as ex:
        # HYDRA_FULL_ERROR=1 lets composition errors through unchanged
        raise SystemExit(exit_code(ex)) from ex


if __name__ == "__main__":
    cli()
