"""Instantiators for lattice loaders and engines."""

import hydra
from omegaconf import DictConfig

from tracercorr.errors import ConfigurationError
from tracercorr.utils import pylogger

log = pylogger.RankedLogger(__name__, rank_zero_only=True)


def instantiate_loader(loader_cfg: DictConfig):
    r"""Instantiate a lattice loader from config.

    Parameters
    ----------
    loader_cfg : DictConfig
        A DictConfig object with a `_target_` and `parameters`.

    Returns
    -------
    AbstractLatticeLoader
        The instantiated loader.

    Raises
    ------
    ConfigurationError
        If the config has no `_target_`.
    """
    if not isinstance(loader_cfg, DictConfig) or "_target_" not in loader_cfg:
        raise ConfigurationError("Lattice loader config needs a _target_")
    log.info(f"Instantiating loader <{loader_cfg._target_}>")
    return hydra.utils.instantiate(loader_cfg, _recursive_=False)


def instantiate_engine(engine_cfg: DictConfig):
    r"""Instantiate an engine from config.

    Parameters
    ----------
    engine_cfg : DictConfig
        A DictConfig object with a `_target_` and engine parameters.

    Returns
    -------
    AbstractEngine
        The instantiated engine.

    Raises
    ------
    ConfigurationError
        If the config has no `_target_`.
    """
    if not isinstance(engine_cfg, DictConfig) or "_target_" not in engine_cfg:
        raise ConfigurationError("Engine config needs a _target_")
    log.info(f"Instantiating engine <{engine_cfg._target_}>")
    return hydra.utils.instantiate(engine_cfg)
