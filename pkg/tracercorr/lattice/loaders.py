"""Lattice loaders instantiated from the ``lattice`` config group."""

from abc import ABC, abstractmethod
from pathlib import Path

from omegaconf import DictConfig

from tracercorr.errors import ConfigurationError
from tracercorr.lattice.base import HopModel, LatticeSpec
from tracercorr.lattice.builtin import build_builtin
from tracercorr.lattice.io import load_lattice


class AbstractLatticeLoader(ABC):
    """Abstract class that provides an interface to load lattices.

    Parameters
    ----------
    parameters : DictConfig
        Configuration parameters.
    """

    def __init__(self, parameters: DictConfig):
        self.parameters = parameters

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(parameters={self.parameters})"

    @property
    def source(self) -> str:
        """Lattice name or path, as recorded in run manifests.

        Returns
        -------
        str
            Human-readable lattice source.
        """
        return str(self.parameters.get("name", self.parameters.get("path")))

    @abstractmethod
    def load_lattice(
        self, n_max: int
    ) -> tuple[LatticeSpec, HopModel | None]:
        """Load the lattice sized for trajectories up to ``n_max``.

        Parameters
        ----------
        n_max : int
            Maximum trajectory length N.

        Raises
        ------
        NotImplementedError
            If the method is not implemented.
        """
        raise NotImplementedError

    def load(self, n_max: int) -> tuple[LatticeSpec, HopModel | None]:
        """Load the lattice.

        Parameters
        ----------
        n_max : int
            Maximum trajectory length N.

        Returns
        -------
        tuple[LatticeSpec, HopModel or None]
            The lattice and, if the source defines one, its hop model.
        """
        return self.load_lattice(n_max)


class BuiltinLatticeLoader(AbstractLatticeLoader):
    """Load one of the built-in lattice families.

    Parameters
    ----------
    parameters : DictConfig
        Configuration parameters containing:
            - name: lattice family token
    """

    def load_lattice(self, n_max: int) -> tuple[LatticeSpec, None]:
        """Build the built-in family auto-sized for ``n_max``.

        Parameters
        ----------
        n_max : int
            Maximum trajectory length N.

        Returns
        -------
        tuple[LatticeSpec, None]
            The lattice; built-ins carry no hop model.
        """
        return build_builtin(self.parameters.name, n_max), None


class JSONLatticeLoader(AbstractLatticeLoader):
    """Load a user-defined lattice from a JSON file.

    Parameters
    ----------
    parameters : DictConfig
        Configuration parameters containing:
            - path: JSON lattice file
    """

    def load_lattice(
        self, n_max: int
    ) -> tuple[LatticeSpec, HopModel | None]:
        """Read the JSON lattice, auto-sizing it when its policy asks so.

        Parameters
        ----------
        n_max : int
            Maximum trajectory length N.

        Returns
        -------
        tuple[LatticeSpec, HopModel or None]
            The lattice and its embedded hop model.

        Raises
        ------
        ConfigurationError
            If no path is configured.
        """
        path = self.parameters.get("path")
        if not path:
            raise ConfigurationError(
                "Invalid lattice path None: set lattice.loader.parameters.path"
            )
        return load_lattice(Path(path), n_max=n_max)
