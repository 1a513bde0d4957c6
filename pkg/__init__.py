# numpydoc ignore=GL08
import configs
import test
import tracercorr

__all__ = [
    "configs",
    "test",
    "tracercorr",
]

__version__ = "0.1.0"
