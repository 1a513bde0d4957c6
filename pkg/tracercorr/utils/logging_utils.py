"""Utilities for logging run provenance."""

from tracercorr.utils import pylogger

log = pylogger.RankedLogger(__name__, rank_zero_only=True)


def log_manifest(manifest) -> None:
    r"""Log the fields of a run manifest.

    Parameters
    ----------
    manifest : RunManifest
        The manifest.
    """
    data = manifest.to_dict()
    log.info(
        "Run manifest: "
        + ", ".join(f"{key}={value}" for key, value in data.items())
    )
