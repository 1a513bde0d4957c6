"""File helpers shared by every artifact writer."""

import json
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np


def atomic_write_text(path: str | Path, text: str) -> Path:
    r"""Write text to ``path`` through a temporary sibling and a rename.

    A failure while writing leaves no partial file behind.

    Parameters
    ----------
    path : str or Path
        Destination file.
    text : str
        Full file content.

    Returns
    -------
    Path
        The destination path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(
        prefix=f".{path.name}.", suffix=".tmp", dir=path.parent
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def ensure_serializable(obj: Any) -> Any:
    r"""Convert numpy scalars, arrays, tuples and sets into JSON types.

    Parameters
    ----------
    obj : Any
        Object to convert.

    Returns
    -------
    Any
        A JSON-serializable object.
    """
    if isinstance(obj, dict):
        return {str(k): ensure_serializable(v) for k, v in obj.items()}
    if isinstance(obj, list | tuple | set):
        return [ensure_serializable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return ensure_serializable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        value = float(obj)
        return None if np.isnan(value) else value
    if isinstance(obj, float) and np.isnan(obj):
        return None
    return obj


def dump_json(data: Any, path: str | Path) -> Path:
    r"""Write JSON atomically, floats at full precision.

    Parameters
    ----------
    data : Any
        Content; converted with :func:`ensure_serializable`.
    path : str or Path
        Destination file.

    Returns
    -------
    Path
        The destination path.
    """
    text = json.dumps(ensure_serializable(data), indent=2) + "\n"
    return atomic_write_text(path, text)
