# numpydoc ignore=GL08
from tracercorr.utils.instantiators import (
    instantiate_engine,
    instantiate_loader,
)
from tracercorr.utils.io_utils import (
    atomic_write_text,
    dump_json,
    ensure_serializable,
)
from tracercorr.utils.logging_utils import log_manifest
from tracercorr.utils.manifest import RunManifest, config_hash
from tracercorr.utils.pylogger import RankedLogger
from tracercorr.utils.rich_utils import (
    enforce_tags,
    frame_table,
    print_config_tree,
    print_table,
)
from tracercorr.utils.utils import (
    extras,
    task_wrapper,
)

__all__ = [
    "RankedLogger",
    "RunManifest",
    "atomic_write_text",
    "config_hash",
    "dump_json",
    "enforce_tags",
    "ensure_serializable",
    "extras",
    "frame_table",
    "instantiate_engine",
    "instantiate_loader",
    "log_manifest",
    "print_config_tree",
    "print_table",
    "task_wrapper",
]
