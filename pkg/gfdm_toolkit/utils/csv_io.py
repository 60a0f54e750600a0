"""
CSV files with '#' metadata header lines.
"""

import logging
import os
from typing import Any, Dict, Optional, Tuple

import pandas as pd

from gfdm_toolkit import __version__

# Set up logging
logger = logging.getLogger(__name__)


def write_csv(frame: pd.DataFrame, path: str, metadata: Optional[Dict[str, Any]] = None) -> str:
    """
    Write a table preceded by '# key: value' lines.

    The version string is always recorded.

    Args:
        frame: Table to write
        path: Output file
        metadata: Extra header entries (config echo, seed, ...)

    Returns:
        The path written
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)

    header = {"version": f"gfdm_toolkit {__version__}"}
    header.update(metadata or {})
    with open(path, "w", newline="") as handle:
        for key, value in header.items():
            handle.write(f"# {key}: {value}\n")
        frame.to_csv(handle, index=False, float_format="%.10g")

    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def read_csv(path: str) -> Tuple[pd.DataFrame, Dict[str, str]]:
    """
    Read a file written by write_csv.

    Returns:
        Tuple (table, header metadata)
    """
    metadata = {}
    with open(path) as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition(":")
            metadata[key.strip()] = value.strip()
    return pd.read_csv(path, comment="#"), metadata
