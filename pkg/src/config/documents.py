"""Shared document reader for system descriptors and simulation configs.

Both files are JSON documents; they are read with PyYAML's safe loader, which
accepts JSON as well as the YAML the rest of the tooling uses.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Union

import pandas as pd
import yaml

from .schema import SchemaError


def load_document(path: Union[str, Path]) -> dict[str, Any]:
    """Parse a JSON (or YAML) mapping document.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
        SchemaError: If the file does not parse or is not a mapping.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"missing file: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            raise SchemaError(f"{path.name} does not parse: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError(f"{path.name}: top-level document must be a mapping/object")
    return data


def parse_duration(value: Any, where: str) -> pd.Timedelta:
    """Parse ``"1h"``, ``"15min"`` style durations; bare numbers are minutes."""
    try:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            duration = pd.Timedelta(minutes=value)
        else:
            duration = pd.Timedelta(str(value))
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{where}: invalid duration {value!r}") from exc
    if duration <= pd.Timedelta(0):
        raise SchemaError(f"{where}: duration must be positive, got {value!r}")
    return duration
