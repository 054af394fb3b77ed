"""Access to the data files bundled with the package."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path


def data_path(*parts: str) -> Path:
    """Filesystem path of a bundled data file or directory."""
    return Path(str(files("signforge").joinpath("data", *parts)))


def data_text(*parts: str) -> str:
    return data_path(*parts).read_text(encoding="utf-8")
